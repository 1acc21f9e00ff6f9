"""Brute-force verification oracle for the overlap minimization.

Independent of the stationary-family analysis: the probe operator's
action on the relevant 2-dimensional block is an arbitrary contraction
X = R(u) diag(s1, s2) R(v) (signed s2 covers reflections), and the oracle
minimizes |Tr[A X]| under the constraint on Tr[B X] by a coarse grid scan
followed by local refinement.  During refinement the two rotation angles
are pattern-searched while the (s1, s2) sub-problem - a linear objective
on a line or band clipped to the box - is solved exactly, so the reported
value carries no constraint slack.

The hot scan runs in a compiled extension when available and in a numpy
fallback otherwise; ``backend_name()`` tells which one is active, and the
environment variable ``B92SEC_FORCE_NUMPY=1`` forces the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OracleInfeasibleError
from .evebound import SymMat2

if os.environ.get("B92SEC_FORCE_NUMPY") == "1":
    from . import _gridref as _kernel
    _BACKEND = "numpy"
else:
    try:
        from . import _gridcore as _kernel  # type: ignore[no-redef]
        _BACKEND = "compiled"
    except ImportError:
        from . import _gridref as _kernel  # type: ignore[no-redef]
        _BACKEND = "numpy"

# refinement knobs: pattern-search floor and tangency slop for the box clip
_MIN_STEP = 1e-9
_CLIP_SLOP = 1e-12


def backend_name() -> str:
    """Which scan implementation is active: "compiled" or "numpy"."""
    return _BACKEND


@dataclass(frozen=True)
class Contraction2:
    """Contraction X = R(u) diag(s1, s2) R(v) on the probe block.

    s1 lies in [0, 1]; s2 in [-1, 1], its sign absorbing the reflection
    needed to reach blocks of orthogonal operators with det < 0.
    """

    u: float
    v: float
    s1: float
    s2: float

    def matrix(self) -> np.ndarray:
        ru = np.array([[math.cos(self.u), -math.sin(self.u)],
                       [math.sin(self.u), math.cos(self.u)]])
        rv = np.array([[math.cos(self.v), -math.sin(self.v)],
                       [math.sin(self.v), math.cos(self.v)]])
        return ru @ np.diag([self.s1, self.s2]) @ rv


@dataclass(frozen=True)
class OracleResult:
    value: float
    point: Contraction2
    backend: str
    resolution: int
    coarse_slack: float
    coarse_value: float


def _rotated_coeffs(m: SymMat2, u: float, v: float) -> tuple[float, float]:
    """Diagonal of R(v) M R(u), so Tr[M X] = s1 * first + s2 * second."""
    cu, su = math.cos(u), math.sin(u)
    cv, sv = math.cos(v), math.sin(v)
    first = cv * (m.m11 * cu + m.m12 * su) - sv * (m.m12 * cu + m.m22 * su)
    second = sv * (-m.m11 * su + m.m12 * cu) + cv * (-m.m12 * su + m.m22 * cu)
    return first, second


def _segment_min(a1, a2, b1, b2, target):
    """Exact min of |s1 a1 + s2 a2| on the line s1 b1 + s2 b2 = target in the box.

    Returns (value, s1, s2) or None when the line misses the box.
    """
    norm2 = b1 * b1 + b2 * b2
    if norm2 < 1e-28:
        if abs(target) > 1e-12:
            return None
        return 0.0, 0.0, 0.0
    px = target * b1 / norm2
    py = target * b2 / norm2
    dx, dy = -b2, b1
    t_lo, t_hi = -math.inf, math.inf
    for p, d, lo, hi in ((px, dx, 0.0, 1.0), (py, dy, -1.0, 1.0)):
        if abs(d) < 1e-16:
            if p < lo - _CLIP_SLOP or p > hi + _CLIP_SLOP:
                return None
        else:
            t1, t2 = (lo - p) / d, (hi - p) / d
            t_lo = max(t_lo, min(t1, t2))
            t_hi = min(t_hi, max(t1, t2))
    if t_lo > t_hi:
        return None
    q0 = a1 * px + a2 * py
    q1 = a1 * dx + a2 * dy

    def point(t):
        return abs(q0 + t * q1), px + t * dx, py + t * dy

    if abs(q1) < 1e-16:
        return point(t_lo)
    t_zero = -q0 / q1
    if t_lo <= t_zero <= t_hi:
        return point(t_zero)
    lo_pt, hi_pt = point(t_lo), point(t_hi)
    return lo_pt if lo_pt[0] <= hi_pt[0] else hi_pt


def _band_min(a1, a2, b1, b2, lo, hi):
    """Exact min of |s1 a1 + s2 a2| on the box slab lo <= s1 b1 + s2 b2 <= hi.

    The objective is |linear|, so the minimum sits on its zero line (if that
    crosses the slab) or at a vertex of the clipped polygon.
    """
    best = None

    def consider(s1, s2):
        nonlocal best
        if not (-_CLIP_SLOP <= s1 <= 1.0 + _CLIP_SLOP and abs(s2) <= 1.0 + _CLIP_SLOP):
            return
        qb = s1 * b1 + s2 * b2
        if qb < lo - 1e-10 or qb > hi + 1e-10:
            return
        value = abs(s1 * a1 + s2 * a2)
        if best is None or value < best[0]:
            best = (value, min(max(s1, 0.0), 1.0), min(max(s2, -1.0), 1.0))

    # corners of the box
    for s1 in (0.0, 1.0):
        for s2 in (-1.0, 1.0):
            consider(s1, s2)
    # intersections of the slab edges with the box
    for edge in (lo, hi):
        hit = _segment_min(a1, a2, b1, b2, edge)
        if hit is not None:
            consider(hit[1], hit[2])
        # endpoints of the clipped edge segment
        seg = _segment_endpoints(b1, b2, edge)
        if seg is not None:
            for s1, s2 in seg:
                consider(s1, s2)
    # objective zero line crossing the slab
    norm2 = a1 * a1 + a2 * a2
    if norm2 < 1e-28:
        # objective identically zero: feasibility is all that matters
        if best is not None:
            return 0.0, best[1], best[2]
        return None
    seg = _segment_endpoints(a1, a2, 0.0)
    if seg is not None:
        (x1, y1), (x2, y2) = seg
        qb1 = x1 * b1 + y1 * b2
        qb2 = x2 * b1 + y2 * b2
        qmin, qmax = min(qb1, qb2), max(qb1, qb2)
        if qmin <= hi and qmax >= lo:
            # pick a feasible point on the zero segment
            span = qb2 - qb1
            t = 0.0 if abs(span) < 1e-16 else (min(max(lo, qmin), hi) - qb1) / span
            t = min(max(t, 0.0), 1.0)
            return 0.0, x1 + t * (x2 - x1), y1 + t * (y2 - y1)
    if best is None:
        return None
    return best


def _segment_endpoints(c1, c2, value):
    """Endpoints of the line c1 s1 + c2 s2 = value clipped to the box, or None."""
    norm2 = c1 * c1 + c2 * c2
    if norm2 < 1e-28:
        if abs(value) > 1e-12:
            return None
        return (0.0, -1.0), (1.0, 1.0)  # whole box; return two corners
    px = value * c1 / norm2
    py = value * c2 / norm2
    dx, dy = -c2, c1
    t_lo, t_hi = -math.inf, math.inf
    for p, d, lo, hi in ((px, dx, 0.0, 1.0), (py, dy, -1.0, 1.0)):
        if abs(d) < 1e-16:
            if p < lo - _CLIP_SLOP or p > hi + _CLIP_SLOP:
                return None
        else:
            t1, t2 = (lo - p) / d, (hi - p) / d
            t_lo = max(t_lo, min(t1, t2))
            t_hi = min(t_hi, max(t1, t2))
    if t_lo > t_hi:
        return None
    return (px + t_lo * dx, py + t_lo * dy), (px + t_hi * dx, py + t_hi * dy)


def _exact_uv(a: SymMat2, b: SymMat2, lo: float, hi: float, u: float, v: float):
    """Exact inner minimum at fixed rotations, or None when infeasible."""
    a1, a2 = _rotated_coeffs(a, u, v)
    b1, b2 = _rotated_coeffs(b, u, v)
    if hi - lo < 1e-14:
        return _segment_min(a1, a2, b1, b2, 0.5 * (lo + hi))
    return _band_min(a1, a2, b1, b2, lo, hi)


def _refine(a, b, lo, hi, seeds, step0):
    """Pattern search on (u, v) from each seed with the exact inner solve."""
    best_value = math.inf
    best_point = None
    moves = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))
    for u0, v0 in seeds:
        u, v = float(u0), float(v0)
        hit = _exact_uv(a, b, lo, hi, u, v)
        value = math.inf if hit is None else hit[0]
        step = step0
        while step > _MIN_STEP:
            improved = False
            for du, dv in moves:
                cand = _exact_uv(a, b, lo, hi, u + du * step, v + dv * step)
                if cand is not None and cand[0] < value - 1e-16:
                    u, v = u + du * step, v + dv * step
                    value, hit = cand[0], cand
                    improved = True
                    break
            if not improved:
                step *= 0.5
        if hit is not None and value < best_value:
            best_value = value
            best_point = Contraction2(u=u, v=v, s1=hit[1], s2=hit[2])
    return best_value, best_point


def _search(a: SymMat2, b: SymMat2, lo: float, hi: float,
            resolution: int, topk: int) -> OracleResult:
    # coarse-stage slack: ten grid steps of the constraint-trace sensitivity
    # (the hypot+trace bound covers the full range of Tr[B X] over contractions)
    scale = math.hypot(b.m11 - b.m22, 2.0 * b.m12) + abs(b.m11 + b.m22)
    slack = 10.0 * scale * 2.0 / max(resolution - 1, 1)
    coarse, seeds, gap_seeds = _kernel.scan(
        a.m11, a.m12, a.m22, b.m11, b.m12, b.m22,
        lo - slack, hi + slack, resolution, topk)
    pool = [(row[1], row[2]) for row in seeds if math.isfinite(row[0])]
    pool += [(row[1], row[2]) for row in gap_seeds if math.isfinite(row[0])]
    if not pool:
        raise OracleInfeasibleError("no grid cell near the constraint at the coarse stage")
    step0 = 2.0 * math.pi / resolution
    value, point = _refine(a, b, lo, hi, pool, step0)
    if point is None:
        raise OracleInfeasibleError(
            f"no contraction meets the constraint [{lo:.6g}, {hi:.6g}]; "
            "the target lies outside the reachable range")
    return OracleResult(value=value, point=point, backend=_BACKEND,
                        resolution=resolution, coarse_slack=slack,
                        coarse_value=coarse)


def oracle_min_overlap(a: SymMat2, b: SymMat2, target: float,
                       resolution: int = 64, topk: int = 10) -> OracleResult:
    """Brute-force min |Tr[A X]| subject to Tr[B X] = target."""
    return _search(a, b, target, target, resolution, topk)


def oracle_min_overlap_lossy(a: SymMat2, b: SymMat2, alpha_prime: float,
                             transmission: float, resolution: int = 64,
                             topk: int = 10) -> OracleResult:
    """Brute-force minimum under the loss-widened unitarity band.

    The constraint is |T Tr[B X] - cos(alpha')| <= 1 - T; at T = 1 it
    collapses to the equality oracle at cos(alpha'), and as T -> 0 it
    becomes vacuous.
    """
    if not 0.0 < transmission <= 1.0:
        raise DomainError(f"transmission outside (0, 1]: {transmission}")
    c = math.cos(alpha_prime)
    lo = (c - (1.0 - transmission)) / transmission
    hi = (c + (1.0 - transmission)) / transmission
    return _search(a, b, lo, hi, resolution, topk)
