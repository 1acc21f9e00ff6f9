"""Eve's maximum information gain over the symmetrized channel.

The eavesdropper's probe states for the two key values have an overlap
Q = Tr[A xi], where xi is the orthogonal operator describing her probe
evolution, while unitarity of the joint interaction pins Tr[B xi] inside a
loss-widened band around cos(alpha').  Both A and B are real symmetric 2x2
matrices fixed by the channel triple.  Minimizing |Q| over the band gives
the largest information Eve can have extracted; the minimizers fall on a
small set of one-parameter stationary families, so the whole optimization
is closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import binary_entropy
from .errors import DegenerateChannelError, DomainError, UnreachableChannelError

# below this noise level the rank-1 closed form is used directly
NOISELESS_EPS = 1e-9
# floating-point grace on the reachability test
REACH_SLOP = 1e-9
# absolute fuzz when comparing the target against the zero-overlap limit;
# keeps exactly-orthogonal signals (cos(pi/2) ~ 1e-16 in floats) in the
# free region instead of dividing two rounding errors
FREE_SLOP = 1e-12


@dataclass(frozen=True)
class SymMat2:
    """Real symmetric 2x2 matrix."""

    m11: float
    m12: float
    m22: float

    def trace(self) -> float:
        return self.m11 + self.m22

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m12

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m22]])


@dataclass(frozen=True)
class StationaryCandidate:
    """A point on one of the stationary families of the constrained problem."""

    family: str  # "type1" | "type3+" | "type3-" | "free"
    eta: float


FREE = StationaryCandidate("free", 0.0)


@dataclass(frozen=True)
class EveBoundResult:
    """Outcome of the overlap minimization for one channel.

    ``overlap_min`` is min |Q|; ``info_gain`` and ``info_gain_shannon`` are
    the corresponding information measures in bits (collision-probability
    and Shannon).  ``free_limit`` is the largest constraint value at which
    the overlap can be driven to zero, ``constraint_max`` the largest value
    reachable at all, and ``target`` the value Eve actually has to meet.
    """

    overlap_min: float
    free_limit: float
    constraint_max: float
    achieving: StationaryCandidate
    info_gain: float
    info_gain_shannon: float
    target: float


def collision_gain(q: float) -> float:
    """Information gain (collision-probability measure) from probe overlap q."""
    return math.log2(2.0 - q * q)

def shannon_gain(q: float) -> float:
    """Information gain (Shannon measure) from probe overlap q."""
    return 1.0 - binary_entropy(0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - q * q))))


def build_matrices(alpha: float, theta: float, epsilon: float) -> tuple[SymMat2, SymMat2]:
    """Objective and constraint matrices (A, B) for the probe optimization.

    A is rank one with unit trace (it is the projector structure of the
    probe-overlap functional); B always has non-positive determinant.
    Requires 1 - (1 - eps) cos(2 alpha + theta) > 0, which fails only for a
    noiseless channel with 2 alpha + theta = 0.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"noise parameter outside [0, 1]: {epsilon}")
    den = 1.0 - (1.0 - epsilon) * math.cos(2.0 * alpha + theta)
    if den <= 1e-15:
        raise DegenerateChannelError(
            "probe matrices are singular (noiseless channel with 2*alpha + theta = 0)")
    half = alpha + 0.5 * theta
    root = math.sqrt(epsilon * (2.0 - epsilon))
    a = SymMat2(
        m11=(2.0 - epsilon) * math.sin(half) ** 2 / den,
        m12=-root * math.sin(2.0 * alpha + theta) / (2.0 * den),
        m22=epsilon * math.cos(half) ** 2 / den,
    )
    full = alpha + theta
    b = SymMat2(
        m11=(1.0 - 0.5 * epsilon) * math.cos(full),
        m12=math.sqrt((1.0 - 0.5 * epsilon) * 0.5 * epsilon) * math.sin(full),
        m22=-0.5 * epsilon * math.cos(full),
    )
    return a, b


def constraint_max(b: SymMat2) -> float:
    """Largest value of Tr[B xi] over orthogonal xi.

    Equals sqrt((B11 - B22)^2 + 4 B12^2), the sum of B's singular values
    when its eigenvalues have opposite signs.
    """
    if b.det() > 1e-12:
        raise DomainError("constraint matrix must have non-positive determinant")
    return math.hypot(b.m11 - b.m22, 2.0 * b.m12)


# --- stationary families ---------------------------------------------------------


@dataclass(frozen=True)
class Type1Curve:
    """xi = [[cos eta, sin eta], [sin eta, -cos eta]] on the probe block.

    Q and B are both pure cosine waves in eta; the B amplitude equals the
    reachability limit, so this family always reaches any feasible target.
    """

    qc: float  # A11 - A22
    qs: float  # 2 A12
    bc: float  # B11 - B22
    bs: float  # 2 B12

    family = "type1"

    def q_of(self, eta: float) -> float:
        return self.qc * math.cos(eta) + self.qs * math.sin(eta)

    def b_of(self, eta: float) -> float:
        return self.bc * math.cos(eta) + self.bs * math.sin(eta)

    def b_amplitude(self) -> float:
        return math.hypot(self.bc, self.bs)

    def solve_b(self, target: float) -> list[float]:
        amp = self.b_amplitude()
        if abs(target) > amp * (1.0 + 1e-12) + 1e-15:
            return []
        shift = math.atan2(self.bs, self.bc)
        d = math.acos(min(1.0, max(-1.0, target / amp)))
        return [shift + d, shift - d]

    def q_zero_etas(self) -> list[float]:
        shift = math.atan2(self.qs, self.qc)
        return [shift + 0.5 * math.pi, shift - 0.5 * math.pi]


@dataclass(frozen=True)
class Type3Curve:
    """xi = sign * diag(1, cos eta) in the eigenbasis singled out by kappa.

    Exists for noisy channels only (the multiplier kappa needs det B != 0).
    Q and B are affine in cos eta.
    """

    sign: float
    tr_a_pa: float  # <a|A|a>
    tr_b_pa: float  # <a|B|a>
    tr_b: float     # Tr B
    projector_eigs: tuple[float, float]

    @property
    def family(self) -> str:
        return "type3+" if self.sign > 0 else "type3-"

    def valid(self) -> bool:
        """Numerical sanity of the rank-1 projector behind the family."""
        lo, hi = min(self.projector_eigs), max(self.projector_eigs)
        return -1e-9 <= lo and hi <= 1.0 + 1e-9

    def q_of(self, eta: float) -> float:
        x = math.cos(eta)
        return self.sign * (self.tr_a_pa * (1.0 - x) + x)

    def b_of(self, eta: float) -> float:
        x = math.cos(eta)
        return self.sign * (self.tr_b_pa * (1.0 - x) + x * self.tr_b)

    def b_interval(self) -> tuple[float, float]:
        ends = (self.b_of(0.0), self.b_of(math.pi))
        return (min(ends), max(ends))

    def _eta_from_x(self, x: float) -> float:
        return math.acos(min(1.0, max(-1.0, x)))

    def solve_b(self, target: float) -> list[float]:
        den = self.tr_b - self.tr_b_pa
        if abs(den) < 1e-14:
            # B constant along the family
            if abs(self.sign * self.tr_b_pa - target) < 1e-12:
                return [0.0, math.pi]
            return []
        x = (self.sign * target - self.tr_b_pa) / den
        if abs(x) > 1.0 + 1e-9:
            return []
        return [self._eta_from_x(x)]

    def q_zero_etas(self) -> list[float]:
        den = 1.0 - self.tr_a_pa
        if abs(den) < 1e-14:
            return []
        x = -self.tr_a_pa / den
        if abs(x) > 1.0:
            return []
        return [self._eta_from_x(x)]


def stationary_curves(a: SymMat2, b: SymMat2) -> list:
    """All stationary families of |Q| under a fixed constraint value.

    The pure-rotation family is omitted: its interior points are never
    stationary for the full problem and its endpoints give |Q| = 1, so it
    cannot supply a minimum (this neglect is exercised against the oracle
    in the test suite).  Requires a noisy channel; for a noiseless one the
    closed form q = |B target| / |cos(alpha + theta)| applies instead.
    """
    det_b = b.det()
    if abs(det_b) < 1e-15:
        raise DegenerateChannelError(
            "stationary families need det B != 0 (noisy channel); "
            "use the noiseless closed form")
    curves: list = [Type1Curve(qc=a.m11 - a.m22, qs=2.0 * a.m12,
                               bc=b.m11 - b.m22, bs=2.0 * b.m12)]
    kappa = (a.m11 * b.m22 + a.m22 * b.m11 - 2.0 * a.m12 * b.m12) / det_b
    m = a.as_array() - kappa * b.as_array()
    trace = float(np.trace(m))
    if abs(trace) < 1e-14:
        return curves
    projector = m / trace
    eigs = tuple(float(e) for e in np.linalg.eigvalsh(projector))
    tr_a_pa = float(np.trace(a.as_array() @ projector))
    tr_b_pa = float(np.trace(b.as_array() @ projector))
    for sign in (1.0, -1.0):
        curve = Type3Curve(sign=sign, tr_a_pa=tr_a_pa, tr_b_pa=tr_b_pa,
                           tr_b=b.trace(), projector_eigs=eigs)
        if curve.valid():
            curves.append(curve)
    return curves


def zero_overlap_limit(a: SymMat2, b: SymMat2) -> float:
    """Largest |constraint value| at which the overlap can vanish.

    Maximizes |B| over the zero set of Q across the stationary families.
    Callers handle the noiseless case (where the limit is exactly 0).
    """
    best = 0.0
    for curve in stationary_curves(a, b):
        for eta in curve.q_zero_etas():
            best = max(best, abs(curve.b_of(eta)))
    return best


def min_overlap_at(a: SymMat2, b: SymMat2, target: float,
                   ) -> tuple[float, StationaryCandidate]:
    """Minimum |Q| subject to Tr[B xi] = target (exact constraint).

    Even in the sign of the target (xi -> -xi flips both traces); below the
    zero-overlap limit the minimum is 0, above it the best stationary-family
    root wins.  Ties go to the always-present family for deterministic
    output.
    """
    t = abs(target)
    bmax = constraint_max(b)
    if t > bmax + REACH_SLOP:
        raise DomainError(f"constraint target {t:.6f} exceeds the maximum {bmax:.6f}")
    t = min(t, bmax)
    if t <= zero_overlap_limit(a, b) + 1e-12:
        return 0.0, FREE
    best: tuple[float, int, StationaryCandidate] | None = None
    for curve in stationary_curves(a, b):
        rank = 0 if curve.family == "type1" else 1
        for eta in curve.solve_b(t):
            q = abs(curve.q_of(eta))
            key = (q, rank, StationaryCandidate(curve.family, eta))
            if best is None or key[:2] < best[:2]:
                best = key
    if best is None:  # unreachable: type1 spans the full interval
        raise DomainError(f"no stationary point reaches constraint value {t}")
    return best[0], best[2]


def _effective_target(alpha_prime: float, transmission: float) -> float:
    """Smallest |Tr[B xi]| compatible with the loss-widened unitarity band.

    The band is |T * Tr[B xi] - cos(alpha')| <= 1 - T; Eve always prefers
    the feasible value closest to zero.
    """
    return (math.cos(alpha_prime) - (1.0 - transmission)) / transmission


def _gain_result(alpha_prime: float, alpha: float, theta: float, epsilon: float,
                 transmission: float) -> EveBoundResult:
    if not 0.0 <= alpha_prime <= math.pi / 2.0:
        raise DomainError(f"signal angle outside [0, pi/2]: {alpha_prime}")
    if not 0.0 < transmission <= 1.0:
        raise DomainError(f"transmission outside (0, 1]: {transmission}")
    if epsilon < NOISELESS_EPS:
        bmax = abs(math.cos(alpha + theta))
        free_limit = 0.0
        lo = _effective_target(alpha_prime, transmission)
        if lo > bmax + REACH_SLOP:
            raise UnreachableChannelError(
                f"observed channel needs constraint value {lo:.6f} > maximum {bmax:.6f}")
        lo = min(lo, bmax)
        if lo <= free_limit + FREE_SLOP:
            q, cand = 0.0, FREE
        else:
            q = lo / bmax
            cand = StationaryCandidate("type1", math.acos(min(1.0, max(-1.0, q))))
    else:
        a, b = build_matrices(alpha, theta, epsilon)
        bmax = constraint_max(b)
        free_limit = zero_overlap_limit(a, b)
        lo = _effective_target(alpha_prime, transmission)
        if lo > bmax + REACH_SLOP:
            raise UnreachableChannelError(
                f"observed channel needs constraint value {lo:.6f} > maximum {bmax:.6f}")
        lo = min(lo, bmax)
        if lo <= free_limit + FREE_SLOP:
            q, cand = 0.0, FREE
        else:
            q, cand = min_overlap_at(a, b, lo)
    return EveBoundResult(
        overlap_min=q,
        free_limit=free_limit,
        constraint_max=bmax,
        achieving=cand,
        info_gain=collision_gain(q),
        info_gain_shannon=shannon_gain(q),
        target=lo,
    )


def eve_max_gain(alpha_prime: float, alpha: float, triple) -> EveBoundResult:
    """Eve's maximum information gain on correct bits for one channel triple."""
    return _gain_result(alpha_prime, alpha, triple.theta, triple.epsilon,
                        triple.transmission)


def flipped_bit_gain(alpha_prime: float, alpha: float, triple) -> EveBoundResult:
    """Eve's maximum information gain on flipped bits.

    Identical optimization with the tilt angle replaced by
    -2 alpha - theta, which exchanges the roles of the conclusive outcomes.
    """
    return _gain_result(alpha_prime, alpha, -2.0 * alpha - triple.theta,
                        triple.epsilon, triple.transmission)
