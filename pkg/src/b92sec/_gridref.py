"""Pure-numpy fallback for the oracle grid scan.

Same contract as ``_gridcore.scan`` (the compiled kernel); the two must
stay in lockstep, and the test suite asserts parity.  The search space is
X = R(u) diag(s1, s2) R(v) with u in [0, 2pi), v in [0, pi), s1 in [0, 1]
and s2 in [-1, 1]; the signed s2 covers reflections, without which blocks
of orthogonal operators with negative determinant would be missed.
"""

import numpy as np


def scan(a11, a12, a22, b11, b12, b22, lo, hi, resolution, topk):
    """Grid-scan min |Tr[A X]| subject to lo <= Tr[B X] <= hi.

    Returns ``(best, seeds, gap_seeds)`` where ``best`` is the smallest
    feasible objective (inf if none), ``seeds`` is a (topk, 3) array of
    rows (cell objective, u, v) sorted ascending, and ``gap_seeds`` the
    analogous rows (constraint gap, u, v) over infeasible points.
    """
    res = int(resolution)
    if res < 2:
        raise ValueError(f"resolution must be at least 2: {res}")
    du = 2.0 * np.pi / res
    dv = np.pi / res
    ds1 = 1.0 / (res - 1)
    ds2 = 2.0 / (res - 1)
    u = np.arange(res) * du
    v = np.arange(res) * dv
    cu, su = np.cos(u), np.sin(u)
    cv, sv = np.cos(v), np.sin(v)
    # Tr[M R(u) D R(v)] = s1 * (R(v) M R(u))_11 + s2 * (R(v) M R(u))_22
    ta1 = a11 * cu + a12 * su
    ta2 = a12 * cu + a22 * su
    ua1 = -a11 * su + a12 * cu
    ua2 = -a12 * su + a22 * cu
    tb1 = b11 * cu + b12 * su
    tb2 = b12 * cu + b22 * su
    ub1 = -b11 * su + b12 * cu
    ub2 = -b12 * su + b22 * cu
    a1 = ta1[:, None] * cv[None, :] - ta2[:, None] * sv[None, :]
    a2 = ua1[:, None] * sv[None, :] + ua2[:, None] * cv[None, :]
    b1 = tb1[:, None] * cv[None, :] - tb2[:, None] * sv[None, :]
    b2 = ub1[:, None] * sv[None, :] + ub2[:, None] * cv[None, :]
    s1 = np.arange(res) * ds1
    s2 = -1.0 + np.arange(res) * ds2
    local = np.empty((res, res))
    gap = np.empty((res, res))
    for iu in range(res):  # chunk over u to cap memory at O(res^3)
        qa = np.abs(s1[None, :, None] * a1[iu][:, None, None]
                    + s2[None, None, :] * a2[iu][:, None, None])
        qb = (s1[None, :, None] * b1[iu][:, None, None]
              + s2[None, None, :] * b2[iu][:, None, None])
        feasible = (qb >= lo) & (qb <= hi)
        local[iu] = np.where(feasible, qa, np.inf).min(axis=(1, 2))
        qgap = np.where(qb < lo, lo - qb, np.where(qb > hi, qb - hi, np.inf))
        gap[iu] = qgap.min(axis=(1, 2))
    best = float(local.min())

    def top(values):
        flat = values.ravel()
        order = np.argsort(flat, kind="stable")[:topk]
        rows = np.empty((len(order), 3))
        rows[:, 0] = flat[order]
        rows[:, 1] = u[order // res]
        rows[:, 2] = v[order % res]
        return rows

    return best, top(local), top(gap)
