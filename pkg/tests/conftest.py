"""Shared helpers: explicit 2x2 matrix algebra used as an independent check.

The library computes probabilities through Bloch-vector dot products; these
helpers rebuild the same quantities from full kets, outer products and
matrix traces, so agreement is a real cross-check rather than a tautology.
"""

import math

import numpy as np
import pytest

DEG = math.pi / 180.0


def ket(phi: float) -> np.ndarray:
    return np.array([math.cos(phi / 2.0), math.sin(phi / 2.0)])


def bar_ket(phi: float) -> np.ndarray:
    s, c = math.sin(phi / 2.0), math.cos(phi / 2.0)
    return np.array([s, -c]) if phi >= 0.0 else np.array([-s, c])


def projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def explicit_qubit_block(theta: float, epsilon: float, transmission: float,
                         alpha: float, bit: int) -> np.ndarray:
    """T [(1 - eps/2)|sigma><sigma| + (eps/2)|bar><bar|] built from kets."""
    sign = -1.0 if bit == 0 else 1.0
    phi = sign * (alpha + theta)
    return transmission * ((1.0 - epsilon / 2.0) * projector(ket(phi))
                           + (epsilon / 2.0) * projector(bar_ket(phi)))


def bloch_of_matrix(rho: np.ndarray) -> np.ndarray:
    """Pauli components (x, y, z) of a 2x2 matrix."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.real(np.array([np.trace(rho @ s) for s in (sx, sy, sz)]))


def explicit_povm_effects(alpha: float) -> dict[str, np.ndarray]:
    """Bob's four polarization effects as explicit half-weight projectors."""
    return {
        "0": 0.5 * projector(ket(-alpha)),
        "0b": 0.5 * projector(bar_ket(-alpha)),
        "1": 0.5 * projector(ket(alpha)),
        "1b": 0.5 * projector(bar_ket(alpha)),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def estimator_sigmas(triple, alpha: float, n_total: int) -> np.ndarray:
    """Delta-method standard errors of (theta, eps, T) estimates.

    Builds the multinomial covariance of the three count statistics the
    inversion consumes and pushes it through a numerical Jacobian of the
    closed-form inversion.  Used to define the 3-sigma acceptance windows
    for sampled runs.
    """
    from b92sec.states import OUTCOMES, Povm5, symmetrized_density

    povm = Povm5(alpha)
    probs = {}
    for bit in (0, 1):
        rho = symmetrized_density(triple, alpha, bit)
        for label in OUTCOMES:
            probs[bit, label] = 0.5 * povm.probability(label, rho)

    # raw statistics: S1, S2 (asymmetry sums / n) and D (detected fraction)
    coeff = {
        "s1": {(0, "0"): 1, (0, "0b"): -1, (1, "1"): 1, (1, "1b"): -1},
        "s2": {(0, "1"): 1, (0, "1b"): -1, (1, "0"): 1, (1, "0b"): -1},
        "d": {(b, m): 1 for b in (0, 1) for m in OUTCOMES if m != "V"},
    }
    names = ("s1", "s2", "d")
    mean = np.array([sum(c * probs[k] for k, c in coeff[n].items())
                     for n in names])
    cov = np.empty((3, 3))
    for i, ni in enumerate(names):
        for j, nj in enumerate(names):
            cross = sum(coeff[ni].get(k, 0) * coeff[nj].get(k, 0) * p
                        for k, p in probs.items())
            cov[i, j] = (cross - mean[i] * mean[j]) / n_total

    def invert(stats):
        s1, s2, d = stats
        x1 = 2.0 * s1 / d
        x2 = 2.0 * s2 / d
        y = (x1 * math.cos(2 * alpha) - x2) / math.sin(2 * alpha)
        return np.array([math.atan2(y, x1), 1.0 - math.hypot(x1, y), d])

    jac = np.empty((3, 3))
    h = 1e-7
    for j in range(3):
        up, dn = mean.copy(), mean.copy()
        up[j] += h
        dn[j] -= h
        jac[:, j] = (invert(up) - invert(dn)) / (2 * h)
    # exact-zero variances (e.g. T at unit transmission) can round negative
    return np.sqrt(np.clip(np.diag(jac @ cov @ jac.T), 0.0, None))
