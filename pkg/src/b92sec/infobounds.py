"""Information-theoretic ceiling on Eve's Shannon gain from conclusive events.

Two effects cap what any eavesdropper can learn per conclusive bit: the
signal states are nonorthogonal (nobody can distinguish them perfectly),
and Bob's conclusive outcomes come from nonorthogonal effects (Eve cannot
steer them at will).  Adding the two bounds and dividing by the fraction
of correct bits yields an upper bound on the per-correct-bit Shannon gain
which *decreases* with noise in the small-angle regime, explaining the
drop of the exact optimum there.  These formulas hold for theta = 0 with
the analyzer matched to the signal angle (alpha' = alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import binary_entropy
from .errors import DomainError


def conclusive_probability(alpha: float, epsilon: float, transmission: float) -> float:
    """Probability per pulse of a conclusive outcome: (T/4)[2 - (1-eps)(cos 2a + 1)]."""
    return 0.25 * transmission * (2.0 - (1.0 - epsilon) * (math.cos(2.0 * alpha) + 1.0))


def bit_error_rate(alpha: float, epsilon: float) -> float:
    """Error rate among conclusive bits: eps / (2 - (1-eps)(cos 2a + 1))."""
    den = 2.0 - (1.0 - epsilon) * (math.cos(2.0 * alpha) + 1.0)
    if den <= 1e-15:
        raise DomainError("no conclusive events (noiseless channel at alpha = 0)")
    return epsilon / den


def conclusive_entropy_floor(x: float, alpha: float) -> float:
    """Least possible entropy of Bob's conclusive outcome, given its rate.

    For any single-photon state whose conclusive probability is ``x``, the
    entropy of the conclusive bit is at least

        h( 1/2 - (sin a / 4x) sqrt(1 - ((1 - 2x)/cos a)^2) ).

    ``x`` must lie in [(1 - cos a)/2, (1 + cos a)/2]; outside that window no
    state attains the requested rate.
    """
    if x <= 0.0:
        raise DomainError(f"conclusive probability must be positive: {x}")
    ratio = (1.0 - 2.0 * x) / math.cos(alpha)
    if abs(ratio) > 1.0 + 1e-12:
        raise DomainError(
            f"no state reaches conclusive probability {x} at this angle")
    radicand = max(0.0, 1.0 - ratio * ratio)
    arg = 0.5 - (math.sin(alpha) / (4.0 * x)) * math.sqrt(radicand)
    return binary_entropy(min(max(arg, 0.0), 1.0))


@dataclass(frozen=True)
class BoundReport:
    """Assembled ceiling on the per-correct-bit Shannon gain.

    ``term_state`` bounds how well Bob and Eve jointly distinguish Alice's
    states; ``term_control`` bounds how well Eve steers Bob's conclusive
    outcome; ``total`` is their sum, and ``upper_bound`` divides by the
    correct-bit fraction.  Values above one bit are vacuous; the raw number
    is kept and a clamped copy is provided alongside.
    """

    p_conc: float
    error_rate: float
    term_state: float
    term_control: float
    total: float
    upper_bound: float
    upper_bound_clamped: float
    vacuous: bool


def shannon_upper_bound(alpha: float, epsilon: float, transmission: float) -> BoundReport:
    """Ceiling on Eve's Shannon gain per correct bit (theta = 0, alpha' = alpha)."""
    p_conc = conclusive_probability(alpha, epsilon, transmission)
    if p_conc <= 0.0:
        raise DomainError("conclusive probability vanishes; bound undefined")
    e = bit_error_rate(alpha, epsilon)
    term_state = (1.0 - binary_entropy(
        0.5 * (1.0 - math.sqrt(1.0 - math.cos(alpha) ** 2)))) / p_conc
    term_control = 1.0 - conclusive_entropy_floor(p_conc / transmission, alpha)
    total = term_state + term_control
    if e >= 1.0:
        upper = math.inf
    else:
        upper = total / (1.0 - e)
    return BoundReport(
        p_conc=p_conc,
        error_rate=e,
        term_state=term_state,
        term_control=term_control,
        total=total,
        upper_bound=upper,
        upper_bound_clamped=min(1.0, upper),
        vacuous=upper >= 1.0,
    )
