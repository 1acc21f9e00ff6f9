"""Secret-key gain, angle optimization, link physics and the BB84 comparison.

The net key gain per pulse charges three costs against the conclusive
rate: privacy amplification of correct bits, privacy amplification of
flipped bits, and the encrypted error-correction redundancy h(e).  All
figures assume the analyzer matched to the signal angle (alpha' = alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .entropy import binary_entropy
from .errors import DegenerateLinkError, DomainError
from .estimation import ChannelTriple
from .evebound import eve_max_gain, flipped_bit_gain
from .states import Povm5, symmetrized_density

MODES = ("collision", "shannon")

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PhysicalLink:
    """Fiber-link hardware parameters.

    ``dark_mean`` is the mean dark count per pulse (detector dark rate
    times the resolution time); dark counts are Poissonian.
    """

    length_km: float
    channel_loss_db_km: float
    receiver_loss_db: float
    dark_mean: float
    det_efficiency: float

    def __post_init__(self):
        for name in ("length_km", "channel_loss_db_km", "receiver_loss_db",
                     "dark_mean", "det_efficiency"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be non-negative")
        if self.det_efficiency > 1.0:
            raise DomainError("det_efficiency must not exceed 1")

    def at_length(self, length_km: float) -> "PhysicalLink":
        return replace(self, length_km=length_km)


# measured parameters of a deployed fiber testbed, used throughout as preset
KTH_LINK = PhysicalLink(length_km=20.0, channel_loss_db_km=0.2,
                        receiver_loss_db=1.0, dark_mean=2e-4,
                        det_efficiency=0.18)

LINK_PRESETS = {"kth": KTH_LINK}


@dataclass(frozen=True)
class KeyGainReport:
    """Per-configuration record of the key-gain accounting (bits per pulse)."""

    alpha: float
    p_conc: float
    error_rate: float
    info_correct: float
    info_flipped: float
    gain_correct: float
    gain_flipped: float
    gain: float
    mode: str


def secret_key_gain(alpha: float, triple: ChannelTriple, mode: str = "collision",
                    security_correct: float = 0.0, security_flipped: float = 0.0,
                    n_total: int | None = None) -> KeyGainReport:
    """Net secret-key gain per pulse for analyzer angle ``alpha`` (= alpha').

    The conclusive rate and error rate follow from the channel triple; the
    leak estimates come from the overlap minimization (collision measure by
    default, Shannon with ``mode="shannon"``).  ``security_correct`` and
    ``security_flipped`` are finite-length security parameters, charged as
    s/n_total; by default the long-key limit is used.
    """
    if mode not in MODES:
        raise DomainError(f"unknown estimation mode: {mode!r}")
    povm = Povm5(alpha)
    rho0 = symmetrized_density(triple, alpha, 0)
    p_error = povm.probability("0b", rho0)
    p_conc = p_error + povm.probability("1b", rho0)
    if p_conc <= 0.0:
        raise DomainError("conclusive probability vanishes; key gain undefined")
    e = p_error / p_conc
    if e >= 1.0:
        raise DomainError(f"error rate must be below 1: {e}")

    correct = eve_max_gain(alpha, alpha, triple)
    info_c = correct.info_gain if mode == "collision" else correct.info_gain_shannon
    if e > 0.0:
        flipped = flipped_bit_gain(alpha, alpha, triple)
        info_f = flipped.info_gain if mode == "collision" else flipped.info_gain_shannon
    else:
        info_f = 0.0

    finite_c = security_correct / n_total if n_total else 0.0
    finite_f = security_flipped / n_total if n_total else 0.0
    gain_correct = p_conc * (1.0 - e) * (1.0 - info_c) - finite_c
    gain_flipped = p_conc * e * (1.0 - info_f) - finite_f
    gain = gain_correct + gain_flipped - p_conc * binary_entropy(e)
    return KeyGainReport(alpha=alpha, p_conc=p_conc, error_rate=e,
                         info_correct=info_c, info_flipped=info_f,
                         gain_correct=gain_correct, gain_flipped=gain_flipped,
                         gain=gain, mode=mode)


def noiseless_gain(alpha: float, transmission: float) -> float:
    """Closed form for the key gain on a lossy but noiseless channel.

    G = (T/4)(1 - cos 2a)[1 - log2(2 - ((cos a - 1 + T)/(T cos a))^2)].
    Valid where cos(alpha) >= 1 - T (otherwise loss alone hands Eve the
    full key and the general expression applies instead).
    """
    q = (math.cos(alpha) - 1.0 + transmission) / (transmission * math.cos(alpha))
    return (0.25 * transmission * (1.0 - math.cos(2.0 * alpha))
            * (1.0 - math.log2(2.0 - q * q)))


def _gain_or_neg_inf(alpha: float, triple: ChannelTriple, mode: str) -> float:
    try:
        return secret_key_gain(alpha, triple, mode).gain
    except DomainError:
        return -math.inf


def optimal_angle(triple: ChannelTriple, mode: str = "collision",
                  tol: float = 1e-6) -> tuple[float, float]:
    """Angle maximizing the key gain, and the gain there.

    A 90-point coarse scan over (0, pi/2] seeds a golden-section search
    (the gain is not concave near the full-information boundary, so the
    scan guards against the wrong basin).  Returns (0, 0) when no angle
    yields positive gain, meaning the protocol cannot produce a key.
    """
    grid = [k * math.pi / 180.0 for k in range(1, 91)]
    gains = [_gain_or_neg_inf(a, triple, mode) for a in grid]
    best = max(range(len(grid)), key=gains.__getitem__)
    if gains[best] <= 0.0:
        return 0.0, 0.0
    lo = grid[best - 1] if best > 0 else grid[0] / 2.0
    hi = grid[best + 1] if best + 1 < len(grid) else grid[-1]
    # golden-section maximization on [lo, hi]
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _gain_or_neg_inf(x1, triple, mode)
    f2 = _gain_or_neg_inf(x2, triple, mode)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = _gain_or_neg_inf(x2, triple, mode)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = _gain_or_neg_inf(x1, triple, mode)
    alpha_star = 0.5 * (lo + hi)
    return alpha_star, _gain_or_neg_inf(alpha_star, triple, mode)


def positive_noise_limit(transmission: float, mode: str = "collision",
                         tol: float = 1e-5) -> float:
    """Largest noise rate at which the optimized key gain stays positive.

    Scans eps upward to bracket the sign change of the optimized gain,
    then bisects.  Returns 0 when even a noiseless channel yields nothing.
    """
    def g_star(eps: float) -> float:
        return optimal_angle(ChannelTriple(0.0, eps, transmission), mode)[1]

    if g_star(0.0) <= 0.0:
        return 0.0
    lo, hi = 0.0, None
    for k in range(1, 51):
        eps = k / 50.0
        if g_star(eps) <= 0.0:
            hi = eps
            break
        lo = eps
    if hi is None:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g_star(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def link_to_channel(link: PhysicalLink) -> ChannelTriple:
    """Channel triple seen through a fiber link with Poissonian dark counts.

    T combines the attenuated signal with dark counts that fire when the
    photon was lost; every dark-count click is unpolarized, which sets eps.
    """
    attenuation = 10.0 ** (-(link.length_km * link.channel_loss_db_km
                             + link.receiver_loss_db) / 10.0)
    survive = math.exp(-link.dark_mean)
    signal = survive * link.det_efficiency * attenuation
    dark = survive * link.dark_mean * (1.0 - attenuation)
    transmission = signal + dark
    if transmission <= 0.0:
        raise DegenerateLinkError("link transmission is zero")
    return ChannelTriple(theta=0.0, epsilon=dark / transmission,
                         transmission=transmission)


@dataclass(frozen=True)
class Bb84Gain:
    gain: float
    error_rate: float
    saturated: bool


def bb84_key_gain(transmission: float, dark_mean: float) -> Bb84Gain:
    """Single-photon BB84 key gain with dark-count-dominated errors.

    G = (T/2)[1 - log2(1 + 4e - 4e^2) + e log2 e + (1-e) log2(1-e)] with
    e = dark_mean / (2T).  At e >= 1/2 the formula is void and the gain is
    reported as zero with the saturation flag set.
    """
    if transmission <= 0.0:
        raise DomainError(f"transmission must be positive: {transmission}")
    e = dark_mean / (2.0 * transmission)
    if e >= 0.5:
        return Bb84Gain(0.0, e, True)
    gain = 0.5 * transmission * (1.0 - math.log2(1.0 + 4.0 * e - 4.0 * e * e)
                                 - binary_entropy(e))
    return Bb84Gain(gain, e, False)


@dataclass(frozen=True)
class DistancePoint:
    length_km: float
    gain_b92: float
    gain_bb84: float


def distance_sweep(link: PhysicalLink, lengths_km, alpha: float,
                   mode: str = "collision") -> list[DistancePoint]:
    """Key gain of both protocols along a fiber, at a fixed signal angle."""
    points = []
    for length in lengths_km:
        triple = link_to_channel(link.at_length(float(length)))
        b92 = secret_key_gain(alpha, triple, mode).gain
        bb84 = bb84_key_gain(triple.transmission, link.dark_mean).gain
        points.append(DistancePoint(float(length), b92, bb84))
    return points
