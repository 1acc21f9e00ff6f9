"""Explicit individual attacks that reach Eve's full-information region.

Attacks are finite mixtures of branches.  Each branch fires with a
probability that may depend on Alice's bit (measurement back-action),
rotates the signal in the Bloch x-z plane by a per-bit angle or absorbs
the photon, and leaves Eve a record from which she will guess surviving
correct bits.  This covers the pure rotation attack, the
weak-measurement-then-rotate attack, and the depolarize/loss test
channels, alone or composed in sequence.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import B92Error, DomainError
from .estimation import ChannelTriple
from .evebound import eve_max_gain
from .states import wrap_angle


@dataclass(frozen=True)
class AttackBranch:
    """One branch of an attack channel.

    ``weights[j]`` is the branch probability given Alice's bit j; the two
    weight vectors over all branches of a channel each sum to one.
    ``rotations[j]`` is the Bloch-plane angle added to the signal (the
    branch may include measurement back-action, hence the bit dependence).
    ``guess`` is the bit value Eve records for this branch, or None.
    """

    weights: tuple[float, float]
    rotations: tuple[float, float] = (0.0, 0.0)
    guess: int | None = None
    to_vacuum: bool = False
    label: str = ""


@dataclass(frozen=True)
class AttackChannel:
    name: str
    branches: tuple[AttackBranch, ...]

    def __post_init__(self):
        for j in (0, 1):
            total = sum(br.weights[j] for br in self.branches)
            if abs(total - 1.0) > 1e-9:
                raise DomainError(
                    f"branch weights for bit {j} sum to {total}, expected 1")

    def output(self, bit: int, phi_in: float, branch: AttackBranch,
               ) -> tuple[bool, float]:
        """(is_vacuum, output angle) for one branch acting on one signal."""
        if branch.to_vacuum:
            return True, 0.0
        return False, wrap_angle(phi_in + branch.rotations[bit])

    def compose(self, other: "AttackChannel") -> "AttackChannel":
        """This channel followed by ``other`` (product of branch mixtures).

        Vacuum absorbs: once the photon is gone, later rotations are inert.
        The later non-None guess wins, mirroring an eavesdropper who updates
        her record as stages fire.
        """
        branches = []
        for first in self.branches:
            for second in other.branches:
                weights = (first.weights[0] * second.weights[0],
                           first.weights[1] * second.weights[1])
                if weights[0] <= 0.0 and weights[1] <= 0.0:
                    continue
                branches.append(AttackBranch(
                    weights=weights,
                    rotations=(first.rotations[0] + second.rotations[0],
                               first.rotations[1] + second.rotations[1]),
                    guess=second.guess if second.guess is not None else first.guess,
                    to_vacuum=first.to_vacuum or second.to_vacuum,
                    label=f"{first.label}+{second.label}".strip("+"),
                ))
        return AttackChannel(name=f"{self.name}|{other.name}",
                             branches=tuple(branches))


def identity_attack() -> AttackChannel:
    return AttackChannel("identity", (AttackBranch(weights=(1.0, 1.0), label="id"),))


def rotation_attack(alpha: float) -> tuple[AttackChannel, ChannelTriple]:
    """Equal mixture of +-2 alpha Bloch rotations, with Eve's guess per branch.

    Rotating by -2 alpha maps Alice's bit-1 state onto the bit-0 state, so
    any surviving correct bit in that branch must be 0 (and symmetrically
    for +2 alpha).  The symmetrized channel it produces is
    (theta, eps, T) = (0, 2 sin^2 alpha, 1).
    """
    if not 0.0 < alpha < math.pi / 2.0:
        raise DomainError(f"signal angle outside (0, pi/2): {alpha}")
    channel = AttackChannel("rotation", (
        AttackBranch(weights=(0.5, 0.5), rotations=(2.0 * alpha, 2.0 * alpha),
                     guess=1, label="+2a"),
        AttackBranch(weights=(0.5, 0.5), rotations=(-2.0 * alpha, -2.0 * alpha),
                     guess=0, label="-2a"),
    ))
    predicted = ChannelTriple(theta=0.0, epsilon=2.0 * math.sin(alpha) ** 2,
                              transmission=1.0)
    return channel, predicted


def _sqrt_effect_angle(q: float, phi: float, plus: bool) -> float:
    """Angle of sqrt(A+-) |sigma_phi> for the x-basis weak measurement."""
    a = math.sqrt(1.0 - q) if plus else math.sqrt(q)
    b = math.sqrt(q) if plus else math.sqrt(1.0 - q)
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    # sqrt effect in the z basis: [[(a+b)/2, (a-b)/2], [(a-b)/2, (a+b)/2]]
    up = 0.5 * ((a + b) * c + (a - b) * s)
    dn = 0.5 * ((a - b) * c + (a + b) * s)
    return wrap_angle(2.0 * math.atan2(dn, up))


def outcome_probability(q: float, alpha: float, bit: int, plus: bool) -> float:
    """p_{j,+-}: weak-measurement outcome probability for Alice's bit."""
    sign = -1.0 if bit == 0 else 1.0
    direction = 1.0 if plus else -1.0
    return 0.5 * (1.0 + direction * (1.0 - 2.0 * q) * math.sin(sign * alpha))


def post_measurement_angle(q: float, alpha: float) -> float:
    """Bloch angle between the two post-measurement states.

    Monotone increasing from 0 (projective, q = 0) to 2 alpha (no
    measurement, q = 1/2).
    """
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"weakness parameter outside [0, 1/2]: {q}")
    denom = 1.0 - (1.0 - 2.0 * q) ** 2 * math.sin(alpha) ** 2
    ratio = math.cos(alpha) / math.sqrt(denom)
    return 2.0 * math.acos(min(1.0, max(-1.0, ratio)))


def weak_measurement_attack(q: float, alpha: float) -> AttackChannel:
    """Weak x-basis measurement, then a rotation conditioned on the outcome.

    Outcome "+" rotates the post-measurement bit-0 state exactly onto the
    bit-1 signal (so correct bits in that branch are certainly 1); outcome
    "-" mirrors this.  At q = 1/2 the measurement is trivial and the attack
    reduces to the pure rotation attack.
    """
    if not 0.0 < alpha < math.pi / 2.0:
        raise DomainError(f"signal angle outside (0, pi/2): {alpha}")
    beta = post_measurement_angle(q, alpha)
    weights_plus = (outcome_probability(q, alpha, 0, True),
                    outcome_probability(q, alpha, 1, True))
    weights_minus = (outcome_probability(q, alpha, 0, False),
                     outcome_probability(q, alpha, 1, False))
    # per-bit rotations so that outputs land at (alpha, alpha + beta) for "+"
    # and (-alpha - beta, -alpha) for "-"
    return AttackChannel(f"weak-meas(q={q:g})", (
        AttackBranch(weights=weights_plus, rotations=(2.0 * alpha, beta),
                     guess=1, label="+"),
        AttackBranch(weights=weights_minus, rotations=(-beta, -2.0 * alpha),
                     guess=0, label="-"),
    ))


def _balance_residual(q: float, alpha: float) -> float:
    """Zero exactly when the attack output is symmetric about the signal axis."""
    beta = post_measurement_angle(q, alpha)
    p1_plus = outcome_probability(q, alpha, 1, True)
    p1_minus = outcome_probability(q, alpha, 1, False)
    return math.sin(beta) / math.sin(2.0 * alpha) - p1_minus / p1_plus


def critical_weakness(alpha: float, tol: float = 1e-12) -> float:
    """The non-trivial weakness q0 at which the attack output is symmetric.

    The balance condition has two roots in [0, 1/2]; q = 1/2 is the pure
    rotation attack, and the returned q0 < 1/2 gives the smaller noise rate
    (the lower edge of the full-information region).
    """
    if not 0.0 < alpha < math.pi / 2.0:
        raise DomainError(f"signal angle outside (0, pi/2): {alpha}")
    lo, hi = 1e-6, 0.5 - 1e-6
    f_lo = _balance_residual(lo, alpha)
    f_hi = _balance_residual(hi, alpha)
    if f_lo == 0.0:
        return lo
    if (f_lo < 0.0) == (f_hi < 0.0):
        raise B92Error(
            f"root isolation failed on [{lo}, {hi}]: "
            f"residuals {f_lo:.3e} and {f_hi:.3e} have equal sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = _balance_residual(mid, alpha)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def attack_noise_rate(q: float, alpha: float, balance_tol: float = 1e-6) -> float:
    """Noise rate eps of the symmetrized channel produced by the attack.

    Only meaningful where the balance condition holds (q = q0 or q = 1/2):
    eps = 1 - sin(2 alpha + beta) / (sin 2 alpha + sin beta).
    """
    residual = _balance_residual(q, alpha)
    if abs(residual) > balance_tol:
        raise DomainError(
            f"attack output is not symmetric at q={q} (residual {residual:.3e})")
    beta = post_measurement_angle(q, alpha)
    return 1.0 - math.sin(2.0 * alpha + beta) / (math.sin(2.0 * alpha) + math.sin(beta))


def depolarize(epsilon: float) -> AttackChannel:
    """Isotropic in-plane noise: flip to the orthogonal state with probability eps/2."""
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"noise parameter outside [0, 1]: {epsilon}")
    return AttackChannel(f"depolarize(eps={epsilon:g})", (
        AttackBranch(weights=(1.0 - 0.5 * epsilon,) * 2, label="keep"),
        AttackBranch(weights=(0.5 * epsilon,) * 2, rotations=(math.pi, math.pi),
                     label="flip"),
    ))


def loss(transmission: float) -> AttackChannel:
    """Bit-independent photon loss."""
    if not 0.0 <= transmission <= 1.0:
        raise DomainError(f"transmission outside [0, 1]: {transmission}")
    return AttackChannel(f"loss(T={transmission:g})", (
        AttackBranch(weights=(transmission,) * 2, label="pass"),
        AttackBranch(weights=(1.0 - transmission,) * 2, to_vacuum=True, label="drop"),
    ))


def mix(first: AttackChannel, second: AttackChannel, weight: float) -> AttackChannel:
    """Per-pulse mixture: ``first`` with probability ``weight``, else ``second``."""
    if not 0.0 <= weight <= 1.0:
        raise DomainError(f"mixture weight outside [0, 1]: {weight}")
    branches = []
    for scale, channel in ((weight, first), (1.0 - weight, second)):
        if scale <= 0.0:
            continue
        for br in channel.branches:
            branches.append(AttackBranch(
                weights=(scale * br.weights[0], scale * br.weights[1]),
                rotations=br.rotations, guess=br.guess,
                to_vacuum=br.to_vacuum, label=f"{channel.name}:{br.label}"))
    return AttackChannel(f"mix({first.name},{second.name},{weight:g})",
                         tuple(branches))


def full_info_region(alpha_grid, eps_grid, transmission: float) -> np.ndarray:
    """Boolean matrix over (alpha, eps): True where Eve's gain is unity.

    Entry [i, j] refers to alpha_grid[i], eps_grid[j], with the analyzer
    matched to the signal angle and theta = 0.
    """
    alphas = np.asarray(alpha_grid, dtype=float)
    epsilons = np.asarray(eps_grid, dtype=float)
    region = np.zeros((alphas.size, epsilons.size), dtype=bool)
    for i, alpha in enumerate(alphas):
        for j, eps in enumerate(epsilons):
            triple = ChannelTriple(0.0, float(eps), transmission)
            result = eve_max_gain(alpha, alpha, triple)
            region[i, j] = result.overlap_min <= 1e-9
    return region


# --- attack description strings ---------------------------------------------------

_STAGE_RE = re.compile(r"^\s*([a-zA-Z-]+)\s*(?:\(([^)]*)\))?\s*$")


def parse_attack(text: str, alpha: float) -> AttackChannel:
    """Build a channel from a description like ``depolarize(epsilon=0.1)|loss(T=0.8)``.

    Stages separated by ``|`` compose in order.  Available stages:
    ``identity``, ``rotation``, ``weak-meas(q=...)``,
    ``mixed(q=..., lambda=...)``, ``depolarize(epsilon=...)``, ``loss(T=...)``.
    The protocol angle ``alpha`` parametrizes the rotation-based attacks.
    """
    channel = None
    for stage_text in text.split("|"):
        match = _STAGE_RE.match(stage_text)
        if not match:
            raise DomainError(f"cannot parse attack stage: {stage_text!r}")
        name = match.group(1).lower()
        args = {}
        if match.group(2):
            for item in match.group(2).split(","):
                key, _, value = item.partition("=")
                if not _:
                    raise DomainError(f"expected key=value in attack stage: {item!r}")
                args[key.strip().lower()] = float(value)
        stage = _build_stage(name, args, alpha)
        channel = stage if channel is None else channel.compose(stage)
    if channel is None:
        raise DomainError("empty attack description")
    return channel


def _build_stage(name: str, args: dict, alpha: float) -> AttackChannel:
    if name == "identity":
        return identity_attack()
    if name == "rotation":
        return rotation_attack(alpha)[0]
    if name in ("weak-meas", "weak"):
        return weak_measurement_attack(args["q"], alpha)
    if name == "mixed":
        q = args["q"]
        lam = args.get("lambda", args.get("lam", 0.5))
        return mix(weak_measurement_attack(q, alpha), rotation_attack(alpha)[0], lam)
    if name == "depolarize":
        return depolarize(args.get("epsilon", args.get("eps", 0.0)))
    if name == "loss":
        return loss(args.get("t", args.get("transmission", 1.0)))
    raise DomainError(f"unknown attack stage: {name!r}")
