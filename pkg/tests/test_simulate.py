import math

import pytest

from b92sec.attacks import depolarize, identity_attack, loss, rotation_attack
from b92sec.errors import DomainError
from b92sec.estimation import ChannelTriple
from b92sec.keyrate import noiseless_gain
from b92sec.simulate import (
    SimConfig,
    closed_loop_report,
    outcome_distribution,
    run_simulation,
)
from b92sec.states import OUTCOMES, Povm5, symmetrized_density

from conftest import DEG, estimator_sigmas

ALPHA = 10 * DEG


def config(attack, n=100000, seed=1, alpha=ALPHA):
    return SimConfig(n_total=n, alpha_prime=alpha, alpha=alpha, attack=attack,
                     seed=seed)


class TestReproducibility:
    def test_same_seed_same_result(self):
        cfg = config(depolarize(0.1), n=20000, seed=77)
        assert run_simulation(cfg) == run_simulation(cfg)

    def test_block_size_does_not_matter(self):
        cfg = config(depolarize(0.1), n=30000, seed=3)
        whole = run_simulation(cfg, block_size=1 << 20)
        chunked = run_simulation(cfg, block_size=777)
        assert whole == chunked

    def test_different_seeds_differ(self):
        a = run_simulation(config(depolarize(0.1), n=20000, seed=1))
        b = run_simulation(config(depolarize(0.1), n=20000, seed=2))
        assert a.counts != b.counts


class TestCounting:
    def test_count_conservation(self):
        cfg = config(loss(0.6), n=50000, seed=9)
        result = run_simulation(cfg)
        assert result.counts.detected() <= cfg.n_total
        table = outcome_distribution(cfg)
        assert table.shape == (2, len(cfg.attack.branches), len(OUTCOMES))
        # without loss there are no V events, so the counters are exhaustive
        full = run_simulation(config(depolarize(0.3), n=50000, seed=9))
        assert full.counts.detected() == 50000

    def test_identity_attack_converges(self):
        result = run_simulation(config(identity_attack(), n=200000, seed=5))
        assert result.estimated.epsilon < 0.01
        assert abs(result.estimated.theta) < 0.05
        assert result.estimated.transmission == 1.0
        assert result.conclusive_error_rate == 0.0
        assert result.eve_accuracy_correct is None

    def test_frequency_convergence_across_seeds(self):
        # per-cell relative frequencies stay within four binomial standard
        # errors of Tr[F rho] in at least 99% of seeded runs
        cfg0 = config(depolarize(0.2), n=100000, seed=0)
        povm = Povm5(cfg0.alpha)
        triple = ChannelTriple(0.0, 0.2, 1.0)
        expected = {}
        for bit in (0, 1):
            rho = symmetrized_density(triple, cfg0.alpha, bit)
            for label in ("0", "1", "0b", "1b"):
                expected[bit, label] = povm.probability(label, rho)
        passed = 0
        for seed in range(100):
            counts = run_simulation(config(depolarize(0.2), n=100000,
                                           seed=seed)).counts
            ok = True
            for (bit, label), p in expected.items():
                freq = counts.count(bit, label) / (counts.n_total / 2)
                bound = 4.0 * math.sqrt(p * (1 - p) / (counts.n_total / 2))
                ok &= abs(freq - p) <= bound
            passed += ok
        assert passed >= 99

    def test_depolarize_estimate_within_three_sigma(self):
        eps = 0.15
        result = run_simulation(config(depolarize(eps), n=10 ** 6, seed=21))
        sigma = estimator_sigmas(ChannelTriple(0.0, eps, 1.0), ALPHA, 10 ** 6)
        assert abs(result.estimated.epsilon - eps) <= 3 * sigma[1]
        assert abs(result.estimated.theta) <= 3 * sigma[0]


class TestRotationAttack:
    def test_eve_accuracy_is_exact(self):
        channel, predicted = rotation_attack(ALPHA)
        result = run_simulation(config(channel, n=200000, seed=13))
        assert result.eve_accuracy_correct == 1.0
        sigma = estimator_sigmas(predicted, ALPHA, 200000)
        assert abs(result.estimated.epsilon - predicted.epsilon) <= 3 * sigma[1]
        assert abs(result.estimated.theta) <= 3 * sigma[0]


class TestWeakMeasurementAttack:
    def test_critical_attack_delivers_the_boundary_channel(self):
        # the measured-then-rotated attack at the critical weakness produces
        # the lower-boundary channel (0, eps(q0), 1) and full knowledge of
        # the surviving correct bits
        from b92sec.attacks import (
            attack_noise_rate,
            critical_weakness,
            weak_measurement_attack,
        )

        alpha = 20 * DEG
        q0 = critical_weakness(alpha)
        eps = attack_noise_rate(q0, alpha)
        channel = weak_measurement_attack(q0, alpha)
        result = run_simulation(config(channel, n=10 ** 6, seed=6, alpha=alpha))
        assert result.eve_accuracy_correct == 1.0
        sigma = estimator_sigmas(ChannelTriple(0.0, eps, 1.0), alpha, 10 ** 6)
        assert abs(result.estimated.epsilon - eps) <= 3 * sigma[1]
        assert abs(result.estimated.theta) <= 3 * sigma[0]

    def test_mixture_interpolates_the_noise_rate(self):
        # mixing the critical and rotation strategies averages the Bloch
        # shrink factors, so eps interpolates linearly in the weight
        from b92sec.attacks import (
            attack_noise_rate,
            critical_weakness,
            mix,
            weak_measurement_attack,
        )

        alpha = 20 * DEG
        q0 = critical_weakness(alpha)
        lam = 0.5
        channel = mix(weak_measurement_attack(q0, alpha),
                      rotation_attack(alpha)[0], lam)
        expected = (lam * attack_noise_rate(q0, alpha)
                    + (1 - lam) * attack_noise_rate(0.5, alpha))
        result = run_simulation(config(channel, n=10 ** 6, seed=15, alpha=alpha))
        sigma = estimator_sigmas(ChannelTriple(0.0, expected, 1.0), alpha, 10 ** 6)
        assert abs(result.estimated.epsilon - expected) <= 3 * sigma[1]
        assert result.eve_accuracy_correct == 1.0


class TestClosedLoop:
    def test_identity_matches_analytic_gain(self):
        alpha = 40 * DEG
        cfg = SimConfig(n_total=400000, alpha_prime=alpha, alpha=alpha,
                        attack=identity_attack(), seed=1)
        _, report = closed_loop_report(cfg)
        assert report.gain == pytest.approx(noiseless_gain(alpha, 1.0), abs=5e-3)

    def test_identity_boundary_noise_is_flagged(self):
        # a noiseless channel estimate sits on the reachability boundary, so
        # sampling noise in theta can make the estimate unphysical; such runs
        # must raise rather than return a number
        from b92sec.errors import UnreachableChannelError

        alpha = 40 * DEG
        cfg = SimConfig(n_total=400000, alpha_prime=alpha, alpha=alpha,
                        attack=identity_attack(), seed=8)
        with pytest.raises(UnreachableChannelError):
            closed_loop_report(cfg)

    def test_loss_only_matches_analytic_gain(self):
        alpha = 40 * DEG
        cfg = SimConfig(n_total=400000, alpha_prime=alpha, alpha=alpha,
                        attack=loss(0.5), seed=3)
        _, report = closed_loop_report(cfg)
        assert report.gain == pytest.approx(noiseless_gain(alpha, 0.5), abs=5e-3)

    def test_rotation_attack_kills_correct_bits(self):
        channel, _ = rotation_attack(ALPHA)
        cfg = SimConfig(n_total=10 ** 6, alpha_prime=ALPHA, alpha=ALPHA,
                        attack=channel, seed=42)
        _, report = closed_loop_report(cfg)
        assert report.info_correct == pytest.approx(1.0, abs=1e-9)
        assert report.gain_correct == pytest.approx(0.0, abs=1e-12)
        assert report.gain < 0.0

    def test_mismatched_angles_rejected(self):
        cfg = SimConfig(n_total=1000, alpha_prime=0.3, alpha=0.4,
                        attack=identity_attack(), seed=0)
        with pytest.raises(DomainError):
            closed_loop_report(cfg)


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# demo run\n"
            "n_total = 5000\n"
            "alpha_deg = 12\n"
            "attack = depolarize(epsilon=0.1) | loss(T=0.9)\n"
            "seed = 4\n")
        cfg = SimConfig.from_file(path)
        assert cfg.n_total == 5000
        assert cfg.alpha == pytest.approx(12 * DEG)
        assert cfg.alpha_prime == pytest.approx(12 * DEG)
        assert cfg.seed == 4
        assert len(cfg.attack.branches) == 4
        result = run_simulation(cfg)
        assert result.counts.n_total == 5000

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("alpha_deg = 10\n")
        with pytest.raises(DomainError):
            SimConfig.from_file(path)

    def test_json_emission_parses(self):
        result = run_simulation(config(depolarize(0.05), n=10000, seed=2))
        import json
        record = json.loads(result.to_json())
        assert record["counts"]["n_total"] == 10000
        assert 0.0 <= record["estimated"]["epsilon"] <= 1.0
