"""Measurement-chain sampler: determinism, statistics, state independence."""

import numpy as np
import pytest

from orthoprob.errors import (EmptyChain, NotPredictable,
                              ZeroProbabilityCondition)
from orthoprob.events import BooleanAlgebra, QuantumAlgebra
from orthoprob.presets import half_transition_pair, order_dependence_example
from orthoprob.sampler import (SamplerConfig, sample_chain,
                               state_independence_check)
from orthoprob.states import (ClassicalState, DensityState, atom_state,
                              condition_seq, prob, random_density_state)


@pytest.fixture
def half_pair_chain():
    _, e, f = half_transition_pair()
    mixed = DensityState(np.eye(4, dtype=np.complex128) / 4.0)
    return mixed, e, f


class TestDeterminism:
    def test_same_seed_bit_identical(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        cfg = SamplerConfig(seed=7, trials=20_000)
        a = sample_chain(mixed, [e], f, cfg)
        b = sample_chain(mixed, [e], f, cfg)
        assert a.outcome_counts == b.outcome_counts
        assert a.all_yes_count == b.all_yes_count
        assert a.final_event_yes_count == b.final_event_yes_count
        assert a.empirical_p == b.empirical_p
        assert a.std_error == b.std_error

    def test_different_seeds_differ(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        a = sample_chain(mixed, [e], f, SamplerConfig(seed=1, trials=20_000))
        b = sample_chain(mixed, [e], f, SamplerConfig(seed=2, trials=20_000))
        assert a.outcome_counts != b.outcome_counts


class TestStatistics:
    def test_counts_partition_trials(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        result = sample_chain(mixed, [e], f, SamplerConfig(trials=10_000))
        assert sum(result.outcome_counts.values()) == 10_000
        assert set(result.outcome_counts) <= {"0", "1"}
        assert result.all_yes_count == result.outcome_counts["1"]

    def test_half_pair_band(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        result = sample_chain(mixed, [e], f, SamplerConfig(seed=42, trials=50_000))
        band = 4.0 * np.sqrt(0.25 / result.all_yes_count)
        assert abs(result.empirical_p - 0.5) <= band
        assert result.predicted_p == pytest.approx(0.5, abs=1e-12)

    def test_certain_chain_is_exact(self):
        alg = QuantumAlgebra(3)
        f = alg.event(np.diag([1.0, 1.0, 0.0]))
        initial = atom_state(alg.event_from_span([np.array([1.0, 1.0, 0.0])]))
        result = sample_chain(initial, [f], f, SamplerConfig(trials=5_000))
        assert result.outcome_counts == {"1": 5_000}
        assert result.empirical_p == 1.0
        assert result.std_error == 0.0
        assert result.predicted_p == 1.0

    def test_path_frequencies_match_analytic(self):
        # Forward order chain on C^3; every prefix probability is known.
        _, mixed, f1, f2, e = order_dependence_example()
        trials = 60_000
        result = sample_chain(mixed, [f1, f2], e,
                              SamplerConfig(seed=11, trials=trials))
        analytic = {"11": 1.0 / 6.0, "10": 1.0 / 6.0,
                    "01": 1.0 / 6.0, "00": 0.5}
        assert sum(result.outcome_counts.values()) == trials
        for pattern, p in analytic.items():
            observed = result.outcome_counts.get(pattern, 0)
            sigma = np.sqrt(trials * p * (1.0 - p))
            assert abs(observed - trials * p) <= 5.0 * sigma, pattern

    def test_order_dependent_chain_predictions(self):
        _, mixed, f1, f2, e = order_dependence_example()
        forward = sample_chain(mixed, [f1, f2], e,
                               SamplerConfig(seed=3, trials=30_000))
        reverse = sample_chain(mixed, [f2, f1], e,
                               SamplerConfig(seed=3, trials=30_000))
        assert forward.predicted_p == pytest.approx(0.5, abs=1e-12)
        assert reverse.predicted_p == pytest.approx(0.0, abs=1e-12)
        assert reverse.final_event_yes_count == 0

    def test_boolean_chain(self):
        alg = BooleanAlgebra(6)
        fair = ClassicalState(alg.space, np.full(6, 1.0 / 6.0))
        evens = alg.event([1, 3, 5])
        face = alg.event([1])
        result = sample_chain(fair, [evens], face,
                              SamplerConfig(seed=19, trials=40_000))
        # Not predictable (1/3 is neither 0 nor 1), so no certificate.
        assert result.predicted_p is None
        band = 5.0 * np.sqrt(result.empirical_p * (1 - result.empirical_p)
                             / result.all_yes_count)
        assert abs(result.empirical_p - 1.0 / 3.0) <= band

    def test_empirical_matches_conditional_for_state_dependent_chain(self):
        # The sampler's all-yes estimate tracks the analytic sequential
        # conditional even when no state-independent certificate exists.
        rng = np.random.default_rng(23)
        alg = QuantumAlgebra(3)
        plane = alg.event(np.diag([1.0, 1.0, 0.0]))
        tilted = alg.event_from_span([np.array([1.0, 1.0, 1.0])])
        state = random_density_state(3, rng)
        analytic = prob(condition_seq(state, [plane]), tilted)
        result = sample_chain(state, [plane], tilted,
                              SamplerConfig(seed=29, trials=50_000))
        band = 4.0 * max(np.sqrt(analytic * (1 - analytic)
                                 / result.all_yes_count), 1e-6)
        assert abs(result.empirical_p - analytic) <= band

    def test_empty_chain_rejected(self, half_pair_chain):
        mixed, _, f = half_pair_chain
        with pytest.raises(EmptyChain):
            sample_chain(mixed, [], f, SamplerConfig(trials=10))


class TestConfig:
    def test_validation(self):
        with pytest.raises(Exception):
            SamplerConfig(trials=0)
        with pytest.raises(Exception):
            SamplerConfig(seed=-1)
        with pytest.raises(Exception):
            SamplerConfig(tol=-1e-9)


class TestStateIndependence:
    def test_half_pair_passes(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        rng = np.random.default_rng(101)
        states = [mixed] + [random_density_state(4, rng) for _ in range(3)]
        report = state_independence_check(f, [e], states,
                                          SamplerConfig(seed=5, trials=30_000))
        assert report.passed
        assert report.predicted_p == pytest.approx(0.5, abs=1e-12)
        assert len(report.results) == 4
        assert all(abs(d) <= 4.0 for d in report.deviations)

    def test_certain_chain_zero_variance(self):
        alg = QuantumAlgebra(3)
        f = alg.event(np.diag([1.0, 1.0, 0.0]))
        inside = atom_state(alg.event_from_span([np.array([1.0, 2.0, 0.0])]))
        report = state_independence_check(f, [f], [inside],
                                          SamplerConfig(trials=2_000))
        assert report.passed
        assert report.results[0].std_error == 0.0

    def test_not_predictable_rejected(self):
        alg = QuantumAlgebra(3)
        plane = alg.event(np.diag([1.0, 1.0, 0.0]))
        tilted = alg.event_from_span([np.array([1.0, 1.0, 1.0])])
        mixed = DensityState(np.eye(3) / 3.0)
        with pytest.raises(NotPredictable):
            state_independence_check(tilted, [plane], [mixed])

    def test_unreachable_state_rejected(self, half_pair_chain):
        mixed, e, f = half_pair_chain
        outside = atom_state(
            QuantumAlgebra(4).event_from_span([np.array([0.0, 0.0, 1.0, 0.0])]))
        with pytest.raises(ZeroProbabilityCondition) as info:
            state_independence_check(f, [e], [mixed, outside],
                                     SamplerConfig(trials=1_000))
        assert info.value.index == 0
