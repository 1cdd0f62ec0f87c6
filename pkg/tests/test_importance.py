import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impalloc import (
    collision_mass,
    importance_functionals,
    mim_functional,
    mim_weights,
    nmim_functional,
    nmim_weights,
    renyi2_entropy,
    validate_distribution,
)

positive_vectors = st.lists(
    st.floats(min_value=0.01, max_value=10.0), min_size=1, max_size=12
)


def to_dist(raw):
    arr = np.array(raw)
    return validate_distribution(arr / arr.sum())


class TestCollisionMass:
    def test_uniform(self):
        assert collision_mass(validate_distribution([0.2] * 5)) == pytest.approx(0.2)

    def test_degenerate(self):
        assert collision_mass(validate_distribution([1.0])) == pytest.approx(1.0)

    def test_skewed_benchmark(self):
        dist = validate_distribution([0.01, 0.02, 0.03, 0.04, 0.9])
        assert collision_mass(dist) == pytest.approx(0.8130, abs=5e-5)

    def test_matches_entropy(self):
        dist = validate_distribution([0.3, 0.7])
        assert renyi2_entropy(dist) == pytest.approx(-math.log(collision_mass(dist)))

    @given(positive_vectors)
    def test_bounds(self, raw):
        dist = to_dist(raw)
        gamma = collision_mass(dist)
        assert 1.0 / dist.n - 1e-12 <= gamma <= 1.0 + 1e-12
        assert np.all(gamma - dist.probs >= -0.25 - 1e-12)
        assert np.all(gamma - dist.probs <= 1.0 + 1e-12)


class TestMimWeights:
    def test_zero_coefficient_is_uniform(self):
        dist = validate_distribution([0.1, 0.2, 0.7])
        w = mim_weights(dist, 0.0)
        np.testing.assert_allclose(w.values, 1.0 / 3.0, rtol=1e-15)

    def test_two_class_value(self):
        w = mim_weights(validate_distribution([0.2, 0.8]), 5.0)
        expected = math.exp(4.0) / (math.exp(4.0) + math.e)
        assert w.values[0] == pytest.approx(expected, rel=1e-12)
        assert w.values[1] == pytest.approx(1.0 - expected, rel=1e-12)

    def test_normalized(self):
        dist = validate_distribution([0.05, 0.15, 0.8])
        for coeff in (-50.0, -1.0, 0.0, 3.0, 80.0):
            assert mim_weights(dist, coeff).values.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("coeff,index", [(200.0, 0), (-200.0, 2)])
    def test_extreme_coefficients_concentrate(self, coeff, index):
        dist = validate_distribution([0.1, 0.3, 0.6])
        w = mim_weights(dist, coeff)
        assert w.values[index] > 1.0 - 1e-6

    def test_huge_coefficient_stays_finite_in_log_domain(self):
        dist = validate_distribution([1e-6, 0.5 - 5e-7, 0.5 - 5e-7])
        w = mim_weights(dist, 1000.0)
        assert np.all(np.isfinite(w.log_values))
        assert w.values.sum() == pytest.approx(1.0, abs=1e-9)

    def test_rejects_nonfinite_coefficient(self):
        with pytest.raises(ValueError):
            mim_weights(validate_distribution([0.5, 0.5]), math.inf)

    @given(positive_vectors, st.floats(min_value=-100, max_value=99))
    @settings(max_examples=200)
    def test_rarest_class_weight_nondecreasing_in_coefficient(self, raw, coeff):
        dist = to_dist(raw)
        w0 = mim_weights(dist, coeff).values[dist.argmin_index]
        w1 = mim_weights(dist, coeff + 1.0).values[dist.argmin_index]
        assert w1 >= w0 - 1e-12

    @given(positive_vectors, st.floats(min_value=-99, max_value=100))
    @settings(max_examples=200)
    def test_commonest_class_weight_nondecreasing_as_coefficient_falls(self, raw, coeff):
        dist = to_dist(raw)
        w0 = mim_weights(dist, coeff).values[dist.argmax_index]
        w1 = mim_weights(dist, coeff - 1.0).values[dist.argmax_index]
        assert w1 >= w0 - 1e-12


class TestNmimWeights:
    def test_uniform(self):
        w = nmim_weights(validate_distribution([0.25] * 4))
        np.testing.assert_allclose(w.values, 0.25, rtol=1e-15)

    def test_two_class_value(self):
        w = nmim_weights(validate_distribution([0.2, 0.8]))
        expected = math.exp(4.0) / (math.exp(4.0) + math.exp(0.25))
        assert w.values[0] == pytest.approx(expected, rel=1e-12)

    @given(positive_vectors)
    @settings(max_examples=200)
    def test_strictly_decreasing_in_probability(self, raw):
        dist = to_dist(raw)
        w = nmim_weights(dist)
        order = np.argsort(dist.probs, kind="stable")
        logs = w.log_values[order]
        ps = dist.probs[order]
        for k in range(dist.n - 1):
            if ps[k] < ps[k + 1]:
                assert logs[k] > logs[k + 1]

    def test_tiny_probability_stays_finite_in_log_domain(self):
        dist = validate_distribution([1e-6, 0.5 - 5e-7, 0.5 - 5e-7])
        w = nmim_weights(dist)
        assert np.all(np.isfinite(w.log_values))
        assert w.values[0] == pytest.approx(1.0, abs=1e-12)


class TestFunctionals:
    def test_mim_uniform_closed_value(self):
        dist = validate_distribution([0.2] * 5)
        assert mim_functional(dist, 5.0) == pytest.approx(4.0, abs=1e-12)

    def test_mim_zero_coefficient(self):
        dist = validate_distribution([0.1, 0.4, 0.5])
        assert mim_functional(dist, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_mim_skewed_benchmark(self):
        dist = validate_distribution([0.01, 0.02, 0.03, 0.04, 0.9])
        score = mim_functional(dist, 5.0)
        assert score == pytest.approx(2.6584, abs=1e-3)
        assert score + 5.0 * collision_mass(dist) == pytest.approx(6.7234, abs=1e-3)

    @pytest.mark.parametrize(
        "probs,expected",
        [
            ((0.2, 0.2, 0.2, 0.2, 0.2), 4.0000),
            ((0.01, 0.02, 0.03, 0.04, 0.9), 94.3948),
            ((0.014, 0.086, 0.113, 0.375, 0.412), 66.1599),
        ],
    )
    def test_nmim_benchmarks(self, probs, expected):
        assert nmim_functional(validate_distribution(probs)) == pytest.approx(expected, abs=1e-3)

    @given(positive_vectors)
    def test_nmim_at_least_n_minus_one(self, raw):
        dist = to_dist(raw)
        assert nmim_functional(dist) >= dist.n - 1.0 - 1e-9

    def test_small_probability_approximation(self):
        for probs in ([0.02, 0.49, 0.49], [0.005, 0.295, 0.7], [0.015, 0.035, 0.45, 0.5]):
            dist = validate_distribution(probs)
            p_min = dist.probs[dist.argmin_index]
            approx = math.log(p_min) + (1.0 - p_min) / p_min
            assert nmim_functional(dist) == pytest.approx(approx, abs=1e-3)

    def test_bundle(self):
        dist = validate_distribution([0.3, 0.7])
        fn = importance_functionals(dist, 2.0)
        assert fn.gamma_p == pytest.approx(collision_mass(dist))
        assert fn.mim_value == pytest.approx(mim_functional(dist, 2.0))
        assert fn.nmim_value == pytest.approx(nmim_functional(dist))
        assert fn.renyi2 == pytest.approx(renyi2_entropy(dist))
