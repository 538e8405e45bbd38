from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cclt import (
    AtomDistribution,
    CapExceededError,
    DegenerateMatrixError,
    InvalidMatrixError,
    ParameterError,
    ScoreMatrix,
    enumerate_distribution,
    kolmogorov_distance,
    monte_carlo_delta,
    normal_cdf,
)
from conftest import rand_matrix

# Phi(1) frozen from the power series of erf at 1/sqrt(2) (see oracle below).
PHI_AT_ONE = 0.8413447460685429
TWO_ATOM_DELTA = PHI_AT_ONE - 0.5


def erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) * sum_k (-1)^k x^(2k+1) / (k! (2k+1)); fast at |x| < 1.
    total = 0.0
    term = x
    k = 0
    while abs(term) / (2 * k + 1) > 1e-22:
        total += (-1) ** k * term / (2 * k + 1)
        k += 1
        term = term * x * x / k
    return 2.0 / math.sqrt(math.pi) * total


class TestNormalCdf:
    def test_zero(self):
        assert normal_cdf(0.0) == 0.5

    def test_value_at_one_against_series_oracle(self):
        oracle = 0.5 + 0.5 * erf_series(1.0 / math.sqrt(2.0))
        assert oracle == pytest.approx(PHI_AT_ONE, abs=1e-15)
        assert normal_cdf(1.0) == pytest.approx(oracle, abs=1e-14)

    @given(x=st.floats(min_value=-8.0, max_value=8.0, allow_nan=False))
    @settings(max_examples=300, deadline=None)
    def test_symmetry(self, x):
        assert abs(normal_cdf(-x) - (1.0 - normal_cdf(x))) <= 1e-15

    def test_rejects_nonfinite(self):
        with pytest.raises(ParameterError):
            normal_cdf(math.nan)


class TestEnumerate:
    def test_two_by_two_atoms(self, two_by_two):
        dist = enumerate_distribution(two_by_two)
        assert dist.atoms == [(-1.0, 0.5), (1.0, 0.5)]
        assert dist.standardized

    def test_probabilities_sum_to_one(self, rng):
        dist = enumerate_distribution(rand_matrix(rng, 6))
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert int(dist.counts.sum()) == math.factorial(6)

    def test_moments_match_centering(self, rng):
        dist = enumerate_distribution(rand_matrix(rng, 5))
        assert len(dist.atoms) <= 120
        p, v = dist.probs, dist.values
        assert float((p * v).sum()) == pytest.approx(0.0, abs=1e-10)
        assert float((p * v * v).sum()) == pytest.approx(1.0, rel=1e-10)

    def test_cap_error_mentions_monte_carlo(self, rng):
        with pytest.raises(CapExceededError, match="monte_carlo"):
            enumerate_distribution(rand_matrix(rng, 5), enum_cap=4)

    def test_degenerate_matrix_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            enumerate_distribution(ScoreMatrix(np.ones((3, 3))))

    def test_equal_values_are_merged_exactly(self):
        # Permutation sum of a rank-one-ish integer matrix has many ties.
        m = ScoreMatrix([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1.0, 2.0, 0.0]])
        dist = enumerate_distribution(m)
        assert len(dist.atoms) < 6
        assert int(dist.counts.sum()) == 6


class TestKolmogorov:
    def test_two_atom_value(self, two_by_two):
        rep = kolmogorov_distance(enumerate_distribution(two_by_two))
        assert rep.delta == pytest.approx(TWO_ATOM_DELTA, abs=1e-15)
        assert abs(rep.arg_x) == 1.0
        assert rep.method == "exact"
        assert rep.std_error is None

    def test_single_atom(self):
        dist = AtomDistribution(values=np.array([0.0]), counts=np.array([2]), n=2)
        assert kolmogorov_distance(dist).delta == pytest.approx(0.5)

    def test_delta_attained_at_reported_point(self, rng):
        dist = enumerate_distribution(rand_matrix(rng, 5))
        rep = kolmogorov_distance(dist)
        i = int(np.searchsorted(dist.values, rep.arg_x))
        cum = np.cumsum(dist.probs)
        left = cum[i - 1] if i > 0 else 0.0
        attained = max(abs(cum[i] - normal_cdf(rep.arg_x)), abs(left - normal_cdf(rep.arg_x)))
        assert attained == pytest.approx(rep.delta, abs=1e-12)

    def test_matches_dense_grid_oracle(self, rng):
        dist = enumerate_distribution(rand_matrix(rng, 6))
        rep = kolmogorov_distance(dist)
        values = dist.values
        cum = np.cumsum(dist.counts) / math.factorial(6)
        grid = np.concatenate(
            (
                np.linspace(values[0] - 3.0, values[-1] + 3.0, 4001),
                values,
                np.nextafter(values, -np.inf),
            )
        )
        idx = np.searchsorted(values, grid, side="right")
        step_cdf = np.concatenate(([0.0], cum))[idx]
        phi = np.array([normal_cdf(float(x)) for x in grid])
        brute = float(np.max(np.abs(step_cdf - phi)))
        assert brute == pytest.approx(rep.delta, abs=1e-12)

    def test_delta_within_unit_interval(self, rng):
        for n in (2, 4, 6):
            rep = kolmogorov_distance(enumerate_distribution(rand_matrix(rng, n)))
            assert 0.0 <= rep.delta <= 1.0

    def test_invariant_under_row_and_column_shifts(self, rng):
        m = rand_matrix(rng, 5)
        base = kolmogorov_distance(enumerate_distribution(m)).delta
        shifted = m.a.copy()
        shifted[2, :] += 3.7  # row shift
        shifted[:, 0] -= 1.9  # column shift
        moved = kolmogorov_distance(enumerate_distribution(ScoreMatrix(shifted))).delta
        assert moved == pytest.approx(base, abs=1e-10)

    def test_block_replication_stays_sane(self):
        rng = np.random.default_rng(5)
        m = rand_matrix(rng, 3)
        small = kolmogorov_distance(enumerate_distribution(m)).delta
        big_a = np.zeros((6, 6))
        big_a[:3, :3] = m.a
        big_a[3:, 3:] = m.a
        big = kolmogorov_distance(enumerate_distribution(ScoreMatrix(big_a))).delta
        assert 0.0 <= big <= 1.0
        assert big <= small + 0.05


class TestAtomValidation:
    def test_rejects_unsorted_values(self):
        with pytest.raises(InvalidMatrixError):
            AtomDistribution(values=np.array([1.0, 0.0]), counts=np.array([1, 1]), n=2)

    def test_rejects_wrong_total(self):
        with pytest.raises(InvalidMatrixError):
            AtomDistribution(values=np.array([0.0, 1.0]), counts=np.array([1, 2]), n=2)

    def test_rejects_empty(self):
        with pytest.raises(InvalidMatrixError):
            AtomDistribution(values=np.array([]), counts=np.array([]), n=2)


class TestMonteCarlo:
    def test_deterministic_for_fixed_seed(self, rng):
        m = rand_matrix(rng, 6)
        first = monte_carlo_delta(m, 20_000, seed=42)
        second = monte_carlo_delta(m, 20_000, seed=42)
        assert first == second

    def test_thread_count_does_not_change_result(self, rng):
        m = rand_matrix(rng, 5)
        serial = monte_carlo_delta(m, 600_000, seed=3)
        threaded = monte_carlo_delta(m, 600_000, seed=3, threads=4)
        assert serial.delta == threaded.delta
        assert serial.arg_x == threaded.arg_x

    def test_close_to_exact_for_large_sample(self, rng):
        m = rand_matrix(rng, 5)
        exact = kolmogorov_distance(enumerate_distribution(m)).delta
        mc = monte_carlo_delta(m, 10**6, seed=0)
        assert mc.method == "monte-carlo"
        assert mc.std_error == pytest.approx(0.0005)
        assert abs(mc.delta - exact) <= 3.0 * mc.std_error

    def test_two_by_two_target(self, two_by_two):
        mc = monte_carlo_delta(two_by_two, 10**6, seed=1)
        assert mc.delta == pytest.approx(TWO_ATOM_DELTA, abs=0.002)

    def test_sample_floor(self, two_by_two):
        with pytest.raises(ParameterError):
            monte_carlo_delta(two_by_two, 9_999, seed=0)

    def test_degenerate_matrix_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            monte_carlo_delta(ScoreMatrix(np.zeros((3, 3))), 10_000, seed=0)
