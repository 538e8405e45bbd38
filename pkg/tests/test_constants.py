from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cclt import (
    DegenerateMatrixError,
    ParameterError,
    ScoreMatrix,
    berry_esseen_bound,
    center,
    damped_moment_integrals,
    enumerate_distribution,
    from_sampling,
    kappa,
    kolmogorov_distance,
    sampling_bound_specialized,
    smoothing_bound,
    taylor_remainder_check,
    theorem_constants,
    v_of_w,
)
from cclt.quadrature import adaptive_simpson
from conftest import rand_matrix


class TestKappa:
    def test_value_and_maximizer(self):
        kap, x0 = kappa()
        assert kap == pytest.approx(0.09916191, abs=1e-7)
        assert x0 == pytest.approx(3.99589, abs=1e-4)

    def test_inequality_on_dense_grid(self):
        kap, _ = kappa()
        xs = np.linspace(-50.0, 50.0, 20001)
        lhs = np.cos(xs) - 1.0 + xs * xs / 2.0
        assert float(np.max(lhs - kap * np.abs(xs) ** 3)) <= 1e-12

    def test_objective_vanishes_at_origin(self):
        from cclt.analytic import _kappa_objective

        assert _kappa_objective(0.0) == 0.0  # 0/0 convention
        kap, _ = kappa()
        # near 0 the ratio behaves like x/24, far below the maximum
        for x in (1e-3, 0.1, 0.5):
            assert _kappa_objective(x) < kap / 3.0


class TestTaylorRemainder:
    def test_zero_point(self):
        assert taylor_remainder_check(0.0, 3) == (0.0, 0.0)

    def test_pi_first_order(self):
        lhs, rhs = taylor_remainder_check(math.pi, 1)
        assert rhs == pytest.approx(2.0 * math.pi * min(1.0, math.pi / 4.0))
        assert lhs <= rhs

    @given(
        x=st.floats(min_value=-20.0, max_value=20.0, allow_nan=False),
        k=st.integers(min_value=0, max_value=6),
    )
    @settings(max_examples=300, deadline=None)
    def test_inequality(self, x, k):
        lhs, rhs = taylor_remainder_check(x, k)
        assert lhs <= rhs + 1e-12

    def test_rejects_negative_order(self):
        with pytest.raises(ParameterError):
            taylor_remainder_check(1.0, -1)


class TestSmoothingThreshold:
    def test_reference_value(self):
        assert v_of_w(0.89) == pytest.approx(5.329260, abs=1e-5)

    def test_solves_defining_equation(self):
        for w in (0.3, 0.89):
            v = v_of_w(w)
            integral = adaptive_simpson(
                lambda x: (math.sin(x) / x) ** 2 if x != 0.0 else 1.0, 0.0, v, tol=1e-12
            )
            assert 2.0 / math.pi * integral == pytest.approx((1.0 + w) / 2.0, abs=1e-8)

    def test_monotone_in_w(self):
        values = [v_of_w(w) for w in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("w", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, w):
        with pytest.raises(ParameterError):
            v_of_w(w)


class TestKernelMoments:
    def test_quarter_closed_form(self):
        mi = damped_moment_integrals(0.25)
        assert mi.i1 == pytest.approx(math.log(2.0), abs=1e-14)
        assert mi.i1_numeric_residual <= 1e-8
        assert mi.i2_numeric_residual <= 1e-8

    @pytest.mark.parametrize("c", [0.01, 0.1, 0.4, 0.49])
    def test_numeric_cross_check(self, c):
        mi = damped_moment_integrals(c)
        assert mi.i1_numeric_residual <= 1e-6
        assert mi.i2_numeric_residual <= 1e-6

    @pytest.mark.parametrize("c", [0.0, 0.5, -0.1, 0.9])
    def test_domain(self, c):
        with pytest.raises(ParameterError):
            damped_moment_integrals(c)


class TestConstantPipeline:
    def test_reference_inputs(self):
        rep = theorem_constants()
        assert rep.c3 == pytest.approx(1.2992, abs=1e-3)
        assert rep.c1 <= 15.84
        assert rep.c2 <= 0.65
        assert rep.c1 * rep.c2 <= 10.3
        assert rep.v_w == pytest.approx(5.329260, abs=1e-5)

    def test_theta_window(self):
        rep = theorem_constants()
        for entry in rep.thetas:
            assert 0.0 < entry.theta < 0.5
            assert 0.0 < entry.theta_tilde < 1.0
            assert entry.d_factor > 0.0

    def test_constants_are_maxima(self):
        rep = theorem_constants()
        assert rep.c1 == pytest.approx(max(rep.c3, rep.c5 * rep.c6, rep.c7))
        assert rep.c1 * rep.c2 == pytest.approx(
            max(rep.c3 * rep.c4, 2.0 * rep.kappa * rep.c5 * rep.c6**2, rep.c8)
        )

    def test_named_precondition_errors(self):
        with pytest.raises(ParameterError, match="w in"):
            theorem_constants(w=1.2)
        with pytest.raises(ParameterError, match="m integer"):
            theorem_constants(m=3)
        with pytest.raises(ParameterError, match="C4"):
            theorem_constants(m=1367, c4=5.0)
        with pytest.raises(ParameterError, match=r"C5\*C6"):
            theorem_constants(c5=0.001, c6=33.0)
        with pytest.raises(ParameterError, match="theta_4"):
            theorem_constants(m=4, c4=1.0)


class TestBerryEsseenBound:
    def test_two_by_two_values(self, two_by_two):
        rep = berry_esseen_bound(two_by_two)
        assert rep.sigma2 == pytest.approx(4.0)
        assert rep.gamma_at == pytest.approx(16.0)
        assert rep.bound == pytest.approx(63.36)
        assert rep.delta_report.delta == pytest.approx(0.3413447460685429, abs=1e-12)
        assert rep.slack > 0.0

    def test_dominates_exact_distance(self, rng):
        for n in (3, 5, 6):
            rep = berry_esseen_bound(rand_matrix(rng, n))
            assert rep.delta_report.delta <= rep.bound + 1e-12
            assert rep.delta_report.delta <= rep.lyapunov_bound + 1e-12

    def test_no_delta_above_cap(self, rng):
        rep = berry_esseen_bound(rand_matrix(rng, 5), enum_cap=4)
        assert rep.delta_report is None
        assert rep.slack is None

    def test_degenerate_matrix_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            berry_esseen_bound(ScoreMatrix(np.ones((3, 3))))

    def test_scale_invariance(self, rng):
        m = rand_matrix(rng, 4)
        big = ScoreMatrix(10.0 * m.a)
        a = berry_esseen_bound(m, attach_delta=False)
        b = berry_esseen_bound(big, attach_delta=False)
        assert a.bound == pytest.approx(b.bound, rel=1e-10)
        assert a.lyapunov_bound == pytest.approx(b.lyapunov_bound, rel=1e-10)


class TestSamplingBound:
    def test_matches_generic_bound(self, rng):
        for n, m_draw in ((4, 2), (6, 3), (9, 4)):
            values = rng.standard_normal(n)
            design = from_sampling(values, m_draw)
            generic = berry_esseen_bound(design.matrix, attach_delta=False).bound
            special = sampling_bound_specialized(values, m_draw, design.sigma2)
            assert special == pytest.approx(generic, rel=1e-11)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            sampling_bound_specialized([1.0, 1.0, 1.0], 2, 0.0)


class TestSmoothingBound:
    def test_dominates_exact_distance(self, rng):
        for n in (3, 4, 5):
            m = rand_matrix(rng, n)
            sigma = math.sqrt(center(m).sigma2)
            delta = kolmogorov_distance(enumerate_distribution(m)).delta
            for cutoff in (2.0 / sigma, 10.0 / sigma):
                assert delta <= smoothing_bound(m, 0.89, cutoff, tol=1e-8) + 1e-8

    def test_two_by_two(self, two_by_two):
        delta = kolmogorov_distance(enumerate_distribution(two_by_two)).delta
        bound = smoothing_bound(two_by_two, 0.89, 5.0, tol=1e-8)
        assert delta <= bound

    def test_reassembles_from_parts(self, two_by_two):
        # integral of |cos(2t) - exp(-2 t^2)|/t over [0, T], assembled here
        # independently of the implementation's quadrature path.
        w, sigma, cutoff = 0.89, 2.0, 5.0

        def integrand(t):
            if t == 0.0:
                return 0.0
            return abs(math.cos(2.0 * t) - math.exp(-2.0 * t * t)) / t

        integral = adaptive_simpson(integrand, 0.0, cutoff, tol=1e-11)
        expected = integral / (math.pi * w) + (1.0 + w) * v_of_w(w) / (
            math.sqrt(2.0 * math.pi) * w * sigma * cutoff
        )
        got = smoothing_bound(two_by_two, w, cutoff, tol=1e-10)
        assert got == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("bad", [dict(w=0.0), dict(w=1.0), dict(T=0.0), dict(tol=0.0)])
    def test_parameter_domains(self, two_by_two, bad):
        kwargs = dict(w=0.89, T=3.0, tol=1e-8)
        kwargs.update(bad)
        with pytest.raises(ParameterError):
            smoothing_bound(two_by_two, kwargs["w"], kwargs["T"], tol=kwargs["tol"])

    def test_degenerate_matrix_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            smoothing_bound(ScoreMatrix(np.zeros((3, 3))), 0.89, 2.0)
