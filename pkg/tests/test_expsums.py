"""Exponential sums: pinned values, symmetries, the exact decomposition
identity, oscillatory integral bounds, and the integral-vs-sum gap."""

import math

import numpy as np
import pytest

from ps_trident.expsums import (
    ExpSumSpec,
    decompose_s4,
    eval_I,
    eval_sum,
    euler_gap,
    pairwise_sum,
    sum_mass,
)
from ps_trident.primes import GammaType, sieve_ps_table

G95 = GammaType(0.95)
G9 = GammaType(0.9)


def golden_ts(n, lo, hi):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    u = np.mod(np.arange(1, n + 1) * phi, 1.0)
    return lo + (hi - lo) * u


class TestSpecValidation:
    def test_kinds(self):
        with pytest.raises(ValueError):
            ExpSumSpec("bogus", 100.0, 0.05)
        with pytest.raises(ValueError):
            ExpSumSpec("s", 100.0, 0.05, k=5, gamma=G9)
        with pytest.raises(ValueError):
            ExpSumSpec("s", 100.0, 0.05, k=2)  # missing gamma
        with pytest.raises(ValueError):
            ExpSumSpec("sigma", 100.0, 0.05, k=3)
        with pytest.raises(ValueError):
            ExpSumSpec("u", 100.0, 0.05, gamma=G9)  # gamma not allowed
        with pytest.raises(ValueError):
            ExpSumSpec("omega", 100.0, 0.05)  # gamma required


class TestEvalSum:
    def test_u_pinned(self):
        spec = ExpSumSpec("u", 100.0, 0.05)
        assert eval_sum(spec, 0.0) == 2 + 0j  # n in {2, 3}

    def test_s_at_zero_matches_table_mass(self):
        spec = ExpSumSpec("s", 1e4, 0.05, k=1, gamma=G9)
        table = sieve_ps_table(1e4, 0.05, 1, G9)
        v = eval_sum(spec, 0.0)
        assert v.imag == 0.0
        assert v.real == pytest.approx(table.weight_mass, rel=1e-12)
        assert v.real > 0

    def test_conjugate_symmetry(self):
        for kind, g in (("s", G9), ("sigma", None), ("u", None), ("omega", G9)):
            spec = ExpSumSpec(kind, 5e4, 0.01, k=1 if kind == "s" else 4, gamma=g)
            mass = max(sum_mass(spec), 1e-12)
            for t in golden_ts(25, -3.0, 3.0):
                a = eval_sum(spec, float(t))
                b = eval_sum(spec, float(-t))
                assert abs(a - np.conj(b)) <= 1e-12 * mass

    def test_triangle_inequality(self):
        spec = ExpSumSpec("sigma", 3e4, 0.02)
        top = eval_sum(spec, 0.0).real
        for t in golden_ts(100, -8.0, 8.0):
            assert abs(eval_sum(spec, float(t))) <= top * (1 + 1e-12)

    def test_exact_periodicity_bitwise(self):
        # dyadic t keeps t+1 exactly representable
        for kind, g, k in (("u", None, 4), ("sigma", None, 4), ("s", G9, 2)):
            spec = ExpSumSpec(kind, 2e4, 0.03, k=k, gamma=g)
            for j in range(40):
                t = j / 64.0
                assert eval_sum(spec, t + 1.0) == eval_sum(spec, t)

    def test_empty_range_is_zero_and_flagged(self):
        from ps_trident.expsums import sum_size

        spec = ExpSumSpec("u", 2.0, 0.9)  # no integer fourth power in (1.8, 2]
        assert eval_sum(spec, 0.7) == 0j
        assert sum_size(spec) == 0
        assert sum_size(ExpSumSpec("u", 100.0, 0.05)) == 2

    def test_pairwise_sum_deterministic_tree(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal(1001) + 1j * rng.standard_normal(1001)
        assert pairwise_sum(a) == pairwise_sum(a.copy())
        assert pairwise_sum(a[:0]) == 0


class TestEvalI:
    def test_t_zero_closed_form(self):
        for k in (1, 2, 3, 4):
            v = eval_I(k, 0.0, 1e4, 0.05)
            assert v == pytest.approx((1e4) ** (1 / k) - (500.0) ** (1 / k), rel=1e-14)

    def test_conjugate_symmetry_exact(self):
        for t in (0.003, 0.2, 1.7):
            assert eval_I(4, -t, 1e4, 0.05) == np.conj(eval_I(4, t, 1e4, 0.05))

    def test_decay_envelope_constant_4(self):
        # |I_k(t)| <= 4 X^(1/k-1) min(X, 1/|t|), sampled
        for k in (1, 2, 4):
            for X in (1e3, 1e4):
                for t in (1e-6, 1e-4, 3e-3, 0.05, 0.8, 5.0 / X * 100):
                    v = abs(eval_I(k, t, X, 0.05))
                    bound = 4.0 * X ** (1 / k - 1) * min(X, 1 / t)
                    assert v <= bound, (k, X, t)

    def test_quadrature_against_fine_reference(self):
        # doubling the panel density reproduces the value
        X, lam0, t = 2e3, 0.05, 0.37
        v = eval_I(4, t, X, lam0)
        ys = np.linspace(lam0 * X, X, 2**21 + 1)
        f = 0.25 * ys ** (-0.75) * np.exp(2j * math.pi * t * ys)
        ref = np.trapezoid(f, ys)
        assert v == pytest.approx(ref, abs=1e-7 * abs(ref) + 1e-9)


class TestDecomposition:
    def test_residual_is_float_noise(self):
        for t in golden_ts(30, -11.0, 11.0):
            d = decompose_s4(float(t), 1e4, 0.001, G95)
            assert d.residual_rel <= 1e-12

    def test_t_zero_taylor_gap_small(self):
        d = decompose_s4(0.0, 1e4, 0.001, G95)
        assert d.s4.imag == 0.0
        # |mainterm - gamma*Sigma| <= sum log(p)/p over the table
        from ps_trident.primes import power_range_bounds, primes_in_range

        lo, hi = power_range_bounds(1e4, 0.001, 4)
        ps = primes_in_range(2, hi).astype(np.float64)
        cap = float(np.sum(np.log(ps) / ps))
        assert abs(d.taylor_gap) <= cap

    def test_empty_range(self):
        d = decompose_s4(0.5, 2.0, 0.9, G95)
        assert (d.s4, d.mainterm, d.omega) == (0j, 0j, 0j)

    def test_s4_equals_eval_sum(self):
        spec = ExpSumSpec("s", 1e4, 0.001, k=4, gamma=G95)
        for t in (0.0, 0.37, -2.2):
            d = decompose_s4(t, 1e4, 0.001, G95)
            assert d.s4 == pytest.approx(eval_sum(spec, t), abs=1e-12)

    def test_omega_equals_eval_sum(self):
        spec = ExpSumSpec("omega", 1e4, 0.001, k=4, gamma=G95)
        for t in (0.0, 0.37):
            d = decompose_s4(t, 1e4, 0.001, G95)
            assert d.omega == pytest.approx(eval_sum(spec, t), abs=1e-12)


class TestEulerGap:
    def test_t_zero_counting_vs_length(self):
        # |I4(0) - U(0)| is the endpoint error of a count vs a length
        for X, lam0 in ((1e4, 0.05), (1e3, 0.02), (256.0, 0.3)):
            gap = euler_gap(0.0, X, lam0) * 1.0
            assert abs(eval_I(4, 0.0, X, lam0) - eval_sum(ExpSumSpec("u", X, lam0), 0.0)) <= 2.0

    def test_normalized_gap_bounded(self):
        worst = 0.0
        for X in (300.0, 2e3, 1e4):
            for t in golden_ts(30, -2.0, 2.0):
                worst = max(worst, euler_gap(float(t), X, 0.05))
        assert worst <= 20.0

    def test_continuity_in_t(self):
        X = 1e3
        ts = np.linspace(0.1, 0.1005, 11)
        vals = [euler_gap(float(t), X, 0.05) for t in ts]
        diffs = np.abs(np.diff(vals))
        assert np.all(diffs < 0.05)


class TestIntegralTracking:
    def test_s1_tracks_gamma_I1_at_zero(self):
        # |S1(0) - gamma*I1(0)| / X stays small at X = 10^6
        g = GammaType(0.95)
        spec = ExpSumSpec("s", 1e6, 0.05, k=1, gamma=g)
        s1 = eval_sum(spec, 0.0).real
        i1 = eval_I(1, 0.0, 1e6, 0.05).real
        assert abs(s1 - g.value * i1) / 1e6 < 0.5
