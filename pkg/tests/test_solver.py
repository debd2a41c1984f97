"""Schedule, triple solver, direct Gamma vs brute force, the integral
decomposition, and the archimedean main term (both routes)."""

import math
import warnings

import mpmath as mp
import numpy as np
import pytest

from ps_trident.errors import BudgetExceeded, InadmissibleLambda0, RangeEmpty
from ps_trident.primes import GammaType, sieve_ps_table
from ps_trident.smoothing import SmoothingKernel, theta, theta_fourier
from ps_trident.expsums import eval_I
from ps_trident.solver import (
    ProblemSpec,
    RunParams,
    derive_params,
    find_triples,
    gamma_direct,
    gamma_via_integral,
    main_term_B,
    triple_value,
)

G9 = GammaType(0.9)
G95 = GammaType(0.95)
G97 = GammaType(0.97)


def params_at(X, gamma, theta_exp):
    lnX = math.log(X)
    eps = X ** ((219.0 - 220.0 * gamma.value) / 208.0 + theta_exp)
    return RunParams(
        q0=0,
        X=float(X),
        Delta=X ** (-12.0 / 13.0) * lnX,
        eps=eps,
        H=lnX * lnX / eps,
        smoothing_k=max(1, math.floor(lnX)),
    )


def brute_force_triples(spec, X, tol):
    t1 = sieve_ps_table(X, spec.lambda0, 1, spec.gamma)
    t3 = sieve_ps_table(X, spec.lambda0, 4, spec.gamma)
    out = set()
    for p1 in t1.primes.tolist():
        for p2 in t1.primes.tolist():
            for p3 in t3.primes.tolist():
                if abs(triple_value(spec, p1, p2, p3)) < tol:
                    out.add((p1, p2, p3))
    return out


class TestProblemSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ProblemSpec(0.0, 1.0, -1.0, 0.0, G9, 0.02, 0.05)
        with pytest.raises(ValueError):
            ProblemSpec(1.0, 1.0, -1.0, 0.0, G9, 0.0, 0.05)
        with pytest.raises(ValueError):
            ProblemSpec(1.0, 1.0, -1.0, 0.0, G9, 0.02, 1.5)

    def test_sign_flag(self):
        assert ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 0.05).signs_not_all_same
        assert not ProblemSpec(1.0, 1.0, 2.0, 0.0, G9, 0.02, 0.05).signs_not_all_same

    def test_admissibility_sign_sensitive(self):
        # negative lambda1 makes the sign-sensitive threshold non-positive
        s = ProblemSpec(-1.0, 1.0, 2.0, 0.0, G9, 0.02, 0.05)
        assert s.lambda0_admissibility_threshold <= 0
        assert not s.lambda0_admissible


class TestDeriveParams:
    def test_exact_power_of_two(self):
        spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, GammaType("0.9955"), 0.01, 0.05)
        rp = derive_params(64, spec)
        assert rp.X == 8192.0
        assert rp.Delta == pytest.approx(2.19993e-3, rel=1e-5)
        assert rp.smoothing_k == 9

    def test_boundary_gamma_exponent_cancels(self):
        from fractions import Fraction

        spec = ProblemSpec(1.0, 1.0, -1.0, 0.0, GammaType(Fraction(219, 220)), 0.01, 0.05)
        rp = derive_params(10, spec)
        # (219 - 220*gamma)/208 = 0, so eps = X^theta exactly
        assert rp.eps == pytest.approx(rp.X**0.01, rel=1e-14)

    def test_high_precision_recomputation(self):
        spec = ProblemSpec(1.0, 1.0, -1.0, 0.5, G95, 0.03, 0.05)
        rp = derive_params(37, spec)
        with mp.workdps(80):
            X = mp.power(37, mp.mpf(13) / 6)
            lnX = mp.log(X)
            assert rp.X == pytest.approx(float(X), rel=1e-12)
            assert rp.Delta == pytest.approx(float(mp.power(X, mp.mpf(-12) / 13) * lnX), rel=1e-12)
            g = mp.mpf(19) / 20
            eps = mp.power(X, (219 - 220 * g) / 208 + mp.mpf("0.03"))
            assert rp.eps == pytest.approx(float(eps), rel=1e-12)
            assert rp.H == pytest.approx(float(lnX**2 / eps), rel=1e-12)

    def test_idempotent(self):
        spec = ProblemSpec(1.0, 1.0, -1.0, 0.5, G95, 0.03, 0.05)
        assert derive_params(37, spec) == derive_params(37, spec)

    def test_rejects_small_q0(self):
        spec = ProblemSpec(1.0, 1.0, -1.0, 0.5, G95, 0.03, 0.05)
        with pytest.raises(ValueError):
            derive_params(1, spec)


class TestFindTriples:
    def test_equals_brute_force(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 1e-3)
        X, tol = 2000.0, 0.75
        got = {(s.p1, s.p2, s.p3) for s in find_triples(spec, X, tol)}
        assert got == brute_force_triples(spec, X, tol)

    def test_irrational_coefficients_brute_force(self):
        spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, G97, 0.02, 0.04)
        X, tol = 2000.0, 1.4
        got = {(s.p1, s.p2, s.p3) for s in find_triples(spec, X, tol)}
        assert got == brute_force_triples(spec, X, tol)
        assert len(got) > 0

    def test_witness_instance(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 1e-4)
        sols = find_triples(spec, 1e4, 0.5)
        assert any((s.p1, s.p2, s.p3) == (3, 29, 2) for s in sols)
        for s in sols:
            assert abs(s.value) < 0.5
            assert s.value == triple_value(spec, s.p1, s.p2, s.p3)

    def test_solutions_revalidate_membership_and_range(self):
        from ps_trident.primes import is_ps_prime

        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 1e-4)
        X = 1e4
        for s in find_triples(spec, X, 0.5, limit=10):
            assert is_ps_prime(s.p1, G9) and is_ps_prime(s.p2, G9) and is_ps_prime(s.p3, G9)
            assert spec.lambda0 * X < s.p1 <= X
            assert spec.lambda0 * X < s.p2 <= X
            assert spec.lambda0 * X < s.p3**4 <= X

    def test_all_positive_lambdas_empty(self):
        spec = ProblemSpec(1.0, 1.0, 2.0, 0.0, G9, 0.02, 0.05)
        # every value exceeds lambda0*X*min(lambda), so a smaller tol finds nothing
        assert find_triples(spec, 1000.0, 10.0) == []

    def test_tol_infinity_counts_product(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 0.04)
        X = 300.0
        t1 = sieve_ps_table(X, spec.lambda0, 1, G9)
        t3 = sieve_ps_table(X, spec.lambda0, 4, G9)
        sols = find_triples(spec, X, 1e18)
        assert len(sols) == len(t1) * len(t1) * len(t3)

    def test_limit_truncates_sorted(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 1e-4)
        full = find_triples(spec, 1e4, 0.5)
        head = find_triples(spec, 1e4, 0.5, limit=5)
        assert head == full[:5]

    def test_empty_table_raises(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 0.9)
        with pytest.raises(RangeEmpty):
            find_triples(spec, 10.0, 1.0)

    def test_rejects_nonpositive_tol(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 0.05)
        with pytest.raises(ValueError):
            find_triples(spec, 100.0, 0.0)


class TestGammaDirect:
    def test_brute_force_oracle(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G95, 0.05, 0.04)
        params = params_at(300.0, G95, 0.05)
        kernel = SmoothingKernel(params.eps, params.smoothing_k)
        t1 = sieve_ps_table(300.0, 0.04, 1, G95)
        t3 = sieve_ps_table(300.0, 0.04, 4, G95)
        w1 = dict(zip(t1.primes.tolist(), t1.weights.tolist()))
        w3 = dict(zip(t3.primes.tolist(), t3.weights.tolist()))
        ref = 0.0
        for p1 in t1.primes.tolist():
            for p2 in t1.primes.tolist():
                for p3 in t3.primes.tolist():
                    ref += theta(triple_value(spec, p1, p2, p3), kernel) * w1[p1] * w1[p2] * w3[p3]
        got = gamma_direct(spec, params)
        assert got == pytest.approx(ref, rel=1e-10)
        assert got > 0

    def test_nonnegative_and_solution_equivalence(self):
        # Gamma > 0 iff a triple lies inside the eps window
        for lam0, expect_pos in ((0.04, True), (0.3, False)):
            spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, G97, 0.02, lam0)
            params = params_at(2000.0, G97, 0.02)
            g = gamma_direct(spec, params)
            sols = find_triples(spec, 2000.0, params.eps)
            assert g >= 0.0
            assert (g > 0) == (len(sols) > 0) == expect_pos

    def test_empty_range_zero(self):
        spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G9, 0.02, 0.9)
        assert gamma_direct(spec, params_at(10.0, G9, 0.02)) == 0.0


@pytest.fixture(scope="module")
def smoke():
    spec = ProblemSpec(1.0, 1.0, -2.0, 0.0, G95, 0.05, 0.04)
    params = params_at(300.0, G95, 0.05)
    dec = gamma_via_integral(spec, params, threads=2)
    direct = gamma_direct(spec, params)
    return spec, params, dec, direct


class TestGammaViaIntegral:

    def test_interval_contains_direct(self, smoke):
        _, _, dec, direct = smoke
        assert dec.contains(direct)
        # the quadrature is in fact far tighter than the tail bound
        assert abs(dec.total - direct) < 1e-3

    def test_imaginary_diagnostic_vanishes(self, smoke):
        _, _, dec, _ = smoke
        assert (dec.gamma1 + dec.gamma2).imag == 0.0
        assert dec.im_diagnostic == 0.0

    def test_thread_count_bitwise_identical(self, smoke):
        spec, params, dec, _ = smoke
        d1 = gamma_via_integral(spec, params, threads=1)
        assert d1.gamma1 == dec.gamma1 and d1.gamma2 == dec.gamma2
        assert d1.total == dec.total

    def test_budget_enforced(self, smoke):
        spec, params, _, _ = smoke
        with pytest.raises(BudgetExceeded):
            gamma_via_integral(spec, params, quad_budget=1000)

    def test_tail_bound_scaled_by_masses(self, smoke):
        spec, params, dec, _ = smoke
        from ps_trident.smoothing import theta_tail_mass

        t1 = sieve_ps_table(300.0, 0.04, 1, G95)
        t3 = sieve_ps_table(300.0, 0.04, 4, G95)
        expected = theta_tail_mass(params.H, params.kernel) * t1.weight_mass**2 * t3.weight_mass
        assert dec.gamma3_bound == pytest.approx(expected, rel=1e-14)


class TestMainTerm:
    def test_positive_and_real(self):
        spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, G97, 0.02, 0.05)
        res = main_term_B(spec, params_at(1e3, G97, 0.02))
        assert res.value > 0
        assert res.ratio > 0
        assert res.admissible

    def test_ratio_scale_stability(self):
        spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, G97, 0.02, 0.05)
        ratios = [main_term_B(spec, params_at(X, G97, 0.02)).ratio for X in (1e3, 1e4, 1e5)]
        assert max(ratios) / min(ratios) < 3.0

    def test_inadmissible_warns_but_computes(self):
        spec = ProblemSpec(-1.0, 1.0, 2.0, 0.0, G97, 0.02, 0.05)
        with warnings.catch_warnings(record=True) as wl:
            warnings.simplefilter("always")
            res = main_term_B(spec, params_at(1e3, G97, 0.02))
        assert not res.admissible
        assert any(issubclass(w.category, InadmissibleLambda0) for w in wl)
        assert math.isfinite(res.value)

    @pytest.mark.slow
    def test_against_oscillatory_t_space_definition(self):
        # literal transform-side quadrature with per-node I-integrals
        spec = ProblemSpec(math.sqrt(2), 1.0, -1.0, 0.3, G97, 0.02, 0.05)
        X = 100.0
        params = params_at(X, G97, 0.02)
        res = main_term_B(spec, params)
        kernel = SmoothingKernel(params.eps, params.smoothing_k)
        T = 3.0
        h = 1.0 / (8 * (math.sqrt(2) + 2) * X)
        npan = int(math.ceil(T / h))
        from numpy.polynomial.legendre import leggauss

        nodes, wts = leggauss(4)
        edges = np.linspace(0.0, T, npan + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halfs = 0.5 * (edges[1:] - edges[:-1])
        acc = 0.0
        for i0 in range(0, npan, 8192):
            i1 = min(i0 + 8192, npan)
            ts = (mids[i0:i1, None] + halfs[i0:i1, None] * nodes[None, :]).ravel()
            gw = (halfs[i0:i1, None] * wts[None, :]).ravel()
            vals = np.empty(ts.size, dtype=np.complex128)
            for j, t in enumerate(ts):
                t = float(t)
                vals[j] = (
                    theta_fourier(t, kernel)
                    * eval_I(1, spec.lambda1 * t, X, 0.05)
                    * eval_I(1, spec.lambda2 * t, X, 0.05)
                    * eval_I(4, spec.lambda3 * t, X, 0.05)
                    * np.exp(2j * math.pi * spec.eta * t)
                )
            acc += float(np.sum(2.0 * gw * vals.real))
        B_t = G97.value**3 * acc
        assert res.value == pytest.approx(B_t, rel=1e-7)
