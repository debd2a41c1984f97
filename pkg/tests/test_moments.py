"""Spectra and moment identities: pinned small cases, mass identities,
divisor caps, the sampling oracle, and the inequality directions."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ps_trident.core import divisor_tau
from ps_trident.errors import SizeLimit
from ps_trident.moments import (
    PrimeSet,
    exact_moment,
    quadrature_moment,
    scaling_report,
    spectrum_b,
    spectrum_c,
    spectrum_c_bar,
    spectrum_c_star,
)
from ps_trident.primes import GammaType

G9 = GammaType(0.9)
P235 = PrimeSet(np.array([2, 3, 5], dtype=np.int64))


def brute_b(P, m):
    """Oracle: full 2m-fold enumeration of difference counts."""
    from itertools import product
    from collections import Counter

    p4 = [p**4 for p in P.primes.tolist()]
    c = Counter()
    for tup in product(p4, repeat=2 * m):
        c[sum(tup[:m]) - sum(tup[m:])] += 1
    return dict(c)


class TestSpectrumB:
    def test_pinned_235_m1(self):
        b = spectrum_b(P235, 1)
        assert b[0] == 3
        assert b[65] == 1 and b[-65] == 1
        offdiag = [j for j in b.keys() if j != 0]
        assert len(offdiag) == 6
        assert b.total() == 9

    @given(st.integers(1, 6), st.integers(1, 2))
    @settings(max_examples=20, deadline=None)
    def test_against_enumeration(self, n, m):
        P = PrimeSet.first_n(n, G9)
        got = spectrum_b(P, m).entries
        assert got == brute_b(P, m)

    def test_mass_identities(self):
        for n in (1, 4, 9, 12):
            P = PrimeSet.first_n(n, G9)
            assert spectrum_b(P, 1).total() == n**2
            assert spectrum_b(P, 2).total() == n**4
            assert spectrum_b(P, 4).total() == n**8

    def test_symmetry(self):
        P = PrimeSet.first_n(14, G9)
        for m in (1, 2):
            b = spectrum_b(P, m)
            assert all(b[-j] == b[j] for j in b.keys())

    def test_singleton(self):
        P1 = PrimeSet(np.array([7], dtype=np.int64))
        for m in (1, 2, 4):
            assert spectrum_b(P1, m).entries == {0: 1}

    def test_diagonals_are_moments(self):
        P = PrimeSet.first_n(11, G9)
        assert spectrum_b(P, 1)[0] == exact_moment(P, 1) == 11
        assert spectrum_b(P, 2)[0] == exact_moment(P, 2)
        assert spectrum_b(P, 4)[0] == exact_moment(P, 4)

    def test_size_caps(self):
        with pytest.raises(SizeLimit):
            spectrum_b(PrimeSet.first_n(17, G9), 4)


class TestSpectrumC:
    def test_pinned(self):
        c = spectrum_c(P235)
        assert c[0] == 3
        assert c[65] == 1

    def test_diagonal_is_cardinality(self):
        for n in (1, 5, 20, 40):
            P = PrimeSet.first_n(n, G9)
            assert spectrum_c(P)[0] == n

    def test_equals_b_spectrum(self):
        # the two expansions of |S|^2 count the same measure
        for n in (2, 7, 15):
            P = PrimeSet.first_n(n, G9)
            assert spectrum_c(P).entries == spectrum_b(P, 1).entries

    def test_divisor_cap(self):
        P = PrimeSet.first_n(30, G9)
        c = spectrum_c(P)
        for j, v in c.entries.items():
            if j != 0:
                assert v <= divisor_tau(j, 2)


class TestSpectrumCStar:
    def test_singleton(self):
        assert spectrum_c_star(PrimeSet(np.array([5]))).entries == {0: 1}

    def test_zero_stratum_bounds(self):
        for n in (2, 6, 13, 25):
            P = PrimeSet.first_n(n, G9)
            c0 = spectrum_c_star(P)[0]
            assert n <= c0 <= 2 * n * n - n

    def test_zero_stratum_exact_structure(self):
        # j = 0 forces k1 = 0 or k2 = 0 (positive quadratic factor), so the
        # count is exactly |{k1=0}| + |{k2=0}| - |{both}| = 2 N^2 - N
        for n in (3, 10, 26):
            P = PrimeSet.first_n(n, G9)
            assert spectrum_c_star(P)[0] == 2 * n * n - n

    def test_brute_force_indices(self):
        # direct four-fold loop over shifts, with the expanded quadratic index
        from collections import Counter

        P = PrimeSet.first_n(7, G9)
        pl = P.primes.tolist()
        pset = set(pl)
        c = Counter()
        for p in pl:
            for q in pl:
                for r in pl:
                    k1, k2 = q - p, r - p
                    if p + k1 + k2 in pset:
                        j = 2 * k1 * k2 * (
                            6 * p * p + 6 * p * k1 + 6 * p * k2
                            + 2 * k1 * k1 + 3 * k1 * k2 + 2 * k2 * k2
                        )
                        c[j] += 1
        assert spectrum_c_star(P).entries == dict(c)

    def test_divisor_cap(self):
        P = PrimeSet.first_n(20, G9)
        cs = spectrum_c_star(P)
        for j, v in cs.entries.items():
            if j != 0:
                assert v <= divisor_tau(j, 4)


class TestSpectrumCBar:
    def test_singleton(self):
        assert spectrum_c_bar(PrimeSet(np.array([3]))).entries == {0: 1}

    def test_zero_stratum_bound(self):
        for n in (2, 5, 10):
            P = PrimeSet.first_n(n, G9)
            assert spectrum_c_bar(P)[0] <= 7 * n**3

    def test_brute_force_small(self):
        from collections import Counter
        from itertools import product

        P = PrimeSet.first_n(5, G9)
        pl = P.primes.tolist()
        pset = set(pl)
        c = Counter()
        for p, q, r, s in product(pl, repeat=4):
            k1, k2, k3 = q - p, r - p, s - p
            shifts = (k1 + k2, k1 + k3, k2 + k3, k1 + k2 + k3)
            if all(p + sh in pset for sh in shifts):
                c[12 * k1 * k2 * k3 * (2 * p + k1 + k2 + k3)] += 1
        assert spectrum_c_bar(P).entries == dict(c)

    def test_divisor_cap(self):
        P = PrimeSet.first_n(12, G9)
        cb = spectrum_c_bar(P)
        for j, v in cb.entries.items():
            if j != 0:
                assert v <= divisor_tau(j, 5)

    def test_size_cap(self):
        with pytest.raises(SizeLimit):
            spectrum_c_bar(PrimeSet.first_n(61, G9))


class TestExactMoment:
    def test_pinned_235(self):
        assert exact_moment(P235, 1) == 3
        assert exact_moment(P235, 2) == 15

    def test_m1_is_cardinality(self):
        for n in (1, 8, 40, 200):
            assert exact_moment(PrimeSet.first_n(n, G9), 1) == n

    def test_diagonal_lower_bound(self):
        for n, m in ((6, 2), (9, 4), (8, 8)):
            P = PrimeSet.first_n(n, G9)
            assert exact_moment(P, m) >= n**m

    def test_quadrature_oracle(self):
        for n in (1, 3, 6, 10):
            P = PrimeSet.first_n(n, G9)
            for m in (1, 2):
                em = exact_moment(P, m)
                qm = quadrature_moment(P, m)
                assert abs(qm - em) <= 1e-6 * em

    def test_quadrature_thread_determinism(self):
        P = PrimeSet.first_n(8, G9)
        assert quadrature_moment(P, 2, threads=1) == quadrature_moment(P, 2, threads=8)

    def test_fourth_moment_equals_sum_bjcj(self):
        for n in (3, 9, 17):
            P = PrimeSet.first_n(n, G9)
            b = spectrum_b(P, 1)
            c = spectrum_c(P)
            assert exact_moment(P, 2) == sum(b[j] * v for j, v in c.entries.items())

    def test_size_caps(self):
        with pytest.raises(SizeLimit):
            exact_moment(PrimeSet.first_n(13, G9), 8)


class TestInequalityDirections:
    def test_eighth_moment_below_cauchy_bound(self):
        # exact shift-count constant (theorem) and the idealized |P| factor,
        # which happens to hold at these sizes
        from ps_trident.moments import shift_counts

        for n in (4, 9, 14):
            P = PrimeSet.first_n(n, G9)
            lhs = exact_moment(P, 4)
            cs = spectrum_c_star(P)
            b2 = spectrum_b(P, 2)
            s = sum(b2[j] * v for j, v in cs.entries.items())
            K1, _ = shift_counts(P)
            assert lhs <= K1 * s
            assert lhs <= n * s

    def test_sixteenth_moment_below_exact_cauchy_bound(self):
        from ps_trident.moments import shift_counts

        for n in (4, 8, 12):
            P = PrimeSet.first_n(n, G9)
            lhs = exact_moment(P, 8)
            cb = spectrum_c_bar(P)
            b4 = spectrum_b(P, 4)
            s = sum(b4[j] * v for j, v in cb.entries.items())
            K1, K2 = shift_counts(P)
            assert lhs <= K1 * K1 * K2 * s

    def test_idealized_sixteenth_constant_fails_at_desk_scale(self):
        # pinned finding: with the shift counts idealized to |P| the
        # sixteenth-moment direction is violated at small sizes
        P = PrimeSet.first_n(4, G9)
        lhs = exact_moment(P, 8)
        cb = spectrum_c_bar(P)
        b4 = spectrum_b(P, 4)
        rhs = 4**4 * sum(b4[j] * v for j, v in cb.entries.items())
        assert lhs > rhs


class TestScalingReport:
    def test_columns_and_slopes(self):
        rep = scaling_report(G9, [10, 20, 30])
        assert len(rep.rows) == 3
        for row in rep.rows:
            assert row.moment4 >= 2 * row.size**2 - row.size
            assert row.moment8_bound is not None
        assert rep.rows[0].moment16 is not None  # size 10 <= 12
        assert rep.rows[1].moment16 is None
        assert rep.slope4 is not None and rep.slope8 is not None
