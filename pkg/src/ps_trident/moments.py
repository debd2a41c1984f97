"""Representation-count spectra and exact moment identities.

For the unweighted sum S(t) = sum_{p in P} e(t p**4) over a finite set of
PS primes, the moments integral_0^1 |S(t)|**(2m) dt are exact integers:
the number of ordered 2m-tuples with equal sums of fourth powers.  This
module realises them three ways and cross-checks:

  * collision counting on the m-fold sum spectrum (exact integers);
  * the coefficient families b_j (difference spectra of tuple sums) and
    c_j / c*_j / cbar_j (shifted-prime parametrisations), whose diagonal
    and mass identities are exercised by the tests;
  * a Nyquist-exact sampling oracle (quadrature_moment).

The c-family indices come from the shift parametrisations
  c:    j = (p+k)^4 - p^4                     with p, p+k in P
  c*:   j = 2 k1 k2 (6p^2 + 6p k1 + 6p k2 + 2k1^2 + 3 k1 k2 + 2 k2^2)
        with p, p+k1, p+k2, p+k1+k2 in P
  cbar: j = 12 k1 k2 k3 (2p + k1 + k2 + k3)   with all eight shifts in P
and are computed through the equivalent alternating fourth-power forms,
which stay in exact integer arithmetic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import Overflow, SizeLimit
from .primes import GammaType, first_n_ps_primes, ps_primes_upto

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class PrimeSet:
    """The set P = {p <= X : p PS of type gamma}, sorted, unweighted."""

    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.primes, dtype=np.int64)
        if p.size and not np.all(np.diff(p) > 0):
            raise ValueError("primes must be strictly increasing")
        object.__setattr__(self, "primes", p)

    @classmethod
    def up_to(cls, X: float, gamma: GammaType) -> "PrimeSet":
        return cls(ps_primes_upto(X, gamma))

    @classmethod
    def first_n(cls, n: int, gamma: GammaType) -> "PrimeSet":
        return cls(first_n_ps_primes(n, gamma))

    def __len__(self):
        return int(self.primes.size)

    @property
    def fourth_powers(self) -> np.ndarray:
        return self.primes.astype(np.int64) ** 4


@dataclass
class SpectrumMap:
    """Sparse integer-indexed counts j -> count, with the family label."""

    entries: dict
    order: str

    def __getitem__(self, j: int) -> int:
        return self.entries.get(j, 0)

    def total(self) -> int:
        return sum(self.entries.values())

    def keys(self):
        return self.entries.keys()

    def __len__(self):
        return len(self.entries)


def _check_key_width(P: PrimeSet, m: int):
    if len(P) == 0:
        raise ValueError("prime set must be nonempty")
    top = m * int(P.primes[-1]) ** 4
    if top >= 1 << 127:
        raise Overflow("spectrum keys would exceed 127 bits")
    return top


def _sum_spectrum(P: PrimeSet, m: int):
    """(values, counts) of the m-fold ordered sum spectrum of fourth powers."""
    p4 = P.fourth_powers
    if m == 1:
        return p4.copy(), np.ones(p4.size, dtype=np.int64)
    if m == 2:
        sums = np.add.outer(p4, p4).ravel()
        return np.unique(sums, return_counts=True)
    half_v, half_c = _sum_spectrum(P, m // 2)
    sums = np.add.outer(half_v, half_v).ravel()
    wts = np.multiply.outer(half_c, half_c).ravel()
    order = np.argsort(sums, kind="stable")
    sums, wts = sums[order], wts[order]
    vals, idx = np.unique(sums, return_index=True)
    counts = np.add.reduceat(wts, idx)
    return vals, counts


def _cross_correlation(vals: np.ndarray, counts: np.ndarray) -> dict:
    """{j: sum_s r(s) r(s - j)} for the spectrum r given by (vals, counts)."""
    diffs = np.subtract.outer(vals, vals).ravel()
    wts = np.multiply.outer(counts, counts).ravel()
    order = np.argsort(diffs, kind="stable")
    diffs, wts = diffs[order], wts[order]
    uv, idx = np.unique(diffs, return_index=True)
    sums = np.add.reduceat(wts, idx)
    return {int(j): int(c) for j, c in zip(uv, sums)}


_B_SIZE_CAPS = {1: 2048, 2: 64, 4: 16}


def spectrum_b(P: PrimeSet, m: int) -> SpectrumMap:
    """b-type spectrum at order m in {1, 2, 4}: counts of ordered 2m-tuples
    with (sum of first m fourth powers) - (sum of last m) = j.

    Computed by cross-correlating the m-fold sum spectrum with itself
    (meet in the middle), never by 2m-fold enumeration.
    """
    if m not in (1, 2, 4):
        raise ValueError("m must be one of 1, 2, 4")
    _check_key_width(P, m)
    if len(P) > _B_SIZE_CAPS[m]:
        raise SizeLimit(f"spectrum_b(m={m}) capped at |P| <= {_B_SIZE_CAPS[m]}")
    vals, counts = _sum_spectrum(P, m)
    name = {1: "b", 2: "b*", 4: "bbar"}[m]
    return SpectrumMap(_cross_correlation(vals, counts), name)


def spectrum_c(P: PrimeSet) -> SpectrumMap:
    """c-spectrum: counts over pairs (p, p+k) in P x P of j = (p+k)^4 - p^4.

    The j = 0 stratum is exactly the k = 0 diagonal (k = -2p would need
    -p in P), so c_0 = |P|.
    """
    _check_key_width(P, 1)
    if len(P) > 2048:
        raise SizeLimit("spectrum_c capped at |P| <= 2048")
    p4 = P.fourth_powers
    diffs = np.subtract.outer(p4, p4).ravel()
    uv, counts = np.unique(diffs, return_counts=True)
    return SpectrumMap({int(j): int(c) for j, c in zip(uv, counts)}, "c")


def spectrum_c_star(P: PrimeSet) -> SpectrumMap:
    """c*-spectrum over (p, k1, k2) with the four-point condition.

    j is computed through the identity
        j = (p+k1+k2)^4 + p^4 - (p+k1)^4 - (p+k2)^4,
    exact in int64 within the checked key width.  The j = 0 stratum is
    exactly {k1 = 0} union {k2 = 0}: for k1 k2 != 0 the quadratic factor
    in p is positive (negative discriminant), so it cannot vanish.
    """
    top = _check_key_width(P, 4)
    if top >= _INT64_SAFE:
        raise Overflow("c* keys exceed the int64 fast path")
    if len(P) > 256:
        raise SizeLimit("spectrum_c_star capped at |P| <= 256")
    p = P.primes
    p4 = P.fourth_powers
    idx_of = {int(v): i for i, v in enumerate(p)}
    counter: Counter = Counter()
    n = p.size
    for i in range(n):
        for j_ in range(n):
            base = int(p[j_]) - int(p[i])  # k1
            s_vals = p + base  # p + k1 + k2 as r runs over P
            mask = np.isin(s_vals, p, assume_unique=True)
            if not np.any(mask):
                continue
            r_idx = np.nonzero(mask)[0]
            s_idx = np.fromiter(
                (idx_of[int(v)] for v in s_vals[r_idx]), dtype=np.int64, count=r_idx.size
            )
            ks = p4[s_idx] + p4[i] - p4[j_] - p4[r_idx]
            for jj in ks.tolist():
                counter[int(jj)] += 1
    return SpectrumMap(dict(counter), "c*")


def spectrum_c_bar(P: PrimeSet) -> SpectrumMap:
    """cbar-spectrum over (p, k1, k2, k3) with the eight-point condition.

    O(|P|^4) enumeration, accepted only for |P| <= 60.  The j = 0 stratum
    needs k1 k2 k3 = 0: the last factor 2p + k1 + k2 + k3 equals
    p + (p + k1 + k2 + k3) > 0 because both summands lie in P.
    """
    if len(P) > 60:
        raise SizeLimit("spectrum_c_bar capped at |P| <= 60")
    _check_key_width(P, 8)
    p = P.primes
    n = p.size
    pset = set(p.tolist())
    counter: Counter = Counter()
    pl = p.tolist()
    for i in range(n):
        pi = pl[i]
        for j_ in range(n):
            k1 = pl[j_] - pi
            for l in range(n):
                k2 = pl[l] - pi
                if pi + k1 + k2 not in pset:
                    continue
                # vector over k3 = p[m] - pi
                k3 = p - pi
                ok = (
                    np.isin(p + k1, p, assume_unique=True)
                    & np.isin(p + k2, p, assume_unique=True)
                    & np.isin(p + k1 + k2, p, assume_unique=True)
                )
                js = 12 * k1 * k2 * k3[ok] * (2 * pi + k1 + k2 + k3[ok])
                for jj in js.tolist():
                    counter[int(jj)] += 1
    return SpectrumMap(dict(counter), "cbar")


_MOMENT_SIZE_CAPS = {1: 100000, 2: 4096, 4: 64, 8: 12}


def exact_moment(P: PrimeSet, m: int) -> int:
    """integral_0^1 |S(t)|**(2m) dt as an exact integer: sum_s r_m(s)**2
    over the m-fold ordered sum spectrum.  No floating point anywhere."""
    if m not in (1, 2, 4, 8):
        raise ValueError("m must be one of 1, 2, 4, 8")
    if len(P) > _MOMENT_SIZE_CAPS[m]:
        raise SizeLimit(f"exact_moment(m={m}) capped at |P| <= {_MOMENT_SIZE_CAPS[m]}")
    _check_key_width(P, m)
    vals, counts = _sum_spectrum(P, m)
    return int(sum(int(c) * int(c) for c in counts))


def quadrature_moment(
    P: PrimeSet, m: int, max_samples: int = 400_000_000, threads: int = 1
) -> float:
    """Sampling oracle (1/M) sum_{i<M} |S(i/M)|**(2m) with M = 2m*maxp^4+1.

    Exact for the trigonometric polynomial |S|^(2m) because M exceeds twice
    its maximal frequency; independent of the counting route.  Chunk sums
    are combined in fixed order, so the value is thread-count independent."""
    from .parallel import map_chunks

    if len(P) == 0:
        return 0.0
    maxp4 = int(P.primes[-1]) ** 4
    M = 2 * m * maxp4 + 1
    if M > max_samples:
        raise SizeLimit(f"quadrature oracle needs {M} samples > cap {max_samples}")
    p4 = P.fourth_powers.astype(np.float64) % M
    chunk = 1 << 20

    def work(start):
        idx = np.arange(start, min(start + chunk, M), dtype=np.float64)
        ang = (2.0 * math.pi / M) * np.outer(idx, p4)
        s_re = np.cos(ang).sum(axis=1)
        s_im = np.sin(ang).sum(axis=1)
        return float(np.sum((s_re**2 + s_im**2) ** m))

    partials = map_chunks(work, range(0, M, chunk), threads)
    return math.fsum(partials) / M


def shift_counts(P: PrimeSet):
    """Exact Cauchy factors of the moment chain: K1 is the number of
    distinct shifts k with a nonempty {p : p, p+k in P} stratum, K2 the
    number of distinct (k1, k2) pairs with a nonempty four-point stratum.

    The pointwise bounds |S|^4 <= K1 * sum_j c*_j e(tj) and
    |S|^8 <= K1^2 K2 * sum_j cbar_j e(tj) hold with these constants;
    the idealized replacements K1 -> |P|, K1^2 K2 -> |P|^4 do not hold
    at desk scale (distinct prime differences outnumber |P| here).
    """
    pl = P.primes.tolist()
    pset = set(pl)
    K1 = len({q - p for p in pl for q in pl})
    K2 = len({(q - p, r - p) for p in pl for q in pl for r in pl if q + r - p in pset})
    return K1, K2


@dataclass(frozen=True)
class ScalingRow:
    size: int
    max_prime: int
    moment4: int
    moment8_bound: int | None
    moment16: int | None


@dataclass(frozen=True)
class ScalingReport:
    gamma: GammaType
    rows: tuple
    slope4: float
    slope8: float | None

    def table(self):
        return [
            (r.size, r.moment4, r.moment8_bound, r.moment16) for r in self.rows
        ]


def scaling_report(gamma: GammaType, sizes) -> ScalingReport:
    """Growth of the moment quantities against |P| (first-n PS prime sets).

    moment4 is the exact fourth moment sum_j b_j c_j = sum_s r_2(s)^2;
    moment8_bound is the Cauchy-inflated eighth-moment estimate
    |P| * sum_j b*_j c*_j (computed for |P| <= 60); moment16 is the exact
    sixteenth moment (|P| <= 12 only).  Log-log least-squares slopes are
    reported; no assertions are made here.
    """
    rows = []
    for n in sizes:
        P = PrimeSet.first_n(int(n), gamma)
        m4 = exact_moment(P, 2)
        m8 = None
        if len(P) <= 60:
            cs = spectrum_c_star(P)
            bs = spectrum_b(P, 2) if len(P) <= 64 else None
            m8 = len(P) * sum(bs[j] * c for j, c in cs.entries.items())
        m16 = exact_moment(P, 8) if len(P) <= 12 else None
        rows.append(ScalingRow(len(P), int(P.primes[-1]), m4, m8, m16))
    ls = np.log([r.size for r in rows])
    slope4 = float(np.polyfit(ls, np.log([float(r.moment4) for r in rows]), 1)[0])
    with_m8 = [r for r in rows if r.moment8_bound is not None]
    slope8 = None
    if len(with_m8) >= 2:
        slope8 = float(
            np.polyfit(
                np.log([r.size for r in with_m8]),
                np.log([float(r.moment8_bound) for r in with_m8]),
                1,
            )[0]
        )
    return ScalingReport(gamma, tuple(rows), slope4, slope8)
