"""Piatetski-Shapiro primes of type gamma: membership, sieving, density.

A prime p is a Piatetski-Shapiro (PS) prime of type gamma in (0,1) when
p = floor(n**(1/gamma)) for some natural n, equivalently when the interval
[p**gamma, (p+1)**gamma) contains an integer.  Membership is decided on the
p-side with guarded floors (O(1) per candidate); the n-side enumeration is
kept as an independent oracle for the dual-enumeration checks.

Tables carry the summation weight p**(1-gamma) * log(p) used by the
weighted exponential sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import RangeEmpty
from .core import floor_powers, power_floor_frac
from .parallel import map_chunks


def _to_exact_fraction(g) -> Fraction:
    if isinstance(g, Fraction):
        return g
    if isinstance(g, str):
        return Fraction(g)
    if isinstance(g, float):
        # repr is the shortest decimal that round-trips, so 0.9 means 9/10
        return Fraction(repr(g))
    if isinstance(g, int):
        return Fraction(g)
    raise TypeError(f"unsupported gamma type {type(g)!r}")


class GammaType:
    """Type parameter gamma in (0,1) for floor primes p = [n**(1/gamma)].

    Floats are interpreted through their shortest decimal representation
    (0.9 means nine tenths); pass a Fraction for exact control.  The flags
    are informational: generation works for any gamma in (0,1).
    """

    __slots__ = ("value", "exact")

    THEOREM_LOWER = Fraction(219, 220)
    DENSITY_LOWER = Fraction(2426, 2817)

    def __init__(self, gamma):
        exact = _to_exact_fraction(gamma.exact if isinstance(gamma, GammaType) else gamma)
        if not (0 < exact < 1):
            raise ValueError("gamma must lie strictly inside (0, 1)")
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "value", float(exact))

    @property
    def in_theorem_range(self) -> bool:
        return self.THEOREM_LOWER < self.exact < 1

    @property
    def in_density_range(self) -> bool:
        return self.DENSITY_LOWER < self.exact < 1

    @property
    def inverse(self) -> Fraction:
        return 1 / self.exact

    def __setattr__(self, *a):
        raise AttributeError("GammaType is immutable")

    def __eq__(self, other):
        return isinstance(other, GammaType) and self.exact == other.exact

    def __hash__(self):
        return hash(("GammaType", self.exact))

    def __repr__(self):
        return f"GammaType({self.value})"


# ---------------------------------------------------------------------------
# Plain prime generation (segmented sieve)
# ---------------------------------------------------------------------------

_SEGMENT = 1 << 21


def _simple_sieve_flags(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def primes_upto(n: int, threads: int = 1) -> np.ndarray:
    """All primes <= n as an int64 array (segmented sieve)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    if n <= _SEGMENT:
        return np.flatnonzero(_simple_sieve_flags(n)).astype(np.int64)
    return primes_in_range(2, n, threads=threads)


def primes_in_range(lo: int, hi: int, threads: int = 1) -> np.ndarray:
    """All primes p with lo <= p <= hi, ascending."""
    if hi < 2 or hi < lo:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 2)
    base = np.flatnonzero(_simple_sieve_flags(math.isqrt(hi))).astype(np.int64)

    starts = list(range(lo, hi + 1, _SEGMENT))

    def sieve_segment(seg_lo):
        seg_hi = min(seg_lo + _SEGMENT - 1, hi)
        size = seg_hi - seg_lo + 1
        flags = np.ones(size, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, ((seg_lo + p - 1) // p) * p)
            if start > seg_hi:
                continue
            flags[start - seg_lo :: p] = False
        if seg_lo <= 1:
            flags[: min(size, 2 - seg_lo)] = False
        return (seg_lo + np.flatnonzero(flags)).astype(np.int64)

    parts = map_chunks(sieve_segment, starts, threads)
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# PS membership
# ---------------------------------------------------------------------------


def ps_mask(primes: np.ndarray, gamma: GammaType) -> np.ndarray:
    """Boolean mask: which entries are PS primes of the given type.

    Decides whether [p**gamma, (p+1)**gamma) contains an integer.  p**gamma
    is never an integer for prime p and rational gamma in (0,1), so the count
    is floor_open((p+1)**gamma) - floor(p**gamma), where the upper floor is
    decremented when (p+1)**gamma is exactly an integer (open endpoint).
    """
    p = np.asarray(primes, dtype=np.int64)
    if p.size == 0:
        return np.zeros(0, dtype=bool)
    g = gamma.exact
    f0, _ = floor_powers(p, g)
    f1, exact1 = floor_powers(p + 1, g)
    hi = np.where(exact1, f1 - 1, f1)
    return hi > f0


def is_ps_prime(p: int, gamma: GammaType) -> bool:
    """True iff p = floor(n**(1/gamma)) for some natural n (p must be prime)."""
    from .core import is_prime

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    f0, _, _ = power_floor_frac(p, gamma.exact)
    f1, _, exact1 = power_floor_frac(p + 1, gamma.exact)
    hi = f1 - 1 if exact1 else f1
    return hi > f0


def n_side_ps_primes(X: float, gamma: GammaType) -> np.ndarray:
    """Oracle enumeration {floor(n**(1/gamma)) : n <= ceil(X**gamma)+1}
    intersected with the primes in [2, X].  Independent of ps_mask."""
    if X < 2:
        return np.empty(0, dtype=np.int64)
    n_max = math.ceil(X**gamma.value) + 1
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    vals, _ = floor_powers(ns, gamma.inverse)
    vals = np.unique(vals)
    vals = vals[(vals >= 2) & (vals <= math.floor(X))]
    if vals.size == 0:
        return vals
    flags = _prime_flags_for(vals)
    return vals[flags]


def _prime_flags_for(vals: np.ndarray) -> np.ndarray:
    hi = int(vals.max())
    if hi <= 50_000_000:
        return _simple_sieve_flags(hi)[vals]
    from .core import is_prime

    return np.fromiter((is_prime(int(v)) for v in vals), dtype=bool, count=vals.size)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsPrimeTable:
    """Sorted PS primes p with lower < p**k <= upper, plus summation weights.

    The range convention is strict at the lower end and inclusive at the
    upper end.  Weights are p**(1-gamma) * log(p).
    """

    gamma: GammaType
    k: int
    lower: float
    upper: float
    primes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.primes.size)

    @property
    def weight_mass(self) -> float:
        """Sum of all weights (the t=0 value of the associated sum)."""
        return float(np.sum(self.weights))


def power_range_bounds(X: float, lambda0: float, k: int):
    """Integer bounds [p_lo, p_hi] of {p : lambda0*X < p**k <= X}.

    Raises RangeEmpty when no integer lies in the range.
    """
    if X < 1:
        raise RangeEmpty(f"upper bound {X} below 1")
    if not (0 < lambda0 < 1):
        raise ValueError("lambda0 must lie in (0, 1)")
    lo_real = lambda0 * X
    p_hi = math.floor(X ** (1.0 / k))
    while (p_hi + 1) ** k <= X:
        p_hi += 1
    while p_hi >= 1 and p_hi**k > X:
        p_hi -= 1
    p_lo = math.floor(lo_real ** (1.0 / k)) + 1 if lo_real >= 1 else 1
    while p_lo > 1 and (p_lo - 1) ** k > lo_real:
        p_lo -= 1
    while p_lo**k <= lo_real:
        p_lo += 1
    if p_lo > p_hi:
        raise RangeEmpty(f"no integer p with {lo_real} < p**{k} <= {X}")
    return p_lo, p_hi


def sieve_ps_table(
    X: float, lambda0: float, k: int, gamma: GammaType, threads: int = 1
) -> PsPrimeTable:
    """Complete table of PS primes with lambda0*X < p**k <= X.

    The table may be empty (no PS prime in a nonempty integer range);
    RangeEmpty is raised only when no integer at all satisfies the range.
    """
    p_lo, p_hi = power_range_bounds(X, lambda0, k)
    ps = primes_in_range(max(p_lo, 2), p_hi, threads=threads)
    if ps.size:
        ps = ps[ps_mask(ps, gamma)]
    w = _weights(ps, gamma)
    return PsPrimeTable(
        gamma=gamma, k=k, lower=lambda0 * X, upper=float(X), primes=ps, weights=w
    )


def _weights(ps: np.ndarray, gamma: GammaType) -> np.ndarray:
    if ps.size == 0:
        return np.empty(0, dtype=np.float64)
    pf = ps.astype(np.float64)
    return np.power(pf, 1.0 - gamma.value) * np.log(pf)


def ps_primes_upto(X: float, gamma: GammaType, threads: int = 1) -> np.ndarray:
    """The set {p <= X : p PS of type gamma} as a sorted int64 array."""
    ps = primes_upto(math.floor(X), threads=threads)
    if ps.size == 0:
        return ps
    return ps[ps_mask(ps, gamma)]


def first_n_ps_primes(n: int, gamma: GammaType) -> np.ndarray:
    """The n smallest PS primes of the given type."""
    bound = 64
    while True:
        ps = ps_primes_upto(bound, gamma)
        if ps.size >= n:
            return ps[:n]
        bound *= 4


def density_report(x_list, gamma: GammaType, threads: int = 1):
    """Rows (X, count, ratio) with ratio = count * log(X) / X**gamma.

    The counting-function comparison behind the classical PS density
    asymptotic; report only, no thresholding here.
    """
    xs = sorted(float(x) for x in x_list)
    if any(x < 100 for x in xs):
        raise ValueError("density_report expects X >= 100")
    top = math.floor(xs[-1])
    primes = primes_upto(top, threads=threads)
    mask = ps_mask(primes, gamma)
    ps = primes[mask]
    rows = []
    for x in xs:
        count = int(np.searchsorted(ps, math.floor(x), side="right"))
        ratio = count * math.log(x) / (x**gamma.value)
        rows.append((x, count, ratio))
    return rows
