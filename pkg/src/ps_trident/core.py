"""Guarded elementary functions shared by every other module.

Everything here is either exact or carries an explicit error radius:
the sawtooth psi(t) = {t} - 1/2, the unit exponential e(t) = exp(2*pi*i*t),
floors of real powers certified against near-integer ambiguity,
continued-fraction convergents with interval certification, and the
ordered-factorization counts tau_k.

All logarithms in this package are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import (
    AmbiguousFloor,
    PrecisionExhausted,
    RationalTerminated,
    ZeroArgument,
)

TWO_PI = 2.0 * math.pi

# Relative guard per unit of log(base); see floor_powers.  2**-53 is one
# double ulp; the factor 8 covers libm pow slop plus the rounded exponent.
_GUARD_UNIT = 8.0 * 2.0**-53


def psi(t: float) -> float:
    """Sawtooth {t} - 1/2, valued in [-1/2, 1/2)."""
    return (t - math.floor(t)) - 0.5


def unit_exp(t: float) -> complex:
    """e(t) = exp(2*pi*i*t).

    The argument is reduced mod 1 before evaluation; the reduction
    t - floor(t) is exact in IEEE double, so integer shifts of t with an
    exactly representable t+n give bit-identical results.
    """
    u = t - math.floor(t)
    a = TWO_PI * u
    return complex(math.cos(a), math.sin(a))


# ---------------------------------------------------------------------------
# Guarded floors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GuardedReal:
    """A float together with a certified absolute-error radius.

    Downstream floor / fractional-part calls must reject values whose
    distance to the nearest integer does not exceed the guard.
    """

    value: float
    guard: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("GuardedReal value must be finite")
        if not (self.guard >= 0.0):
            raise ValueError("GuardedReal guard must be non-negative")


def guarded_floor(x: GuardedReal) -> int:
    """Floor of x.value, certified correct because no integer can hide in
    the guard band.

    Raises AmbiguousFloor when the band [value-guard, value+guard] contains
    an integer; the caller must escalate precision and retry.
    """
    nearest = round(x.value)
    if abs(x.value - nearest) <= x.guard:
        raise AmbiguousFloor(
            f"floor({x.value!r}) ambiguous: integer {nearest} within guard {x.guard!r}"
        )
    return math.floor(x.value)


def _integer_root(n: int, k: int) -> int:
    """Largest r with r**k <= n (n >= 0, k >= 1).  Exact integer arithmetic."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1) or k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    r = max(r, 1)
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _power_floor_slow(base: int, exponent: Fraction):
    """Certified (floor, frac, exact) of base**exponent by escalation.

    Exact rational powers are detected first: base**(a/b) is an integer
    iff base is a perfect b-th power (a/b in lowest terms).  Otherwise the
    power is evaluated at doubling precision (three escalations) until the
    guard band clears.
    """
    num, den = exponent.numerator, exponent.denominator
    if den > 1:
        r = _integer_root(base, den)
        if r**den == base:
            v = r**num
            return int(v), 0.0, True
    else:
        return int(base**num), 0.0, True

    dps = 40
    for _ in range(4):
        with mp.workdps(dps):
            v = mp.power(base, mp.mpf(num) / den)
            fl = mp.floor(v)
            dist = abs(v - mp.nint(v))
            guard = abs(v) * mp.mpf(10) ** (8 - dps)
            if dist > guard:
                return int(fl), float(v - fl), False
        dps *= 2
    raise AmbiguousFloor(
        f"{base}**({num}/{den}) within guard of an integer at {dps // 2} digits"
    )


def floor_power(base: int, exponent: Fraction) -> int:
    """Certified floor(base**exponent) for integer base >= 1, exponent > 0."""
    fl, _, _ = power_floor_frac(base, exponent)
    return fl


def power_floor_frac(base: int, exponent: Fraction):
    """(floor, frac, exact) of base**exponent with a certified floor.

    ``exact`` is True when base**exponent is exactly the integer ``floor``
    (possible only when base is a perfect power matching the exponent's
    denominator), in which case frac == 0.0.
    """
    if base < 1:
        raise ValueError("base must be a positive integer")
    g = float(exponent)
    v = base**g if base > 0 else 0.0
    guard = v * _GUARD_UNIT * (8.0 + math.log(base) if base > 1 else 8.0)
    nearest = round(v)
    if abs(v - nearest) <= guard:
        return _power_floor_slow(base, exponent)
    fl = math.floor(v)
    return fl, v - fl, False


def floor_powers(bases, exponent: Fraction, with_frac: bool = False):
    """Vectorised certified floors of bases**exponent.

    Returns (floors, exact_mask) or, with ``with_frac``, a triple
    (floors, fracs, exact_mask).  Entries whose double-precision value
    lands within the guard band of an integer are re-resolved one by one
    through the escalation ladder; exact integer powers are detected there
    and reported in ``exact_mask``.
    """
    b = np.asarray(bases, dtype=np.int64)
    bf = b.astype(np.float64)
    g = float(exponent)
    v = np.power(bf, g)
    guard = v * (_GUARD_UNIT * (8.0 + np.log(np.maximum(bf, 2.0))))
    dist = np.abs(v - np.rint(v))
    floors = np.floor(v).astype(np.int64)
    exact = np.zeros(b.shape, dtype=bool)
    fracs = v - floors if with_frac else None
    risky = np.nonzero(dist <= guard)[0]
    for i in risky:
        fl, fr, ex = _power_floor_slow(int(b[i]), exponent)
        floors[i] = fl
        exact[i] = ex
        if with_frac:
            fracs[i] = fr
    if with_frac:
        return floors, fracs, exact
    return floors, exact


# ---------------------------------------------------------------------------
# Continued fractions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Convergent:
    """Best rational approximation a/q from a continued-fraction expansion."""

    a: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(abs(self.a), self.q) != 1:
            raise ValueError("convergent must be in lowest terms")

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)

    def __str__(self):
        return f"{self.a}/{self.q}"


def _mpf_to_fraction(v) -> Fraction:
    sign, man, exp, _ = v._mpf_
    man, exp = int(man), int(exp)  # may be gmpy2 types
    if man == 0:
        return Fraction(0)
    f = Fraction(man) * Fraction(2) ** exp
    return -f if sign else f


def _rational_convergents(x: Fraction, n: int):
    """Exact expansion of a rational; raises RationalTerminated if it ends
    before n terms (the exception carries the full finite sequence)."""
    out = []
    h1, h2 = 1, 0
    k1, k2 = 0, 1
    p, q = x.numerator, x.denominator
    for _ in range(n):
        a, r = divmod(p, q)
        h1, h2 = a * h1 + h2, h1
        k1, k2 = a * k1 + k2, k1
        out.append(Convergent(h1, k1))
        if r == 0:
            if len(out) < n:
                raise RationalTerminated(
                    f"expansion of {x} has only {len(out)} convergents", out
                )
            return out
        p, q = q, r
    return out


def _interval_convergents(lo: Fraction, hi: Fraction, n: int):
    """Convergents certified from an exact rational enclosure [lo, hi]."""
    out = []
    h1, h2 = 1, 0
    k1, k2 = 0, 1
    for _ in range(n):
        a_lo = lo.numerator // lo.denominator
        a_hi = hi.numerator // hi.denominator
        if a_lo != a_hi:
            raise PrecisionExhausted(
                f"partial quotient uncertain after {len(out)} convergents", out
            )
        a = a_lo
        h1, h2 = a * h1 + h2, h1
        k1, k2 = a * k1 + k2, k1
        out.append(Convergent(h1, k1))
        flo, fhi = lo - a, hi - a
        if flo <= 0:
            raise PrecisionExhausted(
                f"enclosure touches a rational after {len(out)} convergents", out
            )
        lo, hi = 1 / fhi, 1 / flo
    return out


def _parse_value_string(s: str):
    """Parse 'sqrt:D' or a decimal literal.

    Returns ('surd', D) or ('decimal', Fraction, radius) where the radius is
    half an ulp of the last printed digit.
    """
    s = s.strip()
    if s.lower().startswith("sqrt:"):
        d = int(s[5:])
        if d <= 0:
            raise ValueError("sqrt argument must be a positive integer")
        return ("surd", d)
    val = Fraction(s)
    if "." in s:
        ndig = len(s.split(".", 1)[1])
        rad = Fraction(1, 2 * 10**ndig)
    else:
        rad = Fraction(0)
    return ("decimal", val, rad)


def cf_convergents(x, n: int):
    """First n continued-fraction convergents of x, certified.

    Accepted inputs:
      * Fraction / int: exact expansion (RationalTerminated if it is shorter
        than n; the exception carries the finite sequence);
      * float: treated as an approximation with a half-ulp radius;
      * mpmath.mpf: approximation with a 2-ulp radius at its precision;
      * str 'sqrt:D': certified surd, precision escalated as needed;
      * str decimal literal: approximation with half an ulp of the last digit.

    Every returned convergent a/q satisfies |x - a/q| < 1/q**2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(x, (Fraction, int)):
        return _rational_convergents(Fraction(x), n)
    if isinstance(x, float):
        rad = Fraction(math.ulp(x)) / 2
        v = Fraction(x)
        return _interval_convergents(v - rad, v + rad, n)
    if isinstance(x, mp.mpf):
        v = _mpf_to_fraction(x)
        rad = abs(v) * Fraction(2) ** (2 - mp.mp.prec)
        return _interval_convergents(v - rad, v + rad, n)
    if isinstance(x, str):
        parsed = _parse_value_string(x)
        if parsed[0] == "decimal":
            _, v, rad = parsed
            if rad == 0:
                return _rational_convergents(v, n)
            return _interval_convergents(v - rad, v + rad, n)
        d = parsed[1]
        r = _integer_root(d, 2)
        if r * r == d:
            return _rational_convergents(Fraction(r), n)
        digits = max(30, 4 * n + 10)
        last = None
        for _ in range(4):
            with mp.workdps(digits):
                v = _mpf_to_fraction(mp.sqrt(d))
                rad = abs(v) * Fraction(2) ** (2 - mp.mp.prec)
            try:
                return _interval_convergents(v - rad, v + rad, n)
            except PrecisionExhausted as exc:
                last = exc
                digits *= 2
        raise last
    raise TypeError(f"unsupported value type {type(x)!r}")


# ---------------------------------------------------------------------------
# Primality and ordered-factorization counts
# ---------------------------------------------------------------------------

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (valid below 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Brent's cycle variant of Pollard rho; returns a nontrivial factor."""
    if n % 2 == 0:
        return 2
    import random

    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict:
    """Prime factorization of n >= 1 as {prime: exponent}."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = m
        i = 17
        # cheap trial division before rho
        while i * i <= m and i < 10000:
            if m % i == 0:
                d = i
                break
            i += 2
        if d == m:
            d = _pollard_brent(m)
        stack.append(d)
        stack.append(m // d)
    return out


def divisor_tau(j: int, k: int) -> int:
    """Number of ordered k-tuples of naturals with product |j|.

    Multiplicative: tau_k(prod p**e) = prod C(e+k-1, k-1).
    """
    if j == 0:
        raise ZeroArgument("tau_k is undefined at 0")
    if k < 2:
        raise ValueError("order k must be >= 2")
    n = abs(j)
    total = 1
    for e in factorize(n).values():
        total *= math.comb(e + k - 1, k - 1)
    return total
