"""Schedule derivation, triple solving, and the smoothed count Gamma(X).

Gamma(X) weights every PS-prime triple (p1, p2, p3) in the range
lambda0*X < p1, p2, p3^4 <= X by

    theta(l1 p1 + l2 p2 + l3 p3^4 + eta) * w(p1) w(p2) w(p3),

w(p) = p^(1-gamma) log p.  Because theta is the inverse transform of the
closed-form Theta, the same number equals the integral over t of
Theta(t) S1(l1 t) S1(l2 t) S4(l3 t) e(eta t); the solver computes both
sides: directly by a sorted-window sweep over triples, and through the
integral split at |t| = Delta and |t| = H with the tail |t| > H replaced
by its closed-form envelope bound.

The archimedean main term B(X) is evaluated in configuration space: the
t-integral of Theta * I1 * I1 * I4 * e(eta t) equals the triple integral
of theta(l1 y1 + l2 y2 + l3 y3^4 + eta) over the box, which collapses to
a one-dimensional quadrature against closed-form antiderivatives of theta
(two box-directions integrate exactly).  The oscillatory t-form is kept in
the test suite as an independent cross-check at small X.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BudgetExceeded, InadmissibleLambda0, RangeEmpty
from .expsums import pairwise_sum
from .parallel import map_chunks
from .primes import GammaType, PsPrimeTable, sieve_ps_table
from .smoothing import (
    SmoothingKernel,
    kernel_knots,
    theta,
    theta_antiderivative,
    theta_antiderivative2,
    theta_fourier,
    theta_tail_mass,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ProblemSpec:
    """Analytic inputs of one instance of the inequality.

    lambda1, lambda2, lambda3 are the nonzero coefficients (the theorem
    setting wants them not all of the same sign and lambda1/lambda2
    irrational; both are recorded, not enforced, so degenerate instances
    remain constructible for boundary tests).  theta_exp is the positive
    exponent offset in the tolerance schedule, lambda0 the lower range cut.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    eta: float
    gamma: GammaType
    theta_exp: float
    lambda0: float
    ratio_is_irrational: bool = True

    def __post_init__(self):
        if 0.0 in (self.lambda1, self.lambda2, self.lambda3):
            raise ValueError("lambda coefficients must be nonzero")
        if not (0 < self.lambda0 < 1):
            raise ValueError("lambda0 must lie in (0,1)")
        if not (self.theta_exp > 0):
            raise ValueError("theta exponent must be positive")

    @property
    def signs_not_all_same(self) -> bool:
        s = {math.copysign(1.0, v) for v in (self.lambda1, self.lambda2, self.lambda3)}
        return len(s) > 1

    @property
    def lambda0_admissibility_threshold(self) -> float:
        """min(l1/(4|l3|), l2/(4|l3|), 1/16), sign-sensitive in l1 and l2.

        For negative l1 or l2 the threshold is non-positive and no lambda0
        is admissible; that is reported, not repaired.
        """
        a3 = 4.0 * abs(self.lambda3)
        return min(self.lambda1 / a3, self.lambda2 / a3, 1.0 / 16.0)

    @property
    def lambda0_admissible(self) -> bool:
        return self.lambda0 < self.lambda0_admissibility_threshold


@dataclass(frozen=True)
class RunParams:
    """Derived schedule from a convergent denominator q0:

        X = q0^(13/6),   Delta = X^(-12/13) log X,
        eps = X^((219-220 gamma)/208 + theta),   H = log^2 X / eps,

    and the kernel order smoothing_k = max(1, floor(log X)).
    """

    q0: int
    X: float
    Delta: float
    eps: float
    H: float
    smoothing_k: int

    @property
    def kernel(self) -> SmoothingKernel:
        return SmoothingKernel(self.eps, self.smoothing_k)


def derive_params(q0: int, spec: ProblemSpec) -> RunParams:
    """Evaluate the schedule at 60 digits, return correctly rounded floats."""
    if q0 < 2:
        raise ValueError("q0 must be >= 2")
    with mp.workdps(60):
        X = mp.power(q0, mp.mpf(13) / 6)
        lnX = mp.log(X)
        Delta = mp.power(X, mp.mpf(-12) / 13) * lnX
        g = mp.mpf(spec.gamma.exact.numerator) / spec.gamma.exact.denominator
        expo = (219 - 220 * g) / 208 + mp.mpf(repr(spec.theta_exp))
        eps = mp.power(X, expo)
        H = lnX**2 / eps
        k = int(mp.floor(lnX))
    return RunParams(
        q0=q0,
        X=float(X),
        Delta=float(Delta),
        eps=float(eps),
        H=float(H),
        smoothing_k=max(1, k),
    )


@dataclass(frozen=True)
class TripleSolution:
    """One validated triple with its inequality value."""

    p1: int
    p2: int
    p3: int
    value: float


def triple_value(spec: ProblemSpec, p1: int, p2: int, p3: int) -> float:
    """Canonical float evaluation of l1 p1 + l2 p2 + l3 p3^4 + eta.

    Both the windowed solver and any brute-force enumeration must use this
    exact expression so borderline |value| ~ tol ties resolve identically.
    """
    return spec.lambda1 * p1 + spec.lambda2 * p2 + spec.lambda3 * (p3**4) + spec.eta


def _solver_tables(spec: ProblemSpec, X: float, threads: int = 1):
    t1 = sieve_ps_table(X, spec.lambda0, 1, spec.gamma, threads=threads)
    t3 = sieve_ps_table(X, spec.lambda0, 4, spec.gamma, threads=threads)
    if len(t1) == 0 or len(t3) == 0:
        raise RangeEmpty("a solver table is empty for this range")
    return t1, t3


def _window_candidates(spec: ProblemSpec, t1: PsPrimeTable, t3: PsPrimeTable, tol: float):
    """Yield (p1, p2, p3, value) for all triples with |value| < tol.

    For each (p1, p3) the admissible p2 lie in an interval of the sorted
    k=1 table; the window is padded and every candidate re-checked with
    triple_value, so the output is exactly the brute-force set.
    """
    p2s = t1.primes
    l2 = spec.lambda2
    for p1 in t1.primes.tolist():
        for p3 in t3.primes.tolist():
            c = spec.lambda1 * p1 + spec.lambda3 * (p3**4) + spec.eta
            pad = 1e-9 * (abs(c) + tol + 1.0)
            lo, hi = (-c - tol - pad) / l2, (-c + tol + pad) / l2
            if l2 < 0:
                lo, hi = hi, lo
            i0 = int(np.searchsorted(p2s, lo, side="left"))
            i1 = int(np.searchsorted(p2s, hi, side="right"))
            for p2 in p2s[i0:i1].tolist():
                v = triple_value(spec, p1, p2, p3)
                if abs(v) < tol:
                    yield p1, p2, p3, v


def find_triples(
    spec: ProblemSpec, X: float, tol: float, limit: int | None = None, threads: int = 1
):
    """All PS-prime triples in range with |l1 p1 + l2 p2 + l3 p3^4 + eta| < tol.

    Sorted by (p1, p2, p3); ``limit`` truncates the sorted list.  With no
    limit the result equals brute-force enumeration exactly.
    """
    if not (tol > 0):
        raise ValueError("tol must be positive")
    t1, t3 = _solver_tables(spec, X, threads)
    found = [
        TripleSolution(p1, p2, p3, v)
        for p1, p2, p3, v in _window_candidates(spec, t1, t3, tol)
    ]
    found.sort(key=lambda s: (s.p1, s.p2, s.p3))
    if limit is not None:
        found = found[:limit]
    return found


def gamma_direct(spec: ProblemSpec, params: RunParams, threads: int = 1) -> float:
    """Gamma(X) by direct summation over the (windowed) triple range.

    theta vanishes outside |value| < eps, so only window candidates
    contribute; weights are the table weights of the three primes.
    Always >= 0; positive iff some triple has |value| < eps.
    """
    kernel = params.kernel
    try:
        t1, t3 = _solver_tables(spec, params.X, threads)
    except RangeEmpty:
        return 0.0
    w1 = {int(p): float(w) for p, w in zip(t1.primes, t1.weights)}
    w3 = {int(p): float(w) for p, w in zip(t3.primes, t3.weights)}
    terms = [
        theta(v, kernel) * w1[p1] * w1[p2] * w3[p3]
        for p1, p2, p3, v in sorted(_window_candidates(spec, t1, t3, kernel.eps))
    ]
    if not terms:
        return 0.0
    return float(pairwise_sum(np.array(terms, dtype=np.float64)))


# ---------------------------------------------------------------------------
# Gamma via the integral decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaDecomposition:
    """Quadrature values of the |t| < Delta and Delta <= |t| <= H pieces,
    the closed-form envelope bound for the |t| > H tail, and the resulting
    enclosure for Gamma(X)."""

    gamma1: complex
    gamma2: complex
    gamma3_bound: float
    total: float
    interval: tuple
    im_diagnostic: float
    nodes_used: int

    def contains(self, value: float, slack: float = 0.0) -> bool:
        lo, hi = self.interval
        return lo - slack <= value <= hi + slack


_GL4 = leggauss(4)


def _quad_region(freq_tables, kernel, eta, lo, hi, h_max, threads):
    """Composite 4-point Gauss-Legendre of Theta(t) S S S e(eta t) over
    [lo, hi] and its mirror [-hi, -lo].

    Mirror nodes are interleaved adjacently, so the first level of the
    pairwise reduction adds each node to its reflection.  Every integrand
    factor is bitwise conjugate-symmetric under t -> -t (IEEE cos is even
    and sin odd to the bit), so the imaginary part cancels exactly unless
    a factor breaks the symmetry; a nonzero imaginary part is therefore a
    genuine defect signal, not accumulated rounding.

    freq_tables is a list of (freqs, weights) pairs, one per sum factor.
    Returns (complex integral, node count)."""
    if hi <= lo:
        return 0j, 0
    npan = max(1, int(math.ceil((hi - lo) / h_max)))
    edges = np.linspace(lo, hi, npan + 1)
    nodes4, wts4 = _GL4
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])

    chunk = 4096  # panels per work item

    def work(start):
        stop = min(start + chunk, npan)
        m = mids[start:stop]
        hws = halfs[start:stop]
        tp = (m[:, None] + hws[:, None] * nodes4[None, :]).ravel()
        t = np.empty(2 * tp.size, dtype=np.float64)
        t[0::2] = tp
        t[1::2] = -tp
        vals = theta_fourier(t, kernel).astype(np.complex128)
        for freqs, wts in freq_tables:
            ang = TWO_PI * np.outer(t, freqs)
            vals *= np.cos(ang) @ wts + 1j * (np.sin(ang) @ wts)
        ang = TWO_PI * eta * t
        vals *= np.cos(ang) + 1j * np.sin(ang)
        gwp = (hws[:, None] * wts4[None, :]).ravel()
        gw = np.empty(2 * gwp.size, dtype=np.float64)
        gw[0::2] = gwp
        gw[1::2] = gwp
        return pairwise_sum(vals * gw)

    parts = map_chunks(work, range(0, npan, chunk), threads)
    total = pairwise_sum(np.array(parts, dtype=np.complex128))
    return complex(total), 2 * 4 * npan


def gamma_via_integral(
    spec: ProblemSpec,
    params: RunParams,
    quad_budget: int = 10_000_000,
    threads: int = 1,
) -> GammaDecomposition:
    """Gamma(X) through the transform-side decomposition.

    The |t| < Delta and Delta <= |t| <= H pieces are quadrated on a
    symmetric grid with panel width 1/(8 max|l_i| X); the |t| > H piece is
    never quadrated: it is enclosed by theta_tail_mass(H) times the trivial
    bound W1*W2*W4 on |S1 S1 S4| (an over-cover of the true tail by more
    than a factor pi/2).  The imaginary part of the quadrature is reported
    as an error diagnostic; the underlying value is real.
    """
    kernel = params.kernel
    try:
        t1, t3 = _solver_tables(spec, params.X, threads)
    except RangeEmpty:
        return GammaDecomposition(0j, 0j, 0.0, 0.0, (0.0, 0.0), 0.0, 0)
    lmax = max(abs(spec.lambda1), abs(spec.lambda2), abs(spec.lambda3))
    h_max = 1.0 / (8.0 * lmax * params.X)
    npan_total = math.ceil(params.Delta / h_max) + math.ceil(
        (params.H - params.Delta) / h_max
    )
    if 8 * npan_total > quad_budget:
        raise BudgetExceeded(
            f"{8 * npan_total} nodes exceed the budget of {quad_budget}"
        )
    freq_tables = [
        (spec.lambda1 * t1.primes.astype(np.float64), t1.weights),
        (spec.lambda2 * t1.primes.astype(np.float64), t1.weights),
        (spec.lambda3 * (t3.primes**4).astype(np.float64), t3.weights),
    ]
    g1, n1 = _quad_region(
        freq_tables, kernel, spec.eta, 0.0, params.Delta, h_max, threads
    )
    g2, n2 = _quad_region(
        freq_tables, kernel, spec.eta, params.Delta, params.H, h_max, threads
    )
    w_product = t1.weight_mass * t1.weight_mass * t3.weight_mass
    g3_bound = theta_tail_mass(params.H, kernel) * w_product
    total = (g1 + g2).real
    im = abs((g1 + g2).imag)
    im_rel = im / abs(total) if total != 0.0 else im
    return GammaDecomposition(
        gamma1=g1,
        gamma2=g2,
        gamma3_bound=g3_bound,
        total=total,
        interval=(total - g3_bound, total + g3_bound),
        im_diagnostic=im_rel,
        nodes_used=n1 + n2,
    )


# ---------------------------------------------------------------------------
# Archimedean main term
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MainTermResult:
    value: float
    ratio: float  # value / (eps * X^(5/4))
    admissible: bool
    threshold: float


def _slab_mass(c: float, u1: tuple, u2: tuple, kernel: SmoothingKernel) -> float:
    """integral over the u-box of theta(u1 + u2 + c), by the trapezoid
    cross-section against the closed-form antiderivatives of theta."""
    lo1, hi1 = u1
    lo2, hi2 = u2
    len1, len2 = hi1 - lo1, hi2 - lo2
    s0 = lo1 + lo2
    s3 = hi1 + hi2
    rise = min(len1, len2)
    s1, s2 = s0 + rise, s3 - rise

    supp = kernel.eps

    def seg(m, b, za, zb):
        # integral of (m*(z-c) + b) * theta(z) over [za, zb]; theta vanishes
        # outside [-eps, eps], so clip first (kills the cancellation of
        # huge z*T(z) products against the linear tail of T2)
        za = max(za, -supp)
        zb = min(zb, supp)
        if zb <= za:
            return 0.0
        T_a = theta_antiderivative(za, kernel)
        T_b = theta_antiderivative(zb, kernel)
        int_theta = T_b - T_a
        int_ztheta = (
            zb * T_b - za * T_a - (theta_antiderivative2(zb, kernel) - theta_antiderivative2(za, kernel))
        )
        return m * int_ztheta + (b - m * c) * int_theta

    # pieces in sigma-space, mapped to z = sigma + c
    total = seg(1.0, -s0, s0 + c, s1 + c)
    total += seg(0.0, rise, s1 + c, s2 + c)
    total += seg(-1.0, s3, s2 + c, s3 + c)
    return total


_GL16 = leggauss(16)


def _adaptive_gl(f, a, b, tol, depth=0):
    nodes, wts = _GL16

    def gl(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xs = mid + half * nodes
        return half * float(np.sum(wts * np.array([f(x) for x in xs])))

    whole = gl(a, b)
    m = 0.5 * (a + b)
    split = gl(a, m) + gl(m, b)
    # second clause: stop at the rounding floor of the evaluations
    if (
        abs(split - whole) <= max(tol, 1e-13 * (abs(whole) + abs(split)))
        or depth >= 24
    ):
        return split
    return _adaptive_gl(f, a, m, tol / 2, depth + 1) + _adaptive_gl(
        f, m, b, tol / 2, depth + 1
    )


def main_term_B(spec: ProblemSpec, params: RunParams) -> MainTermResult:
    """B(X) = gamma^3 * integral Theta(t) I1(l1 t) I1(l2 t) I4(l3 t) e(eta t) dt.

    Computed in configuration space: the two linear box directions
    integrate in closed form, leaving one smooth quadrature over
    y3 in [(lambda0 X)^(1/4), X^(1/4)] with knot splitting where the
    slab touches kernel breakpoints.  Reports the normalized ratio
    B / (eps X^(5/4)); warns (and flags) when lambda0 is inadmissible for
    the positivity guarantee.
    """
    admissible = spec.lambda0_admissible
    if not admissible:
        warnings.warn(
            "lambda0 fails the main-term admissibility condition; "
            "B(X) is computed but the positivity guarantee does not apply",
            InadmissibleLambda0,
        )
    kernel = params.kernel
    X = params.X
    A, Bnd = spec.lambda0 * X, X
    u1 = tuple(sorted((spec.lambda1 * A, spec.lambda1 * Bnd)))
    u2 = tuple(sorted((spec.lambda2 * A, spec.lambda2 * Bnd)))
    y3_lo, y3_hi = A ** 0.25, Bnd ** 0.25
    jac = 1.0 / (abs(spec.lambda1) * abs(spec.lambda2))

    def integrand(y3):
        c = spec.lambda3 * y3**4 + spec.eta
        return _slab_mass(c, u1, u2, kernel) * jac

    # split the y3 range where the slab argument crosses kernel knots
    sigma_breaks = (
        u1[0] + u2[0],
        u1[0] + u2[1],
        u1[1] + u2[0],
        u1[1] + u2[1],
    )
    cuts = {y3_lo, y3_hi}
    for knot in kernel_knots(kernel):
        for sb in sigma_breaks:
            c_star = knot - sb  # c value where a corner crosses this knot
            arg = (c_star - spec.eta) / spec.lambda3
            if arg > 0:
                y = arg**0.25
                if y3_lo < y < y3_hi:
                    cuts.add(y)
    cuts = sorted(cuts)
    scale = kernel.eps * (y3_hi - y3_lo) * jac  # crude magnitude for tolerance
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += _adaptive_gl(integrand, lo, hi, tol=1e-12 * max(scale, 1e-30))
    value = spec.gamma.value**3 * total
    ratio = value / (params.eps * X**1.25)
    return MainTermResult(
        value=value,
        ratio=ratio,
        admissible=admissible,
        threshold=spec.lambda0_admissibility_threshold,
    )
