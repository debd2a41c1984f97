"""Compactly supported smoothing kernel and its Fourier transform.

The kernel theta is the indicator of [-a, a], a = 7*eps/8, convolved with
the k-fold self-convolution of the unit-mass box of width w = eps/(4*k).
Consequences, all exercised by tests:

  * theta = 1 on [-3*eps/4, 3*eps/4], 0 < theta < 1 on the ramps,
    theta = 0 outside (-eps, eps);
  * the transform has the closed form
        Theta(x) = sin(2*pi*a*x)/(pi*x) * (sin(pi*w*x)/(pi*w*x))**k
    with Theta(0) = 2*a = 7*eps/4;
  * |Theta(x)| <= min(7*eps/4, 1/(pi*|x|), (1/(pi*|x|)) * (4*k/(pi*eps*|x|))**k).

theta is evaluated through the piecewise-polynomial CDF of a sum of k
independent uniforms (exact for k <= 12, arbitrary precision above), with
tail-side complements so the strict ramp inequalities survive in floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

_EXACT_CDF_MAX_K = 12


@dataclass(frozen=True)
class SmoothingKernel:
    """Support parameter eps > 0 and smoothness order k >= 1.

    Derived geometry: half-width a = 7*eps/8 of the inner indicator and
    box width w = eps/(4*k), so the plateau edge lands exactly at 3*eps/4
    and the support edge exactly at eps.
    """

    eps: float
    k: int

    def __post_init__(self):
        if not (self.eps > 0):
            raise ValueError("eps must be positive")
        if self.k < 1:
            raise ValueError("k must be a positive integer")

    @property
    def a(self) -> float:
        return 7.0 * self.eps / 8.0

    @property
    def w(self) -> float:
        return self.eps / (4.0 * self.k)


@lru_cache(maxsize=64)
def _ih_coeffs(k: int):
    """(-1)^j * C(k,j) / k! for the Irwin-Hall CDF, j = 0..k."""
    fact = math.factorial(k)
    return tuple(((-1) ** j) * math.comb(k, j) / fact for j in range(k + 1))


def _ih_cdf_mp(x: float, k: int) -> float:
    with mp.workdps(40 + 2 * k):
        fact = mp.factorial(k)
        acc = mp.mpf(0)
        xm = mp.mpf(x)
        for j in range(min(int(math.floor(x)), k) + 1):
            acc += (-1) ** j * mp.binomial(k, j) * (xm - j) ** k
        return float(acc / fact)


def _box_sum_cdf(s: float, kernel: SmoothingKernel) -> float:
    """CDF at s of a sum of k uniforms on [-w/2, w/2].

    Evaluated in whichever tail is shorter and mirrored, so values close to
    0 or 1 keep full relative accuracy (needed for the strict 0 < theta < 1
    ramp inequalities).  The k <= 12 branch shares the vectorised term
    evaluation so scalar and array paths agree to the bit.
    """
    k, w = kernel.k, kernel.w
    x = s / w + k / 2.0
    if x <= 0.0:
        return 0.0
    if x >= k:
        return 1.0
    if k > _EXACT_CDF_MAX_K:
        if x <= k / 2.0:
            return _ih_cdf_mp(x, k)
        return 1.0 - _ih_cdf_mp(k - x, k)
    if x <= k / 2.0:
        return float(_ih_cdf_raw_vec(np.array([x]), k)[0])
    return 1.0 - float(_ih_cdf_raw_vec(np.array([k - x]), k)[0])


def theta(y: float, kernel: SmoothingKernel) -> float:
    """Smoothed indicator of |y| < eps: the three-regime bump of the kernel."""
    ay = abs(y)
    eps = kernel.eps
    if ay >= eps:
        return 0.0
    if ay <= 0.75 * eps:
        return 1.0
    # ramp: G(y + a) == 1 there, so theta = 1 - G(y - a) = G(a - y)
    return _box_sum_cdf(kernel.a - ay, kernel)


def _ih_cdf_raw_vec(x: np.ndarray, k: int) -> np.ndarray:
    """Vectorised Irwin-Hall CDF on [0, k/2] inputs (callers mirror)."""
    coeffs = _ih_coeffs(k)
    acc = np.zeros_like(x)
    for j in range(k + 1):
        mask = x >= j
        if not np.any(mask):
            break
        acc[mask] += coeffs[j] * (x[mask] - j) ** k
    return acc


def theta_many(ys, kernel: SmoothingKernel) -> np.ndarray:
    """Vectorised theta; identical values to the scalar path for k <= 12."""
    ys = np.abs(np.asarray(ys, dtype=np.float64))
    eps, a, w, k = kernel.eps, kernel.a, kernel.w, kernel.k
    if k > _EXACT_CDF_MAX_K:
        flat = ys.ravel()
        out = np.fromiter(
            (theta(float(y), kernel) for y in flat), dtype=np.float64, count=flat.size
        )
        return out.reshape(ys.shape)
    out = np.zeros(ys.shape, dtype=np.float64)
    out[ys <= 0.75 * eps] = 1.0
    ramp = (ys > 0.75 * eps) & (ys < eps)
    if np.any(ramp):
        x = (a - ys[ramp]) / w + k / 2.0
        x = np.clip(x, 0.0, float(k))
        low = x <= k / 2.0
        vals = np.empty(x.shape, dtype=np.float64)
        vals[low] = _ih_cdf_raw_vec(x[low], k)
        vals[~low] = 1.0 - _ih_cdf_raw_vec(k - x[~low], k)
        out[ramp] = vals
    return out


def theta_fourier(x, kernel: SmoothingKernel):
    """Closed-form transform: 2a * sinc(2ax) * sinc(wx)**k (sinc normalized).

    Real, even, with the removable singularity at 0 evaluating to 7*eps/4.
    Accepts scalars or arrays.
    """
    a, w, k = kernel.a, kernel.w, kernel.k
    xs = np.asarray(x, dtype=np.float64)
    val = 2.0 * a * np.sinc(2.0 * a * xs) * np.sinc(w * xs) ** k
    if np.ndim(x) == 0:
        return float(val)
    return val


def theta_fourier_bound(x, kernel: SmoothingKernel):
    """min(7eps/4, 1/(pi|x|), (1/(pi|x|)) (4k/(pi eps |x|))**k), the decay
    envelope of the transform."""
    eps, k = kernel.eps, kernel.k
    xs = np.abs(np.asarray(x, dtype=np.float64))
    with np.errstate(divide="ignore", over="ignore"):
        b1 = np.full(xs.shape, 7.0 * eps / 4.0)
        b2 = 1.0 / (np.pi * xs)
        b3 = b2 * (4.0 * k / (np.pi * eps * xs)) ** k
        out = np.minimum(b1, np.minimum(b2, b3))
    if np.ndim(x) == 0:
        return float(out)
    return out


def theta_tail_mass(T: float, kernel: SmoothingKernel) -> float:
    """Closed form of the tail integral of the decay envelope:

        integral_T^inf (1/t) * (4k/(pi*eps*t))**k dt = (1/k) (4k/(pi*eps*T))**k

    Used to replace the |t| > T part of the inversion integral by a bound.
    """
    if not (T > 0):
        raise ValueError("T must be positive")
    k, eps = kernel.k, kernel.eps
    return (1.0 / k) * (4.0 * k / (math.pi * eps * T)) ** k


# ---------------------------------------------------------------------------
# Antiderivatives (closed form, used by the archimedean main term)
# ---------------------------------------------------------------------------


def _ih_int1(x: float, k: int) -> float:
    """integral_0^x F_IH(s) ds; x clamped into [0, k] by the callers."""
    fact = math.factorial(k + 1)
    acc = 0.0
    for j in range(min(int(math.floor(x)), k) + 1):
        acc += (-1) ** j * math.comb(k, j) * (x - j) ** (k + 1)
    return acc / fact


def _ih_int2(x: float, k: int) -> float:
    """Double integral of F_IH from 0."""
    fact = math.factorial(k + 2)
    acc = 0.0
    for j in range(min(int(math.floor(x)), k) + 1):
        acc += (-1) ** j * math.comb(k, j) * (x - j) ** (k + 2)
    return acc / fact


def theta_antiderivative(y: float, kernel: SmoothingKernel) -> float:
    """T(y) = integral_{-inf}^{y} theta(u) du.

    T(-eps) = 0 and T(eps) = Theta(0) = 7*eps/4 (the full mass).
    """
    a, w, k = kernel.a, kernel.w, kernel.k

    def Ghat(s):  # integral of the box-sum CDF from -inf to s
        x = s / w + k / 2.0
        if x <= 0.0:
            return 0.0
        if x >= k:
            return w * (_ih_int1(k, k) + (x - k))
        return w * _ih_int1(x, k)

    return Ghat(y + a) - Ghat(y - a)


def theta_antiderivative2(y: float, kernel: SmoothingKernel) -> float:
    """Second antiderivative of theta (constants fixed at -inf)."""
    a, w, k = kernel.a, kernel.w, kernel.k
    i1k = _ih_int1(k, k)
    i2k = _ih_int2(k, k)

    def Ghat2(s):
        x = s / w + k / 2.0
        if x <= 0.0:
            return 0.0
        if x >= k:
            d = x - k
            return w * w * (i2k + i1k * d + 0.5 * d * d)
        return w * w * _ih_int2(x, k)

    return Ghat2(y + a) - Ghat2(y - a)


def kernel_knots(kernel: SmoothingKernel) -> np.ndarray:
    """All breakpoints of the piecewise-polynomial theta, ascending."""
    a, w, k = kernel.a, kernel.w, kernel.k
    js = np.arange(k + 1, dtype=np.float64)
    inner = (js - k / 2.0) * w
    knots = np.concatenate([inner - a, inner + a])
    return np.unique(knots)
