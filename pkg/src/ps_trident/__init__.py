"""ps-trident: desk-scale numerics for a three-prime Diophantine inequality
over Piatetski-Shapiro primes.

Subpackages map one-to-one onto the computable objects: guarded elementary
functions (core), PS-prime tables (primes), the compactly supported
smoothing kernel and its Fourier transform (smoothing), weighted
exponential sums and oscillatory integrals (expsums), representation-count
spectra and moment identities (moments), and the smoothed triple-count
solver (solver).
"""

__version__ = "0.1.0"

from .primes import GammaType, PsPrimeTable, is_ps_prime, sieve_ps_table  # noqa: E402,F401
from .smoothing import SmoothingKernel, theta, theta_fourier  # noqa: E402,F401
from .expsums import ExpSumSpec, decompose_s4, eval_I, eval_sum  # noqa: E402,F401
from .moments import PrimeSet, SpectrumMap, exact_moment  # noqa: E402,F401
from .solver import (  # noqa: E402,F401
    ProblemSpec,
    RunParams,
    TripleSolution,
    derive_params,
    find_triples,
    gamma_direct,
    gamma_via_integral,
    main_term_B,
)
