"""Convolution singular integrals built on probability-density kernels.

Kernels, their Fourier symbols, two independent convolution evaluators,
the Jackson-type combinations, finite-difference PDE certification and
modulus-of-smoothness error bounds.
"""

from .engine import GridFunction, GridSpec, convolve_direct, convolve_fft, path_agreement
from .errors import (
    DomainError,
    NonConvergenceError,
    ProbConvError,
    QuadratureError,
    ResolutionError,
    StencilError,
    UnsupportedAnalyticError,
)
from .functions import AbsSin, Constant, Cos, CsvSamples, GaussianBump, Hat, Sin, parse_function
from .kernels import (
    EXPONENTIAL,
    MAXWELL_BOLTZMANN,
    PICARD,
    WEIERSTRASS,
    Family,
    KernelId,
    Variant,
    eval_density,
    first_abs_moment,
    normalization_deficit,
    parse_kernel,
    picard_jackson,
    total_mass,
    truncation_radius,
    weierstrass_jackson,
)
from .operators import operator
from .quadrature import QuadratureSpec
from .spectral import symbol, symbol_dt, symbol_pde_residual

__version__ = "0.1.0"
