"""Convolution kernels d(t, x): four probability densities and two Jackson sums.

The Jackson-type kernels are alternating binomial combinations of scaled
Laplace or Gaussian kernels. They are signed, so the density invariants
(nonnegativity, unit mass) are replaced by the total signed mass, which equals
the operator symbol at zero frequency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .errors import DomainError, UnsupportedAnalyticError
from .quadrature import QuadratureSpec, integrate

SQRT_2PI = math.sqrt(2.0 * math.pi)
MB_MOMENT_FACTOR = 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)


class Family(enum.Enum):
    MAXWELL_BOLTZMANN = "mb"
    PICARD_LAPLACE = "picard"
    EXPONENTIAL = "exponential"
    GAUSS_WEIERSTRASS = "weierstrass"
    PICARD_JACKSON = "picard-jackson"
    WEIERSTRASS_JACKSON = "weierstrass-jackson"


class Variant(enum.Enum):
    AS_STATED = "as-stated"
    CORRECTED = "corrected"


JACKSON = (Family.PICARD_JACKSON, Family.WEIERSTRASS_JACKSON)
NONNEGATIVE = (
    Family.MAXWELL_BOLTZMANN,
    Family.PICARD_LAPLACE,
    Family.EXPONENTIAL,
    Family.GAUSS_WEIERSTRASS,
)
# kernels with a derivative jump at x = 0
KINKED = (Family.PICARD_LAPLACE, Family.EXPONENTIAL, Family.PICARD_JACKSON)


@dataclass(frozen=True)
class KernelId:
    family: Family
    n: int | None = None
    variant: Variant | None = None

    def __post_init__(self):
        if self.family in JACKSON:
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise DomainError(f"{self.family.value} needs an integer n >= 1, got {self.n}")
        elif self.n is not None:
            raise DomainError(f"{self.family.value} takes no n")
        if self.family is Family.WEIERSTRASS_JACKSON:
            if self.variant is None:
                object.__setattr__(self, "variant", Variant.AS_STATED)
        elif self.variant is not None:
            raise DomainError("variant applies only to the Weierstrass-Jackson kernel")

    @property
    def name(self) -> str:
        out = self.family.value
        if self.n is not None:
            out += f"-n{self.n}"
        if self.variant is Variant.CORRECTED:
            out += "-corrected"
        return out

    @property
    def is_jackson(self) -> bool:
        return self.family in JACKSON

    @property
    def is_nonnegative(self) -> bool:
        return self.family in NONNEGATIVE

    @property
    def is_kinked(self) -> bool:
        return self.family in KINKED

    @property
    def is_gaussian_type(self) -> bool:
        return self.family in (
            Family.MAXWELL_BOLTZMANN,
            Family.GAUSS_WEIERSTRASS,
            Family.WEIERSTRASS_JACKSON,
        )

    def __str__(self):
        return self.name


MAXWELL_BOLTZMANN = KernelId(Family.MAXWELL_BOLTZMANN)
PICARD = KernelId(Family.PICARD_LAPLACE)
EXPONENTIAL = KernelId(Family.EXPONENTIAL)
WEIERSTRASS = KernelId(Family.GAUSS_WEIERSTRASS)


def picard_jackson(n: int) -> KernelId:
    return KernelId(Family.PICARD_JACKSON, n)


def weierstrass_jackson(n: int, variant: Variant | str = Variant.AS_STATED) -> KernelId:
    return KernelId(Family.WEIERSTRASS_JACKSON, n, Variant(variant))


def parse_kernel(name: str, n: int | None = None, variant: str | None = None) -> KernelId:
    """Build a KernelId from a CLI-style family name."""
    aliases = {"maxwell-boltzmann": "mb", "laplace": "picard", "gauss-weierstrass": "weierstrass"}
    try:
        family = Family(aliases.get(name, name))
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise ValueError(f"unknown kernel {name!r}; choose from {choices}") from None
    if family in JACKSON:
        if family is Family.WEIERSTRASS_JACKSON:
            return weierstrass_jackson(1 if n is None else n, variant or Variant.AS_STATED)
        return picard_jackson(1 if n is None else n)
    return KernelId(family)


def _check_t(t: float) -> None:
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"t must be a positive finite real, got {t}")


def jackson_coefficients(n: int) -> list[tuple[int, int]]:
    """(k, (-1)^(k+1) C(n+1, k)) for k = 1..n+1."""
    return [(k, (-1) ** (k + 1) * math.comb(n + 1, k)) for k in range(1, n + 2)]


class Component(NamedTuple):
    """One term ``coef * O_{scale}(f)`` of a kernel written as a sum of base operators."""

    k: int
    coef: float
    base: KernelId
    scale: float


def components(kernel: KernelId, t: float) -> list[Component]:
    """Decompose a kernel into weighted base kernels at rescaled parameters.

    PicardJackson: c_k P_{kt}. WeierstrassJackson as stated: c_k k^(-1/2) W_{kt};
    corrected: c_k W_{k^2 t}. Non-Jackson kernels are their own single component.
    """
    _check_t(t)
    if kernel.family is Family.PICARD_JACKSON:
        return [Component(k, float(c), PICARD, k * t) for k, c in jackson_coefficients(kernel.n)]
    if kernel.family is Family.WEIERSTRASS_JACKSON:
        if kernel.variant is Variant.CORRECTED:
            return [Component(k, float(c), WEIERSTRASS, k * k * t)
                    for k, c in jackson_coefficients(kernel.n)]
        return [Component(k, c / math.sqrt(k), WEIERSTRASS, k * t)
                for k, c in jackson_coefficients(kernel.n)]
    return [Component(1, 1.0, kernel, t)]


def eval_density(kernel: KernelId, t: float, x):
    """Kernel value d(t, x); vectorised over ``x``."""
    _check_t(t)
    x = np.asarray(x, dtype=float)
    fam = kernel.family
    if fam is Family.MAXWELL_BOLTZMANN:
        out = x * x * np.exp(-x * x / (2.0 * t * t)) / (SQRT_2PI * t**3)
    elif fam is Family.PICARD_LAPLACE:
        out = np.exp(-np.abs(x) / t) / (2.0 * t)
    elif fam is Family.EXPONENTIAL:
        out = t * np.exp(-t * np.abs(x)) / 2.0
    elif fam is Family.GAUSS_WEIERSTRASS:
        out = np.exp(-x * x / t) / math.sqrt(math.pi * t)
    elif fam is Family.PICARD_JACKSON:
        ax = np.abs(x)
        out = sum(c / k * np.exp(-ax / (k * t)) for k, c in jackson_coefficients(kernel.n))
        out = out / (2.0 * t)
    else:
        x2 = x * x
        if kernel.variant is Variant.CORRECTED:
            out = sum(c / k * np.exp(-x2 / (k * k * t)) for k, c in jackson_coefficients(kernel.n))
        else:
            out = sum(c / k * np.exp(-x2 / (k * t)) for k, c in jackson_coefficients(kernel.n))
        out = out / math.sqrt(math.pi * t)
    return out if out.ndim else float(out)


def total_mass(kernel: KernelId) -> float:
    """Signed integral s0 of d(t, .), independent of t."""
    if kernel.family is Family.WEIERSTRASS_JACKSON and kernel.variant is Variant.AS_STATED:
        return math.fsum(c / math.sqrt(k) for k, c in jackson_coefficients(kernel.n))
    return 1.0


def tail_mass(kernel: KernelId, t: float, radius: float) -> float:
    """Mass of |d(t, .)| outside [-radius, radius] (an upper bound for signed kernels)."""
    _check_t(t)
    r = float(radius)
    fam = kernel.family
    if fam is Family.MAXWELL_BOLTZMANN:
        z = r / t
        return float(erfc(z / math.sqrt(2.0)) + 2.0 * z * math.exp(-0.5 * z * z) / SQRT_2PI)
    if fam is Family.PICARD_LAPLACE:
        return math.exp(-r / t)
    if fam is Family.EXPONENTIAL:
        return math.exp(-t * r)
    if fam is Family.GAUSS_WEIERSTRASS:
        return float(erfc(r / math.sqrt(t)))
    if fam is Family.PICARD_JACKSON:
        # |c_k / k| e^{-|x|/(kt)} / (2t) integrates to |c_k| e^{-r/(kt)} beyond r
        return math.fsum(abs(c) * math.exp(-r / (k * t)) for k, c in jackson_coefficients(kernel.n))
    if kernel.variant is Variant.CORRECTED:
        return math.fsum(abs(c) * float(erfc(r / (k * math.sqrt(t))))
                         for k, c in jackson_coefficients(kernel.n))
    return math.fsum(abs(c) / math.sqrt(k) * float(erfc(r / math.sqrt(k * t)))
                     for k, c in jackson_coefficients(kernel.n))


def truncation_radius(kernel: KernelId, t: float, eps: float) -> float:
    """Radius R with tail_mass(kernel, t, R) < eps.

    Starting guesses come from closed-form tail bounds:
      Laplace        e^{-R/t}                         R = t ln(1/eps)
      exponential    e^{-tR}                          R = ln(1/eps) / t
      Gaussian       erfc(z) <= e^{-z^2}              R = sqrt(t ln(1/eps))
      MB             2(z + 1/z) phi(z) <= e^{-z^2/4}  R = 2 t sqrt(ln(1/eps)),  z >= 1.6
      Jackson sums   2^{n+1} times the slowest term, i.e. scale (n+1)t or (n+1)^2 t
    A 1% safety factor is applied, then R is doubled until the exact tail
    mass confirms the bound.
    """
    _check_t(t)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    log_inv = math.log(1.0 / eps)
    fam = kernel.family
    if fam is Family.MAXWELL_BOLTZMANN:
        r = 2.0 * t * math.sqrt(log_inv)
    elif fam is Family.PICARD_LAPLACE:
        r = t * log_inv
    elif fam is Family.EXPONENTIAL:
        r = log_inv / t
    elif fam is Family.GAUSS_WEIERSTRASS:
        r = math.sqrt(t * log_inv)
    else:
        m = kernel.n + 1
        log_jack = log_inv + m * math.log(2.0)
        if fam is Family.PICARD_JACKSON:
            r = m * t * log_jack
        elif kernel.variant is Variant.CORRECTED:
            r = m * math.sqrt(t * log_jack)
        else:
            r = math.sqrt(m * t * log_jack)
    r *= 1.01
    while tail_mass(kernel, t, r) >= eps:
        r *= 2.0
    return r


def kernel_scale(kernel: KernelId, t: float) -> float:
    """Smallest length over which the kernel varies appreciably."""
    _check_t(t)
    fam = kernel.family
    if fam is Family.EXPONENTIAL:
        return 1.0 / t
    if fam is Family.GAUSS_WEIERSTRASS:
        return math.sqrt(t / 2.0)
    if fam is Family.WEIERSTRASS_JACKSON:
        return math.sqrt(t / 2.0)
    return t


def resolution_scale(kernel: KernelId, t: float) -> float:
    """Reference length for the sampling rule dx <= scale / 4.

    Gaussian-type kernels use t; exponential-type kernels use min(t, 1/t).
    """
    _check_t(t)
    if kernel.is_gaussian_type:
        return t
    return min(t, 1.0 / t)


def _kernel_breaks(kernel: KernelId, radius: float, quad: QuadratureSpec) -> list[float]:
    if kernel.is_kinked or quad.split_at_zero:
        return [-radius, 0.0, radius]
    return [-radius, radius]


def _panel_width(kernel: KernelId, t: float, radius: float, quad: QuadratureSpec) -> float:
    return min(radius / quad.panels_per_side, kernel_scale(kernel, t))


def normalization_deficit(kernel: KernelId, t: float, quad: QuadratureSpec | None = None) -> float:
    """|integral of d(t, .) - s0| by truncated panel quadrature."""
    quad = quad or QuadratureSpec()
    radius = truncation_radius(kernel, t, quad.eps_tail)
    value, _ = integrate(
        lambda v: eval_density(kernel, t, v),
        _kernel_breaks(kernel, radius, quad),
        _panel_width(kernel, t, radius, quad),
        quad,
    )
    return abs(value - total_mass(kernel))


def first_abs_moment(kernel: KernelId, t: float, method: str = "analytic",
                     quad: QuadratureSpec | None = None) -> float:
    """phi(t) = integral of |v| d(t, v).

    For Jackson kernels only the quadrature route exists and the result is the
    signed moment (the raw kernel, not its absolute value, times |v|).
    """
    _check_t(t)
    if method == "analytic":
        fam = kernel.family
        if fam is Family.MAXWELL_BOLTZMANN:
            return MB_MOMENT_FACTOR * t
        if fam is Family.PICARD_LAPLACE:
            return t
        if fam is Family.EXPONENTIAL:
            return 1.0 / t
        if fam is Family.GAUSS_WEIERSTRASS:
            return math.sqrt(t / math.pi)
        raise UnsupportedAnalyticError(
            f"no closed-form moment for {kernel.name}; use method='quadrature'"
        )
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    quad = quad or QuadratureSpec()
    radius = truncation_radius(kernel, t, quad.eps_tail)
    # split at 0 always: |v| has a kink there
    value, _ = integrate(
        lambda v: np.abs(v) * eval_density(kernel, t, v),
        [-radius, 0.0, radius],
        _panel_width(kernel, t, radius, quad),
        quad,
    )
    return value
