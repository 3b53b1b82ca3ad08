"""Fourier multipliers of the convolution operators.

Convention: F(g)(xi) = (2 pi)^(-1/2) * integral g(x) e^{-i xi x} dx, with the
symmetric inverse. Under it the transform of O_t(f) is f_hat(xi) * m(xi, t),
where m = sqrt(2 pi) F^{-1}(d(t, .)); the sqrt(2 pi) is fixed by m(0, t) = 1
for probability kernels.

Closed forms (and their hand-differentiated t-derivatives):
    MB           (1 - t^2 xi^2) e^{-t^2 xi^2 / 2}
    Picard       1 / (1 + t^2 xi^2)
    exponential  t^2 / (t^2 + xi^2)
    Weierstrass  e^{-t xi^2 / 4}
    Jackson sums are the weighted sums of their components' symbols.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ResolutionError
from .kernels import (
    Component,
    Family,
    KernelId,
    components,
    eval_density,
    total_mass,
    truncation_radius,
    _check_t,
)


def _base_symbol(family: Family, t: float, xi):
    y = t * t * xi * xi
    if family is Family.MAXWELL_BOLTZMANN:
        return (1.0 - y) * np.exp(-0.5 * y)
    if family is Family.PICARD_LAPLACE:
        return 1.0 / (1.0 + y)
    if family is Family.EXPONENTIAL:
        return t * t / (t * t + xi * xi)
    if family is Family.GAUSS_WEIERSTRASS:
        return np.exp(-t * xi * xi / 4.0)
    raise ValueError(f"{family} is not a base family")


def _base_symbol_dt(family: Family, t: float, xi):
    xi2 = xi * xi
    if family is Family.MAXWELL_BOLTZMANN:
        y = t * t * xi2
        return t * xi2 * (y - 3.0) * np.exp(-0.5 * y)
    if family is Family.PICARD_LAPLACE:
        return -2.0 * t * xi2 / (1.0 + t * t * xi2) ** 2
    if family is Family.EXPONENTIAL:
        return 2.0 * t * xi2 / (t * t + xi2) ** 2
    if family is Family.GAUSS_WEIERSTRASS:
        return -(xi2 / 4.0) * np.exp(-t * xi2 / 4.0)
    raise ValueError(f"{family} is not a base family")


def _out(value):
    value = np.asarray(value, dtype=float)
    return value if value.ndim else float(value)


def component_symbol(comp: Component, xi):
    """Symbol of one weighted component c * O_{scale}."""
    xi = np.asarray(xi, dtype=float)
    return _out(comp.coef * _base_symbol(comp.base.family, comp.scale, xi))


def component_symbol_dt(comp: Component, t: float, xi):
    """d/dt of a component symbol; every component scale is linear in t."""
    xi = np.asarray(xi, dtype=float)
    return _out(comp.coef * _base_symbol_dt(comp.base.family, comp.scale, xi) * (comp.scale / t))


def symbol(kernel: KernelId, t: float, xi):
    """m(xi, t); vectorised over ``xi``."""
    xi = np.asarray(xi, dtype=float)
    return _out(sum(component_symbol(c, xi) for c in components(kernel, t)))


def symbol_dt(kernel: KernelId, t: float, xi):
    """Closed-form partial derivative dm/dt."""
    xi = np.asarray(xi, dtype=float)
    return _out(sum(component_symbol_dt(c, t, xi) for c in components(kernel, t)))


def component_pde_residual(kernel: KernelId, t: float, xi, k: int = 1):
    """Fourier-side residual of the PDE satisfied by component ``k``.

    Each relation is written in cleared-denominator form, so the MB case has
    no singularity at t^2 xi^2 = 1.
    """
    _check_t(t)
    xi = np.asarray(xi, dtype=float)
    comps = components(kernel, t)
    comp = next((c for c in comps if c.k == k), None)
    if comp is None:
        raise ValueError(f"{kernel.name} has no component k={k}")
    m = np.asarray(component_symbol(comp, xi))
    mt = np.asarray(component_symbol_dt(comp, t, xi))
    xi2 = xi * xi
    fam = kernel.family
    if fam is Family.MAXWELL_BOLTZMANN:
        res = mt + t**2 * (-xi2 * mt) - 3.0 * t * (-xi2 * m) - t**3 * (xi2 * xi2 * m)
    elif fam is Family.PICARD_LAPLACE:
        res = mt * (1.0 + t * t * xi2) + 2.0 * t * xi2 * m
    elif fam is Family.EXPONENTIAL:
        res = mt * (1.0 + xi2 / t**2) - (2.0 * xi2 / t**3) * m
    elif fam is Family.PICARD_JACKSON:
        k2 = k * k
        res = mt * (1.0 + k2 * t * t * xi2) + 2.0 * k2 * t * xi2 * m
    else:
        # heat equation u_t = (D/4) u_xx with D = scale / t (k, or k^2 when corrected)
        diffusivity = comp.scale / t
        res = mt + (diffusivity / 4.0) * xi2 * m
    return _out(np.abs(res))


def symbol_pde_residual(kernel: KernelId, t: float, xi, k: int | None = None):
    """Absolute Fourier-side PDE residual; for Jackson kernels the max over components."""
    if k is not None:
        return component_pde_residual(kernel, t, xi, k)
    ks = [c.k for c in components(kernel, t)]
    return _out(np.max([np.asarray(component_pde_residual(kernel, t, xi, j)) for j in ks], axis=0))


def discrete_transform(kernel: KernelId, t: float, half_width: float, n: int):
    """DFT estimate of sqrt(2 pi) F^{-1}(d(t, .)) on the periodic grid x_j = -L + j dx.

    Returns ``(xi, estimate)`` with frequencies in FFT order.
    """
    dx = 2.0 * half_width / n
    x = -half_width + dx * np.arange(n)
    samples = eval_density(kernel, t, x)
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    # shift origin from x_0 = -L to 0
    est = dx * np.fft.fft(samples) * np.exp(1j * xi * half_width)
    return xi, est


def discrete_symbol_mismatch(kernel: KernelId, t: float, half_width: float, n: int,
                             eps: float = 1e-12) -> float:
    """max |DFT estimate - m(xi, t)| over resolved frequencies |xi| <= xi_nyquist / 4."""
    if n < 64:
        raise ResolutionError(f"need at least 64 samples, got {n}")
    radius = truncation_radius(kernel, t, eps)
    if half_width < radius:
        raise ResolutionError(
            f"half width {half_width} below truncation radius {radius:.4g} for {kernel.name}"
        )
    xi, est = discrete_transform(kernel, t, half_width, n)
    xi_max = np.pi * n / (2.0 * half_width)
    mask = np.abs(xi) <= xi_max / 4.0
    # d is even, so the exact transform is real; the imaginary part is phase round-off
    return float(np.max(np.abs(est[mask] - symbol(kernel, t, xi[mask]))))


def dc_mismatch(kernel: KernelId, t: float, half_width: float, n: int) -> float:
    """|DC bin - s0|."""
    _, est = discrete_transform(kernel, t, half_width, n)
    return abs(est[0].real - total_mass(kernel))
