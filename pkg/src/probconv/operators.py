"""Named operators S_t, P_t, E_t, W_t, P_{n,t}, W_{n,t} and the identities among them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    GridFunction,
    GridSpec,
    convolve_direct,
    convolve_fft,
    convolve_fft_function,
    padded_grid,
    sample,
)
from .functions import TestFunction
from .kernels import (
    EXPONENTIAL,
    PICARD,
    WEIERSTRASS,
    KernelId,
    Variant,
    components,
    jackson_coefficients,
    picard_jackson,
    truncation_radius,
    weierstrass_jackson,
    _check_t,
)
from .quadrature import QuadratureSpec, panel_rule


@dataclass(frozen=True)
class OperatorRequest:
    kernel: KernelId
    t: float
    f: TestFunction
    grid: GridSpec
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    path: str = "direct"


def apply(req: OperatorRequest) -> GridFunction:
    """O_t(f) on ``req.grid`` through the requested path."""
    if req.path == "direct":
        return convolve_direct(req.f, req.kernel, req.t, req.grid, req.quad)
    if req.path == "fft":
        return convolve_fft_function(req.f, req.kernel, req.t, req.grid, req.quad.eps_tail)
    raise ValueError(f"unknown path {req.path!r}")


def operator(kernel: KernelId, t: float, f: TestFunction, grid: GridSpec,
             quad: QuadratureSpec | None = None, path: str = "direct") -> GridFunction:
    return apply(OperatorRequest(kernel, t, f, grid, quad or QuadratureSpec(), path))


def _jackson_kernel(kind: str, n: int, variant) -> KernelId:
    if kind == "picard":
        return picard_jackson(n)
    if kind == "weierstrass":
        return weierstrass_jackson(n, variant)
    raise ValueError(f"kind must be 'picard' or 'weierstrass', got {kind!r}")


def jackson_components(kind: str, n: int, t: float, f: TestFunction, grid: GridSpec,
                       quad: QuadratureSpec | None = None, path: str = "direct",
                       variant=Variant.AS_STATED) -> dict[int, GridFunction]:
    """u_k for k = 1..n+1: P_{kt}(f), or k^(-1/2) W_{kt}(f) (W_{k^2 t}(f) when corrected)."""
    kernel = _jackson_kernel(kind, n, variant)
    out = {}
    for comp in components(kernel, t):
        base = operator(comp.base, comp.scale, f, grid, quad, path)
        # coefficient split: c_k stays with the combination, the rest belongs to u_k
        weight = comp.coef / jackson_coefficients(n)[comp.k - 1][1]
        base.values = weight * base.values
        base.label = f"u_{comp.k}"
        out[comp.k] = base
    return out


def jackson_combination(kind: str, n: int, t: float, f: TestFunction, grid: GridSpec,
                        quad: QuadratureSpec | None = None, path: str = "direct",
                        variant=Variant.AS_STATED) -> GridFunction:
    """sum_k (-1)^(k+1) C(n+1, k) u_k; the components ride along in metadata."""
    comps = jackson_components(kind, n, t, f, grid, quad, path, variant)
    total = np.zeros(grid.n)
    for k, c in jackson_coefficients(n):
        total = total + c * comps[k].values
    kernel = _jackson_kernel(kind, n, variant)
    return GridFunction(grid.x_min, grid.dx, total, label=f"{kernel.name}(t={t:g})[{f.name}]",
                        metadata={"components": comps})


def difference_form(kind: str, n: int, t: float, f: TestFunction, grid: GridSpec,
                    quad: QuadratureSpec | None = None) -> GridFunction:
    """The first printed Jackson representation, integrated as written:

        -(1/norm) * integral sum_k (-1)^k C(n+1, k) f(x + k v) e(v) dv

    with e(v) = e^{-|v|/t}, norm = 2t (Picard) or e(v) = e^{-v^2/t},
    norm = 2 C*(t) = sqrt(pi t) (Weierstrass). Brute force over v, no
    change of variables.
    """
    _check_t(t)
    quad = quad or QuadratureSpec()
    if kind == "picard":
        radius = truncation_radius(PICARD, t, quad.eps_tail)
        weight = lambda v: np.exp(-np.abs(v) / t) / (2.0 * t)
        hmax = min(radius / quad.panels_per_side, t)
    elif kind == "weierstrass":
        radius = truncation_radius(WEIERSTRASS, t, quad.eps_tail)
        weight = lambda v: np.exp(-v * v / t) / math.sqrt(math.pi * t)
        hmax = min(radius / quad.panels_per_side, math.sqrt(t / 2.0))
    else:
        raise ValueError(f"kind must be 'picard' or 'weierstrass', got {kind!r}")
    hmax = min(hmax, f.scale / (n + 1))
    coeffs = jackson_coefficients(n)
    x = grid.x
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        breaks = [-radius, 0.0, radius]
        for k, _ in coeffs:
            kinks = (f.breakpoints(xi - k * radius, xi + k * radius) - xi) / k
            breaks.extend(kinks[(kinks > -radius) & (kinks < radius)])
        v, w = panel_rule(np.unique(breaks), hmax, quad.nodes_per_panel)
        inner = sum(c * f(xi + k * v) for k, c in coeffs)
        out[i] = np.sum(inner * weight(v) * w)
    return GridFunction(grid.x_min, grid.dx, out, label=f"{kind}-difference-n{n}(t={t:g})")


@dataclass(frozen=True)
class IdentityGaps:
    kind: str
    n: int
    t: float
    kernel_vs_combination: float
    difference_vs_kernel: float


def combination_identity_gap(kind: str, n: int, t: float, f: TestFunction, grid: GridSpec,
                             quad: QuadratureSpec | None = None,
                             variant=Variant.AS_STATED) -> IdentityGaps:
    """Max-node gaps between the Jackson representations.

    ``kernel_vs_combination`` compares the single signed kernel against the
    sum of component operators. ``difference_vs_kernel`` compares the
    difference form against the kernel form; for Weierstrass with the
    as-stated kernel this gap is expected to be nonzero.
    """
    kernel = _jackson_kernel(kind, n, variant)
    as_kernel = operator(kernel, t, f, grid, quad)
    combo = jackson_combination(kind, n, t, f, grid, quad, variant=variant)
    diff = difference_form(kind, n, t, f, grid, quad)
    return IdentityGaps(
        kind, n, t,
        float(np.max(np.abs(as_kernel.values - combo.values))),
        float(np.max(np.abs(diff.values - as_kernel.values))),
    )


def duality_gap(t: float, f: TestFunction, grid: GridSpec,
                quad: QuadratureSpec | None = None) -> float:
    """max |E_t(f) - P_{1/t}(f)|; both radii come from the same eps_tail."""
    _check_t(t)
    e = operator(EXPONENTIAL, t, f, grid, quad)
    p = operator(PICARD, 1.0 / t, f, grid, quad)
    return float(np.max(np.abs(e.values - p.values)))


def semigroup_gap(t: float, s: float, f: TestFunction, grid: GridSpec,
                  quad: QuadratureSpec | None = None) -> float:
    """max |W_t(W_s f) - W_{t+s} f| on ``grid`` via the FFT path.

    The grid is padded by both truncation radii so the compared nodes are
    clear of every contaminated band.
    """
    _check_t(t)
    _check_t(s)
    eps = (quad or QuadratureSpec()).eps_tail
    pad = truncation_radius(WEIERSTRASS, s, eps) + truncation_radius(WEIERSTRASS, t, eps)
    big, extra = padded_grid(grid, 1.5 * pad)
    f_big = sample(f, big)
    twice = convolve_fft(convolve_fft(f_big, WEIERSTRASS, s, eps), WEIERSTRASS, t, eps)
    once = convolve_fft(f_big, WEIERSTRASS, t + s, eps)
    sl = slice(extra, extra + grid.n)
    return float(np.max(np.abs(twice.values[sl] - once.values[sl])))
