"""Two independent evaluators of O_t(f)(x) = integral f(x - v) d(t, v) dv.

``convolve_direct`` truncates the line to [-R, R] and applies composite
Gauss-Legendre panels per output node. ``convolve_fft`` samples f and the
kernel on one uniform spacing and forms their discrete linear convolution
with zero padding. Neither path uses the closed-form symbols.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from .errors import QuadratureError, ResolutionError
from .functions import TestFunction
from .kernels import (
    KernelId,
    eval_density,
    kernel_scale,
    resolution_scale,
    total_mass,
    truncation_radius,
    _check_t,
)
from .quadrature import QuadratureSpec, panel_rule

# entries per block when forming f(x_i - v_j) on the smooth path
_BLOCK = 1 << 21


@dataclass(frozen=True)
class GridSpec:
    """n equispaced nodes from x_min to x_max inclusive."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 2 or not self.x_max > self.x_min:
            raise ValueError(f"bad grid ({self.x_min}, {self.x_max}, {self.n})")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @classmethod
    def from_step(cls, x_min: float, x_max: float, dx: float) -> "GridSpec":
        n = int(round((x_max - x_min) / dx)) + 1
        return cls(x_min, x_min + (n - 1) * dx, n)

    def refined(self) -> "GridSpec":
        """Same span, half the spacing."""
        return GridSpec(self.x_min, self.x_max, 2 * self.n - 1)


@dataclass
class GridFunction:
    x_min: float
    dx: float
    values: np.ndarray
    label: str | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("GridFunction needs a 1-D array of at least 2 values")
        if not self.dx > 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("GridFunction values must be finite")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_min + (self.n - 1) * self.dx, self.n)

    @property
    def interior(self) -> np.ndarray:
        """Mask of nodes not flagged as boundary-contaminated."""
        mask = self.metadata.get("contaminated")
        if mask is None:
            return np.ones(self.n, dtype=bool)
        return ~np.asarray(mask)


def sample(f: TestFunction, grid: GridSpec, label: str | None = None) -> GridFunction:
    return GridFunction(grid.x_min, grid.dx, f(grid.x), label or f.name)


def write_grid_csv(gf: GridFunction, dest=None) -> str:
    """Serialise as ``x,value`` rows with 17 significant digits; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "value"])
    for xi, vi in zip(gf.x, gf.values):
        w.writerow([format(float(xi), ".17g"), format(float(vi), ".17g")])
    text = buf.getvalue()
    if dest is not None:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return text


def read_grid_csv(source) -> GridFunction:
    """Parse an ``x,value`` CSV (path or file object) into a GridFunction."""
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
        raise ValueError("grid CSV must start with header 'x,value'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    if data.shape[0] < 2:
        raise ValueError("grid CSV needs at least two rows")
    steps = np.diff(data[:, 0])
    dx = (data[-1, 0] - data[0, 0]) / (len(data) - 1)
    if dx <= 0 or np.any(steps <= 0):
        raise ValueError("grid CSV x column must be strictly increasing")
    if np.max(np.abs(steps - dx)) > 1e-9 * dx:
        raise ValueError("grid CSV x column is not equispaced")
    return GridFunction(float(data[0, 0]), float(dx), data[:, 1])


def _base_breaks(kernel: KernelId, radius: float, quad: QuadratureSpec) -> np.ndarray:
    if kernel.is_kinked or quad.split_at_zero:
        return np.array([-radius, 0.0, radius])
    return np.array([-radius, radius])


def _smooth_pass(f, x, kernel, t, breaks, hmax, n):
    v, w = panel_rule(breaks, hmax, n)
    dw = eval_density(kernel, t, v) * w
    out = np.empty(x.size)
    rows = max(1, _BLOCK // v.size)
    for s in range(0, x.size, rows):
        xs = x[s:s + rows]
        out[s:s + rows] = np.sum(f(xs[:, None] - v[None, :]) * dw[None, :], axis=1)
    return out


def _kinked_pass(f, x, kernel, t, breaks, hmax, n):
    lo, hi = breaks[0], breaks[-1]
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        # f(xi - v) kinks where xi - v hits a breakpoint b, i.e. v = xi - b
        kinks = xi - f.breakpoints(xi - hi, xi - lo)
        b = np.unique(np.concatenate([breaks, kinks[(kinks > lo) & (kinks < hi)]]))
        v, w = panel_rule(b, hmax, n)
        out[i] = np.sum(f(xi - v) * eval_density(kernel, t, v) * w)
    return out


def convolve_direct(f: TestFunction, kernel: KernelId, t: float, grid: GridSpec,
                    quad: QuadratureSpec | None = None) -> GridFunction:
    """O_t(f) at every grid node by truncated composite panel quadrature.

    The line is cut at R = truncation_radius(kernel, t, eps_tail) and split at
    v = 0 for kinked kernels and at every kink of f. The panel error is
    estimated against the half-order rule on the same panels; panels are
    halved until it meets ``quad.tol``. ``metadata['error_budget']`` is
    eps_tail * sup|f| plus that estimate.
    """
    _check_t(t)
    quad = quad or QuadratureSpec()
    radius = truncation_radius(kernel, t, quad.eps_tail)
    breaks = _base_breaks(kernel, radius, quad)
    hmax = min(radius / quad.panels_per_side, kernel_scale(kernel, t), f.scale)
    x = grid.x
    evaluate = _smooth_pass if f.is_smooth else _kinked_pass
    n = quad.nodes_per_panel
    for _ in range(quad.max_refinements + 1):
        values = evaluate(f, x, kernel, t, breaks, hmax, n)
        coarse = evaluate(f, x, kernel, t, breaks, hmax, max(2, n // 2))
        estimate = float(np.max(np.abs(values - coarse)))
        if estimate <= quad.tol * max(1.0, float(np.max(np.abs(values)))):
            break
        hmax /= 2.0
    else:
        raise QuadratureError(
            f"{kernel.name} t={t:g}: panel estimate {estimate:.3e} stalled above tol {quad.tol:.1e}"
        )
    return GridFunction(
        grid.x_min, grid.dx, values,
        label=f"{kernel.name}(t={t:g})[{f.name}]",
        metadata={
            "path": "direct",
            "radius": radius,
            "panel_estimate": estimate,
            "error_budget": quad.eps_tail * f.sup_norm + estimate,
        },
    )


def check_fft_resolution(kernel: KernelId, t: float, dx: float) -> None:
    limit = resolution_scale(kernel, t) / 4.0
    if dx > limit * (1.0 + 1e-12):
        raise ResolutionError(
            f"dx={dx:.4g} does not resolve {kernel.name} at t={t:g} (need dx <= {limit:.4g})"
        )


def linear_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full discrete linear convolution via zero-padded real FFTs."""
    size = a.size + b.size - 1
    nfft = next_fast_len(size, real=True)
    out = np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)
    return out[:size]


def convolve_fft(f_samples: GridFunction, kernel: KernelId, t: float,
                 eps_tail: float = 1e-12) -> GridFunction:
    """O_t(f) from samples, treating f as zero outside the sampled span.

    The centre tap absorbs the mass deficit of the sampled kernel. Nodes within one
    truncation radius of either end see the zero padding;
    they are flagged in ``metadata['contaminated']``.
    """
    _check_t(t)
    dx = f_samples.dx
    check_fft_resolution(kernel, t, dx)
    radius = truncation_radius(kernel, t, eps_tail)
    span = (f_samples.n - 1) * dx
    if span <= 2.0 * radius:
        raise ResolutionError(
            f"grid span {span:.4g} must exceed 2R = {2 * radius:.4g} for {kernel.name} t={t:g}"
        )
    half = int(math.ceil(radius / dx))
    taps = eval_density(kernel, t, dx * np.arange(-half, half + 1)) * dx
    # a kernel kink at v = 0 leaves a trapezoid error (dx^2/12) [d'] f(x) + O(dx^4);
    # the same term is the mass deficit of the taps, so it goes on the centre tap
    taps[half] += total_mass(kernel) - math.fsum(taps)
    full = linear_convolve(f_samples.values, taps)
    values = full[half:half + f_samples.n]
    band = min(f_samples.n, int(math.ceil(radius / dx)))
    contaminated = np.zeros(f_samples.n, dtype=bool)
    contaminated[:band] = True
    contaminated[f_samples.n - band:] = True
    return GridFunction(
        f_samples.x_min, dx, values,
        label=f"{kernel.name}(t={t:g})[{f_samples.label}]",
        metadata={"path": "fft", "radius": radius, "contaminated": contaminated},
    )


def padded_grid(grid: GridSpec, pad: float) -> tuple[GridSpec, int]:
    """Extend ``grid`` by at least ``pad`` on both sides, keeping its spacing."""
    extra = int(math.ceil(pad / grid.dx)) + 1
    dx = grid.dx
    return GridSpec(grid.x_min - extra * dx, grid.x_max + extra * dx, grid.n + 2 * extra), extra


def convolve_fft_function(f: TestFunction, kernel: KernelId, t: float, grid: GridSpec,
                          eps_tail: float = 1e-12) -> GridFunction:
    """FFT path on ``grid`` with enough padding that no requested node is contaminated."""
    radius = truncation_radius(kernel, t, eps_tail)
    big, extra = padded_grid(grid, 1.5 * radius)
    full = convolve_fft(sample(f, big), kernel, t, eps_tail)
    vals = full.values[extra:extra + grid.n]
    return GridFunction(grid.x_min, grid.dx, vals, label=full.label,
                        metadata={"path": "fft", "radius": radius})


def path_agreement(f: TestFunction, kernel: KernelId, t: float, grid: GridSpec,
                   quad: QuadratureSpec | None = None) -> float:
    """max |direct - fft| over nodes of ``grid`` that the FFT path does not flag."""
    quad = quad or QuadratureSpec()
    fft = convolve_fft(sample(f, grid), kernel, t, quad.eps_tail)
    keep = fft.interior
    if not keep.any():
        raise ResolutionError("no uncontaminated interior nodes; widen the grid")
    idx = np.flatnonzero(keep)
    sub = GridSpec(grid.x_min + idx[0] * grid.dx, grid.x_min + idx[-1] * grid.dx, idx.size)
    direct = convolve_direct(f, kernel, t, sub, quad)
    return float(np.max(np.abs(direct.values - fft.values[keep])))
