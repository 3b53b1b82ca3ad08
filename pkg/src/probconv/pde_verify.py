"""Finite-difference certification of the PDEs solved by u(x, t) = O_t(f)(x).

Clauses:
    i    u_t = t^3 u_xxxx - t^2 u_xxt + 3t u_xx                    (MB, initial)
    ii   u_t = t^2 u_xxt + 2t u_xx                                 (Picard, initial)
    iii  u_t = t^-2 u_xxt - 2 t^-3 u_xx                            (exponential, final)
    iv   u_k,t = k^2 t^2 u_k,xxt + 2 k^2 t u_k,xx,  u_k = P_{kt} f  (Picard-Jackson)
    v    u_k,t = (k/4) u_k,xx,  u_k = k^-1/2 W_{kt} f               (Weierstrass[-Jackson])

A field is sampled on a space-time grid with t bounded away from 0, and the
residual LHS - RHS is evaluated with second-order central stencils on the
interior (two-node bands excluded on every side).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .approx_bounds import constant_free_bound, evaluation_grid, limit_target
from .engine import GridSpec
from .errors import StencilError
from .functions import Cos, TestFunction
from .kernels import Family, KernelId, components, jackson_coefficients
from .operators import operator
from .quadrature import QuadratureSpec
from .spectral import component_symbol

CLAUSES = {
    Family.MAXWELL_BOLTZMANN: "i",
    Family.PICARD_LAPLACE: "ii",
    Family.EXPONENTIAL: "iii",
    Family.PICARD_JACKSON: "iv",
    Family.GAUSS_WEIERSTRASS: "v",
    Family.WEIERSTRASS_JACKSON: "v",
}


@dataclass
class SpaceTimeField:
    kernel: KernelId
    x_grid: GridSpec
    t_grid: GridSpec
    values: np.ndarray  # shape (nx, nt)
    source: str
    k: int = 1

    def __post_init__(self):
        if self.t_grid.x_min <= 0:
            raise ValueError("t-grid must stay strictly positive")

    @property
    def clause(self) -> str:
        return CLAUSES[self.kernel.family]


def _component(kernel: KernelId, t: float, k: int):
    for comp in components(kernel, t):
        if comp.k == k:
            return comp
    raise ValueError(f"{kernel.name} has no component k={k}")


def _component_weight(kernel: KernelId, comp) -> float:
    # the binomial coefficient belongs to the combination, not to u_k
    if kernel.is_jackson:
        return comp.coef / jackson_coefficients(kernel.n)[comp.k - 1][1]
    return comp.coef


def build_field(kernel: KernelId, f: TestFunction, x_grid: GridSpec, t_grid: GridSpec,
                quad: QuadratureSpec | None = None, source: str = "operator",
                k: int = 1) -> SpaceTimeField:
    """u(x, t) (or the Jackson component u_k) on the product grid.

    ``operator`` evaluates the convolution integral slice by slice;
    ``manufactured`` uses symbol(a, t) * f(x) and so needs f = cos(a.) or sin(a.).
    """
    if t_grid.x_min <= 0:
        raise ValueError("t-grid must stay strictly positive")
    ts = t_grid.x
    values = np.empty((x_grid.n, t_grid.n))
    if source == "manufactured":
        if not isinstance(f, Cos):
            raise ValueError("manufactured fields need a cos(a.) or sin(a.) descriptor")
        fx = f(x_grid.x)
        for j, t in enumerate(ts):
            comp = _component(kernel, t, k)
            m = component_symbol(comp, f.a) * _component_weight(kernel, comp) / comp.coef
            values[:, j] = m * fx
    elif source == "operator":
        for j, t in enumerate(ts):
            comp = _component(kernel, t, k)
            out = operator(comp.base, comp.scale, f, x_grid, quad)
            values[:, j] = _component_weight(kernel, comp) * out.values
    else:
        raise ValueError(f"unknown source {source!r}")
    return SpaceTimeField(kernel, x_grid, t_grid, values, source, k)


@dataclass(frozen=True)
class ResidualLevel:
    dx: float
    dt: float
    max_residual: float
    rms_residual: float


def _diffusivity(kernel: KernelId, t: float, k: int) -> float:
    return _component(kernel, t, k).scale / t


def residual(fld: SpaceTimeField, clause: str | None = None, k: int | None = None,
             window: tuple[float, float, float, float] | None = None) -> ResidualLevel:
    """Max and rms of |LHS - RHS| over interior nodes.

    ``window = (x_lo, x_hi, t_lo, t_hi)`` further restricts the nodes, so that
    levels of a refinement study are compared over one physical region.
    """
    clause = clause or fld.clause
    k = fld.k if k is None else k
    u = fld.values
    nx, nt = u.shape
    if nx < 9 or nt < 7:
        raise StencilError(f"field {nx}x{nt} too small: need >= 5 interior x and >= 3 interior t nodes")
    dx, dt = fld.x_grid.dx, fld.t_grid.dx
    t = fld.t_grid.x[None, 2:-2]
    i, j = slice(2, -2), slice(2, -2)

    uxx_all = (u[2:, :] - 2.0 * u[1:-1, :] + u[:-2, :]) / dx**2  # rows 1..nx-2
    uxx = uxx_all[1:-1, j]
    ut = (u[i, 3:-1] - u[i, 1:-3]) / (2.0 * dt)
    uxxt = (uxx_all[1:-1, 3:-1] - uxx_all[1:-1, 1:-3]) / (2.0 * dt)

    if clause == "i":
        uxxxx = (u[:-4, j] - 4.0 * u[1:-3, j] + 6.0 * u[2:-2, j] - 4.0 * u[3:-1, j] + u[4:, j]) / dx**4
        rhs = t**3 * uxxxx - t**2 * uxxt + 3.0 * t * uxx
    elif clause == "ii":
        rhs = t**2 * uxxt + 2.0 * t * uxx
    elif clause == "iii":
        rhs = uxxt / t**2 - 2.0 * uxx / t**3
    elif clause == "iv":
        rhs = k * k * t**2 * uxxt + 2.0 * k * k * t * uxx
    elif clause == "v":
        rhs = (_diffusivity(fld.kernel, 1.0, k) / 4.0) * uxx
    else:
        raise ValueError(f"unknown clause {clause!r}")
    res = np.abs(ut - rhs)
    if window is not None:
        x_lo, x_hi, t_lo, t_hi = window
        xs = fld.x_grid.x[2:-2, None]
        tol = 1e-9 * max(dx, dt)
        keep = ((xs >= x_lo - tol) & (xs <= x_hi + tol)) & ((t >= t_lo - tol) & (t <= t_hi + tol))
        res = res[keep]
    return ResidualLevel(dx, dt, float(np.max(res)), float(np.sqrt(np.mean(res * res))))


@dataclass
class ResidualReport:
    pde: str
    kernel: str
    k: int
    source: str
    levels: list[ResidualLevel] = field(default_factory=list)
    observed_order: float = math.nan

    @property
    def passed(self) -> bool:
        return self.observed_order >= 1.8

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "dx", "dt", "max_residual", "rms_residual"])
        for n, lv in enumerate(self.levels):
            w.writerow([n, _g(lv.dx), _g(lv.dt), _g(lv.max_residual), _g(lv.rms_residual)])
        w.writerow(["observed_order", _g(self.observed_order)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_float)


def _g(v: float) -> str:
    return format(float(v), ".17g")


def _json_float(v):
    return float(v)


def observed_order(levels: list[ResidualLevel]) -> float:
    """Mean log2 ratio of max residuals over consecutive levels; inf if all are exactly 0."""
    rates = []
    for a, b in zip(levels, levels[1:]):
        if a.max_residual == 0 and b.max_residual == 0:
            continue
        rates.append(math.log2(a.max_residual / b.max_residual) if b.max_residual > 0 else math.inf)
    return float(np.mean(rates)) if rates else math.inf


def order_study(kernel: KernelId, f: TestFunction, x_grid: GridSpec, t_grid: GridSpec,
                levels: int = 3, source: str = "manufactured", k: int = 1,
                quad: QuadratureSpec | None = None) -> ResidualReport:
    """Residuals under simultaneous halving of dx and dt.

    Every level is measured on the interior of the coarsest grid.
    """
    if levels < 2:
        raise ValueError("an order study needs at least 2 levels")
    report = ResidualReport(CLAUSES[kernel.family], kernel.name, k, source)
    window = (x_grid.x_min + 2 * x_grid.dx, x_grid.x_max - 2 * x_grid.dx,
              t_grid.x_min + 2 * t_grid.dx, t_grid.x_max - 2 * t_grid.dx)
    xg, tg = x_grid, t_grid
    for _ in range(levels):
        fld = build_field(kernel, f, xg, tg, quad, source, k)
        report.levels.append(residual(fld, window=window))
        xg, tg = xg.refined(), tg.refined()
    report.observed_order = observed_order(report.levels)
    return report


@dataclass(frozen=True)
class BoundaryRow:
    t: float
    gap: float
    bound: float | None


@dataclass
class BoundaryCheck:
    kernel: str
    direction: str
    target_scale: float
    rows: list[BoundaryRow]

    @property
    def within_bounds(self) -> bool:
        return all(r.bound is None or r.gap <= r.bound + 1e-9 for r in self.rows)

    @property
    def monotone(self) -> bool:
        gaps = [r.gap for r in self.rows]
        return all(b <= 1.1 * a + 1e-12 for a, b in zip(gaps, gaps[1:]))

    @property
    def passed(self) -> bool:
        return self.within_bounds and self.monotone


def boundary_condition_check(kernel: KernelId, f: TestFunction, direction: str, t_seq,
                             grid: GridSpec | None = None, quad: QuadratureSpec | None = None,
                             k: int | None = None) -> BoundaryCheck:
    """sup_x |O_t f - s0 f| along a sequence approaching the initial or final time.

    s0 is the kernel's total mass (1 except for the as-stated
    Weierstrass-Jackson kernel, whose components tend to k^-1/2 f). With
    ``k`` the check runs on the component u_k instead.
    """
    expected = "final" if kernel.family is Family.EXPONENTIAL else "initial"
    if direction != expected:
        raise ValueError(f"{kernel.name} has a {expected} condition, not {direction}")
    grid = grid or evaluation_grid(f)
    fx = f(grid.x)
    rows = []
    if k is None:
        scale = limit_target(kernel)
        for t in t_seq:
            out = operator(kernel, t, f, grid, quad)
            gap = float(np.max(np.abs(out.values - scale * fx)))
            bound = constant_free_bound(kernel, f, t)
            rows.append(BoundaryRow(float(t), gap, bound))
    else:
        comp = _component(kernel, 1.0, k)
        scale = _component_weight(kernel, comp)
        for t in t_seq:
            c = _component(kernel, t, k)
            out = operator(c.base, c.scale, f, grid, quad)
            gap = float(np.max(np.abs(scale * out.values - scale * fx)))
            rows.append(BoundaryRow(float(t), gap, None))
    return BoundaryCheck(kernel.name, direction, scale, rows)
