"""Moduli of smoothness and certification of the approximation inequalities."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .engine import GridSpec
from .errors import NonConvergenceError
from .functions import GaussianBump, TestFunction
from .kernels import (
    EXPONENTIAL,
    MAXWELL_BOLTZMANN,
    PICARD,
    KernelId,
    Variant,
    first_abs_moment,
    picard_jackson,
    total_mass,
    weierstrass_jackson,
)
from .operators import operator
from .quadrature import QuadratureSpec


def finite_difference(f: TestFunction, r: int, x, h):
    """Delta_h^r f(x) = sum_j (-1)^(r-j) C(r, j) f(x + j h); broadcasts x against h."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    return sum((-1) ** (r - j) * math.comb(r, j) * f(x + j * h) for j in range(r + 1))


def _sampled_modulus(f, r, delta, nx, nh):
    h_max = min(delta, f.shift_cap())
    lo, hi = f.window()
    if f.period is None:
        lo -= r * h_max
    xs = np.linspace(lo, hi, nx + 1)
    hs = np.linspace(0.0, h_max, nh + 1)
    best = 0.0
    step = max(1, (1 << 20) // xs.size)
    for s in range(0, hs.size, step):
        block = finite_difference(f, r, xs[None, :], hs[s:s + step, None])
        best = max(best, float(np.max(np.abs(block))))
    return best


def modulus(f: TestFunction, r: int, delta: float, nx: int = 256, nh: int = 32,
            rounds: int = 6, rtol: float = 0.01) -> float:
    """omega_r(f; delta) = sup over 0 <= h <= delta and x of |Delta_h^r f(x)|.

    Dense search over the descriptor's window; x and h samples are doubled
    until successive values agree to ``rtol``. The sampled sup is a lower
    estimate of the true one.
    """
    if r < 1:
        raise ValueError(f"order must be >= 1, got {r}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    prev = _sampled_modulus(f, r, delta, nx, nh)
    for _ in range(rounds):
        nx, nh = 2 * nx, 2 * nh
        cur = _sampled_modulus(f, r, delta, nx, nh)
        if abs(cur - prev) <= rtol * abs(cur) or abs(cur - prev) < 1e-14:
            return cur
        prev = cur
    raise NonConvergenceError(f"omega_{r}({f.name}; {delta:g}) did not stabilise in {rounds} rounds")


def evaluation_grid(f: TestFunction, nodes: int = 257) -> GridSpec:
    """Nodes on which sup |O_t f - f| is sampled; kinks of the builtin descriptors fall on nodes."""
    if f.period is not None:
        return GridSpec(0.0, f.period, nodes)
    lo, hi = f.window()
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    if isinstance(f, GaussianBump):
        half *= 4.0 / 6.0
    else:
        half *= 2.0
    return GridSpec(mid - half, mid + half, nodes)


def sup_gap(kernel: KernelId, t: float, f: TestFunction, grid: GridSpec | None = None,
            quad: QuadratureSpec | None = None, target_scale: float = 1.0) -> float:
    """max over nodes |O_t(f) - target_scale * f|."""
    grid = grid or evaluation_grid(f)
    out = operator(kernel, t, f, grid, quad)
    return float(np.max(np.abs(out.values - target_scale * f(grid.x))))


@dataclass(frozen=True)
class BoundRow:
    bound: str
    f: str
    t: float
    lhs: float
    rhs: float
    ratio: float
    passed: bool | None  # None when the constant is unspecified

    @property
    def pass_text(self) -> str:
        return "n/a" if self.passed is None else ("true" if self.passed else "false")


BOUND_IDS = ("general", "mb", "picard", "exponential", "picard-jackson", "weierstrass-jackson")


def bound_operator(which: str, kernel: KernelId | None = None, n: int = 1,
                   variant=Variant.CORRECTED) -> KernelId:
    if which == "general":
        if kernel is None or not kernel.is_nonnegative:
            raise ValueError("the general bound needs one of the four probability kernels")
        return kernel
    return {
        "mb": lambda: MAXWELL_BOLTZMANN,
        "picard": lambda: PICARD,
        "exponential": lambda: EXPONENTIAL,
        "picard-jackson": lambda: picard_jackson(n),
        "weierstrass-jackson": lambda: weierstrass_jackson(n, variant),
    }[which]()


def bound_rhs(which: str, f: TestFunction, t: float, kernel: KernelId | None = None,
              n: int = 1) -> tuple[float, bool]:
    """Right-hand side at t, and whether it carries an unspecified constant.

    general              2 omega_1(f; phi(t))
    mb                   4 omega_1(f; t)
    picard               omega_2(f; t)                 (times unknown C)
    exponential          2 omega_1(f; 1/t)
    picard-jackson       sum_k k! C(n+1,k) omega_{n+1}(f; t)
    weierstrass-jackson  omega_{n+1}(f; sqrt t)        (times unknown C_n)
    """
    if which == "general":
        return 2.0 * modulus(f, 1, first_abs_moment(kernel, t)), False
    if which == "mb":
        return 4.0 * modulus(f, 1, t), False
    if which == "picard":
        return modulus(f, 2, t), True
    if which == "exponential":
        return 2.0 * modulus(f, 1, 1.0 / t), False
    if which == "picard-jackson":
        const = sum(math.factorial(k) * math.comb(n + 1, k) for k in range(1, n + 2))
        return const * modulus(f, n + 1, t), False
    if which == "weierstrass-jackson":
        return modulus(f, n + 1, math.sqrt(t)), True
    raise ValueError(f"unknown bound {which!r}; choose from {BOUND_IDS}")


def certify_bound(which: str, f: TestFunction, t_list, kernel: KernelId | None = None,
                  n: int = 1, variant=Variant.CORRECTED,
                  quad: QuadratureSpec | None = None) -> list[BoundRow]:
    """lhs = sup-node |O_t f - f| against the inequality's right-hand side at each t."""
    op = bound_operator(which, kernel, n, variant)
    label = which if which != "general" else f"general[{op.name}]"
    rows = []
    for t in t_list:
        lhs = sup_gap(op, t, f, quad=quad)
        rhs, has_constant = bound_rhs(which, f, t, op, n)
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        passed = None if has_constant else bool(lhs <= rhs + 1e-12)
        rows.append(BoundRow(label, f.name, float(t), lhs, rhs, ratio, passed))
    return rows


def constant_free_bound(kernel: KernelId, f: TestFunction, t: float) -> float | None:
    """Constant-free bound on |O_t f - f| at t, or None when only C * omega is known."""
    fam = kernel.family.value
    if fam == "mb":
        return bound_rhs("mb", f, t)[0]
    if fam == "exponential":
        return bound_rhs("exponential", f, t)[0]
    if fam in ("picard", "weierstrass"):
        return bound_rhs("general", f, t, kernel)[0]
    if fam == "picard-jackson":
        return bound_rhs("picard-jackson", f, t, n=kernel.n)[0]
    return None


def bound_table_csv(rows: list[BoundRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bound", "f", "t", "lhs", "rhs", "ratio", "pass"])
    for r in rows:
        w.writerow([r.bound, r.f, _g(r.t), _g(r.lhs), _g(r.rhs), _g(r.ratio), r.pass_text])
    return buf.getvalue()


def _g(v: float) -> str:
    return format(float(v), ".17g")


def limit_target(kernel: KernelId) -> float:
    """Factor s0 with O_t f -> s0 f; it is 1 except for the as-stated Weierstrass-Jackson kernel."""
    return total_mass(kernel)
