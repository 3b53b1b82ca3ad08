"""Bounded, uniformly continuous test functions f used as operator inputs.

Each descriptor knows where it has kinks (so quadrature can split there),
a characteristic length for panel sizing, and a finite window that contains
everything the moduli of smoothness can see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class TestFunction:
    """Base descriptor; subclasses implement ``__call__`` vectorised over x."""

    __test__ = False  # keep pytest from collecting the class

    name = "f"
    period: float | None = None

    def __call__(self, x):
        raise NotImplementedError

    @property
    def sup_norm(self) -> float:
        raise NotImplementedError

    @property
    def scale(self) -> float:
        """Length over which f changes appreciably."""
        return math.inf

    def breakpoints(self, lo: float, hi: float) -> np.ndarray:
        """Kink locations inside [lo, hi]."""
        return np.empty(0)

    @property
    def is_smooth(self) -> bool:
        return True

    def window(self) -> tuple[float, float]:
        """x-range that, together with shifts, realises every finite difference."""
        if self.period is not None:
            return 0.0, self.period
        raise NotImplementedError

    def shift_cap(self) -> float:
        """Step lengths beyond this add nothing new to a modulus search."""
        return self.period if self.period is not None else math.inf


@dataclass(frozen=True)
class Cos(TestFunction):
    a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "period", 2.0 * math.pi / abs(self.a) if self.a else None)

    @property
    def name(self):
        return "cos" if self.a == 1.0 else f"cos(a={self.a:g})"

    def __call__(self, x):
        return np.cos(self.a * np.asarray(x, dtype=float))

    sup_norm = 1.0

    @property
    def scale(self):
        return 1.0 / abs(self.a) if self.a else math.inf


@dataclass(frozen=True)
class Sin(Cos):
    @property
    def name(self):
        return "sin" if self.a == 1.0 else f"sin(a={self.a:g})"

    def __call__(self, x):
        return np.sin(self.a * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GaussianBump(TestFunction):
    center: float = 0.0
    width: float = 1.0
    name = "bump"

    def __call__(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return np.exp(-z * z)

    sup_norm = 1.0

    @property
    def scale(self):
        return self.width / 2.0

    def window(self):
        # e^{-36} is far below double resolution of the peak
        return self.center - 6.0 * self.width, self.center + 6.0 * self.width

    def shift_cap(self):
        return 12.0 * self.width


@dataclass(frozen=True)
class AbsSin(TestFunction):
    a: float = 1.0
    name = "abs-sin"

    def __post_init__(self):
        object.__setattr__(self, "period", math.pi / abs(self.a))

    def __call__(self, x):
        return np.abs(np.sin(self.a * np.asarray(x, dtype=float)))

    sup_norm = 1.0

    @property
    def scale(self):
        return 1.0 / abs(self.a)

    @property
    def is_smooth(self):
        return False

    def breakpoints(self, lo, hi):
        j = np.arange(math.ceil(lo / self.period), math.floor(hi / self.period) + 1)
        return j * self.period


@dataclass(frozen=True)
class Hat(TestFunction):
    center: float = 0.0
    half_width: float = 1.0
    name = "hat"

    def __call__(self, x):
        z = np.abs(np.asarray(x, dtype=float) - self.center) / self.half_width
        return np.maximum(0.0, 1.0 - z)

    sup_norm = 1.0

    @property
    def scale(self):
        return self.half_width

    @property
    def is_smooth(self):
        return False

    def breakpoints(self, lo, hi):
        pts = np.array([self.center - self.half_width, self.center, self.center + self.half_width])
        return pts[(pts >= lo) & (pts <= hi)]

    def window(self):
        return self.center - self.half_width, self.center + self.half_width

    def shift_cap(self):
        return 2.0 * self.half_width


@dataclass(frozen=True)
class Constant(TestFunction):
    c: float = 1.0
    name = "constant"

    def __call__(self, x):
        return np.full(np.shape(x), float(self.c))

    @property
    def sup_norm(self):
        return abs(self.c)

    def window(self):
        return 0.0, 1.0

    def shift_cap(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class CsvSamples(TestFunction):
    """Linear interpolation of samples, constant continuation outside their range."""

    x: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    label: str = "csv"

    @property
    def name(self):
        return self.label

    @classmethod
    def from_grid(cls, grid, label: str = "csv") -> "CsvSamples":
        return cls(np.asarray(grid.x), np.asarray(grid.values), label)

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.values)

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    @property
    def scale(self):
        return float(self.x[1] - self.x[0])

    @property
    def is_smooth(self):
        return False

    def breakpoints(self, lo, hi):
        return self.x[(self.x >= lo) & (self.x <= hi)]

    def window(self):
        return float(self.x[0]), float(self.x[-1])

    def shift_cap(self):
        return float(self.x[-1] - self.x[0])


def parse_function(spec: str, a: float = 1.0) -> TestFunction:
    """Descriptor from a short name: cos, sin, bump, abs-sin, hat, constant[:c], csv:<path>."""
    name, _, arg = spec.partition(":")
    if name == "cos":
        return Cos(a)
    if name == "sin":
        return Sin(a)
    if name in ("bump", "gaussian-bump"):
        return GaussianBump()
    if name == "abs-sin":
        return AbsSin(a)
    if name == "hat":
        return Hat()
    if name == "constant":
        return Constant(float(arg) if arg else 1.0)
    if name == "csv":
        from .engine import read_grid_csv

        return CsvSamples.from_grid(read_grid_csv(arg), label=f"csv:{arg}")
    raise ValueError(f"unknown function descriptor {spec!r}")
