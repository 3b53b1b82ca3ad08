"""Exception hierarchy shared by every module."""


class ProbConvError(Exception):
    """Base class for all library errors."""


class DomainError(ProbConvError, ValueError):
    """A parameter lies outside the domain of a formula (e.g. t <= 0)."""


class QuadratureError(ProbConvError):
    """Panel refinement failed to reach the requested tolerance."""


class ResolutionError(ProbConvError, ValueError):
    """A sampling grid is too coarse or too short for the kernel."""


class UnsupportedAnalyticError(ProbConvError):
    """No closed form is available for the requested quantity."""


class NonConvergenceError(ProbConvError):
    """An adaptive search failed to stabilise within its round budget."""


class StencilError(ProbConvError, ValueError):
    """A field is too small for the finite-difference stencil."""
