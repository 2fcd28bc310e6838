"""Exception hierarchy shared by every module."""


class LQRError(Exception):
    """Base class for all errors raised by paretolqr."""


class BadInput(LQRError, ValueError):
    """Malformed matrices: wrong shape, non-symmetric or non-definite costs."""


class DimensionMismatch(BadInput):
    pass


class NotPositiveDefinite(BadInput):
    pass


class NonConvergence(LQRError):
    """An iterative solver exhausted its iteration budget or blew up."""


class SingularInnerMatrix(LQRError):
    """``R + B^T P B`` is not invertible."""


class Unstable(LQRError):
    """A closed loop (or a matrix passed to a Lyapunov solve) has spectral radius >= 1."""


class Diverging(LQRError):
    """The growth rate ``sup_k ||L^k|| rho^-k`` is infinite."""


class TooFine(LQRError):
    """An epsilon-net would exceed the configured point budget."""


class EmptyGrid(LQRError):
    """A brute-force control grid has no stabilizing candidates."""


class DegenerateB(LQRError):
    """``B (sum_j R_j)^-1 B^T`` is singular, so the closed-form Riccati bound is infinite."""


class DegenerateBWarning(UserWarning):
    pass


class UnstablePoint(LQRError):
    """A front gain fails to stabilize the dynamics it was designed for."""


class PerturbedUnstabilizable(LQRError):
    pass


class CannotStabilize(LQRError):
    """Retry budget exhausted while drawing a stabilizable perturbation."""


class RankDeficient(LQRError):
    """Identification regressors do not have full column rank."""


class NetMismatch(LQRError):
    """Two fronts compared point-by-point were built on different nets."""
