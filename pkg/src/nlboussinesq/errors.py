"""Exception types shared by the solvers and the command line driver."""


class SolverError(Exception):
    """Base class for every error raised by this package."""


class MeshMismatchError(SolverError, ValueError):
    """Two fields that must live on the same mesh do not."""


class PreconditionError(SolverError, ValueError):
    """An operation was called with inputs that violate its stated preconditions."""


class CapacityError(SolverError, ValueError):
    """More Stokes modes were requested than the discrete solenoidal space holds."""

    def __init__(self, requested: int, available: int):
        super().__init__(
            f"requested {requested} modes but the discrete solenoidal subspace "
            f"has dimension {available}"
        )
        self.requested = requested
        self.available = available


class NumericalError(SolverError, ArithmeticError):
    """A linear solve or time step produced an unacceptable residual or non-finite data."""

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class CFLError(NumericalError):
    """The advective CFL bound |v| dt / h <= 1 was violated."""

    def __init__(self, dt: float, admissible_dt: float):
        super().__init__(
            f"time step {dt:.6g} violates the advective CFL bound; "
            f"admissible dt <= {admissible_dt:.6g}"
        )
        self.dt = dt
        self.admissible_dt = admissible_dt


class ConfigError(SolverError, ValueError):
    """Invalid run configuration. ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class ArtifactError(SolverError, OSError):
    """A run directory or one of its files is missing or malformed."""
