"""Shared exception types. Every module raises these so the CLI and HTTP
layers can map failures to exit codes / status codes uniformly."""


class StormfluxError(Exception):
    """Base class for all package errors."""


class DataFormatError(StormfluxError):
    """Malformed input file. Carries the offending path and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{prefix} {message}".strip())


class ReferentialIntegrityError(StormfluxError):
    """A record references an entity that does not exist (e.g. unknown FIPS)."""


class ValidationError(StormfluxError):
    """A value violates a declared invariant."""


class DomainError(StormfluxError, ValueError):
    """An argument is outside the function's domain (bad coordinate, level, ...)."""


class MissingSeriesError(StormfluxError):
    """A required per-county data series is absent; never silently zero-filled."""


class DegenerateChoiceSetError(StormfluxError):
    """An origin ended up with no usable destination alternatives."""


class FitConvergenceError(StormfluxError):
    """Optimizer failed to reach the gradient tolerance within max_iter."""

    def __init__(self, message, last_params=None, gradient_norm=None, iterations=None):
        self.last_params = last_params
        self.gradient_norm = gradient_norm
        self.iterations = iterations
        super().__init__(message)


ERROR_CODES = (
    (DataFormatError, "data_format"),
    (ReferentialIntegrityError, "referential_integrity"),
    (ValidationError, "validation"),
    (DomainError, "domain"),
    (MissingSeriesError, "missing_series"),
    (DegenerateChoiceSetError, "degenerate_choice_set"),
    (FitConvergenceError, "fit_convergence"),
)


def error_payload(exc):
    """Stable {code, message, detail} body shared by the CLI and the API."""
    code = "internal"
    for cls, name in ERROR_CODES:
        if isinstance(exc, cls):
            code = name
            break
    return {"code": code, "message": str(exc), "detail": type(exc).__name__}
