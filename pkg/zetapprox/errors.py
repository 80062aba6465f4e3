"""Custom exception classes and CLI error handlers."""
import json
import logging
from functools import wraps
from typing import Any, Callable

import click

logger = logging.getLogger(__name__)

# Process exit statuses.
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_BOUNDARY = 3
EXIT_VERIFICATION = 4


class ZetaError(Exception):
    """Base error with a machine-readable code and a process exit status."""

    def __init__(self, code: str, message: str, exit_status: int = EXIT_NUMERIC) -> None:
        """Initialise the error.

        Args:
            code: Machine-readable error code.
            message: Human-readable description.
            exit_status: Exit status used when the error reaches the CLI.
        """
        super().__init__(message)
        self.code = code
        self.message = message
        self.exit_status = exit_status


# ---------------------------------------------------------------------------
# Configuration errors (exit 1)
# ---------------------------------------------------------------------------

class ConfigError(ZetaError):
    """Raised when a run configuration document cannot be parsed."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None) -> None:
        context = []
        if line is not None:
            context.append(f"line {line}")
        if key is not None:
            context.append(f"key '{key}'")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__("CONFIG_ERROR", prefix + message, EXIT_CONFIG)
        self.key = key
        self.line = line


class ValidationError(ZetaError):
    """Raised when input data violates a model or command invariant."""

    def __init__(self, message: str, invariant: str | None = None) -> None:
        super().__init__("VALIDATION_ERROR", message, EXIT_CONFIG)
        self.invariant = invariant


# ---------------------------------------------------------------------------
# Numeric errors (exit 2)
# ---------------------------------------------------------------------------

class PoleError(ZetaError):
    """Raised when a Gamma argument hits a pole (a non-positive integer)."""

    def __init__(self, message: str = "Gamma argument at a non-positive integer.") -> None:
        super().__init__("POLE", message)


class DomainError(ZetaError):
    """Raised when log-gamma is requested on its branch cut."""

    def __init__(self, message: str = "Argument lies on the negative real axis.") -> None:
        super().__init__("DOMAIN", message)


class NearZeroError(ZetaError):
    """Raised when a tracked function nearly vanishes on a path."""

    def __init__(self, point: complex, modulus: float) -> None:
        super().__init__(
            "NEAR_ZERO",
            f"|f| = {modulus:.3e} at s = {point.real:.12g}{point.imag:+.12g}i; perturb the path.",
        )
        self.point = point
        self.modulus = modulus


class DepthExceededError(ZetaError):
    """Raised when adaptive refinement passes its maximum depth."""

    def __init__(self, depth: int) -> None:
        super().__init__("DEPTH_EXCEEDED", f"Refinement exceeded {depth} levels.")
        self.depth = depth


class BranchError(ZetaError):
    """Raised when argument continuity between two samples cannot be certified."""

    def __init__(self, message: str = "Cannot certify branch continuity; refine the step.") -> None:
        super().__init__("BRANCH", message)


class StepFloorError(ZetaError):
    """Raised when root refinement on a line scan stalls."""

    def __init__(self, message: str = "Root refinement stalled at the step floor.") -> None:
        super().__init__("STEP_FLOOR", message)


class WindingResidualError(ZetaError):
    """Raised when a winding total stays too far from an integer after refinement."""

    def __init__(self, residual: float) -> None:
        super().__init__("WINDING_RESIDUAL", f"Winding residual {residual:.3e} not below tolerance.")
        self.residual = residual


class NonRealCoefficientsError(ZetaError):
    """Raised when an operation requires real coefficients."""

    def __init__(self) -> None:
        super().__init__("NON_REAL_COEFFICIENTS", "This operation requires real coefficients.")


class ZeroAValueError(ZetaError):
    """Raised when an a-value census is requested for a = 0."""

    def __init__(self) -> None:
        super().__init__("ZERO_A_VALUE", "The a-value census requires a non-zero a.")


# ---------------------------------------------------------------------------
# Boundary and verification errors (exit 3 / 4)
# ---------------------------------------------------------------------------

class BoundaryRootError(ZetaError):
    """Raised when every jitter of a rectangle edge still meets an a-value."""

    def __init__(self, message: str = "a-value on the region boundary after the jitter schedule.") -> None:
        super().__init__("BOUNDARY_ROOT", message, EXIT_BOUNDARY)


class VerificationFailedError(ZetaError):
    """Raised when a verification suite finishes with failed checks."""

    def __init__(self, failed: list[str]) -> None:
        super().__init__(
            "VERIFICATION_FAILED",
            f"Failed checks: {', '.join(failed)}.",
            EXIT_VERIFICATION,
        )
        self.failed = failed


def register_error_handlers(command: Callable[..., Any]) -> Callable[..., Any]:
    """Wrap a CLI callback so errors become a JSON line on stderr and an exit status.

    Args:
        command: The click callback to wrap.

    Returns:
        The wrapped callback.
    """

    @wraps(command)
    def handled(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except ZetaError as err:
            logger.error("%s: %s", err.code, err.message)
            payload, status = {"error": err.code, "message": err.message}, err.exit_status
        except Exception:
            logger.exception("Unhandled error")
            payload, status = {"error": "INTERNAL_ERROR", "message": "An internal error occurred."}, EXIT_NUMERIC
        click.echo(json.dumps(payload), err=True)
        click.get_current_context().exit(status)

    return handled
