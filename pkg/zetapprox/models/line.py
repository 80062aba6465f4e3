"""Critical-line sample and census models."""
import enum
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


class PointKind(str, enum.Enum):
    """Row kinds in a line-scan export."""

    SAMPLE = "sample"
    ZERO = "zero"
    CANDIDATE = "candidate"
    HIT = "hit"


class SimplicityStatus(str, enum.Enum):
    """Outcome of the simplicity diagnostic at one ordinate."""

    SIMPLE = "simple"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LinePoint:
    """One point on the critical line.

    ``phi`` is None where |z| is below tolerance; Z never needs it.
    """

    t: float
    z: complex
    theta: float
    phi: float | None
    Z: float


@dataclass(frozen=True, eq=False)
class LineSamples:
    """Column-oriented samples of a line scan."""

    t: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    Z: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[LinePoint]:
        for k in range(len(self.t)):
            phi = float(self.phi[k])
            yield LinePoint(
                t=float(self.t[k]),
                z=complex(self.z[k]),
                theta=float(self.theta[k]),
                phi=None if np.isnan(phi) else phi,
                Z=float(self.Z[k]),
            )


@dataclass(frozen=True, eq=False)
class LineScanResult:
    """Result of a zero scan or an a-value census on the critical line."""

    t_range: tuple[float, float]
    samples: LineSamples
    zero_ordinates: list[float] = field(default_factory=list)
    candidates: list[float] = field(default_factory=list)
    candidate_residuals: list[float] = field(default_factory=list)
    hits: list[float] = field(default_factory=list)
    hit_tol: float | None = None
    a: complex | None = None
    # Hit counts at alternative tolerances, reported side by side.
    hit_sweep: dict[float, int] = field(default_factory=dict)

    @property
    def zero_count(self) -> int:
        """Number of sign-change zeros found."""
        return len(self.zero_ordinates)

    @property
    def empirical(self) -> int:
        """The count compared against predictions: zeros, or hits for a census."""
        return len(self.hits) if self.a is not None else len(self.zero_ordinates)


@dataclass(frozen=True)
class SimplicityRow:
    """Simplicity diagnostic at one ordinate."""

    t: float
    arg_g_derivative: float
    z_slope: float
    status: SimplicityStatus

    @property
    def simple(self) -> bool:
        """True when the phase derivative certifies simplicity."""
        return self.status == SimplicityStatus.SIMPLE
