"""The approximation zeta_N(s) = F_N(s) + G(s) F_N(delta - s)."""
from dataclasses import dataclass

from .functional_equation import FunctionalEquationData
from .series import SeriesSpec


@dataclass(frozen=True)
class ApproximationModel:
    """A truncated series together with its functional-equation data."""

    series: SeriesSpec
    fe: FunctionalEquationData
    # Abscissa of absolute convergence; the reference point of ``envelope_check``.
    sigma0: float = 2.0
    name: str = "custom"

    @property
    def real_coefficients(self) -> bool:
        """True iff every a_n is real (needed by the critical-line census)."""
        return self.series.is_real

    @property
    def critical_sigma(self) -> float:
        """The critical line sigma = delta / 2."""
        return self.fe.critical_sigma

    @property
    def N(self) -> int:
        """Truncation length of the underlying series."""
        return self.series.N

    def __repr__(self) -> str:
        return f"<ApproximationModel name={self.name} N={self.N} delta={self.fe.delta}>"


@dataclass(frozen=True)
class Violation:
    """A failed model invariant, reported as data by ``validate``."""

    invariant: str
    message: str

    def __str__(self) -> str:
        return self.message
