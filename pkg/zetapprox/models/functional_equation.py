"""Functional-equation data: scale, symmetry point and Gamma product."""
import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import ValidationError


@dataclass(frozen=True)
class GammaFactorTerm:
    """One factor Gamma(alpha s + beta) of the product Omega."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be positive; got {self.alpha}.", invariant="alpha > 0")


def _derived_constants(omega: Sequence[GammaFactorTerm]) -> tuple[float, float]:
    A = sum(term.alpha for term in omega)
    B = sum(term.alpha * math.log(term.alpha) - term.alpha for term in omega)
    return A, B


@dataclass(frozen=True)
class FunctionalEquationData:
    """The triple (lambda, delta, Omega) with derived constants A and B.

    A = sum alpha_i and B = sum (alpha_i log alpha_i - alpha_i) are always
    recomputed from ``omega``; explicitly supplied values must match exactly.
    """

    lam: float
    delta: float
    omega: tuple[GammaFactorTerm, ...]
    A: float | None = None
    B: float | None = None

    def __post_init__(self) -> None:
        omega = tuple(self.omega)
        if not float(self.lam) > 0:
            raise ValidationError(f"lambda must be positive; got {self.lam}.", invariant="lambda > 0")
        if not omega:
            raise ValidationError("omega needs at least one Gamma factor.", invariant="omega non-empty")
        A, B = _derived_constants(omega)
        if self.A is not None and self.A != A:
            raise ValidationError(f"Stored A = {self.A} but omega gives {A}.", invariant="A = sum alpha_i")
        if self.B is not None and self.B != B:
            raise ValidationError(
                f"Stored B = {self.B} but omega gives {B}.",
                invariant="B = sum(alpha_i log alpha_i - alpha_i)",
            )
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def log_lam(self) -> float:
        """log(lambda)."""
        return math.log(self.lam)

    @property
    def critical_sigma(self) -> float:
        """Abscissa of the critical line, delta / 2."""
        return self.delta / 2.0
