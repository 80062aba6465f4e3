"""Inputs and outputs of the asymptotic count predictions."""
import enum
from dataclasses import dataclass

from ..errors import ValidationError


class PsiCase(str, enum.Enum):
    """The three branches of the Psi correction."""

    A_NE_A1_EQ_0 = "a != a1 = 0"
    A_EQ_A1_NE_0 = "a = a1 != 0"
    OTHERWISE = "otherwise"


@dataclass(frozen=True)
class PredictionInput:
    """Model constants and window for the counting asymptotic."""

    A: float
    B: float
    lam: float
    lambda2: float
    a: complex
    a1: complex
    T: float
    U: float
    N: int
    gamma: float

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ValidationError(f"T must be positive; got {self.T}.", invariant="T > 0")
        if self.U < 0:
            raise ValidationError(f"U must be non-negative; got {self.U}.", invariant="U >= 0")


@dataclass(frozen=True)
class Prediction:
    """Main terms of a predicted count and the error scale reported beside them."""

    value: float
    error_scale: float
    psi: float
    psi_case: PsiCase


@dataclass(frozen=True)
class DiscrepancyRecord:
    """Empirical against predicted count."""

    empirical: float
    predicted: float
    difference: float
    normalized: float
    scale: float
