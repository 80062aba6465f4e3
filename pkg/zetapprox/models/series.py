"""Truncated general Dirichlet series model."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class Envelope:
    """Polynomial growth envelope: |a_n| <= C n^p and lambda_n <= C n^p."""

    C: float = 1.0
    p: float = 1.0

    def bound(self, n: int) -> float:
        """Return the envelope value C n^p at index n (1-based)."""
        return self.C * float(n) ** self.p


@dataclass(frozen=True)
class SeriesSpec:
    """Coefficients a_n and exponents lambda_n of F_N(s) = sum a_n lambda_n^{-s}.

    Structural consistency (equal lengths, at least one term) is enforced on
    construction; the model-level invariants are reported by
    ``model_service.validate`` so that degenerate series stay constructible.
    """

    coefficients: tuple[complex, ...]
    exponents: tuple[float, ...]
    envelope: Envelope = field(default_factory=Envelope)

    def __post_init__(self) -> None:
        coefficients = tuple(complex(c) for c in self.coefficients)
        exponents = tuple(float(x) for x in self.exponents)
        if not coefficients:
            raise ValidationError("A series needs at least one term.", invariant="N >= 1")
        if len(coefficients) != len(exponents):
            raise ValidationError(
                f"{len(coefficients)} coefficients but {len(exponents)} exponents.",
                invariant="coefficients and exponents have equal length",
            )
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "exponents", exponents)

    @classmethod
    def from_sequences(
        cls,
        coefficients: Sequence[complex],
        exponents: Sequence[float],
        envelope: Envelope | None = None,
    ) -> "SeriesSpec":
        """Build a series from any pair of sequences."""
        return cls(tuple(coefficients), tuple(exponents), envelope or Envelope())

    @property
    def N(self) -> int:
        """Truncation length."""
        return len(self.coefficients)

    @property
    def is_real(self) -> bool:
        """True iff every coefficient has zero imaginary part."""
        return all(c.imag == 0.0 for c in self.coefficients)

    @cached_property
    def coefficient_array(self) -> np.ndarray:
        """Coefficients as a complex numpy array."""
        return np.asarray(self.coefficients, dtype=complex)

    @cached_property
    def log_exponents(self) -> np.ndarray:
        """log(lambda_n) as a float numpy array."""
        return np.log(np.asarray(self.exponents, dtype=float))

    def with_coefficient(self, index: int, value: complex) -> "SeriesSpec":
        """Return a copy with one coefficient replaced (0-based index)."""
        coefficients = list(self.coefficients)
        coefficients[index] = complex(value)
        return SeriesSpec(tuple(coefficients), self.exponents, self.envelope)

    def scaled(self, factor: float) -> "SeriesSpec":
        """Return a copy with every coefficient multiplied by ``factor``."""
        return SeriesSpec(tuple(c * factor for c in self.coefficients), self.exponents, self.envelope)
