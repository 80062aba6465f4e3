"""Outcome of one check in a verification suite."""
from dataclasses import dataclass


@dataclass(frozen=True)
class VerificationCheck:
    """A named check: the observed quantity against its target."""

    check: str
    observed: float
    target: float
    passed: bool


@dataclass(frozen=True)
class EnvelopePoint:
    """|F_N(sigma) - a_1| against lambda_2^{sigma0 - sigma} sum |a_n| lambda_n^{-sigma0}."""

    sigma: float
    deviation: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.bound
