"""Model service: presets, constant shifts and invariant checks."""
import logging
import math
from typing import Callable

import numpy as np

from ..errors import ValidationError
from ..models.approximation import ApproximationModel, Violation
from ..models.functional_equation import FunctionalEquationData, GammaFactorTerm
from ..models.series import Envelope, SeriesSpec

logger = logging.getLogger(__name__)

# Margin added to the smallest admissible exponents gamma and nu.
EXPONENT_MARGIN = 0.1


def make_zeta_preset(N: int) -> ApproximationModel:
    """Build the Riemann-zeta approximation sum n^{-s} + chi(s) sum n^{s-1}.

    Args:
        N: Truncation length, at least 1.

    Returns:
        The model with a_n = 1, lambda_n = n, delta = 1, lambda = sqrt(pi)
        and Omega(s) = Gamma(s/2).

    Raises:
        ValidationError: If N < 1.
    """
    if N < 1:
        raise ValidationError(f"N must be at least 1; got {N}.", invariant="N >= 1")
    series = SeriesSpec(
        coefficients=tuple(1.0 + 0j for _ in range(N)),
        exponents=tuple(float(n) for n in range(1, N + 1)),
        envelope=Envelope(C=1.0, p=1.0),
    )
    fe = FunctionalEquationData(lam=math.sqrt(math.pi), delta=1.0, omega=(GammaFactorTerm(0.5, 0.0),))
    return ApproximationModel(series=series, fe=fe, sigma0=2.0, name="zeta")


def make_dirichlet_l4_preset(N: int) -> ApproximationModel:
    """Build the approximation of L(s, chi_4) from its first N non-zero terms.

    Only odd n carry a non-zero character value, so the stored series has
    exponents 1, 3, 5, ... and coefficients +1, -1, +1, ...
    """
    if N < 1:
        raise ValidationError(f"N must be at least 1; got {N}.", invariant="N >= 1")
    series = SeriesSpec(
        coefficients=tuple(complex((-1) ** k) for k in range(N)),
        exponents=tuple(float(2 * k + 1) for k in range(N)),
        envelope=Envelope(C=2.0, p=1.0),
    )
    fe = FunctionalEquationData(lam=math.sqrt(math.pi) / 2.0, delta=1.0, omega=(GammaFactorTerm(0.5, 0.5),))
    return ApproximationModel(series=series, fe=fe, sigma0=2.0, name="dirichlet_l4")


def make_two_gamma_preset(N: int) -> ApproximationModel:
    """Synthetic model with the Gamma product Gamma(s/2) Gamma((s+1)/2)."""
    if N < 1:
        raise ValidationError(f"N must be at least 1; got {N}.", invariant="N >= 1")
    series = SeriesSpec(
        coefficients=tuple(1.0 + 0j for _ in range(N)),
        exponents=tuple(float(n) for n in range(1, N + 1)),
    )
    fe = FunctionalEquationData(
        lam=1.0 / math.pi,
        delta=1.0,
        omega=(GammaFactorTerm(0.5, 0.0), GammaFactorTerm(0.5, 0.5)),
    )
    return ApproximationModel(series=series, fe=fe, sigma0=2.0, name="two_gamma")


PRESETS: dict[str, Callable[[int], ApproximationModel]] = {
    "zeta": make_zeta_preset,
    "dirichlet_l4": make_dirichlet_l4_preset,
    "two_gamma": make_two_gamma_preset,
}


def make_preset(name: str, N: int) -> ApproximationModel:
    """Look up a preset by name.

    Raises:
        ValidationError: If the preset name is unknown.
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"Unknown preset '{name}'. Must be one of {', '.join(sorted(PRESETS))}.",
            invariant="known preset",
        ) from None
    return factory(N)


def shift_constant(model: ApproximationModel, a: complex) -> ApproximationModel:
    """Return the model whose series has a_1 replaced by a_1 - a.

    Args:
        model: The model to shift.
        a: The constant subtracted from the leading coefficient.

    Returns:
        The shifted model; everything else is shared with ``model``.
    """
    a = complex(a)
    if a == 0:
        return model
    series = model.series.with_coefficient(0, model.series.coefficients[0] - a)
    return ApproximationModel(series=series, fe=model.fe, sigma0=model.sigma0, name=model.name)


def validate(model: ApproximationModel) -> list[Violation]:
    """Check every model invariant.

    Args:
        model: The model to check.

    Returns:
        An empty list iff all invariants hold; otherwise one Violation per
        failed invariant.
    """
    violations: list[Violation] = []
    series = model.series
    exponents = series.exponents
    coefficients = series.coefficients

    if exponents[0] != 1.0:
        violations.append(Violation("lambda_1 = 1", "exponents must start at lambda_1 = 1"))
    if any(x < 1.0 for x in exponents):
        violations.append(Violation("lambda_n >= 1", "exponents must satisfy lambda_n >= 1"))
    if any(b <= a for a, b in zip(exponents, exponents[1:])):
        violations.append(Violation("strictly increasing", "exponents not strictly increasing"))

    if series.N < 3:
        violations.append(Violation("N >= 3", f"requires N >= 3; got N = {series.N}"))
    else:
        if coefficients[1] == 0:
            violations.append(Violation("a_2 != 0", "requires a₂ ≠ 0"))
        if coefficients[2] == 0:
            violations.append(Violation("a_3 != 0", "requires a₃ ≠ 0"))

    envelope = series.envelope
    for n, (c, x) in enumerate(zip(coefficients, exponents), start=1):
        bound = envelope.bound(n)
        if abs(c) > bound:
            violations.append(Violation("coefficient envelope", f"|a_{n}| = {abs(c):.6g} exceeds C n^p = {bound:.6g}"))
            break
        if x > bound:
            violations.append(Violation("exponent envelope", f"lambda_{n} = {x:.6g} exceeds C n^p = {bound:.6g}"))
            break

    fe = model.fe
    A, B = fe.A, fe.B
    A_again = sum(term.alpha for term in fe.omega)
    B_again = sum(term.alpha * math.log(term.alpha) - term.alpha for term in fe.omega)
    if A != A_again or B != B_again:
        violations.append(Violation("A, B recomputation", "stored A, B do not match omega"))

    return violations


def warn_if_degenerate(model: ApproximationModel) -> list[Violation]:
    """Log the violations of a model that counting is about to run on.

    Counting accepts degenerate models (e.g. N = 1, 2) but says so.
    """
    violations = validate(model)
    for violation in violations:
        logger.warning("Model %s: %s", model.name, violation.message)
    return violations


def default_gamma(model: ApproximationModel) -> float:
    """Smallest admissible gamma (2 A gamma > mu, mu = p + 1) plus a margin."""
    mu = model.series.envelope.p + 1.0
    return mu / (2.0 * model.fe.A) + EXPONENT_MARGIN


def default_nu(model: ApproximationModel) -> float:
    """Smallest nu with sum |a_n| lambda_n^{-delta/2} log lambda_n <= N^nu, plus a margin."""
    series = model.series
    weights = np.abs(series.coefficient_array) * np.exp(-model.critical_sigma * series.log_exponents)
    total = float(np.sum(weights * series.log_exponents))
    if series.N < 2 or total <= 1.0:
        return EXPONENT_MARGIN
    return math.log(total) / math.log(series.N) + EXPONENT_MARGIN
