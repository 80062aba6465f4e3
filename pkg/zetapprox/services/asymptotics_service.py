"""Asymptotics service: predicted a-value counts and their comparison with censuses."""
import logging
import math

from ..errors import ValidationError
from ..models.approximation import ApproximationModel
from ..models.line import LineScanResult
from ..models.prediction import DiscrepancyRecord, Prediction, PredictionInput, PsiCase
from ..models.region import ClusterReport, CountReport

logger = logging.getLogger(__name__)


def classify_psi(a: complex, a1: complex) -> PsiCase:
    """Which branch of the Psi case split (a, a_1) falls in; a and a_1 are compared exactly."""
    a, a1 = complex(a), complex(a1)
    if a != a1 and a1 == 0:
        return PsiCase.A_NE_A1_EQ_0
    if a == a1 and a1 != 0:
        return PsiCase.A_EQ_A1_NE_0
    return PsiCase.OTHERWISE


def psi_constant(a: complex, a1: complex, lambda2: float) -> float:
    """The Psi correction of the linear term.

    Args:
        a: Target value.
        a1: Leading coefficient of the series.
        lambda2: Second exponent, greater than 1.

    Returns:
        (log lambda_2)/2 if a != a_1 = 0, -(log lambda_2)/2 if a = a_1 != 0,
        and 0 otherwise.

    Raises:
        ValidationError: If lambda2 <= 1.
    """
    if not lambda2 > 1.0:
        raise ValidationError(f"lambda_2 must exceed 1; got {lambda2}.", invariant="lambda_2 > 1")
    case = classify_psi(a, a1)
    if case == PsiCase.A_NE_A1_EQ_0:
        return 0.5 * math.log(lambda2)
    if case == PsiCase.A_EQ_A1_NE_0:
        return -0.5 * math.log(lambda2)
    return 0.0


def _main_term(A: float, T: float, U: float) -> float:
    return (A / math.pi) * ((T + U) * math.log(T + U) - T * math.log(T))


def predicted_count(inputs: PredictionInput) -> Prediction:
    """Main terms of the a-value count at height (T, T+U).

    (A/pi)((T+U) log(T+U) - T log T) + ((B - log lambda + Psi)/pi) U. The error
    budget N^gamma log(T+U) is returned as a scale and never added.
    """
    psi = psi_constant(inputs.a, inputs.a1, inputs.lambda2)
    case = classify_psi(inputs.a, inputs.a1)
    value = _main_term(inputs.A, inputs.T, inputs.U)
    value += (inputs.B - math.log(inputs.lam) + psi) / math.pi * inputs.U
    scale = inputs.N ** inputs.gamma * math.log(inputs.T + inputs.U)
    return Prediction(value=value, error_scale=scale, psi=psi, psi_case=case)


def prediction_input(model: ApproximationModel, a: complex, T: float, U: float, gamma: float) -> PredictionInput:
    """Collect the model constants a prediction needs."""
    series = model.series
    if series.N < 2:
        raise ValidationError("Predictions need lambda_2, so N >= 2.", invariant="N >= 2")
    return PredictionInput(
        A=model.fe.A,
        B=model.fe.B,
        lam=model.fe.lam,
        lambda2=series.exponents[1],
        a=complex(a),
        a1=series.coefficients[0],
        T=T,
        U=U,
        N=series.N,
        gamma=gamma,
    )


def zeta_reduced_count(T: float, U: float, psi: float) -> float:
    """Zeta-specialised form of the main terms, computed independently.

    (1/2pi)((T+U) log(T+U) - T log T) + (U/2pi) log(1/2pi) + ((2 Psi - 1)/2pi) U.
    """
    two_pi = 2.0 * math.pi
    return (
        ((T + U) * math.log(T + U) - T * math.log(T)) / two_pi
        + U / two_pi * math.log(1.0 / two_pi)
        + (2.0 * psi - 1.0) / two_pi * U
    )


def critical_zero_main_term(model: ApproximationModel, T: float, U: float) -> float:
    """Lower-bound main term for zeros on the critical line: (A/pi)((T+U) log(T+U) - T log T)."""
    return _main_term(model.fe.A, T, U)


def cluster_error_scale(N: int, gamma: float, T: float, U: float, eps: float) -> float:
    """U log N / eps + N^{2 gamma} log(T+U) / eps."""
    if not eps > 0:
        raise ValidationError(f"epsilon must be positive; got {eps}.", invariant="epsilon > 0")
    return (U * math.log(max(N, 2)) + N ** (2.0 * gamma) * math.log(T + U)) / eps


def critical_line_scale(N: int, U: float) -> float:
    """U log N, the size of a-value counts on the critical line for a != 0."""
    return U * math.log(max(N, 2))


def compare(
    report: CountReport | LineScanResult | ClusterReport | float,
    prediction: float,
    scale: float,
) -> DiscrepancyRecord:
    """Discrepancy between an empirical count and a prediction.

    Args:
        report: A census (its ``empirical`` count is used) or a bare count.
        prediction: The predicted value.
        scale: Normaliser for the difference.

    Returns:
        DiscrepancyRecord; the normalized value is NaN when ``scale`` is 0.
    """
    empirical = float(report) if isinstance(report, (int, float)) else float(report.empirical)
    difference = empirical - prediction
    normalized = difference / scale if scale else math.nan
    logger.debug("empirical %g against predicted %.6g (normalized %.3g)", empirical, prediction, normalized)
    return DiscrepancyRecord(
        empirical=empirical, predicted=prediction, difference=difference, normalized=normalized, scale=scale
    )
