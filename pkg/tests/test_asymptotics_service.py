import math

import numpy as np
import pytest

from zetapprox.errors import ValidationError
from zetapprox.models import ClusterReport, CountReport, PredictionInput, PsiCase, RectRegion
from zetapprox.services.asymptotics_service import (
    classify_psi,
    cluster_error_scale,
    compare,
    critical_line_scale,
    critical_zero_main_term,
    predicted_count,
    prediction_input,
    psi_constant,
    zeta_reduced_count,
)
from zetapprox.services.counting_service import calibrate_sigma_bound, count_region


@pytest.mark.parametrize(
    "a, a1, expected, case",
    [
        (3, 0, 0.5 * math.log(2), PsiCase.A_NE_A1_EQ_0),
        (1, 1, -0.5 * math.log(2), PsiCase.A_EQ_A1_NE_0),
        (0, 0, 0.0, PsiCase.OTHERWISE),
        (2, 1, 0.0, PsiCase.OTHERWISE),
        (0, 1, 0.0, PsiCase.OTHERWISE),
        (1 + 1j, 1, 0.0, PsiCase.OTHERWISE),
    ],
)
def test_psi_case_table(a, a1, expected, case):
    assert psi_constant(a, a1, 2.0) == pytest.approx(expected)
    assert classify_psi(a, a1) == case
    assert isinstance(psi_constant(a, a1, 2.0), float)


def test_psi_compares_exactly():
    assert classify_psi(1 + 1e-15, 1) == PsiCase.OTHERWISE
    assert psi_constant(1 + 1e-15, 1, 2.0) == 0.0


def test_psi_needs_lambda2_above_one():
    with pytest.raises(ValidationError):
        psi_constant(1, 1, 1.0)


def test_empty_window_predicts_nothing(zeta3):
    prediction = predicted_count(prediction_input(zeta3, 2, 1000.0, 0.0, 1.1))
    assert prediction.value == 0.0


def test_zeta_reduction_identity(zeta3):
    rng = np.random.default_rng(3)
    for T, U in zip(rng.uniform(10, 1e5, 50), rng.uniform(1, 1e4, 50)):
        for a in (0, 1, 2):
            prediction = predicted_count(prediction_input(zeta3, a, T, U, 1.1))
            reduced = zeta_reduced_count(T, U, prediction.psi)
            assert prediction.value == pytest.approx(reduced, rel=1e-12, abs=1e-9)


def test_prediction_grows_with_the_window(zeta3):
    values = [predicted_count(prediction_input(zeta3, 2, 1000.0, U, 1.1)).value for U in (10, 100, 1000)]
    assert values == sorted(values)
    assert values[0] > 0


def test_error_scale(zeta3):
    prediction = predicted_count(prediction_input(zeta3, 2, 1000.0, 1000.0, 1.1))
    assert prediction.error_scale == pytest.approx(3 ** 1.1 * math.log(2000.0))
    assert prediction.psi_case == PsiCase.OTHERWISE


def test_prediction_input_validates_window():
    with pytest.raises(ValidationError):
        PredictionInput(A=0.5, B=0.0, lam=1.0, lambda2=2.0, a=0, a1=1, T=0.0, U=1.0, N=3, gamma=1.1)


def test_compare_records_the_discrepancy():
    report = CountReport(region=RectRegion(-1, 2, 10, 20), a=0, winding=7)
    record = compare(report, 5.0, 4.0)
    assert (record.empirical, record.predicted, record.difference, record.normalized) == (7, 5.0, 2.0, 0.5)
    assert compare(7, 7.0, 2.0).normalized == 0.0


def test_window_counts_are_additive():
    lower = ClusterReport(total=4, within=4, epsilon=0.1)
    upper = ClusterReport(total=6, within=5, epsilon=0.1)
    assert compare(lower, 0, 1).empirical + compare(upper, 0, 1).empirical == 10


def test_other_scales(zeta3):
    assert critical_zero_main_term(zeta3, 1000.0, 100.0) == pytest.approx(
        (1100 * math.log(1100) - 1000 * math.log(1000)) / (2 * math.pi)
    )
    assert critical_line_scale(3, 100.0) == pytest.approx(100 * math.log(3))
    assert cluster_error_scale(3, 1.1, 1000.0, 100.0, 0.5) == pytest.approx(
        (100 * math.log(3) + 3 ** 2.2 * math.log(1100)) / 0.5
    )


@pytest.mark.slow
def test_strip_count_follows_the_asymptotic(zeta3):
    T, U = 1000.0, 1000.0
    bound = calibrate_sigma_bound(zeta3, 2, np.linspace(T, T + U, 20))
    report = count_region(zeta3, 2, RectRegion(0.5 - bound, 0.5 + bound, T, T + U))
    prediction = predicted_count(prediction_input(zeta3, 2, T, U, 1.1))
    record = compare(report, prediction.value, prediction.error_scale)
    assert abs(record.normalized) <= 5
