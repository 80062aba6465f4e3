import dataclasses
import math

import mpmath
import numpy as np
import pytest

from zetapprox.errors import BranchError, ValidationError
from zetapprox.models import ApproximationModel
from zetapprox.services.evaluator_service import (
    eval_FN,
    eval_zetaN,
    eval_zetaN_derivative,
    envelope_check,
    hardy_Z,
    line_point,
    line_samples,
    proj,
    theta_offset,
)
from zetapprox.services.special_service import eval_G


def _direct_zeta_n(s: complex, N: int) -> complex:
    ms = mpmath.mpc(s)
    chi = mpmath.pi ** (ms - 0.5) * mpmath.gamma((1 - ms) / 2) / mpmath.gamma(ms / 2)
    head = sum(mpmath.mpf(n) ** (-ms) for n in range(1, N + 1))
    tail = sum(mpmath.mpf(n) ** (ms - 1) for n in range(1, N + 1))
    return complex(head + chi * tail)


def test_eval_FN_at_two(zeta3):
    assert eval_FN(zeta3.series, 2.0) == pytest.approx(1 + 1 / 4 + 1 / 9)


@pytest.mark.parametrize("s", [0.5 + 14.1j, 2 + 50j, -1.5 + 120j, 0.75 + 1000j])
def test_eval_zetaN_matches_direct_formula(zeta3, s):
    expected = _direct_zeta_n(s, 3)
    assert abs(eval_zetaN(zeta3, s) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_vectorised_evaluation_agrees_with_scalar(zeta3):
    s = np.array([0.5 + 20j, 1 + 30j, -1 + 40j])
    values = eval_zetaN(zeta3, s)
    for point, value in zip(s, values):
        assert value == pytest.approx(eval_zetaN(zeta3, complex(point)), rel=1e-13)


def test_derivative_matches_central_difference(zeta3):
    s, h = 0.3 + 77j, 1e-5
    numeric = (eval_zetaN(zeta3, s + h) - eval_zetaN(zeta3, s - h)) / (2 * h)
    assert abs(eval_zetaN_derivative(zeta3, s) - numeric) <= 1e-6 * abs(numeric)


def test_proj():
    assert proj(0.0, 3 + 4j) == pytest.approx(3.0)
    assert proj(math.pi / 2, 3 + 4j) == pytest.approx(4.0)


def test_hardy_Z_has_the_modulus_of_zeta_N(zeta3):
    t = np.linspace(100, 130, 50)
    Z = hardy_Z(zeta3, t, theta_offset(zeta3, 100.0))
    np.testing.assert_allclose(np.abs(Z), np.abs(eval_zetaN(zeta3, 0.5 + 1j * t)), rtol=1e-9, atol=1e-12)


def test_Z_scales_with_the_coefficients(zeta3):
    doubled = ApproximationModel(series=zeta3.series.scaled(2.0), fe=zeta3.fe)
    t = np.linspace(200, 210, 20)
    offset = theta_offset(zeta3, 200.0)
    np.testing.assert_allclose(hardy_Z(doubled, t, offset), 2 * hardy_Z(zeta3, t, offset), rtol=1e-12)


def test_line_samples_follow_the_principal_branch_at_the_start(zeta3):
    samples = line_samples(zeta3, np.linspace(50, 60, 400))
    assert -math.pi < samples.theta[0] <= math.pi
    assert np.max(np.abs(np.diff(samples.theta))) < 0.1
    assert np.max(np.abs(np.diff(samples.phi))) < math.pi / 2
    points = list(samples)
    assert points[3].Z == pytest.approx(samples.Z[3])


def test_line_point_continues_branches(zeta3):
    prev = line_point(zeta3, 500.0)
    for k in range(1, 50):
        point = line_point(zeta3, 500.0 + 0.01 * k, prev)
        assert abs(point.theta - prev.theta) < 0.1
        assert abs(point.phi - prev.phi) < math.pi / 2
        prev = point
    samples = line_samples(zeta3, np.array([500.0, prev.t]))
    assert prev.theta == pytest.approx(samples.theta[-1], abs=1e-9)


def test_line_point_refuses_large_phase_steps(zeta3):
    prev = line_point(zeta3, 80.0)
    tampered = dataclasses.replace(prev, phi=prev.phi + 2.0)
    with pytest.raises(BranchError):
        line_point(zeta3, 80.0, tampered)


@pytest.mark.parametrize("preset", ["zeta3", "l4", "two_gamma"])
def test_reflection_residual(preset, request):
    model = request.getfixturevalue(preset)
    rng = np.random.default_rng(8)
    c = model.critical_sigma
    s = rng.uniform(c - 3, c + 3, 100) + 1j * rng.uniform(10, 1000, 100)
    direct = eval_zetaN(model, s)
    reflected = eval_G(model.fe, s) * eval_zetaN(model, model.fe.delta - s)
    assert np.max(np.abs(direct - reflected) / np.maximum(1.0, np.abs(direct))) <= 1e-9


def test_real_coefficients_give_conjugate_symmetry(zeta3):
    rng = np.random.default_rng(9)
    s = rng.uniform(-2, 3, 100) + 1j * rng.uniform(10, 500, 100)
    np.testing.assert_allclose(eval_FN(zeta3.series, np.conj(s)), np.conj(eval_FN(zeta3.series, s)), rtol=1e-13)
    np.testing.assert_allclose(eval_zetaN(zeta3, np.conj(s)), np.conj(eval_zetaN(zeta3, s)), rtol=1e-10)


def test_proj_is_linear_and_matches_the_conjugate_form():
    rng = np.random.default_rng(10)
    u = rng.normal(size=200) + 1j * rng.normal(size=200)
    v = rng.normal(size=200) + 1j * rng.normal(size=200)
    for alpha in rng.uniform(-math.pi, math.pi, 10):
        np.testing.assert_allclose(proj(alpha, u + v), proj(alpha, u) + proj(alpha, v), atol=1e-14)
        conjugate_form = u * np.exp(-1j * alpha) + np.conj(u) * np.exp(1j * alpha)
        np.testing.assert_allclose(2 * proj(alpha, u), conjugate_form.real, atol=1e-14)
        np.testing.assert_allclose(conjugate_form.imag, 0.0, atol=1e-14)


@pytest.mark.parametrize("preset", ["zeta3", "l4", "two_gamma"])
def test_envelope_of_F_N(preset, request):
    model = request.getfixturevalue(preset)
    points = envelope_check(model)
    assert [point.sigma for point in points] == [10.0, 20.0]
    assert all(point.passed for point in points)
    assert points[1].deviation < points[0].deviation


def test_envelope_for_the_zeta_preset(zeta3):
    ten = envelope_check(zeta3, (10.0,))[0]
    assert ten.deviation == pytest.approx(2.0 ** -10 + 3.0 ** -10)
    assert ten.bound == pytest.approx(2.0 ** -8 * (1 + 1 / 4 + 1 / 9))


def test_envelope_needs_sigma_right_of_sigma0(zeta3):
    with pytest.raises(ValidationError):
        envelope_check(zeta3, (1.0,))
