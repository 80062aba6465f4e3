"""Evaluator service: F_N, zeta_N and the real function Z on the critical line."""
import logging
import math

import numpy as np

from ..errors import BranchError, ValidationError
from ..models.approximation import ApproximationModel
from ..models.line import LinePoint, LineSamples
from ..models.series import SeriesSpec
from ..models.verification import EnvelopePoint
from .special_service import PHASE_STEP_LIMIT, eval_G, log_G, log_G_derivative

logger = logging.getLogger(__name__)

# |z| below this is treated as a zero of F_N on the line; phi is left undefined there.
PHI_ZERO_TOL = 1e-12
ENVELOPE_SIGMAS = (10.0, 20.0)

ArrayLike = complex | float | np.ndarray


def _as_complex_array(s: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _principal(angle: float | np.ndarray) -> float | np.ndarray:
    return np.angle(np.exp(1j * np.asarray(angle)))


def eval_FN(series: SeriesSpec, s: ArrayLike) -> complex | np.ndarray:
    """F_N(s) = sum a_n exp(-s log lambda_n), summed in ascending n.

    Args:
        series: The truncated series.
        s: Scalar or array of points.

    Returns:
        F_N(s) with the shape of ``s``.
    """
    arr, scalar = _as_complex_array(s)
    total = np.zeros_like(arr)
    for a_n, log_n in zip(series.coefficients, series.log_exponents):
        if a_n != 0:
            total += a_n * np.exp(-arr * log_n)
    return complex(total[0]) if scalar else total


def eval_FN_derivative(series: SeriesSpec, s: ArrayLike) -> complex | np.ndarray:
    """F_N'(s) = -sum a_n log(lambda_n) lambda_n^{-s}."""
    arr, scalar = _as_complex_array(s)
    total = np.zeros_like(arr)
    for a_n, log_n in zip(series.coefficients, series.log_exponents):
        if a_n != 0 and log_n != 0:
            total -= a_n * log_n * np.exp(-arr * log_n)
    return complex(total[0]) if scalar else total


def envelope_check(model: ApproximationModel, sigmas: tuple[float, ...] = ENVELOPE_SIGMAS) -> list[EnvelopePoint]:
    """Check |F_N(sigma) - a_1| <= lambda_2^{sigma0 - sigma} sum |a_n| lambda_n^{-sigma0} on the real axis.

    Raises:
        ValidationError: If some sigma lies left of the model's sigma0.
    """
    series = model.series
    if any(sigma < model.sigma0 for sigma in sigmas):
        raise ValidationError(f"Envelope abscissae must be >= sigma0 = {model.sigma0:g}.", invariant="sigma >= sigma0")
    reference = float(np.sum(np.abs(series.coefficient_array) * np.exp(-model.sigma0 * series.log_exponents)))
    log_lambda2 = float(series.log_exponents[1]) if series.N > 1 else None
    points = []
    for sigma in sigmas:
        deviation = abs(eval_FN(series, sigma) - series.coefficients[0])
        bound = 0.0 if log_lambda2 is None else reference * math.exp((model.sigma0 - sigma) * log_lambda2)
        points.append(EnvelopePoint(sigma=float(sigma), deviation=float(deviation), bound=bound))
    return points


def eval_zetaN(model: ApproximationModel, s: ArrayLike) -> complex | np.ndarray:
    """zeta_N(s) = F_N(s) + G(s) F_N(delta - s).

    Raises:
        PoleError: Propagated from eval_G.
    """
    arr, scalar = _as_complex_array(s)
    delta = model.fe.delta
    value = eval_FN(model.series, arr) + eval_G(model.fe, arr) * eval_FN(model.series, delta - arr)
    return complex(value[0]) if scalar else value


def eval_zetaN_derivative(model: ApproximationModel, s: ArrayLike) -> complex | np.ndarray:
    """zeta_N'(s) = F_N'(s) + G(s) [(log G)'(s) F_N(delta - s) - F_N'(delta - s)]."""
    arr, scalar = _as_complex_array(s)
    reflected = model.fe.delta - arr
    g = eval_G(model.fe, arr)
    value = eval_FN_derivative(model.series, arr) + g * (
        log_G_derivative(model.fe, arr) * eval_FN(model.series, reflected)
        - eval_FN_derivative(model.series, reflected)
    )
    return complex(value[0]) if scalar else value


def proj(alpha: float, zvalue: ArrayLike) -> float | np.ndarray:
    """proj_alpha z = Re(z e^{-i alpha}), the component of z along direction alpha."""
    value = np.real(np.asarray(zvalue, dtype=complex) * np.exp(-1j * alpha))
    return float(value) if np.ndim(value) == 0 else value


def theta_raw(model: ApproximationModel, t: float | np.ndarray) -> float | np.ndarray:
    """Im log G(delta/2 + it): continuous in t, equal to arg G up to 2 pi k."""
    t_arr = np.asarray(t, dtype=float)
    value = np.imag(log_G(model.fe, model.critical_sigma + 1j * np.atleast_1d(t_arr)))
    return float(value[0]) if t_arr.ndim == 0 else value


def theta_offset(model: ApproximationModel, t0: float) -> float:
    """Multiple of 2 pi that puts theta(t0) on the principal branch.

    A scan adds this one offset to ``theta_raw`` everywhere, so independently
    evaluated chunks share a single branch.
    """
    raw = theta_raw(model, t0)
    return float(_principal(raw) - raw)


def line_samples(model: ApproximationModel, t: np.ndarray, offset: float | None = None) -> LineSamples:
    """Evaluate z, theta, phi and Z along the critical line.

    Args:
        model: The approximation model.
        t: Increasing ordinates.
        offset: Branch offset for theta; defaults to the principal branch at t[0].

    Returns:
        Column-oriented samples.
    """
    t = np.asarray(t, dtype=float)
    s = model.critical_sigma + 1j * t
    z = eval_FN(model.series, s)
    raw = theta_raw(model, t)
    if offset is None:
        offset = float(_principal(raw[0]) - raw[0])
    theta = raw + offset
    Z = 2.0 * np.real(z * np.exp(-0.5j * theta))
    phi = np.unwrap(np.angle(z))
    phi[np.abs(z) < PHI_ZERO_TOL] = np.nan
    return LineSamples(t=t, z=z, theta=theta, phi=phi, Z=Z)


def hardy_Z(model: ApproximationModel, t: float | np.ndarray, offset: float) -> float | np.ndarray:
    """Z(t) = 2 Re(z(t) e^{-i theta(t)/2}) with theta = theta_raw + offset."""
    t_arr = np.asarray(t, dtype=float)
    s = model.critical_sigma + 1j * np.atleast_1d(t_arr)
    z = eval_FN(model.series, s)
    theta = theta_raw(model, np.atleast_1d(t_arr)) + offset
    value = 2.0 * np.real(z * np.exp(-0.5j * theta))
    return float(value[0]) if t_arr.ndim == 0 else value


def line_point(model: ApproximationModel, t: float, prev: LinePoint | None = None) -> LinePoint:
    """Evaluate one point of the critical line, continuing branches from ``prev``.

    theta is continued exactly through the continuous log-gamma phase; phi is
    continued by a principal step that must stay below pi/2.

    Args:
        model: The approximation model.
        t: Ordinate.
        prev: The previous point of the same scan, if any.

    Returns:
        The LinePoint at t.

    Raises:
        BranchError: If the phi step from ``prev`` cannot be certified.
    """
    t = float(t)
    z = complex(eval_FN(model.series, model.critical_sigma + 1j * t))
    raw = theta_raw(model, t)
    if prev is None:
        theta = float(_principal(raw))
    else:
        theta = prev.theta + (raw - theta_raw(model, prev.t))

    phi: float | None = None
    if abs(z) >= PHI_ZERO_TOL:
        if prev is None or prev.phi is None:
            phi = math.atan2(z.imag, z.real)
        else:
            step = float(np.angle(z * np.exp(-1j * prev.phi)))
            if abs(step) >= PHASE_STEP_LIMIT:
                raise BranchError(
                    f"arg z moved by {step:.3f} rad between t = {prev.t:.9g} and t = {t:.9g}; "
                    "take a smaller step."
                )
            phi = prev.phi + step

    Z = 2.0 * (z * complex(math.cos(theta / 2.0), -math.sin(theta / 2.0))).real
    return LinePoint(t=t, z=z, theta=theta, phi=phi, Z=Z)
