"""Special-function service: log-gamma, digamma, G(s) and continuous arguments.

Every function accepts a scalar or a numpy array and returns the same shape
(a Python complex/float for scalar input).
"""
import logging
import math
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..errors import DepthExceededError, DomainError, NearZeroError, PoleError
from ..models.functional_equation import FunctionalEquationData
from ..models.path import PathSample

logger = logging.getLogger(__name__)

# B_2, B_4, ..., B_20.
BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)
STIRLING_TERMS = 8
# Arguments are shifted by the recurrence until |z| >= SHIFT_RADIUS and Re z >= 1/2.
SHIFT_RADIUS = 12.0
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Accepted argument step between consecutive path samples.
PHASE_STEP_LIMIT = math.pi / 2.0
# |f| below NEAR_ZERO_RTOL times the largest |f| among its neighbours counts as a root on the path.
NEAR_ZERO_RTOL = 1e-12
# Samples on each side that make up the neighbourhood of a path sample.
NEAR_ZERO_WINDOW = 2
MAX_REFINE_DEPTH = 40
MIN_PATH_POINTS = 16

ArrayLike = complex | float | np.ndarray


def _as_complex_array(z: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _check_domain(z: np.ndarray) -> None:
    on_axis = (z.imag == 0.0) & (z.real <= 0.0)
    if not np.any(on_axis):
        return
    bad = z[on_axis]
    poles = bad.real == np.round(bad.real)
    if np.any(poles):
        raise PoleError(f"Gamma pole at z = {bad[poles][0].real:g}.")
    raise DomainError(f"log-gamma requested on the branch cut at z = {bad[0].real:g}.")


def _shift_counts(z: np.ndarray) -> np.ndarray:
    x, y = z.real, z.imag
    k1 = np.ceil(np.maximum(0.0, 0.5 - x))
    reach = np.sqrt(np.maximum(0.0, SHIFT_RADIUS**2 - y**2))
    k2 = np.ceil(np.maximum(0.0, reach - (x + k1)))
    return (k1 + k2).astype(int)


def _stirling_log_gamma(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    power = inv
    for m, b in enumerate(BERNOULLI[:STIRLING_TERMS], start=1):
        series = series + (b / (2 * m * (2 * m - 1))) * power
        power = power * inv2
    return (w - 0.5) * np.log(w) - w + HALF_LOG_2PI + series


def _stirling_digamma(w: np.ndarray) -> np.ndarray:
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    power = inv2
    for m, b in enumerate(BERNOULLI[:STIRLING_TERMS], start=1):
        series = series + (b / (2 * m)) * power
        power = power * inv2
    return np.log(w) - 0.5 / w - series


def log_gamma(z: ArrayLike) -> complex | np.ndarray:
    """Principal branch of log Gamma(z).

    The argument is moved by the recurrence log Gamma(z) = log Gamma(z + k)
    - sum_{j<k} log(z + j) into Re z >= 1/2, |z| >= 12, where the Stirling
    series with Bernoulli terms is used. Summing principal logarithms keeps
    the result on the principal branch, including for Re z < 0.

    Args:
        z: Scalar or array argument.

    Returns:
        log Gamma(z), same shape as ``z``.

    Raises:
        PoleError: At non-positive integers.
        DomainError: On the negative real axis.
    """
    arr, scalar = _as_complex_array(z)
    _check_domain(arr)
    k = _shift_counts(arr)
    acc = np.zeros_like(arr)
    for j in range(int(k.max(initial=0))):
        active = k > j
        acc[active] += np.log(arr[active] + j)
    result = _stirling_log_gamma(arr + k) - acc
    return complex(result[0]) if scalar else result


def digamma(z: ArrayLike) -> complex | np.ndarray:
    """psi(z) = Gamma'(z) / Gamma(z) by the same shift-then-asymptotic scheme.

    Raises:
        PoleError: At non-positive integers.
    """
    arr, scalar = _as_complex_array(z)
    on_axis = (arr.imag == 0.0) & (arr.real <= 0.0) & (arr.real == np.round(arr.real))
    if np.any(on_axis):
        raise PoleError(f"digamma pole at z = {arr[on_axis][0].real:g}.")
    k = _shift_counts(arr)
    acc = np.zeros_like(arr)
    for j in range(int(k.max(initial=0))):
        active = k > j
        acc[active] += 1.0 / (arr[active] + j)
    result = _stirling_digamma(arr + k) - acc
    return complex(result[0]) if scalar else result


def log_G(fe: FunctionalEquationData, s: ArrayLike) -> complex | np.ndarray:
    """log G(s) = (2s - delta) log lambda + sum [log Gamma(alpha(delta-s)+beta) - log Gamma(alpha s+beta)].

    The imaginary part is continuous in s away from the real axis, which makes
    it a ready-made continuous arg G.
    """
    arr, scalar = _as_complex_array(s)
    total = (2.0 * arr - fe.delta) * fe.log_lam
    for term in fe.omega:
        total = total + log_gamma(term.alpha * (fe.delta - arr) + term.beta)
        total = total - log_gamma(term.alpha * arr + term.beta)
    return complex(total[0]) if scalar else total


def eval_G(fe: FunctionalEquationData, s: ArrayLike) -> complex | np.ndarray:
    """G(s) = lambda^{2s-delta} Omega(delta-s) / Omega(s).

    Raises:
        PoleError: If any Gamma argument hits a pole.
    """
    value = np.exp(log_G(fe, s))
    return complex(value) if np.ndim(value) == 0 else value


def log_G_derivative(fe: FunctionalEquationData, s: ArrayLike) -> complex | np.ndarray:
    """d/ds log G(s) = 2 log lambda - sum alpha_i [psi(alpha_i(delta-s)+beta_i) + psi(alpha_i s+beta_i)]."""
    arr, scalar = _as_complex_array(s)
    total = np.full_like(arr, 2.0 * fe.log_lam)
    for term in fe.omega:
        total = total - term.alpha * (
            digamma(term.alpha * (fe.delta - arr) + term.beta) + digamma(term.alpha * arr + term.beta)
        )
    return complex(total[0]) if scalar else total


def arg_G_derivative(fe: FunctionalEquationData, sigma: float, t: float | np.ndarray) -> float | np.ndarray:
    """d/dt arg G(sigma + it), assembled from digamma.

    Equal to 2 log lambda + sum(-alpha_i Re psi(alpha_i s + beta_i)
    - alpha_i Re psi(alpha_i(delta - s) + beta_i)).
    """
    t_arr = np.asarray(t, dtype=float)
    value = np.real(log_G_derivative(fe, sigma + 1j * np.atleast_1d(t_arr)))
    return float(value[0]) if t_arr.ndim == 0 else value


def _local_scale(moduli: np.ndarray, window: int) -> np.ndarray:
    """Largest modulus within ``window`` samples of each sample, the sample included."""
    padded = np.pad(moduli, window, mode="edge")
    n = len(moduli)
    return np.max([padded[k : k + n] for k in range(2 * window + 1)], axis=0)


def unwrap_arg(
    f: Callable[[np.ndarray], np.ndarray],
    start: complex,
    end: complex,
    tol: float = NEAR_ZERO_RTOL,
    max_step: float | None = None,
    min_points: int = MIN_PATH_POINTS,
    max_depth: int = MAX_REFINE_DEPTH,
) -> PathSample:
    """Track arg f continuously along the segment from ``start`` to ``end``.

    The segment is sampled uniformly (spacing at most ``max_step``) and every
    interval whose principal argument step reaches pi/2 is bisected, level by
    level, until no such interval remains.

    Args:
        f: Vectorised function of complex numpy arrays.
        start: Initial point of the segment.
        end: Final point of the segment.
        tol: Relative near-zero tolerance against the largest |f| among the
            neighbouring samples.
        max_step: Largest initial spacing in s; None uses ``min_points`` only.
        min_points: Minimum number of initial samples.
        max_depth: Maximum number of bisection levels.

    Returns:
        PathSample whose argument steps are all below pi/2.

    Raises:
        NearZeroError: If |f| falls below the tolerance at a sample.
        DepthExceededError: If refinement needs more than ``max_depth`` levels.
    """
    start, end = complex(start), complex(end)
    count = min_points
    if max_step is not None and max_step > 0:
        count = max(count, int(math.ceil(abs(end - start) / max_step)) + 1)
    u = np.linspace(0.0, 1.0, count)
    values = np.asarray(f(start + u * (end - start)), dtype=complex)

    for depth in range(max_depth + 1):
        moduli = np.abs(values)
        small = moduli <= tol * _local_scale(moduli, NEAR_ZERO_WINDOW)
        if np.any(small):
            k = int(np.argmax(small))
            raise NearZeroError(start + u[k] * (end - start), float(moduli[k]))
        steps = np.angle(values[1:] * np.conj(values[:-1]))
        bad = np.abs(steps) >= PHASE_STEP_LIMIT
        if not np.any(bad):
            break
        if depth == max_depth:
            raise DepthExceededError(max_depth)
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        new_values = np.asarray(f(start + mids * (end - start)), dtype=complex)
        u = np.concatenate([u, mids])
        values = np.concatenate([values, new_values])
        order = np.argsort(u, kind="stable")
        u, values = u[order], values[order]
        logger.debug("unwrap level %d: %d intervals bisected", depth + 1, int(bad.sum()))

    unwrapped = np.angle(values[0]) + np.concatenate([[0.0], np.cumsum(steps)])
    return PathSample(points=start + u * (end - start), values=values, unwrapped_arg=unwrapped)


def monotone_threshold(
    fe: FunctionalEquationData,
    sigma: float,
    t_max: float,
    t_min: float = 0.1,
    samples: int = 2000,
) -> float | None:
    """Smallest t beyond which d/dt arg G(sigma + it) stays negative on a sampled grid.

    Args:
        fe: Functional-equation data.
        sigma: Abscissa of the vertical line.
        t_max: Upper end of the searched range.
        t_min: Lower end of the searched range.
        samples: Grid size (log-spaced).

    Returns:
        The threshold, ``t_min`` if the derivative is negative throughout, or
        None if it is still non-negative at ``t_max``.
    """
    grid = np.geomspace(t_min, t_max, samples)
    derivative = arg_G_derivative(fe, sigma, grid)
    non_negative = np.flatnonzero(derivative >= 0.0)
    if non_negative.size == 0:
        return float(t_min)
    last = int(non_negative[-1])
    if last == samples - 1:
        return None
    lo, hi = float(grid[last]), float(grid[last + 1])
    return float(brentq(lambda t: arg_G_derivative(fe, sigma, t), lo, hi, xtol=1e-12))
