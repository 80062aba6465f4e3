"""Critical-line service: zeros of Z(t), a-value candidates and hits, simplicity."""
import logging
import math
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ..errors import NonRealCoefficientsError, StepFloorError, ValidationError, ZeroAValueError
from ..extensions import pool
from ..models.approximation import ApproximationModel
from ..models.line import LineScanResult, SimplicityRow, SimplicityStatus
from .evaluator_service import eval_FN, eval_zetaN, hardy_Z, line_samples, proj, theta_offset
from .special_service import arg_G_derivative

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-9
STEP_FLOOR = 1e-7
MAX_REFINE_LEVELS = 30
# An interval is halved when |dZ| exceeds this fraction of the largest |Z| in its chunk.
DELTA_FRACTION = 0.5
# Scan ranges are split into chunks of this length regardless of the worker count.
CHUNK_LENGTH = 50.0
DEFAULT_HIT_TOL = 1e-8
HIT_SWEEP_TOLS = (1e-6, 1e-8, 1e-10)
# A confirmed hit keeps its residual within this factor after re-refinement.
HIT_CONFIRM_FACTOR = 10.0
SLOPE_STEP = 1e-6

ZERO_SCAN = "zero"
CANDIDATE_SCAN = "candidate"


def _require_real(model: ApproximationModel) -> None:
    if not model.real_coefficients:
        raise NonRealCoefficientsError()


def initial_step(model: ApproximationModel, T: float, U: float) -> float:
    """Eight samples per expected gap between zeros at height T + U."""
    return math.pi / (4.0 * model.fe.A * math.log(max(T + U, math.e)))


def _line_function(model: ApproximationModel, kind: str, offset: float, a: complex):
    """The real function whose sign changes a scan brackets."""
    if kind == ZERO_SCAN:
        return lambda t: hardy_Z(model, t, offset)
    alpha, modulus = math.atan2(a.imag, a.real), abs(a)

    def projection(t):
        z = eval_FN(model.series, model.critical_sigma + 1j * np.asarray(t, dtype=float))
        return 2.0 * proj(alpha, z) - modulus

    return projection


def _parabola_dips(t: np.ndarray, v: np.ndarray, k: int) -> bool:
    """True if the parabola through samples k-1, k, k+1 crosses zero between them."""
    x0, x1, x2 = t[k - 1], t[k], t[k + 1]
    y0, y1, y2 = v[k - 1], v[k], v[k + 1]
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    c2 = (d12 - d01) / (x2 - x0)
    if c2 == 0.0:
        return False
    c1 = d01 - c2 * (x0 + x1)
    c0 = y0 - x0 * (c1 + c2 * x0)
    vertex = -c1 / (2.0 * c2)
    if not x0 < vertex < x2:
        return False
    extreme = c0 + vertex * (c1 + c2 * vertex)
    return np.sign(extreme) != np.sign(y1)


def _refine_grid(f, t: np.ndarray, v: np.ndarray, floor: float) -> tuple[np.ndarray, np.ndarray]:
    for level in range(MAX_REFINE_LEVELS):
        widths = np.diff(t)
        scale = float(np.max(np.abs(v))) or 1.0
        suspect = np.abs(np.diff(v)) > DELTA_FRACTION * scale

        same = np.sign(v[:-2]) == np.sign(v[1:-1])
        same &= np.sign(v[1:-1]) == np.sign(v[2:])
        dips = same & (np.abs(v[1:-1]) < np.abs(v[:-2])) & (np.abs(v[1:-1]) < np.abs(v[2:]))
        for k in np.flatnonzero(dips) + 1:
            if _parabola_dips(t, v, k):
                suspect[k - 1] = suspect[k] = True

        suspect &= widths > 2.0 * floor
        if not np.any(suspect):
            break
        mids = 0.5 * (t[:-1][suspect] + t[1:][suspect])
        t = np.concatenate([t, mids])
        v = np.concatenate([v, np.asarray(f(mids), dtype=float)])
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]
        logger.debug("line refinement level %d: %d intervals halved", level + 1, mids.size)
    return t, v


def _bracketed_root(f, lo: float, hi: float, xtol: float) -> float:
    try:
        return float(brentq(f, lo, hi, xtol=xtol, maxiter=200))
    except (RuntimeError, ValueError) as err:
        raise StepFloorError(f"Root refinement stalled in [{lo:.12g}, {hi:.12g}]: {err}") from err


def _scan_chunk(args: tuple) -> tuple[np.ndarray, list[tuple[float, float, float]]]:
    """Sample one chunk, bracket sign changes and refine each root.

    Returns the chunk grid and, per root, (t, residual, confirmation residual);
    residuals are NaN for zero scans. A sample exactly at zero is a root
    unless it is the last sample of a chunk that is not the final one.
    """
    model, kind, offset, a, lo, hi, step, is_last = args
    f = _line_function(model, kind, offset, a)
    count = max(2, int(math.ceil((hi - lo) / step)) + 1)
    t = np.linspace(lo, hi, count)
    v = np.asarray(f(t), dtype=float)
    t, v = _refine_grid(f, t, v, STEP_FLOOR)

    roots: list[tuple[float, float, float]] = []
    last = len(t) if is_last else len(t) - 1
    for k in range(len(t) - 1):
        if v[k] == 0.0:
            if k < last:
                roots.append(_root_entry(model, kind, a, f, float(t[k]), None))
            continue
        if v[k + 1] != 0.0 and np.sign(v[k]) != np.sign(v[k + 1]):
            root = _bracketed_root(f, float(t[k]), float(t[k + 1]), ROOT_XTOL)
            roots.append(_root_entry(model, kind, a, f, root, (float(t[k]), float(t[k + 1]))))
    if is_last and v[-1] == 0.0:
        roots.append(_root_entry(model, kind, a, f, float(t[-1]), None))
    return t, roots


def _root_entry(model, kind, a, f, root, bracket) -> tuple[float, float, float]:
    if kind == ZERO_SCAN:
        return root, math.nan, math.nan
    residual = abs(complex(eval_zetaN(model, model.critical_sigma + 1j * root)) - a)
    confirm = residual
    if bracket is not None:
        again = _bracketed_root(f, bracket[0], bracket[1], ROOT_XTOL / 2.0)
        confirm = abs(complex(eval_zetaN(model, model.critical_sigma + 1j * again)) - a)
    return root, residual, confirm


def _chunks(T: float, U: float) -> list[tuple[float, float]]:
    count = max(1, int(math.ceil(U / CHUNK_LENGTH)))
    edges = np.linspace(T, T + U, count + 1)
    return list(zip(edges[:-1].tolist(), edges[1:].tolist()))


def _scan(model: ApproximationModel, kind: str, a: complex, T: float, U: float):
    if not T > 0:
        raise ValidationError(f"T must be positive; got {T}.", invariant="T > 0")
    if not U > 0:
        raise ValidationError(f"U must be positive; got {U}.", invariant="U > 0")
    offset = theta_offset(model, T)
    step = initial_step(model, T, U)
    chunks = _chunks(T, U)
    tasks = [
        (model, kind, offset, a, lo, hi, step, index == len(chunks) - 1)
        for index, (lo, hi) in enumerate(chunks)
    ]
    results = pool.map(_scan_chunk, tasks)
    # Adjacent chunks share their boundary sample.
    grid = np.concatenate([results[0][0]] + [chunk_t[1:] for chunk_t, _ in results[1:]])
    roots = [root for _, chunk_roots in results for root in chunk_roots]
    roots.sort(key=lambda root: root[0])
    return offset, line_samples(model, grid, offset), roots


def count_line_zeros(model: ApproximationModel, T: float, U: float) -> LineScanResult:
    """Find the sign changes of Z(t) on (T, T+U) and refine each to 1e-9 in t.

    The count is a lower bound for the zeros on the critical line: zeros of
    even order do not change the sign of Z.

    Args:
        model: A model with real coefficients.
        T: Lower height.
        U: Window height.

    Returns:
        LineScanResult with samples and zero ordinates.

    Raises:
        NonRealCoefficientsError: If any coefficient is non-real.
        StepFloorError: If root refinement stalls.
    """
    _require_real(model)
    _, samples, roots = _scan(model, ZERO_SCAN, 0j, T, U)
    zeros = [root for root, _, _ in roots]
    logger.info("%d sign changes of Z on [%g, %g]", len(zeros), T, T + U)
    return LineScanResult(t_range=(T, T + U), samples=samples, zero_ordinates=zeros)


def avalue_line_census(
    model: ApproximationModel,
    a: complex,
    T: float,
    U: float,
    hit_tol: float = DEFAULT_HIT_TOL,
) -> LineScanResult:
    """Census of a-values on the critical line.

    Candidates are the roots of P(t) = 2 proj_alpha z(t) - |a| with alpha = arg a;
    a candidate is a hit when |zeta_N - a| <= hit_tol at the refined root and
    stays within 10 hit_tol after refining again at half the tolerance.

    Args:
        model: A model with real coefficients.
        a: Non-zero target value.
        T: Lower height.
        U: Window height.
        hit_tol: Residual accepted for a hit.

    Returns:
        LineScanResult with candidates, residuals, hits and the hit counts at
        the sweep tolerances.

    Raises:
        NonRealCoefficientsError: If any coefficient is non-real.
        ZeroAValueError: If a = 0.
        StepFloorError: If root refinement stalls.
    """
    _require_real(model)
    a = complex(a)
    if a == 0:
        raise ZeroAValueError()
    _, samples, roots = _scan(model, CANDIDATE_SCAN, a, T, U)

    def confirmed(tol: float) -> list[float]:
        return [
            t for t, residual, again in roots
            if residual <= tol and again <= HIT_CONFIRM_FACTOR * tol
        ]

    hits = confirmed(hit_tol)
    sweep = {tol: len(confirmed(tol)) for tol in HIT_SWEEP_TOLS}
    logger.info(
        "a = %s on [%g, %g]: %d candidates, %d hits (sweep %s)",
        a, T, T + U, len(roots), len(hits), sweep,
    )
    return LineScanResult(
        t_range=(T, T + U),
        samples=samples,
        candidates=[t for t, _, _ in roots],
        candidate_residuals=[residual for _, residual, _ in roots],
        hits=hits,
        hit_tol=hit_tol,
        a=a,
        hit_sweep=sweep,
    )


def simplicity_check(model: ApproximationModel, t_list: Sequence[float]) -> list[SimplicityRow]:
    """Simplicity diagnostic at given ordinates of the critical line.

    An ordinate is SIMPLE where d/dt arg G(delta/2 + it) < 0, and INCONCLUSIVE
    otherwise. |dZ/dt| is reported as a numerical witness (NaN for models with
    non-real coefficients, where Z is not real).
    """
    rows: list[SimplicityRow] = []
    if len(t_list) == 0:
        return rows
    t = np.asarray(t_list, dtype=float)
    derivative = np.atleast_1d(arg_G_derivative(model.fe, model.critical_sigma, t))
    if model.real_coefficients:
        offset = theta_offset(model, float(t.min()))
        slope = np.abs(hardy_Z(model, t + SLOPE_STEP, offset) - hardy_Z(model, t - SLOPE_STEP, offset))
        slope = slope / (2.0 * SLOPE_STEP)
    else:
        slope = np.full_like(t, np.nan)
    for tk, dk, sk in zip(t, derivative, np.atleast_1d(slope)):
        status = SimplicityStatus.SIMPLE if dk < 0.0 else SimplicityStatus.INCONCLUSIVE
        rows.append(SimplicityRow(t=float(tk), arg_g_derivative=float(dk), z_slope=float(sk), status=status))
    return rows
