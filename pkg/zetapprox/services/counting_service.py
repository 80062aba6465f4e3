"""Counting service: argument-principle counts, root location, clustering and strip checks."""
import logging
import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from ..errors import (
    BoundaryRootError,
    DepthExceededError,
    NearZeroError,
    ValidationError,
    WindingResidualError,
    ZetaError,
)
from ..extensions import pool
from ..models.approximation import ApproximationModel
from ..models.region import (
    Axis,
    ClusterReport,
    CountReport,
    LocatedRoot,
    RectRegion,
    StripPoint,
    StripReport,
    StripSide,
)
from .evaluator_service import eval_zetaN, eval_zetaN_derivative
from .model_service import warn_if_degenerate
from .special_service import arg_G_derivative, unwrap_arg

logger = logging.getLogger(__name__)

# Edge offsets tried, outward then inward, when an a-value sits on an edge.
JITTER_SCHEDULE = (1e-3, 3e-3, 1e-2)
# Relative offsets tried for interior cuts during subdivision.
CUT_OFFSETS = (0.0, 0.0137, -0.0137, 0.0419, -0.0419, 0.113, -0.113)
WINDING_RESIDUAL_TOL = 0.01
MAX_STEP_REFINEMENTS = 3
CERTIFICATION_RADIUS = 1e-6
MULTIPLICITY_SIZE = 1e-9
NEWTON_ITERATIONS = 60
# Target argument change per initial sample along an edge, in radians.
PHASE_BUDGET = 0.5
# Height windows are counted in bands of this height and summed.
BAND_HEIGHT = 50.0
SIGMA_BOUND_MARGIN = 1.5
STRIP_SCAN_STEP = 0.25
STRIP_SCAN_LIMIT = 64.0
ORACLE_DENSITY = 10

# Edge order of a counterclockwise traversal starting bottom-right.
EDGES = ("sigma_right", "t_top", "sigma_left", "t_bottom")
_OUTWARD = {"sigma_right": 1.0, "t_top": 1.0, "sigma_left": -1.0, "t_bottom": -1.0}


class _EdgeRoot(Exception):
    """An a-value on (or numerically at) one edge of a rectangle."""

    def __init__(self, edge: str, cause: ZetaError) -> None:
        super().__init__(edge)
        self.edge = edge
        self.cause = cause


def _shifted(model: ApproximationModel, a: complex):
    def h(s: np.ndarray) -> np.ndarray:
        return eval_zetaN(model, s) - a

    return h


def edge_step(model: ApproximationModel, region: RectRegion) -> float:
    """Initial sample spacing on edges, from the local phase speed of zeta_N - a."""
    t_ref = max(abs(region.t_bottom), abs(region.t_top), 1.0)
    g_speed = abs(float(arg_G_derivative(model.fe, model.critical_sigma, t_ref)))
    series_speed = 2.0 * float(np.max(model.series.log_exponents))
    return PHASE_BUDGET / (g_speed + series_speed + 1.0)


def _raw_winding(model: ApproximationModel, a: complex, region: RectRegion, max_step: float) -> float:
    h = _shifted(model, a)
    corners = region.corners()
    total = 0.0
    for edge, start, end in zip(EDGES, corners, corners[1:] + corners[:1]):
        try:
            total += unwrap_arg(h, start, end, max_step=max_step).total_change
        except (NearZeroError, DepthExceededError) as err:
            raise _EdgeRoot(edge, err) from err
    return total / (2.0 * math.pi)


def _rounded_winding(
    model: ApproximationModel, a: complex, region: RectRegion, max_step: float
) -> tuple[int, float]:
    step = max_step
    residual = float("inf")
    for attempt in range(MAX_STEP_REFINEMENTS + 1):
        raw = _raw_winding(model, a, region, step)
        winding = int(round(raw))
        residual = abs(raw - winding)
        if residual < WINDING_RESIDUAL_TOL and winding >= 0:
            return winding, residual
        logger.debug("winding %.6f rejected (attempt %d); refining step", raw, attempt + 1)
        step /= 4.0
    raise WindingResidualError(residual)


def _move_edge(region: RectRegion, edge: str, shift: float) -> RectRegion | None:
    moved = getattr(region, edge) + _OUTWARD[edge] * shift
    try:
        return replace(region, **{edge: moved})
    except ValidationError:
        return None


def _segment_is_clear(model: ApproximationModel, a: complex, start: complex, end: complex, max_step: float) -> bool:
    try:
        unwrap_arg(_shifted(model, a), start, end, max_step=max_step)
    except (NearZeroError, DepthExceededError):
        return False
    return True


def _edge_is_clear(model: ApproximationModel, a: complex, region: RectRegion, edge: str, max_step: float) -> bool:
    corners = region.corners()
    k = EDGES.index(edge)
    return _segment_is_clear(model, a, corners[k], corners[(k + 1) % 4], max_step)


def _clear_edges(model: ApproximationModel, a: complex, region: RectRegion, max_step: float) -> RectRegion:
    """Move every edge of ``region`` that passes through an a-value off it.

    Each offset of the jitter schedule is tried outward, then inward. The
    sigma edges are cleared before the t edges, and a second pass re-checks
    the edges a later move lengthened.

    Raises:
        BoundaryRootError: If the schedule is exhausted for some edge.
    """
    for _ in range(2):
        moved = False
        for edge in ("sigma_right", "sigma_left", "t_top", "t_bottom"):
            if _edge_is_clear(model, a, region, edge, max_step):
                continue
            for shift in (s * sign for s in JITTER_SCHEDULE for sign in (1.0, -1.0)):
                candidate = _move_edge(region, edge, shift)
                if candidate is None:
                    continue
                logger.warning("a-value near edge %s of %s; retrying with offset %+g", edge, region, shift)
                if _edge_is_clear(model, a, candidate, edge, max_step):
                    region, moved = candidate, True
                    break
            else:
                raise BoundaryRootError(f"a-value on edge {edge} of {region}; jitter schedule exhausted.")
        if not moved:
            return region
    return region


def _band_cuts(model: ApproximationModel, a: complex, region: RectRegion, max_step: float) -> list[float]:
    """Interior heights splitting the region into bands, moved off any a-value."""
    bands = max(1, int(math.ceil(region.height / BAND_HEIGHT)))
    cuts = []
    for k in range(1, bands):
        nominal = region.t_bottom + k * region.height / bands
        for shift in (0.0,) + tuple(s * sign for s in JITTER_SCHEDULE for sign in (1.0, -1.0)):
            t = nominal + shift
            start, end = complex(region.sigma_right, t), complex(region.sigma_left, t)
            if _segment_is_clear(model, a, start, end, max_step):
                cuts.append(t)
                break
        else:
            raise BoundaryRootError(f"No clear band cut near t = {nominal:g}.")
    return cuts


def _band_task(args: tuple[ApproximationModel, complex, RectRegion, float]) -> tuple[int, float]:
    model, a, region, max_step = args
    try:
        return _rounded_winding(model, a, region, max_step)
    except _EdgeRoot as exc:
        raise BoundaryRootError(f"a-value on edge {exc.edge} of band {region}.") from exc.cause


def count_region(
    model: ApproximationModel,
    a: complex,
    region: RectRegion,
    max_step: float | None = None,
) -> CountReport:
    """Count the a-values of zeta_N inside a rectangle by the argument principle.

    Edges through an a-value are jittered once for the whole rectangle. Tall
    rectangles are then counted band by band (fixed band height, so the work
    does not depend on the worker count) and the integer windings are summed.

    Args:
        model: The approximation model.
        a: The target value.
        region: The rectangle.
        max_step: Initial edge spacing; defaults to ``edge_step``.

    Returns:
        CountReport for the rectangle actually used (edges may be jittered).

    Raises:
        BoundaryRootError: If the jitter schedule cannot clear an edge.
        WindingResidualError: If a winding stays non-integral after refinement.
    """
    a = complex(a)
    warn_if_degenerate(model)
    step = max_step if max_step is not None else edge_step(model, region)
    used = _clear_edges(model, a, region, step)
    cuts = _band_cuts(model, a, used, step)
    heights = [used.t_bottom, *cuts, used.t_top]
    bands = [replace(used, t_bottom=lo, t_top=hi) for lo, hi in zip(heights, heights[1:])]
    results = pool.map(_band_task, [(model, a, band, step) for band in bands])

    winding = sum(result[0] for result in results)
    residual = max(result[1] for result in results)
    logger.info("winding %d for a = %s over %s", winding, a, used)
    return CountReport(region=used, a=a, winding=winding, residual=residual)


def winding_count(model: ApproximationModel, a: complex, region: RectRegion) -> int:
    """Number of a-values of zeta_N inside ``region``, with multiplicity."""
    return count_region(model, a, region).winding


def _clear_cut(
    model: ApproximationModel, a: complex, region: RectRegion, axis: Axis, max_step: float
) -> tuple[RectRegion, RectRegion]:
    if axis == Axis.SIGMA:
        lo, hi = region.sigma_left, region.sigma_right
    else:
        lo, hi = region.t_bottom, region.t_top
    middle, side = (lo + hi) / 2.0, hi - lo
    for offset in CUT_OFFSETS:
        at = middle + offset * side
        if axis == Axis.SIGMA:
            start, end = complex(at, region.t_bottom), complex(at, region.t_top)
        else:
            start, end = complex(region.sigma_right, at), complex(region.sigma_left, at)
        if _segment_is_clear(model, a, start, end, max_step):
            return region.split(axis, at)
    raise BoundaryRootError(f"No clear cut through {region}.")


def _polish(
    model: ApproximationModel, a: complex, region: RectRegion, radius: float, max_step: float
) -> LocatedRoot | None:
    s = region.center
    for _ in range(NEWTON_ITERATIONS):
        derivative = eval_zetaN_derivative(model, s)
        if derivative == 0:
            return None
        step = (eval_zetaN(model, s) - a) / derivative
        s -= step
        if not region.contains(s):
            return None
        if abs(step) < 1e-3 * radius:
            break
    box = RectRegion.around(s, radius / (2.0 * math.sqrt(2.0)))
    if not region.encloses(box):
        return None
    try:
        winding, _ = _rounded_winding(model, a, box, max_step)
    except (_EdgeRoot, ZetaError):
        return None
    return LocatedRoot(center=s, radius=radius / 2.0, multiplicity=1) if winding == 1 else None


def locate_roots(
    model: ApproximationModel,
    a: complex,
    region: RectRegion,
    radius: float = CERTIFICATION_RADIUS,
) -> list[LocatedRoot]:
    """Isolate every a-value in ``region`` in a box of diameter at most ``radius``.

    Boxes are bisected across their longer side; a box with winding 1 is first
    polished by Newton's method and certified by the winding of a box of
    diameter ``radius`` around the result. Boxes that still wind more than once
    at ``MULTIPLICITY_SIZE`` are reported with that multiplicity.

    Args:
        model: The approximation model.
        a: The target value.
        region: Search rectangle.
        radius: Certification diameter.

    Returns:
        Located roots ordered by height.

    Raises:
        BoundaryRootError: If no clear edge or cut can be found.
    """
    a = complex(a)
    return _isolate(model, a, count_region(model, a, region), radius)


def _isolate(model: ApproximationModel, a: complex, report: CountReport, radius: float) -> list[LocatedRoot]:
    step = edge_step(model, report.region)
    roots: list[LocatedRoot] = []
    stack: list[tuple[RectRegion, int]] = [(report.region, report.winding)]

    while stack:
        box, winding = stack.pop()
        if winding == 0:
            continue
        if winding == 1:
            if box.diameter <= radius:
                roots.append(LocatedRoot(center=box.center, radius=box.diameter / 2.0))
                continue
            polished = _polish(model, a, box, radius, step)
            if polished is not None:
                roots.append(polished)
                continue
        elif box.diameter <= MULTIPLICITY_SIZE:
            roots.append(LocatedRoot(center=box.center, radius=box.diameter / 2.0, multiplicity=winding))
            continue

        lower, upper = _clear_cut(model, a, box, box.longer_axis(), step)
        try:
            w_lower, _ = _rounded_winding(model, a, lower, step)
            w_upper, _ = _rounded_winding(model, a, upper, step)
        except _EdgeRoot as exc:
            raise BoundaryRootError(f"a-value on a subdivision edge of {box}.") from exc.cause
        if w_lower + w_upper != winding:
            raise WindingResidualError(float(abs(w_lower + w_upper - winding)))
        stack.append((upper, w_upper))
        stack.append((lower, w_lower))

    roots.sort(key=lambda root: (root.center.imag, root.center.real))
    logger.info("located %d roots (winding %d) for a = %s", len(roots), report.winding, a)
    return roots


def count_and_locate(
    model: ApproximationModel, a: complex, region: RectRegion, radius: float = CERTIFICATION_RADIUS
) -> CountReport:
    """CountReport with roots attached; the rectangle is counted once."""
    a = complex(a)
    report = count_region(model, a, region)
    roots = _isolate(model, a, report, radius)
    return replace(report, roots=tuple(roots))


def strip_threshold(
    model: ApproximationModel,
    a: complex,
    t_grid: Sequence[float],
    side: StripSide,
    limit: float = STRIP_SCAN_LIMIT,
) -> float | None:
    """Smallest distance d from the critical line such that the side's predicate
    holds on the whole grid for every scanned distance between d and ``limit``.
    """
    distances = np.arange(STRIP_SCAN_STEP, limit + STRIP_SCAN_STEP / 2, STRIP_SCAN_STEP)
    sign = 1.0 if side == StripSide.RIGHT else -1.0
    holds = np.array([
        all(point.passed for point in _strip_points(model, a, model.critical_sigma + sign * d, t_grid, side))
        for d in distances
    ])
    if not holds[-1]:
        return None
    failing = np.flatnonzero(~holds)
    first = int(failing[-1]) + 1 if failing.size else 0
    return float(distances[first])


def _strip_points(
    model: ApproximationModel, a: complex, sigma: float, t_grid: Sequence[float], side: StripSide
) -> list[StripPoint]:
    t = np.asarray(t_grid, dtype=float)
    s = sigma + 1j * t
    values = eval_zetaN(model, s)
    coefficients = model.series.coefficients
    a1 = coefficients[0]
    if side == StripSide.LEFT:
        statistic = np.abs(values - a)
        bound = 1.0
        passed = statistic > bound
    elif a != a1:
        statistic = np.abs(values - a1)
        bound = abs(a1 - a) / 2.0
        passed = statistic < bound
    else:
        a2 = coefficients[1]
        log_lambda2 = float(model.series.log_exponents[1])
        statistic = np.abs((values - a) * np.exp(s * log_lambda2) - a2)
        bound = abs(a2) / 2.0
        passed = statistic < bound
    return [
        StripPoint(t=float(tk), sigma=float(sigma), statistic=float(stat), bound=float(bound), passed=bool(ok))
        for tk, stat, ok in zip(t, statistic, passed)
    ]


def strip_check(
    model: ApproximationModel, a: complex, sigma: float, t_grid: Sequence[float]
) -> StripReport:
    """Check the strip predicates at abscissa ``sigma`` along ``t_grid``.

    Right of the critical line: zeta_N - a lies in D(a_1 - a, |a_1 - a|/2), or,
    when a = a_1, (zeta_N - a) lambda_2^s lies in D(a_2, |a_2|/2). Left of it:
    |zeta_N - a| > 1. Failures are data.

    Args:
        model: The approximation model.
        a: The target value.
        sigma: Abscissa at which the predicates are evaluated.
        t_grid: Ordinates.

    Returns:
        StripReport with per-point outcomes and the smallest distance from the
        critical line beyond which the predicate held on the whole grid.
    """
    a = complex(a)
    side = StripSide.RIGHT if sigma >= model.critical_sigma else StripSide.LEFT
    points = _strip_points(model, a, sigma, t_grid, side)
    limit = max(abs(sigma - model.critical_sigma), STRIP_SCAN_STEP)
    threshold = strip_threshold(model, a, t_grid, side, limit=limit)
    return StripReport(a=a, sigma=float(sigma), side=side, points=tuple(points), threshold=threshold)


def calibrate_sigma_bound(
    model: ApproximationModel, a: complex, t_grid: Sequence[float], limit: float = STRIP_SCAN_LIMIT
) -> float:
    """Half-width of a strip holding every a-value: the larger strip threshold plus 50 %.

    Raises:
        ValidationError: If a predicate never settles within ``limit``.
    """
    a = complex(a)
    thresholds = [strip_threshold(model, a, t_grid, side, limit) for side in (StripSide.RIGHT, StripSide.LEFT)]
    if any(threshold is None for threshold in thresholds):
        raise ValidationError(
            f"Strip predicates do not hold within {limit} of the critical line.", invariant="strip bound"
        )
    return SIGMA_BOUND_MARGIN * max(thresholds)


def cluster_census(
    model: ApproximationModel,
    a: complex,
    T: float,
    U: float,
    eps: float,
    sigma_bound: float | None = None,
) -> ClusterReport:
    """Count a-values at height (T, T+U) in the full strip and within eps of the line.

    Args:
        model: The approximation model.
        a: The target value.
        T: Lower height.
        U: Window height.
        eps: Half-width of the band around the critical line.
        sigma_bound: Half-width of the strip holding all a-values; calibrated
            from the strip predicates when omitted.

    Returns:
        ClusterReport with total, within and outside counts.
    """
    a = complex(a)
    c = model.critical_sigma
    if sigma_bound is None:
        sigma_bound = calibrate_sigma_bound(model, a, np.linspace(T, T + U, 20))
    outer = count_region(model, a, RectRegion(c - sigma_bound, c + sigma_bound, T, T + U))
    if eps >= sigma_bound:
        within = outer.winding
    else:
        inner = RectRegion(c - eps, c + eps, outer.region.t_bottom, outer.region.t_top)
        within = count_region(model, a, inner).winding
    logger.info("cluster census a = %s: total %d, within %d (eps %g)", a, outer.winding, within, eps)
    return ClusterReport(
        total=outer.winding, within=within, epsilon=eps, sigma_bound=sigma_bound, T=T, U=U, a=a
    )


def dense_winding_oracle(
    model: ApproximationModel, a: complex, region: RectRegion, density: int = ORACLE_DENSITY
) -> int:
    """Winding from a fixed dense grid on each edge, without adaptive refinement.

    The grid is ``density`` times finer than the initial spacing used by
    ``count_region``.
    """
    step = edge_step(model, region) / density
    h = _shifted(model, a)
    corners = region.corners()
    total = 0.0
    for start, end in zip(corners, corners[1:] + corners[:1]):
        count = max(16 * density, int(math.ceil(abs(end - start) / step)) + 1)
        values = h(start + np.linspace(0.0, 1.0, count) * (end - start))
        total += float(np.sum(np.angle(values[1:] * np.conj(values[:-1]))))
    return int(round(total / (2.0 * math.pi)))
