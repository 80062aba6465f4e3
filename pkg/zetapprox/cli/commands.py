"""Subcommand dispatch: turn a RunConfig into CSV artifacts and a run manifest."""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ValidationError, VerificationFailedError
from ..models.approximation import ApproximationModel
from ..models.functional_equation import FunctionalEquationData, GammaFactorTerm
from ..models.region import RectRegion, StripReport
from ..models.series import Envelope, SeriesSpec
from ..models.verification import VerificationCheck
from ..services import (
    asymptotics_service,
    counting_service,
    critical_line_service,
    evaluator_service,
    export_service,
    model_service,
    special_service,
)
from .run_config import ModelConfig, RegionConfig, RunConfig, config_to_dict

logger = logging.getLogger(__name__)

EXPONENT_INVARIANTS = {"lambda_1 = 1", "lambda_n >= 1", "strictly increasing"}

SPIRA_REGION = RegionConfig(sigma_left=-3.0, sigma_right=4.0, t_bottom=10.0, t_top=200.0)
SPIRA_TOLERANCE = 1e-6
COUNT_TARGET = 5.0
CLUSTER_TARGET = 0.1
CRITICAL_ZERO_TARGET = 0.9
# verify critical repeats the census for U, 2U, 4U; candidates per U log N must agree within this factor.
CRITICAL_WINDOWS = 3
CANDIDATE_SPREAD_TARGET = 2.0
STRIP_SAMPLES = 20
MONOTONE_T_MAX = 100.0


@dataclass
class RunOutcome:
    """Files written by a run and the verification checks it made."""

    artifacts: list[Path] = field(default_factory=list)
    manifest: Path | None = None
    checks: list[VerificationCheck] = field(default_factory=list)

    @property
    def failed(self) -> list[str]:
        return [check.check for check in self.checks if not check.passed]


class _Run:
    """State shared by the handlers of one run."""

    def __init__(self, config: RunConfig, output_dir: Path) -> None:
        self.config = config
        self.command = config.command
        self.model = build_model(config.model)
        self.output_dir = Path(output_dir)
        self.outcome = RunOutcome()
        self.timings: dict[str, float] = {}
        self.extra: dict[str, object] = {}

    def write(self, kind: str, rows, suffix: str | None = None) -> None:
        name = f"{self.config.prefix}-{suffix or kind}.csv"
        self.outcome.artifacts.append(export_service.write_csv(self.output_dir / name, kind, rows))

    def timed(self, label: str, fn: Callable, *args, **kwargs):
        started = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[label] = time.perf_counter() - started

    def check(self, name: str, observed: float, target: float, passed: bool) -> None:
        self.outcome.checks.append(VerificationCheck(check=name, observed=observed, target=target, passed=passed))

    @property
    def gamma(self) -> float:
        return self.command.gamma if self.command.gamma is not None else model_service.default_gamma(self.model)

    def strip_region(self, a: complex) -> RectRegion:
        """Full strip around the critical line at heights (T, T+U)."""
        command = self.command
        sigma_bound = command.sigma_bound
        if sigma_bound is None:
            grid = np.linspace(command.T, command.T + command.U, STRIP_SAMPLES)
            sigma_bound = self.timed(
                "calibrate_sigma_bound", counting_service.calibrate_sigma_bound, self.model, a, grid
            )
            self.extra["sigma_bound"] = sigma_bound
        c = self.model.critical_sigma
        return RectRegion(c - sigma_bound, c + sigma_bound, command.T, command.T + command.U)


def build_model(config: ModelConfig) -> ApproximationModel:
    """Build the model a config describes.

    Raises:
        ValidationError: For unknown presets, or exponents that are not
            1 = lambda_1 < lambda_2 < ...
    """
    if config.preset is not None:
        model = model_service.make_preset(config.preset, config.N)
        return replace(model, sigma0=config.sigma0)
    series = SeriesSpec(
        coefficients=config.series.coefficients,
        exponents=config.series.exponents,
        envelope=Envelope(C=config.series.envelope_C, p=config.series.envelope_p),
    )
    fe = FunctionalEquationData(
        lam=config.functional_equation.lam,
        delta=config.functional_equation.delta,
        omega=tuple(GammaFactorTerm(alpha, beta) for alpha, beta in config.functional_equation.omega),
    )
    model = ApproximationModel(series=series, fe=fe, sigma0=config.sigma0)
    for violation in model_service.validate(model):
        if violation.invariant in EXPONENT_INVARIANTS:
            raise ValidationError(f"exponents: {violation.message}", invariant=violation.invariant)
    return model


def psi_case(model: ApproximationModel, a: complex) -> str | None:
    """The Psi case label for a model and target value, when lambda_2 exists."""
    if model.N < 2 or not model.series.exponents[1] > 1.0:
        return None
    return asymptotics_service.classify_psi(a, model.series.coefficients[0]).value


def _model_facts(run: _Run) -> dict[str, object]:
    """Per-model constants recorded in every manifest."""
    model, command = run.model, run.command
    sigmas = tuple(max(sigma, model.sigma0) for sigma in evaluator_service.ENVELOPE_SIGMAS)
    return {
        "name": model.name,
        "N": model.N,
        "default_gamma": model_service.default_gamma(model),
        "default_nu": model_service.default_nu(model),
        "monotone_threshold": special_service.monotone_threshold(
            model.fe, model.critical_sigma, max(command.T + command.U, MONOTONE_T_MAX)
        ),
        "envelope": [
            {"sigma": point.sigma, "deviation": point.deviation, "bound": point.bound, "passed": point.passed}
            for point in evaluator_service.envelope_check(model, sigmas)
        ],
    }


def _region(config: RegionConfig) -> RectRegion:
    return RectRegion(config.sigma_left, config.sigma_right, config.t_bottom, config.t_top)


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def _eval(run: _Run) -> None:
    points = np.asarray(run.command.points, dtype=complex)
    zeta = evaluator_service.eval_zetaN(run.model, points)
    fn = evaluator_service.eval_FN(run.model.series, points)
    g = special_service.eval_G(run.model.fe, points)
    run.write("eval", export_service.eval_rows(points.tolist(), zeta.tolist(), fn.tolist(), g.tolist()))


def _predicted_report(run: _Run, a: complex):
    """Strip count with its prediction and normalized discrepancy attached."""
    command = run.command
    region = _region(command.region) if command.region is not None else run.strip_region(a)
    report = run.timed("count_region", counting_service.count_region, run.model, a, region)
    if command.region is not None:
        return report, None
    inputs = asymptotics_service.prediction_input(run.model, a, report.region.t_bottom, report.region.height, run.gamma)
    prediction = asymptotics_service.predicted_count(inputs)
    record = asymptotics_service.compare(report, prediction.value, prediction.error_scale)
    run.extra["prediction"] = {
        "value": prediction.value,
        "error_scale": prediction.error_scale,
        "psi": prediction.psi,
        "gamma": run.gamma,
    }
    return replace(report, predicted=prediction.value, discrepancy=record.normalized), record


def _count(run: _Run) -> None:
    report, _ = _predicted_report(run, run.command.a)
    run.write("count", export_service.count_rows(report))


def _locate(run: _Run) -> None:
    report = run.timed(
        "locate_roots", counting_service.count_and_locate,
        run.model, run.command.a, _region(run.command.region), run.command.radius,
    )
    run.write("count", export_service.count_rows(report))
    run.write("locate", export_service.locate_rows(report.roots))


def _scan_line(run: _Run):
    command = run.command
    if command.a == 0:
        result = run.timed("count_line_zeros", critical_line_service.count_line_zeros, run.model, command.T, command.U)
        run.extra["zero_count"] = result.zero_count
    else:
        result = run.timed(
            "avalue_line_census", critical_line_service.avalue_line_census,
            run.model, command.a, command.T, command.U, command.hit_tol,
        )
        run.extra["candidates"] = len(result.candidates)
        run.extra["hits"] = len(result.hits)
        run.extra["hit_sweep"] = {format(tol, "g"): count for tol, count in result.hit_sweep.items()}
    run.write("scan-line", export_service.line_rows(result))
    return result


def _cluster(run: _Run):
    command = run.command
    report = run.timed(
        "cluster_census", counting_service.cluster_census,
        run.model, command.a, command.T, command.U, command.epsilon, command.sigma_bound,
    )
    run.write("cluster", export_service.cluster_rows(report))
    return report


def _strip_reports(run: _Run, t_values: list[float]) -> list[StripReport]:
    c = run.model.critical_sigma
    return [
        counting_service.strip_check(run.model, run.command.a, c + side * run.command.sigma, t_values)
        for side in (1.0, -1.0)
    ]


def _strip(run: _Run) -> None:
    reports = _strip_reports(run, run.command.t_grid.values())
    run.write("strip", [row for report in reports for row in export_service.strip_rows(report)])


def _verify_spira(run: _Run) -> None:
    region = run.command.region or SPIRA_REGION
    report = run.timed(
        "locate_roots", counting_service.count_and_locate, run.model, 0j, _region(region), run.command.radius
    )
    line = run.timed(
        "count_line_zeros", critical_line_service.count_line_zeros,
        run.model, region.t_bottom, region.t_top - region.t_bottom,
    )
    run.write("locate", export_service.locate_rows(report.roots))
    offset = max((abs(root.center.real - run.model.critical_sigma) for root in report.roots), default=0.0)
    run.check("max_offset_from_critical_line", offset, SPIRA_TOLERANCE, offset <= SPIRA_TOLERANCE)
    run.check("roots_fully_localized", float(report.fully_localized), 1.0, report.fully_localized)
    run.check(
        "line_count_equals_strip_count", float(line.zero_count), float(report.winding),
        line.zero_count == report.winding,
    )


def _verify_count(run: _Run) -> None:
    report, record = _predicted_report(run, run.command.a)
    run.write("count", export_service.count_rows(report))
    if record is None:
        raise ValidationError("verify count compares a full strip; omit command.region.", invariant="no region")
    normalized = abs(record.normalized)
    run.check("normalized_discrepancy", normalized, COUNT_TARGET, normalized <= COUNT_TARGET)


def _verify_cluster(run: _Run) -> None:
    report = _cluster(run)
    run.check("outside_fraction", report.outside_fraction, CLUSTER_TARGET, report.outside_fraction <= CLUSTER_TARGET)
    run.check("total_positive", float(report.total), 1.0, report.total > 0)


def _verify_critical_zero(run: _Run) -> None:
    command = run.command
    line = run.timed("count_line_zeros", critical_line_service.count_line_zeros, run.model, command.T, command.U)
    run.write("scan-line", export_service.line_rows(line))
    strip = run.timed("count_region", counting_service.count_region, run.model, 0j, run.strip_region(0j))
    run.write("count", export_service.count_rows(strip))
    ratio = line.zero_count / strip.winding if strip.winding else math.nan
    run.check("line_to_strip_ratio", ratio, CRITICAL_ZERO_TARGET, ratio >= CRITICAL_ZERO_TARGET)
    main_term = asymptotics_service.critical_zero_main_term(run.model, command.T, command.U)
    run.extra["critical_zero_main_term"] = main_term


def _verify_critical(run: _Run) -> None:
    command = run.command
    if command.a == 0:
        raise ValidationError("verify critical needs a non-zero command.a.", invariant="a != 0")
    densities: dict[str, float] = {}
    for k in range(CRITICAL_WINDOWS):
        U = command.U * 2**k
        label = f"U{U:g}"
        result = run.timed(
            f"avalue_line_census_{label}", critical_line_service.avalue_line_census,
            run.model, command.a, command.T, U, command.hit_tol,
        )
        run.write("scan-line", export_service.line_rows(result), suffix=f"scan-line-{label}")
        run.check(f"candidates_present_{label}", float(len(result.candidates)), 1.0, len(result.candidates) > 0)
        for tol, hits in result.hit_sweep.items():
            run.check(f"hits_at_{tol:g}_{label}", float(hits), 0.0, hits == 0)
        densities[label] = len(result.candidates) / asymptotics_service.critical_line_scale(run.model.N, U)
    run.extra["candidates_per_scale"] = densities
    low, high = min(densities.values()), max(densities.values())
    spread = high / low if low > 0 else math.inf
    run.check("candidate_density_spread", spread, CANDIDATE_SPREAD_TARGET, spread <= CANDIDATE_SPREAD_TARGET)


def _verify_strip(run: _Run) -> None:
    grid = run.command.t_grid
    rows = []
    for seed in run.command.seeds:
        rng = np.random.default_rng(seed)
        t_values = np.sort(rng.uniform(grid.start, grid.stop, grid.count)).tolist()
        for report in _strip_reports(run, t_values):
            failures = sum(not point.passed for point in report.points)
            run.check(f"strip_{report.side.value}_seed_{seed}", float(failures), 0.0, report.passed)
            rows.extend(export_service.strip_rows(report))
    run.write("strip", rows)


HANDLERS: dict[str, Callable[[_Run], object]] = {
    "eval": _eval,
    "count": _count,
    "locate": _locate,
    "scan-line": _scan_line,
    "cluster": _cluster,
    "strip": _strip,
}

VERIFY_HANDLERS: dict[str, Callable[[_Run], None]] = {
    "spira": _verify_spira,
    "count": _verify_count,
    "cluster": _verify_cluster,
    "critical-zero": _verify_critical_zero,
    "critical": _verify_critical,
    "strip": _verify_strip,
}


def run(config: RunConfig, output_dir: Path) -> RunOutcome:
    """Execute a run and write its artifacts.

    Args:
        config: Validated run configuration.
        output_dir: Directory for CSV files and the manifest.

    Returns:
        The RunOutcome.

    Raises:
        VerificationFailedError: If a verify command has failed checks; every
            artifact is written first.
    """
    state = _Run(config, output_dir)
    command = config.command
    logger.info("running %s%s on %r", command.name, f" {command.target}" if command.target else "", state.model)

    started = time.perf_counter()
    if command.name == "verify":
        VERIFY_HANDLERS[command.target](state)
        state.write("verify", export_service.verify_rows(state.outcome.checks), suffix="checks")
    else:
        HANDLERS[command.name](state)
    state.timings["total"] = time.perf_counter() - started
    state.extra["model"] = _model_facts(state)

    manifest = export_service.build_manifest(
        config=config_to_dict(config),
        artifacts=state.outcome.artifacts,
        timings=state.timings,
        seeds=command.seeds,
        psi_case=psi_case(state.model, command.a),
        extra=state.extra,
    )
    state.outcome.manifest = export_service.write_manifest(
        state.output_dir / f"{config.prefix}-manifest.json", manifest
    )

    if state.outcome.failed:
        raise VerificationFailedError(state.outcome.failed)
    return state.outcome
