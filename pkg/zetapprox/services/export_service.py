"""Export service: single source of truth for CSV rows and run manifests.

Every artifact written by the CLI is built here. CSV bodies depend only on
the computed results, so identical runs give byte-identical files; timings
and versions go to the manifest alone.
"""
import csv
import json
import logging
import math
import platform
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import scipy

from .. import __version__
from ..models.line import LineScanResult, PointKind
from ..models.region import ClusterReport, CountReport, LocatedRoot, StripReport
from ..models.verification import VerificationCheck
from ..utils.complex_codec import format_complex
from .evaluator_service import proj

logger = logging.getLogger(__name__)

COLUMNS: dict[str, tuple[str, ...]] = {
    "count": ("sigmaLeft", "sigmaRight", "tBottom", "tTop", "a", "winding", "predicted", "discrepancy"),
    "locate": ("re", "im", "radius", "multiplicity"),
    "scan-line": ("t", "value", "kind", "residual"),
    "cluster": ("T", "U", "epsilon", "sigma_bound", "total", "within", "outside", "outside_fraction"),
    "strip": ("t", "sigma", "statistic", "bound", "passed"),
    "eval": ("s", "zeta_n", "f_n", "g"),
    "verify": ("check", "observed", "target", "passed"),
}

Row = Sequence[str]


def format_float(x: float | None) -> str:
    """Shortest text that reads back to the same double; empty for None."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _flag(value: bool) -> str:
    return "true" if value else "false"


def count_rows(report: CountReport) -> list[Row]:
    region = report.region
    return [[
        format_float(region.sigma_left),
        format_float(region.sigma_right),
        format_float(region.t_bottom),
        format_float(region.t_top),
        format_complex(report.a),
        str(report.winding),
        format_float(report.predicted),
        format_float(report.discrepancy),
    ]]


def locate_rows(roots: Iterable[LocatedRoot]) -> list[Row]:
    return [
        [format_float(root.center.real), format_float(root.center.imag), format_float(root.radius), str(root.multiplicity)]
        for root in roots
    ]


def line_rows(result: LineScanResult) -> list[Row]:
    """Sample rows followed by zero, candidate and hit rows, each in t order.

    Sample values are Z(t) for a zero scan and 2 proj_alpha z(t) - |a| for a
    census; candidate and hit rows carry |zeta_N - a| as residual.
    """
    samples = result.samples
    if result.a is None:
        values = samples.Z
    else:
        a = complex(result.a)
        values = 2.0 * np.asarray(proj(math.atan2(a.imag, a.real), samples.z)) - abs(a)
    rows: list[Row] = [
        [format_float(t), format_float(v), PointKind.SAMPLE.value, ""]
        for t, v in zip(samples.t.tolist(), np.atleast_1d(values).tolist())
    ]
    rows.extend([format_float(t), "0.0", PointKind.ZERO.value, ""] for t in result.zero_ordinates)
    residual_of = dict(zip(result.candidates, result.candidate_residuals))
    rows.extend(
        [format_float(t), "", PointKind.CANDIDATE.value, format_float(residual)]
        for t, residual in zip(result.candidates, result.candidate_residuals)
    )
    rows.extend(
        [format_float(t), "", PointKind.HIT.value, format_float(residual_of.get(t))]
        for t in result.hits
    )
    return rows


def cluster_rows(report: ClusterReport) -> list[Row]:
    return [[
        format_float(report.T),
        format_float(report.U),
        format_float(report.epsilon),
        format_float(report.sigma_bound),
        str(report.total),
        str(report.within),
        str(report.outside),
        format_float(report.outside_fraction),
    ]]


def strip_rows(report: StripReport) -> list[Row]:
    return [
        [format_float(p.t), format_float(p.sigma), format_float(p.statistic), format_float(p.bound), _flag(p.passed)]
        for p in report.points
    ]


def eval_rows(points: Sequence[complex], zeta: Sequence[complex], fn: Sequence[complex], g: Sequence[complex]) -> list[Row]:
    return [
        [format_complex(s), format_complex(z), format_complex(f), format_complex(gv)]
        for s, z, f, gv in zip(points, zeta, fn, g)
    ]


def verify_rows(checks: Iterable[VerificationCheck]) -> list[Row]:
    return [
        [check.check, format_float(check.observed), format_float(check.target), _flag(check.passed)]
        for check in checks
    ]


def write_csv(path: Path, kind: str, rows: Iterable[Row]) -> Path:
    """Write a CSV artifact with its mandatory header row (UTF-8, LF endings).

    Args:
        path: Destination file; parent directories are created.
        kind: Schema name, a key of ``COLUMNS``.
        rows: Pre-formatted rows.

    Returns:
        The written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COLUMNS[kind])
        writer.writerows(rows)
    logger.info("wrote %s", path)
    return path


def versions() -> dict[str, str]:
    """Versions of the package and the numerical stack."""
    return {
        "zetapprox": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def build_manifest(
    config: dict[str, Any],
    artifacts: Sequence[Path],
    timings: dict[str, float],
    seeds: Sequence[int] = (),
    psi_case: str | None = None,
    extra: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Assemble the run manifest: config echo, versions, timings, seeds and outputs."""
    manifest: dict[str, Any] = {
        "config": config,
        "versions": versions(),
        "timings": {name: round(seconds, 6) for name, seconds in timings.items()},
        "seeds": list(seeds),
        "artifacts": [str(path) for path in artifacts],
    }
    if psi_case is not None:
        manifest["psi_case"] = psi_case
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(path: Path, manifest: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path
