"""Run configuration documents: YAML with sections ``model``, ``command`` and ``output``."""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import yaml

from ..errors import ConfigError, ValidationError
from ..utils.complex_codec import format_complex, parse_complex

logger = logging.getLogger(__name__)

COMMANDS = ("eval", "count", "locate", "scan-line", "cluster", "strip", "verify")
VERIFY_TARGETS = ("spira", "count", "cluster", "critical-zero", "critical", "strip")

MODEL_KEYS = {"preset", "N", "series", "functional_equation", "sigma0"}
SERIES_KEYS = {"coefficients", "exponents", "envelope"}
ENVELOPE_KEYS = {"C", "p"}
FE_KEYS = {"lambda", "delta", "omega"}
OMEGA_KEYS = {"alpha", "beta"}
COMMAND_KEYS = {
    "name", "target", "a", "T", "U", "epsilon", "sigma_bound", "hit_tol", "gamma",
    "radius", "sigma", "t_grid", "region", "seeds", "points",
}
T_GRID_KEYS = {"start", "stop", "count"}
REGION_KEYS = {"sigma_left", "sigma_right", "t_bottom", "t_top"}
OUTPUT_KEYS = {"directory", "prefix", "workers"}


@dataclass(frozen=True)
class SeriesConfig:
    coefficients: tuple[complex, ...]
    exponents: tuple[float, ...]
    envelope_C: float = 1.0
    envelope_p: float = 1.0


@dataclass(frozen=True)
class FunctionalEquationConfig:
    lam: float
    delta: float
    omega: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ModelConfig:
    """Either a preset name with N, or an inline series with functional-equation data."""

    preset: str | None = None
    N: int | None = None
    series: SeriesConfig | None = None
    functional_equation: FunctionalEquationConfig | None = None
    sigma0: float = 2.0


@dataclass(frozen=True)
class TGrid:
    start: float = 50.0
    stop: float = 500.0
    count: int = 20

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + k * step for k in range(self.count)]


@dataclass(frozen=True)
class RegionConfig:
    sigma_left: float
    sigma_right: float
    t_bottom: float
    t_top: float


@dataclass(frozen=True)
class CommandConfig:
    name: str
    target: str | None = None
    a: complex = 0j
    T: float = 1000.0
    U: float = 100.0
    epsilon: float = 0.05
    sigma_bound: float | None = None
    hit_tol: float = 1e-8
    gamma: float | None = None
    radius: float = 1e-6
    sigma: float = 30.0
    t_grid: TGrid = field(default_factory=TGrid)
    region: RegionConfig | None = None
    seeds: tuple[int, ...] = (0,)
    points: tuple[complex, ...] = ()


@dataclass(frozen=True)
class OutputConfig:
    directory: str | None = None
    prefix: str | None = None
    workers: int | None = None


@dataclass(frozen=True)
class RunConfig:
    """A fully defaulted and validated run configuration."""

    model: ModelConfig
    command: CommandConfig
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def prefix(self) -> str:
        """Artifact file prefix; defaults to the command (and verify target) name."""
        if self.output.prefix:
            return self.output.prefix
        if self.command.name == "verify":
            return f"verify-{self.command.target}"
        return self.command.name


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Reader:
    """Pulls typed values out of a loaded document, with line numbers for errors."""

    def __init__(self, lines: dict[str, int]) -> None:
        self.lines = lines

    def fail(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, key=key, line=self.lines.get(key))

    def section(self, value: Any, key: str, allowed: set[str], required: bool = True) -> dict[str, Any]:
        if value is None and not required:
            return {}
        if not isinstance(value, dict):
            raise self.fail(key, "expected a mapping")
        for name in value:
            if name not in allowed:
                child = f"{key}.{name}" if key else str(name)
                raise ConfigError(f"unknown key '{name}'", key=child, line=self.lines.get(child))
        return value

    def number(self, value: Any, key: str) -> float:
        # YAML 1.1 reads exponent forms without a dot (1e-8) as strings.
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(key, f"expected a number, got {value!r}")
        return float(value)

    def optional_number(self, value: Any, key: str) -> float | None:
        return None if value is None else self.number(value, key)

    def integer(self, value: Any, key: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(key, f"expected an integer, got {value!r}")
        return value

    def complex_value(self, value: Any, key: str) -> complex:
        try:
            return parse_complex(value)
        except ValueError as err:
            raise self.fail(key, str(err)) from None

    def sequence(self, value: Any, key: str) -> list[Any]:
        if not isinstance(value, list):
            raise self.fail(key, "expected a list")
        return value


def _key_lines(node: yaml.Node | None, prefix: str = "") -> dict[str, int]:
    """Map dotted mapping keys to 1-based document lines."""
    lines: dict[str, int] = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[key] = key_node.start_mark.line + 1
            lines.update(_key_lines(value_node, key))
    return lines


def _parse_model(doc: dict[str, Any], r: _Reader) -> ModelConfig:
    model = r.section(doc.get("model"), "model", MODEL_KEYS)
    sigma0 = r.number(model.get("sigma0", 2.0), "model.sigma0")
    preset = model.get("preset")
    has_inline = "series" in model or "functional_equation" in model

    if preset is not None:
        if has_inline:
            raise r.fail("model.preset", "give either a preset or an inline series, not both")
        if "N" not in model:
            raise r.fail("model.N", "a preset needs N")
        N = r.integer(model["N"], "model.N")
        if N < 1:
            raise ValidationError(f"N must be at least 1; got {N}.", invariant="N >= 1")
        return ModelConfig(preset=str(preset), N=N, sigma0=sigma0)

    if not has_inline:
        raise r.fail("model", "expected 'preset' or 'series' with 'functional_equation'")
    if "N" in model:
        raise r.fail("model.N", "N is only used with a preset")

    series = r.section(model.get("series"), "model.series", SERIES_KEYS)
    coefficients = tuple(
        r.complex_value(c, "model.series.coefficients")
        for c in r.sequence(series.get("coefficients"), "model.series.coefficients")
    )
    exponents = tuple(
        r.number(x, "model.series.exponents")
        for x in r.sequence(series.get("exponents"), "model.series.exponents")
    )
    envelope = r.section(series.get("envelope"), "model.series.envelope", ENVELOPE_KEYS, required=False)
    series_config = SeriesConfig(
        coefficients=coefficients,
        exponents=exponents,
        envelope_C=r.number(envelope.get("C", 1.0), "model.series.envelope.C"),
        envelope_p=r.number(envelope.get("p", 1.0), "model.series.envelope.p"),
    )

    fe = r.section(model.get("functional_equation"), "model.functional_equation", FE_KEYS)
    omega = []
    for term in r.sequence(fe.get("omega"), "model.functional_equation.omega"):
        term = r.section(term, "model.functional_equation.omega", OMEGA_KEYS)
        omega.append((
            r.number(term.get("alpha"), "model.functional_equation.omega.alpha"),
            r.number(term.get("beta", 0.0), "model.functional_equation.omega.beta"),
        ))
    fe_config = FunctionalEquationConfig(
        lam=r.number(fe.get("lambda"), "model.functional_equation.lambda"),
        delta=r.number(fe.get("delta", 1.0), "model.functional_equation.delta"),
        omega=tuple(omega),
    )
    return ModelConfig(series=series_config, functional_equation=fe_config, sigma0=sigma0)


def _parse_command(doc: dict[str, Any], r: _Reader) -> CommandConfig:
    command = r.section(doc.get("command"), "command", COMMAND_KEYS)
    name = command.get("name")
    if name not in COMMANDS:
        raise r.fail("command.name", f"must be one of {', '.join(COMMANDS)}; got {name!r}")
    target = command.get("target")
    if name == "verify":
        if target not in VERIFY_TARGETS:
            raise r.fail("command.target", f"must be one of {', '.join(VERIFY_TARGETS)}; got {target!r}")
    elif target is not None:
        raise r.fail("command.target", "only the verify command takes a target")

    defaults = CommandConfig(name=name)
    grid = r.section(command.get("t_grid"), "command.t_grid", T_GRID_KEYS, required=False)
    t_grid = TGrid(
        start=r.number(grid.get("start", defaults.t_grid.start), "command.t_grid.start"),
        stop=r.number(grid.get("stop", defaults.t_grid.stop), "command.t_grid.stop"),
        count=r.integer(grid.get("count", defaults.t_grid.count), "command.t_grid.count"),
    )
    region = None
    if command.get("region") is not None:
        raw = r.section(command["region"], "command.region", REGION_KEYS)
        region = RegionConfig(**{
            key: r.number(raw.get(key), f"command.region.{key}")
            for key in ("sigma_left", "sigma_right", "t_bottom", "t_top")
        })
    seeds = tuple(r.integer(seed, "command.seeds") for seed in r.sequence(command.get("seeds", [0]), "command.seeds"))
    points = tuple(r.complex_value(p, "command.points") for p in r.sequence(command.get("points", []), "command.points"))

    return CommandConfig(
        name=name,
        target=target,
        a=r.complex_value(command.get("a", 0), "command.a"),
        T=r.number(command.get("T", defaults.T), "command.T"),
        U=r.number(command.get("U", defaults.U), "command.U"),
        epsilon=r.number(command.get("epsilon", defaults.epsilon), "command.epsilon"),
        sigma_bound=r.optional_number(command.get("sigma_bound"), "command.sigma_bound"),
        hit_tol=r.number(command.get("hit_tol", defaults.hit_tol), "command.hit_tol"),
        gamma=r.optional_number(command.get("gamma"), "command.gamma"),
        radius=r.number(command.get("radius", defaults.radius), "command.radius"),
        sigma=r.number(command.get("sigma", defaults.sigma), "command.sigma"),
        t_grid=t_grid,
        region=region,
        seeds=seeds,
        points=points,
    )


def _parse_output(doc: dict[str, Any], r: _Reader) -> OutputConfig:
    output = r.section(doc.get("output"), "output", OUTPUT_KEYS, required=False)
    workers = output.get("workers")
    return OutputConfig(
        directory=None if output.get("directory") is None else str(output["directory"]),
        prefix=None if output.get("prefix") is None else str(output["prefix"]),
        workers=None if workers is None else r.integer(workers, "output.workers"),
    )


def _check_ranges(config: RunConfig) -> None:
    command = config.command
    positive = {"T": command.T, "epsilon": command.epsilon, "hit_tol": command.hit_tol, "radius": command.radius}
    for key, value in positive.items():
        if not value > 0 or math.isinf(value):
            raise ValidationError(f"command.{key} must be positive and finite; got {value}.", invariant=f"{key} > 0")
    if not command.U > 0:
        raise ValidationError(f"command.U must be positive; got {command.U}.", invariant="U > 0")
    if command.sigma_bound is not None and not command.sigma_bound > 0:
        raise ValidationError("command.sigma_bound must be positive.", invariant="sigmaBound > 0")
    if command.gamma is not None and not command.gamma > 0:
        raise ValidationError("command.gamma must be positive.", invariant="gamma > 0")
    if command.t_grid.count < 1 or command.t_grid.start > command.t_grid.stop:
        raise ValidationError("command.t_grid needs count >= 1 and start <= stop.", invariant="t_grid")
    if config.output.workers is not None and config.output.workers < 1:
        raise ValidationError("output.workers must be at least 1.", invariant="workers >= 1")
    if command.name == "locate" and command.region is None:
        raise ValidationError("locate needs command.region.", invariant="region given")
    if command.name == "eval" and not command.points:
        raise ValidationError("eval needs command.points.", invariant="points given")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration document.

    Unknown keys are rejected, defaults are filled, and the model is built once
    so that its invariants are checked before anything runs.

    Args:
        text: YAML document text.

    Returns:
        The validated RunConfig.

    Raises:
        ConfigError: For malformed YAML, unknown keys or wrongly typed values.
        ValidationError: For values outside the ranges the services accept.
    """
    try:
        doc = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark
        raise ConfigError(str(err.problem), line=None if mark is None else mark.line + 1) from None
    except yaml.YAMLError as err:
        raise ConfigError(str(err)) from None

    reader = _Reader(_key_lines(root))
    doc = reader.section(doc, "", {"model", "command", "output"})
    config = RunConfig(
        model=_parse_model(doc, reader),
        command=_parse_command(doc, reader),
        output=_parse_output(doc, reader),
    )
    _check_ranges(config)

    # Deferred import: the commands module imports this one.
    from .commands import build_model

    build_model(config.model)
    logger.debug("parsed %s config", config.command.name)
    return config


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def config_to_dict(config: RunConfig) -> dict[str, Any]:
    """The document form of a config, every default included."""
    model = config.model
    if model.preset is not None:
        model_doc: dict[str, Any] = {"preset": model.preset, "N": model.N, "sigma0": model.sigma0}
    else:
        series, fe = model.series, model.functional_equation
        model_doc = {
            "series": {
                "coefficients": [format_complex(c) for c in series.coefficients],
                "exponents": list(series.exponents),
                "envelope": {"C": series.envelope_C, "p": series.envelope_p},
            },
            "functional_equation": {
                "lambda": fe.lam,
                "delta": fe.delta,
                "omega": [{"alpha": alpha, "beta": beta} for alpha, beta in fe.omega],
            },
            "sigma0": model.sigma0,
        }

    command = asdict(config.command)
    command["a"] = format_complex(config.command.a)
    command["seeds"] = list(config.command.seeds)
    command["points"] = [format_complex(p) for p in config.command.points]
    if config.command.target is None:
        del command["target"]
    return {"model": model_doc, "command": command, "output": asdict(config.output)}


def serialize_config(config: RunConfig) -> str:
    """YAML text that ``parse_config`` reads back to an equal config."""
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=False)
