import json
import textwrap
from pathlib import Path

import click
import pytest
from click.testing import CliRunner

from zetapprox import create_app
from zetapprox.cli import cli
from zetapprox.cli.run_config import parse_config, serialize_config
from zetapprox.errors import (
    EXIT_BOUNDARY,
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_VERIFICATION,
    BoundaryRootError,
    ConfigError,
    ValidationError,
    VerificationFailedError,
    register_error_handlers,
)
from zetapprox.utils.complex_codec import format_complex, parse_complex

MINIMAL = textwrap.dedent("""\
    model:
      preset: zeta
      N: 3
    command:
      name: count
      a: "2+0i"
      T: 1000
      U: 100
""")

INLINE = textwrap.dedent("""\
    model:
      series:
        coefficients: ["1+0i", "-1+0i", "1+0i"]
        exponents: [1, 3, 5]
        envelope: {C: 2, p: 1}
      functional_equation:
        lambda: 0.886226925452758
        delta: 1
        omega:
          - {alpha: 0.5, beta: 0.5}
    command:
      name: scan-line
      a: "0"
      T: 100
      U: 10
    output:
      prefix: l4
""")

STRIP_VERIFY = textwrap.dedent("""\
    model:
      preset: zeta
      N: 3
    command:
      name: verify
      target: strip
      a: "2+0i"
      sigma: 30
      t_grid: {start: 50, stop: 500, count: 20}
      seeds: [1, 2]
""")


@pytest.fixture
def runner():
    yield CliRunner(mix_stderr=False)
    # The CLI points the log handler at the runner's captured stderr.
    create_app("testing")


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_minimal_document_is_valid():
    config = parse_config(MINIMAL)
    assert config.model.preset == "zeta" and config.model.N == 3
    assert config.command.a == 2
    assert config.command.hit_tol == 1e-8
    assert config.prefix == "count"


@pytest.mark.parametrize("text", [MINIMAL, INLINE, STRIP_VERIFY])
def test_serialization_round_trip(text):
    config = parse_config(text)
    assert parse_config(serialize_config(config)) == config


def test_unknown_keys_name_their_line():
    with pytest.raises(ConfigError) as excinfo:
        parse_config(MINIMAL + "  colour: blue\n")
    assert excinfo.value.key == "command.colour"
    assert excinfo.value.line == 9


def test_malformed_yaml_names_its_line():
    with pytest.raises(ConfigError) as excinfo:
        parse_config("model:\n  preset: zeta\n  N: [3\n")
    assert excinfo.value.line is not None


def test_exponent_violation_in_inline_model():
    with pytest.raises(ValidationError) as excinfo:
        parse_config(INLINE.replace("exponents: [1, 3, 5]", "exponents: [1, 1, 5]"))
    assert "exponents" in excinfo.value.message


def test_verify_needs_a_known_target():
    with pytest.raises(ConfigError):
        parse_config(STRIP_VERIFY.replace("target: strip", "target: everything"))


@pytest.mark.parametrize("text, expected", [("2+0i", 2), ("1-2.5i", 1 - 2.5j), ("-3i", -3j), ("0.25", 0.25)])
def test_complex_codec(text, expected):
    assert parse_complex(text) == expected
    assert parse_complex(format_complex(expected)) == expected


def test_complex_format_uses_full_precision():
    assert format_complex(0.1 + 1 / 3 * 1j) == "0.10000000000000001+0.33333333333333331i"


def test_show_config_echoes_defaults_and_psi_case(runner, tmp_path):
    path = _write(tmp_path, MINIMAL.replace('"2+0i"', '"1+0i"'))
    result = runner.invoke(cli, ["show-config", str(path)])
    assert result.exit_code == 0, result.stderr
    assert "hit_tol: 1.0e-08" in result.output
    assert "# psi case: a = a1 != 0" in result.output


def test_strip_run_writes_csv_and_manifest(runner, tmp_path):
    path = _write(tmp_path, STRIP_VERIFY.replace("name: verify\n  target: strip", "name: strip"))
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", str(path), "--output-dir", str(out)])
    assert result.exit_code == 0, result.stderr
    lines = (out / "strip-strip.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,sigma,statistic,bound,passed"
    assert len(lines) == 41
    manifest = json.loads((out / "strip-manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["command"]["name"] == "strip"
    assert manifest["psi_case"] == "otherwise"
    assert "numpy" in manifest["versions"]


def test_verify_runs_are_byte_identical(runner, tmp_path):
    path = _write(tmp_path, STRIP_VERIFY)
    bodies = []
    for name in ("first", "second"):
        result = runner.invoke(cli, ["run", str(path), "--output-dir", str(tmp_path / name), "--workers", "1"])
        assert result.exit_code == 0, result.stderr
        bodies.append([
            (tmp_path / name / f"verify-strip-{kind}.csv").read_bytes() for kind in ("strip", "checks")
        ])
    assert bodies[0] == bodies[1]
    assert b"false" not in bodies[0][1]


def test_eval_run(runner, tmp_path):
    path = _write(tmp_path, MINIMAL.replace("name: count", 'name: eval\n  points: ["0.5+14i", "2+1i"]'))
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", str(path), "--output-dir", str(out)])
    assert result.exit_code == 0, result.stderr
    lines = (out / "eval-eval.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "s,zeta_n,f_n,g"
    assert lines[1].startswith("0.5+14i,")
    assert len(lines) == 3


def test_config_errors_exit_with_status_1(runner, tmp_path):
    path = _write(tmp_path, MINIMAL + "extra: 1\n")
    result = runner.invoke(cli, ["run", str(path)])
    assert result.exit_code == EXIT_CONFIG
    assert json.loads(result.stderr.strip().splitlines()[-1])["error"] == "CONFIG_ERROR"


def test_numeric_errors_exit_with_status_2(runner, tmp_path):
    path = _write(tmp_path, MINIMAL.replace("name: count", 'name: eval\n  points: ["-2+0i"]'))
    result = runner.invoke(cli, ["run", str(path), "--output-dir", str(tmp_path / "out")])
    assert result.exit_code == EXIT_NUMERIC
    assert json.loads(result.stderr.strip().splitlines()[-1])["error"] == "POLE"


@pytest.mark.parametrize(
    "error, status",
    [(BoundaryRootError(), EXIT_BOUNDARY), (VerificationFailedError(["x"]), EXIT_VERIFICATION)],
)
def test_error_statuses(runner, error, status):
    @click.command()
    @register_error_handlers
    def failing():
        raise error

    result = runner.invoke(failing, [])
    assert result.exit_code == status
    assert json.loads(result.stderr)["error"] == error.code


@pytest.mark.parametrize("path", sorted((Path(__file__).parent.parent / "configs").glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_configs_parse(path):
    config = parse_config(path.read_text(encoding="utf-8"))
    assert parse_config(serialize_config(config)) == config


def test_count_csv_columns_and_model_facts(runner, tmp_path):
    region = "  region: {sigma_left: -1, sigma_right: 2, t_bottom: 100, t_top: 110}\n"
    path = _write(tmp_path, MINIMAL + region)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", str(path), "--output-dir", str(out)])
    assert result.exit_code == 0, result.stderr
    lines = (out / "count-count.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "sigmaLeft,sigmaRight,tBottom,tTop,a,winding,predicted,discrepancy"
    assert len(lines) == 2
    assert lines[1].startswith("-1.0,2.0,100.0,110.0,2+0i,")
    facts = json.loads((out / "count-manifest.json").read_text(encoding="utf-8"))["model"]
    assert facts["default_gamma"] == pytest.approx(2.1)
    assert 0 < facts["default_nu"] < 1
    assert 4.0 < facts["monotone_threshold"] < 9.0
    assert [point["passed"] for point in facts["envelope"]] == [True, True]


def test_verify_spira_passes(runner, tmp_path):
    text = textwrap.dedent("""\
        model:
          preset: zeta
          N: 2
        command:
          name: verify
          target: spira
          region: {sigma_left: -3, sigma_right: 4, t_bottom: 10, t_top: 50}
    """)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", str(_write(tmp_path, text)), "--output-dir", str(out)])
    assert result.exit_code == 0, result.stderr
    checks = (out / "verify-spira-checks.csv").read_text(encoding="utf-8").splitlines()
    assert len(checks) == 4
    assert all(line.endswith(",true") for line in checks[1:])


def test_verify_critical_compares_three_windows(runner, tmp_path):
    text = textwrap.dedent("""\
        model:
          preset: zeta
          N: 3
        command:
          name: verify
          target: critical
          a: "2+0i"
          T: 500
          U: 50
    """)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", str(_write(tmp_path, text)), "--output-dir", str(out)])
    assert result.exit_code == 0, result.stderr
    for label in ("U50", "U100", "U200"):
        assert (out / f"verify-critical-scan-line-{label}.csv").exists()
    checks = (out / "verify-critical-checks.csv").read_text(encoding="utf-8")
    assert "candidate_density_spread," in checks
    manifest = json.loads((out / "verify-critical-manifest.json").read_text(encoding="utf-8"))
    assert set(manifest["candidates_per_scale"]) == {"U50", "U100", "U200"}


def test_unexpected_errors_exit_with_status_2(runner):
    @click.command()
    @register_error_handlers
    def failing():
        raise RuntimeError("boom")

    result = runner.invoke(failing, [])
    assert result.exit_code == EXIT_NUMERIC
    assert json.loads(result.stderr.strip().splitlines()[-1])["error"] == "INTERNAL_ERROR"
