from __future__ import annotations

import argparse
import json

import pytest

from resolvent_lab import main
from resolvent_lab.base import CheckModule, CheckName
from resolvent_lab.cli import parse_complex, parse_floats
from resolvent_lab.errors import ConfigError, NoConvergence, OutOfRange, PoleAtR
from resolvent_lab.runtime.generator import GeneratorSpec
from resolvent_lab.schema.dump import dump_yaml
from resolvent_lab.schema.registry import CheckDefinition, CheckRegistry
from resolvent_lab.schema.schema_model import CheckReport
from resolvent_lab.runtime.suite import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_NUMERICAL,
    EXIT_PASS,
    default_registry,
    plan_tasks,
    run_suite,
)
from resolvent_lab.utils.load import suite_from_mapping

SMALL_GRID = {"radii": 4, "angles": 16, "outer_radius": 0.99}


def make_suite(checks, r_values=(10.0,), files=("linear",), policy="skip"):
    return suite_from_mapping(
        {
            "generator_files": list(files),
            "r_values": list(r_values),
            "checks": list(checks),
            "grid": SMALL_GRID,
            "on_inapplicable": policy,
        }
    )


def single_check_registry(run):
    return CheckRegistry(
        [CheckDefinition(CheckName.squeezing, CheckModule.semigroup, "stub", False, run, lambda g, r: None)]
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def test_default_registry_contents():
    registry = default_registry()
    assert len(registry) == 9
    assert set(registry.names()) == CheckName.values()
    assert registry.summary() == {"geometry": 4, "semigroup": 5}
    assert "sector" in registry and "bogus" not in registry
    assert registry.get("starlike_disk").per_r
    assert not registry.get("normalized_convergence").per_r


def test_registry_lookups():
    registry = default_registry()
    with pytest.raises(KeyError):
        registry.require(["sector", "bogus"])
    assert [d.name for d in registry.require(["sector"])] == [CheckName.sector]
    assert registry.try_get(None) is None
    assert registry.describe("bogus") == ""
    with pytest.raises(ValueError):
        CheckRegistry([registry.get("sector"), registry.get("sector")])


# ---------------------------------------------------------------------------
# Planning and running
# ---------------------------------------------------------------------------


def test_plan_skips_inapplicable_tasks():
    suite = make_suite(["starlike_disk", "squeezing"], r_values=(1.0, 10.0), files=("linear", "koebe"))
    tasks, skipped = plan_tasks(suite)
    assert [repr(t) for t in tasks] == [
        "<CheckTask linear/starlike_disk r=10>",
        "<CheckTask linear/squeezing>",
        "<CheckTask koebe/starlike_disk r=10>",
        "<CheckTask koebe/squeezing>",
    ]
    assert len(skipped) == 2
    assert all("r0" in s for s in skipped)


def test_plan_raises_under_error_policy():
    suite = make_suite(["starlike_disk"], r_values=(1.0,), policy="error")
    with pytest.raises(ConfigError) as info:
        plan_tasks(suite)
    assert info.value.path == "linear/starlike_disk at r = 1"
    assert "r0" in str(info.value)


def test_resolvent_generator_runs_below_six_for_real_q():
    tasks, skipped = plan_tasks(make_suite(["resolvent_generator"], r_values=(1.0, 10.0)))
    assert [t.r for t in tasks] == [1.0, 10.0]
    assert skipped == []
    definition = default_registry().get("resolvent_generator")
    assert definition.precondition(GeneratorSpec.koebe(1.0), 0.5) is None
    assert "not real" in definition.precondition(GeneratorSpec.koebe(1.0 + 1.0j), 5.0)
    assert definition.precondition(GeneratorSpec.koebe(1.0 + 1.0j), 6.0) is None


def test_plan_needs_every_check_registered():
    registry = single_check_registry(lambda task: None)
    with pytest.raises(ConfigError) as info:
        plan_tasks(make_suite(["squeezing", "sector"]), registry)
    assert info.value.path == "checks"
    assert "sector" in str(info.value)


def test_report_rendering():
    params = {f"p{i}": i for i in range(8)}
    failed = CheckReport("squeezing", False, -0.25, 0.5 + 0j, params, {})
    assert "(+2 more)" in str(failed)
    html = failed._repr_html_()
    assert "FAIL" in html and "#cf222e" in html
    summary = run_suite(make_suite(["squeezing"]), write=False).summary._repr_html_()
    assert summary.count("text-align:right") == 10
    assert "(+" not in str(default_registry())


def test_lemma_bounds_skip_non_atomic_generators():
    suite = make_suite(["lemma_bounds"], files=("koebe", "atomic_a"))
    tasks, skipped = plan_tasks(suite)
    assert [t.generator.name for t in tasks] == ["atomic_a"]
    assert "atomic" in skipped[0]


def test_run_suite_writes_reports(tmp_path):
    result = run_suite(make_suite(["starlike_disk"]), output_dir=tmp_path, threads=1)
    assert result.exit_code == EXIT_PASS
    report = json.loads((tmp_path / "linear" / "starlike_disk_r10.json").read_text())
    assert report["check"] == "starlike_disk"
    assert report["pass"] is True
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["total"] == 1 and summary["passed"] == 1
    assert (tmp_path / "config.yaml").exists()
    assert result.files[-2:] == (tmp_path / "summary.json", tmp_path / "config.yaml")


def test_summary_counts_skipped_tasks(tmp_path):
    result = run_suite(
        make_suite(["starlike_disk", "uniform_bound"], r_values=(1.0, 10.0)), output_dir=tmp_path, threads=1
    )
    assert result.summary.skipped == 2
    assert result.summary.total == 4
    assert result.exit_code == EXIT_PASS


def test_reports_are_deterministic(tmp_path):
    suite = make_suite(["starlike_disk", "subordination", "squeezing"], files=("linear", "koebe"))
    first = run_suite(suite, output_dir=tmp_path / "a", threads=1)
    second = run_suite(suite, output_dir=tmp_path / "b", threads=4)
    assert len(first.files) == len(second.files)
    for a, b in zip(first.files, second.files):
        assert a.relative_to(tmp_path / "a") == b.relative_to(tmp_path / "b")
        assert a.read_bytes() == b.read_bytes()


def test_failed_check_exits_one(tmp_path):
    def failing(task):
        return CheckReport("squeezing", False, -1.0, 0.5 + 0j, {}, {})

    result = run_suite(make_suite(["squeezing"]), registry=single_check_registry(failing), output_dir=tmp_path)
    assert result.exit_code == EXIT_FAILURE
    assert result.summary.failed == 1


def test_numerical_failure_is_recorded(tmp_path):
    def diverging(task):
        raise NoConvergence("no root")

    result = run_suite(make_suite(["squeezing"]), registry=single_check_registry(diverging), output_dir=tmp_path)
    assert result.exit_code == EXIT_NUMERICAL
    assert result.summary.errors == 1
    written = json.loads((tmp_path / "linear" / "squeezing.json").read_text())
    assert written["pass"] is False
    assert written["error"].startswith("NoConvergence")


def test_rejected_inputs_keep_other_reports(tmp_path):
    def passing(task):
        return CheckReport("squeezing", True, 0.1, 0.5 + 0j, {}, {})

    def out_of_range(task):
        raise OutOfRange("radius out of range inside a check")

    registry = CheckRegistry(
        [
            CheckDefinition(CheckName.squeezing, CheckModule.semigroup, "stub", False, passing, lambda g, r: None),
            CheckDefinition(
                CheckName.starlike_disk, CheckModule.geometry, "stub", True, out_of_range, lambda g, r: None
            ),
        ]
    )
    suite = make_suite(["squeezing", "starlike_disk"])
    result = run_suite(suite, registry=registry, output_dir=tmp_path, threads=2)
    assert result.exit_code == EXIT_CONFIG
    assert result.numerical_failures == 0 and result.precondition_errors == 1
    assert result.summary.passed == 1 and result.summary.errors == 1
    assert json.loads((tmp_path / "linear" / "squeezing.json").read_text())["pass"] is True
    rejected = json.loads((tmp_path / "linear" / "starlike_disk_r10.json").read_text())
    assert rejected["error"].startswith("OutOfRange")
    assert rejected["error_kind"] == "precondition"
    assert json.loads((tmp_path / "summary.json").read_text())["errors"] == 1
    assert (tmp_path / "config.yaml").exists()


def test_numerical_failure_outranks_rejected_inputs(tmp_path):
    def diverging(task):
        raise NoConvergence("no root")

    def pole(task):
        raise PoleAtR("A(r) has a pole here")

    registry = CheckRegistry(
        [
            CheckDefinition(CheckName.squeezing, CheckModule.semigroup, "stub", False, diverging, lambda g, r: None),
            CheckDefinition(CheckName.sector, CheckModule.semigroup, "stub", False, pole, lambda g, r: None),
        ]
    )
    result = run_suite(make_suite(["squeezing", "sector"]), registry=registry, output_dir=tmp_path, threads=1)
    assert result.exit_code == EXIT_NUMERICAL
    assert json.loads((tmp_path / "linear" / "sector.json").read_text())["error"].startswith("PoleAtR")


def test_run_without_writing(tmp_path):
    result = run_suite(make_suite(["squeezing"]), output_dir=tmp_path, write=False)
    assert result.files == ()
    assert not any(tmp_path.iterdir())


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def test_parse_helpers():
    assert parse_complex("0.3+0.1i") == 0.3 + 0.1j
    assert parse_complex(" -2 ") == -2.0
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex("nope")
    assert parse_floats("0.5, 0.9,") == [0.5, 0.9]
    with pytest.raises(argparse.ArgumentTypeError):
        parse_floats("a,b")


def test_cli_r0(capsys):
    assert main(["r0"]) == EXIT_PASS
    assert "5.92434" in capsys.readouterr().out


def test_cli_orders(capsys):
    assert main(["orders", "--q", "1", "--r", "10"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "alpha_star" in out and "rho1" in out


def test_cli_orders_below_r0(capsys):
    assert main(["orders", "--r", "3"]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().out


def test_cli_resolve(capsys):
    assert main(["resolve", "--gen", "koebe", "--r", "1", "--w", "0.5"]) == EXIT_PASS
    assert "G(w)      0.2" in capsys.readouterr().out


def test_cli_render(tmp_path):
    args = ["render", "--gen", "linear", "--r", "10", "--circles", "0.5", "--angles", "16", "--out", str(tmp_path)]
    assert main(args) == EXIT_PASS
    assert (tmp_path / "linear_r10.csv").exists()
    assert (tmp_path / "linear_r10.svg").exists()


def test_cli_suite(tmp_path):
    config = tmp_path / "suite.yaml"
    dump_yaml(
        {"generator_files": ["linear"], "r_values": [10.0], "checks": ["uniform_bound"], "grid": SMALL_GRID},
        config,
    )
    out = tmp_path / "reports"
    assert main(["suite", "--config", str(config), "--output-dir", str(out), "--threads", "1"]) == EXIT_PASS
    assert (out / "linear" / "uniform_bound_r10.json").exists()


def test_cli_suite_config_error(tmp_path):
    assert main(["suite", "--config", str(tmp_path / "absent.yaml")]) == EXIT_CONFIG


def test_cli_without_command(capsys):
    assert main([]) == EXIT_CONFIG
    assert main(["--list-checks"]) == EXIT_PASS
    assert "starlike_disk" in capsys.readouterr().out


def test_cli_lists_named_checks(capsys):
    assert main(["--list-checks", "sector", "squeezing"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "2 of 9" in out
    assert "sector" in out and "starlike_disk" not in out
    assert main(["--list-checks", "bogus"]) == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().out
