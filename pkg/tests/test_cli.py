import json

import pytest

from holonomy import cli
from holonomy.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, EXIT_RUNTIME, main


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


# =========================================================
# verify
# =========================================================

def test_verify_writes_a_passing_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["verify", "--scenes", "flat-su2-square", "--resolution", "8", "--out", str(out)])
    assert code == EXIT_PASS
    reports = read_json(out)
    assert [r["identity"] for r in reports] == ["stokes-2d", "horizontality", "fake-curvature"]
    assert all(r["verdict"] == "pass" for r in reports)
    assert all(r["wall_ms"] is None for r in reports)
    assert "PASS stokes-2d [flat-su2-square]" in capsys.readouterr().out


def test_verify_defaults_to_the_reports_dir(lab_home):
    code = main(["verify", "--scenes", "flat-su2-square", "--ids", "fake-curvature"])
    assert code == EXIT_PASS
    assert (lab_home / "reports" / "report.json").exists()
    assert (lab_home / "config.json").exists()
    assert "fake-curvature" in (lab_home / "holonomy.log").read_text(encoding="utf-8")


def test_verify_with_timing_records_wall_time(tmp_path):
    out = tmp_path / "r.json"
    main(["verify", "--scenes", "flat-su2-square", "--ids", "fake-curvature", "--timing", "--out", str(out)])
    assert read_json(out)[0]["wall_ms"] is not None


def test_failing_identity_exits_one(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--scenes", "su2-poly-square", "--ids", "stokes-2d", "--resolution", "8",
                 "--tol-mult", "1e-9", "--out", str(out)])
    assert code == EXIT_FAIL
    assert read_json(out)[0]["verdict"] == "fail"


def test_report_bytes_do_not_depend_on_threads(tmp_path):
    args = ["verify", "--scenes", "u1-square", "flat-su2-square", "--ids", "stokes-2d", "--resolution", "8"]
    one, two = tmp_path / "one.json", tmp_path / "two.json"
    assert main(args + ["--threads", "1", "--out", str(one)]) == EXIT_PASS
    assert main(args + ["--threads", "2", "--out", str(two)]) == EXIT_PASS
    assert one.read_bytes() == two.read_bytes()


@pytest.mark.parametrize("extra", [
    ["--scenes", "no-such-scene"],
    ["--scenes", "flat-su2-square", "--ids", "stokes-5d"],
    ["--scenes", "flat-su2-square", "--ids", "stokes-4d"],
    ["--scenes", "flat-su2-square", "--resolution", "30"],
    ["--scenes", "flat-su2-square", "--threads", "0"],
    ["--scenes", "flat-su2-square", "--tol-mult", "-1"],
])
def test_verify_config_errors_exit_two(extra, capsys):
    assert main(["verify"] + extra) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_malformed_scene_file_exits_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": 1, "id": "bad", "instance": "cm-inner-su2", "dim": 2,
                               "map": {"kind": "fan", "v0": [1.0, 0.0], "v1": [0.0, 1.0]},
                               "identities": ["stokes-2d"], "colour": "red"}), encoding="utf-8")
    assert main(["verify", "--scenes", str(bad)]) == EXIT_CONFIG


def test_bad_thread_limit_exits_two(monkeypatch):
    monkeypatch.setenv("HOLONOMY_THREADS", "many")
    assert main(["verify", "--scenes", "flat-su2-square", "--ids", "fake-curvature"]) == EXIT_CONFIG


def test_unexpected_failures_exit_three(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise RuntimeError("worker died")

    monkeypatch.setattr(cli, "run_suite", boom)
    assert main(["verify", "--scenes", "flat-su2-square", "--ids", "fake-curvature"]) == EXIT_RUNTIME
    assert "worker died" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


# =========================================================
# axioms
# =========================================================

def test_axioms_pass_for_a_crossed_2_module(tmp_path):
    out = tmp_path / "ax.json"
    assert main(["axioms", "--instance", "c2m-ce", "--samples", "200", "--out", str(out)]) == EXIT_PASS
    assert [r["identity"] for r in read_json(out)] == ["semidirect-laws", "crossed2-axioms", "lifting-equivariance"]


def test_axioms_fail_for_the_broken_action(lab_home):
    assert main(["axioms", "--instance", "broken-alpha", "--samples", "100"]) == EXIT_FAIL
    assert (lab_home / "reports" / "axioms-broken-alpha.json").exists()


def test_unknown_instance_exits_two():
    assert main(["axioms", "--instance", "nope", "--samples", "10"]) == EXIT_CONFIG


# =========================================================
# converge
# =========================================================

def test_converge_writes_a_table(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    code = main(["converge", "--scene", "flat-su2-square", "--id", "stokes-2d", "--resolutions", "8,16,32",
                 "--out", str(out)])
    assert code == EXIT_PASS
    assert out.read_text(encoding="utf-8").splitlines()[0] == "resolution,residual,order,floor"
    assert "fitted order: floor" in capsys.readouterr().out


def test_converge_json_output(tmp_path):
    out = tmp_path / "conv.json"
    main(["converge", "--scene", "flat-su2-square", "--id", "stokes-2d", "--resolutions", "8,16,32",
          "--out", str(out)])
    data = read_json(out)
    assert data["fitted_order"] == "floor"
    assert [row["resolution"] for row in data["rows"]] == [8, 16, 32]


@pytest.mark.parametrize("resolutions", ["8,16", "8,16,24", "6,12,24"])
def test_converge_needs_doubling_resolutions(resolutions):
    assert main(["converge", "--scene", "flat-su2-square", "--id", "stokes-2d",
                 "--resolutions", resolutions]) == EXIT_CONFIG
