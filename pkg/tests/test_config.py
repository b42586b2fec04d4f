import json

import pytest

from holonomy.config import LabConfig, RunConfig, env_thread_limit, load_config, save_config
from holonomy.errors import ConfigError
from holonomy.logging_util import LabLogger, log_file_path, verdict_line
from holonomy.logic.stokes.report import VerificationReport
from holonomy.paths import builtin_scenes_dir, config_path, reports_dir


def test_first_load_writes_defaults(lab_home):
    cfg = load_config()
    assert cfg == LabConfig()
    assert json.loads(config_path().read_text(encoding="utf-8"))["seed"] == 20240611
    assert config_path().parent == lab_home


def test_saved_settings_are_loaded_back():
    save_config(LabConfig(threads=4, tol_multiplier=20.0, record_timing=True, log_to_file=False))
    cfg = load_config()
    assert (cfg.threads, cfg.tol_multiplier, cfg.record_timing, cfg.log_to_file) == (4, 20.0, True, False)


def test_corrupt_config_falls_back_to_defaults():
    config_path().write_text("{threads: four", encoding="utf-8")
    assert load_config() == LabConfig()
    assert json.loads(config_path().read_text(encoding="utf-8"))["threads"] == 1


def test_paths_live_under_the_lab_home(lab_home):
    assert reports_dir() == lab_home / "reports"
    assert reports_dir().is_dir()
    assert log_file_path() == lab_home / "holonomy.log"
    assert (builtin_scenes_dir() / "flat-su2-square.json").exists()


# =========================================================
# Thread limit and run settings
# =========================================================

def test_thread_limit_from_environment(monkeypatch):
    assert env_thread_limit() is None
    monkeypatch.setenv("HOLONOMY_THREADS", "3")
    assert env_thread_limit() == 3
    assert RunConfig("verify", threads=8).effective_threads() == 3
    assert RunConfig("verify", threads=2).effective_threads() == 2


@pytest.mark.parametrize("raw", ["three", "0", "-2"])
def test_bad_thread_limit_is_a_config_error(monkeypatch, raw):
    monkeypatch.setenv("HOLONOMY_THREADS", raw)
    with pytest.raises(ConfigError):
        env_thread_limit()


@pytest.mark.parametrize("cfg,key", [
    (RunConfig("verify", threads=0), "threads"),
    (RunConfig("verify", tol_multiplier=0.0), "tol_mult"),
    (RunConfig("axioms", samples=0), "samples"),
    (RunConfig("verify", resolutions=[30]), "resolutions"),
    (RunConfig("converge", resolutions=[8, 16]), "resolutions"),
    (RunConfig("converge", resolutions=[8, 16, 48]), "resolutions"),
])
def test_invalid_run_settings(cfg, key):
    with pytest.raises(ConfigError) as exc:
        cfg.validate()
    assert exc.value.key == key


def test_valid_converge_settings():
    RunConfig("converge", resolutions=[8, 16, 32]).validate()


# =========================================================
# Run log
# =========================================================

def test_run_log_reaches_file_and_sink():
    lines = []
    log = LabLogger(sink=lines.append)
    log.info("scene a passed")
    log.warn("scene b failed")
    log.debug("detail")
    text = log_file_path().read_text(encoding="utf-8")
    assert "INFO: scene a passed" in text and "WARN: scene b failed" in text
    assert len(lines) == 3 and lines[2].endswith("DEBUG: detail")


def test_run_log_survives_a_broken_sink():
    def broken(line):
        raise OSError("closed")

    log = LabLogger(sink=broken, to_file=False)
    log.error("still fine")
    assert not log_file_path().exists()


def test_verdicts_are_logged_by_outcome():
    lines = []
    log = LabLogger(sink=lines.append, to_file=False)
    ok = VerificationReport(identity="stokes-2d", scene="u1-square", residual=1e-12, tolerance=1e-11)
    bad = VerificationReport(identity="stokes-2d", scene="u1-square", residual=1.0, tolerance=1e-11)
    log.verdict(ok)
    log.verdict(bad, label="other")
    assert "INFO: u1-square stokes-2d: pass residual=1.000e-12 tol=1.000e-11" in lines[0]
    assert "WARN: other stokes-2d: fail" in lines[1]
    assert "wall=" not in verdict_line(ok)
