# holonomy/cli.py
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from holonomy.config import LabConfig, RunConfig, load_config
from holonomy.errors import ConfigError
from holonomy.logging_util import LabLogger
from holonomy.logic.fields.scenes import builtin_scene_ids
from holonomy.logic.stokes.convergence import write_table
from holonomy.logic.stokes.report import VerificationReport, write_reports
from holonomy.logic.stokes.suite import plan_tasks, run_axioms, run_convergence, run_suite
from holonomy.paths import reports_dir

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _int_list(raw: str) -> List[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")


def _str_list(raw: str) -> List[str]:
    return [x.strip() for x in raw.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holonomy", description="Numerical checks of higher-gauge Stokes identities.")
    p.add_argument("--verbose", action="store_true", help="echo the run log to stderr")
    p.add_argument("--debug", action="store_true", help="debug-level library logging")
    sub = p.add_subparsers(dest="subcommand", required=True)

    v = sub.add_parser("verify", help="run identity oracles on scenes")
    v.add_argument("--scenes", nargs="+", default=None,
                   help="scene files or built-in ids (default: every built-in scene)")
    v.add_argument("--ids", type=_str_list, default=[], help="comma-separated identity ids")
    v.add_argument("--resolution", type=int, default=None, help="per-axis resolution override (multiple of 4)")
    v.add_argument("--tol-mult", type=float, default=None, dest="tol_mult")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--timing", action="store_true", help="record wall_ms in the report")
    v.add_argument("--out", type=Path, default=None)

    a = sub.add_parser("axioms", help="sampled axiom checks of a catalog instance")
    a.add_argument("--instance", required=True)
    a.add_argument("--samples", type=int, default=None)
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--out", type=Path, default=None)

    c = sub.add_parser("converge", help="residuals under successive doubling")
    c.add_argument("--scene", required=True)
    c.add_argument("--id", required=True, dest="identity")
    c.add_argument("--resolutions", type=_int_list, required=True, help="e.g. 32,64,128")
    c.add_argument("--tol-mult", type=float, default=None, dest="tol_mult")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--timing", action="store_true")
    c.add_argument("--out", type=Path, default=None)
    return p


def build_run_config(args: argparse.Namespace, lab: LabConfig) -> RunConfig:
    """argparse values over the persisted defaults."""
    cmd = args.subcommand
    cfg = RunConfig(
        subcommand=cmd,
        tol_multiplier=args.tol_mult if getattr(args, "tol_mult", None) is not None else lab.tol_multiplier,
        seed=args.seed,
        out=args.out,
        threads=args.threads if getattr(args, "threads", None) is not None else lab.threads,
        record_timing=bool(getattr(args, "timing", False)) or lab.record_timing,
    )
    if cmd == "verify":
        cfg.scenes = list(args.scenes) if args.scenes else list(builtin_scene_ids())
        cfg.ids = list(args.ids)
        cfg.resolutions = [args.resolution] if args.resolution is not None else []
    elif cmd == "axioms":
        cfg.instance = args.instance
        cfg.samples = args.samples if args.samples is not None else cfg.samples
        if cfg.seed is None:
            cfg.seed = lab.seed
    else:
        cfg.scenes = [args.scene]
        cfg.ids = [args.identity]
        cfg.resolutions = list(args.resolutions)
    cfg.validate()
    if cmd == "verify" and not cfg.scenes:
        raise ConfigError("scenes", "no scenes given and no built-in scenes found", key="scenes")
    return cfg


def _default_out(lab: LabConfig, name: str) -> Path:
    base = Path(lab.reports_dir) if lab.reports_dir else reports_dir()
    return base / name


def _print_reports(reports: Sequence[VerificationReport]) -> None:
    for r in reports:
        scene = f" [{r.scene}]" if r.scene else ""
        print(f"{r.verdict.upper():4} {r.identity}{scene}  residual={r.residual:.3e}  tol={r.tolerance:.3e}")


def run_verify(cfg: RunConfig, lab: LabConfig, lab_log: LabLogger) -> int:
    tasks = plan_tasks(cfg.scenes, cfg.ids, cfg.resolutions[0] if cfg.resolutions else None,
                       cfg.tol_multiplier, cfg.seed, cfg.record_timing)
    lab_log.info(f"verify: {len(tasks)} scene(s), threads={cfg.effective_threads()}")
    reports = run_suite(tasks, cfg.effective_threads(), lab_log)
    out = cfg.out or _default_out(lab, "report.json")
    write_reports(reports, out)
    _print_reports(reports)
    print(f"report: {out}")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def run_axioms_cmd(cfg: RunConfig, lab: LabConfig, lab_log: LabLogger) -> int:
    reports = run_axioms(cfg.instance, cfg.samples, int(cfg.seed))
    for r in reports:
        lab_log.verdict(r, label=cfg.instance)
    out = cfg.out or _default_out(lab, f"axioms-{cfg.instance}.json")
    write_reports(reports, out)
    _print_reports(reports)
    print(f"report: {out}")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def run_converge(cfg: RunConfig, lab: LabConfig, lab_log: LabLogger) -> int:
    scene, identity = cfg.scenes[0], cfg.ids[0]
    study = run_convergence(scene, identity, cfg.resolutions, cfg.tol_multiplier, cfg.seed, cfg.record_timing)
    out = cfg.out or _default_out(lab, f"converge-{study.scene}-{identity}.csv")
    write_table(study, out)
    lab_log.info(f"converge {study.scene} {identity}: order={study.fitted_order} monotone={study.monotone}")
    print(study.table.to_string(index=False))
    order = study.fitted_order
    print(f"fitted order: {order if isinstance(order, str) else f'{order:.2f}'}")
    print(f"table: {out}")
    return EXIT_PASS if study.passed else EXIT_FAIL


COMMANDS = {"verify": run_verify, "axioms": run_axioms_cmd, "converge": run_converge}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    sink = (lambda line: print(line, file=sys.stderr)) if args.verbose else None
    try:
        lab = load_config()
        lab_log = LabLogger(sink=sink, to_file=lab.log_to_file)
        cfg = build_run_config(args, lab)
        return COMMANDS[cfg.subcommand](cfg, lab, lab_log)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("holonomy %s failed", args.subcommand)
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


__all__ = ["EXIT_PASS", "EXIT_FAIL", "EXIT_CONFIG", "EXIT_RUNTIME", "build_parser", "build_run_config",
           "run_verify", "run_axioms_cmd", "run_converge", "main"]
