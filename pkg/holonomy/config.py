# holonomy/config.py
from __future__ import annotations

import json
import os
from dataclasses import dataclass, asdict, field
from pathlib import Path
from typing import Optional

from holonomy.errors import ConfigError
from holonomy.paths import config_path


@dataclass
class LabConfig:
    threads: int = 1  # scenes run in parallel up to this
    tol_multiplier: float = 10.0
    seed: int = 20240611
    reports_dir: str = ""  # empty -> <app_dir>/reports

    # wall_ms stays null in reports unless enabled
    record_timing: bool = False

    log_to_file: bool = True


def load_config() -> LabConfig:
    path = config_path()
    if not path.exists():
        cfg = LabConfig()
        save_config(cfg)
        return cfg
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return LabConfig(
            threads=int(data.get("threads", 1)),
            tol_multiplier=float(data.get("tol_multiplier", 10.0)),
            seed=int(data.get("seed", 20240611)),
            reports_dir=str(data.get("reports_dir", "")),
            record_timing=bool(data.get("record_timing", False)),
            log_to_file=bool(data.get("log_to_file", True)),
        )

    except Exception:
        cfg = LabConfig()
        save_config(cfg)
        return cfg


def save_config(cfg: LabConfig) -> None:
    path = config_path()
    path.write_text(json.dumps(asdict(cfg), indent=2), encoding="utf-8")


def env_thread_limit() -> Optional[int]:
    raw = os.environ.get("HOLONOMY_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("HOLONOMY_THREADS", f"not an integer: {raw!r}")
    if n < 1:
        raise ConfigError("HOLONOMY_THREADS", "must be >= 1")
    return n


@dataclass
class RunConfig:
    subcommand: str
    scenes: list[str] = field(default_factory=list)  # paths or built-in ids
    ids: list[str] = field(default_factory=list)  # empty -> every identity a scene supports
    resolutions: list[int] = field(default_factory=list)
    tol_multiplier: float = 10.0
    seed: Optional[int] = None  # None -> scene seed
    out: Optional[Path] = None
    threads: int = 1

    # axioms
    instance: str = ""
    samples: int = 10_000

    record_timing: bool = False

    def effective_threads(self) -> int:
        limit = env_thread_limit()
        n = self.threads if limit is None else min(self.threads, limit)
        return max(1, n)

    def validate(self) -> None:
        if self.threads < 1:
            raise ConfigError("run", "parallelism must be >= 1", key="threads")
        if self.tol_multiplier <= 0:
            raise ConfigError("run", "tolerance multiplier must be positive", key="tol_mult")
        if self.samples < 1:
            raise ConfigError("run", "samples must be >= 1", key="samples")
        for n in self.resolutions:
            if n < 4 or n % 4:
                raise ConfigError("run", f"resolution {n} must be a positive multiple of 4", key="resolutions")
        if self.subcommand == "converge":
            rs = self.resolutions
            if len(rs) < 3:
                raise ConfigError("run", "a convergence study needs at least 3 resolutions", key="resolutions")
            if any(b != 2 * a for a, b in zip(rs, rs[1:])):
                raise ConfigError("run", "each resolution must double the previous one", key="resolutions")
