# holonomy/paths.py
from __future__ import annotations

import os
from pathlib import Path


def app_dir() -> Path:
    # HOLONOMY_HOME overrides (tests, CI)
    home = os.environ.get("HOLONOMY_HOME")
    if home:
        p = Path(home)
    else:
        p = Path.home() / ".holonomy"
    p.mkdir(parents=True, exist_ok=True)
    return p


def config_path() -> Path:
    return app_dir() / "config.json"


def reports_dir() -> Path:
    p = app_dir() / "reports"
    p.mkdir(parents=True, exist_ok=True)
    return p


def builtin_scenes_dir() -> Path:
    # .../holonomy/paths.py -> .../scenes
    return Path(__file__).resolve().parent.parent / "scenes"
