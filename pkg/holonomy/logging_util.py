# holonomy/logging_util.py
from __future__ import annotations

import datetime
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Optional

from .paths import app_dir

if TYPE_CHECKING:
    from holonomy.logic.stokes.report import VerificationReport

logger = logging.getLogger(__name__)

LEVELS = {"DEBUG": logging.DEBUG, "INFO": logging.INFO, "WARN": logging.WARNING, "ERROR": logging.ERROR}


def log_file_path() -> Path:
    return app_dir() / "holonomy.log"


def verdict_line(r: "VerificationReport", label: Optional[str] = None) -> str:
    """`<scene> <identity>: <verdict> residual=.. tol=..`, wall time only when recorded."""
    where = label if label is not None else (r.scene or "-")
    wall = f" wall={r.wall_ms:.0f}ms" if r.wall_ms is not None else ""
    return f"{where} {r.identity}: {r.verdict} residual={r.residual:.3e} tol={r.tolerance:.3e}{wall}"


class LabLogger:
    """
    Run log for the CLI and the suite runner.
    Lines go to <app_dir>/holonomy.log and, in --verbose mode, to a sink.
    File and sink failures are swallowed; the run always finishes.
    """

    def __init__(self, sink: Optional[Callable[[str], None]] = None, to_file: bool = True):
        self.sink = sink
        self.to_file = to_file

    def _stamp(self) -> str:
        return datetime.datetime.now().strftime("%H:%M:%S")

    def _emit(self, line: str) -> None:
        if self.sink:
            try:
                self.sink(line)
            except Exception:
                pass
        if not self.to_file:
            return
        try:
            with log_file_path().open("a", encoding="utf-8") as f:
                f.write(line + "\n")
        except OSError:
            pass

    def write(self, level: str, msg: str) -> None:
        logger.log(LEVELS[level], msg)
        # debug lines are for a watching user, not the file
        if level == "DEBUG" and not self.sink:
            return
        self._emit(f"[{self._stamp()}] {level}: {msg}")

    def debug(self, msg: str) -> None:
        self.write("DEBUG", msg)

    def info(self, msg: str) -> None:
        self.write("INFO", msg)

    def warn(self, msg: str) -> None:
        self.write("WARN", msg)

    def error(self, msg: str) -> None:
        self.write("ERROR", msg)

    def verdict(self, r: "VerificationReport", label: Optional[str] = None) -> None:
        """INFO for a pass, WARN for a fail."""
        self.write("INFO" if r.passed else "WARN", verdict_line(r, label))
