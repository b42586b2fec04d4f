# holonomy/logic/stokes/convergence.py
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Sequence, Union

import numpy as np
import pandas as pd

from holonomy.errors import ConfigError
from holonomy.logic.stokes.report import VerificationReport, json_value
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)

COLUMNS = ["resolution", "residual", "order", "floor"]


def check_doubling(resolutions: Sequence[int]) -> List[int]:
    rs = [int(n) for n in resolutions]
    if len(rs) < 3:
        raise ConfigError("converge", "a convergence study needs at least 3 resolutions", key="resolutions")
    for a, b in zip(rs, rs[1:]):
        if b != 2 * a:
            raise ConfigError("converge", f"{b} does not double {a}", key="resolutions")
    return rs


@dataclass
class ConvergenceStudy:
    """
    Residuals of one identity on one scene under successive doubling.

    table columns: resolution, residual, order (local log2 ratio against the
    previous row, NaN on the first), floor (residual below the floor level).
    """

    identity: str
    scene: str
    table: pd.DataFrame
    reports: List[VerificationReport] = field(default_factory=list)
    floor_level: float = TUNING.floor_level

    @property
    def at_floor(self) -> bool:
        return bool(self.table["floor"].all())

    @property
    def fitted_order(self) -> Union[float, str]:
        """Mean of the log2 residual ratios over pairs above the floor, or "floor"."""
        if self.at_floor:
            return "floor"
        prev_ok = ~self.table["floor"].shift(1, fill_value=True)
        usable = self.table.loc[prev_ok & ~self.table["floor"], "order"].dropna()
        if usable.empty:
            return "floor"
        return float(usable.mean())

    @property
    def monotone(self) -> bool:
        r = self.table["residual"].to_numpy()
        f = self.table["floor"].to_numpy()
        return all(b <= a or fb for a, b, fb in zip(r, r[1:], f[1:]))

    @property
    def passed(self) -> bool:
        return self.monotone and self.summary().passed

    def summary(self) -> VerificationReport:
        """The finest run, with the fitted order attached and the verdict forced by monotonicity."""
        last = self.reports[-1]
        residual = last.residual if self.monotone else math.inf
        return VerificationReport(
            identity=last.identity,
            scene=last.scene,
            residual=residual,
            tolerance=last.tolerance,
            measured_error=last.measured_error,
            order=self.fitted_order,
            resolutions=[int(n) for n in self.table["resolution"]],
            seed=last.seed,
            wall_ms=last.wall_ms,
            sides=last.sides,
            details={"monotone": self.monotone, "residuals": [float(x) for x in self.table["residual"]]},
        )

    def to_records(self) -> dict:
        rows = []
        for rec in self.table.to_dict(orient="records"):
            rows.append({k: json_value(v) for k, v in rec.items()})
        return {
            "identity": self.identity,
            "scene": self.scene,
            "fitted_order": self.fitted_order,
            "monotone": self.monotone,
            "rows": rows,
        }


def build_table(resolutions: Sequence[int], residuals: Sequence[float],
                floor_level: float = TUNING.floor_level) -> pd.DataFrame:
    df = pd.DataFrame({"resolution": [int(n) for n in resolutions],
                       "residual": [float(r) for r in residuals]})
    df["floor"] = df["residual"] < floor_level
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = df["residual"].shift(1) / df["residual"]
        df["order"] = np.log2(ratio.where(ratio > 0))
    df.loc[df["floor"], "order"] = np.nan
    return df[COLUMNS]


def convergence_study(identity: str, scene: str, resolutions: Sequence[int],
                      run: Callable[[int], VerificationReport],
                      floor_level: float = TUNING.floor_level) -> ConvergenceStudy:
    """run(N) evaluates the identity at per-axis resolution N."""
    rs = check_doubling(resolutions)
    reports = []
    for n in rs:
        rep = run(n)
        logger.info("converge %s on %s: N=%d residual=%.3e", identity, scene, n, rep.residual)
        reports.append(rep)
    table = build_table(rs, [r.residual for r in reports], floor_level)
    study = ConvergenceStudy(identity, scene, table, reports, floor_level)
    logger.info("converge %s on %s: fitted order %s", identity, scene, study.fitted_order)
    return study


def write_table(study: ConvergenceStudy, path: Path) -> None:
    """CSV by default; a .json suffix writes the records with the fitted order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    if path.suffix.lower() == ".json":
        tmp.write_text(json.dumps(study.to_records(), indent=2) + "\n", encoding="utf-8")
    else:
        study.table.to_csv(tmp, index=False, float_format="%.6e", lineterminator="\n")
    tmp.replace(path)


__all__ = ["COLUMNS", "ConvergenceStudy", "check_doubling", "build_table", "convergence_study", "write_table"]
