# holonomy/logic/stokes/report.py
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from holonomy.logic.tuning import TUNING


def matrix_to_json(m: np.ndarray) -> Dict[str, Any]:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def json_value(v: Any) -> Any:
    # numpy scalars/arrays -> plain JSON values
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return matrix_to_json(v)
        return v.tolist()
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [json_value(x) for x in v]
    return v


@dataclass
class VerificationReport:
    identity: str
    residual: float
    tolerance: float
    scene: str = ""
    measured_error: Optional[float] = None
    order: Optional[Union[float, str]] = None
    resolutions: List[int] = field(default_factory=list)
    seed: Optional[int] = None
    wall_ms: Optional[float] = None
    sides: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        r = float(self.residual)
        if not math.isfinite(r) or r < 0.0:
            return "fail"
        return "pass" if r <= float(self.tolerance) else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> Dict[str, Any]:
        # stable field order
        return {
            "identity": self.identity,
            "scene": self.scene,
            "residual": json_value(float(self.residual)),
            "tolerance": json_value(float(self.tolerance)),
            "measured_error": json_value(self.measured_error),
            "order": json_value(self.order),
            "verdict": self.verdict,
            "resolutions": [int(n) for n in self.resolutions],
            "seed": self.seed,
            "wall_ms": json_value(self.wall_ms),
            "sides": json_value(self.sides),
            "details": json_value(self.details),
        }


def policy_tolerance(measured: float, multiplier: float = TUNING.tol_multiplier,
                     floor: float = TUNING.tol_floor) -> float:
    """Pass threshold: a multiple of the measured self-convergence error, never below the floor."""
    return max(float(multiplier) * float(measured), float(floor))


def write_reports(reports: List[VerificationReport], path: Path) -> None:
    """Write the JSON array atomically (tmp file + replace)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
