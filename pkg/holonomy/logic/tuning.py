# holonomy/logic/tuning.py
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class LabTuning:
    """
    Numerical constants shared by all oracles.
    Scenes override values per run; instances are never mutated.
    """

    # =========================================================
    # 1) Group / algebra membership
    # =========================================================
    tol_group: float = 1e-10
    branch_radius: float = 1.5  # ||g - I||_F limit for log_map

    # =========================================================
    # 2) Finite differences / validation grids
    # =========================================================
    h_fd: float = 1e-4
    grid_points: int = 9  # per axis
    rank_tol: float = 1e-8  # relative to sigma_max
    eq_tol: float = 1e-10
    field_tol: float = 1e-6  # fake-curvature checks
    horizontality_tol: float = 1e-2
    tangent_tol: float = 1e-3
    center_tol: float = 1e-6

    # =========================================================
    # 3) Axiom sampling
    # =========================================================
    axiom_samples: int = 10_000
    axiom_tol: float = 1e-9

    # =========================================================
    # 4) Default resolutions (per axis)
    # =========================================================
    n_2d: int = 256
    n_3d: int = 48
    n_4d: int = 16
    checkpoints: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)

    # =========================================================
    # 5) Tolerance policy
    # =========================================================
    tol_multiplier: float = 10.0
    tol_floor: float = 1e-11

    # ---------------------------------------------------------
    # convergence studies
    # ---------------------------------------------------------
    floor_level: float = 1e-12  # residuals below count as "floor"


TUNING = LabTuning()
