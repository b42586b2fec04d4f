# holonomy/stokes_lab.py
"""Identity oracles, composition checks and convergence studies."""
from __future__ import annotations

from holonomy.logic.stokes.composition import (
    check_horizontal_composition,
    check_lift_change_equivariance,
    check_string_equivariance,
    check_surface_local,
    check_thin_invariance,
    check_vertical_composition,
)
from holonomy.logic.stokes.convergence import ConvergenceStudy, convergence_study
from holonomy.logic.stokes.identities import (
    verify_stokes_2d,
    verify_stokes_3d,
    verify_stokes_3d_peiffer,
    verify_stokes_4d,
    verify_stokes_center_variant,
    verify_volume_delta,
)
from holonomy.logic.stokes.report import VerificationReport, write_reports
from holonomy.logic.stokes.suite import IDENTITY_IDS, run_axioms, run_convergence, run_identity

__all__ = [
    "VerificationReport",
    "write_reports",
    "verify_stokes_2d",
    "verify_stokes_3d",
    "verify_stokes_center_variant",
    "verify_stokes_3d_peiffer",
    "verify_volume_delta",
    "verify_stokes_4d",
    "check_lift_change_equivariance",
    "check_vertical_composition",
    "check_horizontal_composition",
    "check_thin_invariance",
    "check_surface_local",
    "check_string_equivariance",
    "ConvergenceStudy",
    "convergence_study",
    "IDENTITY_IDS",
    "run_identity",
    "run_axioms",
    "run_convergence",
]
