# holonomy/fields.py
"""Parameter maps, differential-form fields, curvatures and scene files."""
from __future__ import annotations

from holonomy.logic.fields.calculus import curvature_F_A, jacobian, three_curvature_F_C, two_curvature_F_B
from holonomy.logic.fields.forms import Form
from holonomy.logic.fields.param_maps import ParamMap
from holonomy.logic.fields.scenes import Scene, build_scene, load_scene, resolve_scene
from holonomy.logic.fields.validation import (
    check_fake_2curvature,
    check_fake_curvature,
    thinness_rank,
    validate_cube,
    validate_tesseract,
)

__all__ = [
    "ParamMap",
    "Form",
    "Scene",
    "build_scene",
    "load_scene",
    "resolve_scene",
    "jacobian",
    "curvature_F_A",
    "two_curvature_F_B",
    "three_curvature_F_C",
    "check_fake_curvature",
    "check_fake_2curvature",
    "thinness_rank",
    "validate_cube",
    "validate_tesseract",
]
