# holonomy/lie_core.py
"""Matrix Lie groups, algebra elements and ordered exponentials."""
from __future__ import annotations

from holonomy.logic.lie.elements import (
    AlgebraElement,
    GroupElement,
    adjoint,
    bracket,
    exp_map,
    group_distance,
    log_map,
)
from holonomy.logic.lie.groups import MatrixGroup, so3, su2, u1
from holonomy.logic.lie.ordered_exp import OrderedExpConfig, integrate_sampled, path_ordered_exp

__all__ = [
    "MatrixGroup",
    "su2",
    "so3",
    "u1",
    "GroupElement",
    "AlgebraElement",
    "OrderedExpConfig",
    "exp_map",
    "log_map",
    "bracket",
    "adjoint",
    "path_ordered_exp",
    "integrate_sampled",
    "group_distance",
]
