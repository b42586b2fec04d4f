# holonomy/higher_groups.py
"""Crossed modules, crossed 2-modules and their sampled axiom checks."""
from __future__ import annotations

from holonomy.logic.higher.axioms import (
    check_crossed2_axioms,
    check_crossed_module_axioms,
    check_lifting_equivariance,
)
from holonomy.logic.higher.catalog import INSTANCE_IDS, as_crossed_module, get_instance
from holonomy.logic.higher.crossed import (
    Crossed2ModuleInstance,
    CrossedModuleInstance,
    act_prime,
    peiffer_commutator,
)
from holonomy.logic.higher.semidirect import (
    SemidirectElement,
    check_semidirect_laws,
    semidirect_inv,
    semidirect_mul,
)

__all__ = [
    "CrossedModuleInstance",
    "Crossed2ModuleInstance",
    "SemidirectElement",
    "INSTANCE_IDS",
    "get_instance",
    "as_crossed_module",
    "check_crossed_module_axioms",
    "check_crossed2_axioms",
    "check_lifting_equivariance",
    "check_semidirect_laws",
    "semidirect_mul",
    "semidirect_inv",
    "act_prime",
    "peiffer_commutator",
]
