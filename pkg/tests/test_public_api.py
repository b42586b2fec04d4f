import importlib
import inspect

import numpy as np
import pytest

FACADES = {
    "holonomy.lie_core": "holonomy.logic.lie",
    "holonomy.higher_groups": "holonomy.logic.higher",
    "holonomy.fields": "holonomy.logic.fields",
    "holonomy.transport": "holonomy.logic.transport",
    "holonomy.stokes_lab": "holonomy.logic.stokes",
}


@pytest.mark.parametrize("facade,home", sorted(FACADES.items()))
def test_facade_names_resolve_to_the_logic_objects(facade, home):
    mod = importlib.import_module(facade)
    assert mod.__all__ and len(set(mod.__all__)) == len(mod.__all__)
    for name in mod.__all__:
        obj = getattr(mod, name)
        if inspect.isfunction(obj) or inspect.isclass(obj):
            assert obj.__module__.startswith(home + "."), name
            assert getattr(importlib.import_module(obj.__module__), name) is obj


def test_facades_run_a_small_check_end_to_end():
    from holonomy import fields, higher_groups, lie_core, stokes_lab, transport

    g = lie_core.exp_map(lie_core.AlgebraElement.from_coords([0.2, -0.1, 0.4], lie_core.su2()))
    assert np.allclose(lie_core.log_map(g).coords(), [0.2, -0.1, 0.4])

    rep = higher_groups.check_crossed_module_axioms(higher_groups.get_instance("cm-inner-su2"), 20, seed=1)
    assert isinstance(rep, stokes_lab.VerificationReport) and rep.passed

    scene = fields.resolve_scene("su2-poly-square")
    assert isinstance(scene.fields.A, fields.Form)
    assert callable(transport.surface_holonomy) and "stokes-2d" in stokes_lab.IDENTITY_IDS
