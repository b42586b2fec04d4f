import numpy as np
import pytest

from holonomy.logic.fields.scenes import resolve_scene
from holonomy.logic.higher.catalog import get_instance
from holonomy.logic.lie import groups as lg


@pytest.fixture(autouse=True)
def lab_home(tmp_path, monkeypatch):
    # config, log and reports go to a throwaway home
    home = tmp_path / "home"
    monkeypatch.setenv("HOLONOMY_HOME", str(home))
    monkeypatch.delenv("HOLONOMY_THREADS", raising=False)
    return home


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def su2():
    return lg.su2()


@pytest.fixture
def scene():
    return resolve_scene


@pytest.fixture
def instance():
    return get_instance
