import logging

import numpy as np
import pytest

from bkmflow import presets
from bkmflow.pipeline import run_scenario

logging.getLogger("bkmflow").setLevel(logging.ERROR)


@pytest.fixture(scope="session")
def preset_runs():
    """Every preset run once per session; several test modules share these."""
    return {name: run_scenario(presets.preset(name)) for name in presets.names()}


@pytest.fixture(scope="session")
def kb_run(preset_runs):
    return preset_runs["kb-exact"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_scenario():
    """BKM II scenario on a coarse grid; runs in well under a second."""
    d = presets.preset_dict("kdv-bkm2")
    d["name"] = "small"
    d["grid"] = {"t": {"min": -0.1, "max": 0.1, "count": 9}, "x": {"min": -1.0, "max": 1.0, "count": 17}}
    d["outputs"] = ["csv", "frames"]
    return d


@pytest.fixture
def singular_scenario(small_scenario):
    # an eigenvalue of M sits on the root of m = mu - 2
    d = dict(small_scenario, checks={})
    d["start"] = {"q": [2.0, 0.6], "p_q": [0.1, 0.1]}
    return d
