"""Shared fixtures: the heavyweight scenario runs execute once per session."""

import time

import numpy as np
import pytest

from combpassage import resolve_config, run_scenario


def _run(preset: str, sets: dict | None = None):
    overrides = {"preset": preset}
    if sets:
        overrides.update(sets)
    cfg = resolve_config({}, overrides)
    t0 = time.perf_counter()
    result = run_scenario(cfg)
    wall = time.perf_counter() - t0
    return result, wall


@pytest.fixture(scope="session")
def fig3_run():
    """Full sine-chirp transfer train (default convention) + wall time."""
    return _run("fig3-sine")


@pytest.fixture(scope="session")
def fig3_run_flipped():
    """Same scenario under the flipped angular-frequency convention."""
    return _run("fig3-sine", {"frequencies_are_angular": "true"})


@pytest.fixture(scope="session")
def fig5_run():
    return _run("fig5-cosine")


@pytest.fixture(scope="session")
def fig6_runs():
    sine, _ = _run("fig6-decoherence-sine")
    cosine, _ = _run("fig6-decoherence-cosine")
    return sine, cosine


@pytest.fixture()
def rng():
    # function-scoped: every test draws from its own fixed stream
    return np.random.default_rng(20260809)
