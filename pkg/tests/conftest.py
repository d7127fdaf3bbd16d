"""Shared fixtures: the two shipped group models, a tiny two-element model
used for normalization oracles, and paths to the packaged model files."""

from pathlib import Path

import numpy as np
import pytest

import ncpt
from ncpt.dirichlet import build_generator
from ncpt.models import (GroupSpec, build_twisted_group_algebra,
                         coboundary_length, sine2_length)

DATA_DIR = Path(ncpt.__file__).parent / "data"


@pytest.fixture(scope="session")
def z4():
    """Z_4 with the weight-one coboundary length ell = [0, 2, 4, 2]."""
    spec = GroupSpec(orders=(4,))
    model = build_twisted_group_algebra(spec)
    ell, coc = coboundary_length(spec, {(1,): 1.0})
    gen = build_generator(model, ell)
    return spec, model, ell, coc, gen


@pytest.fixture(scope="session")
def t5():
    """Twisted Z_5 x Z_5 (clock/shift at angle 2 pi / 5) with the
    coordinate sine-squared length."""
    spec = GroupSpec(orders=(5, 5), twist=(1, 5))
    model = build_twisted_group_algebra(spec)
    ell, coc = sine2_length(spec)
    gen = build_generator(model, ell)
    return spec, model, ell, coc, gen


@pytest.fixture(scope="session")
def z2():
    """Two-element group, one weighted character: ell = [0, 4]."""
    spec = GroupSpec(orders=(2,))
    model = build_twisted_group_algebra(spec)
    ell, coc = coboundary_length(spec, {(1,): 1.0})
    gen = build_generator(model, ell)
    return spec, model, ell, coc, gen


@pytest.fixture(scope="session")
def data_paths():
    paths = {
        "z4": DATA_DIR / "z4_coboundary.json",
        "t5": DATA_DIR / "z5_clockshift.json",
        "negative": DATA_DIR / "z4_negative_control.json",
    }
    for p in paths.values():
        assert p.exists(), f"missing packaged model file {p}"
    return paths


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
