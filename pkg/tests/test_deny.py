"""Embedding and regularized-quadratic checks for finite-energy states."""

import numpy as np
import pytest

from ncpt.cli import shipped_state
from ncpt.deny import (DELTA_GRID, approx_potential_formula_check,
                       bounded_potential_bound_check, deny_embedding_check,
                       deny_inequality_check, deny_quadratic,
                       deny_saturation_check, embedding_operator_norm)
from ncpt.potentials import FiniteEnergyFunctional, potential_of
from ncpt.algebra import operator_norm


def test_embedding_check_passes(z4):
    _, model, _, _, gen = z4
    omega = shipped_state(model, gen, "trivial")
    rep = deny_embedding_check(gen, omega, trials=200)
    assert rep.passed
    assert rep.details["ratio_max"] <= 1.0 + 1e-9


def test_exact_embedding_norm_is_below_multiplier_norm(z4, t5):
    for _, model, _, _, gen in (z4, t5):
        for name in ("trivial", "trace"):
            omega = shipped_state(model, gen, name)
            g = potential_of(gen, omega).vector
            norm = embedding_operator_norm(gen, omega)
            assert norm ** 2 <= operator_norm(g) + 1e-9


def test_quadratic_values_monotone_and_bounded(z4, rng):
    _, model, _, _, gen = z4
    omega = shipped_state(model, gen, "trivial")
    b = model.random_element(rng)
    rep = deny_inequality_check(gen, omega, b)
    assert rep.passed
    values = rep.details["values"]
    assert values == sorted(values)
    assert values[-1] <= rep.details["graph_norm_sq"] + 1e-9


def test_saturation_at_the_potential(z4, t5):
    for _, model, _, _, gen in (z4, t5):
        omega = shipped_state(model, gen, "trivial")
        rep = deny_saturation_check(gen, omega)
        assert rep.passed
        # The gap at the last grid point is delta * tau(h) exactly.
        expected = min(DELTA_GRID) * omega(model.unit).real
        assert rep.max_violation == pytest.approx(expected, rel=1e-3)


def test_quadratic_decreases_in_delta(z4, rng):
    _, model, _, _, gen = z4
    omega = shipped_state(model, gen, "trace")
    b = model.random_element(rng)
    values = [deny_quadratic(gen, omega, b, d) for d in (1.0, 1e-2, 1e-4)]
    assert values[0] <= values[1] <= values[2]
    assert values[0] > 0.0


def test_bounded_potential_bound(t5, rng):
    _, model, _, _, gen = t5
    h = model.random_positive(rng)
    g = potential_of(gen, FiniteEnergyFunctional(h))
    assert bounded_potential_bound_check(gen, g, trials=100).passed


def test_approx_potential_formula(z4):
    _, model, _, _, gen = z4
    omega = shipped_state(model, gen, "trivial")
    for eps in (1.0, 0.1, 0.01):
        rep = approx_potential_formula_check(gen, omega, eps)
        assert rep.passed
        assert rep.details["decomposition_deviation"] <= 1e-10
    with pytest.raises(ValueError):
        approx_potential_formula_check(gen, omega, 0.0)


def test_bad_delta_grid_rejected(z4, rng):
    _, model, _, _, gen = z4
    omega = shipped_state(model, gen, "trivial")
    with pytest.raises(ValueError):
        deny_inequality_check(gen, omega, model.random_element(rng),
                              delta_grid=(1.0, 0.0))
