"""Acceptance gate: twelve criteria, one test and one pass/fail line each.

Every criterion is verified at its stated tolerance on the shipped models;
trial counts and tolerances are pinned here and must not be loosened.
"""

import numpy as np
import pytest

from ncpt.cdc import (DerivationCalculus, GammaCalculator,
                      closed_form_gamma_potential, gamma_cross_check,
                      leibniz_report, potential_of_gamma)
from ncpt.cli import SuiteConfig, run_suite, shipped_state
from ncpt.deny import (deny_embedding_check, deny_inequality_check,
                       deny_saturation_check)
from ncpt.dirichlet import (build_generator, check_approx_form_monotonicity,
                            check_completely_dirichlet, check_markovian)
from ncpt.deny import approx_potential_formula_check
from ncpt.models import load_model_file
from ncpt.multipliers import check_multiplier_bound
from ncpt.potentials import (FiniteEnergyFunctional,
                             check_positivity_of_potentials,
                             check_potential_equivalence, energy_content,
                             interpolation_family, potential_of)
import ncpt
from pathlib import Path

DATA_DIR = Path(ncpt.__file__).parent / "data"
TRIALS = 1000
STATES = ("trace", "trivial")


def conclude(number, name, ok, detail):
    print(f"criterion {number:02d} {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {number:02d} {name}: {detail}"


def shipped(fix):
    spec, model, ell, coc, gen = fix
    return spec, model, ell, coc, gen


def test_criterion_01_complete_dirichlet_property(z4, t5):
    """Markovianity at ampliation levels 1, 2, 3 with 10^3 samples per level
    and model, max violation 1e-9; the negative control must be flagged."""
    worst = 0.0
    for fix in (z4, t5):
        _, _, _, _, gen = shipped(fix)
        worst = max(worst, check_markovian(gen, TRIALS, seed=1).max_violation)
        for n in (2, 3):
            rep = check_completely_dirichlet(gen, n, TRIALS, seed=n)
            worst = max(worst, rep.max_violation)
    spec, model, ell, _ = load_model_file(DATA_DIR / "z4_negative_control.json")
    control = check_markovian(build_generator(model, ell), TRIALS, seed=1)
    ok = worst <= 1e-9 and not control.passed
    conclude(1, "complete_dirichlet", ok,
             f"max_violation={worst:.3e}, "
             f"control_violation={control.max_violation:.3e}")


def test_criterion_02_potentials_are_positive(z4, t5):
    """Potentials of 10^3 random positive densities have spectrum >= -1e-9."""
    worst = 0.0
    for fix in (z4, t5):
        _, _, _, _, gen = shipped(fix)
        worst = max(worst, check_positivity_of_potentials(
            gen, TRIALS, seed=2).max_violation)
    conclude(2, "potential_positivity", worst <= 1e-9,
             f"max_negativity={worst:.3e}")


def test_criterion_03_potential_criteria_agree(z4, t5):
    """Cone membership and the semigroup/resolvent domination criteria
    classify 10^3 mixed samples identically (zero disagreements)."""
    disagreements = 0
    for fix in (z4, t5):
        _, _, _, _, gen = shipped(fix)
        rep = check_potential_equivalence(gen, TRIALS, seed=3)
        disagreements += int(rep.max_violation)
    conclude(3, "potential_equivalence", disagreements == 0,
             f"disagreements={disagreements}")


def test_criterion_04_z4_closed_forms(z4):
    """The Z_4 closed forms are reproduced to 1e-12: potential coefficients
    [1, 1/3, 1/5, 1/3], energy content 28/15, and the interpolated
    coefficient family at lambda = 1."""
    _, model, _, _, gen = shipped(z4)
    omega = shipped_state(model, gen, "trivial")
    g = potential_of(gen, omega).vector
    dev = float(np.abs(g.coeffs - np.array([1, 1 / 3, 1 / 5, 1 / 3])).max())
    dev = max(dev, abs(energy_content(gen, omega) - 28 / 15))
    phi = interpolation_family(gen, omega, 1.0)
    target = np.array([1.0, 1 / (1 + np.sqrt(2)), 1 / 3, 1 / (1 + np.sqrt(2))])
    dev = max(dev, float(np.abs(phi - target).max()))
    conclude(4, "z4_closed_forms", dev <= 1e-12, f"max_deviation={dev:.3e}")


def test_criterion_05_deny_embedding(z4, t5):
    """omega(b^* b) <= ||G||_M ||b||_F^2 on 10^3 random b for every shipped
    functional, ratio at most 1 + 1e-9."""
    worst_ratio = 0.0
    for fix in (z4, t5):
        _, model, _, _, gen = shipped(fix)
        for name in STATES:
            omega = shipped_state(model, gen, name)
            rep = deny_embedding_check(gen, omega, TRIALS, seed=5)
            worst_ratio = max(worst_ratio, rep.details["ratio_max"])
    conclude(5, "deny_embedding", worst_ratio <= 1.0 + 1e-9,
             f"ratio_max={worst_ratio!r}")


def test_criterion_06_deny_inequality(z4, t5):
    """The regularized quadratic is monotone along the delta grid
    (1, 1e-2, 1e-4, 1e-6), stays below ||b||_F^2 + 1e-9, and saturates
    ||G||_F^2 within 1e-6 at b = G."""
    worst = 0.0
    sat = 0.0
    for fix in (z4, t5):
        _, model, _, _, gen = shipped(fix)
        for state_idx, name in enumerate(STATES):
            omega = shipped_state(model, gen, name)
            rng = np.random.default_rng([6, state_idx])
            b = model.random_element(rng)
            worst = max(worst, deny_inequality_check(
                gen, omega, b).max_violation)
            sat = max(sat, deny_saturation_check(gen, omega).max_violation)
    ok = worst <= 1e-9 and sat <= 1e-6
    conclude(6, "deny_inequality", ok,
             f"max_violation={worst:.3e}, saturation_gap={sat:.3e}")


def test_criterion_07_gamma_two_routes(z4, t5):
    """Algebraic and bimodule carre du champ agree to 1e-9 on 10^3 random
    inputs per cocycle model, densities have spectrum >= -1e-9, and
    Gamma[a](1) recovers E[a] to relative 1e-10."""
    worst = {"route_deviation": 0.0, "density_negativity": 0.0,
             "unit_relative_error": 0.0}
    for fix in (z4, t5):
        spec, model, _, coc, gen = shipped(fix)
        calc = DerivationCalculus(model, spec, coc)
        rep = gamma_cross_check(gen, GammaCalculator(gen), calc, TRIALS,
                                seed=7)
        for key in worst:
            worst[key] = max(worst[key], rep.details[key])
    ok = (worst["route_deviation"] <= 1e-9
          and worst["density_negativity"] <= 1e-9
          and worst["unit_relative_error"] <= 1e-10)
    conclude(7, "gamma_cross_validation", ok,
             ", ".join(f"{k}={v:.3e}" for k, v in worst.items()))


def test_criterion_08_leibniz_rule(z4, t5):
    """d(ab) = da.b + a.db to 1e-10 on 10^3 random pairs, twisted included."""
    worst = 0.0
    for fix in (z4, t5):
        spec, model, _, coc, gen = shipped(fix)
        calc = DerivationCalculus(model, spec, coc)
        worst = max(worst, leibniz_report(calc, TRIALS, seed=8).max_violation)
    conclude(8, "leibniz", worst <= 1e-10, f"max_residual={worst:.3e}")


def test_criterion_09_gamma_potential_closed_form(z4, t5):
    """The closed-form potential of Gamma[(I+L)^{-1} h] matches the direct
    Riesz representative to 1e-9 on 10^3 random h >= 0 per cocycle model."""
    worst = 0.0
    for fix in (z4, t5):
        _, _, _, _, gen = shipped(fix)
        gamma_calc = GammaCalculator(gen)
        for trial in range(TRIALS):
            rng = np.random.default_rng([9, trial])
            h = gen.model.random_positive(rng)
            direct = potential_of_gamma(gen, gamma_calc, gen.inverse_graph(h))
            closed = closed_form_gamma_potential(gen, h)
            worst = max(worst, (direct.vector - closed.vector).norm2())
    conclude(9, "gamma_potential_closed_form", worst <= 1e-9,
             f"max_deviation={worst:.3e}")


def test_criterion_10_multiplier_bound(z4, t5):
    """The exact graph-metric multiplier norm of 10^2 random potentials per
    model stays below the a priori bound."""
    worst = -np.inf
    for fix in (z4, t5):
        _, model, _, _, gen = shipped(fix)
        gamma_calc = GammaCalculator(gen)
        for trial in range(100):
            rng = np.random.default_rng([10, trial])
            g = gen.inverse_graph(model.random_positive(rng))
            rep = check_multiplier_bound(gen, gamma_calc, g, trials=5,
                                         seed=trial)
            worst = max(worst, rep.left_norm - rep.apriori_bound,
                        rep.details["sampled_excess"])
    conclude(10, "multiplier_bound", worst <= 1e-8, f"max_excess={worst:.3e}")


def test_criterion_11_approximating_forms(z4, t5):
    """Approximating-form norms are monotone below the graph norm, and the
    epsilon potential decomposes as predicted, both to 1e-10."""
    worst = 0.0
    for fix in (z4, t5):
        _, model, _, _, gen = shipped(fix)
        worst = max(worst, check_approx_form_monotonicity(
            gen, sample_count=100, seed=11).max_violation)
        for name in STATES:
            omega = shipped_state(model, gen, name)
            for eps in (1.0, 0.1, 0.01):
                worst = max(worst, approx_potential_formula_check(
                    gen, omega, eps).max_violation)
    conclude(11, "approximating_forms", worst <= 1e-10,
             f"max_violation={worst:.3e}")


def test_criterion_12_deterministic_reports(tmp_path):
    """Two suite runs with the same config produce byte-identical report
    payloads (only the metadata file may differ)."""
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        cfg = SuiteConfig(model_path=str(DATA_DIR / "z4_coboundary.json"),
                          trials=10, out_dir=str(out))
        code, _ = run_suite(cfg)
        assert code == 0
        outs.append(out)
    files = [sorted(p for p in out.iterdir() if p.name != "metadata.json")
             for out in outs]
    names_match = [p.name for p in files[0]] == [p.name for p in files[1]]
    diffs = [p1.name for p1, p2 in zip(*files)
             if p1.read_bytes() != p2.read_bytes()]
    ok = names_match and not diffs and len(files[0]) > 10
    conclude(12, "deterministic_reports", ok,
             f"files={len(files[0])}, differing={diffs}")
