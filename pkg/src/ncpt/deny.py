"""Deny embedding and Deny inequality checks, with the epsilon-approximation
formulas used in their proofs.

The delta-regularized quadratic expression tau(h b^* (G+delta)^{-1} b) is
monotone as delta decreases; its last grid value is reported as a certified
lower bound for the delta -> 0 limit (no extrapolation).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .algebra import HSVector, hs_inner, operator_norm
from .dirichlet import DirichletGenerator
from .potentials import FiniteEnergyFunctional, Potential, potential_of
from .reports import CheckReport

DELTA_GRID = (1.0, 1e-2, 1e-4, 1e-6)


def deny_embedding_check(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                         trials: int = 1000, seed: int = 0,
                         tol: float = 1e-9) -> CheckReport:
    """omega(b^* b) <= ||G(omega)||_M ||b||_F^2 on random b and the basis."""
    g = potential_of(gen, omega).vector
    gnorm = operator_norm(g)
    model = gen.model
    rows = []
    ratio_max = 0.0
    for trial in range(trials + model.dim):
        if trial < model.dim:
            b = HSVector(model, np.eye(model.dim, dtype=complex)[trial])
        else:
            rng = np.random.default_rng([seed, trial])
            b = model.random_element(rng)
        lhs = omega(b.star() * b).real
        rhs = gnorm * gen.graph_norm(b) ** 2
        ratio = lhs / rhs if rhs > 0 else 0.0
        ratio_max = max(ratio_max, ratio)
        rows.append([gen.graph_norm(b) ** 2, lhs, ratio])
    report = CheckReport(property="deny_embedding", samples=trials + model.dim,
                         max_violation=max(ratio_max - 1.0, 0.0), seed=seed,
                         passed=ratio_max <= 1.0 + tol,
                         details={"ratio_max": ratio_max,
                                  "potential_operator_norm": gnorm})
    report.details["csv_rows"] = rows
    return report


def embedding_operator_norm(gen: DirichletGenerator,
                            omega: FiniteEnergyFunctional) -> float:
    """Exact norm of T: (F, ||.||_F) -> L^2(A, omega), b -> b Omega.

    Computed as the largest generalized eigenvalue of the Gram pair
    S_ij = omega(e_i^* e_j) against the graph Gram.
    """
    model = gen.model
    d = model.dim
    s = np.empty((d, d), dtype=complex)
    h_mat = omega.density.to_matrix()
    for i in range(d):
        ai = model.rep[i].conj().T
        for j in range(d):
            s[i, j] = model.trace_of_matrix(h_mat @ ai @ model.rep[j])
    w_graph = model.gram + model.gram @ gen.lmat
    w_graph = 0.5 * (w_graph + w_graph.conj().T)
    s = 0.5 * (s + s.conj().T)
    eigs = scipy.linalg.eigh(s, w_graph, eigvals_only=True)
    return float(np.sqrt(max(eigs.max(), 0.0)))


def deny_quadratic(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                   b: HSVector, delta: float) -> float:
    """tau(h b^* (G(omega)+delta)^{-1} b) for one regularization delta."""
    g_mat = potential_of(gen, omega).vector.to_matrix()
    w, v = np.linalg.eigh(g_mat)
    inv = (v / (np.maximum(w, 0.0) + delta)) @ v.conj().T
    b_mat = b.to_matrix()
    val = gen.model.trace_of_matrix(
        omega.density.to_matrix() @ b_mat.conj().T @ inv @ b_mat)
    return float(val.real)


def deny_inequality_check(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                          b: HSVector, delta_grid=DELTA_GRID,
                          tol: float = 1e-9) -> CheckReport:
    """The regularized value is nondecreasing as delta decreases and stays
    below ||b||_F^2 at every grid point."""
    deltas = sorted(delta_grid, reverse=True)
    if deltas[-1] <= 0:
        raise ValueError("delta grid must be positive")
    bound = gen.graph_norm(b) ** 2
    values = [deny_quadratic(gen, omega, b, d) for d in deltas]
    worst_bound = max(v - bound for v in values)
    worst_mono = max(
        (values[i] - values[i + 1] for i in range(len(values) - 1)), default=0.0)
    worst = max(worst_bound, worst_mono)
    return CheckReport(property="deny_inequality", samples=len(deltas),
                       max_violation=worst, seed=0, passed=worst <= tol,
                       details={"deltas": list(deltas), "values": values,
                                "graph_norm_sq": bound,
                                "limit_estimate": values[-1]})


def deny_saturation_check(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                          delta_grid=DELTA_GRID, tol: float = 1e-6) -> CheckReport:
    """At b = G(omega) the delta -> 0 value reaches ||G||_F^2."""
    g = potential_of(gen, omega).vector
    value = deny_quadratic(gen, omega, g, min(delta_grid))
    target = gen.graph_norm(g) ** 2
    gap = abs(value - target)
    return CheckReport(property="deny_saturation", samples=1,
                       max_violation=gap, seed=0, passed=gap <= tol,
                       details={"value": value, "graph_norm_sq": target})


def bounded_potential_bound_check(gen: DirichletGenerator, g: Potential,
                                  trials: int = 1000, seed: int = 0,
                                  tol: float = 1e-9) -> CheckReport:
    """<G, b^* b>_F <= ||G||_M ||b||_F^2 on random b."""
    gnorm = operator_norm(g.vector)
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        b = gen.model.random_element(rng)
        lhs = gen.graph_inner(g.vector, b.star() * b).real
        rhs = gnorm * gen.graph_norm(b) ** 2
        worst = max(worst, lhs - rhs)
    return CheckReport(property="bounded_potential_bound", samples=trials,
                       max_violation=max(worst, 0.0), seed=seed, passed=worst <= tol)


def approx_potential_formula_check(gen: DirichletGenerator,
                                   omega: FiniteEnergyFunctional, eps: float,
                                   tol: float = 1e-10) -> CheckReport:
    """The E_eps potential of omega o (I+eps L)^{-1} decomposes as
    (1+eps)^{-1} G + eps (1+eps)^{-1} (1+(1+eps)L)^{-1} G, with operator
    norm bounded by ||G||_M."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = potential_of(gen, omega).vector
    # h_eps = (I+L)(I+eps L)^{-1} G, then the E_eps potential (I+L_eps)^{-1} h_eps.
    h_eps = gen.apply_spectral(lambda w: (1 + w) / (1 + eps * w), g)
    af = gen.approx_form(eps)
    g_eps = af.inverse_graph(h_eps)
    closed = ((1.0 / (1.0 + eps)) * g
              + gen.apply_spectral(lambda w: (eps / (1 + eps)) / (1 + (1 + eps) * w), g))
    dev = (g_eps - closed).norm2()
    norm_excess = operator_norm(g_eps) - operator_norm(g)
    worst = max(dev, norm_excess)
    return CheckReport(property="approx_potential_formula", samples=1,
                       max_violation=max(worst, 0.0), seed=0, passed=worst <= tol,
                       details={"decomposition_deviation": dev,
                                "norm_excess": norm_excess})
