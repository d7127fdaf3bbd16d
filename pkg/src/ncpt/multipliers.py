"""Multiplier norms of the Dirichlet space, computed exactly.

At finite dimension every algebra element multiplies the Dirichlet space
into itself, so the content here is quantitative: the exact operator norm
of multiplication in the graph metric, and the a priori bound

    sqrt[ (||G(Gamma[g])||^{1/2} + ||g||)^2 + ||g||^2 ]

that controls it for potentials g.  The norm is obtained as the largest
singular value of W^{1/2} M_g W^{-1/2} with W the graph Gram matrix;
sampling is kept only as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import HSVector, Model, ModelError, operator_norm
from .cdc import GammaCalculator, potential_of_gamma
from .dirichlet import DirichletGenerator
from .potentials import is_potential
from .reports import CheckReport

NORM_SYMMETRY_TOL = 1e-9
BOUND_SLACK = 1e-8


@dataclass
class MultiplierReport:
    left_norm: float
    right_norm: float
    apriori_bound: float
    passed: bool
    details: dict = field(default_factory=dict)


def multiplier_matrices(model: Model, g: HSVector) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrices of b -> gb and b -> bg."""
    if model.structure is None:
        raise ModelError("multiplier matrices need structure constants")
    left = np.einsum("i,ijk->kj", g.coeffs, model.structure)
    right = np.einsum("j,ijk->ki", g.coeffs, model.structure)
    return left, right


def _graph_gram_roots(gen: DirichletGenerator) -> tuple[np.ndarray, np.ndarray]:
    cached = getattr(gen, "_graph_gram_roots_cache", None)
    if cached is not None:
        return cached
    w_graph = gen.model.gram + gen.model.gram @ gen.lmat
    w_graph = 0.5 * (w_graph + w_graph.conj().T)
    vals, vecs = np.linalg.eigh(w_graph)
    if vals.min() <= 0:
        raise ModelError("graph Gram matrix is not positive definite")
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    inv_root = (vecs / np.sqrt(vals)) @ vecs.conj().T
    gen._graph_gram_roots_cache = (root, inv_root)
    return root, inv_root


def fmetric_norm(gen: DirichletGenerator, mat: np.ndarray) -> float:
    """Operator norm of the coefficient matrix as a map (F, ||.||_F) -> itself."""
    root, inv_root = _graph_gram_roots(gen)
    return float(np.linalg.norm(root @ mat @ inv_root, ord=2))


def multiplier_norm(gen: DirichletGenerator, g: HSVector,
                    apriori_bound: float = np.inf) -> MultiplierReport:
    """Exact left and right multiplication norms in the graph metric.

    For J-real g the two norms must agree (the symmetry exchanges the
    actions isometrically); that agreement is asserted here.
    """
    left, right = multiplier_matrices(gen.model, g)
    ln = fmetric_norm(gen, left)
    rn = fmetric_norm(gen, right)
    details = {"j_real": bool(g.is_real())}
    if details["j_real"] and abs(ln - rn) > NORM_SYMMETRY_TOL * max(1.0, ln):
        raise ArithmeticError(
            f"left/right multiplier norms disagree for J-real g: {ln!r} vs {rn!r}"
        )
    passed = ln <= apriori_bound + BOUND_SLACK
    return MultiplierReport(left_norm=ln, right_norm=rn,
                            apriori_bound=float(apriori_bound), passed=bool(passed),
                            details=details)


def potential_multiplier_bound(gen: DirichletGenerator,
                               gamma_calc: GammaCalculator, g: HSVector) -> float:
    """sqrt[(||G(Gamma[g])||^{1/2} + ||g||)^2 + ||g||^2], norms in the algebra."""
    gg = potential_of_gamma(gen, gamma_calc, g).vector
    gn = operator_norm(g)
    return float(np.sqrt((np.sqrt(operator_norm(gg)) + gn) ** 2 + gn ** 2))


def check_multiplier_bound(gen: DirichletGenerator, gamma_calc: GammaCalculator,
                           g: HSVector, trials: int = 100,
                           seed: int = 0) -> MultiplierReport:
    """Exact norm against the a priori bound, plus a sampled cross-check of
    ||gb||_F <= bound * ||b||_F on random b."""
    bound = potential_multiplier_bound(gen, gamma_calc, g)
    report = multiplier_norm(gen, g, apriori_bound=bound)
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        b = gen.model.random_element(rng)
        worst = max(worst, gen.graph_norm(g * b) - bound * gen.graph_norm(b))
    report.details["sampled_excess"] = float(max(worst, 0.0))
    report.passed = bool(report.passed and worst <= BOUND_SLACK)
    report.details["margin"] = bound - report.left_norm
    return report


def check_resolvent_multiplier(gen: DirichletGenerator, gamma_calc: GammaCalculator,
                               h: HSVector, eps_grid=(1.0, 0.1, 0.01),
                               tol: float = 1e-9) -> CheckReport:
    """For h >= 0 with potential G = (I+L)^{-1} h, every resolvent image
    g = (I + eps L)^{-1} G is again a potential (the resolvent preserves
    positivity of the certificate) and satisfies the multiplier bound;
    the g converge back to G in graph norm as eps shrinks."""
    if float(h.eigenvalues().min()) < -tol:
        raise ValueError("h must be positive")
    big_g = gen.inverse_graph(h)
    worst = -np.inf
    residuals = []
    for eps in sorted(eps_grid, reverse=True):
        if eps <= 0:
            raise ValueError("eps grid must be positive")
        g = gen.resolvent(eps, big_g)
        ok, min_eig = is_potential(gen, g)
        worst = max(worst, -min_eig if not ok else 0.0)
        rep = check_multiplier_bound(gen, gamma_calc, g, trials=20)
        worst = max(worst, rep.left_norm - rep.apriori_bound)
        residuals.append(gen.graph_norm(g - big_g))
    drops = all(residuals[i + 1] <= residuals[i] + tol
                for i in range(len(residuals) - 1))
    passed = worst <= tol and drops
    return CheckReport(property="resolvent_multiplier", samples=len(list(eps_grid)),
                       max_violation=float(max(worst, 0.0)), seed=0,
                       passed=bool(passed),
                       details={"convergence_residuals": [float(r) for r in residuals]})


def multiplier_invariants_check(gen: DirichletGenerator, trials: int = 100,
                                seed: int = 0, tol: float = 1e-9) -> CheckReport:
    """Submultiplicativity on products, invariance under the involution, and
    norm exactly one for the unit when L1 = 0."""
    model = gen.model
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        g1 = model.random_element(rng)
        g2 = model.random_element(rng)
        n1 = multiplier_norm(gen, g1).left_norm
        n2 = multiplier_norm(gen, g2).left_norm
        n12 = multiplier_norm(gen, g1 * g2).left_norm
        worst = max(worst, n12 - n1 * n2)
        nstar = multiplier_norm(gen, g1.star())
        worst = max(worst, abs(nstar.left_norm - multiplier_norm(gen, g1).right_norm))
    unit = model.unit
    if gen.apply(unit).norm2() <= 1e-12:
        worst = max(worst, abs(multiplier_norm(gen, unit).left_norm - 1.0))
    return CheckReport(property="multiplier_invariants", samples=trials,
                       max_violation=float(max(worst, 0.0)), seed=seed,
                       passed=bool(worst <= tol))
