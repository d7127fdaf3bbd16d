"""Finite-energy functionals, their potentials and energy contents.

Every positive functional here is normal, omega(b) = tau(h b) for a positive
density h, and its potential is the Riesz representative in the graph inner
product: G(omega) = (I+L)^{-1} h.  Membership in the potential cone is
decided through self-duality of the positive cone at finite dimension:
x is a potential iff (I+L)x >= 0 spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (HSVector, Model, functional_calculus, hs_inner,
                      operator_norm)
from .dirichlet import DirichletGenerator
from .models import dual_fourier
from .reports import CheckReport

PSD_TOL = 1e-9
DENSITY_PSD_TOL = 1e-10


@dataclass
class FiniteEnergyFunctional:
    """Positive functional omega(b) = tau(h b) given by a density h >= 0."""

    density: HSVector
    tol: float = DENSITY_PSD_TOL

    def __post_init__(self):
        min_eig = float(self.density.eigenvalues().min()) if self.density.model.dim else 0.0
        if min_eig < -self.tol * max(1.0, operator_norm(self.density)):
            raise ValueError(f"density is not positive (min eigenvalue {min_eig:.2e})")

    @property
    def model(self) -> Model:
        return self.density.model

    def __call__(self, b: HSVector) -> complex:
        return self.model.trace_of(self.model.mul(self.density.coeffs, b.coeffs))

    def scaled(self, c: float) -> "FiniteEnergyFunctional":
        return FiniteEnergyFunctional(c * self.density, self.tol)

    def pd_coeffs(self) -> np.ndarray:
        """phi_omega(s) = omega(lambda_s), the coefficient function."""
        m = self.model
        t_mat = np.einsum("ijk,k->ij", m.structure, m.trace_vec)
        return self.density.coeffs @ t_mat

    def pd_check(self, spec, tol: float = 1e-10) -> float:
        """Most negative dual Fourier mass of phi_omega (should be ~0)."""
        return float(-dual_fourier(spec, self.pd_coeffs()).real.min())


def functional_from_pd_coeffs(model: Model, gen: DirichletGenerator,
                              phi: np.ndarray) -> FiniteEnergyFunctional:
    """Group-model functional from its coefficient function phi(s) = omega(lambda_s).

    The density solves tau(h e_j) = phi_j.
    """
    t_mat = np.einsum("ijk,k->ij", model.structure, model.trace_vec)
    h = np.linalg.solve(t_mat.T, np.asarray(phi, dtype=complex))
    return FiniteEnergyFunctional(HSVector(model, h))


@dataclass
class Potential:
    """Riesz representative G of a finite-energy functional, with its
    density certificate h = (I+L) G."""

    vector: HSVector
    density_certificate: HSVector

    def min_eigenvalue(self) -> float:
        return float(self.vector.eigenvalues().min())

    def certificate_min_eigenvalue(self) -> float:
        return float(self.density_certificate.eigenvalues().min())


def potential_of(gen: DirichletGenerator, omega: FiniteEnergyFunctional) -> Potential:
    g = gen.inverse_graph(omega.density)
    return Potential(vector=g, density_certificate=omega.density)


def energy_content(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                   rel_tol: float = 1e-10) -> float:
    """E[omega] = omega(G(omega)) = <G, G>_F, both routes cross-checked."""
    g = potential_of(gen, omega).vector
    via_omega = omega(g).real
    via_graph = gen.graph_inner(g, g).real
    scale = max(1.0, abs(via_graph))
    if abs(via_omega - via_graph) > rel_tol * scale:
        raise ArithmeticError(
            f"energy content routes disagree: {via_omega!r} vs {via_graph!r}"
        )
    return via_graph


def is_potential(gen: DirichletGenerator, x: HSVector,
                 tol: float = PSD_TOL) -> tuple[bool, float]:
    """x is a potential iff (I+L)x >= 0; certificate is the min eigenvalue."""
    h = x + gen.apply(x)
    min_eig = float(h.eigenvalues().min())
    return min_eig >= -tol, min_eig


def check_positivity_of_potentials(gen: DirichletGenerator, trials: int = 1000,
                                   seed: int = 0, tol: float = PSD_TOL) -> CheckReport:
    """Potentials of positive densities are positive operators (standard cone)."""
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        h = gen.model.random_positive(rng)
        g = potential_of(gen, FiniteEnergyFunctional(h))
        worst = max(worst, -g.min_eigenvalue())
    return CheckReport(property="potential_positivity", samples=trials,
                       max_violation=worst, seed=seed, passed=worst <= tol)


def check_potential_equivalence(gen: DirichletGenerator, trials: int = 1000,
                                seed: int = 0, tol: float = PSD_TOL,
                                t_grid=(1e-3, 1e-2, 0.1, 1.0, 10.0),
                                eps_grid=(0.1, 0.5, 0.9)) -> CheckReport:
    """Cone membership and the domination criteria decide identically.

    Half the samples are genuine potentials, half random J-real elements;
    each is classified through (I+L)x >= 0 and through the semigroup and
    resolvent dominations, and any disagreement is counted.  The time grid
    reaches down to small t because the domination statement quantifies
    over every positive time and non-potentials with a small cone
    violation only reveal it near t = 0.
    """
    disagreements = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        if trial % 2 == 0:
            h = gen.model.random_positive(rng)
            x = potential_of(gen, FiniteEnergyFunctional(h)).vector
        else:
            x = gen.model.random_hermitian(rng)
        via_cone, _ = is_potential(gen, x, tol)
        worst_dom = -np.inf
        for t in t_grid:
            dom = x - np.exp(-t) * gen.semigroup(t, x)
            worst_dom = max(worst_dom, -float(dom.eigenvalues().min()))
        for eps in eps_grid:
            dom = (1.0 / (1.0 - eps)) * x - gen.resolvent(eps, x)
            worst_dom = max(worst_dom, -float(dom.eigenvalues().min()))
        if via_cone != (worst_dom <= tol):
            disagreements += 1
    return CheckReport(property="potential_equivalence", samples=trials,
                       max_violation=float(disagreements), seed=seed,
                       passed=disagreements == 0)


def check_domination(gen: DirichletGenerator, omega_small: FiniteEnergyFunctional,
                     omega_big: FiniteEnergyFunctional,
                     tol: float = PSD_TOL) -> CheckReport:
    """omega' <= omega implies G(omega') <= G(omega) and E[omega'] <= E[omega]."""
    gap = omega_big.density - omega_small.density
    if float(gap.eigenvalues().min()) < -tol:
        raise ValueError("precondition h' <= h fails; not a domination pair")
    g_small = potential_of(gen, omega_small).vector
    g_big = potential_of(gen, omega_big).vector
    pot_gap = -float((g_big - g_small).eigenvalues().min())
    energy_gap = energy_content(gen, omega_small) - energy_content(gen, omega_big)
    worst = max(pot_gap, energy_gap)
    return CheckReport(property="domination", samples=1, max_violation=worst,
                       seed=0, passed=worst <= tol,
                       details={"potential_gap": pot_gap, "energy_gap": energy_gap})


def check_semigroup_domination(gen: DirichletGenerator, x: HSVector,
                               t_grid=(0.1, 1.0, 10.0),
                               eps_grid=(0.1, 0.5, 0.9),
                               tol: float = PSD_TOL) -> CheckReport:
    """The Lemma-style criterion: exp(-t(1+L)) x <= x and
    (I+eps L)^{-1} x <= (1-eps)^{-1} x for eps in (0,1)."""
    worst = -np.inf
    for t in t_grid:
        dom = x - np.exp(-t) * gen.semigroup(t, x)
        worst = max(worst, -float(dom.eigenvalues().min()))
    for eps in eps_grid:
        if not 0 < eps < 1:
            raise ValueError("eps grid must lie in (0, 1)")
        dom = (1.0 / (1.0 - eps)) * x - gen.resolvent(eps, x)
        worst = max(worst, -float(dom.eigenvalues().min()))
    return CheckReport(property="semigroup_domination", samples=len(t_grid) + len(eps_grid),
                       max_violation=worst, seed=0, passed=worst <= tol)


def check_derivative_identity(gen: DirichletGenerator, xi: HSVector, eta: HSVector,
                              t: float = 0.5, dt: float = 1e-3) -> CheckReport:
    """d/dt <exp(-t(1+L)) xi, eta>_2 = -<exp(-t(1+L)) xi, eta>_F, checked by
    central differences at dt and dt/2 (error must drop ~4x)."""
    if dt <= 0:
        raise ValueError("dt must be positive")

    def lhs_val(tt):
        return (np.exp(-tt) * hs_inner(gen.semigroup(tt, xi), eta)).real

    def err(step):
        num = (lhs_val(t + step) - lhs_val(t - step)) / (2 * step)
        rhs = -(np.exp(-t) * gen.graph_inner(gen.semigroup(t, xi), eta)).real
        return abs(num - rhs)

    e1, e2 = err(dt), err(dt / 2)
    # Second-order scheme: constant estimated from the halving pair.
    c = e2 / (dt / 2) ** 2
    passed = e1 <= max(4.0 * e2 * 1.5, 1e-12) and e1 <= c * dt ** 2 * 1.5 + 1e-12
    return CheckReport(property="derivative_identity", samples=2,
                       max_violation=float(e1), seed=0, passed=bool(passed),
                       details={"error_dt": float(e1), "error_half_dt": float(e2)})


def check_resolvent_pushforward(gen: DirichletGenerator,
                                omega: FiniteEnergyFunctional, eps: float,
                                tol: float = 1e-10) -> CheckReport:
    """The pushed functional b -> omega((I+eps L)^{-1} b) has density
    (I+eps L)^{-1} h >= 0 and potential (I+eps L)^{-1} G(omega)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    pushed_density = gen.resolvent(eps, omega.density)
    neg = -float(pushed_density.eigenvalues().min())
    pushed = FiniteEnergyFunctional(pushed_density)
    lhs = potential_of(gen, pushed).vector
    rhs = gen.resolvent(eps, potential_of(gen, omega).vector)
    dev = (lhs - rhs).norm2()
    worst = max(neg, dev)
    return CheckReport(property="resolvent_pushforward", samples=1,
                       max_violation=worst, seed=0, passed=worst <= tol,
                       details={"density_negativity": neg, "potential_deviation": dev})


def interpolation_family(gen: DirichletGenerator, omega: FiniteEnergyFunctional,
                         lam: float) -> np.ndarray:
    """phi_lambda(s) = lambda / (lambda + sqrt(ell(s))) * phi_omega(s).

    Only meaningful on group models where the generator is diagonal in the
    group basis.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    ell = np.diag(gen.lmat).real
    if np.linalg.norm(gen.lmat - np.diag(np.diag(gen.lmat))) > 1e-12:
        raise ValueError("interpolation family needs a diagonal (group) generator")
    return lam / (lam + np.sqrt(ell)) * omega.pd_coeffs()


def regularized_inv_sqrt(g: Potential, delta: float) -> HSVector:
    """(G + delta)^{-1/2} through functional calculus."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return functional_calculus(g.vector, lambda t: 1.0 / np.sqrt(t + delta))
