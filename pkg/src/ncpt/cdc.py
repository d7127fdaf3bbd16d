"""Carre du champ of a Dirichlet space, by two independent routes.

Route one is purely algebraic: Gamma[a](b) is assembled from the energy
bilinear form and algebra products.  Route two goes through the derivation
bimodule C^d (x) l^2(G) built from a group 1-cocycle.  Their agreement is
the primary correctness gate of this module.

The closed-form potential of Gamma[g] for g = (I+L)^{-1} h is

    G(Gamma[g]) = 1/2 [ (I+L)^{-1} (h g + g h - g^2) - g^2 ].

The constant and the extra (I+L)^{-1} g^2 term are fixed by a brute-force
normalization oracle on the two-element group (see the test suite); without
that term the expression fails already at g = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import HSVector, Model, ModelError, operator_norm
from .dirichlet import DirichletGenerator
from .models import Cocycle, GroupSpec
from .potentials import FiniteEnergyFunctional, Potential, potential_of
from .reports import CheckReport


@dataclass
class BimoduleVector:
    """Element of C^d (x) l^2(G): one C^d column per group element."""

    model: Model
    cocycle: Cocycle
    data: np.ndarray  # shape (d, group size)

    def inner(self, other: "BimoduleVector") -> complex:
        """Antilinear in self."""
        return complex(np.vdot(self.data, other.data))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __add__(self, other):
        return BimoduleVector(self.model, self.cocycle, self.data + other.data)

    def __sub__(self, other):
        return BimoduleVector(self.model, self.cocycle, self.data - other.data)


class DerivationCalculus:
    """The derivation (da)(s) = a(s) c(s) (x) delta_s together with the
    bimodule actions pi (x) lambda (left) and id (x) rho (right) on the
    twisted group algebra, and the antiunitary symmetry exchanging them."""

    def __init__(self, model: Model, spec: GroupSpec, cocycle: Cocycle):
        if cocycle is None:
            raise ModelError("model has no cocycle; derivation unavailable")
        self.model = model
        self.spec = spec
        self.cocycle = cocycle
        elems = spec.elements()
        n = spec.size
        # Product table and twisted phases: lambda_s lambda_t =
        # sigma(s,t) lambda_{s+t}.  Group actions on the columns are
        # permutations, so both module actions reduce to phased scatters.
        add = np.empty((n, n), dtype=np.intp)
        sigma = np.empty((n, n), dtype=complex)
        for i, s in enumerate(elems):
            for j, t in enumerate(elems):
                add[i, j] = spec.index(spec.add(s, t))
                sigma[i, j] = spec.cocycle_phase(s, t)
        self._add = add
        self._sigma = sigma
        # Diagonal of pi(s) per group element, shape (n, d).
        self._pi_diag = np.einsum("sjj->sj", cocycle.pi).copy()

    def derivation(self, a: HSVector) -> BimoduleVector:
        data = self.cocycle.c.T * a.coeffs[None, :]
        return BimoduleVector(self.model, self.cocycle, data)

    def left_action(self, a: HSVector, xi: BimoduleVector) -> BimoduleVector:
        """a . xi through pi (x) lambda: each basis term lambda_s applies
        pi(s) to the C^d slot and sends column t to column st with phase
        sigma(s, t)."""
        out = np.zeros_like(xi.data)
        for i in np.nonzero(np.abs(a.coeffs) > 1e-300)[0]:
            shifted = a.coeffs[i] * (self._pi_diag[i][:, None]
                                     * xi.data) * self._sigma[i][None, :]
            out[:, self._add[i]] += shifted
        return BimoduleVector(self.model, self.cocycle, out)

    def right_action(self, xi: BimoduleVector, a: HSVector) -> BimoduleVector:
        """xi . a through id (x) rho: lambda_t sends column u to column ut
        with phase sigma(u, t) and leaves the C^d slot alone."""
        out = np.zeros_like(xi.data)
        for j in np.nonzero(np.abs(a.coeffs) > 1e-300)[0]:
            out[:, self._add[:, j]] += a.coeffs[j] * xi.data * self._sigma[:, j][None, :]
        return BimoduleVector(self.model, self.cocycle, out)

    def symmetry(self, xi: BimoduleVector) -> BimoduleVector:
        """The antiunitary involution J(v (x) delta_t) =
        -kappa(t) pi(t^{-1}) C0(v) (x) delta_{t^{-1}}.

        C0 is the real-structure conjugation of the cocycle and kappa(t) the
        involution phase of lambda_t.  This J satisfies J(a.xi.b) = b*.J(xi).a*
        and J(da) = d(a*); the sign and the pi(t^{-1}) factor are forced by
        the cocycle identity c(t^{-1}) = -pi(t^{-1}) c(t).
        """
        spec, coc = self.spec, self.cocycle
        out = np.zeros_like(xi.data)
        for t in spec.elements():
            i = spec.index(t)
            ti = spec.index(spec.inv(t))
            kappa = self.model.involution[i, ti]
            out[:, ti] = -kappa * (coc.pi[ti] @ coc.real_conjugation(xi.data[:, i]))
        return BimoduleVector(self.model, self.cocycle, out)


@dataclass
class CdCFunctional:
    """Gamma[a] represented by its density: Gamma[a](b) = tau(h_Gamma b)."""

    functional: FiniteEnergyFunctional

    @property
    def density(self) -> HSVector:
        return self.functional.density

    def __call__(self, b: HSVector) -> complex:
        return self.functional(b)


class GammaCalculator:
    """Recovers Gamma densities by solving the basis pairing system once."""

    def __init__(self, gen: DirichletGenerator, max_condition: float = 1e8):
        self.gen = gen
        model = gen.model
        if model.structure is None:
            raise ModelError("Gamma recovery needs structure constants")
        # t_mat[i, j] = tau(e_i e_j): tau(h b_j) = (t_mat^T h)_j.
        self.t_mat = np.einsum("ijk,k->ij", model.structure, model.trace_vec)
        cond = np.linalg.cond(self.t_mat)
        if cond > max_condition:
            raise ModelError(f"basis pairing system too ill-conditioned ({cond:.2e})")
        self.condition = float(cond)

    def density_from_values(self, values: np.ndarray) -> HSVector:
        h = np.linalg.solve(self.t_mat.T, values)
        return HSVector(self.gen.model, h)

    def gamma(self, a: HSVector, psd_tol: float = 1e-9) -> CdCFunctional:
        """Algebraic route:
        Gamma[a](b) = (E(a, ab) + E(a b^*, a) - E(b^*, a^* a)) / 2.

        With the energy form antilinear in its first argument, this is the
        placement of stars that reproduces <da, (da).b> exactly; putting a
        star on the b of the first term breaks positivity already on Z_4.
        """
        gen, model = self.gen, self.gen.model
        a_star_a = a.star() * a
        # All basis pairings at once.  amat[k, j] holds the coefficients of
        # a e_j, and bstar[:, j] those of e_j^*, so each energy pairing is a
        # single matrix product against the energy form.
        form = gen.energy_form
        amat = np.tensordot(a.coeffs, model.structure, axes=(0, 0)).T
        bstar = model.involution.T
        fa = form @ a.coeffs
        values = 0.5 * ((np.conj(a.coeffs) @ form) @ amat
                        + np.conj(amat @ bstar).T @ fa
                        - np.conj(bstar).T @ (form @ a_star_a.coeffs))
        h = self.density_from_values(values)
        return CdCFunctional(FiniteEnergyFunctional(h, psd_tol))

    def gamma_via_derivation(self, calc: DerivationCalculus, a: HSVector,
                             psd_tol: float = 1e-9) -> CdCFunctional:
        """Bimodule route: Gamma[a](b) = <da, (da) . b>_H."""
        n = self.gen.model.dim
        da = calc.derivation(a)
        # <da, da . e_j> = sum_u sigma(u, t_j) K[index(u t_j), u] with
        # K[v, u] = <da(v), da(u)>_{C^d}; one gather per basis element.
        kmat = da.data.conj().T @ da.data
        gathered = kmat[calc._add, np.arange(n)[:, None]]
        values = np.sum(calc._sigma * gathered, axis=0)
        h = self.density_from_values(values)
        return CdCFunctional(FiniteEnergyFunctional(h, psd_tol))


def leibniz_check(calc: DerivationCalculus, a: HSVector, b: HSVector,
                  tol: float = 1e-10) -> float:
    """Residual of d(ab) = (da) . b + a . (db), relative to the input scale."""
    dab = calc.derivation(a * b)
    rhs = calc.right_action(calc.derivation(a), b) + \
        calc.left_action(a, calc.derivation(b))
    scale = max(1.0, operator_norm(a) * operator_norm(b))
    return (dab - rhs).norm() / scale


def symmetry_check(calc: DerivationCalculus, a: HSVector, b: HSVector,
                   xi: BimoduleVector) -> float:
    """Residuals of J(a . xi . b) = b^* . J(xi) . a^* and J(da) = d(a^*)."""
    lhs = calc.symmetry(calc.right_action(calc.left_action(a, xi), b))
    rhs = calc.left_action(b.star(), calc.right_action(calc.symmetry(xi), a.star()))
    scale = max(1.0, operator_norm(a) * operator_norm(b) * xi.norm())
    r1 = (lhs - rhs).norm() / scale
    r2 = (calc.symmetry(calc.derivation(a)) - calc.derivation(a.star())).norm() \
        / max(1.0, operator_norm(a))
    return max(r1, r2)


def gamma_cross_check(gen: DirichletGenerator, gamma_calc: GammaCalculator,
                      calc: DerivationCalculus, trials: int = 1000,
                      seed: int = 0, tol: float = 1e-9,
                      psd_tol: float = 1e-9) -> CheckReport:
    """The algebraic and bimodule routes agree on random inputs, the density
    is positive, and Gamma[a](1) recovers the energy E[a]."""
    model = gen.model
    unit = model.unit
    cross = neg = unit_rel = 0.0
    unit_tol = 1e-10
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        a = model.random_element(rng)
        g1 = gamma_calc.gamma(a, psd_tol=psd_tol)
        g2 = gamma_calc.gamma_via_derivation(calc, a, psd_tol=psd_tol)
        cross = max(cross, (g1.density - g2.density).norm2())
        neg = max(neg, -float(g1.density.eigenvalues().min()))
        unit_rel = max(unit_rel, abs(g1(unit).real - gen.energy(a))
                       / max(1.0, gen.energy(a)))
    passed = cross <= tol and neg <= psd_tol and unit_rel <= unit_tol
    return CheckReport(property="gamma_cross_validation", samples=trials,
                       max_violation=float(max(cross, neg)), seed=seed,
                       passed=bool(passed),
                       details={"route_deviation": cross,
                                "density_negativity": neg,
                                "unit_relative_error": unit_rel})


def leibniz_report(calc: DerivationCalculus, trials: int = 1000, seed: int = 0,
                   tol: float = 1e-10) -> CheckReport:
    worst = 0.0
    model = calc.model
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        worst = max(worst, leibniz_check(calc, model.random_element(rng),
                                         model.random_element(rng)))
    return CheckReport(property="leibniz", samples=trials, max_violation=worst,
                       seed=seed, passed=worst <= tol)


def symmetry_report(calc: DerivationCalculus, trials: int = 200, seed: int = 0,
                    tol: float = 1e-10) -> CheckReport:
    worst = 0.0
    model = calc.model
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        xi = BimoduleVector(model, calc.cocycle,
                            (rng.standard_normal(calc.cocycle.c.T.shape)
                             + 1j * rng.standard_normal(calc.cocycle.c.T.shape)))
        worst = max(worst, symmetry_check(calc, model.random_element(rng),
                                          model.random_element(rng), xi))
    return CheckReport(property="bimodule_symmetry", samples=trials,
                       max_violation=worst, seed=seed, passed=worst <= tol)


def gamma_potential_identity_check(gen: DirichletGenerator,
                                   gamma_calc: GammaCalculator,
                                   trials: int = 1000, seed: int = 0,
                                   tol: float = 1e-9) -> CheckReport:
    """potential_of_gamma((I+L)^{-1} h) equals the closed form on random h >= 0."""
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        h = gen.model.random_positive(rng)
        direct = potential_of_gamma(gen, gamma_calc, gen.inverse_graph(h))
        closed = closed_form_gamma_potential(gen, h)
        worst = max(worst, (direct.vector - closed.vector).norm2())
    return CheckReport(property="gamma_potential_identity", samples=trials,
                       max_violation=worst, seed=seed, passed=worst <= tol)


def potential_of_gamma(gen: DirichletGenerator, gamma_calc: GammaCalculator,
                       g: HSVector) -> Potential:
    """Potential of Gamma[g] via Riesz representation: (I+L)^{-1} h_Gamma."""
    cdc = gamma_calc.gamma(g)
    return potential_of(gen, cdc.functional)


def closed_form_gamma_potential(gen: DirichletGenerator, h: HSVector) -> Potential:
    """With g = (I+L)^{-1} h: G(Gamma[g]) = [(I+L)^{-1}(hg + gh - g^2) - g^2] / 2."""
    g = gen.inverse_graph(h)
    hg_gh = h * g + g * h - g * g
    expr = 0.5 * (gen.inverse_graph(hg_gh) - g * g)
    cert = expr + gen.apply(expr)
    return Potential(vector=expr, density_certificate=cert)


def gamma_bound_check(gen: DirichletGenerator, gamma_calc: GammaCalculator,
                      g: Potential, trials: int = 200, seed: int = 0,
                      tol: float = 1e-9) -> CheckReport:
    """Gamma[G](b) <= 2 ||G||_M ||G||_F ||b||_F for positive b, and the
    Cauchy-Schwarz step |<G, b^* c>_F|^2 <= <G, b^* b>_F <G, c^* c>_F."""
    gv = g.vector
    cdc = gamma_calc.gamma(gv)
    bound_const = 2.0 * operator_norm(gv) * gen.graph_norm(gv)
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        b = gen.model.random_positive(rng)
        lhs = cdc(b).real
        worst = max(worst, lhs - bound_const * gen.graph_norm(b))
        # Cauchy-Schwarz for omega_G(x) = <G, x>_F.
        c = gen.model.random_element(rng)
        bb = gen.model.random_element(rng)
        cross = abs(gen.graph_inner(gv, bb.star() * c)) ** 2
        sides = gen.graph_inner(gv, bb.star() * bb).real * \
            gen.graph_inner(gv, c.star() * c).real
        worst = max(worst, cross - sides)
    return CheckReport(property="gamma_bound", samples=trials,
                       max_violation=max(worst, 0.0), seed=seed,
                       passed=worst <= tol)
