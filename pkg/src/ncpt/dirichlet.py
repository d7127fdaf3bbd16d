"""Dirichlet forms: generator, semigroup, resolvent, approximating forms,
and verifiers for the real / Markovian / completely-Dirichlet properties.

At finite dimension the form domain is the whole GNS space, so the graph
norm, semigroup and resolvents are exact spectral calculus of the generator.
Matrix ampliations (for the completely-Dirichlet check) are built as derived
models whose products go through the representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import HSVector, Model, ModelError, hs_inner, meet_one
from .models import LengthFunction
from .reports import CheckReport

MARKOV_TOL = 1e-9


class DirichletGenerator:
    """Positive self-adjoint operator L on the GNS space, acting on
    basis coefficients, with cached spectral decomposition."""

    def __init__(self, model: Model, lmat: np.ndarray, meta: dict | None = None):
        lmat = np.asarray(lmat, dtype=complex)
        if lmat.shape != (model.dim, model.dim):
            raise ModelError("generator matrix has wrong shape")
        self.model = model
        self.lmat = lmat
        self.meta = meta or {}
        gram = model.gram
        form = gram @ lmat
        if np.linalg.norm(form - form.conj().T) > 1e-9 * max(1.0, np.linalg.norm(form)):
            raise ModelError("generator is not symmetric for the GNS inner product")
        # Generalized eigenproblem: L = V diag(w) V^H G with V^H G V = I.
        w, v = scipy.linalg.eigh(form, gram)
        if w.min() < -1e-10 * max(1.0, abs(w.max())):
            raise ModelError(f"generator is not positive (min eigenvalue {w.min():.2e})")
        self.eigenvalues = w
        self._v = v
        self._vhg = v.conj().T @ gram
        self._form = form

    def apply(self, x: HSVector) -> HSVector:
        return HSVector(self.model, self.lmat @ x.coeffs)

    def apply_spectral(self, f, x: HSVector) -> HSVector:
        """f(L) x through the cached eigendecomposition."""
        c = self._vhg @ x.coeffs
        return HSVector(self.model, self._v @ (np.asarray(f(self.eigenvalues)) * c))

    # -- forms and norms ------------------------------------------------

    @property
    def energy_form(self) -> np.ndarray:
        """Matrix F of the energy form: E(x, y) = conj(x) @ F @ y."""
        return self._form

    def energy_bilinear(self, x: HSVector, y: HSVector) -> complex:
        """E(x, y) = <x, L y>_2, antilinear in x."""
        return complex(np.conj(x.coeffs) @ self._form @ y.coeffs)

    def energy(self, x: HSVector) -> float:
        return max(self.energy_bilinear(x, x).real, 0.0)

    def graph_inner(self, x: HSVector, y: HSVector) -> complex:
        return self.energy_bilinear(x, y) + hs_inner(x, y)

    def graph_norm(self, x: HSVector) -> float:
        return float(np.sqrt(max(self.graph_inner(x, x).real, 0.0)))

    # -- semigroup and resolvent ----------------------------------------

    def semigroup(self, t: float, x: HSVector) -> HSVector:
        if t < 0:
            raise ValueError("semigroup time must be nonnegative")
        return self.apply_spectral(lambda w: np.exp(-t * w), x)

    def resolvent(self, eps: float, x: HSVector) -> HSVector:
        """(I + eps L)^{-1} x."""
        if eps < 0:
            raise ValueError("resolvent parameter must be nonnegative")
        return self.apply_spectral(lambda w: 1.0 / (1.0 + eps * w), x)

    def inverse_graph(self, x: HSVector) -> HSVector:
        """(I + L)^{-1} x."""
        return self.apply_spectral(lambda w: 1.0 / (1.0 + w), x)

    def approx_form(self, eps: float) -> "ApproxForm":
        return ApproxForm(self, eps)


@dataclass
class ApproxForm:
    """Bounded approximation L_eps = L (I + eps L)^{-1} and its graph norm."""

    gen: DirichletGenerator
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def lam(self, w):
        return w / (1.0 + self.epsilon * w)

    def apply(self, x: HSVector) -> HSVector:
        return self.gen.apply_spectral(self.lam, x)

    def energy(self, x: HSVector) -> float:
        c = self.gen._vhg @ x.coeffs
        return float(np.sum(self.lam(self.gen.eigenvalues) * np.abs(c) ** 2))

    def graph_norm(self, x: HSVector) -> float:
        val = self.energy(x) + hs_inner(x, x).real
        return float(np.sqrt(max(val, 0.0)))

    def inverse_graph(self, x: HSVector) -> HSVector:
        """(I + L_eps)^{-1} x."""
        return self.gen.apply_spectral(lambda w: 1.0 / (1.0 + self.lam(w)), x)


def build_generator(model: Model, ell: LengthFunction) -> DirichletGenerator:
    """Diagonal generator L lambda_s = ell(s) lambda_s of a group model."""
    if model.dim != ell.spec.size:
        raise ModelError("length function does not match the model dimension")
    return DirichletGenerator(model, np.diag(ell.values.astype(complex)),
                              meta={"ell": ell.values.tolist()})


# -- ampliation ---------------------------------------------------------


def amplify_model(model: Model, n: int) -> Model:
    """M_n(A) with basis e_i (x) E_kl, trace tau (x) Tr and representation
    R_i (x) E_kl.  Products go through the representation (no structure
    tensor; it would be dim^3 n^6 entries)."""
    if n < 1:
        raise ValueError("ampliation level must be >= 1")
    if n == 1:
        return model
    d, m = model.dim, model.rep_dim
    units = np.zeros((n * n, n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            units[k * n + l, k, l] = 1.0
    rep = np.einsum("iab,ucd->iuacbd", model.rep, units).reshape(d * n * n, m * n, m * n)
    # (e_i (x) E_kl)^* = e_i^* (x) E_lk
    perm = np.zeros((n * n, n * n))
    for k in range(n):
        for l in range(n):
            perm[k * n + l, l * n + k] = 1.0
    involution = np.kron(model.involution, perm)
    trace_vec = np.kron(model.trace_vec, np.eye(n).reshape(-1))
    labels = tuple(f"{lab}[{k},{l}]" for lab in model.labels
                   for k in range(n) for l in range(n))
    return Model(labels=labels, structure=None, involution=involution,
                 trace_vec=trace_vec, rep=rep,
                 meta={"kind": "ampliation", "n": n, "base": model.meta})


def amplify_generator(gen: DirichletGenerator, n: int) -> DirichletGenerator:
    """Entrywise extension: E_n[[xi_ij]] = sum_ij E[xi_ij]."""
    if n == 1:
        return gen
    big = amplify_model(gen.model, n)
    return DirichletGenerator(big, np.kron(gen.lmat, np.eye(n * n)),
                              meta={**gen.meta, "ampliation": n})


# -- verifiers ----------------------------------------------------------


def check_approx_form_monotonicity(gen: DirichletGenerator,
                                   eps_grid=(1.0, 0.1, 0.01, 0.001),
                                   sample_count: int = 100, seed: int = 0,
                                   tol: float = 1e-10) -> CheckReport:
    """||x||_{F_eps} increases to ||x||_F as eps decreases along the grid."""
    deps = sorted(eps_grid, reverse=True)
    if deps[-1] <= 0:
        raise ValueError("eps grid must be positive")
    worst = 0.0
    for trial in range(sample_count):
        rng = np.random.default_rng([seed, trial])
        x = gen.model.random_element(rng)
        norms = [gen.approx_form(e).graph_norm(x) for e in deps]
        cap = gen.graph_norm(x)
        worst = max(worst, max(norms) - cap)
        worst = max(worst, max((norms[i] - norms[i + 1]
                                for i in range(len(norms) - 1)), default=0.0))
    return CheckReport(property="approx_form_monotonicity",
                       samples=sample_count, max_violation=worst, seed=seed,
                       passed=worst <= tol)


def check_markovian(gen: DirichletGenerator, sample_count: int = 1000,
                    seed: int = 0, tol: float = MARKOV_TOL) -> CheckReport:
    """E[xi ^ 1] <= E[xi] for random J-real xi; violations reported, not thrown."""
    max_violation = 0.0
    for trial in range(sample_count):
        rng = np.random.default_rng([seed, trial])
        xi = gen.model.random_hermitian(rng)
        violation = gen.energy(meet_one(xi)) - gen.energy(xi)
        max_violation = max(max_violation, violation)
    return CheckReport(property="markovian", samples=sample_count,
                       max_violation=max_violation, seed=seed,
                       passed=max_violation <= tol)


def check_completely_dirichlet(gen: DirichletGenerator, n: int,
                               sample_count: int = 1000, seed: int = 0,
                               tol: float = MARKOV_TOL) -> CheckReport:
    """Markovianity of the ampliated form on M_n(A) with tau_n = tau (x) Tr."""
    rep = check_markovian(amplify_generator(gen, n), sample_count, seed, tol)
    rep.property = f"completely_dirichlet_n{n}"
    return rep


def check_reality(gen: DirichletGenerator, sample_count: int = 1000,
                  seed: int = 0, tol: float = 1e-9) -> CheckReport:
    """E[J xi] = E[xi] on random xi."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(sample_count):
        xi = gen.model.random_element(rng)
        scale = max(1.0, gen.energy(xi))
        worst = max(worst, abs(gen.energy(xi.star()) - gen.energy(xi)) / scale)
    return CheckReport(property="reality", samples=sample_count,
                       max_violation=worst, seed=seed, passed=worst <= tol)


def check_complete_positivity(gen: DirichletGenerator, n: int, t_grid=(0.1, 1.0),
                              eps_grid=(0.1, 1.0), sample_count: int = 100,
                              seed: int = 0, tol: float = 1e-9) -> CheckReport:
    """Semigroup and resolvent preserve positivity at ampliation level n."""
    big = amplify_generator(gen, n)
    worst = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(sample_count):
        x = big.model.random_positive(rng)
        for t in t_grid:
            worst = max(worst, -float(big.semigroup(t, x).eigenvalues().min()))
        for eps in eps_grid:
            worst = max(worst, -float(big.resolvent(eps, x).eigenvalues().min()))
    return CheckReport(property=f"complete_positivity_n{n}", samples=sample_count,
                       max_violation=worst, seed=seed, passed=worst <= tol)
