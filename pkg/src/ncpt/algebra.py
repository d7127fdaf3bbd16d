"""Finite-dimensional tracial *-algebras and their GNS-space operations.

A :class:`Model` carries a distinguished basis with structure constants, a
conjugate-linear involution, a trace and a faithful matrix representation.
Elements are :class:`HSVector` coefficient vectors; they can be viewed either
as GNS vectors or, through the representation, as operators.  All cone
operations (positive part, meet with the unit, functional calculus) are
computed spectrally on the operator side and mapped back to coefficients.

Inner products are antilinear in the FIRST argument throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# An element is accepted as "J-real" when ||Jx - x||_2 <= JREAL_TOL * max(1, ||x||_2).
JREAL_TOL = 1e-9
# Residual allowed when mapping a matrix back to basis coefficients.
SPAN_TOL = 1e-8


class ModelError(ValueError):
    """Inconsistent model data or an operation applied across models."""


class NotRealError(ValueError):
    """Raised when a cone operation receives an element that is not J-real."""


@dataclass(frozen=True)
class Model:
    """Finite-dimensional tracial *-algebra with a faithful representation.

    Attributes
    ----------
    labels : basis element names, one per distinguished basis element.
    structure : complex tensor ``C`` with ``e_i e_j = sum_k C[i,j,k] e_k``,
        or ``None`` when products should go through the representation
        (used by matrix ampliations, where the full tensor is too large).
    involution : matrix ``S`` with ``e_i^* = sum_k S[i,k] e_k``.
    trace_vec : ``trace_vec[i] = tau(e_i)``.
    rep : stack of representation matrices, shape ``(dim, m, m)``.
    meta : free-form description (group orders, twist, ...), not used
        by any computation.
    """

    labels: tuple
    structure: np.ndarray | None
    involution: np.ndarray
    trace_vec: np.ndarray
    rep: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = len(self.labels)
        if self.involution.shape != (d, d):
            raise ModelError("involution matrix has wrong shape")
        if self.trace_vec.shape != (d,):
            raise ModelError("trace vector has wrong shape")
        if self.rep.shape[0] != d or self.rep.shape[1] != self.rep.shape[2]:
            raise ModelError("representation stack has wrong shape")
        if self.structure is not None and self.structure.shape != (d, d, d):
            raise ModelError("structure tensor has wrong shape")
        # Cached linear maps between the coefficient and matrix pictures.
        flat = self.rep.reshape(d, -1)
        object.__setattr__(self, "_basis_flat", flat)
        object.__setattr__(self, "_basis_pinv", np.linalg.pinv(flat))
        # tau as a linear functional on the represented matrix space.
        object.__setattr__(self, "_tau_flat", self.trace_vec @ self._basis_pinv.T)
        gram = np.array(
            [[self.trace_of(self.mul(self.star(_unit_vec(d, i)), _unit_vec(d, j)))
              for j in range(d)] for i in range(d)]
        ) if self.structure is not None else None
        if gram is None:
            # Through the representation: gram[i,j] = tau(e_i^* e_j).
            gram = np.empty((d, d), dtype=complex)
            for i in range(d):
                ai = self.rep[i].conj().T
                for j in range(d):
                    gram[i, j] = self.trace_of_matrix(ai @ self.rep[j])
        object.__setattr__(self, "_gram", gram)
        object.__setattr__(self, "_unit_coeffs", self.from_matrix(np.eye(self.rep_dim)))

    # -- basic data -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def rep_dim(self) -> int:
        return self.rep.shape[1]

    @property
    def gram(self) -> np.ndarray:
        """Gram matrix ``tau(e_i^* e_j)`` of the GNS inner product."""
        return self._gram

    @property
    def unit_coeffs(self) -> np.ndarray:
        return self._unit_coeffs

    @property
    def unit(self) -> "HSVector":
        return HSVector(self, self._unit_coeffs.copy())

    # -- coefficient-level algebra --------------------------------------

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coefficients of the product of two elements."""
        if self.structure is not None:
            return y @ np.tensordot(x, self.structure, axes=(0, 0))
        return self.from_matrix(self.to_matrix(x) @ self.to_matrix(y))

    def star(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of the adjoint (conjugate-linear)."""
        return self.involution.T @ np.conj(x)

    def trace_of(self, x: np.ndarray) -> complex:
        return complex(self.trace_vec @ x)

    # -- matrix picture -------------------------------------------------

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,iab->ab", x, self.rep)

    def from_matrix(self, m: np.ndarray, tol: float = SPAN_TOL) -> np.ndarray:
        """Invert ``to_matrix``; reject matrices outside the algebra span."""
        coeffs = self._basis_pinv.T @ m.reshape(-1)
        resid = np.linalg.norm(self.to_matrix(coeffs) - m)
        scale = max(1.0, np.linalg.norm(m))
        if resid > tol * scale:
            raise ModelError(
                f"matrix lies outside the algebra span (residual {resid:.2e})"
            )
        return coeffs

    def trace_of_matrix(self, m: np.ndarray) -> complex:
        """tau of an element given by its representing matrix."""
        return complex(self._tau_flat @ m.reshape(-1))

    # -- sampling -------------------------------------------------------

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> "HSVector":
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return HSVector(self, scale * c / np.sqrt(2))

    def random_hermitian(self, rng: np.random.Generator, scale: float = 1.0) -> "HSVector":
        x = self.random_element(rng, scale)
        return 0.5 * (x + x.star())

    def random_positive(self, rng: np.random.Generator, scale: float = 1.0) -> "HSVector":
        a = self.random_element(rng, scale)
        return a.star() * a


def _unit_vec(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


@dataclass
class HSVector:
    """Coefficient vector over the distinguished basis of a model."""

    model: Model
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.model.dim,):
            raise ModelError("coefficient vector has wrong length")

    # Arithmetic mirrors the algebra: + and scalar *, and @-free products.
    def __add__(self, other: "HSVector") -> "HSVector":
        _same_model(self, other)
        return HSVector(self.model, self.coeffs + other.coeffs)

    def __sub__(self, other: "HSVector") -> "HSVector":
        _same_model(self, other)
        return HSVector(self.model, self.coeffs - other.coeffs)

    def __neg__(self) -> "HSVector":
        return HSVector(self.model, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, HSVector):
            _same_model(self, other)
            return HSVector(self.model, self.model.mul(self.coeffs, other.coeffs))
        return HSVector(self.model, self.coeffs * other)

    def __rmul__(self, scalar) -> "HSVector":
        return HSVector(self.model, scalar * self.coeffs)

    def star(self) -> "HSVector":
        return HSVector(self.model, self.model.star(self.coeffs))

    def to_matrix(self) -> np.ndarray:
        return self.model.to_matrix(self.coeffs)

    def norm2(self) -> float:
        return float(np.sqrt(max(hs_inner(self, self).real, 0.0)))

    def is_real(self, tol: float = JREAL_TOL) -> bool:
        dev = (modular_conjugation(self) - self).norm2()
        return dev <= tol * max(1.0, self.norm2())

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in the representation; only meaningful for J-real elements."""
        return np.linalg.eigvalsh(self.to_matrix())


def _same_model(x: HSVector, y: HSVector) -> None:
    if x.model is not y.model:
        raise ModelError("operands belong to different models")


def _require_real(x: HSVector) -> None:
    if not x.is_real():
        raise NotRealError("element is not J-real; refusing to symmetrize")


# -- the spec'd operations ---------------------------------------------


def hs_inner(x: HSVector, y: HSVector) -> complex:
    """GNS inner product tau(x^* y), antilinear in ``x``."""
    _same_model(x, y)
    return complex(np.conj(x.coeffs) @ x.model.gram @ y.coeffs)


def modular_conjugation(x: HSVector) -> HSVector:
    """The antilinear isometric involution J extending a -> a^*."""
    return x.star()


def positive_part(x: HSVector) -> HSVector:
    """Spectral positive part of a J-real element."""
    _require_real(x)
    return functional_calculus(x, lambda t: np.maximum(t, 0.0), check_real=False)


def negative_part(x: HSVector) -> HSVector:
    _require_real(x)
    return functional_calculus(x, lambda t: np.maximum(-t, 0.0), check_real=False)


def meet_one(x: HSVector) -> HSVector:
    """Hilbert projection onto {a <= 1}: spectrally min(x, 1)."""
    _require_real(x)
    one = x.model.unit
    return one - positive_part(one - x)


def functional_calculus(x: HSVector, f: Callable[[np.ndarray], np.ndarray],
                        check_real: bool = True) -> HSVector:
    """Apply ``f`` to the spectrum of a J-real element.

    ``f`` receives the vector of eigenvalues; results outside the algebra
    span raise :class:`ModelError` (a representation inconsistency).
    """
    if check_real:
        _require_real(x)
    m = x.to_matrix()
    w, v = np.linalg.eigh(m)
    fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise ValueError("function undefined at an eigenvalue of the element")
    out = (v * fw) @ v.conj().T
    return HSVector(x.model, x.model.from_matrix(out))


def operator_norm(x: HSVector) -> float:
    """Largest singular value of the representing matrix."""
    s = np.linalg.svd(x.to_matrix(), compute_uv=False)
    return float(s[0]) if s.size else 0.0


# -- model self-checks --------------------------------------------------


def validate_model(model: Model, rng: np.random.Generator | None = None,
                   samples: int = 32, tol: float = 1e-9) -> dict:
    """Verify faithfulness of the representation and traciality by sampling.

    Returns a dict of worst-case deviations; raises ModelError on failure.
    """
    rng = rng or np.random.default_rng(0)
    worst_prod = 0.0
    worst_trace = 0.0
    min_norm_ratio = np.inf
    for _ in range(samples):
        a = model.random_element(rng)
        b = model.random_element(rng)
        if model.structure is not None:
            ab = model.mul(a.coeffs, b.coeffs)
            dev = np.linalg.norm(model.to_matrix(ab) - a.to_matrix() @ b.to_matrix())
            worst_prod = max(worst_prod, dev)
        dev = abs(model.trace_of(model.mul(a.coeffs, b.coeffs))
                  - model.trace_of(model.mul(b.coeffs, a.coeffs)))
        worst_trace = max(worst_trace, dev)
        nrm = hs_inner(a, a).real
        if np.linalg.norm(a.coeffs) > 1e-12:
            min_norm_ratio = min(min_norm_ratio, nrm / np.linalg.norm(a.coeffs) ** 2)
    tau1 = model.trace_of(model.unit_coeffs).real
    if worst_prod > tol or worst_trace > tol:
        raise ModelError(
            f"model invariants violated (product dev {worst_prod:.2e}, "
            f"trace dev {worst_trace:.2e})"
        )
    if min_norm_ratio <= 0 or tau1 <= 0:
        raise ModelError("trace is not faithful or tau(1) is not positive")
    return {
        "product_deviation": worst_prod,
        "traciality_deviation": worst_trace,
        "min_norm_ratio": float(min_norm_ratio),
        "tau_unit": tau1,
    }
