"""Concrete finite models: twisted group algebras of finite abelian groups.

Covers plain cyclic group algebras, products Z_{q1} x ... x Z_{qk}, and
rational-angle noncommutative tori realized as twisted group algebras of
Z_q x Z_q (clock/shift).  Length functions with explicit 1-cocycles are
built from character coboundaries; their conditional negative definiteness
is verified through Fourier positivity of exp(-t * ell) on the dual group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import gcd

import numpy as np

from .algebra import Model, ModelError

# Schoenberg test is run at these times by default.
CND_T_GRID = (0.1, 1.0, 10.0)
CND_TOL = 1e-10


@dataclass(frozen=True)
class GroupSpec:
    """Product of cyclic groups with an optional bilinear 2-cocycle twist.

    ``twist = (p, q)`` puts the phase ``exp(2*pi*i * p/q)`` into ``VU`` when
    commuting the first two generators: ``V U = exp(2*pi*i*p/q) U V``.
    """

    orders: tuple[int, ...]
    twist: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if not self.orders or any(q <= 0 for q in self.orders):
            raise ValueError("orders must be a nonempty list of positive integers")
        p, q = self.twist
        if q <= 0:
            raise ValueError("twist denominator must be positive")
        g = gcd(p, q)
        object.__setattr__(self, "twist", ((p // g) % (q // g), q // g))

    @property
    def size(self) -> int:
        return int(np.prod(self.orders))

    @property
    def is_twisted(self) -> bool:
        return self.twist[0] != 0

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(s) for s in iproduct(*[range(q) for q in self.orders])]

    def index(self, s: tuple[int, ...]) -> int:
        idx = 0
        for si, q in zip(s, self.orders):
            idx = idx * q + (si % q)
        return idx

    def add(self, s, t) -> tuple[int, ...]:
        return tuple((a + b) % q for a, b, q in zip(s, t, self.orders))

    def inv(self, s) -> tuple[int, ...]:
        return tuple((-a) % q for a, q in zip(s, self.orders))

    def minimal_residues(self, s) -> tuple[int, ...]:
        """Representatives in (-q/2, q/2]."""
        return tuple(a - q if a > q // 2 else a for a, q in zip(s, self.orders))

    def cocycle_phase(self, s, t) -> complex:
        """sigma(s, t) for the twisted product lambda_s lambda_t = sigma lambda_{s+t}."""
        p, q = self.twist
        if p == 0 or len(self.orders) < 2:
            return 1.0 + 0j
        return np.exp(2j * np.pi * p / q * (s[1] % self.orders[1]) * (t[0] % self.orders[0]))


@dataclass(frozen=True)
class LengthFunction:
    """Nonnegative length per group element, with its construction recorded."""

    spec: GroupSpec
    values: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.spec.size,):
            raise ValueError("length vector has wrong size")
        object.__setattr__(self, "values", v)

    def value(self, s) -> float:
        return float(self.values[self.spec.index(s)])

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        g = self.spec
        return self.value(tuple(0 for _ in g.orders)) <= tol and all(
            abs(self.value(s) - self.value(g.inv(s))) <= tol for s in g.elements()
        )

    def cnd_report(self, t_grid=CND_T_GRID, tol: float = CND_TOL) -> dict:
        """Schoenberg test: exp(-t*ell) must be positive definite for each t."""
        worst = -np.inf
        for t in t_grid:
            ft = dual_fourier(self.spec, np.exp(-t * self.values))
            worst = max(worst, float(-ft.real.min()))
        return {"max_negativity": worst, "pass": bool(worst <= tol)}


@dataclass(frozen=True)
class Cocycle:
    """1-cocycle (pi, c) on the group with ||c(s)||^2 = ell(s).

    ``pi`` is unitary per element on C^d, ``c`` a vector in C^d per element,
    satisfying c(st) = c(s) + pi(s) c(t) exactly by construction.

    ``pairing`` records the real structure: coordinate j carries character
    chi_j and pairing[j] carries its conjugate, so the antilinear map
    (C0 v)_j = conj(v_{pairing[j]}) commutes with pi and fixes every c(s).
    """

    spec: GroupSpec
    pi: np.ndarray  # (group size, d, d)
    c: np.ndarray   # (group size, d)
    pairing: np.ndarray  # (d,) int

    def real_conjugation(self, v: np.ndarray) -> np.ndarray:
        """C0: the antilinear conjugation of the underlying real Hilbert space."""
        return np.conj(np.asarray(v))[..., self.pairing]

    @property
    def rep_dim(self) -> int:
        return self.c.shape[1]

    def length(self) -> LengthFunction:
        return LengthFunction(self.spec, np.sum(np.abs(self.c) ** 2, axis=1),
                              provenance={"kind": "coboundary"})

    def check_identity(self, tol: float = 1e-12) -> float:
        g = self.spec
        worst = 0.0
        for s in g.elements():
            i = g.index(s)
            for t in g.elements():
                j = g.index(t)
                k = g.index(g.add(s, t))
                dev = np.linalg.norm(self.c[k] - self.c[i] - self.pi[i] @ self.c[j])
                worst = max(worst, float(dev))
        if worst > tol:
            raise ValueError(f"cocycle identity violated by {worst:.2e}")
        return worst


def dual_fourier(spec: GroupSpec, values: np.ndarray) -> np.ndarray:
    """Fourier transform on the dual group, flattened in character order."""
    grid = np.asarray(values, dtype=complex).reshape(spec.orders)
    return np.fft.fftn(grid).reshape(-1)


def character_table(spec: GroupSpec) -> np.ndarray:
    """chars[k, s] = chi_k(s) for dual vector k and group element s."""
    elems = spec.elements()
    chars = np.empty((spec.size, spec.size), dtype=complex)
    for k in elems:
        row = spec.index(k)
        for s in elems:
            phase = sum(ki * si / q for ki, si, q in zip(k, s, spec.orders))
            chars[row, spec.index(s)] = np.exp(2j * np.pi * phase)
    return chars


def build_twisted_group_algebra(spec: GroupSpec) -> Model:
    """Model with basis lambda_s, lambda_s lambda_t = sigma(s,t) lambda_{s+t},
    trace tau(lambda_s) = delta_{s,e}, and the twisted left regular
    representation (clock/shift for Z_q x Z_q)."""
    if spec.is_twisted:
        p, q = spec.twist
        if len(spec.orders) < 2 or spec.orders[0] % q or spec.orders[1] % q:
            raise ModelError(
                "twist denominator must divide the orders of the first two factors"
            )
    elems = spec.elements()
    n = spec.size
    structure = np.zeros((n, n, n), dtype=complex)
    involution = np.zeros((n, n), dtype=complex)
    rep = np.zeros((n, n, n), dtype=complex)
    for s in elems:
        i = spec.index(s)
        for t in elems:
            j = spec.index(t)
            k = spec.index(spec.add(s, t))
            sigma = spec.cocycle_phase(s, t)
            structure[i, j, k] = sigma
            rep[i, k, j] = sigma  # lambda_s delta_t = sigma(s,t) delta_{s+t}
        si = spec.inv(s)
        # lambda_s^* = conj(sigma(s, s^{-1})) lambda_{s^{-1}}
        involution[i, spec.index(si)] = np.conj(spec.cocycle_phase(s, si))
    trace_vec = np.zeros(n, dtype=complex)
    trace_vec[spec.index(tuple(0 for _ in spec.orders))] = 1.0
    labels = tuple(",".join(map(str, spec.minimal_residues(s))) for s in elems)
    return Model(labels=labels, structure=structure, involution=involution,
                 trace_vec=trace_vec, rep=rep,
                 meta={"kind": "twisted_group", "orders": list(spec.orders),
                       "twist": list(spec.twist)})


def coboundary_length(spec: GroupSpec, char_weights: dict | np.ndarray
                      ) -> tuple[LengthFunction, Cocycle]:
    """Length and cocycle from weighted characters.

    ``char_weights`` maps dual vectors (tuples) to nonnegative weights, or is
    a flat array indexed like the dual group.  The cocycle is
    ``c(s) = (sqrt(w_j) (chi_j(s) - 1))_j`` with diagonal character action,
    so ``ell(s) = sum_j w_j |chi_j(s) - 1|^2`` and the cocycle identity holds
    exactly.

    Weights are symmetrized across character inversion, w'(k) = (w(k) +
    w(-k)) / 2, before building.  This leaves ell unchanged (since
    |conj(z) - 1| = |z - 1|) but guarantees the cocycle carries a real
    structure, which the bimodule symmetry needs.
    """
    if isinstance(char_weights, dict):
        raw = np.zeros(spec.size)
        for k, w in char_weights.items():
            raw[spec.index(tuple(k))] = w
    else:
        raw = np.asarray(char_weights, dtype=float)
    if np.any(raw < 0):
        raise ValueError("character weights must be nonnegative")
    weights = np.empty_like(raw)
    for k in spec.elements():
        weights[spec.index(k)] = 0.5 * (raw[spec.index(k)] + raw[spec.index(spec.inv(k))])
    active = np.nonzero(weights > 0)[0]
    if active.size == 0:
        raise ValueError("all-zero weights give a degenerate form")
    dual_inv = np.array([spec.index(spec.inv(k)) for k in spec.elements()])
    pos = {int(a): j for j, a in enumerate(active)}
    pairing = np.array([pos[int(dual_inv[a])] for a in active])
    chars = character_table(spec)[active]            # (d, group size)
    sq = np.sqrt(weights[active])[:, None]
    c = (sq * (chars - 1.0)).T.copy()                # (group size, d)
    d = active.size
    pi = np.zeros((spec.size, d, d), dtype=complex)
    for s in spec.elements():
        pi[spec.index(s)] = np.diag(chars[:, spec.index(s)])
    cocycle = Cocycle(spec=spec, pi=pi, c=c, pairing=pairing)
    cocycle.check_identity()
    ell = cocycle.length()
    prov = {"kind": "coboundary",
            "weights": [[list(k), float(raw[spec.index(k)])]
                        for k in spec.elements() if raw[spec.index(k)] > 0]}
    object.__setattr__(ell, "provenance", prov)
    return ell, cocycle


def sine2_length(spec: GroupSpec, coord_weights=None
                 ) -> tuple[LengthFunction, Cocycle]:
    """Coordinate-character coboundary: ell(n) = sum_i 4 w_i sin^2(pi n_i / q_i).

    For Z_q x Z_q this reproduces the torus weights n^2 + m^2 up to scale for
    small minimal residues, while staying exactly conditionally negative
    definite at finite size.
    """
    k = len(spec.orders)
    if coord_weights is None:
        coord_weights = [1.0] * k
    if len(coord_weights) != k:
        raise ValueError("one weight per cyclic factor expected")
    weights = {}
    for i, w in enumerate(coord_weights):
        key = tuple(1 if j == i else 0 for j in range(k))
        weights[key] = float(w)
    ell, coc = coboundary_length(spec, weights)
    object.__setattr__(ell, "provenance",
                       {"kind": "sine2", "weights": [float(w) for w in coord_weights]})
    return ell, coc


def explicit_length(spec: GroupSpec, values) -> LengthFunction:
    return LengthFunction(spec, np.asarray(values, dtype=float),
                          provenance={"kind": "explicit",
                                      "values": [float(v) for v in values]})


def build_length(spec: GroupSpec, length_cfg: dict):
    """Dispatch on the serialized length description.

    Returns ``(LengthFunction, Cocycle | None)``.
    """
    kind = length_cfg.get("kind")
    if kind == "coboundary":
        weights = {tuple(k): w for k, w in length_cfg["weights"]}
        return coboundary_length(spec, weights)
    if kind == "sine2":
        return sine2_length(spec, length_cfg.get("weights"))
    if kind == "explicit":
        return explicit_length(spec, length_cfg["values"]), None
    raise ValueError(f"unknown length kind {kind!r}")


# -- JSON round trip ----------------------------------------------------


def model_config_to_json(spec: GroupSpec, length: LengthFunction) -> str:
    cfg = {
        "kind": "twisted_group",
        "orders": list(spec.orders),
        "twist": list(spec.twist),
        "length": length.provenance,
    }
    return json.dumps(cfg, indent=2)


def model_config_from_json(text: str):
    """Parse a model file; returns (GroupSpec, LengthFunction, Cocycle | None)."""
    cfg = json.loads(text)
    if cfg.get("kind") != "twisted_group":
        raise ValueError(f"unknown model kind {cfg.get('kind')!r}")
    spec = GroupSpec(orders=tuple(cfg["orders"]), twist=tuple(cfg.get("twist", (0, 1))))
    ell, coc = build_length(spec, cfg["length"])
    return spec, ell, coc


def load_model_file(path):
    """Load a model file and build everything: (spec, model, ell, cocycle)."""
    with open(path) as fh:
        spec, ell, coc = model_config_from_json(fh.read())
    return spec, build_twisted_group_algebra(spec), ell, coc
