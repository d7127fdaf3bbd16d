"""Matplotlib figures rendered next to the delimited report output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dirichlet import DirichletGenerator


def fig_spectrum(gen: DirichletGenerator, path) -> Path:
    """Stem plot of the generator spectrum."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    w = np.sort(gen.eigenvalues)
    ax.stem(np.arange(w.size), w)
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("eigenvalue of L")
    ax.set_title("generator spectrum")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_graph_norm_convergence(gen: DirichletGenerator, x, eps_grid, path) -> Path:
    """||x||_{F_eps} against eps, with ||x||_F as the horizontal limit line."""
    path = Path(path)
    deps = sorted(eps_grid, reverse=True)
    norms = [gen.approx_form(e).graph_norm(x) for e in deps]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.semilogx(deps, norms, "o-", label=r"$\|x\|_{F_\epsilon}$")
    ax.axhline(gen.graph_norm(x), color="k", ls="--", lw=1, label=r"$\|x\|_F$")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("graph norm")
    ax.invert_xaxis()
    ax.legend()
    ax.set_title("approximating form convergence")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_deny_monotonicity(deltas, values, bound, path) -> Path:
    """Regularized quadratic value per delta against the graph-norm bound."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.semilogx(deltas, values, "o-", label="regularized value")
    ax.axhline(bound, color="k", ls="--", lw=1, label=r"$\|b\|_F^2$")
    ax.set_xlabel("delta")
    ax.set_ylabel("value")
    ax.invert_xaxis()
    ax.legend()
    ax.set_title("Deny inequality: delta monotonicity")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
