"""Closed-form consensus weight matrices and their validation.

Every constructor returns a :class:`WeightMatrix` whose convergence factor
``rho`` and convergence time ``tau`` are computed once at construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph, laplacian
from .spectral import convergence_factor, convergence_time, sym_eigs

__all__ = [
    "METHODS",
    "WeightMatrix",
    "ValidationReport",
    "weight_matrix",
    "kappa_weights",
    "best_constant_weights",
    "max_degree_weights",
    "local_degree_weights",
    "validate",
    "save_weights",
    "read_weights_csv",
    "load_weights",
]

METHODS = ("kappa", "best_constant", "max_degree", "local_degree", "fmmc", "fdla")
VALIDATION_TOL = 1e-8


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric consensus matrix ``P`` on a graph, with provenance."""

    p: np.ndarray
    method: str
    graph: Graph = field(repr=False)
    params: dict = field(default_factory=dict)
    rho: float = float("nan")
    tau: float | None = None

    @property
    def m(self) -> int:
        return self.p.shape[0]

    @property
    def converges(self) -> bool:
        return self.tau is not None

    @property
    def edge_weights(self) -> np.ndarray:
        ei, ej = self.graph.edge_arrays()
        return self.p[ei, ej].copy()


def weight_matrix(g: Graph, p, method, params=None) -> WeightMatrix:
    """Wrap a matrix as a WeightMatrix, computing rho and tau."""
    p = np.array(p, dtype=float)
    if p.shape != (g.m, g.m):
        raise ValueError(f"matrix shape {p.shape} does not match graph with m={g.m}")
    p.flags.writeable = False
    rho = convergence_factor(p)
    return WeightMatrix(p, method, g, dict(params or {}), rho, convergence_time(rho))


def _check_graph(g):
    if g.m < 2:
        raise ValueError("consensus weights need at least two agents")
    g.require_connected()


def kappa_weights(g: Graph, kappa=0.02) -> WeightMatrix:
    """Perron matrix ``I - (kappa / d_max) L``."""
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    _check_graph(g)
    p = np.eye(g.m) - (kappa / g.d_max) * laplacian(g)
    return weight_matrix(g, p, "kappa", {"kappa": kappa})


def best_constant_weights(g: Graph) -> WeightMatrix:
    """``I - alpha L`` with the optimal constant ``alpha = 2 / (lambda_1 + lambda_{M-1})``.

    ``lambda_1`` is the largest Laplacian eigenvalue and ``lambda_{M-1}`` the
    smallest nonzero one (the algebraic connectivity).
    """
    _check_graph(g)
    lap = laplacian(g)
    lam = sym_eigs(lap).eigenvalues
    alpha = 2.0 / (lam[0] + lam[-2])
    return weight_matrix(g, np.eye(g.m) - alpha * lap, "best_constant", {"alpha": alpha})


def max_degree_weights(g: Graph) -> WeightMatrix:
    _check_graph(g)
    alpha = 1.0 / g.d_max
    return weight_matrix(g, np.eye(g.m) - alpha * laplacian(g), "max_degree", {"alpha": alpha})


def local_degree_weights(g: Graph) -> WeightMatrix:
    """Edge weight ``1 / max(d_i, d_j)``; the diagonal absorbs the rest of each row."""
    _check_graph(g)
    d = g.degrees
    p = np.zeros((g.m, g.m))
    for i, j in g.edges:
        p[i, j] = p[j, i] = 1.0 / max(d[i], d[j])
    p[np.diag_indices(g.m)] = 1.0 - p.sum(axis=1)
    return weight_matrix(g, p, "local_degree")


@dataclass(frozen=True)
class ValidationReport:
    mode: str
    symmetry: float
    row_sum: float
    sparsity: float
    negativity: float
    tol: float = VALIDATION_TOL

    @property
    def passed(self) -> bool:
        worst = max(self.symmetry, self.row_sum, self.sparsity)
        if self.mode == "nonneg":
            worst = max(worst, self.negativity)
        return worst <= self.tol

    def __bool__(self):
        return self.passed


def validate(w: WeightMatrix, mode="nonneg") -> ValidationReport:
    """Measure how far ``w.p`` is from the feasible set of its problem.

    ``mode="nonneg"`` also requires every entry to be nonnegative (the
    Markov-chain case); ``mode="signed"`` allows negative weights.
    """
    if mode not in ("nonneg", "signed"):
        raise ValueError(f"unknown validation mode {mode!r}")
    p = np.asarray(w.p, dtype=float)
    adj = w.graph.adjacency.astype(bool) | np.eye(w.graph.m, dtype=bool)
    return ValidationReport(
        mode=mode,
        symmetry=float(np.max(np.abs(p - p.T))),
        row_sum=float(max(np.max(np.abs(p.sum(axis=1) - 1)), np.max(np.abs(p.sum(axis=0) - 1)))),
        sparsity=float(np.max(np.abs(np.where(adj, 0.0, p)))),
        negativity=float(max(0.0, -p.min())),
    )


def _fmt(x):
    return f"{x:.17g}"


def save_weights(w: WeightMatrix, path):
    """Write ``P`` as CSV preceded by a ``# method=... rho=... tau=...`` line."""
    meta = [f"method={w.method}"]
    meta += [f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in w.params.items()]
    meta.append(f"rho={_fmt(w.rho)}")
    meta.append(f"tau={'nonconvergent' if w.tau is None else _fmt(w.tau)}")
    lines = ["# " + " ".join(meta)]
    lines += [",".join(_fmt(x) for x in row) for row in w.p]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_META_RE = re.compile(r"(\w+)=(\S+)")


def read_weights_csv(path) -> tuple[np.ndarray, dict[str, str]]:
    """Return the matrix and the raw metadata fields of a weight CSV."""
    meta = {}
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            meta.update(_META_RE.findall(line))
        elif line.strip():
            rows.append([float(x) for x in line.split(",")])
    p = np.array(rows, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"{path}: weight matrix is not square")
    return p, meta


def load_weights(path, g: Graph) -> WeightMatrix:
    p, meta = read_weights_csv(path)
    method = meta.pop("method", "unknown")
    for k in ("rho", "tau"):
        meta.pop(k, None)
    params = {}
    for k, v in meta.items():
        try:
            params[k] = float(v)
        except ValueError:
            params[k] = v
    return weight_matrix(g, p, method, params)
