"""Fastest-mixing (FMMC) and fastest-averaging (FDLA) edge-weight optimization.

Both problems minimize the spectral norm of ``P(w) - (1/M) 11^T`` over
edge weights ``w``, where ``P(w) = I - B diag(w) B^T`` and ``B`` is the
oriented incidence matrix. The parametrization makes ``P`` symmetric with
unit row sums and the graph's sparsity pattern for every ``w``. FMMC adds
``w >= 0`` and ``sum of w over the edges at each vertex <= 1`` (nonnegative
diagonal).

The solver runs in two phases, both driven only by subgradients of the
spectral norm (taken from an extreme eigenvector):

1. projected subgradient descent with normalized steps ``a / sqrt(t)``,
   starting from the maximum-degree weights and keeping the best iterate;
2. a deep-cut ellipsoid refinement started from a ball that provably
   contains the optimum. Each objective cut also yields a lower bound on
   the optimum, so the run stops once the certified gap is below ``tol``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph
from .spectral import JACOBI_MAX_SWEEPS, JACOBI_REL_TOL, jacobi_eig
from .weights import WeightMatrix, weight_matrix

__all__ = [
    "SolveOptions",
    "SolveResult",
    "objective_and_subgradient",
    "project_feasible",
    "solve_fmmc",
    "solve_fdla",
]

log = logging.getLogger(__name__)

TIE_TOL = 1e-12
DYKSTRA_TOL = 1e-12
DYKSTRA_MAX_CYCLES = 500


@dataclass(frozen=True)
class SolveOptions:
    """Solver settings.

    ``step_scale`` is the ``a`` of the diminishing step ``a / sqrt(t)``.
    ``refine_max_iters=None`` picks an ellipsoid budget that grows with the
    square of the number of edges. ``seed`` is accepted for interface
    stability; both phases are deterministic and draw no random numbers.
    """

    max_iters: int = 50_000
    step_scale: float = 1.0
    tol: float = 1e-6
    seed: int = 0
    record_trace: bool = False
    refine: bool = True
    refine_max_iters: int | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.refine_max_iters is not None and self.refine_max_iters < 0:
            raise ValueError("refine_max_iters must be >= 0")


@dataclass(frozen=True)
class SolveResult:
    weights: WeightMatrix
    best_objective: float
    iterations_used: int
    lower_bound: float
    converged: bool
    objective_trace: list[tuple[int, float]] | None = None

    @property
    def gap(self) -> float:
        return self.best_objective - self.lower_bound


@njit(cache=True)
def _consensus_minus_average(w, ei, ej, m):
    a = np.full((m, m), -1.0 / m)
    for i in range(m):
        a[i, i] += 1.0
    for k in range(w.shape[0]):
        i = ei[k]
        j = ej[k]
        a[i, i] -= w[k]
        a[j, j] -= w[k]
        a[i, j] += w[k]
        a[j, i] += w[k]
    return a


@njit(cache=True)
def _objective(w, ei, ej, m):
    a = _consensus_minus_average(w, ei, ej, m)
    vals, vecs = jacobi_eig(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    lmax = vals.max()
    lmin = vals.min()
    # first index (Jacobi order) within TIE_TOL of each extreme
    imax = 0
    for k in range(m):
        if vals[k] >= lmax - TIE_TOL:
            imax = k
            break
    imin = 0
    for k in range(m):
        if vals[k] <= lmin + TIE_TOL:
            imin = k
            break
    n = w.shape[0]
    g = np.empty(n)
    if lmax >= -lmin - TIE_TOL:
        u = vecs[:, imax]
        sign = -1.0
    else:
        u = vecs[:, imin]
        sign = 1.0
    for k in range(n):
        d = u[ei[k]] - u[ej[k]]
        g[k] = sign * d * d
    return max(lmax, -lmin), g


def _incidence_lists(g: Graph):
    """CSR layout of the edges incident to each vertex."""
    ptr = np.zeros(g.m + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(g.degrees)
    idx = np.empty(2 * g.n_edges, dtype=np.int64)
    fill = ptr[:-1].copy()
    for k, (i, j) in enumerate(g.edges):
        idx[fill[i]] = k
        fill[i] += 1
        idx[fill[j]] = k
        fill[j] += 1
    return ptr, idx


@njit(cache=True)
def _dykstra(w, ptr, idx, tol, max_cycles):
    n = w.shape[0]
    m = ptr.shape[0] - 1
    x = w.copy()
    y = np.zeros((m + 1, n))
    for _ in range(max_cycles):
        x0 = x.copy()
        # nonnegative orthant
        for k in range(n):
            z = x[k] + y[0, k]
            x[k] = z if z > 0.0 else 0.0
            y[0, k] = z - x[k]
        # one half-space per vertex: sum of incident weights <= 1
        for i in range(m):
            lo = ptr[i]
            hi = ptr[i + 1]
            s = 0.0
            for q in range(lo, hi):
                k = idx[q]
                s += x[k] + y[i + 1, k]
            shift = (s - 1.0) / (hi - lo) if (s > 1.0 and hi > lo) else 0.0
            for q in range(lo, hi):
                k = idx[q]
                z = x[k] + y[i + 1, k]
                x[k] = z - shift
                y[i + 1, k] = shift
        move = 0.0
        for k in range(n):
            move += (x[k] - x0[k]) ** 2
        if math.sqrt(move) < tol:
            break
    return x


@njit(cache=True)
def _max_violation(w, ptr, idx):
    """Largest FMMC constraint violation and its cut normal."""
    n = w.shape[0]
    m = ptr.shape[0] - 1
    worst = 0.0
    normal = np.zeros(n)
    which = -1
    for k in range(n):
        if -w[k] > worst:
            worst = -w[k]
            which = k
    vertex = -1
    for i in range(m):
        s = 0.0
        for q in range(ptr[i], ptr[i + 1]):
            s += w[idx[q]]
        if s - 1.0 > worst:
            worst = s - 1.0
            vertex = i
    if vertex >= 0:
        for q in range(ptr[vertex], ptr[vertex + 1]):
            normal[idx[q]] = 1.0
    elif which >= 0:
        normal[which] = -1.0
    return worst, normal


@njit(cache=True)
def _subgradient_phase(w0, ei, ej, m, nonneg, ptr, idx, max_iters, a, trace):
    w = w0.copy()
    best_w = w0.copy()
    best_f = np.inf
    used = 0
    for t in range(1, max_iters + 1):
        f, g = _objective(w, ei, ej, m)
        used = t
        if f < best_f:
            best_f = f
            best_w[:] = w
        trace[t - 1] = best_f
        gn = math.sqrt(np.sum(g * g))
        if gn == 0.0:
            break
        w = w - (a / math.sqrt(t)) * g / gn
        if nonneg:
            w = _dykstra(w, ptr, idx, DYKSTRA_TOL, DYKSTRA_MAX_CYCLES)
    return best_w, best_f, used


@njit(cache=True)
def _ellipsoid_phase(best_w, best_f, ei, ej, m, nonneg, ptr, idx, max_iters, tol, trace):
    n = best_w.shape[0]
    best_w = best_w.copy()
    # every w with objective <= best_f has |w_l - 1/m| <= best_f, because
    # P_ij - 1/m is an entry of a matrix whose spectral norm is the objective
    radius = best_f * math.sqrt(n) * (1.0 + 1e-9) + 1e-300
    c = np.full(n, 1.0 / m)
    q = np.eye(n) * radius * radius
    lower = 0.0
    used = 0
    ok = True
    for k in range(max_iters):
        used = k + 1
        depth = 0.0
        is_cut_objective = True
        if nonneg:
            viol, normal = _max_violation(c, ptr, idx)
            if viol > 0.0:
                is_cut_objective = False
                a = normal
                depth = viol
        if is_cut_objective:
            f, a = _objective(c, ei, ej, m)
            if f < best_f:
                best_f = f
                best_w[:] = c
            depth = f - best_f
        qa = q @ a
        aqa = a @ qa
        if aqa <= 0.0:
            if is_cut_objective:
                # zero subgradient: the center is optimal
                lower = best_f
            else:
                ok = False
            trace[k] = best_f
            break
        s = math.sqrt(aqa)
        if is_cut_objective:
            lower = max(lower, f - s)
        trace[k] = best_f
        if best_f - lower <= tol:
            break
        alpha = depth / s
        if alpha >= 1.0:
            if not is_cut_objective:
                ok = False
            break
        b = qa / s
        if n == 1:
            c = c - 0.5 * (1.0 + alpha) * b
            q = q * (0.25 * (1.0 - alpha) ** 2)
        else:
            c = c - (1.0 + n * alpha) / (n + 1.0) * b
            coef = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha))
            q = (n * n / (n * n - 1.0)) * (1.0 - alpha * alpha) * (q - coef * np.outer(b, b))
            q = 0.5 * (q + q.T)
    return best_w, best_f, lower, used, ok


def _check_weights(w, g):
    w = np.asarray(w, dtype=float)
    if w.shape != (g.n_edges,):
        raise ValueError(f"expected {g.n_edges} edge weights, got shape {w.shape}")
    return np.ascontiguousarray(w)


def objective_and_subgradient(w, g: Graph) -> tuple[float, np.ndarray]:
    """Spectral norm of ``P(w) - J`` and one subgradient with respect to ``w``.

    The subgradient comes from the eigenvector of whichever extreme
    eigenvalue attains the norm (the largest one on a tie).
    """
    g.require_connected()
    w = _check_weights(w, g)
    ei, ej = g.edge_arrays()
    value, grad = _objective(w, ei, ej, g.m)
    return float(value), grad


def project_feasible(w, g: Graph) -> np.ndarray:
    """Euclidean projection onto ``{w >= 0, sum of incident w <= 1 at every vertex}``.

    Uses Dykstra's alternating projections over the orthant and the
    per-vertex half-spaces.
    """
    w = _check_weights(w, g)
    ptr, idx = _incidence_lists(g)
    return _dykstra(w, ptr, idx, DYKSTRA_TOL, DYKSTRA_MAX_CYCLES)


def matrix_from_edge_weights(w, g: Graph) -> np.ndarray:
    """``P(w) = I - B diag(w) B^T``."""
    w = _check_weights(w, g)
    p = np.eye(g.m)
    for k, (i, j) in enumerate(g.edges):
        p[i, i] -= w[k]
        p[j, j] -= w[k]
        p[i, j] += w[k]
        p[j, i] += w[k]
    return p


def _solve(g: Graph, opts: SolveOptions | None, nonneg: bool) -> SolveResult:
    opts = opts or SolveOptions()
    if g.m < 2:
        raise ValueError("need at least two agents")
    g.require_connected()
    method = "fmmc" if nonneg else "fdla"
    ei, ej = g.edge_arrays()
    ptr, idx = _incidence_lists(g)
    n = g.n_edges

    w0 = np.full(n, 1.0 / g.d_max)
    trace1 = np.empty(opts.max_iters)
    best_w, best_f, used1 = _subgradient_phase(
        w0, ei, ej, g.m, nonneg, ptr, idx, opts.max_iters, float(opts.step_scale), trace1
    )
    trace = [trace1[:used1]]
    lower, used2, ok = 0.0, 0, True
    if opts.refine:
        budget = opts.refine_max_iters
        if budget is None:
            budget = 60 * n * (n + 1) + 2000
        trace2 = np.empty(max(budget, 1))
        best_w, best_f, lower, used2, ok = _ellipsoid_phase(
            best_w, best_f, ei, ej, g.m, nonneg, ptr, idx, budget, float(opts.tol), trace2
        )
        trace.append(trace2[:used2])

    p = matrix_from_edge_weights(best_w, g)
    params = {"iterations": used1 + used2}
    wm = weight_matrix(g, p, method, params)
    converged = ok and opts.refine and (wm.rho - lower) <= opts.tol
    if not converged:
        log.warning(
            "%s did not certify a gap below %g (best %.6g, lower bound %.6g)",
            method, opts.tol, wm.rho, lower,
        )
    objective_trace = None
    if opts.record_trace:
        values = np.concatenate(trace)
        objective_trace = [(t + 1, float(v)) for t, v in enumerate(values)]
    return SolveResult(wm, wm.rho, used1 + used2, float(lower), bool(converged), objective_trace)


def solve_fdla(g: Graph, opts: SolveOptions | None = None) -> SolveResult:
    """Fastest distributed linear averaging weights (negative weights allowed)."""
    return _solve(g, opts, nonneg=False)


def solve_fmmc(g: Graph, opts: SolveOptions | None = None) -> SolveResult:
    """Fastest mixing Markov chain weights (nonnegative ``P``)."""
    return _solve(g, opts, nonneg=True)
