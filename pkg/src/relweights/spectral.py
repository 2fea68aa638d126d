"""Symmetric eigensolver (cyclic Jacobi) and consensus convergence metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = ["Spectrum", "sym_eigs", "convergence_factor", "convergence_time"]

SYMMETRY_TOL = 1e-12
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
NONCONVERGENT_TOL = 1e-12


@njit(cache=True)
def jacobi_eig(a, rel_tol, max_sweeps):
    """Cyclic Jacobi rotations on a symmetric matrix.

    Returns the unsorted eigenvalues (the final diagonal) and the matrix of
    eigenvectors as columns, in the order the rotations leave them.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j] * a[i, j]
    scale = math.sqrt(total)
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if math.sqrt(off) < rel_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, v


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending, with optional matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _check_symmetric(s, tol):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    asym = np.max(np.abs(s - s.T)) if s.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is not symmetric (max |S - S^T| = {asym:.3g})")
    return 0.5 * (s + s.T)


def sym_eigs(s, want_vectors=False) -> Spectrum:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Ties keep the Jacobi ordering (stable sort).
    """
    s = _check_symmetric(s, SYMMETRY_TOL)
    vals, vecs = jacobi_eig(np.ascontiguousarray(s), JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    return Spectrum(vals, vecs[:, order] if want_vectors else None)


def _as_matrix(p):
    return np.asarray(getattr(p, "p", p), dtype=float)


def convergence_factor(p, tol=1e-9) -> float:
    """Spectral radius of ``P - (1/M) 11^T`` for a symmetric stochastic ``P``.

    Accepts a bare matrix or anything with a ``.p`` matrix attribute.
    """
    p = _as_matrix(p)
    p = _check_symmetric(p, tol)
    m = p.shape[0]
    row_err = np.max(np.abs(p.sum(axis=1) - 1.0))
    if row_err > tol:
        raise ValueError(f"rows do not sum to 1 (max error {row_err:.3g})")
    lam = sym_eigs(p - np.full((m, m), 1.0 / m)).eigenvalues
    return float(max(abs(lam[0]), abs(lam[-1])))


def convergence_time(rho):
    """``1 / ln(1/rho)``.

    Returns ``0.0`` for ``rho == 0`` and ``None`` when ``rho >= 1``, since the
    iteration then does not converge and there is no finite time to report.
    Values within ``NONCONVERGENT_TOL`` of 1 count as 1: eigenvalue rounding
    turns an exact 1 (e.g. a periodic two-node chain) into ``1 - 2e-16``.
    """
    if rho < 0:
        raise ValueError("convergence factor cannot be negative")
    if rho == 0:
        return 0.0
    if rho >= 1 - NONCONVERGENT_TOL:
        return None
    return -1.0 / math.log(rho)
