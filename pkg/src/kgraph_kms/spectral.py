"""Vertex matrices and their Perron-Frobenius data.

Counts (vertex matrices and their products) are exact integers; spectral
quantities are floats.  Spectral functions refuse reducible input rather than
fall back to a general eigen-solver.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .errors import (
    InvariantBreach,
    NotCoordinatewiseIrreducible,
    NotIrreducible,
    SpectralPreconditionViolated,
)
from .kgraph import KGraph

DEFAULT_TOL = 1e-12
MAX_ITER = 100_000
# beta r_i must clear ln rho(A_i) by this much to count as strictly above
CRITICAL_MARGIN = 1e-9


@dataclass(frozen=True)
class VertexMatrix:
    """``entries[v, w]`` is the number of edges of ``color`` from ``w`` to ``v``."""

    color: int
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class SpectralData:
    rho: tuple[float, ...]
    x: np.ndarray
    irreducible_flags: tuple[bool, ...]
    residuals: tuple[float, ...]

    @property
    def log_rho(self) -> np.ndarray:
        return np.log(np.asarray(self.rho))


def _entries(A) -> np.ndarray:
    if isinstance(A, VertexMatrix):
        return A.entries
    return np.asarray(A)


def vertex_matrix(g: KGraph, i: int) -> VertexMatrix:
    """Vertex matrix of colour ``i`` (1-based)."""
    n = len(g.vertices)
    A = np.zeros((n, n), dtype=np.int64)
    for e in g.edges:
        if e.color == i:
            A[g.vertex_index[e.range], g.vertex_index[e.source]] += 1
    return VertexMatrix(i, A)


def vertex_matrices(g: KGraph) -> list[VertexMatrix]:
    return [vertex_matrix(g, i) for i in range(1, g.k + 1)]


def check_commuting(g: KGraph) -> bool:
    """True when all vertex matrices commute exactly; raises otherwise."""
    mats = [A.entries.astype(object) for A in vertex_matrices(g)]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not np.array_equal(mats[i].dot(mats[j]), mats[j].dot(mats[i])):
                raise InvariantBreach(f"A_{i + 1} A_{j + 1} != A_{j + 1} A_{i + 1}")
    return True


def matrix_power(g: KGraph, n) -> np.ndarray:
    """``A^n = prod_i A_i^{n_i}`` with Python-int entries (object dtype)."""
    size = len(g.vertices)
    out = np.identity(size, dtype=np.int64).astype(object)
    for A, p in zip(vertex_matrices(g), n):
        base = A.entries.astype(object)
        for _ in range(p):
            out = out.dot(base)
    return out


def is_irreducible(A) -> bool:
    """Strong connectivity of the digraph with an arc ``w -> v`` when ``A[v, w] > 0``."""
    M = _entries(A)
    if M.shape[0] == 1:
        return True
    ncomp, _ = connected_components(M > 0, directed=True, connection="strong")
    return ncomp == 1


@lru_cache(maxsize=256)
def _perron_cached(key, n, tol, maxiter):
    A = np.array(key, dtype=float).reshape(n, n)
    B = A + np.eye(n)
    x = np.full(n, 1.0 / n)
    q_prev = np.inf
    for _ in range(maxiter):
        y = B @ x
        q = y.sum()
        y /= q
        if abs(q - q_prev) < tol and np.max(np.abs(y - x)) < tol:
            x = y
            break
        x, q_prev = y, q
    else:
        raise InvariantBreach(f"power iteration did not converge in {maxiter} steps")
    rho = float((A @ x).sum())
    x.setflags(write=False)
    return rho, x


def _perron(A, tol=DEFAULT_TOL, maxiter=MAX_ITER):
    M = _entries(A)
    if not is_irreducible(M):
        raise NotIrreducible("matrix is reducible")
    return _perron_cached(tuple(M.ravel().tolist()), M.shape[0], tol, maxiter)


def spectral_radius(A, tol: float = DEFAULT_TOL, maxiter: int = MAX_ITER) -> float:
    """Spectral radius of an irreducible non-negative matrix.

    Power iteration on ``A + I``, which is primitive whenever ``A`` is
    irreducible, with the l1-normalised iterate; stops once both the growth
    factor and the iterate change by less than ``tol``.
    """
    return _perron(A, tol, maxiter)[0]


def pf_eigenvector(A, tol: float = DEFAULT_TOL, maxiter: int = MAX_ITER) -> np.ndarray:
    """The positive eigenvector of an irreducible matrix with entries summing to 1."""
    return _perron(A, tol, maxiter)[1].copy()


def collatz_wielandt(A, m) -> float:
    """``max_v (A m)_v / m_v`` for a strictly positive vector ``m``.

    This is an upper bound for the spectral radius of ``A``.
    """
    M = np.asarray(_entries(A), dtype=float)
    m = np.asarray(m, dtype=float)
    return float(np.max((M @ m) / m))


@lru_cache(maxsize=128)
def common_pf_eigenvector(g: KGraph, tol: float = DEFAULT_TOL) -> SpectralData:
    """Spectral radii and the shared unimodular Perron-Frobenius eigenvector.

    ``x`` is computed from ``A_1``; the residual ``||A_i x - rho_i x||_inf``
    is reported for every colour.
    """
    mats = vertex_matrices(g)
    flags = tuple(is_irreducible(A) for A in mats)
    if not all(flags):
        bad = [i + 1 for i, ok in enumerate(flags) if not ok]
        raise NotCoordinatewiseIrreducible(f"reducible vertex matrices for colours {bad}", bad)
    x = pf_eigenvector(mats[0], tol)
    rho, res = [], []
    for A in mats:
        r_i = spectral_radius(A, tol)
        rho.append(r_i)
        res.append(float(np.max(np.abs(A.entries @ x - r_i * x))))
    x.setflags(write=False)
    return SpectralData(tuple(rho), x, flags, tuple(res))


def spectral_radii(g: KGraph) -> tuple[float, ...]:
    return common_pf_eigenvector(g).rho


def precondition_violations(g: KGraph, beta: float, r, margin: float = CRITICAL_MARGIN) -> list[int]:
    """Colours with ``beta r_i <= ln rho(A_i) + margin``."""
    rho = spectral_radii(g)
    return [i + 1 for i in range(g.k) if not beta * r[i] > math.log(rho[i]) + margin]


def resolvent_product(g: KGraph, beta: float, r) -> np.ndarray:
    """``prod_i (I - e^{-beta r_i} A_i)^{-1}`` via one LU solve per colour."""
    r = tuple(float(x) for x in r)
    if len(r) != g.k:
        raise ValueError(f"r must have {g.k} entries")
    bad = precondition_violations(g, beta, r)
    if bad:
        raise SpectralPreconditionViolated(
            f"beta * r_i <= ln rho(A_i) for colours {bad}", bad)
    n = len(g.vertices)
    I = np.eye(n)
    M = I.copy()
    for A, ri in zip(vertex_matrices(g), r):
        lu = scipy.linalg.lu_factor(I - math.exp(-beta * ri) * A.entries)
        M = scipy.linalg.lu_solve(lu, M)
    return M


def spectral_report(g: KGraph) -> list[dict]:
    """Per-colour ``{color, entries, irreducible, rho, residual}`` records.

    ``rho`` and ``residual`` are None for reducible colours; the residual is
    measured against the eigenvector of ``A_1`` when the graph is
    coordinatewise irreducible, else against the colour's own eigenvector.
    """
    mats = vertex_matrices(g)
    try:
        common = common_pf_eigenvector(g).x
    except NotCoordinatewiseIrreducible:
        common = None
    out = []
    for A in mats:
        rec = {"color": A.color, "entries": A.entries.tolist(), "irreducible": is_irreducible(A),
               "rho": None, "residual": None}
        if rec["irreducible"]:
            rho = spectral_radius(A)
            x = common if common is not None else pf_eigenvector(A)
            rec["rho"] = rho
            rec["residual"] = float(np.max(np.abs(A.entries @ x - rho * x)))
        out.append(rec)
    return out


def matrix_csv(g: KGraph, A: VertexMatrix) -> str:
    """CSV with a header row of vertex ids and one row per range vertex."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"A{A.color}", *g.vertices])
    for v, row in zip(g.vertices, A.entries.tolist()):
        w.writerow([v, *row])
    return buf.getvalue()
