"""Truncated path representation of the Toeplitz algebra.

The path representation acts on ``l^2(Lambda)`` by ``T_mu h_lam = h_{mu lam}``
and ``Q_v h_lam = [r(lam) = v] h_lam``.  Here it is cut down to the span of
``{h_lam : d(lam) <= N}``: operators that would leave the span map to 0.  On
the *interior* ``d(lam) <= N - 2 b`` every product of generators of degree at
most ``b`` is computed exactly, so relation checks restricted to interior
columns are exact integer identities.

Every ``T_mu`` is a partial injection of basis indices, stored as an int
array ``map`` with ``map[j] = index of mu lam_j`` (or ``-1``).  Sparse
matrices are built from these maps on demand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse

from . import kms, spectral
from .errors import InteriorEmpty, PreconditionError, TooLarge
from .kgraph import KGraph, Path, add, degrees_upto, leq, sub, unit, unit_sum

MAX_BASIS = 200_000


@dataclass(eq=False)
class TruncatedSpace:
    """Basis ``{h_lam : d(lam) <= N}`` in degree-lexicographic order."""

    graph: KGraph
    N: tuple[int, ...]
    basis: tuple[Path, ...]
    index: dict
    deg: np.ndarray
    src: np.ndarray
    rng: np.ndarray
    _maps: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def interior(self, b) -> np.ndarray:
        """Boolean mask of ``d(lam) <= N - b``; raises when that set is empty."""
        top = np.asarray(self.N) - np.asarray(b)
        if np.any(top < 0):
            raise InteriorEmpty(f"cutoff {self.N} leaves no room for degree {tuple(b)}")
        return np.all(self.deg <= top, axis=1)


def space_size(g: KGraph, N) -> int:
    """``sum_{n <= N} sum_{v, w} A^n(v, w)``, in exact integers."""
    return int(sum(int(spectral.matrix_power(g, n).sum()) for n in degrees_upto(tuple(N))))


def build_space(g: KGraph, N, cap: int = MAX_BASIS) -> TruncatedSpace:
    N = tuple(int(x) for x in N)
    if len(N) != g.k or min(N) < 0:
        raise ValueError(f"N must be {g.k} non-negative ints")
    total = space_size(g, N)
    if total > cap:
        raise TooLarge(f"{total} basis paths exceed the cap of {cap}")
    basis = []
    for n in degrees_upto(N):
        basis.extend(sorted(g.enumerate_paths(n), key=Path.sort_key))
    index = {p: i for i, p in enumerate(basis)}
    deg = np.array([p.degree for p in basis], dtype=np.int64).reshape(len(basis), g.k)
    src = np.array([g.vertex_index[p.source] for p in basis], dtype=np.int64)
    rng = np.array([g.vertex_index[p.range] for p in basis], dtype=np.int64)
    return TruncatedSpace(g, N, tuple(basis), index, deg, src, rng)


def _edge_map(sp: TruncatedSpace, e: str) -> np.ndarray:
    g = sp.graph
    edge = g.path(e)
    cap = sub(sp.N, edge.degree)
    out = np.full(sp.size, -1, dtype=np.int64)
    for j, lam in enumerate(sp.basis):
        if lam.range == edge.source and leq(lam.degree, cap):
            out[j] = sp.index[g.compose(edge, lam)]
    return out


def shift_map(sp: TruncatedSpace, mu: Path) -> np.ndarray:
    """Index map of ``T_mu``: ``T_mu h_j = h_{map[j]}`` (or 0 when ``map[j] < 0``)."""
    hit = sp._maps.get(mu)
    if hit is not None:
        return hit
    if mu.is_vertex:
        v = sp.graph.vertex_index[mu.source]
        out = np.where(sp.rng == v, np.arange(sp.size), -1)
    else:
        out = np.arange(sp.size)
        # T_mu = T_{e_1} ... T_{e_n}: apply the last edge first
        for e in reversed(mu.edges):
            key = ("edge", e)
            em = sp._maps.get(key)
            if em is None:
                em = sp._maps[key] = _edge_map(sp, e)
            out = np.where(out >= 0, em[np.maximum(out, 0)], -1)
    sp._maps[mu] = out
    return out


def _from_map(size: int, mp: np.ndarray) -> sparse.csc_matrix:
    cols = np.flatnonzero(mp >= 0)
    return sparse.csc_matrix((np.ones(len(cols), dtype=np.int64), (mp[cols], cols)), shape=(size, size))


def op_T(sp: TruncatedSpace, mu: Path) -> sparse.csc_matrix:
    return _from_map(sp.size, shift_map(sp, mu))


def op_Q(sp: TruncatedSpace, v: str) -> sparse.csc_matrix:
    diag = (sp.rng == sp.graph.vertex_index[v]).astype(np.int64)
    return sparse.diags(diag, format="csc")


def op_pair(sp: TruncatedSpace, mu: Path, nu: Path) -> sparse.csc_matrix:
    """``T_mu T_nu^*``."""
    return (op_T(sp, mu) @ op_T(sp, nu).T).tocsc()


def range_projection(sp: TruncatedSpace, v: str, n) -> sparse.csc_matrix:
    """``sum_{lam in v Lambda^n} T_lam T_lam^*`` (a diagonal 0/1 matrix)."""
    diag = np.zeros(sp.size, dtype=np.int64)
    for lam in sp.graph.enumerate_paths(tuple(n), v=v):
        mp = shift_map(sp, lam)
        diag[mp[mp >= 0]] += 1
    return sparse.diags(diag, format="csc")


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

def _dev(X, cols_mask=None) -> float:
    """Largest absolute entry of ``X`` restricted to the masked columns."""
    X = sparse.csc_matrix(X)
    if cols_mask is not None:
        X = X @ sparse.diags(cols_mask.astype(X.dtype))
    X.eliminate_zeros()
    return float(abs(X).max()) if X.nnz else 0.0


def verify_relations(sp: TruncatedSpace, degree_bound) -> dict:
    """Check the Toeplitz-Cuntz-Krieger relations on interior columns.

    Returns the maximum deviation for each of ``T1 .. T5`` (all exactly 0 in
    a correct implementation), ``orthogonal_ranges``, and for the
    Cuntz-Krieger relation: ``CK_holds``, ``CK_defect_rank`` (the total rank
    of ``Q_v - sum T_lam T_lam^*`` seen on the interior) and
    ``CK_defect_vs_prediction``, the deviation of that defect from the
    projection onto ``{h_kappa : r(kappa) = v, d(kappa) not >= n}``.
    """
    g = sp.graph
    b = kms._bound(g, degree_bound)
    inner = sp.interior(tuple(2 * x for x in b))
    paths = g.paths_upto(b)
    out = {}

    # T1: Q_v = T_v, Q_v Q_w = delta_{v,w} Q_v, sum_v Q_v = 1
    dev = 0.0
    Q = {v: op_Q(sp, v) for v in g.vertices}
    for v in g.vertices:
        dev = max(dev, _dev(op_T(sp, g.vertex(v)) - Q[v], inner))
        for w in g.vertices:
            target = Q[v] if v == w else sparse.csc_matrix((sp.size, sp.size), dtype=np.int64)
            dev = max(dev, _dev(Q[v] @ Q[w] - target, inner))
    dev = max(dev, _dev(sum(Q.values()) - sparse.identity(sp.size, dtype=np.int64), inner))
    out["T1"] = dev

    # T2: T_lam T_mu = T_{lam mu}
    dev = 0.0
    for lam in paths:
        for mu in paths:
            if lam.source == mu.range:
                dev = max(dev, _dev(op_T(sp, lam) @ op_T(sp, mu) - op_T(sp, g.compose(lam, mu)), inner))
    out["T2"] = dev

    # T3: T_lam^* T_lam = Q_{s(lam)}
    out["T3"] = max(_dev(op_T(sp, lam).T @ op_T(sp, lam) - Q[lam.source], inner) for lam in paths)

    # T4 and (CK), for every n <= b and every generator e_i
    degrees = sorted(set(degrees_upto(b)) | {unit(g.k, i) for i in range(1, g.k + 1)})
    t4, ortho, ck_dev, ck_rank = 0.0, 0.0, 0.0, 0
    for n in degrees:
        for v in g.vertices:
            S = range_projection(sp, v, n)
            diag_S = S.diagonal()
            ortho = max(ortho, float(max(0, diag_S[inner].max(initial=0) - 1)))
            D = (Q[v] - S).diagonal()[inner]
            t4 = max(t4, float(max(0, -D.min(initial=0))), float(max(0, D.max(initial=0) - 1)))
            vi = g.vertex_index[v]
            predicted = ((sp.rng == vi) & ~np.all(sp.deg >= np.asarray(n), axis=1))[inner]
            ck_dev = max(ck_dev, float(np.max(np.abs(D - predicted), initial=0)))
            if any(n):
                ck_rank += int(D.sum())
    out["T4"] = t4
    out["orthogonal_ranges"] = ortho

    # T5: T_mu^* T_nu = sum_{Lambda^min(mu, nu)} T_eta T_zeta^*
    dev = 0.0
    for mu in paths:
        for nu in paths:
            lhs = op_T(sp, mu).T @ op_T(sp, nu)
            rhs = sparse.csc_matrix((sp.size, sp.size), dtype=np.int64)
            for eta, zeta in g.minimal_common_extensions(mu, nu):
                rhs = rhs + op_T(sp, eta) @ op_T(sp, zeta).T
            dev = max(dev, _dev(lhs - rhs, inner))
    out["T5"] = dev

    out["CK_holds"] = ck_rank == 0
    out["CK_defect_rank"] = ck_rank
    out["CK_defect_vs_prediction"] = ck_dev
    out["interior_size"] = int(inner.sum())
    return out


def inclusion_exclusion_check(sp: TruncatedSpace, v: str, K) -> tuple[float, bool]:
    """Compare ``prod_{i in K}(Q_v - q_i)`` with ``sum_{J subset K} (-1)^|J| q_J``.

    ``q_J = sum_{mu in v Lambda^{e_J}} T_mu T_mu^*``.  Returns the largest
    entrywise difference on interior columns and whether the product is a
    (diagonal 0/1) projection there.
    """
    g = sp.graph
    K = tuple(sorted(K))
    inner = sp.interior(unit_sum(g.k, K))
    Qv = op_Q(sp, v)
    prod = Qv.copy()
    for i in K:
        prod = prod @ (Qv - range_projection(sp, v, unit(g.k, i)))
    alt = sparse.csc_matrix((sp.size, sp.size), dtype=np.int64)
    for size in range(len(K) + 1):
        for J in itertools.combinations(K, size):
            alt = alt + (-1) ** size * range_projection(sp, v, unit_sum(g.k, J))
    dev = _dev(prod - alt, inner)
    P = sparse.csc_matrix(prod) @ sparse.diags(inner.astype(np.int64))
    is_proj = _dev(P @ P - P) == 0 and _dev(P - P.T) == 0
    diag = P.diagonal()
    is_proj = is_proj and bool(np.all((diag == 0) | (diag == 1)))
    return dev, is_proj


# ---------------------------------------------------------------------------
# the weighted trace
# ---------------------------------------------------------------------------

def tail_bound(g: KGraph, dyn, beta: float, eps, N) -> float:
    """Upper bound for ``sum_{d(lam) not <= N} e^{-beta r . d(lam)} eps_{s(lam)}``.

    Uses ``A^n eps <= (eps_max / x_min) rho^n x`` with the common eigenvector
    ``x``, then sums ``theta^n`` over ``n not <= N`` with
    ``theta_i = e^{-beta r_i} rho_i``.
    """
    r = kms._r(dyn)
    bad = spectral.precondition_violations(g, beta, r)
    if bad:
        raise spectral.SpectralPreconditionViolated(
            f"the weighted trace diverges: beta * r_i <= ln rho(A_i) for colours {bad}", bad)
    sd = spectral.common_pf_eigenvector(g)
    theta = np.exp(-beta * r) * np.asarray(sd.rho)
    full = np.prod(1 / (1 - theta))
    part = np.prod([(1 - t ** (n + 1)) / (1 - t) for t, n in zip(theta, N)])
    eps = np.asarray(eps, dtype=float)
    return float(eps.max() / np.min(sd.x) * max(full - part, 0.0))


def weights(sp: TruncatedSpace, dyn, beta: float, eps) -> np.ndarray:
    """``Delta_lam = e^{-beta r . d(lam)} eps_{s(lam)}`` over the basis."""
    r = kms._r(dyn)
    eps = np.asarray(eps, dtype=float)
    return np.exp(-beta * (sp.deg @ r)) * eps[sp.src]


def weighted_state(sp: TruncatedSpace, dyn, beta: float, eps, a) -> tuple[float, float]:
    """``sum_{d(lam) <= N} Delta_lam (a h_lam | h_lam)`` and the truncation tail bound.

    ``a`` is a sparse operator on the space or a pair ``(mu, nu)`` standing
    for ``T_mu T_nu^*``.  The bound covers operators of norm at most 1.
    """
    tb = tail_bound(sp.graph, dyn, beta, eps, sp.N)
    w = weights(sp, dyn, beta, eps)
    if isinstance(a, tuple):
        mu, nu = a
        pm, pn = shift_map(sp, mu), shift_map(sp, nu)
        hit = (pm >= 0) & (pm == pn)
        return float(w[pm[hit]].sum()), tb
    return float(w @ sparse.csr_matrix(a).diagonal()), tb


@dataclass(frozen=True)
class OperatorCheck:
    residual: float
    tail_bound: float
    bound: float
    telescoping: float
    cs_estimate: float
    cs_equal_norms: float
    interior_size: int

    @property
    def ok(self) -> bool:
        return (self.residual <= self.bound + kms.STRUCT_TOL
                and self.telescoping <= kms.STRUCT_TOL
                and self.cs_estimate <= kms.STRUCT_TOL
                and self.cs_equal_norms <= self.tail_bound + kms.STRUCT_TOL)


def kms_residual_operator_level(sp: TruncatedSpace, st: kms.StateSpec, dyn, beta: float,
                                degree_bound) -> OperatorCheck:
    """The KMS condition for the weighted trace built from ``st.eps``.

    For spanning elements ``a_i = T_mu T_nu^*`` with degrees at most ``b``
    the matrix ``M[i, j] = sum_lam Delta_lam (a_i a_j h_lam | h_lam)`` runs
    over ``d(lam) <= N - b``, where the truncation is invisible, so each
    entry is within the ``N - b`` tail bound of the exact value.  The
    residual ``max |M[i, j] - c_i M[j, i]|`` with
    ``c_i = e^{-beta r . (d(mu) - d(nu))}`` is reported with the bound
    ``tail(N - b) + tail(N - 2b)``: the error in ``M[i, j]`` lives on
    ``d(lam) not <= N - b``, and ``c_i`` times the error in ``M[j, i]`` is a
    sum of weights ``Delta_{tau kappa}`` with ``d(tau kappa) not <= N - 2b``.

    The telescoping identity and the Cauchy-Schwarz estimate for pairs with
    ``r . d(mu) = r . d(nu)`` are checked on the same weighted trace.
    """
    g = sp.graph
    b = kms._bound(g, degree_bound)
    inner = sp.interior(b)
    sp.interior(tuple(2 * x for x in b))
    r = kms._r(dyn)
    tb = tail_bound(g, dyn, beta, st.eps, sub(sp.N, b))
    tb2 = tail_bound(g, dyn, beta, st.eps, tuple(n - 2 * x for n, x in zip(sp.N, b)))
    w = weights(sp, dyn, beta, st.eps) * inner

    paths = g.paths_upto(b)
    pairs = [(mu, nu) for mu in paths for nu in paths if mu.source == nu.source]
    n, size = len(pairs), sp.size
    prow, pcol, pval, qrow, qcol = [], [], [], [], []
    for i, (mu, nu) in enumerate(pairs):
        pm, pn = shift_map(sp, mu), shift_map(sp, nu)
        # T_mu T_nu^* maps h_{pn[j]} to h_{pm[j]}
        j = np.flatnonzero((pm >= 0) & (pn >= 0))
        a, c = pm[j], pn[j]
        keep = w[a] != 0
        prow.append(np.full(keep.sum(), i))
        pcol.append(a[keep] * size + c[keep])
        pval.append(w[a[keep]])
        qrow.append(np.full(len(j), i))
        qcol.append(c * size + a)
    P = sparse.csr_matrix((np.concatenate(pval), (np.concatenate(prow), np.concatenate(pcol))),
                          shape=(n, size * size))
    Qm = sparse.csr_matrix((np.ones(sum(len(x) for x in qrow)),
                            (np.concatenate(qrow), np.concatenate(qcol))), shape=(n, size * size))
    M = (P @ Qm.T).tocsr()
    dshift = np.array([np.subtract(mu.degree, nu.degree) for mu, nu in pairs], dtype=float)
    c = np.exp(-beta * (dshift @ r))
    R = M - sparse.diags(c) @ M.T.tocsr()
    residual = float(abs(R).max()) if R.nnz else 0.0

    def value(mu, nu):
        return weighted_state(sp, dyn, beta, st.eps, (mu, nu))[0]

    sub_st = kms.StateSpec(g, tuple(r), beta, st.eps, st.m, st.kind)
    tele = kms.telescoping_defect(sub_st, b, value=value)

    cs, cs_eq = 0.0, 0.0
    for mu, nu in pairs:
        if abs(float(np.dot(r, mu.degree)) - float(np.dot(r, nu.degree))) > 1e-12:
            continue
        amu, anu, amn = value(mu, mu), value(nu, nu), value(mu, nu)
        cs = max(cs, abs(amn) - amu)
        cs_eq = max(cs_eq, abs(amu - anu))
    return OperatorCheck(residual, tb, tb + tb2, tele, max(cs, 0.0), cs_eq,
                         int(inner.sum()))


# ---------------------------------------------------------------------------
# ground states
# ---------------------------------------------------------------------------

def ground_condition_check(st: kms.StateSpec, dyn, degree_bound, ys=(1.0, 10.0, 100.0)) -> dict:
    """Check the ground-state characterisation of ``st`` up to ``degree_bound``.

    ``vanishing`` is the largest ``|phi(t_mu t_nu^*)|`` over pairs with
    ``r . d(mu) > 0`` or ``r . d(nu) > 0``; ``vertex`` the largest deviation
    of ``phi(q_v)`` from ``eps_v``.  For all spanning pairs the modulus
    ``e^{-y r . (d(mu) - d(nu))} |phi(t_sigma t_tau^* t_mu t_nu^*)|`` is
    evaluated at each ``y`` and must be non-increasing in ``y``.
    """
    if not st.is_ground:
        raise PreconditionError("ground_condition_check needs a ground or KMS_inf state")
    g = st.graph
    r = kms._r(dyn)
    b = kms._bound(g, degree_bound)
    paths = g.paths_upto(b)
    vanish, vertex = 0.0, 0.0
    for mu in paths:
        for nu in paths:
            if mu.source != nu.source:
                continue
            val = kms.evaluate_state(st, mu, nu)
            if float(np.dot(r, mu.degree)) > 0 or float(np.dot(r, nu.degree)) > 0:
                vanish = max(vanish, abs(val))
            elif mu == nu and mu.is_vertex:
                vertex = max(vertex, abs(val - st.eps[g.vertex_index[mu.source]]))
    M, sup = kms.product_matrix(st, b)
    M = M.tocoo()
    shift = sup.dshift @ r
    keep = M.data != 0
    cols, vals = M.col[keep], np.abs(M.data[keep])
    # row = (sigma, tau), col = (mu, nu)
    mods = np.array([np.exp(-y * shift[cols]) * vals for y in ys])
    monotone = bool(np.all(np.diff(mods, axis=0) <= 1e-15 * np.maximum(mods[:-1], 1)))
    return {"vanishing": vanish, "vertex": vertex, "surviving_pairs": int(keep.sum()),
            "modulus_nonincreasing": monotone,
            "max_modulus": [float(x.max(initial=0)) for x in mods],
            "passes": vanish == 0 and vertex <= kms.STRUCT_TOL and monotone}


def ground_modulus(g: KGraph, r, edge: str, y: float) -> float:
    """``|phi(t_e^* alpha_{iy}(t_e))|`` for the vector state at ``h_e``.

    ``alpha_{iy}(t_e) = e^{-y r . d(e)} t_e``; ``r`` may have any signs, which
    is the point: with a negative entry the modulus grows without bound.
    """
    e = g.path(edge)
    sp = build_space(g, tuple(2 * x for x in e.degree))
    h = np.zeros(sp.size)
    h[sp.index[e]] = 1.0
    Te = op_T(sp, e)
    val = float(h @ (Te.T @ (Te @ h)))
    return math.exp(-y * float(np.dot(np.asarray(r, dtype=float), e.degree))) * abs(val)


def vector_state_vanishing(g: KGraph, r, edge: str, degree_bound) -> float:
    """Largest ``|(T_mu T_nu^* h_e | h_e)|`` over pairs with ``r . d(mu) > 0`` or ``r . d(nu) > 0``."""
    e = g.path(edge)
    b = kms._bound(g, degree_bound)
    sp = build_space(g, add(e.degree, b))
    j = sp.index[e]
    worst = 0.0
    r = np.asarray(r, dtype=float)
    paths = g.paths_upto(b)
    for mu in paths:
        for nu in paths:
            if mu.source != nu.source:
                continue
            if float(r @ mu.degree) > 0 or float(r @ nu.degree) > 0:
                pm, pn = shift_map(sp, mu), shift_map(sp, nu)
                worst = max(worst, float(np.sum((pm == j) & (pn == j))))
    return worst


def verification_report(sp: TruncatedSpace, st: kms.StateSpec, dyn, beta: float, degree_bound) -> dict:
    """``{relation: max_dev}`` plus the operator-level KMS residual and its bound."""
    rel = verify_relations(sp, degree_bound)
    chk = kms_residual_operator_level(sp, st, dyn, beta, degree_bound)
    rel.update({"kms_residual": chk.residual, "tail_bound": chk.tail_bound,
                "kms_bound": chk.bound, "telescoping": chk.telescoping,
                "cs_estimate": chk.cs_estimate, "operator_check_ok": chk.ok})
    return rel

