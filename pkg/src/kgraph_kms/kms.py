"""KMS states of the gauge dynamics on the Toeplitz algebra of a k-graph.

A dynamics is given by ``r in (0, inf)^k``: the generator ``t_lambda`` picks
up the phase ``e^{i t r . d(lambda)}``.  At inverse temperature ``beta`` with
``beta r_i > ln rho(A_i)`` for every colour, the KMS states are parametrised
by the simplex ``{eps >= 0 : eps . y = 1}`` through ``m = R eps``, where
``R = prod_i (I - e^{-beta r_i} A_i)^{-1}``, and they act by

    phi(t_mu t_nu^*) = delta_{mu, nu} e^{-beta r . d(mu)} m_{s(mu)}.

All states built here are diagonal in this sense, which is what lets
:func:`verify_kms_condition` sweep every spanning pair cheaply.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sparse

from . import spectral
from .errors import (
    InvalidDynamics,
    InvariantBreach,
    NegativeEps,
    NotAProbability,
    NotNormalized,
    PreconditionError,
    SpectralPreconditionViolated,
)
from .kgraph import KGraph, Path, leq

STRUCT_TOL = 1e-10
LIMIT_TOL = 1e-6
TEMP_TOL = 1e-9
WITNESS_TOL = 1e-9


class Infinity(enum.Enum):
    """The inverse temperature ``beta = inf``."""

    INF = "inf"

    def __str__(self):
        return "inf"


INF = Infinity.INF


class Kind(str, enum.Enum):
    TOEPLITZ = "ToeplitzKMS"
    CUNTZ_KRIEGER = "CuntzKriegerKMS"
    GROUND = "Ground"
    KMS_INFINITY = "KMSInfinity"


class Regime(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    MIXED = "Mixed"


@dataclass(frozen=True)
class Dynamics:
    """``alpha_t = gamma_{e^{itr}}``; ``preferred`` marks ``r = ln rho``."""

    r: tuple[float, ...]
    preferred: bool = False

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        object.__setattr__(self, "r", r)
        bad = [i + 1 for i, x in enumerate(r) if not (math.isfinite(x) and x > 0)]
        if bad:
            raise InvalidDynamics(f"r must be finite and positive; colours {bad} are not")

    @classmethod
    def preferred_for(cls, g: KGraph) -> "Dynamics":
        rho = spectral.spectral_radii(g)
        bad = [i + 1 for i, x in enumerate(rho) if x <= 1 + STRUCT_TOL]
        if bad:
            raise InvalidDynamics(
                f"preferred dynamics needs rho(A_i) > 1; colours {bad} have rho = 1")
        return cls(tuple(math.log(x) for x in rho), preferred=True)

    def __len__(self):
        return len(self.r)


def _r(dyn) -> np.ndarray:
    return np.asarray(dyn.r if isinstance(dyn, Dynamics) else dyn, dtype=float)


@dataclass(frozen=True)
class TemperatureReport:
    regime: Regime
    beta_c: tuple[float, ...]
    gaps: tuple[float, ...]  # beta r_i - ln rho(A_i)


def classify_temperature(g: KGraph, dyn: Dynamics, beta, tol: float = TEMP_TOL) -> TemperatureReport:
    """Compare ``beta r_i`` with ``ln rho(A_i)`` colour by colour.

    Critical when every gap is within ``tol`` of zero, subcritical when every
    gap exceeds ``tol``, mixed otherwise.  ``beta = INF`` is subcritical.
    """
    logs = np.log(spectral.spectral_radii(g))
    r = _r(dyn)
    beta_c = tuple(float(x) for x in logs / r)
    if beta is INF:
        return TemperatureReport(Regime.SUBCRITICAL, beta_c, (math.inf,) * g.k)
    gaps = beta * r - logs
    if np.all(np.abs(gaps) <= tol):
        regime = Regime.CRITICAL
    elif np.all(gaps > tol):
        regime = Regime.SUBCRITICAL
    else:
        regime = Regime.MIXED
    return TemperatureReport(regime, beta_c, tuple(float(x) for x in gaps))


def _require_subcritical(g, dyn, beta):
    rep = classify_temperature(g, dyn, beta)
    if rep.regime is not Regime.SUBCRITICAL:
        bad = [i + 1 for i, gap in enumerate(rep.gaps) if not gap > TEMP_TOL]
        raise SpectralPreconditionViolated(
            f"beta = {beta} is not subcritical ({rep.regime.value}): "
            f"beta r_i <= ln rho(A_i) for colours {bad}", bad)


def resolvent(g: KGraph, dyn: Dynamics, beta) -> np.ndarray:
    if beta is INF:
        return np.eye(len(g.vertices))
    _require_subcritical(g, dyn, beta)
    return spectral.resolvent_product(g, beta, _r(dyn))


def y_vector(g: KGraph, dyn: Dynamics, beta) -> np.ndarray:
    """``y_v = sum_{mu in Lambda v} e^{-beta r . d(mu)}``, the column sums of the resolvent."""
    y = resolvent(g, dyn, beta).sum(axis=0)
    if np.any(y < 1 - STRUCT_TOL):
        raise InvariantBreach(f"y has an entry below 1: {y}")
    return y


@dataclass(frozen=True, eq=False)
class StateSpec:
    """A diagonal state on the Toeplitz algebra.

    For the KMS kinds ``m`` holds ``phi(q_v)`` and ``eps`` the simplex
    coordinate; for the ground kinds ``eps = m`` is the vertex measure.
    ``vertex_shift`` is added to ``phi(q_v)`` only (not to longer paths); it
    exists to build negative controls and is None for every genuine state.
    """

    graph: KGraph
    r: tuple[float, ...]
    beta: float | Infinity
    eps: np.ndarray
    m: np.ndarray
    kind: Kind
    independence: object = None
    unique: bool | None = None
    vertex_shift: np.ndarray | None = field(default=None)

    @property
    def is_ground(self) -> bool:
        return self.kind in (Kind.GROUND, Kind.KMS_INFINITY)

    def perturbed(self, shift) -> "StateSpec":
        """A copy whose vertex projections are moved by ``shift``."""
        shift = np.asarray(shift, dtype=float)
        return StateSpec(self.graph, self.r, self.beta, self.eps, self.m, self.kind,
                         self.independence, self.unique, shift)


def _vector(g: KGraph, v, name="eps") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (len(g.vertices),):
        raise ValueError(f"{name} must have one entry per vertex ({len(g.vertices)})")
    return v


def is_cuntz_krieger(g: KGraph, dyn: Dynamics, beta, m, tol: float = STRUCT_TOL) -> bool:
    """True when ``A_i m = e^{beta r_i} m`` for every colour."""
    if beta is INF:
        return False
    m = np.asarray(m, dtype=float)
    for A, ri in zip(spectral.vertex_matrices(g), _r(dyn)):
        if np.max(np.abs(A.entries @ m - math.exp(beta * ri) * m)) > tol:
            return False
    return True


def kms_state_from_eps(g: KGraph, dyn: Dynamics, beta, eps, rescale: bool = False,
                       tol: float = STRUCT_TOL) -> StateSpec:
    """The KMS state ``phi_eps`` with ``m = R eps``.

    ``eps`` must be non-negative with ``eps . y = 1``; with ``rescale=True``
    a non-zero ``eps`` is divided by ``eps . y`` instead of being refused.
    """
    eps = _vector(g, eps)
    if np.any(eps < 0):
        raise NegativeEps(f"eps has negative entries: {eps.tolist()}")
    R = resolvent(g, dyn, beta)
    y = R.sum(axis=0)
    s = float(eps @ y)
    if abs(s - 1) > tol:
        if not rescale or s == 0:
            raise NotNormalized(f"eps . y = {s!r}, expected 1")
        eps = eps / s
    m = R @ eps
    if abs(m.sum() - 1) > tol:
        raise InvariantBreach(f"m sums to {m.sum()!r}, not 1")
    kind = Kind.CUNTZ_KRIEGER if is_cuntz_krieger(g, dyn, beta, m) else Kind.TOEPLITZ
    return StateSpec(g, tuple(_r(dyn).tolist()), beta, eps, m, kind)


def eps_from_state(g: KGraph, dyn: Dynamics, beta, m) -> np.ndarray:
    """``prod_i (I - e^{-beta r_i} A_i) m``.

    Negative entries mean ``m`` is not subinvariant; they are returned, not
    raised.
    """
    m = _vector(g, m, "m")
    if np.any(m < 0) or abs(m.sum() - 1) > STRUCT_TOL:
        raise NotAProbability("m must be a probability vector")
    if beta is INF:
        return m.copy()
    out = m
    for A, ri in zip(spectral.vertex_matrices(g), _r(dyn)):
        out = out - math.exp(-beta * ri) * (A.entries @ out)
    return out


def subinvariance_products(g: KGraph, dyn: Dynamics, beta, m) -> dict[tuple[int, ...], np.ndarray]:
    """``prod_{i in K} (I - e^{-beta r_i} A_i) m`` for every subset ``K`` of colours."""
    m = np.asarray(m, dtype=float)
    mats = spectral.vertex_matrices(g)
    r = _r(dyn)
    out = {}
    for size in range(g.k + 1):
        for K in itertools.combinations(range(1, g.k + 1), size):
            v = m
            for i in K:
                v = v - math.exp(-beta * r[i - 1]) * (mats[i - 1].entries @ v)
            out[K] = v
    return out


def subinvariance_defect(g: KGraph, dyn: Dynamics, beta, m) -> float:
    """``max(0, -min_K min_v (prod_{i in K}(I - e^{-beta r_i} A_i) m)_v)``."""
    worst = min(float(v.min()) for v in subinvariance_products(g, dyn, beta, m).values())
    return max(0.0, -worst)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _weight(st: StateSpec, degree, source: str) -> float:
    """``phi(t_x t_x^*)`` for a path ``x`` of the given degree and source."""
    g = st.graph
    v = g.vertex_index[source]
    is_vertex = not any(degree)
    if st.is_ground:
        return float(st.eps[v]) if is_vertex else 0.0
    val = math.exp(-st.beta * float(np.dot(st.r, degree))) * float(st.m[v])
    if is_vertex and st.vertex_shift is not None:
        val += float(st.vertex_shift[v])
    return val


def evaluate_state(st: StateSpec, mu: Path, nu: Path) -> float:
    """``phi(t_mu t_nu^*)``."""
    if mu != nu:
        return 0.0
    return _weight(st, mu.degree, mu.source)


def evaluate_on_product(st: StateSpec, a: tuple[Path, Path], b: tuple[Path, Path]) -> float:
    """``phi(t_mu t_nu^* t_sigma t_tau^*)`` for ``a = (mu, nu)`` and ``b = (sigma, tau)``.

    Expands ``t_nu^* t_sigma`` over ``Lambda^min(nu, sigma)``.
    """
    mu, nu = a
    sigma, tau = b
    if mu.source != nu.source or sigma.source != tau.source:
        return 0.0
    g = st.graph
    total = 0.0
    for alpha, eta in g.minimal_common_extensions(nu, sigma):
        total += evaluate_state(st, g.compose(mu, alpha), g.compose(tau, eta))
    return total


def _bound(g: KGraph, degree_bound) -> tuple[int, ...]:
    if isinstance(degree_bound, int):
        return (degree_bound,) * g.k
    b = tuple(int(x) for x in degree_bound)
    if len(b) != g.k or min(b) < 0:
        raise ValueError(f"degree bound must be {g.k} non-negative ints")
    return b


@dataclass(frozen=True, eq=False)
class ProductSupport:
    """Where ``phi(a b)`` can be non-zero for a diagonal state.

    ``pairs`` lists the spanning elements ``t_mu t_nu^*`` with
    ``s(mu) = s(nu)`` and degrees bounded; the triplets ``(rows, cols, xi)``
    record that ``xs[xi]`` arises as ``mu alpha = tau eta`` in the expansion
    of ``pairs[rows] pairs[cols]``.  For a diagonal state
    ``phi(a_i a_j) = sum phi(t_x t_x^*)`` over the triplets at ``(i, j)``.
    """

    pairs: tuple[tuple[Path, Path], ...]
    dshift: np.ndarray
    xs: tuple[Path, ...]
    xdeg: np.ndarray
    xsrc: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    xi: np.ndarray


@lru_cache(maxsize=32)
def product_support(g: KGraph, degree_bound) -> ProductSupport:
    b = _bound(g, degree_bound)
    paths = g.paths_upto(b)
    by_source = {}
    for p in paths:
        by_source.setdefault(p.source, []).append(p)
    pairs = [(mu, nu) for mu in paths for nu in by_source[mu.source]]
    index = {pq: i for i, pq in enumerate(pairs)}
    xs, xindex = [], {}
    rows, cols, xi = [], [], []
    compose, factor = g.compose, g.factor
    for nu in paths:
        for sigma in paths:
            if nu.range != sigma.range:
                continue
            ext = g.minimal_common_extensions(nu, sigma)
            if not ext:
                continue
            for alpha, eta in ext:
                for mu in by_source[nu.source]:
                    dtau = tuple(a + c - n for a, c, n in zip(mu.degree, sigma.degree, nu.degree))
                    if min(dtau) < 0 or not leq(dtau, b):
                        continue
                    x = compose(mu, alpha)
                    tau, tail = factor(x, dtau)
                    if tail != eta:
                        continue
                    j = xindex.get(x)
                    if j is None:
                        j = xindex[x] = len(xs)
                        xs.append(x)
                    rows.append(index[(mu, nu)])
                    cols.append(index[(sigma, tau)])
                    xi.append(j)
    dshift = np.array([np.subtract(mu.degree, nu.degree) for mu, nu in pairs], dtype=float)
    xdeg = np.array([x.degree for x in xs], dtype=float).reshape(len(xs), g.k)
    xsrc = np.array([g.vertex_index[x.source] for x in xs], dtype=int)
    return ProductSupport(tuple(pairs), dshift, tuple(xs), xdeg, xsrc,
                          np.array(rows, dtype=int), np.array(cols, dtype=int),
                          np.array(xi, dtype=int))


def support_weights(st: StateSpec, sup: ProductSupport) -> np.ndarray:
    """``phi(t_x t_x^*)`` for every ``x`` in the support."""
    vertex = sup.xdeg.sum(axis=1) == 0
    if st.is_ground:
        return np.where(vertex, st.eps[sup.xsrc], 0.0)
    w = np.exp(-st.beta * (sup.xdeg @ np.asarray(st.r))) * st.m[sup.xsrc]
    if st.vertex_shift is not None:
        w = w + np.where(vertex, st.vertex_shift[sup.xsrc], 0.0)
    return w


def product_matrix(st: StateSpec, degree_bound) -> tuple[sparse.csr_matrix, ProductSupport]:
    """``M[i, j] = phi(a_i a_j)`` over the spanning elements ``a_i``."""
    sup = product_support(st.graph, _bound(st.graph, degree_bound))
    n = len(sup.pairs)
    w = support_weights(st, sup)
    M = sparse.coo_matrix((w[sup.xi], (sup.rows, sup.cols)), shape=(n, n)).tocsr()
    return M, sup


def verify_kms_condition(st: StateSpec, dyn: Dynamics, beta: float, degree_bound) -> float:
    """``max |phi(a b) - e^{-beta r . (d(mu) - d(nu))} phi(b a)|`` over spanning pairs.

    ``a = t_mu t_nu^*`` and ``b = t_sigma t_tau^*`` range over all elements
    with ``s(mu) = s(nu)``, ``s(sigma) = s(tau)`` and degrees at most
    ``degree_bound``.
    """
    if beta is INF:
        raise PreconditionError("the KMS condition needs a finite beta")
    M, sup = product_matrix(st, degree_bound)
    c = np.exp(-beta * (sup.dshift @ _r(dyn)))
    R = M - sparse.diags(c) @ M.T.tocsr()
    return float(abs(R).max()) if R.nnz else 0.0


def gamma_invariance_defect(st: StateSpec, degree_bound) -> float:
    """``max |phi(t_mu t_nu^*)|`` over ``d(mu) != d(nu)`` up to ``degree_bound``."""
    g = st.graph
    paths = g.paths_upto(_bound(g, degree_bound))
    worst = 0.0
    for mu in paths:
        for nu in paths:
            if mu.source == nu.source and mu.degree != nu.degree:
                worst = max(worst, abs(evaluate_state(st, mu, nu)))
    return worst


def telescoping_defect(st: StateSpec, degree_bound, js=(0, 1, 2), value=None) -> float:
    """Largest violation of ``phi(t_mu t_nu^*) = sum_{lam in s(mu) Lambda^{jn}} phi(t_{mu lam} t_{nu lam}^*)``.

    ``n = (d(mu) v d(nu)) - d(mu)``; pairs range over ``s(mu) = s(nu)`` with
    degrees up to ``degree_bound``.  ``value(mu, nu)`` defaults to
    :func:`evaluate_state`.
    """
    g = st.graph
    value = value or (lambda a, b: evaluate_state(st, a, b))
    paths = g.paths_upto(_bound(g, degree_bound))
    worst = 0.0
    for mu in paths:
        for nu in paths:
            if mu.source != nu.source:
                continue
            n = tuple(max(a, b) - a for a, b in zip(mu.degree, nu.degree))
            lhs = value(mu, nu)
            for j in js:
                rhs = sum(value(g.compose(mu, lam), g.compose(nu, lam))
                          for lam in g.enumerate_paths(tuple(j * x for x in n), v=mu.source))
                worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# distinguished states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Independent:
    tol: float
    max_denominator: int
    status: str = "Independent"


@dataclass(frozen=True)
class DependentWitness:
    """``|p values[i] - q values[j]| < tol``."""

    p: int
    q: int
    i: int = 0
    j: int = 1
    residual: float = 0.0
    status: str = "DependentWitness"


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    status: str = "Inconclusive"


def _convergents(x: Fraction):
    """Continued-fraction convergents ``h/k`` of a non-negative rational."""
    h0, h1, k0, k1 = 0, 1, 1, 0
    while True:
        a = x.numerator // x.denominator
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def rational_independence(values, max_denominator: int = 10**6, tol: float = WITNESS_TOL):
    """Search for small integer relations ``p v_i = q v_j`` between positive reals.

    Each ratio ``v_j / v_i`` is expanded as a continued fraction and every
    convergent ``p/q`` with ``q <= max_denominator`` is tested against
    ``|p v_i - q v_j| < tol``.  Only pairwise relations are looked for, so
    ``Independent`` is a heuristic verdict, never a proof.
    """
    vals = [float(v) for v in values]
    if any(not math.isfinite(v) or v <= 0 for v in vals):
        return Inconclusive(f"values must be finite and positive: {vals}")
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            ratio = Fraction(vals[j]) / Fraction(vals[i])
            for p, q in _convergents(ratio):
                if q > max_denominator:
                    break
                res = abs(p * vals[i] - q * vals[j])
                if res < tol:
                    return DependentWitness(p, q, i, j, res)
    return Independent(tol, max_denominator)


def kms1_state(g: KGraph, max_denominator: int = 10**6) -> StateSpec:
    """The critical state at ``beta = 1`` for the preferred dynamics, ``m = x^Lambda``.

    Uniqueness is claimed only when :func:`rational_independence` finds no
    relation between the ``ln rho(A_i)``.
    """
    sd = spectral.common_pf_eigenvector(g)
    dyn = Dynamics.preferred_for(g)
    x = np.array(sd.x)
    ind = rational_independence(np.log(sd.rho), max_denominator)
    eps = eps_from_state(g, dyn, 1.0, x)
    if not is_cuntz_krieger(g, dyn, 1.0, x):
        raise InvariantBreach("x^Lambda is not a common eigenvector")
    return StateSpec(g, dyn.r, 1.0, eps, x, Kind.CUNTZ_KRIEGER,
                     independence=ind, unique=isinstance(ind, Independent))


def ground_state(g: KGraph, dyn: Dynamics, eps) -> StateSpec:
    """The KMS_inf state with ``phi(t_mu t_nu^*) = eps_v`` iff ``mu = nu = v``."""
    eps = _vector(g, eps)
    if np.any(eps < 0) or abs(eps.sum() - 1) > STRUCT_TOL:
        raise NotAProbability(f"eps must be a probability vector, got {eps.tolist()}")
    return StateSpec(g, dyn.r, INF, eps.copy(), eps.copy(), Kind.KMS_INFINITY)


def ground_limit(g: KGraph, dyn: Dynamics, eps, betas=(10.0, 20.0, 40.0)) -> list[float]:
    """``||m(beta) - eps||_inf`` for the KMS states at ``eps / (eps . y_beta)``."""
    eps = _vector(g, eps)
    out = []
    for beta in betas:
        y = y_vector(g, dyn, beta)
        st = kms_state_from_eps(g, dyn, beta, eps / float(eps @ y))
        out.append(float(np.max(np.abs(st.m - eps))))
    return out


def extreme_eps(g: KGraph, dyn: Dynamics, beta) -> list[np.ndarray]:
    """The vertices ``delta_v / y_v`` of the simplex."""
    y = y_vector(g, dyn, beta)
    out = []
    for i in range(len(g.vertices)):
        e = np.zeros(len(g.vertices))
        e[i] = 1 / y[i]
        out.append(e)
    return out


def simplex_summary(g: KGraph, dyn: Dynamics, beta) -> dict:
    """Extreme points of the KMS simplex at a subcritical ``beta``."""
    y = y_vector(g, dyn, beta)
    points = []
    for v, eps in zip(g.vertices, extreme_eps(g, dyn, beta)):
        st = kms_state_from_eps(g, dyn, beta, eps)
        points.append({"vertex": v, "eps": eps.tolist(), "m": st.m.tolist(),
                       "factors_through_ck": st.kind is Kind.CUNTZ_KRIEGER})
    return {"beta": beta, "r": list(dyn.r), "y": y.tolist(),
            "dimension": len(g.vertices) - 1, "extreme_points": points}


def count_subinvariant_samples(g: KGraph, dyn: Dynamics, beta: float, n_samples: int = 10_000,
                               seed: int = 0) -> int:
    """How many sampled probability vectors satisfy ``A_i m <= e^{beta r_i} m`` for all ``i``.

    The sample is ``n_samples`` uniform draws from the probability simplex
    plus ``x^Lambda``.  Below the critical temperature the count is 0.
    """
    rng = np.random.default_rng(seed)
    n = len(g.vertices)
    ms = rng.dirichlet(np.ones(n), size=n_samples)
    ms = np.vstack([ms, spectral.common_pf_eigenvector(g).x])
    ok = np.ones(len(ms), dtype=bool)
    for A, ri in zip(spectral.vertex_matrices(g), _r(dyn)):
        ok &= np.all(ms @ A.entries.T <= math.exp(beta * ri) * ms, axis=1)
    return int(ok.sum())


def independence_dict(ind) -> dict:
    if ind is None:
        return {"status": None, "witness": None}
    if isinstance(ind, DependentWitness):
        return {"status": ind.status, "witness": [ind.p, ind.q],
                "pair": [ind.i + 1, ind.j + 1]}
    if isinstance(ind, Independent):
        return {"status": ind.status, "witness": None, "tol": ind.tol,
                "max_denominator": ind.max_denominator}
    return {"status": ind.status, "witness": None, "reason": ind.reason}


def state_report(st: StateSpec, dyn: Dynamics, degree_bound=(2, 2)) -> dict:
    """``{beta, r, eps, m, kind, residuals, independence}`` for a state."""
    g = st.graph
    res = {"kms": None, "subinvariance": None, "pf": None}
    if not st.is_ground:
        res["kms"] = verify_kms_condition(st, dyn, st.beta, degree_bound)
        res["subinvariance"] = subinvariance_defect(g, dyn, st.beta, st.m)
    if st.kind is Kind.CUNTZ_KRIEGER:
        res["pf"] = max(float(np.max(np.abs(A.entries @ st.m - math.exp(st.beta * ri) * st.m)))
                        for A, ri in zip(spectral.vertex_matrices(g), st.r))
    out = {"beta": "inf" if st.beta is INF else st.beta, "r": list(st.r),
           "eps": st.eps.tolist(), "m": st.m.tolist(), "kind": st.kind.value,
           "residuals": res, "independence": independence_dict(st.independence)}
    if st.unique is not None:
        out["unique"] = st.unique
    return out

