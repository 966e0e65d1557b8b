"""Finite k-graphs presented by a coloured skeleton and factorisation squares.

A k-graph is stored as its skeleton (vertices and edges, each edge carrying a
colour ``1..k``) together with a complete set of factorisation squares
``e f = f' e'``.  Every morphism then has a unique *normal form*: the edge
word whose colours are in ascending order.  Paths are always held in normal
form, so equality of morphisms is equality of :class:`Path` values.

Conventions: a word ``e1 e2 ... en`` is composable when ``s(e_i) = r(e_{i+1})``,
its range is ``r(e1)`` and its source is ``s(en)``.  Degrees are tuples of
``k`` non-negative ints; colour ``i`` contributes to entry ``i - 1``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path as FSPath

import numpy as np

from .errors import (
    BadRange,
    CubeInconsistency,
    DuplicateSquare,
    MalformedSpec,
    MissingSquare,
    NotComposable,
    SourceViolation,
    ValidationError,
)

Degree = tuple[int, ...]


# ---------------------------------------------------------------------------
# degrees
# ---------------------------------------------------------------------------

def zero(k: int) -> Degree:
    return (0,) * k


def unit(k: int, i: int) -> Degree:
    """The generator ``e_i`` of ``N^k`` (``i`` is 1-based)."""
    return tuple(1 if j == i - 1 else 0 for j in range(k))


def unit_sum(k: int, colors) -> Degree:
    """``e_J``, the sum of the generators indexed by the colours in ``colors``."""
    colors = set(colors)
    return tuple(1 if j + 1 in colors else 0 for j in range(k))


def join(m: Degree, n: Degree) -> Degree:
    return tuple(max(a, b) for a, b in zip(m, n))


def meet(m: Degree, n: Degree) -> Degree:
    return tuple(min(a, b) for a, b in zip(m, n))


def leq(m: Degree, n: Degree) -> bool:
    return all(a <= b for a, b in zip(m, n))


def add(m: Degree, n: Degree) -> Degree:
    return tuple(a + b for a, b in zip(m, n))


def sub(m: Degree, n: Degree) -> Degree:
    return tuple(a - b for a, b in zip(m, n))


def degrees_upto(bound: Degree):
    """All degrees ``n <= bound`` in lexicographic order."""
    return [tuple(n) for n in itertools.product(*(range(b + 1) for b in bound))]


def degree_colors(n: Degree) -> list[int]:
    """The ascending colour word of a path of degree ``n``."""
    return [c + 1 for c, count in enumerate(n) for _ in range(count)]


def degree_lemma_check(k: int, bound: int) -> bool:
    """Exhaustively test ``m + p == m v n  <=>  p ^ q == 0`` when ``m + p == n + q``.

    All of ``m, n, p, q`` range over ``{0, ..., bound}^k``.  Returns True when
    no counterexample exists.
    """
    if k < 1 or bound < 0:
        raise ValueError("need k >= 1 and bound >= 0")
    grid = np.array(list(itertools.product(range(bound + 1), repeat=k)), dtype=int)
    n = grid[:, None, :]
    p = grid[None, :, :]
    for m in grid:
        q = m + p - n
        admissible = np.all((q >= 0) & (q <= bound), axis=-1)
        lhs = np.all(m + p == np.maximum(m, n), axis=-1)
        rhs = np.all(np.minimum(p, q) == 0, axis=-1)
        if np.any(admissible & (lhs != rhs)):
            return False
    return True


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    source: str
    range: str


@dataclass(frozen=True)
class FactorizationSquare:
    """``e f = f' e'`` with ``color(e) = color(e') < color(f) = color(f')``."""

    e: str
    f: str
    f_prime: str
    e_prime: str


@dataclass(frozen=True, slots=True)
class Path:
    """A morphism in normal form.

    ``edges`` is the colour-ascending edge word; it is empty for the vertex
    path at ``source == range``.
    """

    edges: tuple[str, ...]
    source: str
    range: str
    degree: Degree

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    def __len__(self):
        return len(self.edges)

    def sort_key(self):
        return (self.degree, self.range, self.edges, self.source)

    def __str__(self):
        return ".".join(self.edges) if self.edges else self.source


class KGraph:
    """A validated finite k-graph with no sources.

    Build instances with :func:`validate_graph` (or :func:`load_graph`);
    the constructor trusts its input.  Instances are immutable and compare
    by value.
    """

    def __init__(self, k, vertices, edges, squares):
        self.k = k
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.squares = tuple(squares)
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.edge = {e.id: e for e in self.edges}
        self._color = {e.id: e.color for e in self.edges}
        self._src = {e.id: e.source for e in self.edges}
        self._rng = {e.id: e.range for e in self.edges}
        self._up = {}    # (e, f) ascending  -> (f', e')
        self._down = {}  # (f', e') descending -> (e, f)
        for sq in self.squares:
            self._up[(sq.e, sq.f)] = (sq.f_prime, sq.e_prime)
            self._down[(sq.f_prime, sq.e_prime)] = (sq.e, sq.f)
        into = {}
        for e in self.edges:
            into.setdefault((e.range, e.color), []).append(e.id)
        self._into = {key: tuple(ids) for key, ids in into.items()}
        self._key = (k, self.vertices, self.edges, self.squares)
        self._paths_cache = {}
        self._mce_cache = {}

    def __eq__(self, other):
        return isinstance(other, KGraph) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return (f"KGraph(k={self.k}, vertices={len(self.vertices)}, "
                f"edges={len(self.edges)}, squares={len(self.squares)})")

    # -- basic accessors ---------------------------------------------------

    def color(self, edge_id: str) -> int:
        return self._color[edge_id]

    def edges_into(self, v: str, color: int) -> tuple[str, ...]:
        """Ids of the edges of ``color`` with range ``v``."""
        return self._into.get((v, color), ())

    def vertex(self, v: str) -> Path:
        if v not in self.vertex_index:
            raise KeyError(v)
        return Path((), v, v, zero(self.k))

    def _make(self, word) -> Path:
        """Wrap a colour-sorted composable word."""
        deg = [0] * self.k
        for x in word:
            deg[self._color[x] - 1] += 1
        return Path(tuple(word), self._src[word[-1]], self._rng[word[0]], tuple(deg))

    def _swap(self, x, y):
        if self._color[x] < self._color[y]:
            return self._up[(x, y)]
        return self._down[(x, y)]

    # -- normal forms ------------------------------------------------------

    def path(self, word: Sequence[str] | str) -> Path:
        """The morphism named by an edge word (or a single edge or vertex id)."""
        if isinstance(word, str):
            if word in self.vertex_index:
                return self.vertex(word)
            word = (word,)
        return self.normal_form(word)

    def normal_form(self, p, rng: random.Random | None = None) -> Path:
        """Return the colour-ascending representative of ``p``.

        ``p`` is a :class:`Path` or a composable edge word.  Adjacent
        out-of-order pairs are rewritten with the factorisation squares until
        the word is sorted; by default the leftmost pair is chosen first, and
        with ``rng`` the pair is chosen at random (all orders agree on a valid
        graph).
        """
        if isinstance(p, Path):
            if rng is None:
                return p
            word = list(p.edges)
            if not word:
                return p
        else:
            word = list(p)
            if not word:
                raise ValueError("an empty word does not determine a vertex; use vertex()")
            for a, b in zip(word, word[1:]):
                if self._src[a] != self._rng[b]:
                    raise NotComposable(f"s({a}) = {self._src[a]} but r({b}) = {self._rng[b]}")
        color = self._color
        if rng is None:
            for idx in range(1, len(word)):
                j = idx
                while j > 0 and color[word[j - 1]] > color[word[j]]:
                    word[j - 1], word[j] = self._down[(word[j - 1], word[j])]
                    j -= 1
        else:
            while True:
                bad = [j for j in range(len(word) - 1) if color[word[j]] > color[word[j + 1]]]
                if not bad:
                    break
                j = rng.choice(bad)
                word[j], word[j + 1] = self._down[(word[j], word[j + 1])]
        return self._make(word)

    def compose(self, p: Path, q: Path) -> Path:
        """The product ``p q`` (``q`` first, then ``p``), in normal form."""
        if p.source != q.range:
            raise NotComposable(f"s(p) = {p.source} but r(q) = {q.range}")
        if not q.edges:
            return p
        if not p.edges:
            return q
        word = list(p.edges + q.edges)
        color = self._color
        down = self._down
        for idx in range(len(p.edges), len(word)):
            j = idx
            while j > 0 and color[word[j - 1]] > color[word[j]]:
                word[j - 1], word[j] = down[(word[j - 1], word[j])]
                j -= 1
        return self._make(word)

    def _rearrange(self, word, target):
        """Rewrite ``word`` until its colour sequence equals ``target``."""
        word = list(word)
        color = self._color
        for i, c in enumerate(target):
            if color[word[i]] == c:
                continue
            j = i + 1
            while color[word[j]] != c:
                j += 1
            for t in range(j, i, -1):
                word[t - 1], word[t] = self._swap(word[t - 1], word[t])
        return word

    def factor(self, p: Path, m: Degree) -> tuple[Path, Path]:
        """Split ``p = head tail`` with ``d(head) = m``."""
        return self.segment(p, zero(self.k), m), self.segment(p, m, p.degree)

    def segment(self, p: Path, m: Degree, n: Degree) -> Path:
        """The unique path ``p(m, n)`` with ``p = p(0, m) p(m, n) p(n, d(p))``."""
        m, n = tuple(m), tuple(n)
        if len(m) != self.k or len(n) != self.k:
            raise BadRange("degrees must have k entries")
        if not (leq(zero(self.k), m) and leq(m, n) and leq(n, p.degree)):
            raise BadRange(f"need 0 <= {m} <= {n} <= {p.degree}")
        if m == n:
            if m == p.degree:
                return self.vertex(p.source)
            if m == zero(self.k):
                return self.vertex(p.range)
        head, mid = degree_colors(m), degree_colors(sub(n, m))
        word = self._rearrange(p.edges, head + mid + degree_colors(sub(p.degree, n)))
        piece = word[len(head):len(head) + len(mid)]
        if piece:
            return self._make(piece)
        cut = len(head)
        return self.vertex(self._src[word[cut - 1]] if cut else p.range)

    # -- enumeration -------------------------------------------------------

    def enumerate_paths(self, n: Degree, v: str | None = None,
                        w: str | None = None) -> tuple[Path, ...]:
        """All paths of degree ``n``, optionally with range ``v`` and/or source ``w``."""
        n = tuple(n)
        key = (n, v, w)
        hit = self._paths_cache.get(key)
        if hit is not None:
            return hit
        starts = self.vertices if v is None else (v,)
        colors = degree_colors(n)
        if not colors:
            out = tuple(self.vertex(u) for u in starts if w is None or u == w)
        else:
            partial = [((), u) for u in starts]
            for c in colors:
                partial = [(word + (e,), self._src[e])
                           for word, cur in partial for e in self.edges_into(cur, c)]
            out = tuple(self._make(word) for word, cur in partial if w is None or cur == w)
        self._paths_cache[key] = out
        return out

    def paths_upto(self, bound: Degree, v: str | None = None, w: str | None = None) -> list[Path]:
        """All paths of degree ``<= bound``, in degree-lexicographic order."""
        out = []
        for n in degrees_upto(bound):
            out.extend(self.enumerate_paths(n, v, w))
        return out

    def minimal_common_extensions(self, mu: Path, nu: Path) -> tuple[tuple[Path, Path], ...]:
        """``Lambda^min(mu, nu)``: pairs ``(eta, zeta)`` with ``mu eta = nu zeta``
        of degree ``d(mu) v d(nu)``.

        Every ``eta`` of the right degree out of ``s(mu)`` is tried; the path
        ``mu eta`` is split at ``d(nu)`` and kept when the head is ``nu``.
        """
        key = (mu, nu)
        hit = self._mce_cache.get(key)
        if hit is not None:
            return hit
        out = []
        if mu.range == nu.range:
            top = join(mu.degree, nu.degree)
            for eta in self.enumerate_paths(sub(top, mu.degree), v=mu.source):
                head, zeta = self.factor(self.compose(mu, eta), nu.degree)
                if head == nu:
                    out.append((eta, zeta))
        out = tuple(out)
        self._mce_cache[key] = out
        return out


# ---------------------------------------------------------------------------
# validation and serialisation
# ---------------------------------------------------------------------------

def _require(cond, msg, location=None):
    if not cond:
        raise MalformedSpec(msg, location)


def validate_graph(spec: Mapping) -> KGraph:
    """Check a raw graph description and build a :class:`KGraph`.

    ``spec`` has the keys ``k``, ``vertices``, ``edges`` and ``squares`` as in
    the JSON graph format.  Raises a :class:`~kgraph_kms.errors.ValidationError`
    subclass describing the first problem found.
    """
    _require(isinstance(spec, Mapping), "graph description must be an object")
    for key in ("k", "vertices", "edges"):
        _require(key in spec, f"missing key {key!r}")
    k = spec["k"]
    _require(isinstance(k, int) and not isinstance(k, bool) and k >= 1, "k must be an integer >= 1", "k")

    verts = spec["vertices"]
    _require(isinstance(verts, list) and verts, "vertices must be a non-empty list", "vertices")
    for i, v in enumerate(verts):
        _require(isinstance(v, str), "vertex ids must be strings", f"vertices[{i}]")
    _require(len(set(verts)) == len(verts), "duplicate vertex id", "vertices")
    vset = set(verts)

    raw_edges = spec["edges"]
    _require(isinstance(raw_edges, list), "edges must be a list", "edges")
    edges = []
    seen = set()
    for i, e in enumerate(raw_edges):
        loc = f"edges[{i}]"
        _require(isinstance(e, Mapping), "edge must be an object", loc)
        for key in ("id", "color", "source", "range"):
            _require(key in e, f"edge is missing {key!r}", loc)
        eid, c = e["id"], e["color"]
        _require(isinstance(eid, str), "edge id must be a string", loc)
        _require(eid not in seen, f"duplicate edge id {eid!r}", loc)
        _require(eid not in vset, f"edge id {eid!r} clashes with a vertex id", loc)
        _require(isinstance(c, int) and not isinstance(c, bool) and 1 <= c <= k,
                 f"colour must be an integer in 1..{k}", loc)
        _require(e["source"] in vset and e["range"] in vset, "unknown endpoint vertex", loc)
        seen.add(eid)
        edges.append(Edge(eid, c, e["source"], e["range"]))
    by_id = {e.id: e for e in edges}

    raw_sq = spec.get("squares", [])
    _require(isinstance(raw_sq, list), "squares must be a list", "squares")
    squares, ups, downs = [], {}, {}
    for i, sq in enumerate(raw_sq):
        loc = f"squares[{i}]"
        _require(isinstance(sq, list) and len(sq) == 4, "square must be [e, f, f', e']", loc)
        for x in sq:
            _require(isinstance(x, str) and x in by_id, f"unknown edge {x!r}", loc)
        e, f, fp, ep = (by_id[x] for x in sq)
        _require(e.color < f.color, "square needs color(e) < color(f)", loc)
        _require(fp.color == f.color and ep.color == e.color, "square colours do not match", loc)
        _require(f.range == e.source, "e f is not composable", loc)
        _require(ep.range == fp.source, "f' e' is not composable", loc)
        _require(e.range == fp.range and f.source == ep.source, "square endpoints do not match", loc)
        if (e.id, f.id) in ups:
            raise DuplicateSquare(f"pair ({e.id}, {f.id}) already factorised in squares[{ups[(e.id, f.id)]}]", loc)
        if (fp.id, ep.id) in downs:
            raise DuplicateSquare(f"pair ({fp.id}, {ep.id}) already factorised in squares[{downs[(fp.id, ep.id)]}]", loc)
        ups[(e.id, f.id)] = i
        downs[(fp.id, ep.id)] = i
        squares.append(FactorizationSquare(e.id, f.id, fp.id, ep.id))

    into = {}
    for e in edges:
        into.setdefault((e.range, e.color), []).append(e)
    for x in edges:
        for c in range(1, k + 1):
            if c == x.color:
                continue
            for y in into.get((x.source, c), ()):
                pair = (x.id, y.id)
                table = ups if x.color < y.color else downs
                if pair not in table:
                    raise MissingSquare(f"composable pair ({x.id}, {y.id}) has no square", "squares")
    for v in verts:
        for c in range(1, k + 1):
            if (v, c) not in into:
                raise SourceViolation(f"vertex {v!r} receives no edge of colour {c}", "edges")

    g = KGraph(k, verts, edges, squares)
    if k >= 3:
        _check_cubes(g)
    return g


def _check_cubes(g: KGraph):
    """Both reduced rewritings of every descending tricoloured triple agree."""
    for x in g.edges:
        for cy in range(1, x.color):
            for y in g.edges_into(x.source, cy):
                for cz in range(1, cy):
                    for z in g.edges_into(g.edge[y].source, cz):
                        a = [x.id, y, z]
                        b = list(a)
                        for i in (0, 1, 0):
                            a[i], a[i + 1] = g._swap(a[i], a[i + 1])
                        for i in (1, 0, 1):
                            b[i], b[i + 1] = g._swap(b[i], b[i + 1])
                        if a != b:
                            raise CubeInconsistency(
                                f"triple ({x.id}, {y}, {z}) normalises to {a} and {b}", "squares")


def graph_to_spec(g: KGraph) -> dict:
    return {
        "k": g.k,
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "color": e.color, "source": e.source, "range": e.range} for e in g.edges],
        "squares": [[s.e, s.f, s.f_prime, s.e_prime] for s in g.squares],
    }


def dumps_graph(g: KGraph) -> str:
    return json.dumps(graph_to_spec(g), indent=2) + "\n"


def graph_hash(g: KGraph) -> str:
    canon = json.dumps(graph_to_spec(g), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def load_graph(path) -> KGraph:
    """Read and validate a JSON graph file.

    JSON syntax errors are re-raised as :class:`MalformedSpec` carrying the
    file name and line/column.
    """
    path = FSPath(path)
    text = path.read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSpec(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    try:
        return validate_graph(spec)
    except ValidationError as exc:
        exc.location = f"{path}: {exc.location}" if exc.location else str(path)
        raise


def save_graph(g: KGraph, path) -> None:
    FSPath(path).write_text(dumps_graph(g))
