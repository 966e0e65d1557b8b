"""Bundled example graphs and a generator of random valid 2-graphs.

The bundled graphs are

* ``gamma`` -- one vertex, blue edges ``e, f``, red edges ``a, b`` and the
  flip factorisation ``ea = ae, eb = af, fa = be, fb = bf``;
* ``single_vertex(m, n)`` -- one vertex with ``m`` blue and ``n`` red loops
  that commute pairwise;
* ``two_vertex`` -- a coordinatewise-irreducible 2-graph on vertices ``u, w``
  with ``A_1 = [[1, 2], [1, 0]]`` and ``A_2 = A_1 + I``.

The same graphs ship as JSON files under ``kgraph_kms/data``.
"""

from __future__ import annotations

import random
from importlib import resources

import numpy as np

from .kgraph import KGraph, load_graph, validate_graph

BUNDLED = ("gamma", "single_2_3", "single_2_2", "single_1_1", "two_vertex")


def _edges_from_matrices(vertices, matrices):
    """Edge records realising vertex matrices ``A_c(v, w) = #{edges w -> v}``."""
    edges = []
    for c, A in enumerate(matrices, start=1):
        prefix = {1: "b", 2: "r"}.get(c, f"c{c}_")
        n = 0
        for i, v in enumerate(vertices):
            for j, w in enumerate(vertices):
                for _ in range(int(A[i][j])):
                    edges.append({"id": f"{prefix}{n}", "color": c, "source": w, "range": v})
                    n += 1
    return edges


def _pair_squares(edges, rng: random.Random | None = None):
    """Choose a factorisation for every bicoloured composable pair.

    For each pair of colours ``i < j`` and each pair of endpoints, the
    ``i j`` words and the ``j i`` words are matched in order (or after a
    shuffle when ``rng`` is given).  This is only valid for ``k = 2``, where no
    cube condition constrains the choice.
    """
    into = {}
    for e in edges:
        into.setdefault((e["range"], e["color"]), []).append(e)
    colors = sorted({e["color"] for e in edges})
    squares = []
    for ci in colors:
        for cj in colors:
            if ci >= cj:
                continue
            up, down = {}, {}
            for e in edges:
                if e["color"] == ci:
                    for f in into.get((e["source"], cj), ()):
                        up.setdefault((e["range"], f["source"]), []).append((e["id"], f["id"]))
                elif e["color"] == cj:
                    for f in into.get((e["source"], ci), ()):
                        down.setdefault((e["range"], f["source"]), []).append((e["id"], f["id"]))
            for key in sorted(up):
                lhs, rhs = up[key], list(down.get(key, ()))
                if len(lhs) != len(rhs):
                    raise ValueError("vertex matrices do not commute")
                if rng is not None:
                    rng.shuffle(rhs)
                for (e, f), (fp, ep) in zip(lhs, rhs):
                    squares.append([e, f, fp, ep])
    return squares


def from_matrices(matrices, vertices=None, rng: random.Random | None = None) -> KGraph:
    """Build a 2-graph (or 1-graph) with the given commuting vertex matrices."""
    n = len(matrices[0])
    if vertices is None:
        vertices = [f"v{i}" for i in range(n)]
    edges = _edges_from_matrices(vertices, matrices)
    spec = {"k": len(matrices), "vertices": list(vertices), "edges": edges,
            "squares": _pair_squares(edges, rng)}
    return validate_graph(spec)


def gamma() -> KGraph:
    spec = {
        "k": 2,
        "vertices": ["v"],
        "edges": [
            {"id": "e", "color": 1, "source": "v", "range": "v"},
            {"id": "f", "color": 1, "source": "v", "range": "v"},
            {"id": "a", "color": 2, "source": "v", "range": "v"},
            {"id": "b", "color": 2, "source": "v", "range": "v"},
        ],
        "squares": [["e", "a", "a", "e"], ["e", "b", "a", "f"],
                    ["f", "a", "b", "e"], ["f", "b", "b", "f"]],
    }
    return validate_graph(spec)


def single_vertex(m: int, n: int) -> KGraph:
    """One vertex, ``m`` blue loops, ``n`` red loops, ``b_i r_j = r_j b_i``."""
    edges = ([{"id": f"b{i}", "color": 1, "source": "v", "range": "v"} for i in range(m)]
             + [{"id": f"r{j}", "color": 2, "source": "v", "range": "v"} for j in range(n)])
    squares = [[f"b{i}", f"r{j}", f"r{j}", f"b{i}"] for i in range(m) for j in range(n)]
    return validate_graph({"k": 2, "vertices": ["v"], "edges": edges, "squares": squares})


def two_vertex() -> KGraph:
    A1 = [[1, 2], [1, 0]]
    A2 = [[2, 2], [1, 1]]
    return from_matrices([A1, A2], vertices=["u", "w"])


def build(name: str) -> KGraph:
    """Construct a bundled graph by name (see :data:`BUNDLED`)."""
    if name == "gamma":
        return gamma()
    if name == "two_vertex":
        return two_vertex()
    if name.startswith("single_"):
        m, n = (int(x) for x in name.split("_")[1:])
        return single_vertex(m, n)
    raise KeyError(name)


def data_path(name: str):
    return resources.files("kgraph_kms") / "data" / f"{name}.json"


def load(name: str) -> KGraph:
    """Load a bundled graph from its JSON file."""
    with resources.as_file(data_path(name)) as p:
        return load_graph(p)


def random_commuting_pair(rng: random.Random, max_vertices: int = 3):
    """Two commuting non-negative integer matrices with no zero rows."""
    n = rng.randint(1, max_vertices)
    while True:
        A = np.array([[rng.choice((0, 0, 1, 1, 2)) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if np.all(A.sum(axis=1) > 0):
            break
    if n > 1 and rng.random() < 0.3:
        # circulants commute with each other
        a = [rng.randint(0, 2) for _ in range(n)]
        b = [rng.randint(0, 2) for _ in range(n)]
        a[rng.randrange(n)] += 1
        b[rng.randrange(n)] += 1
        A = np.array([[a[(j - i) % n] for j in range(n)] for i in range(n)], dtype=np.int64)
        B = np.array([[b[(j - i) % n] for j in range(n)] for i in range(n)], dtype=np.int64)
    else:
        c0, c1, c2 = rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 1)
        if c0 == 0 and c1 == 0:
            c1 = 1
        B = c0 * np.eye(n, dtype=np.int64) + c1 * A + c2 * (A @ A)
    if rng.random() < 0.5:
        A, B = B, A
    return A, B


def random_2graph(rng: random.Random, max_vertices: int = 3, irreducible: bool = False,
                  max_paths: int = 5000) -> KGraph:
    """A random valid 2-graph with up to ``max_vertices`` vertices.

    The factorisation squares are a uniformly shuffled matching of the
    bicoloured paths.  With ``irreducible=True`` draws repeat until both
    vertex matrices are irreducible.  Draws with more than ``max_paths`` paths
    of degree ``(3, 3)`` are rejected to keep exhaustive checks cheap.
    """
    from .spectral import is_irreducible

    while True:
        A, B = random_commuting_pair(rng, max_vertices)
        A3, B3 = np.linalg.matrix_power(A, 3), np.linalg.matrix_power(B, 3)
        if int((A3 @ B3).sum()) > max_paths:
            continue
        if irreducible and not (is_irreducible(A) and is_irreducible(B)):
            continue
        return from_matrices([A.tolist(), B.tolist()], rng=rng)
