import copy
import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from kgraph_kms import fixtures
from kgraph_kms import kgraph as K
from kgraph_kms.errors import (
    BadRange,
    CubeInconsistency,
    DuplicateSquare,
    MalformedSpec,
    MissingSquare,
    NotComposable,
    SourceViolation,
)


def gamma_spec():
    return K.graph_to_spec(fixtures.gamma())


NAMES3 = {1: ["x0", "x1"], 2: ["y0", "y1"], 3: ["z0", "z1"]}


def three_graph_spec(perm12, perm13, perm23):
    """One vertex, two loops of each of three colours.

    ``permIJ`` sends the ascending pairs ``(a, b)`` of colours ``I < J``, in
    ``a``-major order, to indices of the target words ``(b, a)`` listed in
    ``b``-major order.
    """
    edges = [{"id": e, "color": c, "source": "v", "range": "v"} for c in NAMES3 for e in NAMES3[c]]

    def squares(ci, cj, perm):
        pairs = [(a, b) for a in NAMES3[ci] for b in NAMES3[cj]]
        tgt = [(b, a) for b in NAMES3[cj] for a in NAMES3[ci]]
        return [[a, b, *tgt[k]] for (a, b), k in zip(pairs, perm)]

    return {"k": 3, "vertices": ["v"], "edges": edges,
            "squares": squares(1, 2, perm12) + squares(1, 3, perm13) + squares(2, 3, perm23)}


COMMUTE = (0, 2, 1, 3)
SHUFFLE = (0, 1, 2, 3)


# -- degrees ---------------------------------------------------------------

@given(st.integers(1, 4).flatmap(
    lambda k: st.tuples(st.lists(st.integers(0, 6), min_size=k, max_size=k),
                        st.lists(st.integers(0, 6), min_size=k, max_size=k))))
def test_join_meet_sum(mn):
    m, n = map(tuple, mn)
    assert K.add(K.join(m, n), K.meet(m, n)) == K.add(m, n)
    assert K.leq(K.meet(m, n), m) and K.leq(m, K.join(m, n))


def test_unit_sum():
    assert K.unit_sum(3, [1, 3]) == (1, 0, 1)
    assert K.unit(2, 2) == (0, 1)


@pytest.mark.parametrize("k,bound", [(1, 3), (2, 2), (1, 1), (2, 1)])
def test_degree_lemma_examples(k, bound):
    assert K.degree_lemma_check(k, bound)
    assert oracles.degree_lemma_bruteforce(k, bound)


def test_degree_lemma_trivial_instance():
    m = n = (2, 1)
    p = q = (0, 0)
    assert K.add(m, p) == K.join(m, n)
    assert K.meet(p, q) == (0, 0)


# -- validation ------------------------------------------------------------

def test_gamma_is_valid(gamma):
    assert gamma.k == 2
    assert len(gamma.vertices) == 1 and len(gamma.edges) == 4 and len(gamma.squares) == 4


def test_single_square_graph_is_valid():
    g = fixtures.single_vertex(1, 1)
    assert len(g.squares) == 1


def test_missing_square():
    spec = gamma_spec()
    spec["squares"] = [s for s in spec["squares"] if s != ["e", "b", "a", "f"]]
    with pytest.raises(MissingSquare):
        K.validate_graph(spec)


def test_duplicate_square_forward():
    spec = gamma_spec()
    spec["squares"] = spec["squares"] + [["e", "b", "b", "f"]]
    with pytest.raises(DuplicateSquare):
        K.validate_graph(spec)


def test_duplicate_square_backward():
    # two ascending pairs claiming the same descending word
    spec = gamma_spec()
    spec["squares"] = [["e", "a", "a", "e"], ["e", "b", "a", "e"],
                       ["f", "a", "b", "e"], ["f", "b", "b", "f"]]
    with pytest.raises(DuplicateSquare):
        K.validate_graph(spec)


def test_source_violation():
    spec = {"k": 2, "vertices": ["u", "w"],
            "edges": [{"id": "b", "color": 1, "source": "u", "range": "u"},
                      {"id": "r", "color": 2, "source": "u", "range": "u"},
                      {"id": "b2", "color": 1, "source": "w", "range": "w"}],
            "squares": [["b", "r", "r", "b"]]}
    with pytest.raises(SourceViolation):
        K.validate_graph(spec)


@pytest.mark.parametrize("mutate", [
    lambda s: s.pop("k"),
    lambda s: s.__setitem__("k", 0),
    lambda s: s["edges"][0].__setitem__("color", 3),
    lambda s: s["edges"][0].__setitem__("source", "nowhere"),
    lambda s: s["edges"].append(dict(s["edges"][0])),
    lambda s: s["squares"].append(["e", "a"]),
    lambda s: s["squares"].append(["a", "e", "e", "a"]),
    lambda s: s.__setitem__("vertices", ["v", "v"]),
])
def test_malformed(mutate):
    spec = copy.deepcopy(gamma_spec())
    mutate(spec)
    with pytest.raises(MalformedSpec):
        K.validate_graph(spec)


def test_cube_consistent_three_graph():
    g = K.validate_graph(three_graph_spec(COMMUTE, COMMUTE, COMMUTE))
    assert g.k == 3
    # oracle: every tricoloured word class has exactly one sorted member
    for colors in itertools.permutations((1, 2, 3)):
        for w in oracles.composable_words(g, list(colors)):
            assert g.path(w).edges == oracles.sorted_representative(g, w)


def test_cube_inconsistent_three_graph():
    spec = three_graph_spec(SHUFFLE, SHUFFLE, (0, 1, 3, 2))
    with pytest.raises(CubeInconsistency):
        K.validate_graph(spec)
    # independent confirmation: the class of z0 y1 x0 holds two sorted words
    g = K.KGraph(3, ["v"], [K.Edge(e["id"], e["color"], e["source"], e["range"]) for e in spec["edges"]],
                 [K.FactorizationSquare(*s) for s in spec["squares"]])
    color = {e.id: e.color for e in g.edges}
    cls = oracles.word_class(g, ("z0", "y1", "x0"))
    sorted_words = [w for w in cls if [color[x] for x in w] == [1, 2, 3]]
    assert len(sorted_words) > 1


# -- paths -----------------------------------------------------------------

def test_compose_identity(bundled):
    for g in bundled.values():
        for q in g.paths_upto((1, 1)):
            assert g.compose(g.vertex(q.range), q) == q
            assert g.compose(q, g.vertex(q.source)) == q


def test_compose_gamma_square(gamma):
    assert gamma.compose(gamma.path("e"), gamma.path("b")) == gamma.compose(gamma.path("a"), gamma.path("f"))


def test_not_composable():
    g = fixtures.two_vertex()
    p = next(p for p in g.enumerate_paths((1, 0)) if p.source == "w")
    q = next(q for q in g.enumerate_paths((1, 0)) if q.range == "u")
    with pytest.raises(NotComposable):
        g.compose(p, q)
    with pytest.raises(NotComposable):
        g.normal_form([p.edges[0], q.edges[0]])


def test_normal_form_sorted_is_identity(bundled):
    for g in bundled.values():
        for p in g.paths_upto((2, 2)):
            assert g.normal_form(list(p.edges)) == p if p.edges else True


def test_normal_form_gamma(gamma):
    # f a = b e: the red-blue word b e has blue-red form f a
    assert gamma.path(["b", "e"]).edges == ("f", "a")
    assert gamma.path(["a", "f"]).edges == ("e", "b")


def _random_word(g, rng, length):
    e = rng.choice(g.edges)
    word = [e.id]
    for _ in range(length - 1):
        nxt = [x for x in g.edges if x.range == g.edge[word[-1]].source]
        word.append(rng.choice(nxt).id)
    return word


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_normal_form_matches_bruteforce(seed, length):
    rng = random.Random(seed)
    g = fixtures.random_2graph(rng, max_paths=800)
    w = _random_word(g, rng, length)
    p = g.path(w)
    assert p.edges == oracles.sorted_representative(g, w)
    assert g.normal_form(p) == p


def test_degree_11_factorisations_agree(bundled, random_graphs):
    for g in list(bundled.values()) + random_graphs[:20]:
        for e in g.edges:
            for f in g.edges:
                if f.range == e.source and e.color != f.color:
                    p = g.path([e.id, f.id])
                    assert p.edges == oracles.sorted_representative(g, (e.id, f.id))


def test_confluence_up_to_22(bundled, random_graphs):
    rng = random.Random(5)
    for g in list(bundled.values()) + random_graphs[:8]:
        for n in K.degrees_upto((2, 2)):
            colors = K.degree_colors(n)
            if not colors:
                continue
            for order in set(itertools.permutations(colors)):
                for w in oracles.composable_words(g, list(order)):
                    base = g.normal_form(w)
                    for _ in range(3):
                        assert g.normal_form(w, rng=rng) == base


@given(st.integers(0, 10**6))
def test_degree_additivity_and_round_trip(seed):
    rng = random.Random(seed)
    g = fixtures.random_2graph(rng, max_paths=2000)
    p = g.path(_random_word(g, rng, rng.randint(1, 4)))
    qs = [q for q in g.paths_upto((1, 1)) if q.range == p.source]
    q = rng.choice(qs)
    pq = g.compose(p, q)
    assert pq.degree == K.add(p.degree, q.degree)
    m = tuple(rng.randint(0, x) for x in pq.degree)
    head, tail = g.factor(pq, m)
    assert head.degree == m
    assert g.compose(head, tail) == pq
    n = tuple(rng.randint(a, b) for a, b in zip(m, pq.degree))
    mid = g.segment(pq, m, n)
    assert g.compose(g.compose(head, mid), g.segment(pq, n, pq.degree)) == pq


def test_segment_examples(gamma):
    p = gamma.path(["e", "f", "a", "b"])
    assert gamma.segment(p, (0, 0), p.degree) == p
    assert gamma.segment(p, (1, 1), (1, 1)) == gamma.vertex("v")
    with pytest.raises(BadRange):
        gamma.segment(p, (1, 0), (0, 1))
    with pytest.raises(BadRange):
        gamma.segment(p, (0, 0), (3, 0))


def test_segment_vertex_positions():
    g = fixtures.two_vertex()
    for p in g.paths_upto((2, 1)):
        for m in K.degrees_upto(p.degree):
            v = g.segment(p, m, m)
            assert v.is_vertex
            head, tail = g.factor(p, m)
            assert v.source == head.source == tail.range


# -- enumeration -----------------------------------------------------------

def test_enumerate_degree_zero(bundled):
    g = bundled["two_vertex"]
    assert [p.source for p in g.enumerate_paths((0, 0))] == ["u", "w"]
    assert len(g.enumerate_paths((0, 0), v="u")) == 1
    assert len(g.enumerate_paths((0, 0), v="u", w="w")) == 0


def test_enumerate_gamma_11(gamma):
    assert len(gamma.enumerate_paths((1, 1))) == 4


@pytest.mark.parametrize("m,n", [(2, 3), (2, 2), (1, 1), (3, 1)])
def test_enumerate_single_vertex(m, n):
    g = fixtures.single_vertex(m, n)
    for p, q in itertools.product(range(4), range(4)):
        assert len(g.enumerate_paths((p, q))) == m ** p * n ** q


def test_enumeration_matches_class_count(random_graphs):
    for g in random_graphs[:15]:
        for n in K.degrees_upto((2, 1)):
            counts = oracles.count_classes(g, n)
            for v in g.vertices:
                for w in g.vertices:
                    paths = g.enumerate_paths(n, v, w)
                    assert len(set(paths)) == len(paths)
                    assert len(paths) == counts.get((v, w), 0)


# -- minimal common extensions ----------------------------------------------

def test_mce_equal_paths(bundled):
    for g in bundled.values():
        for mu in g.paths_upto((1, 1)):
            v = g.vertex(mu.source)
            assert g.minimal_common_extensions(mu, mu) == ((v, v),)


def test_mce_different_ranges():
    g = fixtures.two_vertex()
    mu = next(p for p in g.enumerate_paths((1, 0)) if p.range == "u")
    nu = next(p for p in g.enumerate_paths((0, 1)) if p.range == "w")
    assert g.minimal_common_extensions(mu, nu) == ()


def _mce_cases(g, bound):
    paths = g.paths_upto(bound)
    for mu in paths:
        for nu in paths:
            yield mu, nu


@pytest.mark.parametrize("name", ["gamma", "two_vertex", "single_2_3"])
def test_mce_against_bruteforce(bundled, name):
    g = bundled[name]
    for mu, nu in _mce_cases(g, (1, 1)):
        got = g.minimal_common_extensions(mu, nu)
        for eta, zeta in got:
            assert K.meet(eta.degree, zeta.degree) == (0, 0)
            assert g.compose(mu, eta) == g.compose(nu, zeta)
        want = oracles.mce_bruteforce(g, mu.edges, nu.edges, mu.degree, nu.degree, mu.source, nu.source)
        want = {(oracles.sorted_representative(g, a) if a else (),
                 oracles.sorted_representative(g, b) if b else ()) for a, b in want}
        assert {(a.edges, b.edges) for a, b in got} == want


def test_mce_symmetry(bundled, random_graphs):
    for g in [bundled["gamma"], bundled["two_vertex"]] + random_graphs[:5]:
        for mu, nu in _mce_cases(g, (1, 1)):
            fwd = {(a, b) for a, b in g.minimal_common_extensions(mu, nu)}
            bwd = {(b, a) for a, b in g.minimal_common_extensions(nu, mu)}
            assert fwd == bwd


# -- serialisation ---------------------------------------------------------

def test_round_trip_bytes(tmp_path, bundled, random_graphs):
    for g in list(bundled.values()) + random_graphs[:5]:
        p = tmp_path / "g.json"
        K.save_graph(g, p)
        first = p.read_bytes()
        h = K.load_graph(p)
        assert h == g
        K.save_graph(h, p)
        assert p.read_bytes() == first
        assert K.graph_hash(h) == K.graph_hash(g)


def test_bundled_files_match_builders(bundled):
    for name, g in bundled.items():
        assert fixtures.load(name) == g


def test_load_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"k": 2,\n  "vertices": [\n}')
    with pytest.raises(MalformedSpec) as info:
        K.load_graph(p)
    assert str(p) in str(info.value) and ":3:" in str(info.value)


def test_load_prefixes_location(tmp_path):
    spec = gamma_spec()
    spec["squares"].pop()
    p = tmp_path / "g.json"
    p.write_text(json.dumps(spec))
    with pytest.raises(MissingSquare) as info:
        K.load_graph(p)
    assert str(p) in str(info.value)
