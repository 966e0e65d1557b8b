"""
Paths, normal forms and common extensions
=========================================

A 2-graph is stored as its coloured edges plus the squares that say how a
blue-red word equals a red-blue word.  This walks through the one-vertex
graph with blue edges e, f and red edges a, b.
"""

from kgraph_kms import fixtures
from kgraph_kms.errors import MissingSquare
from kgraph_kms.kgraph import graph_to_spec, validate_graph

g = fixtures.gamma()
print(g)
for sq in g.squares:
    print(f"  {sq.e}{sq.f} = {sq.f_prime}{sq.e_prime}")

# %%
# Every path has a normal form with the blue edges first.  The word ``b e``
# (red then blue) is rewritten by reading a square backwards.
p = g.path(["b", "e"])
print("b e  ->", " ".join(p.edges), "degree", p.degree)

# composition respects the squares
print(g.compose(g.path("e"), g.path("b")) == g.compose(g.path("a"), g.path("f")))

# %%
# Factor a longer path at an intermediate degree and put it back together.
q = g.path(["e", "a", "f", "b", "e"])
head, tail = g.factor(q, (1, 1))
print(" ".join(q.edges), "=", " ".join(head.edges), "|", " ".join(tail.edges))
assert g.compose(head, tail) == q

# %%
# Minimal common extensions of a blue and a red edge: all ways to complete
# ``e`` and ``a`` to a common path of degree (1, 1).
for eta, zeta in g.minimal_common_extensions(g.path("e"), g.path("a")):
    print(f"e.{''.join(eta.edges)} = a.{''.join(zeta.edges)}")

# two different blue edges never extend to a common path
print(g.minimal_common_extensions(g.path("e"), g.path("f")))

# %%
# Validation catches an incomplete square set.
spec = graph_to_spec(g)
spec["squares"] = spec["squares"][:-1]
try:
    validate_graph(spec)
except MissingSquare as exc:
    print("rejected:", exc)
