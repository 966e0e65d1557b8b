"""
Critical and ground states
==========================

At beta = 1 the state is built from the common Perron-Frobenius
eigenvector.  Whether it is the only one depends on the logarithms of the
spectral radii, which a continued-fraction scan tests heuristically.
"""

import math

import numpy as np

from kgraph_kms import fixtures, kms, repsim

for name in ("single_2_3", "gamma"):
    g = fixtures.build(name)
    st = kms.kms1_state(g)
    print(f"{name:11s} m={st.m} unique={st.unique} {kms.independence_dict(st.independence)}")

# %%
# The scan only looks at convergents; ln 2 and ln 3 never come closer than
# about 6e-8 for denominators up to a million.
print(kms.rational_independence([math.log(2), math.log(3)]))
print(kms.rational_independence([math.log(2), math.log(8)]))

# %%
# Ground states: as beta grows, the states with eps proportional to a
# vertex measure converge to that measure.
g = fixtures.two_vertex()
dyn = kms.Dynamics.preferred_for(g)
for eps in ([0.5, 0.5], [1.0, 0.0]):
    print(eps, ["%.2e" % e for e in kms.ground_limit(g, dyn, np.array(eps))])

gs = kms.ground_state(g, dyn, [0.5, 0.5])
print(repsim.ground_condition_check(gs, dyn, (1, 1))["passes"])

# %%
# With a negative entry in r the vector state at a blue edge is not
# bounded in the upper half plane.
h = fixtures.single_vertex(1, 1)
for y in (1, 5, 10):
    print(y, repsim.ground_modulus(h, (-1, 1), "b0", y))
