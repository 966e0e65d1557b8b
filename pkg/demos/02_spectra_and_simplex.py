"""
Vertex matrices and the simplex of KMS states
=============================================

A two-vertex 2-graph with commuting vertex matrices, its Perron-Frobenius
data, and the one-parameter family of equilibrium states above the critical
inverse temperature.
"""

import numpy as np

from kgraph_kms import fixtures, kms, spectral
from kgraph_kms.errors import SpectralPreconditionViolated

g = fixtures.two_vertex()
A1, A2 = (A.entries for A in spectral.vertex_matrices(g))
print("A1 =\n", A1)
print("A2 =\n", A2)
print("A1 A2 == A2 A1:", (A1 @ A2 == A2 @ A1).all())

sd = spectral.common_pf_eigenvector(g)
print("rho =", sd.rho, " x =", sd.x)

# %%
# Preferred dynamics puts the critical inverse temperature at 1.
dyn = kms.Dynamics.preferred_for(g)
for beta in (0.8, 1.0, 1.5):
    print(beta, kms.classify_temperature(g, dyn, beta).regime.value)

# %%
# Above it, y_v sums the weights of all paths ending at v, and the states
# are parametrised by eps >= 0 with eps . y = 1.
beta = 1.5
y = kms.y_vector(g, dyn, beta)
print("y =", y)

summary = kms.simplex_summary(g, dyn, beta)
for pt in summary["extreme_points"]:
    print(pt["vertex"], "eps", np.round(pt["eps"], 6), "m", np.round(pt["m"], 6))

# %%
# Check the KMS condition on all products of spanning elements up to
# degree (1, 1), and do the same for a state whose vertex values are nudged.
st = kms.kms_state_from_eps(g, dyn, beta, kms.extreme_eps(g, dyn, beta)[0])
print("residual", kms.verify_kms_condition(st, dyn, beta, (1, 1)))
print("nudged  ", kms.verify_kms_condition(st.perturbed([0.01, 0.0]), dyn, beta, (1, 1)))

# %%
# Below the critical temperature there is nothing to construct.
try:
    kms.kms_state_from_eps(g, dyn, 0.9, [0.5, 0.5], rescale=True)
except SpectralPreconditionViolated as exc:
    print("refused:", exc)
print("subinvariant samples at 0.9:", kms.count_subinvariant_samples(g, dyn, 0.9))
