"""Finite higher-rank graphs, their Perron-Frobenius data and KMS states.

Modules
-------
kgraph
    Degrees, paths, normal forms, factorisation and minimal common extensions.
spectral
    Vertex matrices, spectral radii, common eigenvectors and resolvents.
kms
    KMS, critical and ground states and their verification.
repsim
    The truncated path representation, used as an independent check.
"""

from .errors import *  # noqa: F401,F403
from .kgraph import KGraph, Path, load_graph, save_graph, validate_graph
from .kms import INF, Dynamics, Kind, Regime, StateSpec

__version__ = "0.1.0"
