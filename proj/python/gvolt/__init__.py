"""Grounded metric voltage functions on sampled manifolds."""

from ._gvolt import (
    EmptySourceError,
    Graph,
    IllPosedError,
    Manifold,
    NumericalError,
    ValidationError,
    baseline,
    build_graph,
    effective_resistance,
    embed,
    extend,
    mds,
    procrustes,
    radial_profile,
    sample,
    satisfies_max_principle,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "EmptySourceError",
    "Graph",
    "IllPosedError",
    "Manifold",
    "NumericalError",
    "ValidationError",
    "baseline",
    "build_graph",
    "effective_resistance",
    "embed",
    "extend",
    "mds",
    "procrustes",
    "radial_profile",
    "sample",
    "satisfies_max_principle",
    "solve",
]
