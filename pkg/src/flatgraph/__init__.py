"""Flattenability of finite graphs between lp spaces."""

from .decider import FLATTENABLE, NOT_FLATTENABLE, UNKNOWN, Verdict, decide, explain, kn_dim_table
from .edm import ExactMatrix, certificate, edm_realize, is_edm, is_psd_exact, schoenberg_transform
from .graph import (Graph, MinorModel, contract_edge, delete_edge, is_forest, pattern_graph,
                    zero_extension)
from .minors import MinorBudgetExceeded, forbidden_minor_check, has_minor, is_k4_minor_free
from .rigidity import (forest_partition, graded_independence_check, independence_search,
                       is_independent_numeric, norm_gradient, rigidity_matrix)
from .solver import SolveConfig, flatten_witness, p_sweep, solve_realization
from .spaces import (SpaceDescriptor, equilateral_known, frechet_embed, lp_norm, measurement_map,
                     norlander_range)

__version__ = "0.1.0"

__all__ = [
    "FLATTENABLE",
    "NOT_FLATTENABLE",
    "UNKNOWN",
    "Verdict",
    "decide",
    "explain",
    "kn_dim_table",
    "ExactMatrix",
    "certificate",
    "edm_realize",
    "is_edm",
    "is_psd_exact",
    "schoenberg_transform",
    "Graph",
    "MinorModel",
    "contract_edge",
    "delete_edge",
    "is_forest",
    "pattern_graph",
    "zero_extension",
    "MinorBudgetExceeded",
    "forbidden_minor_check",
    "has_minor",
    "is_k4_minor_free",
    "forest_partition",
    "graded_independence_check",
    "independence_search",
    "is_independent_numeric",
    "norm_gradient",
    "rigidity_matrix",
    "SolveConfig",
    "flatten_witness",
    "p_sweep",
    "solve_realization",
    "SpaceDescriptor",
    "equilateral_known",
    "frechet_embed",
    "lp_norm",
    "measurement_map",
    "norlander_range",
]
