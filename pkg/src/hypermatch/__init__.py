"""Parallel (MPC-style) maximum matching in d-uniform hypergraphs."""

from .algorithms import MpcResult, greedy_coreset, hedcs_matching, iterated_sampling
from .errors import (AttemptsExhausted, BudgetExceeded, MemoryViolation, ParameterGap,
                     ParseError, SampleOverflow)
from .generators import GeometricConfig, random_geometric_hypergraph, random_uniform_hypergraph
from .hedcs import HedcsParams, construct_hedcs, verify_hedcs
from .hypergraph import Hypergraph, Matching, build_hypergraph, greedy_maximal_matching, is_maximal
from .oracle import maximum_matching_exact

__all__ = [
    "AttemptsExhausted", "BudgetExceeded", "GeometricConfig", "HedcsParams", "Hypergraph",
    "Matching", "MemoryViolation", "MpcResult", "ParameterGap", "ParseError", "SampleOverflow",
    "build_hypergraph", "construct_hedcs", "greedy_coreset", "greedy_maximal_matching",
    "hedcs_matching", "is_maximal", "iterated_sampling", "maximum_matching_exact",
    "random_geometric_hypergraph", "random_uniform_hypergraph", "verify_hedcs",
]
__version__ = "0.1.0"
