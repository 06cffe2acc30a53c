from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given

from conftest import hypergraphs
from oracles import brute_mu, milp_mu
from hypermatch.errors import BudgetExceeded
from hypermatch.generators import GeometricConfig, random_geometric_hypergraph, random_uniform_hypergraph
from hypermatch.hypergraph import build_hypergraph, greedy_maximal_matching
from hypermatch.oracle import matching_number, maximum_matching_exact


def test_single_edge_and_empty():
    assert len(maximum_matching_exact(build_hypergraph(3, 3, [[0, 1, 2]]))) == 1
    assert len(maximum_matching_exact(build_hypergraph(5, 3, []))) == 0


def test_planted_perfect_matching():
    rng = np.random.default_rng(3)
    planted = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    extra = set()
    while len(extra) < 5:
        e = tuple(sorted(rng.choice(9, 3, replace=False).tolist()))
        if list(e) not in planted:
            extra.add(e)
    edges = sorted(extra) + planted  # planted edges last, so greedy order does not help
    G = build_hypergraph(9, 3, edges)
    M = maximum_matching_exact(G)
    assert len(M) == 3


def test_greedy_trap():
    # natural-order greedy takes the middle edge and blocks both others
    G = build_hypergraph(6, 2, [[1, 2], [0, 1], [2, 3], [4, 5]])
    assert len(greedy_maximal_matching(G)) == 2
    assert len(maximum_matching_exact(G)) == 3


def test_parallel_edges_in_multigraph():
    G = build_hypergraph(6, 3, [[0, 1, 2], [0, 1, 2], [3, 4, 5], [3, 4, 5]], multigraph=True)
    M = maximum_matching_exact(G)
    assert len(M) == 2


def test_budget_exceeded():
    G = random_uniform_hypergraph(30, 300, 3, seed=1)
    with pytest.raises(BudgetExceeded) as info:
        maximum_matching_exact(G, budget=5)
    assert info.value.budget == 5


@given(hypergraphs(max_n=14, max_m=16))
def test_matches_brute_force(G):
    M = maximum_matching_exact(G)
    assert len(M) == brute_mu(G)


def test_disjoint_components_add_up():
    blocks = [list(itertools.combinations(range(b, b + 5), 3)) for b in (0, 5, 10)]
    G = build_hypergraph(15, 3, [e for blk in blocks for e in blk])
    assert matching_number(G) == 3


@pytest.mark.parametrize("seed", range(12))
def test_matches_milp_on_uniform(seed):
    G = random_uniform_hypergraph(30, 300, 3, seed=seed)
    assert matching_number(G) == milp_mu(G)


@pytest.mark.parametrize("seed", [0, 7, 90])
def test_matches_milp_on_geometric(seed):
    G = random_geometric_hypergraph(GeometricConfig(60, 0.25, 3, seed))
    assert matching_number(G) == milp_mu(G)
