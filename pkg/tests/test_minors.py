import itertools
import random

import pytest

from flatgraph.graph import (Graph, complete_graph, complete_multipartite, contract_edge, cycle_graph,
                             delete_edge, path_graph, pattern_graph)
from flatgraph.minors import (MinorBudgetExceeded, forbidden_minor_check, has_minor, has_minor_oracle,
                              is_k4_minor_free)
from oracles import atlas


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def test_identity_and_examples():
    found, model = has_minor(complete_graph(4), complete_graph(4))
    assert found and model.is_valid(complete_graph(4), complete_graph(4))
    assert not has_minor(cycle_graph(5), complete_graph(4))[0]
    assert not has_minor_oracle(cycle_graph(5), complete_graph(4))
    k5e = delete_edge(complete_graph(5), (0, 1))
    found, model = has_minor(k5e, pattern_graph("W4"))
    assert found and model.is_valid(k5e, pattern_graph("W4"))
    assert has_minor_oracle(k5e, pattern_graph("W4"))


def test_k4_free_examples():
    assert is_k4_minor_free(path_graph(7))
    assert is_k4_minor_free(Graph.from_edges(6, [(0, 1), (2, 3), (3, 4)]))
    assert not is_k4_minor_free(pattern_graph("W4"))
    assert is_k4_minor_free(complete_multipartite(2, 3))
    assert has_minor_oracle(pattern_graph("W4"), complete_graph(4))
    assert not has_minor_oracle(complete_multipartite(2, 3), complete_graph(4))


def test_forbidden_minor_check_examples():
    fam = [pattern_graph("K5"), pattern_graph("K222")]
    h, model = forbidden_minor_check(complete_graph(5), fam)
    assert h == pattern_graph("K5") and model.is_valid(complete_graph(5), h)
    assert forbidden_minor_check(complete_graph(4), [pattern_graph("W4"), pattern_graph("K4eK4")]) is None
    h, _ = forbidden_minor_check(pattern_graph("K222"), fam)
    assert h == pattern_graph("K222")


def test_budget_is_reported():
    with pytest.raises(MinorBudgetExceeded) as info:
        has_minor(complete_graph(9), complete_graph(7), budget=5)
    assert info.value.budget == 5


@pytest.mark.parametrize("name", ["K3", "K4", "W4"])
def test_models_validate_on_atlas(name):
    h = pattern_graph(name)
    for g in atlas(6):
        found, model = has_minor(g, h)
        if found:
            assert model.is_valid(g, h)


def test_k4_free_matches_search_on_random_corpus():
    rng = random.Random(20261016)
    count = 0
    for _ in range(600):
        n = rng.randint(1, 9)
        g = random_graph(rng, n, rng.choice([0.2, 0.35, 0.5, 0.7]))
        assert is_k4_minor_free(g) == (not has_minor(g, complete_graph(4))[0]), g
        count += 1
    assert count >= 500


def test_two_trees_with_extra_edge_contain_k4():
    # adding any chord across a 2-tree that is not already present yields a K4 minor
    g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
    assert is_k4_minor_free(g)
    assert not is_k4_minor_free(g.add_edge((0, 4)))


def test_minor_monotonicity_on_chains():
    rng = random.Random(7)
    patterns = [pattern_graph("K3"), pattern_graph("K4"), pattern_graph("W4")]
    for _ in range(40):
        g = random_graph(rng, rng.randint(5, 8), 0.55)
        chain = [g]
        while chain[-1].m:
            e = rng.choice(chain[-1].sorted_edges())
            op = rng.choice([delete_edge, contract_edge])
            chain.append(op(chain[-1], e))
        for h in patterns:
            flags = [has_minor(x, h)[0] for x in chain]
            # once a pattern disappears down the chain it never comes back
            for a, b in zip(flags, flags[1:]):
                assert a or not b
