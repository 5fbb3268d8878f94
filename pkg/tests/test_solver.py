import pytest

from dagtrace import (
    EnumerationLimitError,
    GraphParams,
    LayeredGraph,
    StructureError,
    brute_force,
    count_paths,
    is_optimal_answer,
    path_cost,
    sample_graph,
    solve_dp,
)

TIE_GRAPH = LayeredGraph(
    layer_sizes=[1, 2, 1],
    gaps=[[(0, 1, 1), (0, 2, 1)], [(1, 3, 1), (2, 3, 1)]],
)


def test_worked_example(fig_graph):
    sol = solve_dp(fig_graph)
    assert sol.opt_cost == 4
    assert sol.opt_path == (0, 2, 3, 4)
    assert sol.best_cost == {0: 0, 1: 2, 2: 1, 3: 3, 4: 4}
    assert sol.best_path[3] == (0, 2, 3)


def test_single_chain():
    g = LayeredGraph(layer_sizes=[1, 1, 1], gaps=[[(0, 1, 3)], [(1, 2, 2)]])
    sol = solve_dp(g)
    assert sol.opt_cost == 5
    assert sol.opt_path == (0, 1, 2)
    assert brute_force(g) == (5, {(0, 1, 2)})


def test_brute_force_worked_example(fig_graph):
    assert brute_force(fig_graph) == (4, {(0, 2, 3, 4)})


def test_brute_force_returns_all_ties():
    cost, winners = brute_force(TIE_GRAPH)
    assert cost == 2
    assert winners == {(0, 1, 3), (0, 2, 3)}


def test_dp_breaks_ties_toward_lowest_predecessor():
    assert solve_dp(TIE_GRAPH).opt_path == (0, 1, 3)


def test_oracle_equivalence_on_random_instances():
    params = GraphParams(layers=5, max_width=4, max_cost=5, edge_prob=0.6)
    for seed in range(300):
        g = sample_graph(params, seed)
        sol = solve_dp(g)
        min_cost, winners = brute_force(g)
        assert sol.opt_cost == min_cost, f"seed {seed}"
        assert sol.opt_path in winners, f"seed {seed}"


def test_relaxation_is_tight_everywhere():
    params = GraphParams(layers=6, max_width=5, max_cost=4, edge_prob=0.5)
    for seed in range(200):
        g = sample_graph(params, seed)
        sol = solve_dp(g)
        best = sol.best_cost
        assert set(best) == set(range(g.num_nodes))  # all nodes reachable
        for gap in g.gaps:
            for u, v, c in gap:
                assert best[v] <= best[u] + c
        for node in range(1, g.num_nodes):
            assert any(best[node] == best[u] + c for u, c in g.in_edges[node])
        assert g.num_gaps <= sol.opt_cost <= g.max_edge_cost * g.num_gaps


def test_best_paths_are_consistent():
    params = GraphParams(layers=5, max_width=4, max_cost=5, edge_prob=0.7)
    for seed in range(100):
        g = sample_graph(params, seed)
        sol = solve_dp(g)
        for node, path in sol.best_path.items():
            assert path[0] == g.source
            assert path[-1] == node
            assert path_cost(g, path) == sol.best_cost[node] or node == g.source


def test_brute_force_refuses_oversized_instances():
    params = GraphParams(layers=6, max_width=5, max_cost=3, edge_prob=1.0)
    g = next(
        g
        for g in (sample_graph(params, seed) for seed in range(100))
        if count_paths(g) > 10
    )
    with pytest.raises(EnumerationLimitError):
        brute_force(g, max_paths=10)


def test_unreachable_destination_is_a_structure_error():
    g = LayeredGraph(layer_sizes=[1, 2, 1], gaps=[[(0, 1, 1), (0, 2, 1)], []])
    with pytest.raises(StructureError):
        solve_dp(g)
    with pytest.raises(StructureError):
        brute_force(g)


def test_is_optimal_answer_worked_example(fig_graph):
    assert is_optimal_answer(fig_graph, [0, 2, 3, 4], 4)
    # cost-consistent but not minimal
    assert path_cost(fig_graph, (0, 1, 3, 4)) == 6
    assert not is_optimal_answer(fig_graph, [0, 1, 3, 4], 6)
    # minimal declared cost but inconsistent with the stated path
    assert not is_optimal_answer(fig_graph, [0, 2, 3, 4], 3)


def test_is_optimal_answer_accepts_any_tied_minimum():
    assert is_optimal_answer(TIE_GRAPH, [0, 1, 3], 2)
    assert is_optimal_answer(TIE_GRAPH, [0, 2, 3], 2)


def test_is_optimal_answer_rejects_malformed_paths(fig_graph):
    assert not is_optimal_answer(fig_graph, [], 4)
    assert not is_optimal_answer(fig_graph, [0, 2, 3], 3)  # wrong length
    assert not is_optimal_answer(fig_graph, [0, 1, 2, 4], 4)  # not edges
    assert not is_optimal_answer(fig_graph, [0, 3, 3, 4], 4)
