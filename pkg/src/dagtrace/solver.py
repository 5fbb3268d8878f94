"""Exact shortest-path solving on layered graphs.

Two independent routes to the optimum: a bottom-up relaxation over the gaps
(linear in the edge count) and an exhaustive path enumeration that is only
viable on small instances but returns every minimum-cost path. The second
exists to cross-check the first and to decide answer optimality when ties
matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphgen import LayeredGraph

_INF = float("inf")


class StructureError(ValueError):
    """The graph violates a structural assumption (e.g. unreachable destination)."""


class EnumerationLimitError(RuntimeError):
    """Exhaustive enumeration would exceed the configured path cap."""


@dataclass
class Solution:
    """Per-node optima plus the overall best source-to-destination path."""

    best_cost: dict[int, int]
    best_path: dict[int, tuple[int, ...]]
    opt_cost: int
    opt_path: tuple[int, ...]


def solve_dp(g: LayeredGraph) -> Solution:
    """Relax gap by gap; ties broken toward the lowest predecessor id.

    Every reachable node ends up with its exact minimum cumulative cost and
    one witnessing path. Raises StructureError if the destination cannot be
    reached (impossible for generator output, possible for hand-built graphs).
    """

    n = g.num_nodes
    cost: list[float] = [_INF] * n
    cost[g.source] = 0
    pred: list[int] = [-1] * n

    for gap in g.gaps:
        # canonical (src, dst) edge order + strict improvement = lowest-pred ties
        for src, dst, w in gap:
            c = cost[src] + w
            if c < cost[dst]:
                cost[dst] = c
                pred[dst] = src

    if cost[g.destination] == _INF:
        raise StructureError("destination is unreachable from the source")

    best_cost: dict[int, int] = {}
    best_path: dict[int, tuple[int, ...]] = {}
    for node in range(n):
        if cost[node] == _INF:
            continue
        best_cost[node] = int(cost[node])
        chain = [node]
        while chain[-1] != g.source:
            chain.append(pred[chain[-1]])
        best_path[node] = tuple(reversed(chain))

    opt_path = best_path[g.destination]
    return Solution(
        best_cost=best_cost,
        best_path=best_path,
        opt_cost=best_cost[g.destination],
        opt_path=opt_path,
    )


def count_paths(g: LayeredGraph) -> int:
    """Number of distinct source-to-destination paths."""
    counts = [0] * g.num_nodes
    counts[g.source] = 1
    for gap in g.gaps:
        for src, dst, _ in gap:
            counts[dst] += counts[src]
    return counts[g.destination]


def brute_force(
    g: LayeredGraph, max_paths: int = 10_000_000
) -> tuple[int, set[tuple[int, ...]]]:
    """Enumerate every source-to-destination path; return the minimum cost and
    the set of all paths achieving it.

    Exponential in the layer count, so it refuses (EnumerationLimitError) when
    the instance holds more than max_paths paths.
    """

    total = count_paths(g)
    if total > max_paths:
        raise EnumerationLimitError(
            f"instance has {total} paths, above the cap of {max_paths}"
        )
    if total == 0:
        raise StructureError("destination is unreachable from the source")

    out = g.out_edges
    destination = g.destination
    best = _INF
    winners: set[tuple[int, ...]] = set()

    stack: list[tuple[tuple[int, ...], int]] = [((g.source,), 0)]
    while stack:
        path, cost = stack.pop()
        node = path[-1]
        if node == destination:
            if cost < best:
                best = cost
                winners = {path}
            elif cost == best:
                winners.add(path)
            continue
        for nxt, w in out[node]:
            stack.append((path + (nxt,), cost + w))

    return int(best), winners


def path_cost(g: LayeredGraph, path: Sequence[int]) -> int | None:
    """Sum of edge costs along path, or None if some hop is not an edge."""
    if len(path) < 2:
        return None
    costs = g.edge_costs
    total = 0
    for u, v in zip(path, path[1:]):
        w = costs.get((u, v))
        if w is None:
            return None
        total += w
    return total


def is_optimal_answer(
    g: LayeredGraph, path: Iterable[int], declared_cost: int
) -> bool:
    """True iff path is a possible full-length path whose declared cost is both
    its true edge sum and the global optimum.

    Any minimum-cost path qualifies, not only the one solve_dp happens to
    report.
    """

    path = tuple(path)
    if len(path) != g.num_layers:
        return False
    total = path_cost(g, path)
    if total is None or total != declared_cost:
        return False
    # edges always span consecutive layers, so a full-length possible path
    # starts at the source and visits exactly one node per layer
    return declared_cost == solve_dp(g).opt_cost
