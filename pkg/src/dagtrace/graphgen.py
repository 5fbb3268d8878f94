"""Random layered-DAG generation with connectivity repair.

Graphs are drawn from a four-parameter family: a maximum number of edge
groups ("gaps") between consecutive layers, a maximum internal-layer width,
a maximum integer edge cost, and an inter-layer edge probability. The first
and last layers always hold a single node (source and destination), and a
repair pass guarantees every node lies on at least one source-to-destination
path. Node ids are assigned layer by layer, left to right within a layer.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import cached_property

import numpy as np

Edge = tuple[int, int, int]  # (src id, dst id, cost)


class ParameterError(ValueError):
    """Graph-family parameter out of range."""


@dataclass(frozen=True)
class GraphParams:
    """Parameters of the random graph family.

    layers: maximum number of gaps (layers excluding the source), >= 2.
    max_width: maximum internal-layer width, >= 2.
    max_cost: maximum integer edge cost, >= 1 (costs are drawn from 1..max_cost).
    edge_prob: probability of each possible inter-layer edge, in (0, 1].
    """

    layers: int
    max_width: int
    max_cost: int
    edge_prob: float

    def __post_init__(self) -> None:
        if not isinstance(self.layers, int) or self.layers < 2:
            raise ParameterError(f"layers must be an integer >= 2, got {self.layers!r}")
        if not isinstance(self.max_width, int) or self.max_width < 2:
            raise ParameterError(f"max_width must be an integer >= 2, got {self.max_width!r}")
        if not isinstance(self.max_cost, int) or self.max_cost < 1:
            raise ParameterError(f"max_cost must be an integer >= 1, got {self.max_cost!r}")
        if not (0.0 < self.edge_prob <= 1.0):
            raise ParameterError(f"edge_prob must be in (0, 1], got {self.edge_prob!r}")

    def to_dict(self) -> dict:
        return {
            "layers": self.layers,
            "max_width": self.max_width,
            "max_cost": self.max_cost,
            "edge_prob": self.edge_prob,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GraphParams":
        return cls(d["layers"], d["max_width"], d["max_cost"], d["edge_prob"])


@dataclass(eq=True)
class LayeredGraph:
    """A layered DAG with integer edge costs.

    layer_sizes lists every layer's width, source and destination included,
    so it always starts and ends with 1. gaps[i] holds the edges from layer i
    to layer i+1 as (src, dst, cost) triples in ascending (src, dst) order,
    with node ids global and layer-major.
    """

    layer_sizes: list[int]
    gaps: list[list[Edge]]

    @property
    def num_gaps(self) -> int:
        return len(self.gaps)

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def num_nodes(self) -> int:
        return sum(self.layer_sizes)

    @property
    def source(self) -> int:
        return 0

    @property
    def destination(self) -> int:
        return self.num_nodes - 1

    @cached_property
    def layer_offsets(self) -> list[int]:
        """layer_offsets[l] is the id of the first node in layer l."""
        offsets = [0]
        for size in self.layer_sizes:
            offsets.append(offsets[-1] + size)
        return offsets

    def layer_nodes(self, layer: int) -> range:
        return range(self.layer_offsets[layer], self.layer_offsets[layer + 1])

    def node_layer(self, node: int) -> int:
        if not 0 <= node < self.num_nodes:
            raise ValueError(f"node {node} out of range")
        return bisect.bisect_right(self.layer_offsets, node) - 1

    @cached_property
    def out_edges(self) -> list[list[tuple[int, int]]]:
        """Per node, the (dst, cost) pairs of its outgoing edges."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.num_nodes)]
        for gap in self.gaps:
            for src, dst, cost in gap:
                adj[src].append((dst, cost))
        return adj

    @cached_property
    def in_edges(self) -> list[list[tuple[int, int]]]:
        """Per node, the (src, cost) pairs of its incoming edges."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.num_nodes)]
        for gap in self.gaps:
            for src, dst, cost in gap:
                adj[dst].append((src, cost))
        return adj

    @cached_property
    def edge_costs(self) -> dict[tuple[int, int], int]:
        return {(src, dst): cost for gap in self.gaps for src, dst, cost in gap}

    @cached_property
    def max_edge_cost(self) -> int:
        return max(cost for gap in self.gaps for _, _, cost in gap)

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "gaps": [[list(edge) for edge in gap] for gap in self.gaps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayeredGraph":
        return cls(
            layer_sizes=[int(s) for s in d["layer_sizes"]],
            gaps=[[(int(e[0]), int(e[1]), int(e[2])) for e in gap] for gap in d["gaps"]],
        )


def sample_graph(params: GraphParams, seed: int) -> LayeredGraph:
    """Sample one layered graph, deterministically for a given (params, seed).

    Sampling order: number of gaps uniform on 2..layers, each internal width
    uniform on 2..max_width, then per gap a Bernoulli(edge_prob) mask with
    costs uniform on 1..max_cost, then the repair pass (missing out-edges
    fixed first, then missing in-edges, layers in ascending order).
    """

    rng = np.random.default_rng(seed)
    n_gaps = int(rng.integers(2, params.layers + 1))
    widths = rng.integers(2, params.max_width + 1, size=n_gaps - 1)
    layer_sizes = [1, *(int(w) for w in widths), 1]

    offsets = [0]
    for size in layer_sizes:
        offsets.append(offsets[-1] + size)

    gap_masks: list[np.ndarray] = []
    gap_costs: list[np.ndarray] = []
    for g in range(n_gaps):
        a, b = layer_sizes[g], layer_sizes[g + 1]
        gap_masks.append(rng.random((a, b)) < params.edge_prob)
        gap_costs.append(rng.integers(1, params.max_cost + 1, size=(a, b)))

    # Forward repair: every node outside the final layer needs an out-edge.
    for g in range(n_gaps):
        mask = gap_masks[g]
        for i in range(layer_sizes[g]):
            if not mask[i].any():
                j = int(rng.integers(layer_sizes[g + 1]))
                mask[i, j] = True
                gap_costs[g][i, j] = int(rng.integers(1, params.max_cost + 1))

    # Backward repair: every node but the source needs an in-edge.
    for g in range(n_gaps):
        mask = gap_masks[g]
        for j in range(layer_sizes[g + 1]):
            if not mask[:, j].any():
                i = int(rng.integers(layer_sizes[g]))
                mask[i, j] = True
                gap_costs[g][i, j] = int(rng.integers(1, params.max_cost + 1))

    gaps: list[list[Edge]] = []
    for g in range(n_gaps):
        src_base, dst_base = offsets[g], offsets[g + 1]
        rows, cols = np.nonzero(gap_masks[g])
        costs = gap_costs[g]
        # nonzero() is row-major, so edges come out in ascending (src, dst) order
        gaps.append(
            [
                (src_base + int(i), dst_base + int(j), int(costs[i, j]))
                for i, j in zip(rows.tolist(), cols.tolist())
            ]
        )

    return LayeredGraph(layer_sizes=layer_sizes, gaps=gaps)


def validate_graph(g: LayeredGraph, params: GraphParams | None = None) -> list[str]:
    """Check every structural invariant; returns violation messages, empty if valid.

    Bounds that depend on the generating family (layer count <= layers, widths
    <= max_width, costs <= max_cost) are only checked when params is given.
    """

    problems: list[str] = []
    sizes = g.layer_sizes

    if len(sizes) < 3:
        problems.append(f"graph must have at least 3 layers, got {len(sizes)}")
    if sizes and sizes[0] != 1:
        problems.append(f"first layer must have exactly one node, got {sizes[0]}")
    if sizes and sizes[-1] != 1:
        problems.append(f"last layer must have exactly one node, got {sizes[-1]}")
    for idx, size in enumerate(sizes[1:-1], start=1):
        if size < 1:
            problems.append(f"layer {idx} is empty")
        if params is not None and not (2 <= size <= params.max_width):
            problems.append(f"layer {idx} width {size} outside 2..{params.max_width}")
    if params is not None and not (2 <= g.num_gaps <= params.layers):
        problems.append(f"gap count {g.num_gaps} outside 2..{params.layers}")

    if len(g.gaps) != len(sizes) - 1:
        problems.append(f"expected {len(sizes) - 1} gaps, got {len(g.gaps)}")
        return problems  # edge bookkeeping below assumes aligned gaps

    offsets = g.layer_offsets
    n = g.num_nodes
    out_degree = [0] * n
    in_degree = [0] * n
    for gi, gap in enumerate(g.gaps):
        seen: set[tuple[int, int]] = set()
        for src, dst, cost in gap:
            if not (offsets[gi] <= src < offsets[gi + 1]):
                problems.append(f"gap {gi + 1} edge ({src},{dst}) has src outside layer {gi}")
                continue
            if not (offsets[gi + 1] <= dst < offsets[gi + 2]):
                problems.append(f"gap {gi + 1} edge ({src},{dst}) has dst outside layer {gi + 1}")
                continue
            if (src, dst) in seen:
                problems.append(f"gap {gi + 1} has duplicate edge ({src},{dst})")
            seen.add((src, dst))
            if cost < 1:
                problems.append(f"edge ({src},{dst}) cost {cost} below 1")
            if params is not None and cost > params.max_cost:
                problems.append(f"edge ({src},{dst}) cost {cost} above {params.max_cost}")
            out_degree[src] += 1
            in_degree[dst] += 1
        if [e[:2] for e in gap] != sorted(e[:2] for e in gap):
            problems.append(f"gap {gi + 1} edges not in ascending (src, dst) order")

    last_layer_start = offsets[-2]
    for node in range(n):
        if node < last_layer_start and out_degree[node] == 0:
            problems.append(f"node {node} has no outgoing edge")
        if node != g.source and in_degree[node] == 0:
            problems.append(f"node {node} has no incoming edge")

    return problems


def edge_count(g: LayeredGraph) -> int:
    """Total number of edges across all gaps."""
    return sum(len(gap) for gap in g.gaps)
