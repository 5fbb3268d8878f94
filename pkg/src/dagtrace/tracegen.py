"""Reasoning-trace emission for layered shortest-path instances.

A weighted queue of frontier edges drives the exploration: each queue entry
is one (src, dst) edge waiting to be tried, weighted by exp(-eta * (gap + 1))
so that the efficiency temperature eta biases removal order toward shallow
gaps (eta > 0, layer-by-layer sweep) or deep gaps (eta < 0, depth-first with
backtracking). Every removal emits one partial-path statement; an improvement
of the destination node's best known cost commits the new path and enqueues
its continuations. |eta| >= 5 is treated as a strict ordering.

Two redundancy injectors sit on top: "rr" skips the commit of a removed entry
with probability 1/2 and re-queues it (so its statement recurs later), "dr"
emits every statement twice back to back.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graphgen import GraphParams, LayeredGraph, edge_count, sample_graph
from .seeding import derive_seed
from .solver import path_cost, solve_dp

MODES = ("plain", "rr", "dr")

# at |eta| >= 5 the exponential weights collapse to a strict gap ordering
ORDERING_ETA = 5.0

_INF = float("inf")


class TraceStep(NamedTuple):
    path: tuple[int, ...]
    cost: int


@dataclass
class Trace:
    steps: list[TraceStep]
    eta: float
    mode: str
    seed: int


@dataclass
class CriteriaReport:
    """Outcome of the four trace-quality criteria."""

    correct_statements: bool
    incremental: bool
    best_prefix: bool
    complete: bool

    def all_ok(self) -> bool:
        return (
            self.correct_statements
            and self.incremental
            and self.best_prefix
            and self.complete
        )


@dataclass
class StepStats:
    mean: float
    std: float
    n_samples: int


def step_weight(gap: int, eta: float) -> float:
    """Queue weight of an entry exploring the given gap (1-indexed)."""
    return math.exp(-eta * (gap + 1))


def _removal_bound(g: LayeredGraph) -> int:
    # each commit strictly lowers an integer cost bounded by max_cost * gaps,
    # so entries cannot recirculate forever
    return edge_count(g) * (g.max_edge_cost * g.num_gaps + 1)


# a queue entry, kept as a plain tuple in the hot loop
Entry = tuple[int, int, int, int, float]  # (src, dst, edge cost, gap, weight)


class ExplorationQueue:
    """The frontier of (src, dst) edges waiting to be tried.

    Entries are unique by (src, dst) and carry the weight assigned at insert
    time: step_weight(gap, eta), except the initial source edges at weight 1.
    Removal order follows the eta regime: strictly ordered by gap for
    |eta| >= ORDERING_ETA (uniform inside the extreme gap), uniform over the
    whole queue at eta = 0, and weight-proportional otherwise.
    """

    def __init__(self, eta: float, rng: random.Random):
        self.eta = eta
        self.ordered = eta >= ORDERING_ETA or eta <= -ORDERING_ETA
        self.weighted = not self.ordered and eta != 0.0
        self.deepest_first = eta < 0
        self.members: set[tuple[int, int]] = set()
        self._randrange = rng.randrange
        self._random = rng.random
        if self.ordered:
            self.buckets: dict[int, list[Entry]] = {}
            self.pop = self._pop_ordered
        else:
            self.pool: list[Entry] = []
            self.pop = self._pop_weighted if self.weighted else self._pop_uniform

    def __bool__(self) -> bool:
        return bool(self.members)

    def __contains__(self, edge: tuple[int, int]) -> bool:
        return edge in self.members

    def push(self, entry: Entry) -> None:
        self.members.add((entry[0], entry[1]))
        if self.ordered:
            bucket = self.buckets.get(entry[3])
            if bucket is None:
                self.buckets[entry[3]] = [entry]
            else:
                bucket.append(entry)
        else:
            self.pool.append(entry)

    def _take(self, pool: list[Entry], i: int) -> Entry:
        entry = pool[i]
        pool[i] = pool[-1]
        pool.pop()
        self.members.discard((entry[0], entry[1]))
        return entry

    def _pop_ordered(self) -> Entry:
        buckets = self.buckets
        key = max(buckets) if self.deepest_first else min(buckets)
        pool = buckets[key]
        n = len(pool)
        entry = self._take(pool, self._randrange(n) if n > 1 else 0)
        if not pool:
            del buckets[key]
        return entry

    def _pop_uniform(self) -> Entry:
        pool = self.pool
        n = len(pool)
        return self._take(pool, self._randrange(n) if n > 1 else 0)

    def _pop_weighted(self) -> Entry:
        pool = self.pool
        total = 0.0
        for e in pool:
            total += e[4]
        r = self._random() * total
        i = 0
        acc = pool[0][4]
        while acc < r and i < len(pool) - 1:
            i += 1
            acc += pool[i][4]
        return self._take(pool, i)


def _explore(
    g: LayeredGraph,
    eta: float,
    mode: str,
    rng: random.Random,
    collect: bool,
) -> tuple[list[TraceStep] | None, int]:
    """Run the exploration; returns (steps or None, number of removals).

    The control flow (and hence the RNG stream) is identical whether or not
    step paths are materialized, so counting runs reproduce collected runs.
    """

    out = g.out_edges
    n = g.num_nodes
    source = g.source
    best_cost: list[float] = [_INF] * n
    best_cost[source] = 0
    best_path: list[tuple[int, ...] | None] = [None] * n
    best_path[source] = (source,)

    queue = ExplorationQueue(eta, rng)
    for dst, w in out[source]:
        queue.push((source, dst, w, 1, 1.0))

    steps: list[TraceStep] | None = [] if collect else None
    is_rr = mode == "rr"
    is_dr = mode == "dr"
    removals = 0
    guard = _removal_bound(g)
    rand = rng.random
    pop = queue.pop
    push = queue.push
    members = queue.members

    while members:
        entry = pop()
        src, dst, w, gap, _ = entry
        removals += 1
        if removals > guard:
            raise RuntimeError(
                f"exploration exceeded the removal bound of {guard}; "
                "the queue discipline is broken"
            )

        c = best_cost[src] + w
        if collect:
            step = TraceStep(best_path[src] + (dst,), int(c))
            steps.append(step)
            if is_dr:
                steps.append(step)

        if is_rr and rand() < 0.5:
            # disregard this removal: no commit, entry recurs with its old weight
            push(entry)
            continue

        if c < best_cost[dst]:
            best_cost[dst] = c
            if collect:
                best_path[dst] = best_path[src] + (dst,)
            next_gap = gap + 1
            for nxt, w2 in out[dst]:
                if (dst, nxt) not in members:
                    push((dst, nxt, w2, next_gap, step_weight(next_gap, eta)))

    return steps, removals


def _normalize_mode(mode: str) -> str:
    m = mode.lower()
    if m not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return m


def generate_trace(g: LayeredGraph, eta: float, mode: str, seed: int) -> Trace:
    """Emit one reasoning trace for g; deterministic given (g, eta, mode, seed)."""
    m = _normalize_mode(mode)
    rng = random.Random(seed)
    steps, _ = _explore(g, eta, m, rng, collect=True)
    assert steps is not None
    return Trace(steps=steps, eta=eta, mode=m, seed=seed)


def count_trace_steps(g: LayeredGraph, eta: float, mode: str, seed: int) -> int:
    """Step count of the trace generate_trace would emit, without building it."""
    m = _normalize_mode(mode)
    rng = random.Random(seed)
    _, removals = _explore(g, eta, m, rng, collect=False)
    return removals * 2 if m == "dr" else removals


def _replay(steps: list[TraceStep], g: LayeredGraph):
    """Replay statements in order, tracking each node's best claimed cost and
    the set of stated paths achieving it (ties included).

    Yields (step, prefix_ok) where prefix_ok says the step's path prefix was
    one of the best known paths to the prefix endpoint at that moment.
    """

    source = g.source
    bc: dict[int, int] = {source: 0}
    bp: dict[int, set[tuple[int, ...]]] = {source: {(source,)}}
    for step in steps:
        path, cost = step.path, step.cost
        if len(path) == 2:
            prefix_ok = path[0] == source
        else:
            prefix_ok = path[:-1] in bp.get(path[-2], ())
        yield step, prefix_ok
        end = path[-1]
        known = bc.get(end)
        if known is None or cost < known:
            bc[end] = cost
            bp[end] = {path}
        elif cost == known:
            bp[end].add(path)


def replay_best(steps: list[TraceStep], g: LayeredGraph) -> dict[int, tuple[int, ...]]:
    """Best stated path per node after replaying all statements (first stated
    among equal-cost ties)."""
    source = g.source
    bc: dict[int, int] = {source: 0}
    best: dict[int, tuple[int, ...]] = {source: (source,)}
    for path, cost in steps:
        end = path[-1]
        known = bc.get(end)
        if known is None or cost < known:
            bc[end] = cost
            best[end] = path
    return best


def destination_path(t: Trace, g: LayeredGraph) -> tuple[tuple[int, ...], int]:
    """The optimal path the trace discovered, as (path, cost)."""
    best = replay_best(t.steps, g)
    path = best.get(g.destination)
    if path is None:
        raise ValueError("trace never reaches the destination")
    cost = path_cost(g, path)
    assert cost is not None
    return path, cost


def check_criteria(t: Trace, g: LayeredGraph) -> CriteriaReport:
    """Evaluate the four trace-quality criteria by replaying t against g."""
    source = g.source
    correct = True
    incremental = True
    best_prefix = True
    seen_paths: set[tuple[int, ...]] = set()

    for step, prefix_ok in _replay(t.steps, g):
        path, cost = step.path, step.cost
        if path[0] != source or path_cost(g, path) != cost:
            correct = False
        if len(path) != 2 and path[:-1] not in seen_paths:
            incremental = False
        if not prefix_ok:
            best_prefix = False
        seen_paths.add(path)

    best = replay_best(t.steps, g)
    final = best.get(g.destination)
    complete = (
        final is not None and path_cost(g, final) == solve_dp(g).opt_cost
    )
    return CriteriaReport(
        correct_statements=correct,
        incremental=incremental,
        best_prefix=best_prefix,
        complete=complete,
    )


def trace_stats(
    params: GraphParams, eta: float, mode: str, n_samples: int, seed: int
) -> StepStats:
    """Mean and standard deviation of the step count over n_samples fresh
    (graph, trace) draws; sample i uses sub-seeds derived from (seed, i)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    m = _normalize_mode(mode)
    counts = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        g = sample_graph(params, derive_seed(seed, i, "graph"))
        counts[i] = count_trace_steps(g, eta, m, derive_seed(seed, i, "trace"))
    return StepStats(
        mean=float(counts.mean()), std=float(counts.std()), n_samples=n_samples
    )
