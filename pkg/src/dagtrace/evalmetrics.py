"""Scoring of generated token sequences against their question graph.

The scorer is total: any token stream, however broken, yields a full report.
Answer-level booleans capture whether the proposed path is real, full length,
correctly priced, and globally optimal; statement-level counters replay the
trace and track repetition, consistency, and whether each statement builds on
a currently-best sub-path. Ties are respected: when several stated paths to a
node share the best cost, extending any of them counts as building on a best
sub-path.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .graphgen import LayeredGraph, validate_graph
from .solver import path_cost, solve_dp
from .tokenlang import TokenSeq, Vocab, parse_generation, parse_question

_INF = float("inf")


class QuestionDecodeError(ValueError):
    """The question side of a scoring call is not a valid graph encoding."""


@dataclass
class AnswerMetrics:
    is_possible: bool
    is_cost_consistent: bool
    is_cost_optimal: bool
    length_is_correct: bool
    is_correct: bool

    def to_dict(self) -> dict:
        return {
            "is_possible": self.is_possible,
            "is_cost_consistent": self.is_cost_consistent,
            "is_cost_optimal": self.is_cost_optimal,
            "length_is_correct": self.length_is_correct,
            "is_correct": self.is_correct,
        }


@dataclass
class CoTMetrics:
    num_steps: int
    repeated_steps: int
    possible_subpaths: int
    consistent_steps: int
    subproblem_optimal_steps: int
    skipped_subproblem_steps: int
    syntax_errors: int

    def to_dict(self) -> dict:
        return {
            "num_steps": self.num_steps,
            "repeated_steps": self.repeated_steps,
            "possible_subpaths": self.possible_subpaths,
            "consistent_steps": self.consistent_steps,
            "subproblem_optimal_steps": self.subproblem_optimal_steps,
            "skipped_subproblem_steps": self.skipped_subproblem_steps,
            "syntax_errors": self.syntax_errors,
        }


@dataclass
class GenerationReport:
    answer: AnswerMetrics
    cot: CoTMetrics
    trace_token_length: int

    def to_dict(self) -> dict:
        return {
            "answer": self.answer.to_dict(),
            "cot": self.cot.to_dict(),
            "trace_token_length": self.trace_token_length,
        }


@dataclass
class BatchReport:
    count: int
    answer_rates: dict[str, float]
    cot_means: dict[str, float]
    mean_trace_token_length: float
    accuracy_by_depth: dict[int, float]
    counts_by_depth: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "answer_rates": self.answer_rates,
            "cot_means": self.cot_means,
            "mean_trace_token_length": self.mean_trace_token_length,
            "accuracy_by_depth": {str(k): v for k, v in sorted(self.accuracy_by_depth.items())},
            "counts_by_depth": {str(k): v for k, v in sorted(self.counts_by_depth.items())},
        }


def _answer_metrics(
    g: LayeredGraph, answer: tuple[tuple[int, ...], int] | None, opt_cost: int
) -> AnswerMetrics:
    if answer is None:
        return AnswerMetrics(False, False, False, False, False)
    path, declared = answer
    true_cost = path_cost(g, path)
    possible = true_cost is not None
    consistent = possible and true_cost == declared
    optimal = declared == opt_cost
    n = g.num_nodes
    length_ok = len(path) == g.num_layers and all(
        0 <= node < n and g.node_layer(node) == i for i, node in enumerate(path)
    )
    return AnswerMetrics(
        is_possible=possible,
        is_cost_consistent=consistent,
        is_cost_optimal=optimal,
        length_is_correct=length_ok,
        is_correct=possible and consistent and optimal and length_ok,
    )


def _score_with_graph(
    g: LayeredGraph, generated: TokenSeq | str | Sequence[str], v: Vocab
) -> GenerationReport:
    gen = parse_generation(generated, v)
    source = g.source
    costs = g.edge_costs

    best_cost: dict[int, int] = {source: 0}
    best_paths: dict[int, set[tuple[int, ...]]] = {source: {(source,)}}
    seen: set[tuple[int, ...]] = set()
    repeated = possible_ct = consistent_ct = subopt_ct = skipped_ct = 0

    for path, declared in gen.steps:
        if path in seen:
            repeated += 1
        seen.add(path)

        true_cost: int | None = 0 if path[0] == source else None
        if true_cost is not None:
            for u, nxt in zip(path, path[1:]):
                w = costs.get((u, nxt))
                if w is None:
                    true_cost = None
                    break
                true_cost += w
        possible = true_cost is not None
        if possible:
            possible_ct += 1
            if true_cost == declared:
                consistent_ct += 1

        if len(path) == 2:
            if path[0] == source:
                subopt_ct += 1
        elif path[:-1] in best_paths.get(path[-2], ()):
            subopt_ct += 1

        if any(node not in best_cost for node in path[:-1]):
            skipped_ct += 1

        if possible:
            end = path[-1]
            known = best_cost.get(end)
            if known is None or declared < known:
                best_cost[end] = declared
                best_paths[end] = {path}
            elif declared == known:
                best_paths[end].add(path)

    opt_cost = solve_dp(g).opt_cost
    answer = _answer_metrics(g, gen.answer, opt_cost)
    cot = CoTMetrics(
        num_steps=len(gen.steps),
        repeated_steps=repeated,
        possible_subpaths=possible_ct,
        consistent_steps=consistent_ct,
        subproblem_optimal_steps=subopt_ct,
        skipped_subproblem_steps=skipped_ct,
        syntax_errors=len(gen.issues),
    )
    return GenerationReport(
        answer=answer, cot=cot, trace_token_length=gen.trace_token_length
    )


def _decode_question(question: TokenSeq | str | Sequence[str], v: Vocab) -> LayeredGraph:
    graph, issues, _ = parse_question(question, v)
    if graph is None or issues:
        raise QuestionDecodeError(
            f"question does not decode to a graph: {[i.message for i in issues]}"
        )
    problems = validate_graph(graph)
    if problems:
        raise QuestionDecodeError(f"question encodes an invalid graph: {problems}")
    return graph


def score_generation(
    question: TokenSeq | str | Sequence[str],
    generated: TokenSeq | str | Sequence[str],
    v: Vocab,
) -> GenerationReport:
    """Score one generated continuation against its question.

    The question must decode to a valid graph (it is trusted input); the
    generation may be arbitrary garbage and still gets a report.
    """
    return _score_with_graph(_decode_question(question, v), generated, v)


def batch_score(
    questions: Sequence[TokenSeq | str],
    generations: Sequence[TokenSeq | str],
    v: Vocab,
    collect_reports: bool = False,
) -> BatchReport | tuple[BatchReport, list[GenerationReport]]:
    """Aggregate scoring over paired question/generation streams.

    Answer booleans are averaged into rates, statement counters into means,
    and answer accuracy is additionally broken down by graph depth (number
    of gaps).
    """
    if len(questions) != len(generations):
        raise ValueError(
            f"got {len(questions)} questions but {len(generations)} generations"
        )
    if not questions:
        raise ValueError("cannot aggregate an empty stream")

    answer_totals: dict[str, float] = defaultdict(float)
    cot_totals: dict[str, float] = defaultdict(float)
    token_total = 0.0
    by_depth_correct: dict[int, int] = defaultdict(int)
    by_depth_count: dict[int, int] = defaultdict(int)
    reports: list[GenerationReport] = []

    for question, generated in zip(questions, generations):
        graph = _decode_question(question, v)
        report = _score_with_graph(graph, generated, v)
        if collect_reports:
            reports.append(report)
        for key, val in report.answer.to_dict().items():
            answer_totals[key] += val
        for key, val in report.cot.to_dict().items():
            cot_totals[key] += val
        token_total += report.trace_token_length
        depth = graph.num_gaps
        by_depth_count[depth] += 1
        by_depth_correct[depth] += report.answer.is_correct

    n = len(questions)
    batch = BatchReport(
        count=n,
        answer_rates={k: v / n for k, v in answer_totals.items()},
        cot_means={k: v / n for k, v in cot_totals.items()},
        mean_trace_token_length=token_total / n,
        accuracy_by_depth={
            d: by_depth_correct[d] / c for d, c in by_depth_count.items()
        },
        counts_by_depth=dict(by_depth_count),
    )
    if collect_reports:
        return batch, reports
    return batch
