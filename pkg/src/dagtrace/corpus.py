"""Reproducible corpus building and corpus-level statistics.

A corpus is a stream of question-trace-answer records, each generated from a
sub-seed mixed out of (corpus seed, record index, resample attempt). Records
whose question duplicates an earlier one, or whose total token length exceeds
the budget, are resampled with the next attempt number, so a corpus is a pure
function of its arguments. Records are stored as JSONL with a stable field
order; byte-identical reruns are part of the contract.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graphgen import GraphParams, LayeredGraph, sample_graph
from .seeding import derive_seed
from .tokenlang import (
    TokenSeq,
    Vocab,
    build_vocab,
    encode_answer,
    encode_question,
    encode_trace,
    parse_generation,
)
from .tracegen import destination_path, generate_trace

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 2048
MAX_RESAMPLE_ATTEMPTS = 200


class CorpusError(ValueError):
    """Corpus construction cannot satisfy its contract."""


@dataclass
class CorpusRecord:
    id: int
    params: GraphParams
    eta: float
    mode: str
    seed: int
    graph: LayeredGraph
    question: TokenSeq
    trace: TokenSeq
    answer: TokenSeq
    num_steps: int
    token_length: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "params": self.params.to_dict(),
            "eta": self.eta,
            "mode": self.mode,
            "seed": self.seed,
            "graph": self.graph.to_dict(),
            "question": {"text": self.question.text, "ids": list(self.question.ids)},
            "trace": {"text": self.trace.text, "ids": list(self.trace.ids)},
            "answer": {"text": self.answer.text, "ids": list(self.answer.ids)},
            "num_steps": self.num_steps,
            "token_length": self.token_length,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CorpusRecord":
        def seq(part: dict) -> TokenSeq:
            return TokenSeq(ids=tuple(int(i) for i in part["ids"]), text=part["text"])

        return cls(
            id=int(d["id"]),
            params=GraphParams.from_dict(d["params"]),
            eta=float(d["eta"]),
            mode=d["mode"],
            seed=int(d["seed"]),
            graph=LayeredGraph.from_dict(d["graph"]),
            question=seq(d["question"]),
            trace=seq(d["trace"]),
            answer=seq(d["answer"]),
            num_steps=int(d["num_steps"]),
            token_length=int(d["token_length"]),
        )


def build_record(
    params: GraphParams,
    vocab: Vocab,
    eta: float,
    mode: str,
    sub_seed: int,
    record_id: int,
) -> CorpusRecord:
    """Generate one record from its sub-seed."""
    g = sample_graph(params, derive_seed(sub_seed, "graph"))
    trace = generate_trace(g, eta, mode, derive_seed(sub_seed, "trace"))
    path, cost = destination_path(trace, g)
    question = encode_question(g, vocab)
    trace_seq = encode_trace(trace, vocab)
    answer_seq = encode_answer(path, cost, vocab)
    return CorpusRecord(
        id=record_id,
        params=params,
        eta=eta,
        mode=trace.mode,
        seed=sub_seed,
        graph=g,
        question=question,
        trace=trace_seq,
        answer=answer_seq,
        num_steps=len(trace.steps),
        token_length=len(question) + len(trace_seq) + len(answer_seq),
    )


def iter_records(
    params: GraphParams,
    eta: float,
    mode: str,
    seed: int,
    max_tokens: int = DEFAULT_MAX_TOKENS,
):
    """Yield an unbounded stream of corpus records for these arguments.

    Question token sequences are unique within the stream; colliding or
    over-long draws are resampled with a bumped attempt number, so the stream
    is a pure function of its arguments regardless of how far it is consumed.
    """
    vocab = build_vocab(params)
    seen_questions: set[str] = set()

    index = 0
    while True:
        record = None
        for attempt in range(MAX_RESAMPLE_ATTEMPTS):
            candidate = build_record(
                params, vocab, eta, mode, derive_seed(seed, index, attempt), index
            )
            if candidate.token_length > max_tokens:
                logger.debug("index %d attempt %d: over length, resampling", index, attempt)
                continue
            if candidate.question.text in seen_questions:
                logger.debug("index %d attempt %d: duplicate question, resampling", index, attempt)
                continue
            record = candidate
            break
        if record is None:
            raise CorpusError(
                f"could not draw a fresh record for index {index} after "
                f"{MAX_RESAMPLE_ATTEMPTS} attempts; the family may be exhausted"
            )
        seen_questions.add(record.question.text)
        yield record
        index += 1


def build_corpus(
    params: GraphParams,
    eta: float,
    mode: str,
    count: int | None,
    seed: int,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    split: float = 0.9,
    token_budget: int | None = None,
) -> tuple[list[CorpusRecord], list[CorpusRecord]]:
    """Build a train/test corpus; fully reproducible from the arguments.

    Stops after `count` records, or, when `token_budget` is set, as soon as
    the summed token length reaches the budget (within one record).
    """
    if count is None and token_budget is None:
        raise CorpusError("one of count or token_budget must be given")
    if count is not None and count < 10 and token_budget is None:
        raise CorpusError(f"count must be >= 10, got {count}")
    if not (0.0 < split < 1.0):
        raise CorpusError(f"split must be in (0, 1), got {split}")

    records: list[CorpusRecord] = []
    total_tokens = 0
    for record in iter_records(params, eta, mode, seed, max_tokens):
        records.append(record)
        total_tokens += record.token_length
        if count is not None and len(records) >= count:
            break
        if token_budget is not None and total_tokens >= token_budget:
            break

    n_train = int(split * len(records))
    return records[:n_train], records[n_train:]


def token_budget(records: Iterable[CorpusRecord], include_pad: bool = False) -> int:
    """Summed token length of the records.

    Stored records never contain padding, so include_pad changes nothing
    here; the flag mirrors the accounting switch training harnesses need.
    """
    return sum(r.token_length for r in records)


@dataclass
class StepSummary:
    mean: float
    std: float
    count: int


@dataclass
class CorpusStats:
    step_stats: dict[tuple[float, str], StepSummary]
    trace_token_hist: dict[int, int]
    addition_counts: dict[tuple[int, int], int]

    def to_json_dict(self) -> dict:
        return {
            "step_stats": [
                {
                    "eta": eta,
                    "mode": mode,
                    "mean": summary.mean,
                    "std": summary.std,
                    "count": summary.count,
                }
                for (eta, mode), summary in sorted(self.step_stats.items())
            ],
            "trace_token_hist": {
                str(k): v for k, v in sorted(self.trace_token_hist.items())
            },
            "addition_counts": [
                {"accumulated": acc, "edge": edge, "count": c}
                for (acc, edge), c in sorted(self.addition_counts.items())
            ],
        }


def compute_stats(records: Sequence[CorpusRecord]) -> CorpusStats:
    """Step-count statistics per (eta, mode), trace-length histogram, and the
    distribution of integer additions performed across all trace steps.

    Each statement's addition is (cost so far, final edge cost): the step's
    stated cumulative cost minus its last edge, paired with that edge.
    """
    steps_by_setting: dict[tuple[float, str], list[int]] = defaultdict(list)
    hist: Counter[int] = Counter()
    additions: Counter[tuple[int, int]] = Counter()
    vocab_cache: dict[GraphParams, Vocab] = {}

    for record in records:
        steps_by_setting[(record.eta, record.mode)].append(record.num_steps)
        hist[len(record.trace.ids)] += 1
        vocab = vocab_cache.get(record.params)
        if vocab is None:
            vocab = vocab_cache.setdefault(record.params, build_vocab(record.params))
        costs = record.graph.edge_costs
        parsed = parse_generation(record.trace.text, vocab)
        for path, cost in parsed.steps:
            w = costs.get((path[-2], path[-1]))
            if w is None:
                raise CorpusError(
                    f"record {record.id} has a trace step over a missing edge"
                )
            additions[(cost - w, w)] += 1

    step_stats = {
        key: StepSummary(
            mean=float(np.mean(counts)),
            std=float(np.std(counts)),
            count=len(counts),
        )
        for key, counts in steps_by_setting.items()
    }
    return CorpusStats(
        step_stats=step_stats,
        trace_token_hist=dict(hist),
        addition_counts=dict(additions),
    )


def write_jsonl(records: Iterable[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json_dict(), separators=(",", ":")))
            fh.write("\n")


def read_jsonl(path: str | Path) -> list[CorpusRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(CorpusRecord.from_json_dict(json.loads(line)))
    return records
