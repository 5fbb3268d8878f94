"""Command-line entry point.

Subcommands: `generate` builds a train/test corpus plus vocab and stats
files, `solve` answers stored questions with the exact solver, `validate`
scores generated sequences against their questions, and `stats` recomputes
corpus statistics. Exit codes: 0 on success, 1 on usage errors, 2 on data
errors. All randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .corpus import (
    CorpusError,
    CorpusRecord,
    build_corpus,
    compute_stats,
    read_jsonl,
    write_jsonl,
)
from .evalmetrics import QuestionDecodeError, batch_score
from .graphgen import GraphParams, ParameterError
from .solver import StructureError, solve_dp
from .tokenlang import EncodingError, build_vocab, encode_answer
from .tracegen import MODES

_DATA_ERRORS = (
    CorpusError,
    ParameterError,
    EncodingError,
    StructureError,
    QuestionDecodeError,
    OSError,
    json.JSONDecodeError,
    KeyError,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="dagtrace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build a corpus of question-trace-answer records")
    gen.add_argument("--layers", type=int, required=True)
    gen.add_argument("--max-width", type=int, required=True)
    gen.add_argument("--max-cost", type=int, required=True)
    gen.add_argument("--edge-prob", type=float, required=True)
    gen.add_argument("--eta", type=float, required=True)
    gen.add_argument("--mode", choices=MODES, default="plain")
    gen.add_argument("--count", type=int, default=None)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--max-tokens", type=int, default=2048)
    gen.add_argument("--split", type=float, default=0.9)
    gen.add_argument("--token-budget", type=int, default=None,
                     help="stop once the summed token length reaches this target")
    gen.add_argument("--out", type=Path, required=True)

    solve = sub.add_parser("solve", help="answer stored questions with the exact solver")
    solve.add_argument("--graphs", type=Path, required=True)
    solve.add_argument("--out", type=Path, required=True)

    val = sub.add_parser("validate", help="score generated sequences against questions")
    val.add_argument("--graphs", type=Path, required=True)
    val.add_argument("--generations", type=Path, required=True)
    val.add_argument("--report", type=Path, required=True)
    val.add_argument("--per-record", type=Path, default=None)

    stats = sub.add_parser("stats", help="recompute statistics for a stored corpus")
    stats.add_argument("--in", dest="infile", type=Path, required=True)
    stats.add_argument("--out", type=Path, required=True)

    return parser


def _cmd_generate(args) -> int:
    params = GraphParams(args.layers, args.max_width, args.max_cost, args.edge_prob)
    train, test = build_corpus(
        params,
        eta=args.eta,
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        max_tokens=args.max_tokens,
        split=args.split,
        token_budget=args.token_budget,
    )
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(train, out / "train.jsonl")
    write_jsonl(test, out / "test.jsonl")
    vocab = build_vocab(params)
    with open(out / "vocab.json", "w", encoding="utf-8") as fh:
        json.dump(vocab.to_dict(), fh, indent=2)
        fh.write("\n")
    stats = compute_stats(train + test)
    with open(out / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats.to_json_dict(), fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(train)} train / {len(test)} test records to {out}")
    return 0


def _load_records(path: Path) -> list[CorpusRecord]:
    records = read_jsonl(path)
    if not records:
        raise CorpusError(f"{path} holds no records")
    return records


def _cmd_solve(args) -> int:
    records = _load_records(args.graphs)
    with open(args.out, "w", encoding="utf-8") as fh:
        for record in records:
            solution = solve_dp(record.graph)
            vocab = build_vocab(record.params)
            answer = encode_answer(solution.opt_path, solution.opt_cost, vocab)
            fh.write(
                json.dumps(
                    {
                        "id": record.id,
                        "opt_cost": solution.opt_cost,
                        "opt_path": list(solution.opt_path),
                        "answer_text": answer.text,
                    },
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
    print(f"solved {len(records)} questions into {args.out}")
    return 0


def _load_generations(path: Path) -> list[str]:
    texts: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if path.suffix == ".jsonl":
                obj = json.loads(line)
                texts.append(obj["generation"] if "generation" in obj else obj["text"])
            else:
                texts.append(line)
    return texts


def _cmd_validate(args) -> int:
    records = _load_records(args.graphs)
    generations = _load_generations(args.generations)
    if len(generations) != len(records):
        raise CorpusError(
            f"{len(records)} questions but {len(generations)} generations"
        )
    params = records[0].params
    if any(r.params != params for r in records):
        raise CorpusError("records mix graph families; cannot pick one vocabulary")
    vocab = build_vocab(params)
    questions = [r.question.text for r in records]
    report, per_record = batch_score(questions, generations, vocab, collect_reports=True)
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    if args.per_record is not None:
        with open(args.per_record, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            header = ["id"]
            sample = per_record[0]
            header += list(sample.answer.to_dict())
            header += list(sample.cot.to_dict())
            header += ["trace_token_length"]
            writer.writerow(header)
            for record, rep in zip(records, per_record):
                row = [record.id]
                row += [int(v) for v in rep.answer.to_dict().values()]
                row += list(rep.cot.to_dict().values())
                row += [rep.trace_token_length]
                writer.writerow(row)
    print(
        f"scored {report.count} generations: "
        f"answer accuracy {report.answer_rates['is_correct']:.4f}"
    )
    return 0


def _cmd_stats(args) -> int:
    records = _load_records(args.infile)
    stats = compute_stats(records)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(stats.to_json_dict(), fh, indent=2)
        fh.write("\n")
    print(f"wrote statistics for {len(records)} records to {args.out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "stats": _cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _DATA_ERRORS as exc:
        print(f"dagtrace {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
