"""Closed token language for question-trace-answer records.

The vocabulary is fixed by the graph family: special markers, three syntax
tokens, one label per possible layer, one label per possible node, and one
token per representable cumulative cost. Encoding is canonical (edges sorted
by source then destination, tokens joined by single spaces) so that a graph
has exactly one question string. Decoding is strict but total: malformed
input yields positioned syntax issues instead of exceptions, so downstream
scoring can count errors in model output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graphgen import GraphParams, LayeredGraph

BOS = "BoS"
EOS = "EoS"
BOT = "BoT"
EOT = "EoT"
PAD = "PAD"
SEP = "|"
OPEN = "["
CLOSE = "]"

SPECIAL_TOKENS = (PAD, BOS, EOS, BOT, EOT)
SYNTAX_TOKENS = (SEP, OPEN, CLOSE)


class EncodingError(ValueError):
    """Input cannot be represented in the vocabulary."""


@dataclass(frozen=True)
class TokenSeq:
    """A token sequence in both id and canonical text form."""

    ids: tuple[int, ...]
    text: str

    def tokens(self) -> list[str]:
        return self.text.split(" ") if self.text else []

    def __len__(self) -> int:
        return len(self.ids)


class Vocab:
    """Token table for one graph family; immutable once built.

    Ids are contiguous and assigned in a fixed order: PAD, BoS, EoS, BoT,
    EoT, the three syntax tokens, layer labels l1..lL, node labels n0.. up
    to the family's maximum node count, then the integers 1..max_total_cost.
    """

    def __init__(self, num_layers: int, num_nodes: int, max_total_cost: int):
        self.num_layer_tokens = num_layers
        self.num_node_tokens = num_nodes
        self.max_total_cost = max_total_cost
        tokens = list(SPECIAL_TOKENS)
        tokens.extend(SYNTAX_TOKENS)
        tokens.extend(f"l{i}" for i in range(1, num_layers + 1))
        tokens.extend(f"n{i}" for i in range(num_nodes))
        tokens.extend(str(v) for v in range(1, max_total_cost + 1))
        self.tokens: list[str] = tokens
        self.ids: dict[str, int] = {t: i for i, t in enumerate(tokens)}
        self.pad_id = self.ids[PAD]
        self._layer_values = {f"l{i}": i for i in range(1, num_layers + 1)}
        self._node_values = {f"n{i}": i for i in range(num_nodes)}
        self._int_values = {str(v): v for v in range(1, max_total_cost + 1)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens

    def seq(self, tokens: Sequence[str]) -> TokenSeq:
        """Build a TokenSeq from token strings; unknown tokens are an error."""
        try:
            ids = tuple(self.ids[t] for t in tokens)
        except KeyError as exc:
            raise EncodingError(f"token {exc.args[0]!r} is not in the vocabulary")
        return TokenSeq(ids=ids, text=" ".join(tokens))

    def seq_from_ids(self, ids: Sequence[int]) -> TokenSeq:
        toks = []
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise EncodingError(f"id {i} is not in the vocabulary")
            toks.append(self.tokens[i])
        return TokenSeq(ids=tuple(int(i) for i in ids), text=" ".join(toks))

    def tokens_from_ids_lenient(self, ids: Sequence[int]) -> list[str]:
        """Map ids to token strings, standing in a placeholder for bad ids."""
        return [
            self.tokens[i] if 0 <= i < len(self.tokens) else f"<?{i}>" for i in ids
        ]

    def layer_value(self, token: str) -> int | None:
        return self._layer_values.get(token)

    def node_value(self, token: str) -> int | None:
        return self._node_values.get(token)

    def int_value(self, token: str) -> int | None:
        return self._int_values.get(token)

    def to_dict(self) -> dict[str, int]:
        return dict(self.ids)


def build_vocab(params: GraphParams) -> Vocab:
    """Vocabulary covering every graph the family can produce."""
    max_nodes = 2 + (params.layers - 1) * params.max_width
    max_total = params.max_cost * params.layers
    return Vocab(
        num_layers=params.layers, num_nodes=max_nodes, max_total_cost=max_total
    )


def concat(*seqs: TokenSeq) -> TokenSeq:
    ids: tuple[int, ...] = ()
    texts = []
    for s in seqs:
        ids += s.ids
        if s.text:
            texts.append(s.text)
    return TokenSeq(ids=ids, text=" ".join(texts))


# ---------------------------------------------------------------------------
# encoding


def encode_question(g: LayeredGraph, v: Vocab) -> TokenSeq:
    """BoS, then per gap: its layer label and a bracketed edge list."""
    tokens = [BOS]
    for gi, gap in enumerate(g.gaps, start=1):
        tokens.append(f"l{gi}")
        tokens.append(OPEN)
        for src, dst, cost in sorted(gap):
            tokens.append(f"n{src}")
            tokens.append(f"n{dst}")
            tokens.append(str(cost))
            tokens.append(SEP)
        tokens.append(CLOSE)
    return v.seq(tokens)


def encode_trace_steps(steps: Sequence[tuple[tuple[int, ...], int]], v: Vocab) -> TokenSeq:
    if not steps:
        raise EncodingError("cannot encode an empty trace")
    tokens = [BOT]
    for path, cost in steps:
        tokens.extend(f"n{p}" for p in path)
        tokens.append(str(cost))
        tokens.append(SEP)
    tokens.append(EOT)
    return v.seq(tokens)


def encode_trace(t, v: Vocab) -> TokenSeq:
    """BoT, one statement per step (nodes, cumulative cost, separator), EoT."""
    return encode_trace_steps([(s.path, s.cost) for s in t.steps], v)


def encode_answer(path: Sequence[int], cost: int, v: Vocab) -> TokenSeq:
    tokens = [f"n{p}" for p in path]
    tokens.append(str(cost))
    tokens.append(SEP)
    tokens.append(EOS)
    return v.seq(tokens)


# ---------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class SyntaxIssue:
    position: int
    token: str | None
    message: str


@dataclass
class DecodedGeneration:
    """Lenient parse of a trace-plus-answer segment."""

    steps: list[tuple[tuple[int, ...], int]]
    answer: tuple[tuple[int, ...], int] | None
    trace_token_length: int
    malformed_steps: int
    issues: list[SyntaxIssue] = field(default_factory=list)


@dataclass
class DecodedRecord:
    graph: LayeredGraph | None
    steps: list[tuple[tuple[int, ...], int]]
    answer: tuple[tuple[int, ...], int] | None
    issues: list[SyntaxIssue]


def _as_tokens(seq: TokenSeq | str | Sequence[str]) -> list[str]:
    if isinstance(seq, TokenSeq):
        return seq.tokens()
    if isinstance(seq, str):
        return seq.split()
    return list(seq)


def _parse_edge(toks: list[str], pos: int, v: Vocab, issues: list[SyntaxIssue]):
    """Parse `node node int |`; on failure, records one issue and skips to the
    next separator or structural token. Returns (edge or None, next position)."""
    n = len(toks)
    start = pos
    src = v.node_value(toks[pos]) if pos < n else None
    dst = v.node_value(toks[pos + 1]) if pos + 1 < n else None
    cost = v.int_value(toks[pos + 2]) if pos + 2 < n else None
    sep_ok = pos + 3 < n and toks[pos + 3] == SEP
    if src is not None and dst is not None and cost is not None and sep_ok:
        return (src, dst, cost), pos + 4

    issues.append(
        SyntaxIssue(start, toks[start] if start < n else None, "malformed edge entry")
    )
    while pos < n:
        t = toks[pos]
        if t == SEP:
            return None, pos + 1
        if t == CLOSE or t in (BOT, EOT, EOS) or v.layer_value(t) is not None:
            return None, pos
        pos += 1
    return None, pos


def parse_question(
    seq: TokenSeq | str | Sequence[str], v: Vocab
) -> tuple[LayeredGraph | None, list[SyntaxIssue], int]:
    """Strictly parse the question segment; returns (graph or None, issues,
    position of the first token after the question)."""
    toks = _as_tokens(seq)
    issues: list[SyntaxIssue] = []
    n = len(toks)
    pos = 0
    if pos < n and toks[pos] == BOS:
        pos += 1
    else:
        issues.append(SyntaxIssue(pos, toks[pos] if pos < n else None, "expected BoS"))

    raw_gaps: list[list[tuple[int, int, int]]] = []
    while pos < n:
        label = v.layer_value(toks[pos])
        if label is None:
            break
        if label != len(raw_gaps) + 1:
            issues.append(
                SyntaxIssue(pos, toks[pos], f"expected layer label l{len(raw_gaps) + 1}")
            )
        pos += 1
        if pos < n and toks[pos] == OPEN:
            pos += 1
        else:
            issues.append(
                SyntaxIssue(pos, toks[pos] if pos < n else None, "expected [")
            )
        edges: list[tuple[int, int, int]] = []
        closed = False
        while pos < n:
            t = toks[pos]
            if t == CLOSE:
                pos += 1
                closed = True
                break
            if t in (BOT, EOT, EOS) or v.layer_value(t) is not None:
                issues.append(SyntaxIssue(pos, t, "expected a node token or ]"))
                break
            edge, pos = _parse_edge(toks, pos, v, issues)
            if edge is not None:
                edges.append(edge)
        if not closed and pos >= n:
            issues.append(SyntaxIssue(n, None, "edge list never closed"))
        raw_gaps.append(edges)

    graph = _graph_from_edges(raw_gaps, issues)
    return graph, issues, pos


def _graph_from_edges(
    raw_gaps: list[list[tuple[int, int, int]]], issues: list[SyntaxIssue]
) -> LayeredGraph | None:
    """Rebuild the layered graph, inferring layer sizes from the edge lists.

    Node ids are layer-major, and in a valid graph every non-source node has
    an incoming edge, so layer g is exactly the contiguous id block formed by
    gap g's destinations.
    """

    if not raw_gaps:
        issues.append(SyntaxIssue(0, None, "question contains no edge groups"))
        return None

    layer_sizes = [1]
    next_free = 1
    for gi, edges in enumerate(raw_gaps):
        if not edges:
            issues.append(SyntaxIssue(0, None, f"gap {gi + 1} is empty"))
            return None
        lo = next_free - layer_sizes[-1]
        hi = next_free
        if any(not (lo <= src < hi) for src, _, _ in edges):
            issues.append(
                SyntaxIssue(0, None, f"gap {gi + 1} has sources outside layer {gi}")
            )
            return None
        dsts = sorted({dst for _, dst, _ in edges})
        width = len(dsts)
        if dsts != list(range(next_free, next_free + width)):
            issues.append(
                SyntaxIssue(
                    0, None, f"gap {gi + 1} destinations are not a contiguous id block"
                )
            )
            return None
        layer_sizes.append(width)
        next_free += width

    if layer_sizes[-1] != 1:
        issues.append(SyntaxIssue(0, None, "final layer must hold a single node"))
        return None

    return LayeredGraph(
        layer_sizes=layer_sizes, gaps=[sorted(edges) for edges in raw_gaps]
    )


def _parse_statement(
    group: list[str], v: Vocab
) -> tuple[tuple[int, ...], int] | None:
    """A well-formed statement is two or more node tokens then one integer."""
    if len(group) < 3:
        return None
    cost = v.int_value(group[-1])
    if cost is None:
        return None
    path = []
    for t in group[:-1]:
        node = v.node_value(t)
        if node is None:
            return None
        path.append(node)
    return tuple(path), cost


def parse_generation(
    seq: TokenSeq | str | Sequence[str], v: Vocab, start: int = 0
) -> DecodedGeneration:
    """Leniently split a generated continuation into trace statements and an
    answer. Malformed statements and missing markers become issues; scoring
    proceeds on whatever parses."""
    toks = _as_tokens(seq)
    issues: list[SyntaxIssue] = []
    n = len(toks)

    try:
        bot = toks.index(BOT, start)
    except ValueError:
        bot = -1
    if bot == -1:
        issues.append(SyntaxIssue(start, None, "missing BoT"))
        body_start = start
    else:
        if bot > start:
            issues.append(SyntaxIssue(start, toks[start], "unexpected tokens before BoT"))
        body_start = bot + 1

    try:
        eot = toks.index(EOT, body_start)
    except ValueError:
        eot = -1
    if eot == -1:
        issues.append(SyntaxIssue(n, None, "missing EoT"))
        if bot == -1:
            # no think section at all: the whole segment is an answer attempt
            body_end = body_start
            answer_start = body_start
        else:
            # a trace that never closed: everything up to EoS is trace, and
            # the answer cannot be told apart from it
            try:
                body_end = toks.index(EOS, body_start)
            except ValueError:
                body_end = n
            answer_start = -1
    else:
        body_end = eot
        answer_start = eot + 1

    steps: list[tuple[tuple[int, ...], int]] = []
    malformed = 0
    group: list[str] = []
    group_pos = body_start
    for i in range(body_start, body_end):
        t = toks[i]
        if t == SEP:
            parsed = _parse_statement(group, v)
            if parsed is not None:
                steps.append(parsed)
            else:
                malformed += 1
                issues.append(
                    SyntaxIssue(group_pos, toks[group_pos] if group_pos < n else None,
                                "malformed trace statement")
                )
            group = []
            group_pos = i + 1
        else:
            group.append(t)
    if group:
        # statement not closed by a separator: truncated, never counted
        malformed += 1
        issues.append(SyntaxIssue(group_pos, toks[group_pos], "truncated trace statement"))

    marker_count = (1 if bot != -1 else 0) + (1 if eot != -1 else 0)
    trace_token_length = (body_end - body_start) + marker_count

    answer: tuple[tuple[int, ...], int] | None = None
    if answer_start != -1:
        try:
            eos = toks.index(EOS, answer_start)
        except ValueError:
            eos = -1
        if eos == -1:
            issues.append(SyntaxIssue(n, None, "missing EoS"))
            answer_end = n
        else:
            answer_end = eos
            if eos != n - 1:
                issues.append(SyntaxIssue(eos + 1, toks[eos + 1], "tokens after EoS"))
        answer_toks = toks[answer_start:answer_end]
        if not answer_toks:
            issues.append(SyntaxIssue(answer_start, None, "missing answer"))
        else:
            if answer_toks[-1] == SEP:
                answer_toks = answer_toks[:-1]
            else:
                issues.append(
                    SyntaxIssue(answer_end, None, "answer not closed by a separator")
                )
            answer = _parse_statement(answer_toks, v)
            if answer is None:
                issues.append(SyntaxIssue(answer_start, None, "malformed answer"))

    return DecodedGeneration(
        steps=steps,
        answer=answer,
        trace_token_length=trace_token_length,
        malformed_steps=malformed,
        issues=issues,
    )


def decode_record(seq: TokenSeq | str | Sequence[str], v: Vocab) -> DecodedRecord:
    """Parse a full question-trace-answer record; errors come back as data."""
    toks = _as_tokens(seq)
    graph, issues, pos = parse_question(toks, v)
    gen = parse_generation(toks, v, start=pos)
    return DecodedRecord(
        graph=graph,
        steps=gen.steps,
        answer=gen.answer,
        issues=issues + gen.issues,
    )
