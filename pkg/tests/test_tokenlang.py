import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dagtrace import (
    EncodingError,
    GraphParams,
    LayeredGraph,
    build_vocab,
    concat,
    decode_record,
    destination_path,
    encode_answer,
    encode_question,
    encode_trace,
    generate_trace,
    parse_generation,
    parse_question,
    sample_graph,
)
from conftest import FIG_ANSWER, FIG_QUESTION, FIG_TRACE_EFFICIENT


def test_vocab_contents_at_paper_family():
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    for tok in ("PAD", "BoS", "EoS", "BoT", "EoT", "|", "[", "]"):
        assert tok in v.ids
    assert "l1" in v.ids and "l7" in v.ids and "l8" not in v.ids
    assert "n0" in v.ids and "n37" in v.ids and "n38" not in v.ids
    assert "1" in v.ids and "35" in v.ids and "36" not in v.ids and "0" not in v.ids
    assert len(v) == 8 + 7 + 38 + 35
    assert sorted(v.ids.values()) == list(range(len(v)))


def test_vocab_contents_at_minimal_family():
    v = build_vocab(GraphParams(2, 2, 1, 0.5))
    assert "1" in v.ids and "2" in v.ids and "3" not in v.ids
    assert "n0" in v.ids and "n3" in v.ids and "n4" not in v.ids
    assert "l2" in v.ids and "l3" not in v.ids


def test_vocab_is_deterministic():
    a = build_vocab(GraphParams(7, 6, 5, 0.6))
    b = build_vocab(GraphParams(7, 6, 5, 0.6))
    assert a.tokens == b.tokens
    assert a.to_dict() == b.to_dict()


def test_question_encoding_matches_worked_example(fig_graph):
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    assert encode_question(fig_graph, v).text == FIG_QUESTION


def test_answer_encoding_matches_worked_example():
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    assert encode_answer((0, 2, 3, 4), 4, v).text == FIG_ANSWER


def test_chain_question_shape():
    v = build_vocab(GraphParams(2, 2, 3, 0.5))
    g = LayeredGraph(layer_sizes=[1, 1, 1], gaps=[[(0, 1, 3)], [(1, 2, 2)]])
    assert encode_question(g, v).text == "BoS l1 [ n0 n1 3 | ] l2 [ n1 n2 2 | ]"


def test_ids_and_text_round_trip():
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    seq = v.seq(FIG_QUESTION.split(" "))
    assert v.seq_from_ids(seq.ids) == seq
    assert v.seq(seq.tokens()) == seq
    assert " ".join(seq.tokens()) == seq.text
    assert not seq.text.startswith(" ") and not seq.text.endswith(" ")


def test_unknown_tokens_and_ids_rejected():
    v = build_vocab(GraphParams(2, 2, 1, 0.5))
    with pytest.raises(EncodingError):
        v.seq(["BoS", "n99"])
    with pytest.raises(EncodingError):
        v.seq_from_ids([0, 10_000])
    assert v.tokens_from_ids_lenient([0, 10_000]) == ["PAD", "<?10000>"]


def test_question_outside_vocab_is_an_encoding_error(fig_graph):
    tiny = build_vocab(GraphParams(2, 2, 1, 0.5))
    with pytest.raises(EncodingError):
        encode_question(fig_graph, tiny)  # node n4, layer l3 do not exist here


def test_empty_trace_rejected(fig_graph):
    from dagtrace import Trace

    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    with pytest.raises(EncodingError):
        encode_trace(Trace(steps=[], eta=5.0, mode="plain", seed=0), v)


def _record_text(g, v, eta=5.0, mode="plain", seed=0):
    t = generate_trace(g, eta, mode, seed)
    path, cost = destination_path(t, g)
    return concat(encode_question(g, v), encode_trace(t, v), encode_answer(path, cost, v)), t


def test_full_record_round_trip(fig_graph):
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    seq, t = _record_text(fig_graph, v)
    decoded = decode_record(seq, v)
    assert decoded.issues == []
    assert decoded.graph == fig_graph
    assert decoded.steps == [(s.path, s.cost) for s in t.steps]
    assert decoded.answer == destination_path(t, fig_graph)
    # re-encoding the decoded graph reproduces the question byte for byte
    assert encode_question(decoded.graph, v).text == encode_question(fig_graph, v).text


@settings(max_examples=60, deadline=None)
@given(
    layers=st.integers(2, 7),
    max_width=st.integers(2, 6),
    max_cost=st.integers(1, 5),
    seed=st.integers(0, 2**31),
    eta=st.sampled_from([5.0, 0.0, -5.0]),
    mode=st.sampled_from(["plain", "rr", "dr"]),
)
def test_round_trip_property(layers, max_width, max_cost, seed, eta, mode):
    params = GraphParams(layers, max_width, max_cost, 0.6)
    v = build_vocab(params)
    g = sample_graph(params, seed)
    seq, t = _record_text(g, v, eta, mode, seed)
    decoded = decode_record(seq, v)
    assert decoded.issues == []
    assert decoded.graph == g
    assert decoded.steps == [(s.path, s.cost) for s in t.steps]
    assert "PAD" not in seq.text.split(" ")
    # text form reparses to the identical id form
    assert v.seq(seq.tokens()).ids == seq.ids


def test_deleted_bracket_is_one_structural_error(fig_graph):
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    seq, _ = _record_text(fig_graph, v)
    toks = seq.tokens()
    del toks[toks.index("]")]
    decoded = decode_record(toks, v)
    assert len(decoded.issues) == 1
    assert "]" in decoded.issues[0].message
    # recovery still reconstructs the graph and the trace
    assert decoded.graph == fig_graph
    assert decoded.answer is not None


def test_double_cost_token_is_one_error(fig_graph):
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    q = encode_question(fig_graph, v).tokens()
    trace = "BoT n0 n2 1 | n0 n1 2 2 | n0 n2 n3 3 | n0 n2 n3 n4 4 | EoT".split(" ")
    answer = FIG_ANSWER.split(" ")
    decoded = decode_record(q + trace + answer, v)
    assert len(decoded.issues) == 1
    assert decoded.issues[0].message == "malformed trace statement"
    assert len(decoded.steps) == 3  # the malformed statement is not counted


def test_parse_question_rejects_non_layered_id_blocks():
    v = build_vocab(GraphParams(3, 3, 3, 0.5))
    # destinations of gap 1 are not contiguous (n1 missing)
    graph, issues, _ = parse_question("BoS l1 [ n0 n2 1 | ] l2 [ n2 n3 1 | ]", v)
    assert graph is None
    assert any("contiguous" in i.message for i in issues)


def test_parse_generation_lenient_segments():
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    gen = parse_generation("BoT n0 n2 1 | n0 n2 n3 3 | EoT n0 n2 n3 n4 4 | EoS", v)
    assert gen.issues == []
    assert len(gen.steps) == 2
    assert gen.answer == ((0, 2, 3, 4), 4)
    assert gen.trace_token_length == 2 + 9  # markers plus statement tokens

    truncated = parse_generation("BoT n0 n2 1 | n0 n2 n3", v)
    assert len(truncated.steps) == 1
    assert truncated.malformed_steps == 1
    assert any("truncated" in i.message for i in truncated.issues)
    assert any("missing EoT" in i.message for i in truncated.issues)

    missing_eos = parse_generation("BoT n0 n2 1 | EoT n0 n2 n3 n4 4 |", v)
    assert missing_eos.answer == ((0, 2, 3, 4), 4)
    assert any("missing EoS" in i.message for i in missing_eos.issues)


def test_parse_generation_answer_only():
    # a model trained without traces emits the answer directly; it must still score
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    gen = parse_generation("n0 n2 n3 n4 4 | EoS", v)
    assert gen.steps == []
    assert gen.answer == ((0, 2, 3, 4), 4)
    assert gen.trace_token_length == 0
    messages = {i.message for i in gen.issues}
    assert messages == {"missing BoT", "missing EoT"}


def test_parse_generation_garbage_never_raises():
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    for text in ["", "EoS", "| | |", "n0", "BoT EoT EoS", "] [ BoT 12 n0 | EoT 3 EoS"]:
        gen = parse_generation(text, v)
        assert gen.steps is not None


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-5, 120), max_size=60))
def test_decode_record_total_on_random_ids(ids):
    v = build_vocab(GraphParams(7, 6, 5, 0.6))
    toks = v.tokens_from_ids_lenient(ids)
    decoded = decode_record(toks, v)
    assert decoded.issues is not None  # never raises, errors are data
