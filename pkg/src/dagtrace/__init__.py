"""Layered-graph shortest-path reasoning benchmarks.

Generation of random layered DAGs, exact solving, parametric reasoning-trace
emission, a closed token language, corpus building, and a scorer for
model-generated sequences.
"""

from .corpus import (
    CorpusError,
    CorpusRecord,
    CorpusStats,
    StepSummary,
    build_corpus,
    build_record,
    compute_stats,
    iter_records,
    read_jsonl,
    token_budget,
    write_jsonl,
)
from .evalmetrics import (
    AnswerMetrics,
    BatchReport,
    CoTMetrics,
    GenerationReport,
    QuestionDecodeError,
    batch_score,
    score_generation,
)
from .graphgen import (
    Edge,
    GraphParams,
    LayeredGraph,
    ParameterError,
    edge_count,
    sample_graph,
    validate_graph,
)
from .seeding import derive_seed
from .solver import (
    EnumerationLimitError,
    Solution,
    StructureError,
    brute_force,
    count_paths,
    is_optimal_answer,
    path_cost,
    solve_dp,
)
from .tokenlang import (
    DecodedGeneration,
    DecodedRecord,
    EncodingError,
    SyntaxIssue,
    TokenSeq,
    Vocab,
    build_vocab,
    concat,
    decode_record,
    encode_answer,
    encode_question,
    encode_trace,
    parse_generation,
    parse_question,
)
from .tracegen import (
    MODES,
    CriteriaReport,
    StepStats,
    Trace,
    TraceStep,
    check_criteria,
    count_trace_steps,
    destination_path,
    generate_trace,
    step_weight,
    trace_stats,
)

__version__ = "0.1.0"
