"""Conceptual-model toolkit: parse controlled-English models, reason over
state transitions, answer questions symbolically, and score QA runs."""

from .model import (
    Diagnostic,
    ElementRef,
    InZoomContext,
    OpmModel,
    OpmObject,
    OpmProcess,
    OpmState,
    ProceduralLink,
    canonical_name,
    lookup_element,
    model_from_dict,
    model_to_dict,
    models_isomorphic,
    validate_model,
)
from .opl import OplStatement, parse_document, parse_sentence, serialize_model
from .reasoner import (
    AmbiguousEndpoints,
    NoPath,
    NotInZoomed,
    ReasonerError,
    ReasoningTrace,
    TransitionGraph,
    UnknownObject,
    UnknownProcess,
    UnknownState,
    agents_of,
    build_transition_graph,
    consumed_by,
    evolution_trace,
    instruments_of,
    processes_between,
    reachable_states,
    results_of,
    subprocess_sequence,
)
from .answerer import (
    AnswerError,
    Query,
    TracedAnswer,
    UnknownName,
    UnsupportedQuestion,
    answer_question,
    answer_records,
    parse_question,
)
from .metrics import (
    MetricReport,
    aggregate_stats,
    evaluate_run,
    extract_elements,
    loose_accuracy,
    rouge_l,
    rouge_n,
    significance_p,
    strict_accuracy,
    transparency_scores,
)
from .textnorm import (
    DEFAULT_CONFIG,
    MINIMAL_CONFIG,
    ROUGE_CONFIG,
    STOPWORDS,
    NormalizationConfig,
    normalize_tokens,
    porter_stem,
)
from .gateway import (
    BackendConfig,
    PromptBundle,
    assemble_conversion_prompt,
    assemble_qa_prompt,
    complete,
    run_qa_batch,
)
from .records import (
    PredictionRecord,
    QaRecord,
    data_path,
    read_predictions_jsonl,
    read_qa_jsonl,
    write_predictions_jsonl,
)
from .dot import model_to_dot

__version__ = "0.1.0"
