"""Template-based question parsing and deterministic answer rendering.

Questions are matched against a closed set of templates and the captured
spans are resolved against the model's vocabulary (longest declared name
wins). Answers are rendered from the reasoning trace so that every named
element in the answer text is traceable to the model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import KIND_PROCESS, KIND_STATE, ElementRef, OpmModel, OpmObject, canonical_name
from .metrics import extract_elements
from .records import PredictionRecord, QaRecord, format_error
from .reasoner import (
    ReasonerError,
    ReasoningTrace,
    _sequence_rank,
    build_transition_graph,
    evolution_trace,
    state_path,
)

PROCESSES_BETWEEN = "ProcessesBetween"
EVOLUTION_PATH = "EvolutionPath"
RELATIONSHIP_BETWEEN = "RelationshipBetween"
AGENT_OF = "AgentOf"
HOW_ACHIEVE_STATE = "HowAchieveState"


class AnswerError(Exception):
    pass


class UnsupportedQuestion(AnswerError):
    pass


class UnknownName(AnswerError):
    pass


@dataclass
class Query:
    variant: str
    fields: dict
    raw_question: str


@dataclass
class TracedAnswer:
    text: str
    trace: ReasoningTrace
    elements: set[ElementRef] = field(default_factory=set)


_RELATIONSHIP = re.compile(
    r"^what is the relationship between (?P<pair>.+) in (?P<x>.+) evolution\?$",
    re.IGNORECASE)
_EVOLUTION = re.compile(
    r"^how does the (?P<p>.+) process relate to the different states of (?P<x>.+)\?$",
    re.IGNORECASE)
_ACHIEVE = re.compile(
    r"^how does (?P<x>.+) achieve (?P<s>.+) before becoming (?:a |an )?(?P<t>.+)\?$",
    re.IGNORECASE)
_WHAT_CHANGE = re.compile(
    r"^what processes change (?P<tail>.+)\?$", re.IGNORECASE)
_WHAT_INVOLVED = re.compile(
    r"^what processes are involved in (?P<x>.+) (?P<verb>evolving|changing|transitioning)"
    r" from (?P<a>.+) to (?P<b>.+)\?$", re.IGNORECASE)
_HOW_VERB = re.compile(
    r"^how does (?P<x>.+) (?P<verb>change|transition|evolve) from (?P<a>.+) to (?P<b>.+)\?$",
    re.IGNORECASE)
_WHO_HANDLES = re.compile(r"^who handles (?P<p>.+)\?$", re.IGNORECASE)

_VERB_FORMS = {
    "change": "changes", "changing": "changes",
    "transition": "transitions", "transitioning": "transitions",
    "evolve": "evolves", "evolving": "evolves",
}


def _strip_decor(span: str) -> str:
    s = span.strip()
    if s.lower().startswith("the "):
        s = s[4:]
    for suffix in (" processes", " process"):
        if s.lower().endswith(suffix):
            s = s[:-len(suffix)]
    return s.strip()


def _resolve_object(model: OpmModel, span: str) -> OpmObject:
    obj = model.object_named(_strip_decor(span))
    if obj is None:
        raise UnknownName(f"no element named '{span.strip()}'")
    return obj


def _resolve_state(obj: OpmObject, span: str) -> str:
    state = obj.state_named(_strip_decor(span))
    if state is None:
        raise UnknownName(f"no element named '{span.strip()}'")
    return state.name


def _resolve_process(model: OpmModel, span: str) -> str:
    proc = model.process_named(_strip_decor(span))
    if proc is None:
        raise UnknownName(f"no element named '{span.strip()}'")
    return proc.name


def _resolve_x_from_to(model: OpmModel, tail: str) -> tuple[str, str, str]:
    """Resolve an 'X from A to B' span; the longest declared names win."""
    best = None
    for m_from in re.finditer(" from ", tail, re.IGNORECASE):
        obj = model.object_named(_strip_decor(tail[:m_from.start()]))
        if obj is None:
            continue
        rest = tail[m_from.end():]
        for m_to in re.finditer(" to ", rest, re.IGNORECASE):
            a = obj.state_named(_strip_decor(rest[:m_to.start()]))
            b = obj.state_named(_strip_decor(rest[m_to.end():]))
            if a is None or b is None:
                continue
            key = (len(obj.name), len(a.name))
            if best is None or key > best[0]:
                best = (key, (obj.name, a.name, b.name))
    if best is None:
        # naive split just to blame the first unresolvable span
        parts = re.split(" from ", tail, maxsplit=1, flags=re.IGNORECASE)
        obj = model.object_named(_strip_decor(parts[0]))
        if obj is None:
            raise UnknownName(f"no element named '{parts[0].strip()}'")
        states = re.split(" to ", parts[1], maxsplit=1, flags=re.IGNORECASE) \
            if len(parts) > 1 else [""]
        for span in states:
            _resolve_state(obj, span)
        raise UnsupportedQuestion(f"cannot resolve states in: {tail!r}")
    return best[1]


def _split_process_pair(model: OpmModel, pair: str) -> tuple[str, str]:
    best = None
    for m in re.finditer(" and ", pair, re.IGNORECASE):
        first = model.process_named(_strip_decor(pair[:m.start()]))
        second = model.process_named(_strip_decor(pair[m.end():]))
        if first is None or second is None:
            continue
        if best is None or len(first.name) > best[0]:
            best = (len(first.name), (first.name, second.name))
    if best is None:
        raise UnknownName(f"no process pair in '{pair.strip()}'")
    return best[1]


def parse_question(question: str, model: OpmModel) -> Query:
    """Map a question onto one of the supported templates."""
    q = question.strip()

    m = _RELATIONSHIP.match(q)
    if m:
        obj = _resolve_object(model, m.group("x"))
        first, second = _split_process_pair(model, m.group("pair"))
        return Query(RELATIONSHIP_BETWEEN,
                     {"process_a": first, "process_b": second, "object": obj.name}, q)

    m = _EVOLUTION.match(q)
    if m:
        obj = _resolve_object(model, m.group("x"))
        proc = _resolve_process(model, m.group("p"))
        return Query(EVOLUTION_PATH, {"object": obj.name, "process": proc}, q)

    m = _ACHIEVE.match(q)
    if m:
        obj = _resolve_object(model, m.group("x"))
        state = _resolve_state(obj, m.group("s"))
        return Query(HOW_ACHIEVE_STATE,
                     {"object": obj.name, "state": state, "target": m.group("t").strip()}, q)

    m = _WHAT_CHANGE.match(q)
    if m:
        x, a, b = _resolve_x_from_to(model, m.group("tail"))
        return Query(PROCESSES_BETWEEN,
                     {"object": x, "from": a, "to": b, "verb": "changes"}, q)

    m = _WHAT_INVOLVED.match(q)
    if m:
        x, a, b = _resolve_x_from_to(
            model, f"{m.group('x')} from {m.group('a')} to {m.group('b')}")
        verb = _VERB_FORMS[m.group("verb").lower()]
        return Query(PROCESSES_BETWEEN, {"object": x, "from": a, "to": b, "verb": verb}, q)

    m = _HOW_VERB.match(q)
    if m:
        x, a, b = _resolve_x_from_to(
            model, f"{m.group('x')} from {m.group('a')} to {m.group('b')}")
        verb = _VERB_FORMS[m.group("verb").lower()]
        return Query(PROCESSES_BETWEEN, {"object": x, "from": a, "to": b, "verb": verb}, q)

    m = _WHO_HANDLES.match(q)
    if m:
        return Query(AGENT_OF, {"process": _resolve_process(model, m.group("p"))}, q)

    raise UnsupportedQuestion(f"no template matches: {q!r}")


def _join_names(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def _walk_steps(object_name: str, start: str,
                path: list[tuple[str, str, str]]) -> list[ElementRef]:
    steps = [ElementRef(KIND_STATE, start, owner=object_name)]
    for _, proc, to in path:
        steps.append(ElementRef(KIND_PROCESS, proc))
        steps.append(ElementRef(KIND_STATE, to, owner=object_name))
    return steps


def _answer_processes_between(model: OpmModel, query: Query) -> tuple[str, ReasoningTrace]:
    x = query.fields["object"]
    a, b = query.fields["from"], query.fields["to"]
    if canonical_name(a) == canonical_name(b):
        trace = ReasoningTrace([ElementRef(KIND_STATE, a, owner=x)], query.raw_question)
        return f"{x} is already in state {a}.", trace
    path = state_path(model, x, a, b)
    trace = ReasoningTrace(_walk_steps(x, a, path), query.raw_question)
    processes = _join_names([p for _, p, _ in path])
    verb = query.fields["verb"]
    return f"{x} {verb} from {a} to {b} through {processes} processes.", trace


def _transition_edge(model: OpmModel, x: str, process: str) -> tuple[str, str, str]:
    graph = build_transition_graph(model, x)
    proc_c = canonical_name(process)
    edges = [e for e in graph.edges if canonical_name(e[1]) == proc_c]
    if len(edges) != 1:
        raise UnsupportedQuestion(
            f"'{process}' has {len(edges)} transitions on '{x}', need exactly one")
    return edges[0]


def _answer_relationship(model: OpmModel, query: Query) -> tuple[str, ReasoningTrace]:
    x = query.fields["object"]
    first, second = query.fields["process_a"], query.fields["process_b"]
    ranks = _sequence_rank(model)
    if ranks.get(canonical_name(second), len(ranks)) < ranks.get(canonical_name(first), len(ranks)):
        first, second = second, first
    a1, _, b1 = _transition_edge(model, x, first)
    a2, _, b2 = _transition_edge(model, x, second)
    text = (f"{first} changes {x} from {a1} to {b1}, "
            f"and {second} then changes it from {a2} to {b2}.")
    steps = _walk_steps(x, a1, [(a1, first, b1)])
    if canonical_name(b1) == canonical_name(a2):
        steps += [ElementRef(KIND_PROCESS, second), ElementRef(KIND_STATE, b2, owner=x)]
    else:
        steps += _walk_steps(x, a2, [(a2, second, b2)])
    return text, ReasoningTrace(steps, query.raw_question)


def _answer_evolution(model: OpmModel, query: Query) -> tuple[str, ReasoningTrace]:
    x, proc = query.fields["object"], query.fields["process"]
    trace = evolution_trace(model, x)
    trace.query = query.raw_question
    states = [step.name for step in trace.steps if step.kind == KIND_STATE]
    if len(states) < 2:
        return f"The {proc} process keeps {x} in state {states[0]}.", trace
    middle = states[1:-1]
    if middle:
        body = f"from {states[0]} through {', '.join(middle)}, and finally to {states[-1]}"
    else:
        body = f"from {states[0]} to {states[-1]}"
    return f"The {proc} process changes {x} {body}.", trace


def _answer_achieve(model: OpmModel, query: Query) -> tuple[str, ReasoningTrace]:
    x, state = query.fields["object"], query.fields["state"]
    graph = build_transition_graph(model, x)
    state_c = canonical_name(state)
    predecessors = {canonical_name(frm): frm for frm, _, to in graph.edges
                    if canonical_name(to) == state_c and frm != "⊥unset"}
    if len(predecessors) != 1:
        raise UnsupportedQuestion(
            f"'{state}' has {len(predecessors)} predecessor states, need exactly one")
    start = next(iter(predecessors.values()))
    sub = Query(PROCESSES_BETWEEN,
                {"object": x, "from": start, "to": state, "verb": "changes"},
                query.raw_question)
    return _answer_processes_between(model, sub)


def _answer_agent(model: OpmModel, query: Query) -> tuple[str, ReasoningTrace]:
    from .reasoner import agents_of

    proc = query.fields["process"]
    agents = agents_of(model, proc)
    if not agents:
        raise UnsupportedQuestion(f"no agent handles '{proc}'")
    trace = ReasoningTrace([ElementRef(KIND_PROCESS, proc)], query.raw_question)
    return f"{_join_names(agents)} handles {proc}.", trace


_DISPATCH = {
    PROCESSES_BETWEEN: _answer_processes_between,
    RELATIONSHIP_BETWEEN: _answer_relationship,
    EVOLUTION_PATH: _answer_evolution,
    HOW_ACHIEVE_STATE: _answer_achieve,
    AGENT_OF: _answer_agent,
}


def answer_question(model: OpmModel, question: str) -> TracedAnswer:
    query = parse_question(question, model)
    text, trace = _DISPATCH[query.variant](model, query)
    return TracedAnswer(text, trace, extract_elements(text, model))


def answer_records(model: OpmModel, questions: list[QaRecord]) -> list[PredictionRecord]:
    """Answer a batch, turning failures into stable per-item error markers."""
    records = []
    for q in questions:
        try:
            records.append(PredictionRecord(q.id, answer_question(model, q.question).text))
        except (AnswerError, ReasonerError) as exc:
            records.append(PredictionRecord(q.id, "", error=format_error(exc)))
    return records
