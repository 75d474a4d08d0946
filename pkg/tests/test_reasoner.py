from collections import deque
from itertools import product

import pytest

from opmkit.model import KIND_PROCESS, KIND_STATE, canonical_name
from opmkit.reasoner import (
    UNSET,
    AmbiguousEndpoints,
    NoPath,
    NotInZoomed,
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

HEURISTIC_STATES = [
    "rule of thumb", "documented & shared", "tested & refined",
    "pattern recognized", "effectiveness validated", "theoretically backed",
    "principle"]

CHAIN = [
    ("rule of thumb", "Documenting & Sharing", "documented & shared"),
    ("documented & shared", "Testing & Refining", "tested & refined"),
    ("tested & refined", "Pattern Emerging & Recognizing", "pattern recognized"),
    ("pattern recognized", "Effectiveness Validating", "effectiveness validated"),
    ("effectiveness validated", "Theoretical Baking", "theoretically backed"),
    ("theoretically backed", "Consensus Building", "principle"),
]


def test_graph_shape(model):
    graph = build_transition_graph(model, "Heuristic")
    assert sorted(graph.nodes) == sorted(HEURISTIC_STATES)
    transitions = [e for e in graph.edges if e[0] != UNSET]
    entries = [e for e in graph.edges if e[0] == UNSET]
    assert sorted(transitions) == sorted(CHAIN)
    assert entries == [(UNSET, "Initial Observing", "rule of thumb")]


def test_graph_stateless_object(model):
    graph = build_transition_graph(model, "Project Set")
    assert graph.nodes == [] and graph.edges == []


def test_graph_unknown_object(model):
    with pytest.raises(UnknownObject):
        build_transition_graph(model, "Widget")


def test_processes_between_core_path(model):
    assert processes_between(model, "Heuristic", "documented & shared",
                             "theoretically backed") == [
        "Testing & Refining", "Pattern Emerging & Recognizing",
        "Effectiveness Validating", "Theoretical Baking"]


def test_processes_between_examples(model):
    assert processes_between(model, "Heuristic", "effectiveness validated",
                             "principle") == ["Theoretical Baking", "Consensus Building"]
    assert processes_between(model, "Heuristic", "principle", "principle") == []


def test_processes_between_no_path(model):
    with pytest.raises(NoPath):
        processes_between(model, "Heuristic", "principle", "rule of thumb")


def test_processes_between_unknown_state(model):
    with pytest.raises(UnknownState):
        processes_between(model, "Heuristic", "rule of thumb", "golden rule")


def test_processes_between_is_case_insensitive(model):
    assert processes_between(model, "heuristic", "Rule of Thumb",
                             "Documented And Shared") == ["Documenting & Sharing"]


def _oracle_shortest(graph, start, goal):
    """Independent BFS giving (distance, set of process tuples of all
    shortest paths); None when unreachable."""
    adjacency = {}
    for frm, proc, to in graph.edges:
        if frm == UNSET:
            continue
        adjacency.setdefault(canonical_name(frm), []).append(
            (proc, canonical_name(to)))
    start, goal = canonical_name(start), canonical_name(goal)
    if start == goal:
        return 0, {()}
    dist = {start: 0}
    queue = deque([start])
    while queue:
        here = queue.popleft()
        for _, nxt in adjacency.get(here, ()):
            if nxt not in dist:
                dist[nxt] = dist[here] + 1
                queue.append(nxt)
    if goal not in dist:
        return None
    results = set()
    stack = [(start, ())]
    while stack:
        node, acc = stack.pop()
        if node == goal:
            results.add(acc)
            continue
        for proc, nxt in adjacency.get(node, ()):
            if dist.get(nxt) == dist[node] + 1:
                stack.append((nxt, acc + (proc,)))
    return dist[goal], results


def test_all_ordered_state_pairs_agree_with_oracle(model):
    graph = build_transition_graph(model, "Heuristic")
    for a, b in product(HEURISTIC_STATES, repeat=2):
        expected = _oracle_shortest(graph, a, b)
        if expected is None:
            with pytest.raises(NoPath):
                processes_between(model, "Heuristic", a, b)
            continue
        distance, all_paths = expected
        got = processes_between(model, "Heuristic", a, b)
        assert len(got) == distance
        assert tuple(got) in all_paths


def test_reachable_states(model):
    assert reachable_states(model, "Heuristic", "theoretically backed") == \
        {"theoretically backed", "principle"}
    assert reachable_states(model, "Heuristic", "rule of thumb") == set(HEURISTIC_STATES)
    assert reachable_states(model, "Heuristic", "principle") == {"principle"}


def test_evolution_trace(model):
    trace = evolution_trace(model, "Heuristic")
    states = [s for s in trace.steps if s.kind == KIND_STATE]
    processes = [s for s in trace.steps if s.kind == KIND_PROCESS]
    assert [s.name for s in states] == [a for a, _, _ in CHAIN] + ["principle"]
    assert [p.name for p in processes] == [p for _, p, _ in CHAIN]
    # strict state/process alternation, states at both ends
    assert [s.kind for s in trace.steps] == \
        [KIND_STATE if i % 2 == 0 else KIND_PROCESS for i in range(13)]
    assert all(s.owner == "Heuristic" for s in states)


def test_evolution_trace_needs_unique_endpoints(model):
    with pytest.raises(AmbiguousEndpoints):
        evolution_trace(model, "Project Set")


def test_evolution_trace_llm_corpus(llm_model):
    trace = evolution_trace(llm_model, "Heuristic")
    states = [s.name for s in trace.steps if s.kind == KIND_STATE]
    assert len(states) == 9
    assert states[0] == "rule of thumb" and states[-1] == "principle"
    assert len([s for s in trace.steps if s.kind == KIND_PROCESS]) == 8


def test_participant_lookups(model):
    assert agents_of(model, "Heuristic-to-principle Evolving") == \
        ["Systems Engineering Practitioner & Expert Group"]
    assert agents_of(model, "Testing & Refining") == []
    assert instruments_of(model, "Testing & Refining") == ["Project Set"]
    assert instruments_of(model, "Effectiveness Validating") == ["Project Set"]
    assert results_of(model, "Project Selecting") == ["Project Set"]
    assert consumed_by(model, "Project Selecting") == []


def test_participant_lookups_llm_corpus(llm_model):
    assert agents_of(llm_model, "Formal Studying") == ["Researcher"]
    assert consumed_by(llm_model, "Connecting") == ["Theory"]
    assert results_of(llm_model, "Observing") == ["Heuristic"]


def test_participant_lookup_unknown_process(model):
    with pytest.raises(UnknownProcess):
        agents_of(model, "Daydreaming")


def test_subprocess_sequence(model, llm_model):
    assert subprocess_sequence(model, "Heuristic-to-principle Evolving") == [
        "Initial Observing", "Documenting & Sharing", "Project Selecting",
        "Testing & Refining", "Pattern Emerging & Recognizing",
        "Effectiveness Validating", "Theoretical Baking", "Consensus Building"]
    assert len(subprocess_sequence(llm_model, "Principle Establishing")) == 9


def test_subprocess_sequence_not_zoomed(model):
    with pytest.raises(NotInZoomed):
        subprocess_sequence(model, "Documenting & Sharing")
    with pytest.raises(UnknownProcess):
        subprocess_sequence(model, "Daydreaming")


def test_state_set_edges_do_not_join_paths(model):
    # the entry edge into "rule of thumb" must never appear inside a path
    for a, b in product(HEURISTIC_STATES, repeat=2):
        try:
            path = processes_between(model, "Heuristic", a, b)
        except NoPath:
            continue
        assert "Initial Observing" not in path
