"""Deterministic queries over a model's state-transition structure.

All queries are read-only; results are fully determined by the model, with
shortest-path ties broken by in-zoom time-sequence rank and then name order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .model import (
    KIND_PROCESS,
    KIND_STATE,
    STATE_SET,
    STATE_TRANSITION,
    AGENT,
    CONSUMPTION,
    INSTRUMENT,
    RESULT,
    ElementRef,
    OpmModel,
    OpmObject,
    canonical_name,
)

# synthetic entry node for state-set edges; not a declared state
UNSET = "⊥unset"


class ReasonerError(Exception):
    pass


class UnknownObject(ReasonerError):
    pass


class UnknownState(ReasonerError):
    pass


class UnknownProcess(ReasonerError):
    pass


class NoPath(ReasonerError):
    pass


class AmbiguousEndpoints(ReasonerError):
    pass


class NotInZoomed(ReasonerError):
    pass


@dataclass
class TransitionGraph:
    object: str
    nodes: list[str]                       # declared states, declaration order
    edges: list[tuple[str, str, str]]      # (from_state, process, to_state)


@dataclass
class ReasoningTrace:
    """Alternating state/process walk plus the query that produced it."""

    steps: list[ElementRef] = field(default_factory=list)
    query: str = ""


def _require_object(model: OpmModel, name: str) -> OpmObject:
    obj = model.object_named(name)
    if obj is None:
        raise UnknownObject(f"no object named '{name}'")
    return obj


def _require_process(model: OpmModel, name: str) -> str:
    proc = model.process_named(name)
    if proc is None:
        raise UnknownProcess(f"no process named '{name}'")
    return proc.name


def build_transition_graph(model: OpmModel, object: str) -> TransitionGraph:
    """One node per declared state; transition edges plus state-set entry edges."""
    obj = _require_object(model, object)
    nodes = [s.name for s in obj.states]
    obj_c = canonical_name(obj.name)

    def declared(name: str) -> str:
        state = obj.state_named(name)
        return state.name if state is not None else name

    edges = []
    for link in model.links:
        if canonical_name(link.object) != obj_c:
            continue
        proc = model.process_named(link.process)
        proc_name = proc.name if proc else link.process
        if link.kind == STATE_TRANSITION:
            edges.append((declared(link.from_state), proc_name, declared(link.to_state)))
        elif link.kind == STATE_SET:
            edges.append((UNSET, proc_name, declared(link.to_state)))
    return TransitionGraph(obj.name, nodes, edges)


def _sequence_rank(model: OpmModel) -> dict[str, int]:
    ranks: dict[str, int] = {}
    for z in model.inzooms:
        for i, child in enumerate(z.subprocesses):
            ranks.setdefault(canonical_name(child), i)
    return ranks


def _shortest_edge_path(model: OpmModel, graph: TransitionGraph,
                        from_state: str, to_state: str) -> list[tuple[str, str, str]]:
    """All-shortest-paths BFS; returns the tie-break winner as an edge list."""
    start = canonical_name(from_state)
    goal = canonical_name(to_state)
    if start == goal:
        return []

    adjacency: dict[str, list[tuple[str, str, str]]] = {}
    for edge in graph.edges:
        frm = canonical_name(edge[0])
        if frm == canonical_name(UNSET):
            continue  # entry edges never participate in paths between states
        adjacency.setdefault(frm, []).append(edge)

    dist = {start: 0}
    queue = deque([start])
    while queue:
        here = queue.popleft()
        for edge in adjacency.get(here, ()):
            nxt = canonical_name(edge[2])
            if nxt not in dist:
                dist[nxt] = dist[here] + 1
                queue.append(nxt)
    if goal not in dist:
        raise NoPath(f"'{to_state}' is not reachable from '{from_state}'")

    # walk the distance-layered DAG, collecting every shortest path
    paths: list[list[tuple[str, str, str]]] = []

    def walk(node: str, acc: list[tuple[str, str, str]]) -> None:
        if node == goal:
            paths.append(list(acc))
            return
        for edge in adjacency.get(node, ()):
            nxt = canonical_name(edge[2])
            if dist.get(nxt) == dist[node] + 1 and dist[nxt] <= dist[goal]:
                acc.append(edge)
                walk(nxt, acc)
                acc.pop()

    walk(start, [])
    ranks = _sequence_rank(model)

    def path_key(path: list[tuple[str, str, str]]) -> list[tuple]:
        return [(ranks.get(canonical_name(p), len(ranks)), canonical_name(p))
                for _, p, _ in path]

    paths.sort(key=path_key)
    return paths[0]


def processes_between(model: OpmModel, object: str, from_state: str,
                      to_state: str) -> list[str]:
    """Process labels along the shortest transition path; [] when from = to."""
    graph = build_transition_graph(model, object)
    node_set = {canonical_name(n) for n in graph.nodes}
    for name in (from_state, to_state):
        if canonical_name(name) not in node_set:
            raise UnknownState(f"no state named '{name}' on '{object}'")
    path = _shortest_edge_path(model, graph, from_state, to_state)
    return [p for _, p, _ in path]


def state_path(model: OpmModel, object: str, from_state: str,
               to_state: str) -> list[tuple[str, str, str]]:
    """The full edge path behind processes_between; used for traces."""
    graph = build_transition_graph(model, object)
    node_set = {canonical_name(n) for n in graph.nodes}
    for name in (from_state, to_state):
        if canonical_name(name) not in node_set:
            raise UnknownState(f"no state named '{name}' on '{object}'")
    return _shortest_edge_path(model, graph, from_state, to_state)


def reachable_states(model: OpmModel, object: str, from_state: str) -> set[str]:
    """Forward closure over transition edges, the start state included."""
    graph = build_transition_graph(model, object)
    obj = _require_object(model, object)
    start = obj.state_named(from_state)
    if start is None:
        raise UnknownState(f"no state named '{from_state}' on '{object}'")

    adjacency: dict[str, list[str]] = {}
    surface: dict[str, str] = {canonical_name(n): n for n in graph.nodes}
    for frm, _, to in graph.edges:
        if canonical_name(frm) == canonical_name(UNSET):
            continue
        adjacency.setdefault(canonical_name(frm), []).append(canonical_name(to))

    seen = {canonical_name(start.name)}
    queue = deque(seen)
    while queue:
        here = queue.popleft()
        for nxt in adjacency.get(here, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return {surface.get(c, c) for c in seen}


def evolution_trace(model: OpmModel, object: str) -> ReasoningTrace:
    """Alternating state/process walk from the unique initial to the unique final state."""
    obj = _require_object(model, object)
    initials = [s for s in obj.states if s.is_initial]
    finals = [s for s in obj.states if s.is_final]
    if len(initials) != 1 or len(finals) != 1:
        raise AmbiguousEndpoints(
            f"'{obj.name}' has {len(initials)} initial and {len(finals)} final states")
    path = state_path(model, obj.name, initials[0].name, finals[0].name)

    steps = [ElementRef(KIND_STATE, initials[0].name, owner=obj.name)]
    for _, proc, to in path:
        steps.append(ElementRef(KIND_PROCESS, proc))
        steps.append(ElementRef(KIND_STATE, to, owner=obj.name))
    return ReasoningTrace(steps, query=f"evolution of {obj.name}")


def _objects_linked(model: OpmModel, process: str, kind: str) -> list[str]:
    proc_name = _require_process(model, process)
    proc_c = canonical_name(proc_name)
    out = []
    for link in model.links:
        if link.kind == kind and canonical_name(link.process) == proc_c:
            obj = model.object_named(link.object)
            out.append(obj.name if obj else link.object)
    return out


def agents_of(model: OpmModel, process: str) -> list[str]:
    return _objects_linked(model, process, AGENT)


def instruments_of(model: OpmModel, process: str) -> list[str]:
    return _objects_linked(model, process, INSTRUMENT)


def results_of(model: OpmModel, process: str) -> list[str]:
    return _objects_linked(model, process, RESULT)


def consumed_by(model: OpmModel, process: str) -> list[str]:
    return _objects_linked(model, process, CONSUMPTION)


def subprocess_sequence(model: OpmModel, parent_process: str) -> list[str]:
    """Time-sequenced children of an in-zoomed process, exactly as declared."""
    proc_name = _require_process(model, parent_process)
    context = model.inzoom_of(proc_name)
    if context is None:
        raise NotInZoomed(f"'{proc_name}' has no in-zoom context")
    return list(context.subprocesses)
