"""Core conceptual-model types: objects with states, processes, links, in-zoom contexts.

Names keep their surface spelling everywhere; comparisons go through
canonical_name so that "Documenting & Sharing" and "documenting and sharing"
are the same element.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field

# procedural link kinds
STATE_TRANSITION = "StateTransition"
STATE_SET = "StateSet"
RESULT = "Result"
CONSUMPTION = "Consumption"
AGENT = "Agent"
INSTRUMENT = "Instrument"

LINK_KINDS = (STATE_TRANSITION, STATE_SET, RESULT, CONSUMPTION, AGENT, INSTRUMENT)

# element kinds for ElementRef
KIND_OBJECT = "Object"
KIND_PROCESS = "Process"
KIND_STATE = "State"

_WS = re.compile(r"\s+")
_EDGE_PUNCT = string.punctuation + string.whitespace


def canonical_name(name: str) -> str:
    """Normalize a surface name for identity comparison.

    Lowercases, collapses whitespace, reads "&" as the word "and", and strips
    punctuation hanging off the ends (inner hyphens survive). Idempotent.
    """
    s = name.replace("&", " and ").lower()
    s = _WS.sub(" ", s).strip()
    s = s.strip(_EDGE_PUNCT)
    return _WS.sub(" ", s).strip()


@dataclass
class OpmState:
    name: str
    is_initial: bool = False
    is_final: bool = False


@dataclass
class OpmObject:
    name: str
    states: list[OpmState] = field(default_factory=list)
    # "at one of N other states" count annotation; parsing detail, not part of
    # model identity (isomorphism ignores it)
    other_state_count: int = 0

    def state_named(self, name: str) -> OpmState | None:
        c = canonical_name(name)
        for s in self.states:
            if canonical_name(s.name) == c:
                return s
        return None


@dataclass
class OpmProcess:
    name: str


@dataclass
class ProceduralLink:
    """One procedural link.

    For Agent links the object field holds the agent (the handler); for every
    other kind it holds the transformee/instrument/consumee/result.
    """

    kind: str
    process: str
    object: str
    from_state: str | None = None
    to_state: str | None = None
    source_line: int = 0

    def endpoint_key(self) -> tuple:
        return (
            self.kind,
            canonical_name(self.process),
            canonical_name(self.object),
            canonical_name(self.from_state) if self.from_state else None,
            canonical_name(self.to_state) if self.to_state else None,
        )


@dataclass
class InZoomContext:
    parent_process: str
    subprocesses: list[str]
    time_sequenced: bool = True
    source_diagram: str | None = None
    target_diagram: str | None = None


@dataclass
class Diagnostic:
    severity: str  # "error" or "warning"
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class ElementRef:
    kind: str  # Object, Process or State
    name: str
    owner: str | None = None  # owning object, states only

    def canonical(self) -> tuple:
        return (self.kind, canonical_name(self.name),
                canonical_name(self.owner) if self.owner else None)


@dataclass
class OpmModel:
    objects: list[OpmObject] = field(default_factory=list)
    processes: list[OpmProcess] = field(default_factory=list)
    links: list[ProceduralLink] = field(default_factory=list)
    inzooms: list[InZoomContext] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def object_named(self, name: str) -> OpmObject | None:
        c = canonical_name(name)
        for o in self.objects:
            if canonical_name(o.name) == c:
                return o
        return None

    def process_named(self, name: str) -> OpmProcess | None:
        c = canonical_name(name)
        for p in self.processes:
            if canonical_name(p.name) == c:
                return p
        return None

    def inzoom_of(self, process: str) -> InZoomContext | None:
        c = canonical_name(process)
        for z in self.inzooms:
            if canonical_name(z.parent_process) == c:
                return z
        return None

    def element_refs(self) -> list[ElementRef]:
        """Every declared element: processes, objects, then states per object."""
        refs = [ElementRef(KIND_PROCESS, p.name) for p in self.processes]
        refs += [ElementRef(KIND_OBJECT, o.name) for o in self.objects]
        for o in self.objects:
            refs += [ElementRef(KIND_STATE, s.name, owner=o.name) for s in o.states]
        return refs


def lookup_element(model: OpmModel, name: str) -> ElementRef | None:
    """Resolve a name against the model vocabulary.

    Search order is processes, then objects, then states, so a name shared
    across kinds resolves to the process.
    """
    c = canonical_name(name)
    for p in model.processes:
        if canonical_name(p.name) == c:
            return ElementRef(KIND_PROCESS, p.name)
    for o in model.objects:
        if canonical_name(o.name) == c:
            return ElementRef(KIND_OBJECT, o.name)
    for o in model.objects:
        for s in o.states:
            if canonical_name(s.name) == c:
                return ElementRef(KIND_STATE, s.name, owner=o.name)
    return None


def validate_model(model: OpmModel) -> list[Diagnostic]:
    """Structural checks.

    Errors: link endpoints that resolve to no declared element, transition
    states missing from the object's state list, duplicate declarations.
    Warnings: several initial or final states on one object, self-loop
    transitions.
    """
    out: list[Diagnostic] = []

    def err(line: int, msg: str) -> None:
        out.append(Diagnostic("error", line, msg))

    def warn(line: int, msg: str) -> None:
        out.append(Diagnostic("warning", line, msg))

    seen: set[str] = set()
    for o in model.objects:
        c = canonical_name(o.name)
        if c in seen:
            err(0, f"object '{o.name}' declared more than once")
        seen.add(c)
        state_seen: set[str] = set()
        for s in o.states:
            sc = canonical_name(s.name)
            if sc in state_seen:
                err(0, f"state '{s.name}' of '{o.name}' declared more than once")
            state_seen.add(sc)
        initials = [s for s in o.states if s.is_initial]
        finals = [s for s in o.states if s.is_final]
        if len(initials) > 1:
            warn(0, f"object '{o.name}' has {len(initials)} initial states")
        if len(finals) > 1:
            warn(0, f"object '{o.name}' has {len(finals)} final states")

    seen = set()
    for p in model.processes:
        c = canonical_name(p.name)
        if c in seen:
            err(0, f"process '{p.name}' declared more than once")
        seen.add(c)

    for link in model.links:
        if model.process_named(link.process) is None:
            err(link.source_line, f"link references undeclared process '{link.process}'")
        obj = model.object_named(link.object)
        if obj is None:
            err(link.source_line, f"link references undeclared object '{link.object}'")
        for state_name in (link.from_state, link.to_state):
            if state_name is None:
                continue
            if obj is not None and obj.state_named(state_name) is None:
                err(link.source_line,
                    f"link references undeclared state '{state_name}' of '{link.object}'")
        if (link.kind == STATE_TRANSITION and link.from_state and link.to_state
                and canonical_name(link.from_state) == canonical_name(link.to_state)):
            warn(link.source_line, f"self-loop transition on '{link.object}'")

    for z in model.inzooms:
        if model.process_named(z.parent_process) is None:
            err(0, f"in-zoom references undeclared process '{z.parent_process}'")
        for child in z.subprocesses:
            if model.process_named(child) is None:
                err(0, f"in-zoom child '{child}' is not a declared process")

    return out


def _state_key(o: OpmObject) -> set[tuple]:
    return {(canonical_name(s.name), s.is_initial, s.is_final) for s in o.states}


def models_isomorphic(a: OpmModel, b: OpmModel) -> bool:
    """Structural equality under canonical names, ignoring declaration order."""
    obj_a = {canonical_name(o.name): _state_key(o) for o in a.objects}
    obj_b = {canonical_name(o.name): _state_key(o) for o in b.objects}
    if obj_a != obj_b:
        return False
    if {canonical_name(p.name) for p in a.processes} != {canonical_name(p.name) for p in b.processes}:
        return False
    if {l.endpoint_key() for l in a.links} != {l.endpoint_key() for l in b.links}:
        return False
    zoom_a = {
        (canonical_name(z.parent_process), tuple(canonical_name(s) for s in z.subprocesses),
         z.time_sequenced)
        for z in a.inzooms
    }
    zoom_b = {
        (canonical_name(z.parent_process), tuple(canonical_name(s) for s in z.subprocesses),
         z.time_sequenced)
        for z in b.inzooms
    }
    return zoom_a == zoom_b


def _name_pair(name: str) -> dict:
    return {"surface_name": name, "canonical_name": canonical_name(name)}


def model_to_dict(model: OpmModel) -> dict:
    """JSON-ready form; declaration order preserved."""
    return {
        "objects": [
            {
                **_name_pair(o.name),
                "other_state_count": o.other_state_count,
                "states": [
                    {**_name_pair(s.name), "is_initial": s.is_initial, "is_final": s.is_final}
                    for s in o.states
                ],
            }
            for o in model.objects
        ],
        "processes": [_name_pair(p.name) for p in model.processes],
        "links": [
            {
                "kind": l.kind,
                "process": l.process,
                "object": l.object,
                "from_state": l.from_state,
                "to_state": l.to_state,
            }
            for l in model.links
        ],
        "inzooms": [
            {
                "parent_process": z.parent_process,
                "source_diagram": z.source_diagram,
                "target_diagram": z.target_diagram,
                "subprocesses": list(z.subprocesses),
                "time_sequenced": z.time_sequenced,
            }
            for z in model.inzooms
        ],
    }


def model_from_dict(data: dict) -> OpmModel:
    model = OpmModel()
    for od in data.get("objects", []):
        obj = OpmObject(od["surface_name"], other_state_count=od.get("other_state_count", 0))
        for sd in od.get("states", []):
            obj.states.append(OpmState(sd["surface_name"], sd.get("is_initial", False),
                                       sd.get("is_final", False)))
        model.objects.append(obj)
    for pd in data.get("processes", []):
        model.processes.append(OpmProcess(pd["surface_name"]))
    for ld in data.get("links", []):
        model.links.append(ProceduralLink(ld["kind"], ld["process"], ld["object"],
                                          ld.get("from_state"), ld.get("to_state")))
    for zd in data.get("inzooms", []):
        model.inzooms.append(InZoomContext(zd["parent_process"], list(zd["subprocesses"]),
                                           zd.get("time_sequenced", True),
                                           zd.get("source_diagram"), zd.get("target_diagram")))
    return model
