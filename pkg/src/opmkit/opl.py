"""Controlled-English sentence parsing and serialization.

The grammar is the fixed template inventory of the shipped corpora: state
enumerations, initial/final markers, transition/state-set/agent/instrument/
result/consumption links, and time-sequenced in-zoom declarations. Names are
maximal spans between template keywords, so a name containing a bare keyword
(" changes ", " from ", " to ", ...) is unsupported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    AGENT,
    CONSUMPTION,
    INSTRUMENT,
    RESULT,
    STATE_SET,
    STATE_TRANSITION,
    Diagnostic,
    InZoomContext,
    OpmModel,
    OpmObject,
    OpmProcess,
    OpmState,
    ProceduralLink,
    canonical_name,
    validate_model,
)

# statement variants beyond the six link kinds
STATE_ENUMERATION = "StateEnumeration"
INITIAL_MARKER = "InitialMarker"
FINAL_MARKER = "FinalMarker"
IN_ZOOM = "InZoom"

LINK_VARIANTS = (STATE_TRANSITION, STATE_SET, AGENT, INSTRUMENT, RESULT, CONSUMPTION)


@dataclass
class OplStatement:
    variant: str
    fields: dict
    source_line: int = 0


_NUMERALS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
    "thirteen": 13, "fourteen": 14, "fifteen": 15, "sixteen": 16,
    "seventeen": 17, "eighteen": 18, "nineteen": 19, "twenty": 20,
}

_PREFIX = re.compile(r"^\s*\d+\.\s+")
_SENTENCE_SPLIT = re.compile(r"(?<=\.)\s+")
_TIMESEQ = re.compile(r",?\s*which occur in that time sequence$")
_OTHER_TAIL = re.compile(r"\s*,?\s*or at one of (?P<count>\w+) other states$")

_INZOOM_QUALIFIED = re.compile(
    r"^(?P<parent>.+?) from (?P<src>\S+) zooms in (?P<tgt>\S+) into (?P<children>.+)$")
_INZOOM = re.compile(r"^(?P<parent>.+?) zooms into (?P<children>.+)$")
_ENUM = re.compile(r"^(?P<object>.+?) can be (?P<body>.+)$")
_INITIAL = re.compile(r"^(?:The state|State) (?P<state>.+?) is initial$")
_FINAL = re.compile(r"^(?:The state|State) (?P<state>.+?) is final$")
_TRANSITION = re.compile(r"^(?P<process>.+?) changes (?P<object>.+?) from (?P<frm>.+?) to (?P<to>.+)$")
_STATE_SET = re.compile(r"^(?P<process>.+?) changes (?P<object>.+?) to state (?P<state>.+)$")
_AGENT = re.compile(r"^(?P<agent>.+?) handles (?P<process>.+)$")
_INSTRUMENT = re.compile(r"^(?P<process>.+?) requires (?P<object>.+)$")
_RESULT = re.compile(r"^(?P<process>.+?) yields (?P<object>.+)$")
_CONSUMPTION = re.compile(r"^(?P<process>.+?) consumes (?P<object>.+)$")


def _split_name_list(text: str) -> list[str]:
    """Split "A, B, and C" / "A, B or C" / bare-comma lists into names."""
    pieces = [p.strip() for p in text.split(",") if p.strip()]
    if not pieces:
        return []
    last = pieces[-1]
    if last.startswith("and "):
        pieces[-1] = last[4:].strip()
    elif " or " in last:
        a, b = last.split(" or ", 1)
        pieces[-1:] = [a.strip(), b.strip()]
    elif len(pieces) == 1 and " and " in last:
        a, b = last.split(" and ", 1)
        pieces = [a.strip(), b.strip()]
    return [p for p in pieces if p]


def parse_sentence(line: str, line_no: int = 0):
    """Parse one sentence into an OplStatement, or a Diagnostic if no template fits."""
    s = _PREFIX.sub("", line.strip())
    if s.endswith("."):
        s = s[:-1]
    s = s.strip()

    def bad() -> Diagnostic:
        return Diagnostic("error", line_no, f"UnrecognizedSentence: {line.strip()!r}")

    if not s:
        return bad()

    mt = _INZOOM_QUALIFIED.match(s) or _INZOOM.match(s)
    if mt and " zooms " in s:
        groups = mt.groupdict()
        children_text = groups["children"]
        seq = _TIMESEQ.search(children_text)
        if seq:
            children_text = children_text[: seq.start()]
        children = _split_name_list(children_text)
        if not children:
            return bad()
        return OplStatement(IN_ZOOM, {
            "parent": groups["parent"],
            "source_diagram": groups.get("src"),
            "target_diagram": groups.get("tgt"),
            "children": children,
            "time_sequenced": seq is not None,
        }, line_no)

    mt = _INITIAL.match(s)
    if mt:
        return OplStatement(INITIAL_MARKER, {"state": mt["state"], "object_context": None}, line_no)
    mt = _FINAL.match(s)
    if mt:
        return OplStatement(FINAL_MARKER, {"state": mt["state"], "object_context": None}, line_no)

    mt = _ENUM.match(s)
    if mt and " can be " in s:
        body = mt["body"]
        other = 0
        tail = _OTHER_TAIL.search(body)
        if tail:
            word = tail["count"].lower()
            if word.isdigit():
                other = int(word)
            elif word in _NUMERALS:
                other = _NUMERALS[word]
            else:
                return bad()
            body = body[: tail.start()]
        states = _split_name_list(body)
        if not states and other == 0:
            return bad()
        return OplStatement(STATE_ENUMERATION, {
            "object": mt["object"], "states": states, "other_count": other,
        }, line_no)

    mt = _TRANSITION.match(s)
    if mt:
        return OplStatement(STATE_TRANSITION, {
            "process": mt["process"], "object": mt["object"],
            "from": mt["frm"], "to": mt["to"],
        }, line_no)
    mt = _STATE_SET.match(s)
    if mt:
        return OplStatement(STATE_SET, {
            "process": mt["process"], "object": mt["object"], "to": mt["state"],
        }, line_no)
    mt = _AGENT.match(s)
    if mt:
        return OplStatement(AGENT, {"agent": mt["agent"], "process": mt["process"]}, line_no)
    mt = _INSTRUMENT.match(s)
    if mt:
        return OplStatement(INSTRUMENT, {"process": mt["process"], "object": mt["object"]}, line_no)
    mt = _RESULT.match(s)
    if mt:
        return OplStatement(RESULT, {"process": mt["process"], "object": mt["object"]}, line_no)
    mt = _CONSUMPTION.match(s)
    if mt:
        return OplStatement(CONSUMPTION, {"process": mt["process"], "object": mt["object"]}, line_no)

    return bad()


def _assemble(statements: list[OplStatement], diagnostics: list[Diagnostic]) -> OpmModel:
    model = OpmModel()

    def ensure_object(name: str) -> OpmObject:
        obj = model.object_named(name)
        if obj is None:
            obj = OpmObject(name)
            model.objects.append(obj)
        return obj

    def ensure_process(name: str) -> OpmProcess:
        proc = model.process_named(name)
        if proc is None:
            proc = OpmProcess(name)
            model.processes.append(proc)
        return proc

    # declarations first, so statement order within the document cannot matter
    for st in statements:
        f = st.fields
        if st.variant == STATE_ENUMERATION:
            obj = ensure_object(f["object"])
            for s in f["states"]:
                if obj.state_named(s) is None:
                    obj.states.append(OpmState(s))
            obj.other_state_count = max(obj.other_state_count, f["other_count"])
        elif st.variant in (STATE_TRANSITION, STATE_SET):
            ensure_process(f["process"])
            ensure_object(f["object"])
        elif st.variant == AGENT:
            ensure_object(f["agent"])
            ensure_process(f["process"])
        elif st.variant in (INSTRUMENT, RESULT, CONSUMPTION):
            ensure_process(f["process"])
            ensure_object(f["object"])
        elif st.variant == IN_ZOOM:
            ensure_process(f["parent"])
            for child in f["children"]:
                ensure_process(child)

    # markers attach to whichever object declares the state
    for st in statements:
        if st.variant not in (INITIAL_MARKER, FINAL_MARKER):
            continue
        target = None
        for obj in model.objects:
            state = obj.state_named(st.fields["state"])
            if state is not None:
                target = (obj, state)
                break
        if target is None:
            diagnostics.append(Diagnostic(
                "error", st.source_line,
                f"marker references unknown state '{st.fields['state']}'"))
            continue
        obj, state = target
        st.fields["object_context"] = obj.name
        if st.variant == INITIAL_MARKER:
            state.is_initial = True
        else:
            state.is_final = True

    # links and in-zoom contexts, exact duplicates stored once
    seen: set[tuple] = set()
    for st in statements:
        f = st.fields
        if st.variant in LINK_VARIANTS:
            if st.variant == STATE_TRANSITION:
                link = ProceduralLink(st.variant, f["process"], f["object"],
                                      f["from"], f["to"], st.source_line)
            elif st.variant == STATE_SET:
                link = ProceduralLink(st.variant, f["process"], f["object"],
                                      None, f["to"], st.source_line)
            elif st.variant == AGENT:
                link = ProceduralLink(st.variant, f["process"], f["agent"],
                                      source_line=st.source_line)
            else:
                link = ProceduralLink(st.variant, f["process"], f["object"],
                                      source_line=st.source_line)
            key = link.endpoint_key()
            if key in seen:
                continue
            seen.add(key)
            model.links.append(link)
        elif st.variant == IN_ZOOM:
            if model.inzoom_of(f["parent"]) is not None:
                diagnostics.append(Diagnostic(
                    "warning", st.source_line,
                    f"duplicate in-zoom for '{f['parent']}' ignored"))
                continue
            model.inzooms.append(InZoomContext(
                f["parent"], list(f["children"]), f["time_sequenced"],
                f["source_diagram"], f["target_diagram"]))

    # a transition on an in-zoomed process is the zoomed-out summary of its
    # children; the expanded chain supersedes it
    parents = {canonical_name(z.parent_process) for z in model.inzooms}
    if parents:
        model.links = [
            l for l in model.links
            if not (l.kind == STATE_TRANSITION and canonical_name(l.process) in parents)
        ]
    return model


def parse_document(text: str, strict: bool = False) -> tuple[OpmModel, list[Diagnostic]]:
    """Parse a whole document; lenient mode skips unrecognized lines.

    Strict mode stops at the first error and assembles only what parsed up to
    that point.
    """
    statements: list[OplStatement] = []
    diagnostics: list[Diagnostic] = []
    aborted = False
    for line_no, raw in enumerate(text.splitlines(), 1):
        if aborted:
            break
        line = raw.strip()
        if not line:
            continue
        line = _PREFIX.sub("", line)
        for fragment in _SENTENCE_SPLIT.split(line):
            if not fragment.strip():
                continue
            result = parse_sentence(fragment, line_no)
            if isinstance(result, Diagnostic):
                diagnostics.append(result)
                if strict:
                    aborted = True
                    break
            else:
                statements.append(result)

    model = _assemble(statements, diagnostics)
    diagnostics.extend(validate_model(model))
    model.diagnostics = list(diagnostics)
    return model, diagnostics


def _join_or(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " or " + names[-1]


def _join_and(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return names[0] + " and " + names[1]
    return ", ".join(names[:-1]) + ", and " + names[-1]


def serialize_model(model: OpmModel) -> str:
    """Emit one sentence per fact; the output re-parses to an isomorphic model."""
    problems = [d for d in validate_model(model) if d.severity == "error"]
    if problems:
        raise ValueError("model has unresolved references: "
                         + "; ".join(str(p) for p in problems))

    lines: list[str] = []
    for obj in model.objects:
        if obj.states:
            lines.append(f"{obj.name} can be {_join_or([s.name for s in obj.states])}.")
    for obj in model.objects:
        for state in obj.states:
            if state.is_initial:
                lines.append(f"State {state.name} is initial.")
        for state in obj.states:
            if state.is_final:
                lines.append(f"State {state.name} is final.")
    for z in model.inzooms:
        children = _join_and(z.subprocesses)
        seq = ", which occur in that time sequence" if z.time_sequenced else ""
        if z.source_diagram and z.target_diagram:
            lines.append(f"{z.parent_process} from {z.source_diagram} zooms in "
                         f"{z.target_diagram} into {children}{seq}.")
        else:
            lines.append(f"{z.parent_process} zooms into {children}{seq}.")
    for link in model.links:
        if link.kind == STATE_TRANSITION:
            lines.append(f"{link.process} changes {link.object} "
                         f"from {link.from_state} to {link.to_state}.")
        elif link.kind == STATE_SET:
            lines.append(f"{link.process} changes {link.object} to state {link.to_state}.")
        elif link.kind == AGENT:
            lines.append(f"{link.object} handles {link.process}.")
        elif link.kind == INSTRUMENT:
            lines.append(f"{link.process} requires {link.object}.")
        elif link.kind == RESULT:
            lines.append(f"{link.process} yields {link.object}.")
        elif link.kind == CONSUMPTION:
            lines.append(f"{link.process} consumes {link.object}.")
    return "\n".join(lines) + ("\n" if lines else "")
