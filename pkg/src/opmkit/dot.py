"""Graphviz DOT export for models.

Every object becomes a cluster holding a box node plus one rounded node per
state; processes are ellipses. Transition links are drawn through their
process node, in-zoom children hang off dashed edges labeled by position.
Output depends only on declaration order, so equal models give equal text.
"""

from __future__ import annotations

import re

from .model import (
    STATE_SET,
    STATE_TRANSITION,
    AGENT,
    CONSUMPTION,
    INSTRUMENT,
    RESULT,
    OpmModel,
    canonical_name,
)

_ID_RE = re.compile(r"[^0-9a-z]+")


def _ident(prefix: str, *parts: str) -> str:
    body = "__".join(_ID_RE.sub("_", canonical_name(p)).strip("_") for p in parts)
    return f"{prefix}_{body}"


def _label(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def model_to_dot(model: OpmModel) -> str:
    lines = ["digraph model {", "  rankdir=LR;", "  node [fontsize=11];"]

    state_ids: dict[tuple[str, str], str] = {}
    object_ids: dict[str, str] = {}
    for i, obj in enumerate(model.objects):
        obj_c = canonical_name(obj.name)
        obj_id = _ident("o", obj.name)
        object_ids[obj_c] = obj_id
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_label(obj.name)};")
        lines.append(f"    {obj_id} [label={_label(obj.name)}, shape=box];")
        for state in obj.states:
            sid = _ident("s", obj.name, state.name)
            state_ids[(obj_c, canonical_name(state.name))] = sid
            marks = []
            if state.is_initial:
                marks.append("initial")
            if state.is_final:
                marks.append("final")
            label = state.name + (f" [{', '.join(marks)}]" if marks else "")
            lines.append(f"    {sid} [label={_label(label)}, shape=box, style=rounded];")
        lines.append("  }")

    process_ids: dict[str, str] = {}
    for proc in model.processes:
        pid = _ident("p", proc.name)
        process_ids[canonical_name(proc.name)] = pid
        lines.append(f"  {pid} [label={_label(proc.name)}, shape=ellipse];")

    def state_node(obj_name: str, state_name: str) -> str:
        return state_ids.get((canonical_name(obj_name), canonical_name(state_name)),
                             object_ids.get(canonical_name(obj_name), "unknown"))

    for link in model.links:
        pid = process_ids.get(canonical_name(link.process))
        oid = object_ids.get(canonical_name(link.object))
        if pid is None or oid is None:
            continue
        kind = _label(link.kind)
        if link.kind == STATE_TRANSITION:
            lines.append(f"  {state_node(link.object, link.from_state)} -> {pid} "
                         f"[label={kind}];")
            lines.append(f"  {pid} -> {state_node(link.object, link.to_state)} "
                         f"[label={kind}];")
        elif link.kind == STATE_SET:
            lines.append(f"  {pid} -> {state_node(link.object, link.to_state)} "
                         f"[label={kind}];")
        elif link.kind in (AGENT, INSTRUMENT, CONSUMPTION):
            lines.append(f"  {oid} -> {pid} [label={kind}];")
        elif link.kind == RESULT:
            lines.append(f"  {pid} -> {oid} [label={kind}];")

    for z in model.inzooms:
        parent = process_ids.get(canonical_name(z.parent_process))
        if parent is None:
            continue
        for i, child in enumerate(z.subprocesses, start=1):
            cid = process_ids.get(canonical_name(child))
            if cid is None:
                continue
            lines.append(f"  {parent} -> {cid} [label=\"{i}\", style=dashed];")

    lines.append("}")
    return "\n".join(lines) + "\n"
