"""Graphviz DOT export for analyses, argument structures and contract graphs."""

from __future__ import annotations

from .argument import ArgumentStructure, formula_text
from .contract import XREF, ContractGraph
from .errors import UnsupportedFormat
from .rst import Analysis, Composite, Leaf

FORMATS = ("dot",)


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _analysis_lines(a: Analysis) -> list[str]:
    lines = []
    for u in a.units:
        lines.append(f"  {_q('u' + u.id)} [shape=box, label={_q(u.id + ': ' + u.text if u.text else u.id)}];")
    labels = {}
    for i, node in enumerate(a.nodes):
        if isinstance(node, Composite):
            labels[i] = a.label(i)
            text = node.relation + (f" ({node.tag})" if node.tag else "")
            lines.append(f"  {_q(labels[i])} [shape=ellipse, label={_q(text)}];")

    def name(child):
        return _q("u" + a.units[child.unit].id) if isinstance(child, Leaf) else _q(labels[child.node])

    for i, node in enumerate(a.nodes):
        if not isinstance(node, Composite):
            continue
        for c in node.nuclei:
            lines.append(f"  {_q(labels[i])} -> {name(c)} [label=N];")
        for c in node.satellites:
            lines.append(f"  {_q(labels[i])} -> {name(c)} [label=S, style=dashed];")
    return lines


def _argument_lines(s: ArgumentStructure) -> list[str]:
    lines = []
    for p in s.propositions:
        label = formula_text(p.content) + (f"\\n{p.surface_text}" if p.surface_text else "")
        lines.append(f"  {_q('p:' + p.id)} [shape=box, label={_q(label)}];")
    for lk in s.links:
        lines.append(f"  {_q('l:' + lk.id)} [shape=diamond, label={_q(lk.form + ' ' + lk.mode)}];")
        for pr in lk.premises:
            lines.append(f"  {_q('p:' + pr)} -> {_q('l:' + lk.id)} [label=premise];")
        lines.append(f"  {_q('l:' + lk.id)} -> {_q('p:' + lk.conclusion)} [label=conclusion];")
    return lines


def _contract_lines(g: ContractGraph) -> list[str]:
    lines = []
    for n in g.nodes:
        label = f"{n.id} [{n.kind}]" + (f"\\n{n.label}" if n.label else "")
        lines.append(f"  {_q(n.id)} [shape=box, label={_q(label)}];")
    for a in g.arcs:
        lines.append(f"  {_q(a.source)} -> {_q(a.target)} [label={_q(a.question)}];")
    for x in g.xrefs:
        lines.append(f"  {_q(x.source)} -> {_q(x.target)} [label={XREF}, style=dotted];")
    return lines


def export_graph(value, format: str = "dot", name: str = "G") -> str:
    """Render ``value`` as text in ``format``.  Output is deterministic."""
    if format not in FORMATS:
        raise UnsupportedFormat(f"unsupported export format {format!r}; available: {', '.join(FORMATS)}")
    if isinstance(value, Analysis):
        body = _analysis_lines(value)
    elif isinstance(value, ArgumentStructure):
        body = _argument_lines(value)
    elif isinstance(value, ContractGraph):
        body = _contract_lines(value)
    else:
        raise TypeError(f"cannot export {type(value).__name__}")
    return "\n".join([f"digraph {_q(name)} {{", *body, "}"]) + "\n"
