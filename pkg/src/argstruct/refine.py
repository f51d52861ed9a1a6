"""Refinement of abstract argument structures into RST analyses.

Every support link becomes one mononuclear relation whose nucleus is the
conclusion and whose satellite is the premise material; linked premises
are grouped under a JOINT.  Several links into one conclusion nest around
the same nucleus, first link outermost.  Units are laid out
satellite-before-nucleus, depth first, one unit per proposition.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .argument import (
    FORMS,
    ArgumentDocument,
    ArgumentForm,
    ArgumentStructure,
    Proposition,
    SupportLink,
    check_single_structure,
    link_id,
)
from .catalog import Catalog, builtin_catalog, normalize_name
from .errors import (
    BoundExceeded,
    InvalidStructure,
    NonArgumentativeTarget,
    SchemaMismatch,
    SharedPremise,
    UnmappedForm,
)
from .rst import Analysis, Composite, Leaf, TextUnit, validate

DEFAULT_TARGETS = (
    "EVIDENCE",
    "JUSTIFY",
    "MOTIVATION",
    "VOLITIONAL-CAUSE",
    "NON-VOLITIONAL-CAUSE",
    "SOLUTIONHOOD",
)


@dataclass(frozen=True)
class RefinementMap:
    entries: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        entries = tuple((form, tuple(normalize_name(r) for r in rels)) for form, rels in (
            self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        ))
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, form: str) -> tuple[str, ...]:
        for f, rels in self.entries:
            if f == form:
                return rels
        raise UnmappedForm(f"no RST relations mapped for argument form {form!r}")

    def __contains__(self, form):
        return any(f == form for f, _ in self.entries)

    def forms(self) -> list[str]:
        return [f for f, _ in self.entries]

    def restricted(self, relations: Iterable[str]) -> RefinementMap:
        keep = {normalize_name(r) for r in relations}
        return RefinementMap(tuple((f, tuple(r for r in rels if r in keep)) for f, rels in self.entries))


def default_refinement_map(forms: Iterable[str] = FORMS) -> RefinementMap:
    return RefinementMap(tuple((f, DEFAULT_TARGETS) for f in forms))


def check_map(rmap: RefinementMap, catalog: Catalog) -> None:
    for form, rels in rmap.entries:
        if not rels:
            raise UnmappedForm(f"argument form {form} maps to no relation")
        for r in rels:
            defn = catalog[r]
            if not defn.argumentative:
                raise NonArgumentativeTarget(f"{form} -> {defn.name}: {defn.name} is not argumentative")
            if defn.multinuclear:
                raise NonArgumentativeTarget(f"{form} -> {defn.name}: subarguments must be mononuclear")


@dataclass(frozen=True)
class RstForest:
    """One analysis per section; sections are never joined by a relation.

    ``unit_props[i][k]`` is the proposition realised as unit ``k`` of
    analysis ``i`` (None for plain text sections).
    """

    sections: tuple[str, ...]
    analyses: tuple[Analysis, ...]
    unit_props: tuple[tuple[str | None, ...], ...]
    propositions: tuple[Proposition, ...] = ()

    def __len__(self):
        return len(self.analyses)


def _linear_order(structure: ArgumentStructure, pid: str) -> list[str]:
    out = []
    for lk in structure.links_to(pid):
        for premise in lk.premises:
            out.extend(_linear_order(structure, premise))
    out.append(pid)
    return out


def _refine_structure(structure, catalog, rmap, choices) -> tuple[Analysis, tuple[str, ...]]:
    check = check_single_structure(structure)
    if not check:
        raise InvalidStructure("; ".join(check.diagnostics))
    uses = Counter(p for lk in structure.links for p in lk.premises)
    shared = sorted(p for p, k in uses.items() if k > 1)
    if shared:
        raise SharedPremise(f"propositions {shared} support more than one link")
    props = structure.by_id
    order = _linear_order(structure, structure.root)
    index = {pid: i for i, pid in enumerate(order)}

    def relation_for(lk: SupportLink) -> str:
        options = rmap[lk.form]
        choice = choices.get(lk.id, options[0]) if choices else options[0]
        if choice not in options:
            raise UnmappedForm(f"{choice} is not a permitted refinement of {lk.form}")
        return choice

    def tree(pid: str):
        t = Leaf(index[pid])
        for lk in reversed(structure.links_to(pid)):
            if len(lk.premises) == 1:
                sat = tree(lk.premises[0])
            else:
                sat = Composite("JOINT", tuple(tree(p) for p in lk.premises))
            t = Composite(relation_for(lk), (t,), (sat,))
        return t

    units = [TextUnit(str(i + 1), props[pid].surface_text or pid) for i, pid in enumerate(order)]
    analysis = Analysis.build(units, tree(structure.root))
    report = validate(analysis, catalog)
    if not report.accepted:  # pragma: no cover - construction guarantees validity
        raise AssertionError(f"refinement produced an invalid analysis: {report.violations}")
    return analysis, tuple(order)


def refine(
    value: ArgumentStructure | ArgumentDocument,
    catalog: Catalog | None = None,
    rmap: RefinementMap | None = None,
    section: str = "argumentative",
    choices: Mapping[str, str] | None = None,
) -> RstForest:
    """Refine a structure (or every section of an enveloped document).

    Accepts a Plan too, via its induced structure.  ``choices`` pins the
    relation used for particular link ids; otherwise the first relation
    mapped for the link's form is used.
    """
    catalog = catalog or builtin_catalog()
    rmap = rmap or default_refinement_map()
    check_map(rmap, catalog)
    if hasattr(value, "structure") and hasattr(value, "steps"):
        value = value.structure
    if isinstance(value, ArgumentDocument):
        items = value.sections
    else:
        items = ((section, value),)
    names, analyses, unit_props, all_props = [], [], [], {}
    for name, content in items:
        names.append(name)
        if isinstance(content, str):
            analyses.append(Analysis.build([TextUnit("1", content)], Leaf(0)))
            unit_props.append((None,))
        else:
            for lk in content.links:
                rmap[lk.form]
            a, order = _refine_structure(content, catalog, rmap, choices)
            analyses.append(a)
            unit_props.append(order)
            for p in content.propositions:
                all_props.setdefault(p.id, p)
    return RstForest(tuple(names), tuple(analyses), tuple(unit_props), tuple(all_props.values()))


def enumerate_refinements(
    structure: ArgumentStructure,
    catalog: Catalog | None = None,
    rmap: RefinementMap | None = None,
    bound: int = 100,
) -> list[RstForest]:
    """Every forest reachable by varying each link's relation within the map."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    rmap = rmap or default_refinement_map()
    options = [rmap[lk.form] for lk in structure.links]
    total = math.prod(len(o) for o in options)
    if total > bound:
        raise BoundExceeded(f"{total} refinements exceed the bound {bound}")
    return [
        refine(structure, catalog, rmap, choices=dict(zip((lk.id for lk in structure.links), combo)))
        for combo in itertools.product(*options)
    ]


def recover_structure(
    forest: RstForest,
    index: int = 0,
    forms: Mapping[str, ArgumentForm] = FORMS,
) -> ArgumentStructure:
    """Read an argument structure back off a refined analysis.

    Each non-JOINT relation is one support link: the conclusion heads the
    nucleus, the premises head the satellite (or each JOINT member).  The
    form is recovered by schema matching, trying forms in table order.
    """
    analysis = forest.analyses[index]
    unit_props = forest.unit_props[index]
    props = {p.id: p for p in forest.propositions}
    links: list[SupportLink] = []

    def head(t) -> str:
        if isinstance(t, Leaf):
            return unit_props[t.unit]
        return head(t.nuclei[0])

    def walk(t):
        if isinstance(t, Leaf):
            return
        if t.relation != "JOINT":
            sat = t.satellites[0]
            members = sat.nuclei if isinstance(sat, Composite) and sat.relation == "JOINT" else (sat,)
            premises = tuple(head(m) for m in members)
            conclusion = head(t.nuclei[0])
            contents = [props[p].content for p in premises]
            for name, form in forms.items():
                if form.match(contents, props[conclusion].content):
                    links.append(SupportLink(link_id(name, premises), name, premises, conclusion, form.mode))
                    break
            else:
                raise SchemaMismatch(f"no argument form fits {premises} -> {conclusion}")
        for c in t.children:
            walk(c)

    walk(analysis.tree())
    used = {p for p in unit_props if p is not None}
    return ArgumentStructure(tuple(p for p in forest.propositions if p.id in used), tuple(links))
