"""Abstract argument structure: propositions, argument forms and support links.

Formulas use only atoms, negation and implication, which is all modus
ponens and modus tollens need.  Double negation collapses on
construction, so an MT conclusion ``~P`` can feed the antecedent slot of
an MP without a separate rule.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Union

from .errors import (
    CycleDetected,
    DisconnectedFragment,
    DuplicateSection,
    InvalidStructure,
    MissingArgumentativeSection,
    MultipleRoots,
    SchemaMismatch,
    SectionOrderViolation,
)

_NAME = re.compile(r"[A-Za-z0-9_.']+(?:-[A-Za-z0-9_.']+)*")

LINKED = "linked"
CONVERGENT = "convergent"
MODES = (LINKED, CONVERGENT)


@dataclass(frozen=True)
class Atom:
    name: str
    cls: str | None = None  # generalisation class this atom is an instance of

    def __post_init__(self):
        if not _NAME.fullmatch(self.name):
            raise ValueError(f"bad atom name {self.name!r}")
        if self.cls is not None and not _NAME.fullmatch(self.cls):
            raise ValueError(f"bad class name {self.cls!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    inner: Formula

    def __str__(self):
        return f"~{self.inner}"


@dataclass(frozen=True)
class Implies:
    antecedent: Formula
    consequent: Formula

    def __str__(self):
        return f"({self.antecedent}->{self.consequent})"


Formula = Union[Atom, Not, Implies]


def normalize(f: Formula) -> Formula:
    """Collapse every double negation."""
    if isinstance(f, Not):
        inner = normalize(f.inner)
        return inner.inner if isinstance(inner, Not) else Not(inner)
    if isinstance(f, Implies):
        return Implies(normalize(f.antecedent), normalize(f.consequent))
    return f


def neg(f: Formula) -> Formula:
    f = normalize(f)
    return f.inner if isinstance(f, Not) else Not(f)


def formula_text(f: Formula) -> str:
    return str(normalize(f))


def parse_formula(text: str) -> Formula:
    """Inverse of :func:`formula_text`: ``A``, ``~A``, ``(A->B)`` and nestings."""
    pos = 0

    def parse() -> Formula:
        nonlocal pos
        if text.startswith("~", pos):
            pos += 1
            return Not(parse())
        if text.startswith("(", pos):
            pos += 1
            left = parse()
            if not text.startswith("->", pos):
                raise ValueError(f"expected '->' at {pos} in {text!r}")
            pos += 2
            right = parse()
            if not text.startswith(")", pos):
                raise ValueError(f"expected ')' at {pos} in {text!r}")
            pos += 1
            return Implies(left, right)
        m = _NAME.match(text, pos)
        if not m:
            raise ValueError(f"expected an atom name at {pos} in {text!r}")
        pos = m.end()
        return Atom(m.group())

    f = parse()
    if pos != len(text):
        raise ValueError(f"trailing text in formula {text!r}")
    return normalize(f)


def subformulas(f: Formula):
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.inner)
    elif isinstance(f, Implies):
        yield from subformulas(f.antecedent)
        yield from subformulas(f.consequent)


@dataclass(frozen=True)
class Proposition:
    id: str
    content: Formula
    surface_text: str | None = None

    def __post_init__(self):
        if not self.id or any(c.isspace() or c == "," for c in self.id):
            raise ValueError(f"bad proposition id {self.id!r}")
        object.__setattr__(self, "content", normalize(self.content))


def prop(f: Formula, text: str | None = None) -> Proposition:
    """Proposition whose id is the formula's canonical text."""
    f = normalize(f)
    return Proposition(formula_text(f), f, text)


@dataclass(frozen=True)
class SupportLink:
    id: str
    form: str
    premises: tuple[str, ...]
    conclusion: str
    mode: str = LINKED

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.mode not in MODES:
            raise ValueError(f"mode must be linked or convergent, got {self.mode!r}")
        if not self.premises:
            raise ValueError("a support link needs at least one premise")


@dataclass(frozen=True)
class ArgumentForm:
    """An argument scheme.

    ``build`` maps schema bindings to ``(premises, conclusion)`` formulas;
    ``match`` decides whether concrete premises and conclusion instantiate
    the scheme.
    """

    name: str
    variables: tuple[str, ...]
    build: Callable[[Mapping], tuple[list[Formula], Formula]] = field(compare=False)
    match: Callable[[Sequence[Formula], Formula], bool] = field(compare=False)
    mode: str = LINKED


def _bound(bindings: Mapping, key: str) -> Formula:
    try:
        value = bindings[key]
    except KeyError:
        raise SchemaMismatch(f"missing binding for {key!r}") from None
    if isinstance(value, Proposition):
        return value.content
    if isinstance(value, (Atom, Not, Implies)):
        return normalize(value)
    raise SchemaMismatch(f"binding for {key!r} must be a proposition")


def _mp_build(b):
    p, q = _bound(b, "p"), _bound(b, "q")
    return [p, Implies(p, q)], q


def _mp_match(premises, conclusion):
    return len(premises) == 2 and premises[1] == Implies(premises[0], conclusion)


def _mt_build(b):
    p, q = _bound(b, "p"), _bound(b, "q")
    return [Implies(p, q), neg(q)], neg(p)


def _mt_match(premises, conclusion):
    if len(premises) != 2 or not isinstance(premises[0], Implies):
        return False
    imp = premises[0]
    return premises[1] == neg(imp.consequent) and conclusion == neg(imp.antecedent)


def _ig_build(b):
    if "class" not in b or "instances" not in b:
        raise SchemaMismatch("IG needs 'class' and 'instances' bindings")
    cls = _bound(b, "class")
    instances = [_bound({"i": x}, "i") for x in b["instances"]]
    if not _ig_match(instances, cls):
        raise SchemaMismatch(
            "IG needs a class atom and at least two distinct atoms tagged as its instances"
        )
    return instances, cls


def _ig_match(premises, conclusion):
    return (
        isinstance(conclusion, Atom)
        and len(premises) >= 2
        and len(set(premises)) == len(premises)
        and all(isinstance(p, Atom) and p.cls == conclusion.name for p in premises)
    )


MP = ArgumentForm("MP", ("p", "q"), _mp_build, _mp_match)
MT = ArgumentForm("MT", ("p", "q"), _mt_build, _mt_match)
IG = ArgumentForm("IG", ("class", "instances"), _ig_build, _ig_match)

FORMS: dict[str, ArgumentForm] = {"MP": MP, "MT": MT, "IG": IG}


def link_id(form: str, premises: Sequence[str]) -> str:
    return f"{form}[{','.join(premises)}]"


def instantiate_form(
    form: ArgumentForm | str,
    bindings: Mapping,
    forms: Mapping[str, ArgumentForm] = FORMS,
) -> tuple[SupportLink, tuple[Proposition, ...]]:
    """Instantiate a scheme; returns the link and every proposition it mentions.

    Bound propositions keep their ids; compound premises and conclusions
    are synthesised with the formula text as id.
    """
    if isinstance(form, str):
        form = forms[form]
    premises, conclusion = form.build(bindings)
    known: dict[Formula, Proposition] = {}
    for value in bindings.values():
        for v in value if isinstance(value, (list, tuple)) else [value]:
            if isinstance(v, Proposition):
                known.setdefault(v.content, v)

    props: dict[str, Proposition] = {}

    def resolve(f: Formula) -> str:
        p = known.get(f) or prop(f)
        props.setdefault(p.id, p)
        return p.id

    premise_ids = tuple(resolve(f) for f in premises)
    conclusion_id = resolve(conclusion)
    link = SupportLink(link_id(form.name, premise_ids), form.name, premise_ids, conclusion_id, form.mode)
    return link, tuple(props.values())


@dataclass(frozen=True)
class ArgumentStructure:
    propositions: tuple[Proposition, ...] = ()
    links: tuple[SupportLink, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "propositions", tuple(self.propositions))
        object.__setattr__(self, "links", tuple(self.links))
        ids = [p.id for p in self.propositions]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate proposition id")
        lids = [lk.id for lk in self.links]
        if len(set(lids)) != len(lids):
            raise ValueError("duplicate link id")
        known = set(ids)
        for lk in self.links:
            for pid in (*lk.premises, lk.conclusion):
                if pid not in known:
                    raise ValueError(f"link {lk.id} refers to unknown proposition {pid!r}")

    @property
    def by_id(self) -> dict[str, Proposition]:
        return {p.id: p for p in self.propositions}

    def links_to(self, conclusion: str) -> list[SupportLink]:
        return [lk for lk in self.links if lk.conclusion == conclusion]

    def roots(self) -> list[str]:
        """Propositions that support nothing."""
        used = {pid for lk in self.links for pid in lk.premises}
        return [p.id for p in self.propositions if p.id not in used]

    @property
    def root(self) -> str:
        roots = self.roots()
        if len(roots) != 1:
            raise MultipleRoots(f"{len(roots)} roots: {roots}")
        return roots[0]


def check_link(
    structure: ArgumentStructure,
    link: SupportLink,
    forms: Mapping[str, ArgumentForm] = FORMS,
) -> None:
    """Raise SchemaMismatch unless ``link`` instantiates its form."""
    form = forms.get(link.form)
    if form is None:
        raise SchemaMismatch(f"unknown argument form {link.form!r}")
    if link.mode != form.mode:
        raise SchemaMismatch(f"{link.form} support is {form.mode}, link says {link.mode}")
    props = structure.by_id
    try:
        premises = [props[p].content for p in link.premises]
        conclusion = props[link.conclusion].content
    except KeyError as e:
        raise SchemaMismatch(f"link {link.id} refers to unknown proposition {e.args[0]!r}") from None
    if not form.match(premises, conclusion):
        shown = ", ".join(map(formula_text, premises))
        raise SchemaMismatch(f"{shown} |- {formula_text(conclusion)} is not an instance of {link.form}")


def _find_cycle(structure: ArgumentStructure) -> list[str] | None:
    ts = TopologicalSorter()
    for p in structure.propositions:
        ts.add(p.id)
    for lk in structure.links:
        for pid in lk.premises:
            ts.add(lk.conclusion, pid)
    try:
        tuple(ts.static_order())
    except CycleError as e:
        return list(e.args[1])
    return None


def _components(structure: ArgumentStructure) -> int:
    parent = {p.id: p.id for p in structure.propositions}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lk in structure.links:
        for pid in lk.premises:
            parent[find(pid)] = find(lk.conclusion)
    return len({find(x) for x in parent})


@dataclass(frozen=True)
class StructureCheck:
    ok: bool
    diagnostics: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def check_single_structure(structure: ArgumentStructure) -> StructureCheck:
    """One argument, one structure: acyclic, weakly connected, single root."""
    diags = []
    cycle = _find_cycle(structure)
    if cycle:
        diags.append("cycle: " + " -> ".join(cycle))
    if not structure.propositions:
        diags.append("no propositions")
    else:
        comps = _components(structure)
        if comps > 1:
            diags.append(f"{comps} disconnected fragments")
        roots = structure.roots()
        if len(roots) != 1:
            diags.append(f"{len(roots)} roots" + (f": {', '.join(roots)}" if roots else ""))
    return StructureCheck(not diags, tuple(diags))


def add_support(
    structure: ArgumentStructure,
    link: SupportLink,
    propositions: Iterable[Proposition] = (),
    forms: Mapping[str, ArgumentForm] = FORMS,
) -> ArgumentStructure:
    """Return a new structure with ``link`` (and any new propositions) added."""
    props = dict(structure.by_id)
    for p in propositions:
        if p.id in props and props[p.id] != p:
            if props[p.id].content != p.content:
                raise SchemaMismatch(f"proposition {p.id!r} already has different content")
            continue
        props.setdefault(p.id, p)
    touched = {*link.premises, link.conclusion}
    if structure.propositions and not touched & set(structure.by_id):
        raise DisconnectedFragment(f"link {link.id} shares no proposition with the structure")
    new = ArgumentStructure(tuple(props.values()), structure.links + (link,))
    check_link(new, link, forms)
    cycle = _find_cycle(new)
    if cycle:
        raise CycleDetected(" -> ".join(cycle))
    if _components(new) > 1:
        raise DisconnectedFragment("structure is not connected")
    roots = new.roots()
    if len(roots) != 1:
        raise MultipleRoots(f"{len(roots)} roots: {roots}")
    return new


def convergent_groups(structure: ArgumentStructure) -> dict[str, list[str]]:
    """Conclusions backed by more than one independent link."""
    groups: dict[str, list[str]] = {}
    for lk in structure.links:
        groups.setdefault(lk.conclusion, []).append(lk.id)
    return {c: ids for c, ids in groups.items() if len(ids) > 1}


def structure_from_links(
    pairs: Iterable[tuple[SupportLink, Iterable[Proposition]]],
    forms: Mapping[str, ArgumentForm] = FORMS,
) -> ArgumentStructure:
    s = ArgumentStructure()
    for link, props in pairs:
        s = add_support(s, link, props, forms)
    return s


SECTIONS = ("introduction", "proposition", "division", "narration", "argumentative", "pathetic", "conclusion")


@dataclass(frozen=True)
class ArgumentDocument:
    """Enveloping structure: named sections, each text or an argument structure."""

    sections: tuple[tuple[str, Union[str, ArgumentStructure]], ...]

    def __getitem__(self, name: str):
        for key, value in self.sections:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.sections)


def assemble_document(sections) -> ArgumentDocument:
    """Order-checked envelope.  ``sections`` is a mapping or (name, content) pairs."""
    items = list(sections.items() if isinstance(sections, Mapping) else sections)
    names = [k for k, _ in items]
    for name in names:
        if name not in SECTIONS:
            raise ValueError(f"unknown section {name!r}; expected one of {SECTIONS}")
    dup = next((n for i, n in enumerate(names) if n in names[:i]), None)
    if dup:
        raise DuplicateSection(dup)
    if "argumentative" not in names:
        raise MissingArgumentativeSection("the argumentative section is mandatory")
    positions = [SECTIONS.index(n) for n in names]
    if positions != sorted(positions):
        raise SectionOrderViolation(" , ".join(names) + " is out of canonical order")
    for name, content in items:
        if isinstance(content, ArgumentStructure):
            check = check_single_structure(content)
            if not check:
                raise InvalidStructure(f"section {name}: " + "; ".join(check.diagnostics))
        elif not isinstance(content, str):
            raise TypeError(f"section {name} must hold text or an ArgumentStructure")
    return ArgumentDocument(tuple(items))
