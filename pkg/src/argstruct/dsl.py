"""Line-oriented document format.

A document is a sequence of ``#``-headed sections, ``#units`` first::

    #units
    1.1 | The arbitral tribunal shall be composed of three members,
    #rst example
    rel ELABORATION nucleus=1.1 satellite=1.2 tag=whole:part
    #argument a
    prop P = atom P
    prop nP = not P
    #plan p
    goal R
    believe (P->Q)
    #contract c
    tree arbitration/1/1.1 = 1.1
    node comp kind=prescription spans=1.1 label="Composition"
    arc who from=comp to=other

Lines starting with ``;`` are comments.  Quoted strings understand ``\\"``
and ``\\\\`` and nothing else.  :func:`parse` never raises on bad input; it
returns diagnostics.  :func:`serialize` writes the one canonical form, so
``serialize(parse(t).document) == t`` for canonical ``t``.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field

from .argument import (
    FORMS,
    MODES,
    ArgumentStructure,
    Atom,
    Formula,
    Implies,
    Not,
    Proposition,
    SupportLink,
    formula_text,
    parse_formula,
    subformulas,
)
from .catalog import Catalog, RelationDefinition, builtin_catalog, normalize_name, register
from .contract import (
    KINDS,
    QUESTIONS,
    XREF,
    ContractGraph,
    ContractNode,
    CrossReference,
    Provision,
    SpecArc,
    SyntacticTree,
    build_graph,
)
from .errors import ArgStructError
from .refine import RefinementMap, default_refinement_map
from .rst import Analysis, Composite, Leaf, Ref, TextSpan, TextUnit

UNIT_ID = re.compile(r"\d+(?:\.\d+)*")
SECTION_KINDS = ("units", "catalog", "rst", "argument", "plan", "contract")

_TOKEN = re.compile(
    r"""
      (?P<key>[A-Za-z_][A-Za-z0-9_-]*)=(?:"(?P<qval>(?:[^"\\\n]|\\.)*)"|(?P<val>[^\s"]*))
    | "(?P<qword>(?:[^"\\\n]|\\.)*)"
    | (?P<word>[^\s"]+)
    """,
    re.X,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning
    line: int
    column: int
    code: str
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity} {self.code}: {self.message}"


@dataclass(frozen=True)
class CatalogSection:
    relations: tuple[RelationDefinition, ...] = ()
    maps: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def catalog(self, base: Catalog | None = None) -> Catalog:
        cat = base if base is not None else builtin_catalog()
        for d in self.relations:
            cat = register(cat, d)
        return cat

    def refinement_map(self) -> RefinementMap:
        merged = dict(default_refinement_map().entries)
        merged.update(self.maps)
        return RefinementMap(tuple(merged.items()))


@dataclass(frozen=True)
class PlanSpec:
    propositions: tuple[Proposition, ...] = ()
    goal: str | None = None
    believe: tuple[str, ...] = ()
    disbelieve: tuple[str, ...] = ()
    kb: tuple[str, ...] = ()


@dataclass(frozen=True)
class Section:
    kind: str
    name: str
    value: object


@dataclass(frozen=True)
class Document:
    units: tuple[TextUnit, ...]
    catalog: CatalogSection | None = None
    sections: tuple[Section, ...] = ()
    lines: Mapping = field(default_factory=dict, compare=False, repr=False)

    def of_kind(self, kind: str) -> list[Section]:
        return [s for s in self.sections if s.kind == kind]

    def get(self, kind: str, name: str | None = None) -> Section:
        for s in self.of_kind(kind):
            if name is None or s.name == name:
                return s
        raise KeyError(f"no #{kind} section" + (f" named {name!r}" if name else ""))

    def relation_catalog(self) -> Catalog:
        return self.catalog.catalog() if self.catalog else builtin_catalog()

    def refinement_map(self) -> RefinementMap:
        return self.catalog.refinement_map() if self.catalog else default_refinement_map()

    def proposition(self, ref: str, plan: PlanSpec | None = None) -> Proposition:
        """Resolve a proposition reference: plan-local, then any argument, then formula text."""
        pools = [plan.propositions] if plan else []
        pools += [s.value.propositions for s in self.of_kind("argument")]
        for pool in pools:
            for p in pool:
                if p.id == ref:
                    return p
        f = parse_formula(ref)
        return Proposition(ref, f)


@dataclass(frozen=True)
class ParseResult:
    document: Document | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.document is not None and not self.errors

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


@dataclass
class _Token:
    text: str
    col: int
    key: str | None = None
    quoted: bool = False


class _Fail(Exception):
    def __init__(self, col: int, code: str, message: str):
        super().__init__(message)
        self.col, self.code, self.message = col, code, message


def _unescape(raw: str, col: int) -> str:
    def sub(m):
        if m.group(1) not in '"\\':
            raise _Fail(col + m.start(), "BadEscape", f"unsupported escape \\{m.group(1)}")
        return m.group(1)

    return re.sub(r"\\(.)", sub, raw)


def _value_col(tok: _Token) -> int:
    return tok.col + len(tok.key) + 1 if tok.key else tok.col


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _tokenize(line: str, offset: int = 0) -> list[_Token]:
    tokens = []
    pos = offset
    while True:
        while pos < len(line) and line[pos].isspace():
            pos += 1
        if pos >= len(line):
            return tokens
        m = _TOKEN.match(line, pos)
        if not m or m.end() == pos:
            raise _Fail(pos + 1, "BadSyntax", "unterminated string" if line[pos] == '"' or '"' in line[pos:] else "unexpected character")
        col = pos + 1
        if m.group("key"):
            after = m.end()
            if after < len(line) and line[after] == '"':
                raise _Fail(after + 1, "BadSyntax", "unterminated string")
            if m.group("qval") is not None:
                tokens.append(_Token(_unescape(m.group("qval"), col), col, m.group("key"), True))
            else:
                tokens.append(_Token(m.group("val"), col, m.group("key")))
        elif m.group("qword") is not None:
            tokens.append(_Token(_unescape(m.group("qword"), col), col, quoted=True))
        else:
            tokens.append(_Token(m.group("word"), col))
        pos = m.end()


def _split(tokens: list[_Token], allowed: set[str]):
    words = [t for t in tokens if t.key is None]
    attrs: dict[str, _Token] = {}
    for t in tokens:
        if t.key is None:
            continue
        if t.key not in allowed:
            raise _Fail(t.col, "UnknownAttribute", f"unknown attribute {t.key!r}")
        if t.key in attrs:
            raise _Fail(t.col, "DuplicateAttribute", f"attribute {t.key!r} given twice")
        attrs[t.key] = t
    return words, attrs


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.diags: list[Diagnostic] = []
        self.units: list[TextUnit] = []
        self.unit_index: dict[str, int] = {}
        self.catalog_section: CatalogSection | None = None
        self.catalog = builtin_catalog()
        self.sections: list[Section] = []
        self.header_lines: dict[tuple[str, str], int] = {}
        self.plan_refs: list[tuple[int, int, PlanSpec, str]] = []

    def error(self, line, col, code, message):
        self.diags.append(Diagnostic("error", line, col, code, message))

    def warn(self, line, col, code, message):
        self.diags.append(Diagnostic("warning", line, col, code, message))

    # -- driver ---------------------------------------------------------
    def run(self, require_units: bool = True, only: tuple[str, ...] | None = None) -> ParseResult:
        groups: list[tuple[str, str, int, list[tuple[int, str]]]] = []
        for lineno, raw in enumerate(self.text.split("\n"), 1):
            line = raw.rstrip("\r")
            stripped = line.strip()
            if not stripped or stripped.startswith(";"):
                continue
            if stripped.startswith("#"):
                head = stripped[1:].split()
                kind = head[0] if head else ""
                name = " ".join(head[1:])
                col = line.index("#") + 1
                if kind not in SECTION_KINDS or (only and kind not in only):
                    self.error(lineno, col, "UnknownSection", f"unknown section #{kind}")
                    groups.append(("?", name, lineno, []))
                    continue
                if kind in ("units", "catalog") and name:
                    self.error(lineno, col, "BadSyntax", f"#{kind} takes no name")
                if kind in ("rst", "argument", "plan", "contract") and not name:
                    self.error(lineno, col, "MissingName", f"#{kind} needs a name")
                if len(head) > 2:
                    self.error(lineno, col, "BadSyntax", "section names may not contain spaces")
                groups.append((kind, name, lineno, []))
                continue
            if not groups:
                self.error(lineno, 1, "MissingUnitsSection" if require_units else "BadSyntax", "content before any section header")
                groups.append(("?", "", lineno, []))
            groups[-1][3].append((lineno, line))

        if require_units:
            if not groups or groups[0][0] != "units":
                line = groups[0][2] if groups else 1
                self.error(line, 1, "MissingUnitsSection", "a document must start with #units")
                return ParseResult(None, tuple(self.diags))
        seen: set[tuple[str, str]] = set()
        for kind, name, lineno, body in groups:
            if kind == "?":
                continue
            if (kind, name) in seen:
                self.error(lineno, 1, "DuplicateSection", f"#{kind} {name}".rstrip() + " appears twice")
                continue
            seen.add((kind, name))
            self.header_lines[kind, name] = lineno
            if kind != "units" and require_units and not self.units:
                if kind != "catalog":
                    continue
            getattr(self, "section_" + kind)(name, lineno, body)
        self.resolve_plans()
        errors = any(d.severity == "error" for d in self.diags)
        if errors:
            return ParseResult(None, tuple(self.diags))
        doc = Document(tuple(self.units), self.catalog_section, tuple(self.sections), dict(self.header_lines))
        return ParseResult(doc, tuple(self.diags))

    def each(self, body, fn):
        for lineno, line in body:
            try:
                fn(lineno, line)
            except _Fail as f:
                self.error(lineno, f.col, f.code, f.message)

    # -- units ----------------------------------------------------------
    def section_units(self, name, lineno, body):
        def unit(ln, line):
            if "|" not in line:
                raise _Fail(1, "BadSyntax", "expected '<id> | <text>'")
            left, text = line.split("|", 1)
            uid = left.strip()
            col = len(left) - len(left.lstrip()) + 1
            if not UNIT_ID.fullmatch(uid):
                raise _Fail(col, "BadUnitId", f"unit id {uid!r} is not a dotted number")
            if uid in self.unit_index:
                raise _Fail(col, "DuplicateId", f"unit {uid} declared twice")
            self.unit_index[uid] = len(self.units)
            self.units.append(TextUnit(uid, text))

        self.each(body, unit)
        if not self.units:
            self.error(lineno, 1, "EmptySection", "#units declares no units")

    def unit_ref(self, token: _Token) -> int:
        if token.text not in self.unit_index:
            raise _Fail(token.col, "UnknownUnit", f"unknown unit {token.text!r}")
        return self.unit_index[token.text]

    # -- catalog --------------------------------------------------------
    def section_catalog(self, name, lineno, body):
        if self.catalog_section is not None:
            self.error(lineno, 1, "DuplicateSection", "#catalog appears twice")
            return
        relations: list[RelationDefinition] = []
        maps: list[tuple[str, tuple[str, ...]]] = []
        map_lines: list[tuple[int, _Token, list[_Token]]] = []

        def record(ln, line):
            tokens = _tokenize(line)
            head = tokens[0]
            if head.key is None and head.text == "relation":
                words, attrs = _split(tokens[1:], {"nuclearity", "argumentative", "n", "s", "ns", "effect", "locus", "tags"})
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", "expected: relation <NAME> key=value ...")
                for k in ("n", "s", "ns", "effect"):
                    if k not in attrs:
                        raise _Fail(words[0].col, "MissingField", f"relation {words[0].text} lacks {k}=")
                nuc = attrs["nuclearity"].text if "nuclearity" in attrs else "mono"
                if nuc not in ("mono", "multi"):
                    raise _Fail(attrs["nuclearity"].col, "BadValue", "nuclearity must be mono or multi")
                arg = attrs["argumentative"].text if "argumentative" in attrs else "false"
                if arg not in ("true", "false"):
                    raise _Fail(attrs["argumentative"].col, "BadValue", "argumentative must be true or false")
                locus = attrs["locus"].text if "locus" in attrs else "N"
                if locus not in ("N", "S", "NS"):
                    raise _Fail(attrs["locus"].col, "BadValue", "locus must be N, S or NS")
                tags = None
                if "tags" in attrs:
                    tags = frozenset(t for t in attrs["tags"].text.split(",") if t)
                defn = RelationDefinition(
                    words[0].text, attrs["n"].text, attrs["s"].text, attrs["ns"].text, attrs["effect"].text,
                    locus, nuc, arg == "true", tags,
                )
                try:
                    self.catalog = register(self.catalog, defn)
                except ArgStructError as e:
                    raise _Fail(words[0].col, type(e).__name__, str(e)) from None
                relations.append(defn)
            elif head.key is None and head.text == "map":
                words, _ = _split(tokens[1:], set())
                if len(words) != 3 or words[1].text != "=":
                    raise _Fail(head.col, "BadSyntax", "expected: map <FORM> = <REL>,<REL>...")
                form = words[0].text
                if form in (m[0] for m in maps):
                    raise _Fail(words[0].col, "DuplicateId", f"form {form} mapped twice")
                rels = tuple(normalize_name(r) for r in words[2].text.split(",") if r)
                if not rels:
                    raise _Fail(words[2].col, "BadSyntax", "map needs at least one relation")
                maps.append((form, rels))
                map_lines.append((ln, words[2], list(rels)))
            else:
                raise _Fail(head.col, "BadSyntax", f"unexpected {head.text!r} in #catalog")

        self.each(body, record)
        for ln, tok, rels in map_lines:
            for r in rels:
                if r not in self.catalog:
                    self.error(ln, tok.col, "UnknownRelation", f"unknown relation {r}")
                elif not self.catalog[r].argumentative:
                    self.error(ln, tok.col, "NonArgumentativeTarget", f"{r} is not argumentative")
        self.catalog_section = CatalogSection(tuple(relations), tuple(maps))

    # -- rst ------------------------------------------------------------
    def section_rst(self, name, lineno, body):
        nodes: list = []
        composites: list[int] = []

        def child(tok: _Token, text: str, col: int):
            if text.startswith("@"):
                try:
                    k = int(text[1:])
                except ValueError:
                    raise _Fail(col, "BadSyntax", f"bad composite label {text!r}") from None
                if not 1 <= k <= len(composites):
                    raise _Fail(col, "UnknownReference", f"no composite {text} declared before this line")
                return Ref(composites[k - 1])
            return Leaf(self.unit_ref(_Token(text, col)))

        def refs(tok: _Token):
            out = []
            col = _value_col(tok)
            for part in tok.text.split(","):
                if not part:
                    raise _Fail(col, "BadSyntax", "empty reference")
                out.append(child(tok, part, col))
                col += len(part) + 1
            return tuple(out)

        def record(ln, line):
            tokens = _tokenize(line)
            head = tokens[0]
            if head.text == "unit" and head.key is None:
                words, _ = _split(tokens[1:], set())
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", "expected: unit <id>")
                nodes.append(Leaf(self.unit_ref(words[0])))
            elif head.text == "rel" and head.key is None:
                words, attrs = _split(tokens[1:], {"nucleus", "satellite", "tag"})
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", "expected: rel <RELATION> nucleus=... [satellite=...]")
                if "nucleus" not in attrs or not attrs["nucleus"].text:
                    raise _Fail(words[0].col, "MissingAttribute", "rel needs nucleus=")
                nuclei = refs(attrs["nucleus"])
                sats = refs(attrs["satellite"]) if "satellite" in attrs and attrs["satellite"].text else ()
                tag = attrs["tag"].text if "tag" in attrs else None
                nodes.append(Composite(words[0].text, nuclei, sats, tag))
                composites.append(len(nodes) - 1)
            else:
                raise _Fail(head.col, "BadSyntax", f"unexpected {head.text!r} in #rst")

        before = len(self.diags)
        self.each(body, record)
        if len(self.diags) > before:
            return
        if not nodes:
            self.error(lineno, 1, "EmptySection", f"#rst {name} declares no nodes")
            return
        try:
            analysis = Analysis(tuple(self.units), tuple(nodes))
        except (ValueError, TypeError) as e:
            self.error(lineno, 1, "InvalidAnalysis", str(e))
            return
        self.sections.append(Section("rst", name, analysis))

    # -- argument -------------------------------------------------------
    def prop_line(self, tokens, props: dict[str, Proposition]):
        head = tokens[0]
        words, attrs = _split(tokens[1:], {"class", "text"})
        if len(words) < 3 or words[1].text != "=":
            raise _Fail(head.col, "BadSyntax", "expected: prop <id> = atom|not|implies ...")
        pid, kind, args = words[0], words[2].text, words[3:]
        if pid.text in props:
            raise _Fail(pid.col, "DuplicateId", f"proposition {pid.text} declared twice")

        def ref(tok: _Token) -> Formula:
            if tok.text in props:
                return props[tok.text].content
            try:
                return parse_formula(tok.text)
            except ValueError:
                raise _Fail(tok.col, "UnknownProposition", f"unknown proposition {tok.text!r}") from None

        if kind == "atom":
            if len(args) != 1:
                raise _Fail(words[2].col, "BadSyntax", "expected: atom <name>")
            try:
                content = Atom(args[0].text, attrs["class"].text if "class" in attrs else None)
            except ValueError as e:
                raise _Fail(args[0].col, "BadName", str(e)) from None
        elif kind == "not":
            if len(args) != 1 or "class" in attrs:
                raise _Fail(words[2].col, "BadSyntax", "expected: not <id>")
            content = Not(ref(args[0]))
        elif kind == "implies":
            if len(args) != 2 or "class" in attrs:
                raise _Fail(words[2].col, "BadSyntax", "expected: implies <id> <id>")
            content = Implies(ref(args[0]), ref(args[1]))
        else:
            raise _Fail(words[2].col, "BadSyntax", f"unknown proposition kind {kind!r}")
        try:
            p = Proposition(pid.text, content, attrs["text"].text if "text" in attrs else None)
        except ValueError as e:
            raise _Fail(pid.col, "BadName", str(e)) from None
        props[p.id] = p

    def section_argument(self, name, lineno, body):
        props: dict[str, Proposition] = {}
        links: list[SupportLink] = []

        def record(ln, line):
            tokens = _tokenize(line)
            head = tokens[0]
            if head.text == "prop" and head.key is None:
                self.prop_line(tokens, props)
            elif head.text == "link" and head.key is None:
                words, attrs = _split(tokens[1:], {"form", "premises", "conclusion", "mode"})
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", "expected: link <id> form=... premises=... conclusion=...")
                for k in ("form", "premises", "conclusion"):
                    if k not in attrs:
                        raise _Fail(words[0].col, "MissingAttribute", f"link needs {k}=")
                if attrs["form"].text not in FORMS:
                    raise _Fail(attrs["form"].col, "UnknownForm", f"unknown argument form {attrs['form'].text!r}")
                mode = attrs["mode"].text if "mode" in attrs else "linked"
                if mode not in MODES:
                    raise _Fail(attrs["mode"].col, "BadValue", "mode must be linked or convergent")
                premises = tuple(p for p in attrs["premises"].text.split(",") if p)
                for tok, ids in ((attrs["premises"], premises), (attrs["conclusion"], (attrs["conclusion"].text,))):
                    for pid in ids:
                        if pid not in props:
                            raise _Fail(_value_col(tok), "UnknownProposition", f"unknown proposition {pid!r}")
                if not premises:
                    raise _Fail(attrs["premises"].col, "BadSyntax", "link needs at least one premise")
                if words[0].text in (lk.id for lk in links):
                    raise _Fail(words[0].col, "DuplicateId", f"link {words[0].text} declared twice")
                links.append(SupportLink(words[0].text, attrs["form"].text, premises, attrs["conclusion"].text, mode))
            else:
                raise _Fail(head.col, "BadSyntax", f"unexpected {head.text!r} in #argument")

        before = len(self.diags)
        self.each(body, record)
        if len(self.diags) > before:
            return
        self.sections.append(Section("argument", name, ArgumentStructure(tuple(props.values()), tuple(links))))

    # -- plan -----------------------------------------------------------
    def section_plan(self, name, lineno, body):
        props: dict[str, Proposition] = {}
        fields = {"goal": [], "believe": [], "disbelieve": [], "kb": []}
        refs: list[tuple[int, _Token]] = []

        def record(ln, line):
            tokens = _tokenize(line)
            head = tokens[0]
            if head.text == "prop" and head.key is None:
                self.prop_line(tokens, props)
            elif head.text in fields and head.key is None:
                words, _ = _split(tokens[1:], set())
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", f"expected: {head.text} <proposition>")
                if head.text == "goal" and fields["goal"]:
                    raise _Fail(head.col, "DuplicateGoal", "a plan has one goal")
                fields[head.text].append(words[0].text)
                refs.append((ln, words[0]))
            else:
                raise _Fail(head.col, "BadSyntax", f"unexpected {head.text!r} in #plan")

        before = len(self.diags)
        self.each(body, record)
        if len(self.diags) > before:
            return
        spec = PlanSpec(
            tuple(props.values()),
            fields["goal"][0] if fields["goal"] else None,
            tuple(fields["believe"]),
            tuple(fields["disbelieve"]),
            tuple(fields["kb"]),
        )
        for ln, tok in refs:
            self.plan_refs.append((ln, tok.col, spec, tok.text))
        self.sections.append(Section("plan", name, spec))

    def resolve_plans(self):
        args = [p for s in self.sections if s.kind == "argument" for p in s.value.propositions]
        for ln, col, spec, ref in self.plan_refs:
            if any(p.id == ref for p in spec.propositions) or any(p.id == ref for p in args):
                continue
            try:
                parse_formula(ref)
            except ValueError:
                self.error(ln, col, "UnknownProposition", f"unknown proposition {ref!r}")

    # -- contract -------------------------------------------------------
    def spans(self, tok: _Token) -> tuple[TextSpan, ...]:
        out = []
        col = _value_col(tok)
        for part in tok.text.split(","):
            if not part:
                raise _Fail(col, "BadSyntax", "empty span")
            lo, _, hi = part.partition("..")
            a = self.unit_ref(_Token(lo, col))
            b = self.unit_ref(_Token(hi, col + len(lo) + 2)) if hi else a
            if a > b:
                raise _Fail(col, "BadSpan", f"span {part} runs backwards")
            out.append(TextSpan(a, b))
            col += len(part) + 1
        return tuple(out)

    def section_contract(self, name, lineno, body):
        provisions: list[Provision] = []
        nodes: list[ContractNode] = []
        arcs: list[SpecArc] = []
        xrefs: list[CrossReference] = []
        arc_lines: list[tuple[int, _Token, _Token]] = []

        def record(ln, line):
            tokens = _tokenize(line)
            head = tokens[0]
            if head.key is not None:
                raise _Fail(head.col, "BadSyntax", "expected tree, node or arc")
            if head.text == "tree":
                words, _ = _split(tokens[1:], set())
                if len(words) != 3 or words[1].text != "=":
                    raise _Fail(head.col, "BadSyntax", "expected: tree <part>/<section>/<provision> = <id..id>")
                path = words[0].text.split("/")
                if len(path) != 3 or not all(path):
                    raise _Fail(words[0].col, "BadSyntax", "tree path must be part/section/provision")
                span = self.spans(words[2])
                if len(span) != 1:
                    raise _Fail(words[2].col, "BadSpan", "a provision covers one range")
                provisions.append(Provision(*path, span[0]))
            elif head.text == "node":
                words, attrs = _split(tokens[1:], {"kind", "spans", "label"})
                if len(words) != 1:
                    raise _Fail(head.col, "BadSyntax", "expected: node <id> kind=... [spans=...] label=...")
                if "kind" not in attrs or attrs["kind"].text not in KINDS:
                    raise _Fail(words[0].col, "BadValue", f"node kind must be one of {', '.join(KINDS)}")
                spans = self.spans(attrs["spans"]) if "spans" in attrs and attrs["spans"].text else ()
                if words[0].text in (n.id for n in nodes):
                    raise _Fail(words[0].col, "DuplicateId", f"node {words[0].text} declared twice")
                try:
                    nodes.append(ContractNode(words[0].text, attrs["kind"].text, spans, attrs["label"].text if "label" in attrs else ""))
                except ValueError as e:
                    raise _Fail(words[0].col, "BadValue", str(e)) from None
            elif head.text == "arc":
                words, attrs = _split(tokens[1:], {"from", "to"})
                if len(words) != 1 or "from" not in attrs or "to" not in attrs:
                    raise _Fail(head.col, "BadSyntax", "expected: arc <question> from=<id> to=<id>")
                q = words[0].text
                if q == XREF:
                    xrefs.append(CrossReference(attrs["from"].text, attrs["to"].text))
                elif q in QUESTIONS:
                    arcs.append(SpecArc(attrs["from"].text, attrs["to"].text, q))
                else:
                    raise _Fail(words[0].col, "BadValue", f"arc kind must be one of {', '.join(QUESTIONS)}, xref")
                arc_lines.append((ln, attrs["from"], attrs["to"]))
            else:
                raise _Fail(head.col, "BadSyntax", f"unexpected {head.text!r} in #contract")

        before = len(self.diags)
        self.each(body, record)
        if len(self.diags) > before:
            return
        known = {n.id for n in nodes}
        for ln, src, dst in arc_lines:
            for tok in (src, dst):
                if tok.text not in known:
                    self.error(ln, _value_col(tok), "DanglingReference", f"unknown contract node {tok.text!r}")
            if src.text == dst.text:
                self.error(ln, src.col, "SelfLoop", f"arc from {src.text} to itself")
        if len(self.diags) > before:
            return
        try:
            graph = build_graph(SyntacticTree(tuple(provisions)), nodes, arcs, xrefs, n_units=len(self.units))
        except (ArgStructError, ValueError) as e:
            self.error(lineno, 1, type(e).__name__, str(e))
            return
        self.sections.append(Section("contract", name, graph))


def parse(text: str) -> ParseResult:
    return _Parser(text).run()


def parse_catalog_file(text: str) -> tuple[CatalogSection | None, tuple[Diagnostic, ...]]:
    """Parse a stand-alone catalog extension file (a single #catalog section)."""
    p = _Parser(text)
    result = p.run(require_units=False, only=("catalog",))
    if result.errors:
        return None, result.diagnostics
    return p.catalog_section or CatalogSection(), result.diagnostics


def parse_checklist(text: str) -> tuple[dict[str, frozenset[str]] | None, tuple[Diagnostic, ...]]:
    """Checklist file: one ``<kind> = <question>,<question>`` line per node kind."""
    diags = []
    out: dict[str, frozenset[str]] = {}
    for lineno, line in enumerate(text.split("\n"), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";"):
            continue
        col = len(line) - len(line.lstrip()) + 1
        kind, eq, rest = stripped.partition("=")
        kind = kind.strip()
        if not eq or kind not in KINDS:
            diags.append(Diagnostic("error", lineno, col, "BadSyntax", "expected '<kind> = <question>,...' with a known kind"))
            continue
        qs = [q.strip() for q in rest.split(",") if q.strip()]
        bad = [q for q in qs if q not in QUESTIONS]
        if bad:
            diags.append(Diagnostic("error", lineno, col, "BadValue", f"unknown question {bad[0]!r}"))
            continue
        out[kind] = frozenset(qs)
    if diags:
        return None, tuple(diags)
    return out, ()


# -- serialization ------------------------------------------------------------

def _span_text(units, s: TextSpan) -> str:
    if s.start == s.end:
        return units[s.start].id
    return f"{units[s.start].id}..{units[s.end].id}"


def _serialize_catalog(cat: CatalogSection) -> list[str]:
    out = ["#catalog"]
    for d in cat.relations:
        line = (
            f"relation {d.name} nuclearity={d.nuclearity} argumentative={'true' if d.argumentative else 'false'}"
            f" n={_quote(d.constraints_on_nucleus or '')} s={_quote(d.constraints_on_satellite or '')}"
            f" ns={_quote(d.constraints_on_combination or '')} effect={_quote(d.effect or '')}"
            f" locus={'NS' if d.locus_of_effect == 'N+S' else d.locus_of_effect}"
        )
        if d.allowed_annotations is not None:
            line += f" tags={_quote(','.join(sorted(d.allowed_annotations)))}"
        out.append(line)
    for form, rels in cat.maps:
        out.append(f"map {form} = {','.join(rels)}")
    return out


def _serialize_rst(a: Analysis) -> list[str]:
    out = []
    labels: dict[int, str] = {}

    def ref(c):
        return a.units[c.unit].id if isinstance(c, Leaf) else labels[c.node]

    for i, node in enumerate(a.nodes):
        if isinstance(node, Leaf):
            out.append(f"unit {a.units[node.unit].id}")
            continue
        labels[i] = f"@{len(labels) + 1}"
        line = f"rel {node.relation} nucleus={','.join(map(ref, node.nuclei))}"
        if node.satellites:
            line += f" satellite={','.join(map(ref, node.satellites))}"
        if node.tag is not None:
            line += f" tag={node.tag}"
        out.append(line)
    return out


def _formula_ref(f: Formula, earlier: list[Proposition]) -> str:
    for p in earlier:
        if p.content == f:
            return p.id
    text = formula_text(f)
    if any(p.id == text for p in earlier):
        raise ValueError(f"cannot serialize {text}: the id is taken by another proposition")
    if any(isinstance(s, Atom) and s.cls is not None for s in subformulas(f)):
        raise ValueError(f"cannot serialize {text}: class-tagged atoms must be declared as propositions")
    return text


def _serialize_props(props) -> list[str]:
    out = []
    earlier: list[Proposition] = []
    for p in props:
        c = p.content
        if isinstance(c, Atom):
            body = f"atom {c.name}" + (f" class={c.cls}" if c.cls else "")
        elif isinstance(c, Not):
            body = f"not {_formula_ref(c.inner, earlier)}"
        else:
            body = f"implies {_formula_ref(c.antecedent, earlier)} {_formula_ref(c.consequent, earlier)}"
        line = f"prop {p.id} = {body}"
        if p.surface_text is not None:
            line += f" text={_quote(p.surface_text)}"
        out.append(line)
        earlier.append(p)
    return out


def _serialize_argument(s: ArgumentStructure) -> list[str]:
    out = _serialize_props(s.propositions)
    for lk in s.links:
        out.append(
            f"link {lk.id} form={lk.form} premises={','.join(lk.premises)} conclusion={lk.conclusion} mode={lk.mode}"
        )
    return out


def _serialize_plan(p: PlanSpec) -> list[str]:
    out = _serialize_props(p.propositions)
    if p.goal is not None:
        out.append(f"goal {p.goal}")
    out += [f"believe {x}" for x in p.believe]
    out += [f"disbelieve {x}" for x in p.disbelieve]
    out += [f"kb {x}" for x in p.kb]
    return out


def _serialize_contract(g: ContractGraph, units) -> list[str]:
    out = [f"tree {p.part}/{p.section}/{p.provision} = {_span_text(units, p.span)}" for p in g.tree.provisions]
    for n in g.nodes:
        line = f"node {n.id} kind={n.kind}"
        if n.spans:
            line += " spans=" + ",".join(_span_text(units, s) for s in n.spans)
        line += f" label={_quote(n.label)}"
        out.append(line)
    out += [f"arc {a.question} from={a.source} to={a.target}" for a in g.arcs]
    out += [f"arc {XREF} from={x.source} to={x.target}" for x in g.xrefs]
    return out


def serialize(doc: Document) -> str:
    blocks = [["#units"] + [f"{u.id} | {u.text}" if u.text else f"{u.id} |" for u in doc.units]]
    if doc.catalog is not None:
        blocks.append(_serialize_catalog(doc.catalog))
    for s in doc.sections:
        head = f"#{s.kind} {s.name}"
        if s.kind == "rst":
            body = _serialize_rst(s.value)
        elif s.kind == "argument":
            body = _serialize_argument(s.value)
        elif s.kind == "plan":
            body = _serialize_plan(s.value)
        elif s.kind == "contract":
            body = _serialize_contract(s.value, doc.units)
        else:
            raise ValueError(f"unknown section kind {s.kind!r}")
        blocks.append([head] + body)
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def serialize_catalog(cat: CatalogSection) -> str:
    return "\n".join(_serialize_catalog(cat)) + "\n"
