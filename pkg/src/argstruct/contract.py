"""Contract documents as a syntactic tree plus a semantic specification graph.

Nodes are provisions (or abstract issues) anchored to unit spans.  Typed
specification arcs record which implicit question (who, when, how, what,
what_if) a target node answers for its source; untyped cross-references
are kept apart from them.  Nodes may be shared by many arcs and cycles
are allowed.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .argument import ArgumentStructure, Atom, subformulas
from .errors import (
    DanglingReference,
    DepthExceeded,
    MalformedTree,
    SelfLoop,
    SpanOutOfRange,
    UnknownNode,
)
from .rst import TextSpan

KINDS = ("definition", "prescription", "procedure", "term", "issue")
QUESTIONS = ("who", "when", "how", "what", "what_if")
XREF = "xref"

DEFAULT_CHECKLIST: dict[str, frozenset[str]] = {
    "prescription": frozenset({"who"}),
    "procedure": frozenset({"how"}),
    "issue": frozenset({"what"}),
}
# what-if is never mandatory; nodes of these kinds without one get an advisory
ADVISORY_KINDS = ("prescription", "procedure")

DEFAULT_UNFOLD_DEPTH = 32


@dataclass(frozen=True)
class ContractNode:
    id: str
    kind: str
    spans: tuple[TextSpan, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        if self.kind not in KINDS:
            raise ValueError(f"node kind must be one of {KINDS}, got {self.kind!r}")
        if not self.spans and self.kind != "issue":
            raise ValueError(f"node {self.id}: only issue nodes may have no spans")


@dataclass(frozen=True)
class SpecArc:
    source: str
    target: str
    question: str

    def __post_init__(self):
        if self.question not in QUESTIONS:
            raise ValueError(f"question must be one of {QUESTIONS}, got {self.question!r}")


@dataclass(frozen=True)
class CrossReference:
    source: str
    target: str


@dataclass(frozen=True)
class Provision:
    part: str
    section: str
    provision: str
    span: TextSpan


@dataclass(frozen=True)
class SyntacticTree:
    """Part / section / provision hierarchy, leaves carrying unit ranges."""

    provisions: tuple[Provision, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "provisions", tuple(self.provisions))
        paths = [(p.part, p.section, p.provision) for p in self.provisions]
        if len(set(paths)) != len(paths):
            raise MalformedTree("duplicate provision path")
        ordered = sorted(self.provisions, key=lambda p: p.span)
        for a, b in zip(ordered, ordered[1:]):
            if b.span.start <= a.span.end:
                raise MalformedTree(f"provisions {a.provision} and {b.provision} overlap")
            if b.span.start != a.span.end + 1:
                raise MalformedTree(f"gap between provisions {a.provision} and {b.provision}")
        for key in ("part", "section"):
            groups = defaultdict(list)
            for p in self.provisions:
                gkey = p.part if key == "part" else (p.part, p.section)
                groups[gkey].append(p.span)
            for g, spans in groups.items():
                spans.sort()
                for a, b in zip(spans, spans[1:]):
                    if b.start != a.end + 1:
                        raise MalformedTree(f"{key} {g} is not one contiguous range")

    def unit_range(self, n_units: int) -> TextSpan:
        """Units the tree covers; an empty tree stands for the whole document."""
        if not self.provisions:
            return TextSpan(0, n_units - 1)
        return TextSpan(min(p.span.start for p in self.provisions), max(p.span.end for p in self.provisions))

    def parts(self) -> dict[str, dict[str, list[Provision]]]:
        out: dict[str, dict[str, list[Provision]]] = {}
        for p in self.provisions:
            out.setdefault(p.part, {}).setdefault(p.section, []).append(p)
        return out


@dataclass(frozen=True)
class ContractGraph:
    nodes: tuple[ContractNode, ...]
    arcs: tuple[SpecArc, ...] = ()
    xrefs: tuple[CrossReference, ...] = ()
    tree: SyntacticTree = field(default_factory=SyntacticTree)

    @property
    def by_id(self) -> dict[str, ContractNode]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: str) -> ContractNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownNode(node_id)

    def out_edges(self, node_id: str) -> list[tuple[str, str]]:
        """(label, target) for every outgoing arc, spec arcs first, insertion order."""
        edges = [(a.question, a.target) for a in self.arcs if a.source == node_id]
        edges += [(XREF, x.target) for x in self.xrefs if x.source == node_id]
        return edges


def build_graph(
    tree: SyntacticTree,
    nodes: Iterable[ContractNode],
    arcs: Iterable[SpecArc] = (),
    xrefs: Iterable[CrossReference] = (),
    n_units: int | None = None,
) -> ContractGraph:
    """Validate and assemble a contract graph.

    ``n_units`` is the length of the agreement; without it the tree's own
    range is the only bound.
    """
    nodes, arcs, xrefs = tuple(nodes), tuple(arcs), tuple(xrefs)
    if n_units is None:
        if not tree.provisions:
            raise ValueError("n_units is required when the syntactic tree is empty")
        n_units = tree.unit_range(0).end + 1
    if tree.provisions and tree.unit_range(n_units).end >= n_units:
        raise SpanOutOfRange("syntactic tree extends beyond the document")
    bounds = tree.unit_range(n_units)
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        dup = next(i for i, c in Counter(ids).items() if c > 1)
        raise ValueError(f"duplicate node id {dup!r}")
    for n in nodes:
        for s in n.spans:
            if s.start < bounds.start or s.end > bounds.end:
                raise SpanOutOfRange(f"node {n.id} spans {s.start}..{s.end}, outside {bounds.start}..{bounds.end}")
    known = set(ids)
    for a in (*arcs, *xrefs):
        for end in (a.source, a.target):
            if end not in known:
                raise DanglingReference(f"arc {a.source} -> {a.target} refers to unknown node {end!r}")
        if a.source == a.target:
            raise SelfLoop(f"arc from {a.source} to itself")
    return ContractGraph(nodes, arcs, xrefs, tree)


def query(graph: ContractGraph, question: str, node_id: str) -> list[str]:
    if question not in QUESTIONS:
        raise ValueError(f"question must be one of {QUESTIONS}")
    graph.node(node_id)
    return [a.target for a in graph.arcs if a.source == node_id and a.question == question]


@dataclass(frozen=True)
class Role:
    kind: str  # question kind, or "reference"
    source: str

    def __str__(self):
        if self.kind == "reference":
            return f"referenced by {self.source}"
        return f"{self.kind}-specification of {self.source}"


def roles_of(graph: ContractGraph, node_id: str) -> list[Role]:
    graph.node(node_id)
    roles = [Role(a.question, a.source) for a in graph.arcs if a.target == node_id]
    roles += [Role("reference", x.source) for x in graph.xrefs if x.target == node_id]
    return roles


@dataclass(frozen=True)
class UnfoldedNode:
    """A tree node; ``reference`` marks a pointer back to an earlier expansion."""

    node: str
    children: tuple[tuple[str, UnfoldedNode], ...] = ()
    reference: bool = False

    def depth(self) -> int:
        return 1 + max((c.depth() for _, c in self.children), default=0)

    def walk(self):
        yield self
        for _, c in self.children:
            yield from c.walk()


def unfold(graph: ContractGraph, root: str, depth_limit: int = DEFAULT_UNFOLD_DEPTH) -> UnfoldedNode:
    """Spanning-tree view of the graph from ``root``.

    Depth-first in arc order.  Each node is expanded once; any later arc
    into it (a shared node or a cycle) becomes a reference leaf.
    """
    if depth_limit < 1:
        raise ValueError("depth_limit must be at least 1")
    graph.node(root)
    expanded: set[str] = set()

    def expand(node_id: str, depth: int) -> UnfoldedNode:
        if depth > depth_limit:
            raise DepthExceeded(f"unfolding from {root} exceeds depth {depth_limit}")
        expanded.add(node_id)
        kids = []
        for label, target in graph.out_edges(node_id):
            if target in expanded:
                kids.append((label, UnfoldedNode(target, reference=True)))
            else:
                kids.append((label, expand(target, depth + 1)))
        return UnfoldedNode(node_id, tuple(kids))

    return expand(root, 1)


def fold(tree: UnfoldedNode) -> tuple[set[str], Counter]:
    """Collapse an unfolded tree to its node set and arc multiset."""
    nodes: set[str] = set()
    arcs: Counter = Counter()

    def walk(t: UnfoldedNode):
        nodes.add(t.node)
        for label, child in t.children:
            arcs[t.node, label, child.node] += 1
            if not child.reference:
                walk(child)

    walk(tree)
    return nodes, arcs


def reachable_subgraph(graph: ContractGraph, root: str) -> tuple[set[str], Counter]:
    graph.node(root)
    seen = {root}
    stack = [root]
    while stack:
        n = stack.pop()
        for _, t in graph.out_edges(n):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    arcs: Counter = Counter()
    for n in seen:
        for label, t in graph.out_edges(n):
            arcs[n, label, t] += 1
    return seen, arcs


@dataclass(frozen=True)
class SpecReport:
    open_demands: tuple[tuple[str, str], ...] = ()  # (node id, question)
    advisories: tuple[tuple[str, str], ...] = ()

    @property
    def fully_specified(self) -> bool:
        return not self.open_demands


def check_specifications(
    graph: ContractGraph,
    checklist: Mapping[str, Iterable[str]] | None = None,
) -> SpecReport:
    """Report every required question a node leaves unanswered."""
    checklist = DEFAULT_CHECKLIST if checklist is None else checklist
    for kind, questions in checklist.items():
        if kind not in KINDS:
            raise ValueError(f"checklist kind {kind!r} is not a node kind")
        for q in questions:
            if q not in QUESTIONS:
                raise ValueError(f"checklist question {q!r} is not one of {QUESTIONS}")
    answered = defaultdict(set)
    for a in graph.arcs:
        answered[a.source].add(a.question)
    demands, advisories = [], []
    for n in graph.nodes:
        for q in sorted(checklist.get(n.kind, ()), key=QUESTIONS.index):
            if q not in answered[n.id]:
                demands.append((n.id, q))
        if checklist and n.kind in ADVISORY_KINDS and "what_if" not in answered[n.id]:
            if "what_if" not in checklist.get(n.kind, ()):
                advisories.append((n.id, "what_if"))
    return SpecReport(tuple(demands), tuple(advisories))


@dataclass(frozen=True)
class DraftExchange:
    """A proposal, a counter-proposal and the argument that links them.

    Atoms of the argument whose names are node ids refer to provisions in
    either draft.
    """

    proposal: ContractGraph
    counter: ContractGraph
    argument: ArgumentStructure

    def referenced_nodes(self) -> set[str]:
        ids = set(self.proposal.by_id) | set(self.counter.by_id)
        names = {f.name for p in self.argument.propositions for f in subformulas(p.content) if isinstance(f, Atom)}
        return names & ids

    def changed_nodes(self) -> set[str]:
        a, b = self.proposal.by_id, self.counter.by_id
        return {k for k in a.keys() | b.keys() if a.get(k) != b.get(k)}
