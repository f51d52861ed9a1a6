"""RST analyses: text units, spans, relation applications and validation.

An :class:`Analysis` stores its nodes as a list of declarations, the way
an annotator writes them down: standalone leaves and composite relation
applications whose children are either inline leaves or references to an
earlier declaration.  The last declaration is the root.  Keeping the raw
declarations (rather than a nested tree) is what lets ill-formed analyses
exist long enough to be reported on.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Union

from .catalog import Catalog, normalize_name
from .errors import BoundExceeded, InvalidAnalysis, NonAdjacent, Overlap

CONSTRAINTS = (
    "completeness",
    "connectedness",
    "uniqueness",
    "adjacency",
    "relation-arity",
    "relation-unknown",
)

DEFAULT_ENUMERATION_BOUND = 5


@dataclass(frozen=True)
class TextUnit:
    id: str
    text: str = ""

    def __post_init__(self):
        if not self.id or any(c.isspace() for c in self.id):
            raise ValueError(f"bad unit id {self.id!r}")
        object.__setattr__(self, "text", " ".join(self.text.split()))


@dataclass(frozen=True, order=True)
class TextSpan:
    """Closed interval ``start..end`` of unit indices."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")
        if self.start < 0:
            raise ValueError("span indices are non-negative")

    def __len__(self):
        return self.end - self.start + 1

    def units(self) -> range:
        return range(self.start, self.end + 1)


def span_union(spans: Sequence[TextSpan]) -> TextSpan:
    """The single interval covered by ``spans``.

    Raises Overlap if two spans share a unit and NonAdjacent if the union
    has a gap.
    """
    if not spans:
        raise ValueError("span_union needs at least one span")
    ordered = sorted(spans)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start <= prev.end:
            raise Overlap(f"{prev} and {cur} overlap")
        if cur.start != prev.end + 1:
            raise NonAdjacent(f"units {prev.end + 1}..{cur.start - 1} missing between {prev} and {cur}")
    return TextSpan(ordered[0].start, ordered[-1].end)


@dataclass(frozen=True)
class Leaf:
    unit: int


@dataclass(frozen=True)
class Ref:
    """Reference to an earlier declaration of the same analysis."""

    node: int


@dataclass(frozen=True)
class Composite:
    relation: str
    nuclei: tuple
    satellites: tuple = ()
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "relation", normalize_name(self.relation))
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        object.__setattr__(self, "satellites", tuple(self.satellites))

    @property
    def children(self) -> tuple:
        return self.nuclei + self.satellites


Node = Union[Leaf, Composite]


@dataclass(frozen=True)
class Analysis:
    units: tuple[TextUnit, ...]
    nodes: tuple[Node, ...]

    def __post_init__(self):
        units = tuple(u if isinstance(u, TextUnit) else TextUnit(*u) for u in self.units)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not units:
            raise ValueError("an analysis needs at least one text unit")
        ids = [u.id for u in units]
        if len(set(ids)) != len(ids):
            dup = next(i for i, c in Counter(ids).items() if c > 1)
            raise ValueError(f"duplicate unit id {dup!r}")
        if not self.nodes:
            raise ValueError("an analysis needs at least one node")
        for i, node in enumerate(self.nodes):
            if isinstance(node, Leaf):
                self._check_leaf(node)
            elif isinstance(node, Composite):
                if not node.nuclei:
                    raise ValueError(f"composite {i} has no nucleus")
                for child in node.children:
                    if isinstance(child, Leaf):
                        self._check_leaf(child)
                    elif isinstance(child, Ref):
                        if not 0 <= child.node < i:
                            raise ValueError(f"composite {i} refers to node {child.node}, which is not an earlier declaration")
                        if not isinstance(self.nodes[child.node], Composite):
                            raise ValueError("references may only point at composites")
                    else:
                        raise TypeError(f"bad child {child!r}")
            else:
                raise TypeError(f"bad node {node!r}")

    def _check_leaf(self, leaf: Leaf) -> None:
        if not 0 <= leaf.unit < len(self.units):
            raise ValueError(f"leaf refers to unit index {leaf.unit} outside the document")

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    def unit_index(self, unit_id: str) -> int:
        for i, u in enumerate(self.units):
            if u.id == unit_id:
                return i
        raise KeyError(unit_id)

    def label(self, index: int) -> str:
        """Human-readable label of a declaration: ``@k`` or ``unit <id>``."""
        node = self.nodes[index]
        if isinstance(node, Leaf):
            return f"unit {self.units[node.unit].id}"
        return "@" + str(sum(isinstance(n, Composite) for n in self.nodes[: index + 1]))

    @classmethod
    def build(cls, units: Iterable, tree) -> Analysis:
        """Build an analysis from a nested tree.

        ``tree`` is a Leaf or a Composite whose children may themselves be
        nested Composites; they are flattened into post-order declarations.
        ``units`` may be TextUnits, ``(id, text)`` pairs or bare ids.
        """
        units = tuple(
            u if isinstance(u, TextUnit) else TextUnit(u) if isinstance(u, str) else TextUnit(*u)
            for u in units
        )
        nodes: list[Node] = []

        def flatten(t):
            if isinstance(t, Leaf):
                return t
            kids_n = tuple(flatten(c) for c in t.nuclei)
            kids_s = tuple(flatten(c) for c in t.satellites)
            nodes.append(Composite(t.relation, kids_n, kids_s, t.tag))
            return Ref(len(nodes) - 1)

        if isinstance(tree, Leaf):
            nodes.append(tree)
        else:
            flatten(tree)
        return cls(units, tuple(nodes))

    def tree(self, index: int | None = None):
        """Nested view of the declaration at ``index`` (default: the root)."""
        node = self.nodes[self.root if index is None else index]
        if isinstance(node, Leaf):
            return node

        def expand(child):
            return child if isinstance(child, Leaf) else self.tree(child.node)

        return Composite(
            node.relation,
            tuple(expand(c) for c in node.nuclei),
            tuple(expand(c) for c in node.satellites),
            node.tag,
        )

    def without_root(self) -> Analysis:
        """Drop the root relation, promoting its inline leaves to declarations."""
        root = self.nodes[self.root]
        if isinstance(root, Leaf):
            raise ValueError("a single-leaf analysis has no root relation")
        promoted = tuple(c for c in root.children if isinstance(c, Leaf))
        return Analysis(self.units, self.nodes[:-1] + promoted)


@dataclass(frozen=True)
class Violation:
    constraint: str
    path: str
    message: str

    def __str__(self):
        return f"{self.constraint} at {self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "accepted" if self.accepted else "rejected"

    @property
    def constraints(self) -> frozenset[str]:
        return frozenset(v.constraint for v in self.violations)


def _covers(analysis: Analysis) -> list[Counter]:
    """Multiset of unit indices under each declaration."""
    covers: list[Counter] = []
    for node in analysis.nodes:
        if isinstance(node, Leaf):
            covers.append(Counter([node.unit]))
            continue
        c: Counter = Counter()
        for child in node.children:
            c += Counter([child.unit]) if isinstance(child, Leaf) else covers[child.node]
        covers.append(c)
    return covers


def _child_cover(child, covers) -> Counter:
    return Counter([child.unit]) if isinstance(child, Leaf) else covers[child.node]


def validate(analysis: Analysis, catalog: Catalog) -> ValidationReport:
    """Check the composition constraints plus relation arity and names.

    Rejection is reported, never raised.  Classification of faults:

    * completeness: the root does not cover every unit;
    * connectedness: a non-root declaration is the child of zero or of
      several composites (zero-parent nodes are only reported when a
      complete root exists; otherwise the missing root is the diagnosis);
    * uniqueness: two composites cover the same units, or a composite's
      children share a unit;
    * adjacency: a composite's children leave a gap.
    """
    out: list[Violation] = []
    covers = _covers(analysis)

    def add(kind, index, msg):
        out.append(Violation(kind, analysis.label(index), msg))

    seen_covers: dict[frozenset, int] = {}
    for i, node in enumerate(analysis.nodes):
        if not isinstance(node, Composite):
            continue
        if node.relation not in catalog:
            add("relation-unknown", i, f"relation {node.relation} is not in the catalog")
        else:
            defn = catalog[node.relation]
            nn, ns = len(node.nuclei), len(node.satellites)
            if defn.multinuclear and (nn < 2 or ns):
                add("relation-arity", i, f"{defn.name} is multi-nuclear: needs >=2 nuclei and no satellite, got {nn}N/{ns}S")
            elif not defn.multinuclear and (nn, ns) != (1, 1):
                add("relation-arity", i, f"{defn.name} is mononuclear: needs 1 nucleus and 1 satellite, got {nn}N/{ns}S")
            if node.tag is not None and node.tag not in (defn.allowed_annotations or ()):
                add("relation-arity", i, f"annotation {node.tag!r} is not allowed on {defn.name}")

        child_covers = [_child_cover(c, covers) for c in node.children]
        units: Counter = Counter()
        for cc in child_covers:
            units += cc
        if any(k > 1 for k in units.values()):
            add("uniqueness", i, "children share text units")
        else:
            lo, hi = min(units), max(units)
            if len(units) != hi - lo + 1:
                missing = sorted(set(range(lo, hi + 1)) - set(units))
                add("adjacency", i, "children do not form one span; missing " + ", ".join(analysis.units[m].id for m in missing))

        key = frozenset(covers[i])
        if key in seen_covers:
            add("uniqueness", i, f"covers the same units as {analysis.label(seen_covers[key])}")
        else:
            seen_covers[key] = i

    root = analysis.root
    root_complete = set(covers[root]) == set(range(len(analysis.units)))
    if not root_complete:
        missing = [analysis.units[m].id for m in range(len(analysis.units)) if m not in covers[root]]
        out.append(Violation("completeness", analysis.label(root), "root does not cover units " + ", ".join(missing)))

    parents = Counter()
    for node in analysis.nodes:
        if isinstance(node, Composite):
            for child in node.children:
                if isinstance(child, Ref):
                    parents[child.node] += 1
    for i in range(len(analysis.nodes)):
        if i == root:
            continue
        if parents[i] > 1:
            add("connectedness", i, f"child of {parents[i]} composites")
        elif parents[i] == 0 and root_complete:
            add("connectedness", i, "not attached to the structure")

    return ValidationReport(tuple(out))


def _first_unit(tree) -> int:
    if isinstance(tree, Leaf):
        return tree.unit
    return min(_first_unit(c) for c in tree.children)


def ordered_children(tree: Composite) -> list:
    return sorted(tree.children, key=_first_unit)


def leaves_in_order(analysis: Analysis, catalog: Catalog) -> list[str]:
    report = validate(analysis, catalog)
    if not report.accepted:
        raise InvalidAnalysis("; ".join(map(str, report.violations)))
    out: list[str] = []

    def walk(t):
        if isinstance(t, Leaf):
            out.append(analysis.units[t.unit].id)
        else:
            for c in ordered_children(t):
                walk(c)

    walk(analysis.tree())
    return out


def node_span(analysis: Analysis, index: int) -> TextSpan:
    """Span of a declaration, via span_union over its children."""
    node = analysis.nodes[index]
    if isinstance(node, Leaf):
        return TextSpan(node.unit, node.unit)
    return span_union([
        TextSpan(c.unit, c.unit) if isinstance(c, Leaf) else node_span(analysis, c.node)
        for c in node.children
    ])


def _compositions(lo: int, hi: int, min_parts: int = 2):
    """Ways to cut lo..hi into >= min_parts contiguous intervals."""
    n = hi - lo + 1
    for k in range(min_parts - 1, n):
        for cuts in itertools.combinations(range(lo + 1, hi + 1), k):
            bounds = (lo, *cuts, hi + 1)
            yield [(bounds[j], bounds[j + 1] - 1) for j in range(len(bounds) - 1)]


def _sort_key(tree):
    """(composite count, preorder relation names, preorder nucleus positions, preorder child sizes)."""
    names, nucs, sizes = [], [], []

    def walk(t):
        if isinstance(t, Leaf):
            return 0
        kids = ordered_children(t)
        names.append(t.relation)
        nucs.append(tuple(i for i, k in enumerate(kids) if k in t.nuclei))
        sizes.append(tuple(_width(k) for k in kids))
        return 1 + sum(walk(k) for k in kids)

    count = walk(tree)
    return (count, tuple(names), tuple(nucs), tuple(sizes))


def _width(t) -> int:
    return 1 if isinstance(t, Leaf) else sum(_width(c) for c in t.children)


def enumerate_analyses(
    n: int,
    catalog: Catalog,
    relations: Iterable[str],
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> list[Analysis]:
    """Every well-formed analysis of ``n`` units using ``relations``.

    Brute force over tree shapes, relation names and nucleus placement;
    this is the reference the validator is tested against.
    """
    if n > bound:
        raise BoundExceeded(f"{n} units exceeds the enumeration bound {bound}")
    if n < 1:
        raise ValueError("need at least one unit")
    defs = sorted({catalog[r].name: catalog[r] for r in relations}.values(), key=lambda d: d.name)
    if not defs:
        raise ValueError("relation subset is empty")

    memo: dict[tuple[int, int], list] = {}

    def trees(lo: int, hi: int) -> list:
        if (lo, hi) in memo:
            return memo[lo, hi]
        if lo == hi:
            result = [Leaf(lo)]
        else:
            result = []
            for d in defs:
                if d.multinuclear:
                    for parts in _compositions(lo, hi):
                        for kids in itertools.product(*(trees(a, b) for a, b in parts)):
                            result.append(Composite(d.name, kids))
                else:
                    for (a1, b1), (a2, b2) in _compositions_binary(lo, hi):
                        for left in trees(a1, b1):
                            for right in trees(a2, b2):
                                result.append(Composite(d.name, (left,), (right,)))
                                result.append(Composite(d.name, (right,), (left,)))
        memo[lo, hi] = result
        return result

    units = [TextUnit(str(i + 1)) for i in range(n)]
    return [Analysis.build(units, t) for t in sorted(trees(0, n - 1), key=_sort_key)]


def _compositions_binary(lo: int, hi: int):
    for cut in range(lo, hi):
        yield (lo, cut), (cut + 1, hi)
