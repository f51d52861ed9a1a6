"""Registry of rhetorical relation definitions.

Relation names are canonicalised to upper case with hyphens, so
``"Volitional Cause"``, ``"volitional-cause"`` and ``"VOLITIONAL-CAUSE"``
all resolve to the same entry.  Only JUSTIFY and ELABORATION carry full
definitional text; the remaining Mann & Thompson relations carry
placeholder text plus the nuclearity and argumentative flags that the
rest of the package actually consumes.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, replace

from .errors import DuplicateName, MissingField, UnknownRelation

LOCI = ("N", "S", "N+S")
NUCLEARITIES = ("mono", "multi")

PLACEHOLDER = "per Mann & Thompson (1987)"

ELABORATION_TAGS = frozenset({
    "set:member",
    "abstract:instance",
    "whole:part",
    "process:step",
    "object:attribute",
    "generalization:specific",
})


def normalize_name(name: str) -> str:
    """Canonical spelling of a relation name."""
    return "-".join(name.replace("_", " ").replace("-", " ").split()).upper()


@dataclass(frozen=True)
class RelationDefinition:
    name: str
    constraints_on_nucleus: str | None
    constraints_on_satellite: str | None
    constraints_on_combination: str | None
    effect: str | None
    locus_of_effect: str = "N"
    nuclearity: str = "mono"
    argumentative: bool = False
    allowed_annotations: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", normalize_name(self.name))
        if self.locus_of_effect == "NS":
            object.__setattr__(self, "locus_of_effect", "N+S")
        if self.locus_of_effect not in LOCI:
            raise ValueError(f"locus_of_effect must be one of {LOCI}, got {self.locus_of_effect!r}")
        if self.nuclearity not in NUCLEARITIES:
            raise ValueError(f"nuclearity must be mono or multi, got {self.nuclearity!r}")
        if self.allowed_annotations is not None:
            object.__setattr__(self, "allowed_annotations", frozenset(self.allowed_annotations))

    @property
    def multinuclear(self) -> bool:
        return self.nuclearity == "multi"

    def fields(self) -> dict[str, str | None]:
        return {
            "constraints_on_nucleus": self.constraints_on_nucleus,
            "constraints_on_satellite": self.constraints_on_satellite,
            "constraints_on_combination": self.constraints_on_combination,
            "effect": self.effect,
        }


def check_fields(defn: RelationDefinition) -> None:
    """Raise MissingField unless all four definitional fields are given.

    Empty text is tolerated only for the vacuous JOINT relation.
    """
    for key, value in defn.fields().items():
        if value is None:
            raise MissingField(f"{defn.name}: {key} is missing")
        if not value.strip() and defn.name != "JOINT":
            raise MissingField(f"{defn.name}: {key} is empty")


class Catalog(Mapping):
    """Immutable ordered map from canonical relation name to definition."""

    __slots__ = ("_defs",)

    def __init__(self, definitions: Iterable[RelationDefinition] = ()):
        defs: dict[str, RelationDefinition] = {}
        for d in definitions:
            if d.name in defs:
                raise DuplicateName(d.name)
            defs[d.name] = d
        self._defs = defs

    def __getitem__(self, name: str) -> RelationDefinition:
        try:
            return self._defs[normalize_name(name)]
        except KeyError:
            raise UnknownRelation(f"unknown relation {name!r}") from None

    def __contains__(self, name) -> bool:
        return isinstance(name, str) and normalize_name(name) in self._defs

    def __iter__(self) -> Iterator[str]:
        return iter(self._defs)

    def __len__(self) -> int:
        return len(self._defs)

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return list(self._defs.items()) == list(other._defs.items())

    def __hash__(self):
        return hash(tuple(self._defs.values()))

    def __repr__(self):
        return f"Catalog({list(self._defs)})"

    def lookup(self, name: str) -> RelationDefinition:
        return self[name]


def _placeholder(name: str, *, nuclearity: str = "mono", argumentative: bool = False) -> RelationDefinition:
    return RelationDefinition(
        name=name,
        constraints_on_nucleus=PLACEHOLDER,
        constraints_on_satellite=PLACEHOLDER,
        constraints_on_combination=PLACEHOLDER,
        effect=PLACEHOLDER,
        locus_of_effect="N+S" if nuclearity == "multi" else "N",
        nuclearity=nuclearity,
        argumentative=argumentative,
    )


JUSTIFY = RelationDefinition(
    name="JUSTIFY",
    constraints_on_nucleus="none",
    constraints_on_satellite="none",
    constraints_on_combination="understanding S bears on whether R grants W the standing to present N",
    effect="Reader's readiness to accept Writer's right to present N is increased.",
    locus_of_effect="N",
    argumentative=True,
)

ELABORATION = RelationDefinition(
    name="ELABORATION",
    constraints_on_nucleus="none",
    constraints_on_satellite="none",
    constraints_on_combination=(
        "S adds detail to N, or to something inferable from N, standing to it as "
        "the second member of one of the allowed annotation pairs"
    ),
    effect="R takes S as detail for N and can tell which element is being detailed",
    locus_of_effect="N+S",
    allowed_annotations=ELABORATION_TAGS,
)

# JOINT only groups spans; it constrains nothing and has no effect.
JOINT = RelationDefinition(
    name="JOINT",
    constraints_on_nucleus="",
    constraints_on_satellite="",
    constraints_on_combination="",
    effect="",
    locus_of_effect="N+S",
    nuclearity="multi",
)


def _builtin_definitions() -> list[RelationDefinition]:
    arg = {"argumentative": True}
    return [
        _placeholder("Circumstance"),
        _placeholder("Solutionhood", **arg),
        ELABORATION,
        _placeholder("Background"),
        _placeholder("Enablement"),
        _placeholder("Motivation", **arg),
        _placeholder("Evidence", **arg),
        JUSTIFY,
        _placeholder("Volitional Cause", **arg),
        _placeholder("Non-Volitional Cause", **arg),
        _placeholder("Volitional Result"),
        _placeholder("Non-Volitional Result"),
        _placeholder("Purpose"),
        _placeholder("Antithesis"),
        _placeholder("Concession"),
        _placeholder("Condition"),
        _placeholder("Otherwise"),
        _placeholder("Interpretation"),
        _placeholder("Evaluation"),
        _placeholder("Restatement"),
        _placeholder("Summary"),
        _placeholder("Sequence", nuclearity="multi"),
        _placeholder("Contrast", nuclearity="multi"),
        JOINT,
    ]


_BUILTIN = Catalog(_builtin_definitions())


def builtin_catalog() -> Catalog:
    return _BUILTIN


def register(catalog: Catalog, defn: RelationDefinition) -> Catalog:
    """Return a new catalog extended with ``defn``; ``catalog`` is untouched."""
    check_fields(defn)
    if defn.name in catalog:
        raise DuplicateName(f"relation {defn.name} is already defined")
    return Catalog([*catalog.values(), defn])


def argumentative_relations(catalog: Catalog) -> frozenset[str]:
    return frozenset(name for name, d in catalog.items() if d.argumentative)


def shadow(catalog: Catalog, name: str, new_name: str, **changes) -> Catalog:
    """Register a copy of an existing relation under a new name."""
    return register(catalog, replace(catalog[name], name=new_name, **changes))
