from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from argstruct.catalog import RelationDefinition, builtin_catalog, register
from argstruct.errors import BoundExceeded, InvalidAnalysis, NonAdjacent, Overlap
from argstruct.rst import (
    Analysis,
    Composite,
    Leaf,
    Ref,
    TextSpan,
    TextUnit,
    enumerate_analyses,
    leaves_in_order,
    node_span,
    span_union,
    validate,
)
from oracles import all_declaration_lists, mono_tree_count, tree_key

CAT = builtin_catalog()
E = "EVIDENCE"


def units(*ids):
    return [TextUnit(i, f"text {i}") for i in ids]


# -- spans -------------------------------------------------------------------

def test_span_union_contiguous():
    assert span_union([TextSpan(0, 1), TextSpan(2, 3)]) == TextSpan(0, 3)
    assert span_union([TextSpan(2, 3), TextSpan(0, 1)]) == TextSpan(0, 3)


def test_span_union_single():
    assert span_union([TextSpan(1, 1)]) == TextSpan(1, 1)


def test_span_union_gap_and_overlap():
    with pytest.raises(NonAdjacent):
        span_union([TextSpan(0, 0), TextSpan(2, 2)])
    with pytest.raises(Overlap):
        span_union([TextSpan(0, 2), TextSpan(2, 3)])
    with pytest.raises(ValueError):
        span_union([])


def test_span_must_be_ordered():
    with pytest.raises(ValueError):
        TextSpan(3, 1)


# -- construction ---------------------------------------------------------------

def test_empty_document_rejected_at_construction():
    with pytest.raises(ValueError):
        Analysis((), (Leaf(0),))


def test_duplicate_unit_ids_rejected():
    with pytest.raises(ValueError):
        Analysis(units("1", "1"), (Leaf(0),))


def test_reference_must_point_backwards():
    with pytest.raises(ValueError):
        Analysis(units("1", "2"), (Composite(E, (Ref(0),), (Leaf(1),)),))


def test_unit_text_whitespace_collapsed():
    assert TextUnit("1", "  a \t b ").text == "a b"


def test_build_and_tree_are_inverse():
    tree = Composite(E, (Leaf(0),), (Composite("JOINT", (Leaf(1), Leaf(2))),))
    a = Analysis.build(units("1", "2", "3"), tree)
    assert len(a.nodes) == 2
    assert a.tree() == tree
    assert a.label(0) == "@1" and a.label(1) == "@2"


# -- validation ------------------------------------------------------------------

def test_background_over_two_elaborations_accepted():
    a = Analysis(units("1.1", "1.2", "1.3", "1.4"), (
        Composite("ELABORATION", (Leaf(0),), (Leaf(1),)),
        Composite("ELABORATION", (Leaf(2),), (Leaf(3),)),
        Composite("BACKGROUND", (Ref(0),), (Ref(1),)),
    ))
    report = validate(a, CAT)
    assert report.accepted and report.verdict == "accepted"
    assert leaves_in_order(a, CAT) == ["1.1", "1.2", "1.3", "1.4"]


def test_disjoint_composites_without_root():
    a = Analysis(units("1", "2", "3", "4"), (
        Composite(E, (Leaf(0),), (Leaf(1),)),
        Composite(E, (Leaf(2),), (Leaf(3),)),
    ))
    assert validate(a, CAT).constraints == {"completeness"}


def test_gap_under_shared_parent():
    a = Analysis(units("1", "2", "3", "4"), (
        Composite(E, (Leaf(0),), (Leaf(1),)),
        Composite(E, (Ref(0),), (Leaf(3),)),
    ))
    assert "adjacency" in validate(a, CAT).constraints


def test_arity_checks():
    two_nuclei = Analysis(units("1", "2"), (Composite(E, (Leaf(0), Leaf(1))),))
    assert validate(two_nuclei, CAT).constraints == {"relation-arity"}
    joint_with_sat = Analysis(units("1", "2"), (Composite("JOINT", (Leaf(0),), (Leaf(1),)),))
    assert validate(joint_with_sat, CAT).constraints == {"relation-arity"}


def test_unknown_relation():
    a = Analysis(units("1", "2"), (Composite("FOO", (Leaf(0),), (Leaf(1),)),))
    report = validate(a, CAT)
    assert report.constraints == {"relation-unknown"}
    assert not report.accepted and report.verdict == "rejected"


def test_elaboration_tags():
    def elab(tag):
        return Analysis(units("1", "2"), (Composite("ELABORATION", (Leaf(0),), (Leaf(1),), tag),))

    assert validate(elab("whole:part"), CAT).accepted
    assert validate(elab(None), CAT).accepted
    assert validate(elab("part:whole"), CAT).constraints == {"relation-arity"}
    justify_tagged = Analysis(units("1", "2"), (Composite("JUSTIFY", (Leaf(0),), (Leaf(1),), "whole:part"),))
    assert validate(justify_tagged, CAT).constraints == {"relation-arity"}


def test_shared_child_is_connectedness():
    a = Analysis(units("1", "2", "3"), (
        Composite(E, (Leaf(0),), (Leaf(1),)),
        Composite(E, (Ref(0),), (Leaf(2),)),
        Composite(E, (Ref(0),), (Leaf(2),)),
    ))
    assert "connectedness" in validate(a, CAT).constraints


def test_registered_relation_is_usable():
    cat = register(CAT, RelationDefinition("PROCEDURAL-SPEC", "a", "b", "c", "d"))
    a = Analysis(units("1", "2"), (Composite("procedural spec", (Leaf(0),), (Leaf(1),)),))
    assert validate(a, cat).accepted
    assert not validate(a, CAT).accepted


def test_leaves_in_order_single_unit_and_rejection():
    single = Analysis(units("1"), (Leaf(0),))
    assert leaves_in_order(single, CAT) == ["1"]
    bad = Analysis(units("1", "2"), (Leaf(0),))
    with pytest.raises(InvalidAnalysis):
        leaves_in_order(bad, CAT)


def test_leaves_in_order_uses_text_position_not_nucleus_order():
    a = Analysis.build(units("1", "2"), Composite(E, (Leaf(1),), (Leaf(0),)))
    assert leaves_in_order(a, CAT) == ["1", "2"]


def test_removing_root_yields_completeness(load):
    marx = load("marx.arg").get("rst").value
    assert validate(marx, CAT).accepted
    assert "completeness" in validate(marx.without_root(), CAT).constraints


def test_marx_leaves(load):
    marx = load("marx.arg").get("rst").value
    assert leaves_in_order(marx, CAT) == [str(i) for i in range(1, 9)]


# -- enumeration -----------------------------------------------------------------

def test_enumerate_single_unit():
    assert len(enumerate_analyses(1, CAT, [E])) == 1


@pytest.mark.parametrize("k", [1, 2, 6])
def test_enumerate_two_units_mono(k):
    rels = sorted(n for n, d in CAT.items() if not d.multinuclear)[:k]
    assert len(enumerate_analyses(2, CAT, rels)) == mono_tree_count(2, k) == 2 * k


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumerate_matches_count_formula(n):
    assert len(enumerate_analyses(n, CAT, [E, "JUSTIFY"])) == mono_tree_count(n, 2)


def test_enumerate_with_multinuclear():
    # a flat ternary JOINT plus the two binary bracketings
    assert len(enumerate_analyses(3, CAT, ["JOINT"])) == 3


def test_enumerate_bound_and_arguments():
    with pytest.raises(BoundExceeded):
        enumerate_analyses(6, CAT, [E])
    assert len(enumerate_analyses(6, CAT, [E], bound=6)) == mono_tree_count(6, 1)
    with pytest.raises(ValueError):
        enumerate_analyses(2, CAT, [])


def test_enumerate_is_deterministic_and_distinct():
    a = enumerate_analyses(4, CAT, [E, "JOINT"])
    b = enumerate_analyses(4, CAT, [E, "JOINT"])
    assert a == b
    assert len({tree_key(x) for x in a}) == len(a)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_validator_agrees_with_brute_force(n):
    rels = [E, "JUSTIFY"]
    accepted = {tree_key(a) for a in all_declaration_lists(n, rels, max(n - 1, 1)) if validate(a, CAT).accepted}
    assert accepted == {tree_key(a) for a in enumerate_analyses(n, CAT, rels)}


# -- properties ------------------------------------------------------------------

@st.composite
def accepted_analyses(draw):
    n = draw(st.integers(1, 4))
    rels = draw(st.sampled_from([[E], ["JOINT"], [E, "SEQUENCE"], ["ELABORATION", "CONTRAST"]]))
    options = enumerate_analyses(n, CAT, rels)
    return draw(st.sampled_from(options))


@settings(max_examples=100, deadline=None)
@given(accepted_analyses())
def test_accepted_composites_have_contiguous_spans(a):
    assert validate(a, CAT).accepted
    for i in range(len(a.nodes)):
        node_span(a, i)
    assert leaves_in_order(a, CAT) == [u.id for u in a.units]
    assert node_span(a, a.root) == TextSpan(0, len(a.units) - 1)
