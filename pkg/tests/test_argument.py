from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from argstruct.argument import (
    FORMS,
    ArgumentStructure,
    Atom,
    Implies,
    Not,
    Proposition,
    SupportLink,
    add_support,
    assemble_document,
    check_link,
    check_single_structure,
    convergent_groups,
    formula_text,
    instantiate_form,
    neg,
    normalize,
    parse_formula,
    prop,
    structure_from_links,
)
from argstruct.errors import (
    CycleDetected,
    DisconnectedFragment,
    DuplicateSection,
    InvalidStructure,
    MissingArgumentativeSection,
    MultipleRoots,
    SchemaMismatch,
    SectionOrderViolation,
)
from oracles import entails

P, Q, R, A, B = (Atom(x) for x in "PQRAB")


def mp(p, q):
    return instantiate_form("MP", {"p": p, "q": q})


def mt(p, q):
    return instantiate_form("MT", {"p": p, "q": q})


# -- formulas --------------------------------------------------------------

def test_double_negation_normalizes():
    assert normalize(Not(Not(P))) == P
    assert Proposition("x", Not(Not(Not(P)))).content == Not(P)
    assert neg(Not(P)) == P and neg(P) == Not(P)


def test_formula_text_and_parse():
    f = Implies(Not(P), Implies(Q, Not(R)))
    assert formula_text(f) == "(~P->(Q->~R))"
    assert parse_formula(formula_text(f)) == f
    for bad in ["", "(P->", "P Q", "(P-Q)", "~"]:
        with pytest.raises(ValueError):
            parse_formula(bad)


formulas = st.recursive(
    st.sampled_from("PQRS").map(Atom),
    lambda inner: st.one_of(inner.map(Not), st.tuples(inner, inner).map(lambda t: Implies(*t))),
    max_leaves=6,
)


@given(formulas)
def test_parse_inverts_formula_text(f):
    assert parse_formula(formula_text(f)) == normalize(f)


def test_atom_names_validated():
    with pytest.raises(ValueError):
        Atom("two words")
    with pytest.raises(ValueError):
        Proposition("a,b", P)


# -- forms -------------------------------------------------------------------

def test_mp_instantiation():
    link, props = mp(A, B)
    by_id = {p.id: p.content for p in props}
    assert [by_id[i] for i in link.premises] == [A, Implies(A, B)]
    assert by_id[link.conclusion] == B
    assert link.mode == "linked" and link.form == "MP"


def test_mt_instantiation():
    link, props = mt(P, Q)
    by_id = {p.id: p.content for p in props}
    assert [by_id[i] for i in link.premises] == [Implies(P, Q), Not(Q)]
    assert by_id[link.conclusion] == Not(P)


def test_bound_propositions_keep_ids():
    link, props = mp(Proposition("a", A, "A holds"), Proposition("b", B))
    assert link.premises[0] == "a" and link.conclusion == "b"
    assert any(p.surface_text == "A holds" for p in props)


def test_ig():
    cls = Atom("Birds-fly")
    instances = [Atom("Tweety-flies", "Birds-fly"), Atom("Polly-flies", "Birds-fly")]
    link, props = instantiate_form("IG", {"class": cls, "instances": instances})
    assert link.form == "IG" and len(link.premises) == 2
    with pytest.raises(SchemaMismatch):
        instantiate_form("IG", {"class": cls, "instances": instances[:1]})
    with pytest.raises(SchemaMismatch):
        instantiate_form("IG", {"class": cls, "instances": [Atom("X"), Atom("Y")]})


def test_missing_binding():
    with pytest.raises(SchemaMismatch):
        instantiate_form("MP", {"p": A})


def test_instantiation_deterministic():
    assert mp(A, B) == mp(A, B)


def test_mp_then_mt_consistent():
    _, mp_props = mp(Not(P), Q)
    link, props = mt(Not(P), Q)
    conclusion = {p.id: p.content for p in props}[link.conclusion]
    assert conclusion == neg(Not(P)) == P


@pytest.mark.parametrize("form", ["MP", "MT"])
@given(p=formulas, q=formulas)
def test_mp_mt_are_truth_preserving(form, p, q):
    premises, conclusion = FORMS[form].build({"p": p, "q": q})
    assert FORMS[form].match([normalize(x) for x in premises], normalize(conclusion))
    assert entails(premises, conclusion)


# -- structures ------------------------------------------------------------------

def two_level():
    """MT concluding ~P placed under the ~P premise of MP(~P, ~P->R |- R)."""
    outer, outer_props = mp(Not(P), R)
    s = add_support(ArgumentStructure(), outer, outer_props)
    inner, inner_props = mt(P, Q)
    return add_support(s, inner, inner_props)


def test_two_level_structure():
    s = two_level()
    assert check_single_structure(s)
    assert s.root == "R"
    assert [lk.form for lk in s.links] == ["MP", "MT"]


def test_cycle_detected():
    l1, p1 = mp(A, B)
    s = add_support(ArgumentStructure(), l1, p1)
    l2, p2 = mp(B, A)
    with pytest.raises(CycleDetected):
        add_support(s, l2, p2)


def test_convergent_support():
    l1, p1 = mp(A, R)
    s = add_support(ArgumentStructure(), l1, p1)
    l2, p2 = mp(B, R)
    s = add_support(s, l2, p2)
    assert check_single_structure(s)
    assert convergent_groups(s) == {"R": [l1.id, l2.id]}


def test_disconnected_link_rejected():
    l1, p1 = mp(A, B)
    s = add_support(ArgumentStructure(), l1, p1)
    l2, p2 = mp(P, Q)
    with pytest.raises(DisconnectedFragment):
        add_support(s, l2, p2)


def test_second_root_rejected():
    l1, p1 = mp(A, B)
    s = add_support(ArgumentStructure(), l1, p1)
    l2, p2 = mp(A, Q)  # A now supports both B and Q
    with pytest.raises(MultipleRoots):
        add_support(s, l2, p2)


def test_schema_checked_on_add():
    s = ArgumentStructure((prop(A), prop(B)), ())
    bad = SupportLink("x", "MP", ("A",), "B")
    with pytest.raises(SchemaMismatch):
        add_support(s, bad)


def test_dropping_a_linked_premise_breaks_the_link():
    s = two_level()
    for lk in s.links:
        for i in range(len(lk.premises)):
            cut = SupportLink(lk.id, lk.form, lk.premises[:i] + lk.premises[i + 1:], lk.conclusion)
            with pytest.raises(SchemaMismatch):
                check_link(s, cut)


def test_single_structure_checks():
    assert check_single_structure(ArgumentStructure((prop(A),)))
    l1, p1 = mp(A, B)
    l2, p2 = mp(P, Q)
    both = ArgumentStructure(p1 + p2, (l1, l2))
    check = check_single_structure(both)
    assert not check
    assert any("disconnected" in d for d in check.diagnostics)
    assert any("roots" in d for d in check.diagnostics)
    assert not check_single_structure(ArgumentStructure())


def test_single_structure_invariant_under_renaming():
    s = two_level()
    rename = {p.id: f"n{i}" for i, p in enumerate(s.propositions)}
    renamed = ArgumentStructure(
        tuple(Proposition(rename[p.id], p.content) for p in s.propositions),
        tuple(SupportLink(lk.id, lk.form, tuple(rename[x] for x in lk.premises), rename[lk.conclusion]) for lk in s.links),
    )
    assert bool(check_single_structure(renamed)) == bool(check_single_structure(s))


def test_structure_from_links():
    s = structure_from_links([mp(Not(P), R), mt(P, Q)])
    assert s == two_level()


# -- envelope ------------------------------------------------------------------

def test_envelope_accepts_minimal_and_full():
    s = two_level()
    doc = assemble_document({"introduction": "Consider R.", "argumentative": s, "conclusion": "So R."})
    assert doc.names == ("introduction", "argumentative", "conclusion")
    assert doc["argumentative"] is s
    assert assemble_document([("argumentative", s)]).names == ("argumentative",)


def test_envelope_errors():
    s = two_level()
    with pytest.raises(SectionOrderViolation):
        assemble_document([("conclusion", "x"), ("introduction", "y"), ("argumentative", s)])
    with pytest.raises(MissingArgumentativeSection):
        assemble_document({"introduction": "x"})
    with pytest.raises(DuplicateSection):
        assemble_document([("argumentative", s), ("argumentative", s)])
    with pytest.raises(InvalidStructure):
        assemble_document({"argumentative": ArgumentStructure()})
    with pytest.raises(ValueError):
        assemble_document({"argumentative": s, "epilogue": "x"})
