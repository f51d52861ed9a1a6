from __future__ import annotations

import random

import pytest

from argstruct.argument import (
    ArgumentStructure,
    Atom,
    Implies,
    Not,
    Proposition,
    add_support,
    assemble_document,
    instantiate_form,
    prop,
)
from argstruct.catalog import RelationDefinition, argumentative_relations, builtin_catalog, register
from argstruct.errors import (
    BoundExceeded,
    DepthExceeded,
    InvalidStructure,
    NonArgumentativeTarget,
    NoPlan,
    SharedPremise,
    UnmappedForm,
)
from argstruct.planner import BeliefState, plan
from argstruct.refine import (
    DEFAULT_TARGETS,
    RefinementMap,
    check_map,
    default_refinement_map,
    enumerate_refinements,
    recover_structure,
    refine,
)
from argstruct.rst import Composite, Leaf, validate
from generators import planning_instance

CAT = builtin_catalog()
P, Q, R, A, B = (Atom(x) for x in "PQRAB")


def one_link():
    link, props = instantiate_form("MP", {"p": A, "q": B})
    return add_support(ArgumentStructure(), link, props)


def two_level():
    outer, op = instantiate_form("MP", {"p": Not(P), "q": R})
    inner, ip = instantiate_form("MT", {"p": P, "q": Q})
    return add_support(add_support(ArgumentStructure(), outer, op), inner, ip)


def relations_used(analysis):
    return [n.relation for n in analysis.nodes if isinstance(n, Composite)]


def test_default_map():
    rmap = default_refinement_map()
    assert rmap["MP"] == DEFAULT_TARGETS == rmap["IG"]
    assert set(DEFAULT_TARGETS) == argumentative_relations(CAT)
    with pytest.raises(UnmappedForm):
        rmap["XX"]


def test_single_mp_refinement():
    forest = refine(one_link())
    a = forest.analyses[0]
    assert a.tree() == Composite("EVIDENCE", (Leaf(2),), (Composite("JOINT", (Leaf(0), Leaf(1))),))
    assert [u.text for u in a.units] == ["A", "(A->B)", "B"]
    assert validate(a, CAT).accepted


def test_two_level_refinement():
    forest = refine(two_level())
    a = forest.analyses[0]
    assert validate(a, CAT).accepted
    assert relations_used(a).count("EVIDENCE") == 2
    # the inner relation realises the MT subargument inside the outer satellite
    outer = a.tree()
    inner = outer.satellites[0].nuclei[0]
    assert inner.relation == "EVIDENCE" and forest.unit_props[0][inner.nuclei[0].unit] == "~P"


def test_surface_text_used():
    link, props = instantiate_form("MP", {"p": Proposition("a", A, "It rains."), "q": Proposition("b", B, "Streets are wet.")})
    s = add_support(ArgumentStructure(), link, props)
    texts = [u.text for u in refine(s).analyses[0].units]
    assert texts == ["It rains.", "(A->B)", "Streets are wet."]


def test_single_claim():
    forest = refine(ArgumentStructure((prop(A),)))
    assert len(forest) == 1 and len(forest.analyses[0].units) == 1


def test_plan_accepted():
    result = plan(R, BeliefState.of([Implies(P, Q), Not(Q), Implies(Not(P), R)]))
    forest = refine(result)
    assert validate(forest.analyses[0], CAT).accepted


def test_convergent_links_share_nucleus():
    l1, p1 = instantiate_form("MP", {"p": A, "q": R})
    l2, p2 = instantiate_form("MP", {"p": B, "q": R})
    s = add_support(add_support(ArgumentStructure(), l1, p1), l2, p2)
    a = refine(s).analyses[0]
    assert validate(a, CAT).accepted
    assert relations_used(a).count("EVIDENCE") == 2
    assert a.units[-1].text == "R"


def test_shared_premise_rejected():
    l1, p1 = instantiate_form("MP", {"p": A, "q": B})
    s = add_support(ArgumentStructure(), l1, p1)
    l2, p2 = instantiate_form("MP", {"p": P, "q": A})
    s = add_support(s, l2, p2)
    # A is premise of one link and conclusion of another: still a tree
    assert validate(refine(s).analyses[0], CAT).accepted
    dag = ArgumentStructure(
        (prop(A), prop(B), prop(Implies(A, B)), prop(Implies(A, Implies(A, B)))),
        (
            instantiate_form("MP", {"p": A, "q": B})[0],
            instantiate_form("MP", {"p": A, "q": Implies(A, B)})[0],
        ),
    )
    with pytest.raises(SharedPremise):
        refine(dag)


def test_invalid_structure_rejected():
    with pytest.raises(InvalidStructure):
        refine(ArgumentStructure())


def test_envelope_sections_refine_separately():
    doc = assemble_document({"introduction": "Consider B.", "argumentative": one_link(), "conclusion": "So B."})
    forest = refine(doc)
    assert forest.sections == ("introduction", "argumentative", "conclusion")
    assert [len(a.units) for a in forest.analyses] == [1, 3, 1]
    assert all(validate(a, CAT).accepted for a in forest.analyses)


def test_map_targets_checked():
    with pytest.raises(NonArgumentativeTarget):
        check_map(RefinementMap({"MP": ("ELABORATION",)}), CAT)
    cat = register(CAT, RelationDefinition("DUO", "a", "b", "c", "d", nuclearity="multi", argumentative=True))
    with pytest.raises(NonArgumentativeTarget):
        check_map(RefinementMap({"MP": ("DUO",)}), cat)
    with pytest.raises(UnmappedForm):
        check_map(RefinementMap({"MP": ()}), CAT)
    with pytest.raises(UnmappedForm):
        refine(one_link(), rmap=RefinementMap({"MT": ("EVIDENCE",)}))


def test_choices_pin_relations():
    s = one_link()
    lid = s.links[0].id
    a = refine(s, choices={lid: "MOTIVATION"}).analyses[0]
    assert relations_used(a) == ["JOINT", "MOTIVATION"]
    with pytest.raises(UnmappedForm):
        refine(s, rmap=default_refinement_map().restricted(["EVIDENCE"]), choices={lid: "JUSTIFY"})


def test_enumeration_counts():
    assert len(enumerate_refinements(one_link())) == 6
    assert len(enumerate_refinements(two_level(), bound=100)) == 36
    assert len(enumerate_refinements(one_link(), rmap=default_refinement_map().restricted(["EVIDENCE"]))) == 1
    with pytest.raises(BoundExceeded):
        enumerate_refinements(two_level(), bound=10)
    with pytest.raises(ValueError):
        enumerate_refinements(one_link(), bound=0)


def test_enumerated_forests_distinct_and_recover():
    s = two_level()
    forests = enumerate_refinements(s)
    assert len({f.analyses for f in forests}) == 36
    for f in forests:
        assert validate(f.analyses[0], CAT).accepted
        assert recover_structure(f) == s


def test_refine_properties_on_random_plans():
    rng = random.Random(3)
    allowed = argumentative_relations(CAT) | {"JOINT"}
    refined = 0
    for _ in range(1000):
        goal, initial, kb, depth = planning_instance(rng)
        try:
            result = plan(goal, initial, kb, depth_limit=depth)
            forest = refine(result)
        except (NoPlan, DepthExceeded, SharedPremise):
            continue
        refined += 1
        a = forest.analyses[0]
        assert validate(a, CAT).accepted
        used = relations_used(a)
        assert set(used) <= allowed
        assert len([r for r in used if r != "JOINT"]) == len(result.structure.links)
    assert refined > 100
