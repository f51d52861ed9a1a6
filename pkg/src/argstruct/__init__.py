"""Rhetorical, argument and contract structure toolkit."""

from .argument import (
    FORMS,
    ArgumentDocument,
    ArgumentStructure,
    Atom,
    Implies,
    Not,
    Proposition,
    SupportLink,
    add_support,
    assemble_document,
    check_single_structure,
    formula_text,
    instantiate_form,
    parse_formula,
)
from .catalog import Catalog, RelationDefinition, argumentative_relations, builtin_catalog, register
from .contract import (
    ContractGraph,
    ContractNode,
    CrossReference,
    Provision,
    SpecArc,
    SyntacticTree,
    build_graph,
    check_specifications,
    fold,
    query,
    reachable_subgraph,
    roles_of,
    unfold,
)
from .dsl import Document, parse, serialize
from .export import export_graph
from .planner import BeliefState, Operator, Plan, apply_operator, plan, simulate
from .refine import RefinementMap, default_refinement_map, enumerate_refinements, recover_structure, refine
from .rst import Analysis, Composite, Leaf, Ref, TextSpan, TextUnit, enumerate_analyses, span_union, validate

__version__ = "0.1.0"
