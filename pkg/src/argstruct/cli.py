"""Command-line interface.

Exit status: 0 success, 1 a validation or check failed, 2 the input could
not be parsed or the command line was wrong.
"""

from __future__ import annotations

import argparse
import sys

from .argument import check_single_structure, formula_text
from .catalog import builtin_catalog
from .contract import DEFAULT_CHECKLIST, QUESTIONS, check_specifications, query
from .dsl import Document, Section, parse, parse_catalog_file, parse_checklist, serialize
from .errors import ArgStructError, BoundExceeded, DepthExceeded, NoPlan, UnknownNode, UnsupportedFormat
from .export import export_graph
from .planner import DEFAULT_DEPTH_LIMIT, BeliefState, plan
from .refine import check_map, enumerate_refinements, refine
from .rst import validate

OK, FAILED, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError:
        raise _Usage(f"{path} is not UTF-8") from None


def _load(path: str) -> Document:
    result = parse(_read(path))
    for d in result.diagnostics:
        print(f"{path}:{d}", file=sys.stderr)
    if not result.ok:
        raise _Usage(f"{path}: {len(result.errors)} error(s)")
    return result.document


def _section(doc: Document, kind: str, name: str | None) -> Section:
    try:
        return doc.get(kind, name)
    except KeyError as e:
        raise _Usage(f"{e.args[0]}") from None


def _hearer(doc: Document, spec) -> tuple[BeliefState, list]:
    def resolve(ref):
        return doc.proposition(ref, spec)

    state = BeliefState.of([resolve(r).content for r in spec.believe], [resolve(r).content for r in spec.disbelieve])
    return state, [resolve(r) for r in spec.kb]


def cmd_validate(args) -> int:
    doc = _load(args.file)
    catalog = doc.relation_catalog()
    failed = False
    for s in doc.sections:
        if s.kind == "rst":
            report = validate(s.value, catalog)
            print(f"rst {s.name}: {report.verdict}")
            for v in report.violations:
                print(f"  {v}")
            failed |= not report.accepted
        elif s.kind == "argument":
            check = check_single_structure(s.value)
            print(f"argument {s.name}: {'accepted' if check else 'rejected'}")
            for msg in check.diagnostics:
                print(f"  {msg}")
            failed |= not check
        else:
            print(f"{s.kind} {s.name}: accepted")
    if not doc.sections:
        print("accepted")
    return FAILED if failed else OK


def cmd_catalog_list(args) -> int:
    catalog = builtin_catalog()
    if args.extensions:
        section, diags = parse_catalog_file(_read(args.extensions))
        for d in diags:
            print(f"{args.extensions}:{d}", file=sys.stderr)
        if section is None:
            raise _Usage(f"{args.extensions}: bad catalog file")
        catalog = section.catalog(catalog)
    width = max(len(n) for n in catalog)
    for name, d in catalog.items():
        flag = "argumentative" if d.argumentative else ""
        print(f"{name:<{width}}  {d.nuclearity:<5}  {flag}".rstrip())
    return OK


def cmd_plan(args) -> int:
    doc = _load(args.file)
    spec = _section(doc, "plan", args.plan).value
    goal_ref = args.goal or spec.goal
    if goal_ref is None:
        raise _Usage("no goal: pass --goal or add a goal line")
    try:
        goal = doc.proposition(goal_ref, spec)
    except ValueError:
        raise _Usage(f"unknown proposition {goal_ref!r}") from None
    try:
        state, kb = _hearer(doc, spec)
    except ValueError as e:
        print(f"inconsistent hearer model: {e}")
        return FAILED
    props = [*spec.propositions, *(p for s in doc.of_kind("argument") for p in s.value.propositions)]
    try:
        result = plan(goal, state, kb, depth_limit=args.depth, propositions=props)
    except (NoPlan, DepthExceeded) as e:
        print(f"no plan: {e}")
        return FAILED
    print(f"goal {formula_text(result.goal)}")
    for f in result.assertions:
        print(f"assert {formula_text(f)}")
    for i, op in enumerate(result.steps, 1):
        print(f"{i}. {op}")
    return OK


def cmd_refine(args) -> int:
    doc = _load(args.file)
    catalog = doc.relation_catalog()
    rmap = doc.refinement_map()
    if args.map:
        section, diags = parse_catalog_file(_read(args.map))
        for d in diags:
            print(f"{args.map}:{d}", file=sys.stderr)
        if section is None:
            raise _Usage(f"{args.map}: bad map file")
        catalog = section.catalog(catalog)
        merged = dict(rmap.entries)
        merged.update(section.maps)
        rmap = type(rmap)(tuple(merged.items()))
    try:
        check_map(rmap, catalog)
    except (ArgStructError, KeyError) as e:
        raise _Usage(f"bad refinement map: {e}") from None
    if args.argument or doc.of_kind("argument"):
        section = _section(doc, "argument", args.argument)
        name, structure = section.name, section.value
    else:
        spec_section = _section(doc, "plan", None)
        spec = spec_section.value
        if spec.goal is None:
            raise _Usage("the plan section has no goal")
        try:
            state, kb = _hearer(doc, spec)
            structure = plan(doc.proposition(spec.goal, spec), state, kb, propositions=spec.propositions).structure
        except ValueError as e:
            print(f"inconsistent hearer model: {e}")
            return FAILED
        except (NoPlan, DepthExceeded) as e:
            print(f"no plan: {e}")
            return FAILED
        name = spec_section.name
    try:
        if args.enumerate is not None:
            forests = enumerate_refinements(structure, catalog, rmap, bound=args.enumerate)
        else:
            forests = [refine(structure, catalog, rmap)]
    except BoundExceeded as e:
        print(str(e))
        return FAILED
    except ArgStructError as e:
        print(f"cannot refine: {e}")
        return FAILED
    for i, forest in enumerate(forests, 1):
        analysis = forest.analyses[0]
        label = name if len(forests) == 1 else f"{name}-{i}"
        print(serialize(Document(analysis.units, sections=(Section("rst", label, analysis),))), end="")
        if i < len(forests):
            print()
    return OK


def cmd_contract_check(args) -> int:
    doc = _load(args.file)
    checklist = DEFAULT_CHECKLIST
    if args.checklist:
        checklist, diags = parse_checklist(_read(args.checklist))
        for d in diags:
            print(f"{args.checklist}:{d}", file=sys.stderr)
        if checklist is None:
            raise _Usage(f"{args.checklist}: bad checklist")
    sections = doc.of_kind("contract")
    if args.contract:
        sections = [_section(doc, "contract", args.contract)]
    if not sections:
        raise _Usage("no #contract section")
    open_total = 0
    for s in sections:
        report = check_specifications(s.value, checklist)
        open_total += len(report.open_demands)
        print(f"contract {s.name}: {len(report.open_demands)} open demand(s)")
        for node, q in report.open_demands:
            print(f"  open {q} on {node}")
        for node, q in report.advisories:
            print(f"  advisory: {node} has no {q}")
    return FAILED if open_total else OK


def cmd_contract_query(args) -> int:
    doc = _load(args.file)
    graph = _section(doc, "contract", args.contract).value
    try:
        targets = query(graph, args.question, args.node)
    except UnknownNode:
        raise _Usage(f"unknown contract node {args.node!r}") from None
    for t in targets:
        print(t)
    return OK


def cmd_export(args) -> int:
    doc = _load(args.file)
    sections = [s for s in doc.sections if s.kind in ("rst", "argument", "contract")]
    if args.section:
        sections = [s for s in sections if s.name == args.section]
    if not sections:
        raise _Usage("nothing to export")
    try:
        for s in sections:
            print(export_graph(s.value, args.format, name=f"{s.kind}:{s.name}"), end="")
    except UnsupportedFormat as e:
        raise _Usage(str(e)) from None
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="argstruct", description="Rhetorical, argument and contract structure toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="validate every section of a document")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    cat = sub.add_parser("catalog", help="relation catalog")
    cat_sub = cat.add_subparsers(dest="catalog_command", required=True, parser_class=_Parser)
    cl = cat_sub.add_parser("list", help="list relations")
    cl.add_argument("--extensions", metavar="FILE")
    cl.set_defaults(func=cmd_catalog_list)

    pl = sub.add_parser("plan", help="plan an argument for a goal")
    pl.add_argument("file")
    pl.add_argument("--goal", metavar="ID")
    pl.add_argument("--depth", type=int, default=DEFAULT_DEPTH_LIMIT)
    pl.add_argument("--plan", metavar="NAME", help="which #plan section (default: first)")
    pl.set_defaults(func=cmd_plan)

    rf = sub.add_parser("refine", help="refine an argument structure into RST")
    rf.add_argument("file")
    rf.add_argument("--enumerate", type=int, metavar="N", help="list every refinement, at most N")
    rf.add_argument("--map", metavar="FILE", help="catalog file with map lines")
    rf.add_argument("--argument", metavar="NAME", help="which #argument section (default: first)")
    rf.set_defaults(func=cmd_refine)

    ct = sub.add_parser("contract", help="contract graph commands")
    ct_sub = ct.add_subparsers(dest="contract_command", required=True, parser_class=_Parser)
    cc = ct_sub.add_parser("check", help="report unanswered questions")
    cc.add_argument("file")
    cc.add_argument("--checklist", metavar="FILE")
    cc.add_argument("--contract", metavar="NAME")
    cc.set_defaults(func=cmd_contract_check)
    cq = ct_sub.add_parser("query", help="nodes answering a question for a node")
    cq.add_argument("file")
    cq.add_argument("--question", required=True, choices=QUESTIONS)
    cq.add_argument("--node", required=True)
    cq.add_argument("--contract", metavar="NAME")
    cq.set_defaults(func=cmd_contract_query)

    ex = sub.add_parser("export", help="export sections as a graph description")
    ex.add_argument("file")
    ex.add_argument("--format", default="dot")
    ex.add_argument("--section", metavar="NAME")
    ex.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "plan" and args.depth < 1:
            raise _Usage("--depth must be at least 1")
        if args.command == "refine" and args.enumerate is not None and args.enumerate < 1:
            raise _Usage("--enumerate must be at least 1")
        return args.func(args)
    except _Usage as e:
        print(e, file=sys.stderr)
        return USAGE
    except ArgStructError as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED
    except SystemExit as e:  # --help
        return OK if e.code in (0, None) else USAGE


if __name__ == "__main__":
    sys.exit(main())
