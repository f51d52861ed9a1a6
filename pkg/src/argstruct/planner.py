"""Operator-based argument planning over a tri-state hearer model.

Each argument form acts as a planning operator: its premises must be
believed by the hearer before it applies and its conclusion is believed
afterwards.  :func:`plan` chains backwards from a goal, asserting premises
from the speaker's knowledge base where the hearer does not already hold
them.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass

from .argument import (
    FORMS,
    ArgumentForm,
    ArgumentStructure,
    Atom,
    Formula,
    Implies,
    Proposition,
    SupportLink,
    formula_text,
    link_id,
    neg,
    normalize,
    prop,
    subformulas,
)
from .errors import Contradiction, DepthExceeded, NoPlan, RequirementsUnmet, SchemaMismatch

BELIEVED = "believed"
DISBELIEVED = "disbelieved"
UNKNOWN = "unknown"

DEFAULT_DEPTH_LIMIT = 10
DEFAULT_FORM_ORDER = ("MP", "MT", "IG")


class BeliefState(Mapping):
    """Immutable map formula -> believed | disbelieved; anything else is unknown."""

    __slots__ = ("_status",)

    def __init__(self, status: Mapping[Formula, str] | None = None):
        clean: dict[Formula, str] = {}
        for f, s in (status or {}).items():
            if s not in (BELIEVED, DISBELIEVED, UNKNOWN):
                raise ValueError(f"bad belief status {s!r}")
            if s != UNKNOWN:
                clean[normalize(f)] = s
        for f, s in clean.items():
            if s == BELIEVED and clean.get(neg(f)) == BELIEVED:
                raise ValueError(f"{formula_text(f)} and its negation are both believed")
        self._status = clean

    @classmethod
    def of(cls, believed: Iterable[Formula] = (), disbelieved: Iterable[Formula] = ()) -> BeliefState:
        status = {normalize(f): BELIEVED for f in believed}
        for f in map(normalize, disbelieved):
            if status.get(f) == BELIEVED:
                raise ValueError(f"{formula_text(f)} is both believed and disbelieved")
            status[f] = DISBELIEVED
        return cls(status)

    def __getitem__(self, f: Formula) -> str:
        return self._status.get(normalize(f), UNKNOWN)

    def __iter__(self):
        return iter(self._status)

    def __len__(self):
        return len(self._status)

    def __eq__(self, other):
        if isinstance(other, BeliefState):
            return self._status == other._status
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._status.items()))

    def __repr__(self):
        shown = ", ".join(f"{formula_text(f)}: {s}" for f, s in self._status.items())
        return f"BeliefState({{{shown}}})"

    def believes(self, f: Formula) -> bool:
        return self._status.get(normalize(f)) == BELIEVED

    def blocked(self, f: Formula) -> bool:
        """True if adopting ``f`` would contradict the hearer."""
        f = normalize(f)
        return self._status.get(f) == DISBELIEVED or self._status.get(neg(f)) == BELIEVED

    def believed(self) -> list[Formula]:
        return [f for f, s in self._status.items() if s == BELIEVED]

    def adopt(self, f: Formula) -> BeliefState:
        f = normalize(f)
        if self.blocked(f):
            raise Contradiction(f"hearer rejects {formula_text(f)}")
        if self.believes(f):
            return self
        new = BeliefState.__new__(BeliefState)
        new._status = {**self._status, f: BELIEVED}
        return new


@dataclass(frozen=True)
class Operator:
    form: str
    premises: tuple[Formula, ...]
    conclusion: Formula

    @property
    def requirements(self) -> frozenset[Formula]:
        return frozenset(self.premises)

    @property
    def effects(self) -> frozenset[Formula]:
        return frozenset([self.conclusion])

    def __str__(self):
        return f"{self.form}: {', '.join(map(formula_text, self.premises))} |- {formula_text(self.conclusion)}"

    @classmethod
    def instantiate(cls, form: ArgumentForm | str, bindings: Mapping, forms=FORMS) -> Operator:
        if isinstance(form, str):
            form = forms[form]
        premises, conclusion = form.build(bindings)
        return cls(form.name, tuple(normalize(p) for p in premises), normalize(conclusion))


def apply_operator(state: BeliefState, op: Operator, forms: Mapping[str, ArgumentForm] = FORMS) -> BeliefState:
    form = forms.get(op.form)
    if form is None or not form.match(list(op.premises), op.conclusion):
        raise SchemaMismatch(f"{op} does not instantiate {op.form}")
    missing = [p for p in op.premises if not state.believes(p)]
    if missing:
        raise RequirementsUnmet("hearer does not believe " + ", ".join(map(formula_text, missing)))
    if state.blocked(op.conclusion):
        raise Contradiction(f"hearer rejects {formula_text(op.conclusion)}")
    return state.adopt(op.conclusion)


@dataclass(frozen=True)
class Plan:
    goal: Formula
    assertions: tuple[Formula, ...]  # speaker-KB premises stated outright
    steps: tuple[Operator, ...]
    structure: ArgumentStructure

    def __len__(self):
        return len(self.steps)

    @property
    def forms(self) -> list[str]:
        return [op.form for op in self.steps]


def simulate(plan: Plan, initial: BeliefState, forms: Mapping[str, ArgumentForm] = FORMS) -> BeliefState:
    """Replay a plan: assertions first, then each operator in order."""
    state = initial
    for f in plan.assertions:
        state = state.adopt(f)
    for op in plan.steps:
        state = apply_operator(state, op, forms)
    return state


class _Search:
    def __init__(self, kb, forms, form_order, depth_limit, pool):
        self.kb = kb
        self.forms = forms
        self.form_order = form_order
        self.depth_limit = depth_limit
        self.cut = False
        self.implications = sorted(
            {f for f in pool if isinstance(f, Implies)}, key=formula_text
        )
        self.atoms = sorted({f for f in pool if isinstance(f, Atom)}, key=formula_text)

    def candidates(self, form: str, goal: Formula) -> Iterator[tuple[Formula, ...]]:
        if form == "MP":
            for imp in self.implications:
                if imp.consequent == goal:
                    yield (imp.antecedent, imp)
        elif form == "MT":
            p = neg(goal)
            for imp in self.implications:
                if imp.antecedent == p:
                    yield (imp, neg(imp.consequent))
        elif form == "IG":
            if isinstance(goal, Atom):
                instances = tuple(a for a in self.atoms if a.cls == goal.name)
                if len(instances) >= 2:
                    yield instances
        # extension forms are not searched: they have no generator of candidates

    def establish(self, f, state, depth, stack, top=False):
        if state.believes(f):
            yield state, (), ()
            return
        if not top and f in self.kb and not state.blocked(f):
            yield state.adopt(f), (f,), ()
        if f in stack or state.blocked(f):
            return
        if depth >= self.depth_limit:
            self.cut = True
            return
        for name in self.form_order:
            form = self.forms[name]
            for premises in self.candidates(name, f):
                if not form.match(list(premises), f):
                    continue
                for st, asserted, steps in self.establish_all(premises, state, depth + 1, stack | {f}):
                    if st.blocked(f) or st.believes(f):
                        continue
                    yield st.adopt(f), asserted, steps + (Operator(name, premises, f),)

    def establish_all(self, goals, state, depth, stack):
        if not goals:
            yield state, (), ()
            return
        head, rest = goals[0], goals[1:]
        for st, a1, s1 in self.establish(head, state, depth, stack):
            for st2, a2, s2 in self.establish_all(rest, st, depth, stack):
                yield st2, a1 + a2, s1 + s2


def _induced_structure(goal, assertions, steps, state, propositions) -> ArgumentStructure:
    props: dict[str, Proposition] = {}

    def pid(f: Formula) -> str:
        p = propositions.get(f) or prop(f)
        props.setdefault(p.id, p)
        return p.id

    links = []
    for op in steps:
        premise_ids = tuple(pid(f) for f in op.premises)
        links.append(SupportLink(link_id(op.form, premise_ids), op.form, premise_ids, pid(op.conclusion)))
    if not steps:
        pid(goal)
    return ArgumentStructure(tuple(props.values()), tuple(links))


def plan(
    goal: Formula | Proposition,
    initial: BeliefState,
    speaker_kb: Iterable[Formula | Proposition] = (),
    forms: Sequence[str] = DEFAULT_FORM_ORDER,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    propositions: Iterable[Proposition] = (),
    form_table: Mapping[str, ArgumentForm] = FORMS,
) -> Plan:
    """Backward-chain from ``goal`` to a sequence of argument operators.

    Deterministic: forms are tried in the given order and candidate
    premises in lexicographic order of their formula text.  A premise is
    satisfied by the hearer already believing it, then by asserting it
    from ``speaker_kb``, then by a sub-argument.  The goal itself is never
    merely asserted.  ``propositions`` supplies ids and surface text for
    the induced argument structure.
    """
    if depth_limit < 1:
        raise ValueError("depth_limit must be at least 1")

    def as_formula(x):
        return x.content if isinstance(x, Proposition) else normalize(x)

    goal_f = as_formula(goal)
    kb = frozenset(as_formula(x) for x in speaker_kb)
    names = {p.content: p for p in propositions}
    if isinstance(goal, Proposition):
        names.setdefault(goal.content, goal)

    pool = set()
    for f in [*initial.believed(), *kb, goal_f]:
        pool.update(subformulas(f))
    search = _Search(kb, form_table, tuple(forms), depth_limit, pool)
    for state, asserted, steps in search.establish(goal_f, initial, 0, frozenset(), top=True):
        return Plan(goal_f, asserted, steps, _induced_structure(goal_f, asserted, steps, state, names))
    if search.cut:
        raise DepthExceeded(f"no plan for {formula_text(goal_f)} within depth {depth_limit}")
    raise NoPlan(f"no plan for {formula_text(goal_f)}")
