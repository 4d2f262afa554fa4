"""Symbolic checking of scenario routines against contracts and invariants.

A scenario routine is walked statement by statement with a set of known
facts. Each call must have its precondition entailed by those facts; its
postcondition then replaces them, and earlier facts survive only while they
stay consistent with what the call guarantees (oldest first).

Branches are followed to the end separately. A loop is checked through one
abstract iteration. Calls without a known contract forget everything.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from reqlens import diagnostics as diag
from reqlens.diagnostics import Diagnostic, Location
from reqlens.errors import (
    ArityMismatch, NotAPlainSequence, ReqlensError, StateInconsistent,
)
from reqlens.formula import (
    TRUE, And, Disequality, Equality, Formula, Not, Opaque, Predicate,
    QueryPath, atoms, conj, opaque_chains, path_text, pretty,
)
from reqlens.logic import Logic
from reqlens.model import (
    Call, Clause, Conditional, FeatureDecl, FeatureKind, Loop,
    OpaqueStatement, RequirementsModel, instantiate_clauses,
    invariant_context, lookup_feature, scope_of,
)

REQUIRE, POST, BRANCH, EXIT, KEPT = "require", "post", "branch", "exit", "kept"


@dataclass(frozen=True)
class Fact:
    formula: Formula
    origin: str


@dataclass(frozen=True)
class SymbolicState:
    facts: tuple[Fact, ...] = ()
    invariant: Formula = TRUE
    scope: tuple = ()

    def formula(self) -> Formula:
        return And(conj(f.formula for f in self.facts), self.invariant)

    def assume(self, formula: Formula, origin: str) -> "SymbolicState":
        return replace(self, facts=self.facts + (Fact(formula, origin),))

    def forget_all(self) -> "SymbolicState":
        return replace(self, facts=())


def apply_postcondition(state: SymbolicState, post, logic: Logic) -> SymbolicState:
    """State after a call guaranteeing the formulas in ``post``.

    Raises StateInconsistent when ``post`` contradicts the invariants.
    """
    facts = [Fact(f, POST) for f in post]
    acc = And(conj(f.formula for f in facts), state.invariant)
    if not logic.satisfiable(acc).satisfiable:
        raise StateInconsistent(
            "postcondition is inconsistent with the invariants: "
            + pretty(conj(post)))
    for fact in state.facts:
        candidate = And(acc, fact.formula)
        if logic.satisfiable(candidate).satisfiable:
            facts.append(Fact(fact.formula, KEPT))
            acc = candidate
    return replace(state, facts=tuple(facts))


def _mentions(f: Formula, name: str) -> bool:
    for a in atoms(f):
        if isinstance(a, QueryPath):
            heads = [a.path[0]]
        elif isinstance(a, Predicate):
            heads = [p[0] for p in (a.receiver,) + a.args if p]
        elif isinstance(a, (Equality, Disequality)):
            heads = [a.left[0], a.right[0]]
        elif isinstance(a, Opaque):
            heads = [path[0] for _, _, path in opaque_chains(a.tokens)]
        else:
            heads = []
        if name in heads:
            return True
    return False


@dataclass
class _Resolved:
    feature: FeatureDecl
    pre: list[Clause]
    post: list[Clause]


class _RoutineContext:
    """Shared plumbing for checks that look at one routine."""

    def __init__(self, model: RequirementsModel, class_name: str,
                 routine_name: str, logic: Optional[Logic]):
        self.model = model
        self.class_name = class_name
        feature = lookup_feature(model, class_name, routine_name)
        if feature is None:
            raise ReqlensError(f"class '{class_name}' has no feature '{routine_name}'")
        self.feature = feature
        self.variables = feature.variable_types()
        self.logic = logic or Logic()
        self.diagnostics: list[Diagnostic] = []
        self._seen: set = set()
        self._resolved: dict = {}

    def report(self, d: Diagnostic):
        key = (d.code, d.location, d.message)
        if key not in self._seen:
            self._seen.add(key)
            self.diagnostics.append(d)

    def describe(self, call: Call) -> str:
        return path_text(call.target + (call.name,))

    def resolve(self, call: Call):
        """Contract of ``call`` at its call site; None when unknown.

        Returns the string "variable" when the call is a plain read of a
        formal or local.
        """
        if call in self._resolved:
            return self._resolved[call]
        result = None
        if not call.target and call.name in self.variables:
            result = "variable"
        else:
            target = self.model.path_type(self.class_name, self.variables, call.target)
            feature = None
            if target is not None and target in self.model:
                feature = self.model.features(target).get(call.name)
            if feature is not None:
                try:
                    pre = instantiate_clauses(feature.require, feature, call.target, call.args)
                    post = instantiate_clauses(feature.ensure, feature, call.target, call.args)
                    result = _Resolved(feature, pre, post)
                except ArityMismatch as e:
                    self.report(diag.error("ARITY_MISMATCH", str(e), call.location))
        self._resolved[call] = result
        return result

    def calls(self, body):
        for stmt in body or ():
            if isinstance(stmt, Call):
                yield stmt
            elif isinstance(stmt, OpaqueStatement) and stmt.call is not None:
                yield stmt.call
            elif isinstance(stmt, Conditional):
                yield from self.calls(stmt.then_branch)
                yield from self.calls(stmt.else_branch)
            elif isinstance(stmt, Loop):
                yield from self.calls(stmt.init)
                yield from self.calls(stmt.body)

    def conditions(self, body):
        for stmt in body or ():
            if isinstance(stmt, Conditional):
                yield stmt.condition
                yield from self.conditions(stmt.then_branch)
                yield from self.conditions(stmt.else_branch)
            elif isinstance(stmt, Loop):
                yield stmt.until
                yield from self.conditions(stmt.init)
                yield from self.conditions(stmt.body)

    def invariant_context(self):
        formulas = [c.formula for c in self.feature.require + self.feature.ensure]
        formulas += list(self.conditions(self.feature.body))
        for call in self.calls(self.feature.body):
            r = self.resolve(call)
            if isinstance(r, _Resolved):
                formulas += [c.formula for c in r.pre + r.post]
        scope = scope_of(self.model, self.class_name, self.feature, formulas)
        problems: list = []
        ctx = invariant_context(self.model, scope, problems, self.feature.location)
        for p in problems:
            self.report(p)
        return ctx, tuple(scope)

    def unproven(self, premises: Formula, clauses):
        """Clauses not entailed by ``premises``, each with its counterexample."""
        failures = []
        for clause in clauses:
            entailed, witness = self.logic.entails(premises, clause.formula)
            if not entailed:
                failures.append((clause, witness))
        return failures


class ScenarioChecker(_RoutineContext):
    def __init__(self, model, class_name, routine_name, logic=None):
        super().__init__(model, class_name, routine_name, logic)
        if self.feature.body is None:
            raise ReqlensError(
                f"'{class_name}.{routine_name}' has no body to check")

    def run(self) -> list[Diagnostic]:
        feature = self.feature
        invariant, scope = self.invariant_context()
        state = SymbolicState(
            tuple(Fact(c.formula, REQUIRE) for c in feature.require),
            invariant, scope)
        if not self.logic.satisfiable(state.formula()).satisfiable:
            self.report(diag.error(
                "STATE_INCONSISTENT",
                f"precondition of '{feature.name}' contradicts the invariants",
                feature.location))
            return self.diagnostics
        for final in self.walk(feature.body, [state]):
            for clause, witness in self.unproven(final.formula(), feature.ensure):
                self.report(diag.error(
                    "POST_UNPROVEN",
                    f"postcondition of '{feature.name}' not established: "
                    f"{pretty(clause.formula)}",
                    clause.location, witness))
        return self.diagnostics

    def walk(self, body, states: list[SymbolicState]) -> list[SymbolicState]:
        for stmt in body:
            following: list[SymbolicState] = []
            for state in states:
                following.extend(self.step(stmt, state))
            states = following
        return states

    def step(self, stmt, state: SymbolicState) -> list[SymbolicState]:
        if isinstance(stmt, Call):
            return self.call(stmt, state)
        if isinstance(stmt, OpaqueStatement):
            self.report(diag.info(
                "OPAQUE_STATEMENT",
                f"'{stmt.text}' has no checking semantics", stmt.location))
            states = [state]
            if stmt.call is not None:
                states = self.call(stmt.call, state)
            if stmt.assigned:
                states = [replace(s, facts=tuple(
                    f for f in s.facts if not _mentions(f.formula, stmt.assigned)))
                    for s in states]
            return states
        if isinstance(stmt, Conditional):
            results = []
            branches = [(stmt.condition, stmt.then_branch, "then"),
                        (Not(stmt.condition), stmt.else_branch, "else")]
            for cond, branch, which in branches:
                entry = state.assume(cond, BRANCH)
                if not self.logic.satisfiable(entry.formula()).satisfiable:
                    if branch is not None:
                        self.report(diag.info(
                            "UNREACHABLE_BRANCH",
                            f"the {which} branch of 'if {pretty(stmt.condition)}' "
                            "cannot be taken", stmt.location))
                    continue
                results.extend(self.walk(branch or (), [entry]))
            return results
        if isinstance(stmt, Loop):
            results = []
            for before in self.walk(stmt.init, [state]):
                head = self.loop_head(before)
                entry = head.assume(Not(stmt.until), BRANCH)
                if self.logic.satisfiable(entry.formula()).satisfiable:
                    self.walk(stmt.body, [entry])
                else:
                    self.report(diag.info(
                        "UNREACHABLE_BRANCH", "the loop body is never executed",
                        stmt.location))
                leaving = head.assume(stmt.until, EXIT)
                if self.logic.satisfiable(leaving.formula()).satisfiable:
                    results.append(leaving)
            return results
        raise TypeError(f"unknown statement {stmt!r}")

    def loop_head(self, state: SymbolicState) -> SymbolicState:
        kept = tuple(
            f for f in state.facts
            if f.origin == REQUIRE
            and self.logic.entails(state.invariant, f.formula).entailed)
        return replace(state, facts=kept)

    def call(self, call: Call, state: SymbolicState) -> list[SymbolicState]:
        resolved = self.resolve(call)
        if resolved == "variable":
            return [state]
        if resolved is None:
            self.report(diag.warning(
                "UNKNOWN_CONTRACT",
                f"no contract known for '{self.describe(call)}'; "
                "all facts are discarded", call.location))
            return [state.forget_all()]
        premises = state.formula()
        for clause, witness in self.unproven(premises, resolved.pre):
            self.report(diag.error(
                "PRE_UNPROVEN",
                f"precondition of '{self.describe(call)}' not established: "
                f"{pretty(clause.formula)}",
                call.location, witness))
        try:
            return [apply_postcondition(
                state, [c.formula for c in resolved.post], self.logic)]
        except StateInconsistent as e:
            self.report(diag.error("STATE_INCONSISTENT", str(e), call.location))
            return []


def check_scenario(model: RequirementsModel, class_name: str, routine_name: str,
                   functional_equality: bool = False) -> list[Diagnostic]:
    logic = Logic(functional_equality=functional_equality)
    return ScenarioChecker(model, class_name, routine_name, logic).run()


def apply_call(model: RequirementsModel, class_name: str, routine_name: str,
               state: SymbolicState, call: Call,
               functional_equality: bool = False) -> SymbolicState:
    """State after ``call`` made from routine ``class_name.routine_name``.

    The precondition is not checked here. Calls without a known contract
    discard every fact.
    """
    ctx = _RoutineContext(model, class_name, routine_name,
                          Logic(functional_equality=functional_equality))
    resolved = ctx.resolve(call)
    if resolved == "variable":
        return state
    if resolved is None:
        return state.forget_all()
    return apply_postcondition(state, [c.formula for c in resolved.post], ctx.logic)


def check_chain(model: RequirementsModel, class_name: str, routine_name: str,
                functional_equality: bool = False) -> list[Diagnostic]:
    """Strict pairwise check of a plain call sequence.

    Each call's precondition must follow from the previous call's
    postcondition plus invariants (the first from the routine precondition),
    without carrying any other fact forward.
    """
    ctx = _RoutineContext(model, class_name, routine_name,
                          Logic(functional_equality=functional_equality))
    body = ctx.feature.body
    if body is None or not all(isinstance(s, Call) for s in body):
        raise NotAPlainSequence(
            f"'{class_name}.{routine_name}' is not a plain sequence of calls")
    invariant, _ = ctx.invariant_context()
    premise = And(ctx.feature.precondition, invariant)
    previous = None
    for step, call in enumerate(body, start=1):
        resolved = ctx.resolve(call)
        if resolved is None:
            ctx.report(diag.warning(
                "UNKNOWN_CONTRACT",
                f"no contract known for '{ctx.describe(call)}'", call.location))
            pre, post = [], []
        else:
            pre, post = resolved.pre, resolved.post
        failures = ctx.unproven(premise, pre)
        if failures:
            source = ("the routine precondition" if previous is None
                      else f"the postcondition of '{previous}'")
            text = "; ".join(pretty(c.formula) for c, _ in failures)
            _, witness = ctx.logic.entails(premise, conj(c.formula for c in pre))
            ctx.report(diag.error(
                "CHAIN_BROKEN",
                f"step {step} ('{ctx.describe(call)}'): precondition not implied "
                f"by {source}: {text}",
                call.location, witness))
        premise = And(conj(c.formula for c in post), invariant)
        previous = ctx.describe(call)
    return ctx.diagnostics


def check_invariant_feasibility(model: RequirementsModel, class_name: str,
                                functional_equality: bool = False) -> list[Diagnostic]:
    logic = Logic(functional_equality=functional_equality)
    cls = model.class_decl(class_name)
    found: list[Diagnostic] = []
    inv = conj(c.formula for c in model.invariant(class_name))
    if not logic.satisfiable(inv).satisfiable:
        found.append(diag.error(
            "STATE_INCONSISTENT",
            f"the invariant of class '{class_name}' is unsatisfiable",
            cls.location))
        return found
    for feature in cls.features:
        if not feature.has_contract:
            continue
        pre, post = feature.precondition, feature.postcondition
        scope = scope_of(model, class_name, feature, [pre, post])
        ctx = invariant_context(model, scope)
        if not logic.satisfiable(And(pre, ctx)).satisfiable:
            found.append(diag.error(
                "PRE_INFEASIBLE",
                f"precondition of '{class_name}.{feature.name}' contradicts "
                "the invariants", feature.location))
        if not logic.satisfiable(And(post, ctx)).satisfiable:
            found.append(diag.error(
                "POST_INFEASIBLE",
                f"postcondition of '{class_name}.{feature.name}' contradicts "
                "the invariants", feature.location))
    return found


def lint_redundant_invariants(model: RequirementsModel, class_name: str) -> list[Diagnostic]:
    """Flag own invariant clauses implied by the remaining ones.

    Clauses are examined from last to first and a flagged clause no longer
    counts as evidence, so of two equivalent clauses the later one is
    reported.
    """
    logic = Logic()
    cls = model.class_decl(class_name)
    clauses = list(model.invariant(class_name))
    own = {id(c) for c in cls.invariant}
    kept = set(range(len(clauses)))
    flagged = []
    for i in reversed(range(len(clauses))):
        others = conj(clauses[j].formula for j in sorted(kept) if j != i)
        if logic.entails(others, clauses[i].formula).entailed:
            kept.discard(i)
            flagged.append(i)
    return [diag.info(
        "REDUNDANT_INVARIANT",
        f"invariant clause '{pretty(clauses[i].formula)}' of '{class_name}' "
        "is implied by the other clauses", clauses[i].location)
        for i in sorted(flagged) if id(clauses[i]) in own]


def scenario_routines(model: RequirementsModel, class_name: str) -> list[str]:
    """Own features of the class that have a non-empty body."""
    return [f.name for f in model.class_decl(class_name).features
            if f.kind is FeatureKind.SCENARIO]
