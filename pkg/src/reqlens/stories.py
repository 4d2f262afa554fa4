"""Use-case stories: single paths through a contracted routine.

A story is characterized by one condition and comes from one of three
rules, applied independently:

* each disjunct of a precondition with at least two disjuncts;
* each disjunct of a loop's exit condition;
* both cases of every implication in the postcondition (antecedent true,
  and antecedent false with the consequent holding).

Stories are emitted as routines of a class inheriting the source class.
Each story routine calls the source routine with its own formals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from reqlens.errors import NothingToExtract
from reqlens.formula import (
    TRUE, And, Disequality, Equality, Formula, Implies, Not, Opaque, Or,
    Predicate, QueryPath, is_atom, opaque_chains, pretty,
)
from reqlens.logic import top_level_dnf
from reqlens.model import (
    Body, Call, Clause, Conditional, FeatureDecl, FeatureKind, Loop,
    RequirementsModel, lookup_feature,
)
from reqlens.printer import INDENT, feature_lines


class Rule(str, Enum):
    PRECONDITION_DISJUNCT = "PRECONDITION_DISJUNCT"
    LOOP_EXIT = "LOOP_EXIT"
    IMPLICATION_ANTECEDENT_TRUE = "IMPLICATION_ANTECEDENT_TRUE"
    IMPLICATION_ANTECEDENT_FALSE = "IMPLICATION_ANTECEDENT_FALSE"
    WHOLE_ROUTINE = "WHOLE_ROUTINE"  # a driver taken as one story


@dataclass(frozen=True)
class Story:
    class_name: str
    routine: str
    rule: Rule
    condition: Formula
    name: str
    feature: FeatureDecl = field(compare=False)

    @property
    def text(self) -> str:
        """The generated story routine as RSL text."""
        return "\n".join(feature_lines(self.feature)) + "\n"


def _principal(f: Formula):
    """Leftmost literal of ``f`` as (atom, negated)."""
    negated = False
    while not is_atom(f):
        if isinstance(f, Not):
            negated = not negated
            f = f.operand
        elif isinstance(f, (And, Or, Implies)):
            f = f.left
        else:
            return None, negated
    return f, negated


def _atom_name(atom) -> str:
    if isinstance(atom, QueryPath):
        return atom.path[-1]
    if isinstance(atom, Predicate):
        return atom.name
    if isinstance(atom, (Equality, Disequality)):
        return atom.left[-1]
    if isinstance(atom, Opaque):
        chains = opaque_chains(atom.tokens)
        return chains[0][2][-1] if chains else "condition"
    return "condition"


def story_slug(condition: Formula) -> str:
    """Short name for a characterizing condition.

    Uses the last feature name of the principal atom. A boolean query named
    ``subject_is_state`` is shortened to ``subject`` when the subject has at
    least two words (``red_flag_is_up`` gives ``red_flag``) and to
    ``subject_state`` otherwise. A leading ``is_`` is dropped, and a negated
    principal atom gets a ``not_`` prefix.
    """
    atom, negated = _principal(condition)
    name = _atom_name(atom) if atom is not None else "condition"
    if name.startswith("is_"):
        name = name[3:]
    elif "_is_" in name:
        subject, state = name.split("_is_", 1)
        name = subject if "_" in subject else f"{subject}_{state}"
    name = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_") or "condition"
    return ("not_" + name) if negated else name


def _loops(body):
    for stmt in body or ():
        if isinstance(stmt, Loop):
            yield stmt
            yield from _loops(stmt.init)
            yield from _loops(stmt.body)
        elif isinstance(stmt, Conditional):
            yield from _loops(stmt.then_branch)
            yield from _loops(stmt.else_branch)


def _story_feature(source: FeatureDecl, name: str, rule: Rule,
                   condition: Formula) -> FeatureDecl:
    call = Call((), source.name, tuple((n,) for n, _ in source.formals))
    if rule is Rule.PRECONDITION_DISJUNCT:
        require = (Clause(condition),)
        notes = ()
    else:
        require = source.require
        notes = (("story_rule", rule.value), ("story_condition", pretty(condition)))
    return FeatureDecl(
        name=name, kind=FeatureKind.SCENARIO, formals=source.formals,
        require=require, body=Body((call,)), notes=notes)


def _candidates(feature: FeatureDecl):
    disjuncts = top_level_dnf(feature.precondition) if feature.require else []
    if len(disjuncts) >= 2:
        for d in disjuncts:
            yield Rule.PRECONDITION_DISJUNCT, d
    for loop in _loops(feature.body):
        for d in top_level_dnf(loop.until):
            yield Rule.LOOP_EXIT, d
    for clause in feature.ensure:
        f = clause.formula
        if isinstance(f, Implies):
            yield Rule.IMPLICATION_ANTECEDENT_TRUE, f.left
            yield Rule.IMPLICATION_ANTECEDENT_FALSE, And(Not(f.left), f.right)


def extract_stories(model: RequirementsModel, class_name: str,
                    routine_name: str) -> list[Story]:
    feature = lookup_feature(model, class_name, routine_name)
    if feature is None:
        raise KeyError(f"class '{class_name}' has no feature '{routine_name}'")
    stories: list[Story] = []
    used: set[str] = set()
    for rule, condition in _candidates(feature):
        base = f"{routine_name}_{story_slug(condition)}"
        name, n = f"{base}_story", 1
        while name in used:
            n += 1
            name = f"{base}_{n}_story"
        used.add(name)
        stories.append(Story(class_name, routine_name, rule, condition, name,
                             _story_feature(feature, name, rule, condition)))
    if not stories:
        raise NothingToExtract(
            f"'{class_name}.{routine_name}' has no precondition alternatives, "
            "loop exits or postcondition implications")
    return stories


def driver_story(model: RequirementsModel, class_name: str,
                 routine_name: str) -> Story:
    """The whole routine as a single story, used for specification drivers."""
    feature = lookup_feature(model, class_name, routine_name)
    if feature is None:
        raise KeyError(f"class '{class_name}' has no feature '{routine_name}'")
    return Story(class_name, routine_name, Rule.WHOLE_ROUTINE, TRUE,
                 routine_name, feature)


def stories_class_name(class_name: str) -> str:
    return f"{class_name}_STORIES"


def stories_file_name(class_name: str) -> str:
    return f"{class_name.lower()}_stories.rsl"


def emit_story_class(stories, class_name: str) -> str:
    stories = [s for s in stories if s.rule is not Rule.WHOLE_ROUTINE]
    if not stories:
        raise ValueError("no stories to emit")
    foreign = {s.class_name for s in stories} - {class_name}
    if foreign:
        raise ValueError(f"stories of {sorted(foreign)} cannot go into "
                         f"{stories_class_name(class_name)}")
    lines = [f"class {stories_class_name(class_name)}",
             "inherit", INDENT + class_name, "feature"]
    for story in stories:
        lines += feature_lines(story.feature)
        lines.append("")
    if lines[-1] == "":
        lines.pop()
    lines.append("end")
    return "\n".join(lines) + "\n"


def stories_manifest(stories, emitted_file: str) -> list[dict]:
    return [{"class": s.class_name, "routine": s.routine, "rule": s.rule.value,
             "condition": pretty(s.condition), "story_name": s.name,
             "emitted_file": emitted_file}
            for s in stories]
