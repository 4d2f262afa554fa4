"""Test-skeleton classes generated from stories.

One test class per source class, one test routine per story. A test routine
creates the story's formals and the object attributes it relies on, then
calls the story and states the oracle in its postcondition. Creation lines
are copied from an existing routine that already calls the driver, and are
TODO placeholders otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from reqlens.errors import NothingToExtract, UnresolvedStory
from reqlens.formula import Formula, atoms, object_prefixes, pretty
from reqlens.model import (
    PRIMITIVE_TYPES, Call, Conditional, FeatureDecl, FeatureKind, Loop,
    OpaqueStatement, RequirementsModel, lookup_feature,
)
from reqlens.printer import INDENT, format_clause
from reqlens.stories import (
    Rule, Story, driver_story, extract_stories, stories_class_name,
)


@dataclass
class TestRoutine:
    __test__ = False

    name: str
    story_name: str
    oracle_clauses: list[str]


@dataclass
class TestSkeleton:
    __test__ = False

    file_name: str
    test_class: str
    source_class: str
    text: str
    routines: list[TestRoutine] = field(default_factory=list)


def skeleton_file_name(class_name: str) -> str:
    return f"{class_name.lower()}_test.rsl"


def stories_for_class(model: RequirementsModel, class_name: str) -> list[Story]:
    """Stories of every contracted or scenario routine declared in the class.

    Routines with nothing to extract are taken whole, as drivers are.
    """
    stories: list[Story] = []
    for feature in model.class_decl(class_name).features:
        if feature.is_attribute:
            continue
        if not (feature.has_contract or feature.kind is FeatureKind.SCENARIO):
            continue
        try:
            stories += extract_stories(model, class_name, feature.name)
        except NothingToExtract:
            stories.append(driver_story(model, class_name, feature.name))
    return stories


def _calls(body):
    for stmt in body or ():
        if isinstance(stmt, Call):
            yield stmt
        elif isinstance(stmt, OpaqueStatement) and stmt.call is not None:
            yield stmt.call
        elif isinstance(stmt, Conditional):
            yield from _calls(stmt.then_branch)
            yield from _calls(stmt.else_branch)
        elif isinstance(stmt, Loop):
            yield from _calls(stmt.init)
            yield from _calls(stmt.body)


def _conditions(body):
    for stmt in body or ():
        if isinstance(stmt, Conditional):
            yield stmt.condition
            yield from _conditions(stmt.then_branch)
            yield from _conditions(stmt.else_branch)
        elif isinstance(stmt, Loop):
            yield stmt.until
            yield from _conditions(stmt.body)


def existing_creations(model: RequirementsModel, routine: FeatureDecl) -> dict[str, str]:
    """Creation instructions for the formals of ``routine`` found at a call site.

    Looks for a routine that calls ``routine`` with its formal names as
    arguments and returns the ``create`` instructions it runs for them.
    """
    wanted = tuple((name,) for name, _ in routine.formals)
    for class_name in sorted(model.classes):
        for feature in model.class_decl(class_name).features:
            body = feature.body or ()
            if not any(c.target == () and c.name == routine.name and c.args == wanted
                       for c in _calls(body)):
                continue
            found = {}
            for stmt in body:
                if (isinstance(stmt, OpaqueStatement) and stmt.assigned
                        and stmt.text.startswith("create")
                        and (stmt.assigned,) in wanted):
                    found.setdefault(stmt.assigned, stmt.text)
            if found:
                return found
    return {}


def _attribute_objects(model: RequirementsModel, class_name: str,
                       feature: FeatureDecl) -> list[tuple[str, str]]:
    """Object attributes of the class that the routine's text refers to."""
    formulas: list[Formula] = [c.formula for c in feature.require + feature.ensure]
    formulas += list(_conditions(feature.body))
    heads = []
    for f in formulas:
        for prefix in object_prefixes(f):
            heads.append(prefix[0])
        for a in atoms(f):
            path = getattr(a, "path", None)
            if path:
                heads.append(path[0])
    for call in _calls(feature.body):
        if call.target:
            heads.append(call.target[0])
    variables = feature.variable_types()
    table = model.features(class_name)
    result = []
    for head in dict.fromkeys(heads):
        if head in variables:
            continue
        attr = table.get(head)
        if attr is not None and attr.is_attribute and attr.result_type not in PRIMITIVE_TYPES:
            result.append((head, attr.result_type))
    return result


def _placeholder(name: str, type_name: str) -> str:
    target = name if type_name in PRIMITIVE_TYPES else f"{name}.make"
    return f"create {target} -- TODO: supply creation arguments for {name}"


def _test_routine(model: RequirementsModel, story: Story):
    source = lookup_feature(model, story.class_name, story.routine)
    name = f"test_{story.name}"
    formals = story.feature.formals
    copied = existing_creations(model, source) if story.rule is Rule.WHOLE_ROUTINE else {}
    pad, inner, deeper = INDENT, INDENT * 2, INDENT * 3
    lines = [pad + name]
    if formals:
        lines.append(inner + "local")
        lines += [f"{deeper}{n}: {t}" for n, t in formals]
    lines.append(inner + "do")
    for n, t in formals:
        lines.append(deeper + copied.get(n, _placeholder(n, t)))
    for n, t in _attribute_objects(model, story.class_name, source):
        lines.append(deeper + _placeholder(n, t))
    call = story.name
    if formals:
        call += f" ({', '.join(n for n, _ in formals)})"
    lines.append(deeper + call)
    oracle = [format_clause(c) for c in source.ensure]
    if story.rule is not Rule.WHOLE_ROUTINE:
        oracle.append(f"story_condition: {pretty(story.condition)}")
    if oracle:
        lines.append(inner + "ensure")
        if source.ensure:
            lines.append(f"{deeper}-- oracle: postcondition of {story.routine}")
            lines += [deeper + format_clause(c) for c in source.ensure]
        if story.rule is not Rule.WHOLE_ROUTINE:
            lines.append(f"{deeper}-- oracle: condition characterizing {story.name}")
            lines.append(deeper + oracle[-1])
    lines.append(inner + "end")
    return lines, TestRoutine(name, story.name, oracle)


def _check_resolves(model: RequirementsModel, story: Story):
    if story.class_name not in model:
        raise UnresolvedStory(f"story '{story.name}' names unknown class "
                              f"'{story.class_name}'")
    if lookup_feature(model, story.class_name, story.routine) is None:
        raise UnresolvedStory(f"story '{story.name}' names unknown routine "
                              f"'{story.class_name}.{story.routine}'")


def generate_test_skeletons(model: RequirementsModel, stories) -> list[TestSkeleton]:
    by_class: dict[str, list[Story]] = {}
    for story in stories:
        _check_resolves(model, story)
        by_class.setdefault(story.class_name, []).append(story)
    skeletons = []
    for class_name, group in by_class.items():
        test_class = f"{class_name}_TEST"
        parent = class_name
        if any(s.rule is not Rule.WHOLE_ROUTINE for s in group):
            parent = stories_class_name(class_name)
        lines = [f"class {test_class}", "inherit", INDENT + parent, "feature"]
        routines = []
        for story in group:
            body, routine = _test_routine(model, story)
            lines += body + [""]
            routines.append(routine)
        lines[-1] = "end"
        skeletons.append(TestSkeleton(skeleton_file_name(class_name), test_class,
                                      class_name, "\n".join(lines) + "\n", routines))
    return skeletons


def skeleton_manifest(skeletons) -> list[dict]:
    return [{"test_class": s.test_class, "routine": r.name,
             "story_name": r.story_name, "oracle_clauses": list(r.oracle_clauses)}
            for s in skeletons for r in s.routines]

