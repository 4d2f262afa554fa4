"""Declarations of the requirements language and the resolved model.

Parsed classes are plain frozen dataclasses; ``build_model`` checks them
against each other and produces a :class:`RequirementsModel` whose feature
tables include inherited features. Inheritance is flat inclusion: no
renaming or redefinition, so a feature name reachable through two different
declarations is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from reqlens import diagnostics as diag
from reqlens.diagnostics import NOWHERE, Location
from reqlens.errors import ArityMismatch, ResolutionError, UnknownClass
from reqlens.formula import (
    Formula, Path, conj, is_identifier, map_paths, object_prefixes,
)

PRIMITIVE_TYPES = frozenset({
    "BOOLEAN", "INTEGER", "REAL", "DOUBLE", "STRING", "CHARACTER",
    "NATURAL", "ANY",
})


class FeatureKind(str, Enum):
    BOOLEAN_QUERY = "boolean-query"
    TYPED_QUERY = "typed-query"
    COMMAND = "command"
    SCENARIO = "scenario-routine"


@dataclass(frozen=True)
class Clause:
    formula: Formula
    label: Optional[str] = None
    location: Location = field(default=NOWHERE, compare=False)


# -- statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Call:
    target: Path
    name: str
    args: tuple[Path, ...] = ()
    location: Location = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Conditional:
    condition: Formula
    then_branch: "Body"
    else_branch: Optional["Body"] = None
    location: Location = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Loop:
    until: Formula
    body: "Body"
    init: "Body" = None
    location: Location = field(default=NOWHERE, compare=False)

    def __post_init__(self):
        if self.init is None:
            object.__setattr__(self, "init", Body())


@dataclass(frozen=True)
class OpaqueStatement:
    """Assignment or creation instruction, kept verbatim.

    ``assigned`` names the local or attribute the instruction overwrites;
    ``call`` is the query evaluated on the right-hand side, if any.
    """

    text: str
    assigned: Optional[str] = None
    call: Optional[Call] = None
    location: Location = field(default=NOWHERE, compare=False)


Statement = Union[Call, Conditional, Loop, OpaqueStatement]


@dataclass(frozen=True)
class Body:
    statements: tuple = ()

    def __len__(self):
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)


# -- declarations -------------------------------------------------------------

@dataclass(frozen=True)
class FeatureDecl:
    name: str
    kind: FeatureKind
    formals: tuple[tuple[str, str], ...] = ()
    locals: tuple[tuple[str, str], ...] = ()
    result_type: Optional[str] = None
    require: tuple[Clause, ...] = ()
    ensure: tuple[Clause, ...] = ()
    body: Optional[Body] = None
    is_deferred: bool = False
    notes: tuple[tuple[str, str], ...] = ()
    location: Location = field(default=NOWHERE, compare=False)
    comments: tuple[str, ...] = field(default=(), compare=False)

    @property
    def is_attribute(self) -> bool:
        return self.kind in (FeatureKind.BOOLEAN_QUERY, FeatureKind.TYPED_QUERY) \
            and self.body is None and not self.is_deferred

    @property
    def precondition(self) -> Formula:
        return conj(c.formula for c in self.require)

    @property
    def postcondition(self) -> Formula:
        return conj(c.formula for c in self.ensure)

    @property
    def has_contract(self) -> bool:
        return bool(self.require or self.ensure)

    def variable_types(self) -> dict[str, str]:
        return dict(self.formals + self.locals)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    parents: tuple[str, ...] = ()
    features: tuple[FeatureDecl, ...] = ()
    invariant: tuple[Clause, ...] = ()
    notes: tuple[tuple[str, str], ...] = ()
    location: Location = field(default=NOWHERE, compare=False)
    comments: tuple[str, ...] = field(default=(), compare=False)

    def feature(self, name: str) -> Optional[FeatureDecl]:
        for f in self.features:
            if f.name == name:
                return f
        return None


def feature_kind(result_type, body, is_deferred) -> FeatureKind:
    if body is not None and len(body) > 0:
        return FeatureKind.SCENARIO
    if result_type is None:
        return FeatureKind.COMMAND
    if result_type == "BOOLEAN":
        return FeatureKind.BOOLEAN_QUERY
    return FeatureKind.TYPED_QUERY


# -- model ----------------------------------------------------------------------

class RequirementsModel:
    """Resolved classes with inheritance-flattened feature tables.

    Immutable once built; safe to share between concurrent readers.
    """

    def __init__(self, classes, features, owners, invariants):
        self.classes: dict[str, ClassDecl] = classes
        self._features: dict[str, dict[str, FeatureDecl]] = features
        self._owners: dict[str, dict[str, str]] = owners
        self._invariants: dict[str, tuple[Clause, ...]] = invariants

    def __contains__(self, name) -> bool:
        return name in self.classes

    def __len__(self):
        return len(self.classes)

    def class_decl(self, name: str) -> ClassDecl:
        try:
            return self.classes[name]
        except KeyError:
            raise UnknownClass(f"unknown class '{name}'") from None

    def features(self, class_name: str) -> dict[str, FeatureDecl]:
        self.class_decl(class_name)
        return self._features[class_name]

    def owner(self, class_name: str, feature_name: str) -> str:
        return self._owners[class_name][feature_name]

    def invariant(self, class_name: str) -> tuple[Clause, ...]:
        """Own and inherited invariant clauses, ancestors first."""
        self.class_decl(class_name)
        return self._invariants[class_name]

    def is_deferred(self, class_name: str) -> bool:
        return any(f.is_deferred for f in self.features(class_name).values())

    def source_of(self, decl) -> Location:
        return decl.location

    def path_type(self, class_name: str, variables: dict[str, str],
                  path: Path) -> Optional[str]:
        """Declared type of ``path`` seen from a routine of ``class_name``.

        ``variables`` maps the routine's formals and locals to their types.
        Returns None when some segment cannot be resolved.
        """
        if not path:
            return class_name
        head = path[0]
        if head in variables:
            current = variables[head]
        else:
            feat = self._features.get(class_name, {}).get(head)
            if feat is None or feat.result_type is None:
                return None
            current = feat.result_type
        for name in path[1:]:
            feat = self._features.get(current, {}).get(name)
            if feat is None or feat.result_type is None:
                return None
            current = feat.result_type
        return current


def build_model(sources) -> RequirementsModel:
    """Resolve parsed classes into a model.

    Raises ResolutionError listing duplicate classes, unknown parents,
    inheritance cycles and duplicate features after flattening.
    """
    problems: list[diag.Diagnostic] = []
    classes: dict[str, ClassDecl] = {}
    for c in sources:
        if c.name in classes:
            problems.append(diag.error(
                "DUPLICATE_CLASS", f"class '{c.name}' is declared more than once",
                c.location))
            continue
        classes[c.name] = c
    for c in classes.values():
        for parent in c.parents:
            if parent not in classes:
                problems.append(diag.error(
                    "UNKNOWN_PARENT",
                    f"class '{c.name}' inherits from unknown class '{parent}'",
                    c.location))
    if problems:
        raise ResolutionError(problems)

    order = _topological_order(classes, problems)
    if problems:
        raise ResolutionError(problems)

    features: dict[str, dict[str, FeatureDecl]] = {}
    owners: dict[str, dict[str, str]] = {}
    invariants: dict[str, tuple[Clause, ...]] = {}
    for name in order:
        c = classes[name]
        table: dict[str, FeatureDecl] = {}
        owner: dict[str, str] = {}
        inv: list[Clause] = []
        seen_inv: set[int] = set()

        def add(feat, origin):
            if feat.name in table:
                if owner[feat.name] == origin:
                    return  # same declaration reached twice (diamond)
                problems.append(diag.error(
                    "DUPLICATE_FEATURE",
                    f"feature '{feat.name}' of class '{name}' is declared both in "
                    f"'{owner[feat.name]}' and '{origin}'",
                    feat.location))
                return
            table[feat.name] = feat
            owner[feat.name] = origin

        for parent in c.parents:
            for fname, feat in features[parent].items():
                add(feat, owners[parent][fname])
            for clause in invariants[parent]:
                if id(clause) not in seen_inv:
                    seen_inv.add(id(clause))
                    inv.append(clause)
        for feat in c.features:
            add(feat, name)
        inv.extend(c.invariant)
        features[name], owners[name], invariants[name] = table, owner, tuple(inv)

    if problems:
        raise ResolutionError(problems)
    return RequirementsModel(classes, features, owners, invariants)


def _topological_order(classes, problems) -> list[str]:
    state: dict[str, int] = {}
    order: list[str] = []

    def visit(name, trail):
        mark = state.get(name)
        if mark == 2:
            return
        if mark == 1:
            cycle = trail[trail.index(name):] + [name]
            problems.append(diag.error(
                "INHERITANCE_CYCLE",
                "inheritance cycle: " + " -> ".join(cycle),
                classes[name].location))
            return
        state[name] = 1
        for parent in classes[name].parents:
            visit(parent, trail + [name])
        state[name] = 2
        order.append(name)

    for name in sorted(classes):
        visit(name, [])
    return order


def flatten(model: RequirementsModel) -> RequirementsModel:
    """Equivalent model in which no class has parents."""
    flat = []
    for name, c in model.classes.items():
        flat.append(ClassDecl(
            name=name, parents=(),
            features=tuple(model.features(name).values()),
            invariant=model.invariant(name),
            notes=c.notes, location=c.location, comments=c.comments))
    return build_model(flat)


def lookup_feature(model: RequirementsModel, class_name: str,
                   feature_name: str) -> Optional[FeatureDecl]:
    return model.features(class_name).get(feature_name)


# -- contracts ------------------------------------------------------------------

def _substitution(feature: FeatureDecl, receiver: Path, actuals):
    if len(actuals) != len(feature.formals):
        raise ArityMismatch(
            f"'{feature.name}' expects {len(feature.formals)} argument(s), "
            f"got {len(actuals)}")
    binding = {name: tuple(actual)
               for (name, _), actual in zip(feature.formals, actuals)}

    def rewrite(path: Path) -> Path:
        if path and not is_identifier(path[0]):
            return path  # literal argument
        if path and path[0] in binding:
            return binding[path[0]] + path[1:]
        return tuple(receiver) + path

    return rewrite


def instantiate_clauses(clauses, feature: FeatureDecl, receiver: Path,
                        actuals) -> list[Clause]:
    rewrite = _substitution(feature, receiver, actuals)
    return [Clause(map_paths(c.formula, rewrite), c.label, c.location)
            for c in clauses]


def instantiate_contract(feature: FeatureDecl, receiver: Path = (),
                         actuals=None) -> tuple[Formula, Formula]:
    """Contract of ``feature`` as seen at a call ``receiver.feature(actuals)``.

    ``receiver=()`` is the implicit current object; ``actuals`` defaults to
    the formals themselves.
    """
    if actuals is None:
        actuals = [(name,) for name, _ in feature.formals]
    pre = instantiate_clauses(feature.require, feature, receiver, actuals)
    post = instantiate_clauses(feature.ensure, feature, receiver, actuals)
    return conj(c.formula for c in pre), conj(c.formula for c in post)


def invariant_clauses(model: RequirementsModel, scope,
                      problems: Optional[list] = None,
                      location: Location = NOWHERE) -> list[Formula]:
    """Invariant clauses of every ``(path, class)`` in scope, prefixed by path.

    Paths are visited in sorted order so the result is deterministic.
    Classes absent from the model contribute nothing; a warning is appended
    to ``problems`` when given.
    """
    result: list[Formula] = []
    for path, class_name in sorted(set(scope)):
        if class_name in PRIMITIVE_TYPES:
            continue
        if class_name not in model:
            if problems is not None:
                problems.append(diag.warning(
                    "UNKNOWN_CLASS",
                    f"'{'.'.join(path)}' has type '{class_name}', which is not "
                    "declared; its invariant is ignored", location))
            continue
        prefix = tuple(path)
        for clause in model.invariant(class_name):
            result.append(map_paths(clause.formula, lambda p: prefix + p))
    return result


def invariant_context(model: RequirementsModel, scope,
                      problems: Optional[list] = None,
                      location: Location = NOWHERE) -> Formula:
    return conj(invariant_clauses(model, scope, problems, location))


def scope_of(model: RequirementsModel, class_name: str, feature: FeatureDecl,
             formulas) -> list[tuple[Path, str]]:
    """In-scope object paths for checking ``feature`` of ``class_name``.

    The current object is always in scope; any other path is in scope when
    it occurs as a prefix of an atom in ``formulas`` and its type resolves.
    """
    variables = feature.variable_types() if feature is not None else {}
    scope = {((), class_name)}
    for f in formulas:
        for prefix in object_prefixes(f):
            t = model.path_type(class_name, variables, prefix)
            if t is not None and t not in PRIMITIVE_TYPES:
                scope.add((prefix, t))
    return sorted(scope)
