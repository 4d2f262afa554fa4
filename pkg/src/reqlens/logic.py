"""Exact propositional reasoning over opaque atoms.

Satisfiability goes through a Tseitin encoding and a small DPLL solver.
``truth_table_oracle`` decides the same question by plain enumeration and
shares nothing with the solver except ``formula.evaluate``; the test-suite
uses it to cross-check the solver.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Optional

from reqlens.errors import CapacityExceeded
from reqlens.formula import (
    And, Const, Equality, Formula, Implies, Not, Or, TRUE, atoms, conj,
    evaluate, is_atom, strip_double_negation,
)

DEFAULT_CAPACITY = 64
ORACLE_CAPACITY = 20


class AtomTable:
    """Dense 1-based indices for atoms; equal atoms share an index."""

    def __init__(self):
        self._index: dict = {}
        self._atoms: list = []

    def intern(self, atom) -> int:
        idx = self._index.get(atom)
        if idx is None:
            self._atoms.append(atom)
            idx = self._index[atom] = len(self._atoms)
        return idx

    def atom(self, idx: int):
        return self._atoms[idx - 1]

    def __len__(self):
        return len(self._atoms)

    def __contains__(self, atom):
        return atom in self._index


class SatResult(NamedTuple):
    satisfiable: bool
    witness: Optional[dict]


class EntailResult(NamedTuple):
    entailed: bool
    counterexample: Optional[dict]


def simplify(f: Formula) -> Formula:
    """Fold constants away; the result is a constant or constant-free."""
    if isinstance(f, Const) or is_atom(f):
        return f
    if isinstance(f, Not):
        inner = simplify(f.operand)
        if isinstance(inner, Const):
            return Const(not inner.value)
        return Not(inner)
    left, right = simplify(f.left), simplify(f.right)
    if isinstance(f, And):
        if left == Const(False) or right == Const(False):
            return Const(False)
        if left == TRUE:
            return right
        return left if right == TRUE else And(left, right)
    if isinstance(f, Or):
        if left == TRUE or right == TRUE:
            return TRUE
        if left == Const(False):
            return right
        return left if right == Const(False) else Or(left, right)
    # implies
    if left == Const(False) or right == TRUE:
        return TRUE
    if left == TRUE:
        return right
    if right == Const(False):
        return simplify(Not(left))
    return Implies(left, right)


class _Encoder:
    def __init__(self, var_of_atom: dict, first_free: int):
        self.var_of_atom = var_of_atom
        self.next_var = first_free
        self.clauses: list[list[int]] = []

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def literal(self, f) -> int:
        if is_atom(f):
            return self.var_of_atom[f]
        if isinstance(f, Not):
            return -self.literal(f.operand)
        a = self.literal(f.left)
        b = self.literal(f.right)
        if isinstance(f, Implies):
            a = -a
        v = self.fresh()
        if isinstance(f, And):
            self.clauses += [[-v, a], [-v, b], [v, -a, -b]]
        else:
            self.clauses += [[-v, a, b], [v, -a], [v, -b]]
        return v


def _dpll(clauses: list[list[int]], nvars: int, branch_vars: int):
    """Return a satisfying assignment (list indexed by var) or None.

    Branching prefers the first ``branch_vars`` variables (the atoms); the
    Tseitin variables then follow by propagation.
    """
    value = [0] * (nvars + 1)
    trail: list[int] = []

    def assign(lit):
        value[abs(lit)] = 1 if lit > 0 else -1
        trail.append(abs(lit))

    def undo(mark):
        while len(trail) > mark:
            value[trail.pop()] = 0

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                free = None
                n_free = 0
                for lit in clause:
                    v = value[abs(lit)]
                    if v == 0:
                        n_free += 1
                        free = lit
                    elif (v > 0) == (lit > 0):
                        break
                else:
                    if n_free == 0:
                        return False
                    if n_free == 1:
                        assign(free)
                        changed = True
        return True

    def pick():
        for v in range(1, branch_vars + 1):
            if value[v] == 0:
                return v
        for v in range(branch_vars + 1, nvars + 1):
            if value[v] == 0:
                return v
        return None

    def solve() -> bool:
        mark = len(trail)
        if not propagate():
            undo(mark)
            return False
        var = pick()
        if var is None:
            return True
        for lit in (-var, var):
            inner = len(trail)
            assign(lit)
            if solve():
                return True
            undo(inner)
        undo(mark)
        return False

    return value if solve() else None


def functional_equality_axioms(f: Formula) -> Formula:
    """Exclusion clauses making each left path equal to at most one right path."""
    by_left: dict = {}
    for a in atoms(f):
        if isinstance(a, Equality):
            by_left.setdefault(a.left, []).append(a)
    axioms = []
    for eqs in by_left.values():
        for i, j in itertools.combinations(range(len(eqs)), 2):
            axioms.append(Not(And(eqs[i], eqs[j])))
    return conj(axioms)


class Logic:
    """A checking session: one atom table, fixed capacity and equality mode."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY,
                 functional_equality: bool = False):
        self.capacity = capacity
        self.functional_equality = functional_equality
        self.table = AtomTable()

    def satisfiable(self, f: Formula) -> SatResult:
        if self.functional_equality:
            f = And(f, functional_equality_axioms(f))
        names = atoms(f)
        if len(names) > self.capacity:
            raise CapacityExceeded(
                f"{len(names)} atoms exceed the configured bound of {self.capacity}")
        for a in names:
            self.table.intern(a)
        g = simplify(f)
        if isinstance(g, Const):
            return SatResult(g.value, {a: False for a in names} if g.value else None)
        var_of_atom = {a: k + 1 for k, a in enumerate(names)}
        enc = _Encoder(var_of_atom, len(names) + 1)
        enc.clauses.append([enc.literal(g)])
        model = _dpll(enc.clauses, enc.next_var - 1, len(names))
        if model is None:
            return SatResult(False, None)
        return SatResult(True, {a: model[var_of_atom[a]] > 0 for a in names})

    def entails(self, premises: Formula, conclusion: Formula) -> EntailResult:
        sat, witness = self.satisfiable(And(premises, Not(conclusion)))
        return EntailResult(not sat, witness)


def satisfiable(f: Formula, capacity: int = DEFAULT_CAPACITY,
                functional_equality: bool = False) -> SatResult:
    return Logic(capacity, functional_equality).satisfiable(f)


def entails(premises: Formula, conclusion: Formula,
            capacity: int = DEFAULT_CAPACITY,
            functional_equality: bool = False) -> EntailResult:
    return Logic(capacity, functional_equality).entails(premises, conclusion)


def top_level_dnf(f: Formula) -> list:
    """Outermost disjuncts of ``f``; conjunctions are never distributed."""
    f = strip_double_negation(f)
    if isinstance(f, Or):
        return top_level_dnf(f.left) + top_level_dnf(f.right)
    return [f]


def implications_of(clauses) -> list[tuple]:
    """(antecedent, consequent) of each clause whose top connective is implies."""
    return [(c.left, c.right) for c in clauses if isinstance(c, Implies)]


def truth_table_oracle(f: Formula, limit: int = ORACLE_CAPACITY) -> bool:
    """Satisfiability by enumerating every assignment.

    The whole table is evaluated at once: bit ``k`` of an atom's column is
    its value in row ``k``, and connectives become bitwise operations.
    """
    names = atoms(f)
    if len(names) > limit:
        raise CapacityExceeded(
            f"truth-table oracle limited to {limit} atoms, got {len(names)}")
    rows = 1 << len(names)
    full = (1 << rows) - 1
    columns = {}
    for i, atom in enumerate(names):
        # rows where bit i of the row index is set
        block = ((1 << (1 << i)) - 1) << (1 << i)
        pattern, width = block, 2 << i
        while width < rows:
            pattern |= pattern << width
            width *= 2
        columns[atom] = pattern & full

    def table(g) -> int:
        if isinstance(g, Const):
            return full if g.value else 0
        if is_atom(g):
            return columns[g]
        if isinstance(g, Not):
            return full & ~table(g.operand)
        left, right = table(g.left), table(g.right)
        if isinstance(g, And):
            return left & right
        if isinstance(g, Or):
            return left | right
        return (full & ~left) | right

    return table(f) != 0
