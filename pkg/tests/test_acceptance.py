"""Acceptance criteria, one test each.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import json
import random
import subprocess
import sys

import pytest

import oracle_values as expected
from conftest import CORPUS_FILES, DATA, ROOT, load
from reqlens.checker import check_chain, check_scenario, lint_redundant_invariants
from reqlens.cli import run
from reqlens.formula import And, Implies, Not, Or, QueryPath, evaluate
from reqlens.logic import satisfiable, truth_table_oracle
from reqlens.model import build_model
from reqlens.parser import parse_text
from reqlens.printer import format_class
from reqlens.stories import Rule, emit_story_class, extract_stories
from reqlens.testgen import generate_test_skeletons, stories_for_class

RUC = "ROBORACE_USE_CASES"


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)
    monkeypatch.setenv("REQLENS_COLOR", "never")


def json_report(capsys, *argv):
    code = run(list(argv) + ["--format", "json"])
    rep = json.loads(capsys.readouterr().out)
    return code, [d for f in rep["files"] for d in f["diagnostics"]]


def test_c01_corpus_fidelity(capsys):
    code, found = json_report(capsys, "parse", *(str(p.relative_to(ROOT))
                                                 for p in CORPUS_FILES))
    assert code == 0
    assert [d for d in found if d["severity"] == "error"] == []
    classes, _ = load(*CORPUS_FILES)
    names = {c.name for c in classes}
    assert {"BOOK", "LIBRARY", "HOLDING_AVAILABLE_BOOKS_TEST", "LIBRARY_BOOK_USAGE",
            "RACE_CAR", "RACE_TRACK", "PLANNING_MODULE", "ROBORACE",
            "ROBORACE_USE_CASES"} <= names
    model = build_model(classes)
    assert any(f.name == "holding_available_books"
               for c in model.classes.values() for f in c.features)


def test_c02_chain_check(capsys, corpus_classes):
    code, found = json_report(capsys, "check", "corpus/book.rsl", "--chain",
                              "--routine", "BOOK.borrow_and_return_book")
    assert code == 0
    assert [d for d in found if d["code"] == "CHAIN_BROKEN"] == []

    mutated, _ = load(DATA / "book_mutated.rsl")
    model = build_model(corpus_classes + mutated)
    broken = [d for d in check_chain(model, "BOOK_REORDERED", "checkout_return_hold")
              if d.code == "CHAIN_BROKEN"]
    steps = [int(d.message.split()[1]) for d in broken]
    assert steps == expected.CHAIN_CHECKOUT_RETURN_HOLD == [1]
    witness = broken[0].witness
    av, hold, out = (QueryPath((n,)) for n in ("is_available", "is_on_hold",
                                               "is_checked_out"))
    inv = [Implies(hold, Not(av)), Implies(out, Not(av)), Implies(out, Not(hold)),
           Implies(av, Not(out))]
    # the witness satisfies the premises and refutes checkout's precondition
    assert all(evaluate(f, witness) for f in inv + [av])
    assert not evaluate(hold, witness)


def test_c03_story_counts(corpus_model):
    emergency = extract_stories(corpus_model, RUC, "emergency_stop")
    assert len(emergency) == 2
    race = extract_stories(corpus_model, RUC, "race_no_obstacles")
    assert len(race) == 5
    rules = [s.rule for s in race]
    assert rules.count(Rule.LOOP_EXIT) == 3
    assert rules.count(Rule.IMPLICATION_ANTECEDENT_TRUE) + \
        rules.count(Rule.IMPLICATION_ANTECEDENT_FALSE) == 2
    listings = [
        "emergency_stop_red_flag_story require car.red_flag_is_up do emergency_stop end",
        "emergency_stop_location_error_story require car.location_error_is_detected "
        "do emergency_stop end",
    ]
    assert [" ".join(s.text.split()) for s in emergency] == listings


def test_c04_consistency_finding(capsys):
    code, found = json_report(capsys, "check", "corpus/roborace.rsl", "--routine",
                              "ROBORACE_USE_CASES.race_no_obstacles")
    assert code == 1
    errors = [d for d in found if d["severity"] == "error"]
    assert [d["code"] for d in errors] == ["PRE_UNPROVEN"]
    assert "'safe_stop'" in errors[0]["message"]
    assert errors[0]["message"].endswith(expected.RACE_PRE_UNPROVEN_ATOM)
    assert any(d["code"] == "UNKNOWN_CONTRACT" for d in found)


def test_c05_flag_ordering(flag_model):
    def errors(routine):
        return [d.code for d in check_scenario(flag_model, "FLAG_DRIVERS", routine)
                if d.severity.value == "error"]
    assert errors("yellow_then_red") == []
    assert errors("red_then_yellow") == ["PRE_UNPROVEN"]


def test_c06_invariant_lint(corpus_model):
    book = lint_redundant_invariants(corpus_model, "BOOK")
    clauses = corpus_model.invariant("BOOK")
    assert [d.code for d in book] == ["REDUNDANT_INVARIANT"]
    assert book[0].location == clauses[3].location
    assert lint_redundant_invariants(corpus_model, "RACE_CAR") == []


def test_c07_driver_gap(corpus_model):
    found = [d for d in check_scenario(corpus_model, "LIBRARY_DRIVERS",
                                       "holding_available_books")
             if d.code == "POST_UNPROVEN"]
    assert len(found) == 1
    assert found[0].message.endswith(expected.HOLDING_POST_UNPROVEN)
    assert found[0].witness


def random_formula(rng, names, depth):
    if depth == 0 or rng.random() < 0.2:
        return QueryPath((rng.choice(names),))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(random_formula(rng, names, depth - 1))
    op = (And, Or, Implies)[kind - 1]
    return op(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))


def random_cnf(rng, names):
    """Random 3-CNF near the satisfiability threshold, so about half are unsat."""
    def literal():
        atom = QueryPath((rng.choice(names),))
        return Not(atom) if rng.random() < 0.5 else atom
    clauses = [Or(Or(literal(), literal()), literal())
               for _ in range(max(1, round(4.3 * len(names))))]
    f = clauses[0]
    for c in clauses[1:]:
        f = And(f, c)
    return f


def sample_formulas(seed=20240521, count=1000):
    rng = random.Random(seed)
    for i in range(count):
        names = [f"x{k}" for k in range(rng.randint(1, 12))]
        if i % 2:
            yield random_cnf(rng, names)
        else:
            yield random_formula(rng, names, rng.randint(1, 7))


def test_c08_logic_oracle_equivalence():
    agreements = 0
    for f in sample_formulas():
        result = satisfiable(f)
        agreements += result.satisfiable == truth_table_oracle(f)
        if result.satisfiable:
            assert evaluate(f, result.witness)
    assert agreements == 1000


def test_c09_round_trips(corpus_model):
    base = list(corpus_model.classes.values())
    for path in CORPUS_FILES:
        classes, _ = load(path)
        for cls in classes:
            again, problems = parse_text(format_class(cls), "printed")
            assert not [d for d in problems if d.severity.value == "error"]
            assert again == [cls]
    for name in sorted(corpus_model.classes):
        stories = stories_for_class(corpus_model, name)
        extracted = [s for s in stories if s.rule is not Rule.WHOLE_ROUTINE]
        emitted = []
        if extracted:
            emitted, problems = parse_text(emit_story_class(extracted, name), "s")
            assert problems == []
        for sk in generate_test_skeletons(corpus_model, stories):
            classes, problems = parse_text(sk.text, sk.file_name)
            assert not [d for d in problems if d.severity.value == "error"]
            emitted += classes
        build_model(base + emitted)


def test_c10_determinism():
    argv = [sys.executable, "-m", "reqlens", "check", "corpus/", "--format", "json"]
    first = subprocess.run(argv, cwd=ROOT, capture_output=True)
    second = subprocess.run(argv, cwd=ROOT, capture_output=True)
    assert first.stdout and first.stdout == second.stdout
