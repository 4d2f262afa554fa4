"""Contract checking and story mining for requirements written in RSL."""

__version__ = "0.1.0"

from reqlens.checker import (  # noqa: E402
    SymbolicState, apply_call, check_chain, check_invariant_feasibility,
    check_scenario, lint_redundant_invariants,
)
from reqlens.diagnostics import Diagnostic, Location, Severity  # noqa: E402
from reqlens.logic import entails, satisfiable, truth_table_oracle  # noqa: E402
from reqlens.model import RequirementsModel, build_model, flatten  # noqa: E402
from reqlens.parser import parse_expression, parse_file, parse_text  # noqa: E402
from reqlens.stories import Story, emit_story_class, extract_stories  # noqa: E402
from reqlens.testgen import generate_test_skeletons  # noqa: E402

__all__ = [
    "Diagnostic", "Location", "RequirementsModel", "Severity", "Story",
    "SymbolicState", "apply_call", "build_model", "check_chain",
    "check_invariant_feasibility", "check_scenario", "emit_story_class",
    "entails", "extract_stories", "flatten", "generate_test_skeletons",
    "lint_redundant_invariants", "parse_expression", "parse_file",
    "parse_text", "satisfiable", "truth_table_oracle",
]
