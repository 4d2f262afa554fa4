"""Command-line front end.

Exit codes: 0 when no error was found, 1 when errors were found, 2 on usage
or input/output failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from reqlens import __version__
from reqlens import diagnostics as diag
from reqlens.checker import (
    check_chain, check_invariant_feasibility, check_scenario,
    lint_redundant_invariants, scenario_routines,
)
from reqlens.diagnostics import Location, Severity
from reqlens.errors import (
    CapacityExceeded, NotAPlainSequence, NothingToExtract, ResolutionError,
    UnknownClass,
)
from reqlens.lexer import tokenize
from reqlens.model import build_model, lookup_feature
from reqlens.parser import parse_source
from reqlens.report import build_report, format_text, to_json, use_color
from reqlens.stories import (
    Rule, emit_story_class, extract_stories, stories_file_name,
    stories_manifest,
)
from reqlens.style import lint_style
from reqlens.testgen import (
    generate_test_skeletons, stories_for_class, skeleton_manifest,
)

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Session:
    """Inputs of one invocation and everything reported about them."""

    def __init__(self, paths):
        self.inputs: list[str] = []
        self.diagnostics: list = []
        self.io_failed = False
        self.tokens: dict = {}
        self.classes: list = []
        self.model = None
        for path in expand(paths):
            self.inputs.append(path)
            self.load(path)

    def load(self, path: str):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            self.io_failed = True
            reason = getattr(e, "strerror", None) or str(e)
            self.diagnostics.append(diag.error(
                "IO_ERROR", f"cannot read '{path}': {reason}", Location(path, 0, 0)))
            return
        tokens = tokenize(text, path)
        self.tokens[path] = tokens
        classes, problems = parse_source(tokens, path)
        self.classes += classes
        self.diagnostics += problems

    def resolve(self):
        if self.model is None:
            try:
                self.model = build_model(self.classes)
            except ResolutionError as e:
                self.diagnostics += e.diagnostics
        return self.model

    def report(self, d):
        self.diagnostics.append(d)

    def exit_code(self) -> int:
        if self.io_failed:
            return EXIT_USAGE
        if any(d.severity is Severity.ERROR for d in self.diagnostics):
            return EXIT_ERRORS
        return EXIT_OK


def expand(paths) -> list[str]:
    """Files as given; directories are replaced by their ``*.rsl`` files."""
    result = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            result += [str(f) for f in sorted(p.glob("*.rsl"))]
        else:
            result.append(str(p))
    return result


def _split_routine(text: str):
    cls, dot, name = text.partition(".")
    if not dot or not cls or not name:
        raise UsageError(f"--routine expects CLASS.NAME, got '{text}'")
    return cls, name


def _guarded(session: Session, location, action):
    try:
        session.diagnostics += action()
    except CapacityExceeded as e:
        session.report(diag.error("CAPACITY_EXCEEDED", str(e), location))


def cmd_check(session: Session, args):
    model = session.resolve()
    if model is None:
        return
    fe = args.functional_equality
    checker = check_chain if args.chain else check_scenario
    if args.routine:
        cls, name = _split_routine(args.routine)
        try:
            feature = lookup_feature(model, cls, name)
        except UnknownClass as e:
            raise UsageError(str(e))
        if feature is None:
            raise UsageError(f"class '{cls}' has no feature '{name}'")
        if feature.body is None:
            raise UsageError(f"'{args.routine}' has no body to check")
        try:
            _guarded(session, feature.location, lambda: checker(model, cls, name, fe))
        except NotAPlainSequence as e:
            raise UsageError(str(e))
        return
    for cls in sorted(model.classes):
        decl = model.class_decl(cls)
        _guarded(session, decl.location,
                 lambda: check_invariant_feasibility(model, cls, fe))
        for name in scenario_routines(model, cls):
            feature = decl.feature(name)
            try:
                _guarded(session, feature.location,
                         lambda: checker(model, cls, name, fe))
            except NotAPlainSequence:
                continue  # chain mode only looks at plain sequences


def _require_class(model, name: str):
    if name not in model:
        raise UsageError(f"unknown class '{name}'")
    return model.class_decl(name)


def _write(out: Optional[str], file_name: str, text: str, session: Session):
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out) / file_name
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as e:
        session.io_failed = True
        session.report(diag.error("IO_ERROR", f"cannot write '{target}': {e.strerror}",
                                  Location(str(target), 0, 0)))


def cmd_stories(session: Session, args):
    model = session.resolve()
    if model is None:
        return
    decl = _require_class(model, args.class_name)
    if args.routine:
        if decl.feature(args.routine) is None and \
                lookup_feature(model, decl.name, args.routine) is None:
            raise UsageError(f"class '{decl.name}' has no feature '{args.routine}'")
        names = [args.routine]
    else:
        names = [f.name for f in decl.features if not f.is_attribute
                 and (f.has_contract or f.body)]
    stories = []
    for name in names:
        feature = lookup_feature(model, decl.name, name)
        try:
            stories += extract_stories(model, decl.name, name)
        except NothingToExtract as e:
            session.report(diag.info("NOTHING_TO_EXTRACT", str(e), feature.location))
    if not stories:
        return
    file_name = stories_file_name(decl.name)
    _write(args.out, file_name, emit_story_class(stories, decl.name), session)
    if args.out is not None:
        manifest = stories_manifest(stories, file_name)
        _write(args.out, file_name[:-4] + ".json",
               json.dumps(manifest, indent=2) + "\n", session)


def cmd_testgen(session: Session, args):
    model = session.resolve()
    if model is None:
        return
    decl = _require_class(model, args.class_name)
    stories = stories_for_class(model, decl.name)
    if not stories:
        session.report(diag.info(
            "NOTHING_TO_EXTRACT", f"class '{decl.name}' has no routine to test",
            decl.location))
        return
    extracted = [s for s in stories if s.rule is not Rule.WHOLE_ROUTINE]
    if extracted:
        _write(args.out, stories_file_name(decl.name),
               emit_story_class(extracted, decl.name), session)
    for skeleton in generate_test_skeletons(model, stories):
        _write(args.out, skeleton.file_name, skeleton.text, session)
        if args.out is not None:
            _write(args.out, skeleton.file_name[:-4] + ".json",
                   json.dumps(skeleton_manifest([skeleton]), indent=2) + "\n", session)


def cmd_lint(session: Session, args):
    for path in session.inputs:
        if path in session.tokens:
            session.diagnostics += lint_style(session.tokens[path])
    model = session.resolve()
    if model is None:
        return
    for cls in sorted(model.classes):
        _guarded(session, model.class_decl(cls).location,
                 lambda: lint_redundant_invariants(model, cls))


def cmd_parse(session: Session, args):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqlens",
        description="Check requirements written in RSL and derive stories and tests from them.")
    parser.add_argument("--version", action="version", version=f"reqlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("files", nargs="*", help="RSL files or directories")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(handler=handler)
        return p

    p = add("check", cmd_check, "check scenario routines against contracts")
    p.add_argument("--routine", metavar="CLASS.NAME")
    p.add_argument("--chain", action="store_true",
                   help="strict pairwise check of plain call sequences")
    p.add_argument("--functional-equality", action="store_true",
                   help="treat each query as having at most one value")
    p = add("stories", cmd_stories, "extract use-case stories")
    p.add_argument("--class", dest="class_name", required=True, metavar="NAME")
    p.add_argument("--routine", metavar="NAME")
    p.add_argument("--out", metavar="DIR")
    p = add("testgen", cmd_testgen, "generate test skeletons")
    p.add_argument("--class", dest="class_name", required=True, metavar="NAME")
    p.add_argument("--out", metavar="DIR")
    add("lint", cmd_lint, "redundant invariants and style")
    add("parse", cmd_parse, "syntax check only")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if not args.files:
        parser.print_usage(sys.stderr)
        print(f"reqlens {args.command}: error: no input files", file=sys.stderr)
        return EXIT_USAGE
    session = Session(args.files)
    if not session.inputs:
        print(f"reqlens {args.command}: error: no .rsl files found", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.handler(session, args)
    except UsageError as e:
        print(f"reqlens {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    # generated text goes to stdout when there is no --out, so keep it clean
    stream = sys.stderr if getattr(args, "out", "") is None \
        and args.command in ("stories", "testgen") else sys.stdout
    if args.format == "json":
        stream.write(to_json(build_report(session.inputs, session.diagnostics, __version__)))
    else:
        stream.write(format_text(session.diagnostics, use_color(stream)))
    return session.exit_code()


def main():
    sys.exit(run())
