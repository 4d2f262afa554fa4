import json

import pytest

from conftest import GOLDEN, ROOT
from reqlens.cli import run


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)
    monkeypatch.setenv("REQLENS_COLOR", "never")


def report(capsys, *argv):
    code = run(list(argv) + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def all_diagnostics(rep):
    return [d for f in rep["files"] for d in f["diagnostics"]]


def test_borrow_and_return_is_clean(capsys):
    code, rep = report(capsys, "check", "corpus/book.rsl",
                       "--routine", "BOOK.borrow_and_return_book")
    assert code == 0
    assert rep["summary"]["errors"] == 0


def test_race_no_obstacles_matches_golden(capsys):
    code, rep = report(capsys, "check", "corpus/roborace.rsl",
                       "--routine", "ROBORACE_USE_CASES.race_no_obstacles")
    assert code == 1
    assert rep == json.loads((GOLDEN / "race_no_obstacles.json").read_text())
    pre = [d for d in all_diagnostics(rep) if d["code"] == "PRE_UNPROVEN"]
    assert len(pre) == 1 and "car.is_in_normal_mode" in pre[0]["message"]


def test_empty_file_list_is_a_usage_error(capsys):
    assert run(["parse"]) == 2
    assert "no input files" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert run(["frobnicate", "x.rsl"]) == 2


def test_missing_file_is_reported_per_file(capsys):
    code, rep = report(capsys, "parse", "corpus/book.rsl", "missing.rsl")
    assert code == 2
    by_file = {f["file"]: f["diagnostics"] for f in rep["files"]}
    assert by_file["corpus/book.rsl"] == []
    assert [d["code"] for d in by_file["missing.rsl"]] == ["IO_ERROR"]


def test_directory_arguments_expand_to_rsl_files(capsys):
    code, rep = report(capsys, "parse", "corpus")
    assert code == 0
    assert rep["inputs"] == ["corpus/book.rsl", "corpus/library.rsl", "corpus/roborace.rsl"]


def test_bad_routine_argument(capsys):
    assert run(["check", "corpus", "--routine", "nodot"]) == 2
    assert run(["check", "corpus", "--routine", "BOOK.nothing"]) == 2
    assert run(["check", "corpus", "--routine", "GHOST.x"]) == 2


def test_chain_mode(capsys, tmp_path):
    code, rep = report(capsys, "check", "corpus/book.rsl", "--chain",
                       "--routine", "BOOK.borrow_and_return_book")
    assert (code, rep["summary"]["errors"]) == (0, 0)
    assert run(["check", "corpus", "--chain", "--routine",
                "ROBORACE_USE_CASES.race_no_obstacles"]) == 2


def test_text_and_json_report_the_same_findings(capsys):
    run(["check", "corpus"])
    text = capsys.readouterr().out
    _, rep = report(capsys, "check", "corpus")
    lines = [line for line in text.splitlines() if ": [" in line]
    assert len(lines) == len(all_diagnostics(rep))
    for line, d in zip(lines, all_diagnostics(rep)):
        assert line.startswith(f"{d['file']}:{d['line']}:{d['column']}: {d['severity']}: "
                               f"[{d['code']}]")
    s = rep["summary"]
    assert text.splitlines()[-1] == \
        f"{s['errors']} error(s), {s['warnings']} warning(s), {s['infos']} info(s)"


def test_exit_code_tracks_errors(capsys):
    for argv in (["check", "corpus"], ["lint", "corpus"], ["parse", "corpus"]):
        code, rep = report(capsys, *argv)
        assert code == (1 if rep["summary"]["errors"] else 0)


def test_lint(capsys):
    code, rep = report(capsys, "lint", "corpus")
    found = {(d["code"], d["file"]) for d in all_diagnostics(rep)}
    assert ("REDUNDANT_INVARIANT", "corpus/book.rsl") in found
    assert ("NOTE_KEYWORD_CASE", "corpus/roborace.rsl") in found


def test_style_lint_on_lower_case_class(capsys, tmp_path):
    src = tmp_path / "x.rsl"
    src.write_text("class Thing feature x: BOOLEAN end\n")
    code, rep = report(capsys, "lint", str(src))
    assert [d["code"] for d in all_diagnostics(rep)] == ["CLASS_NAME_CASE"]
    assert code == 0


def test_stories_to_directory(capsys, tmp_path):
    code = run(["stories", "corpus", "--class", "ROBORACE_USE_CASES",
                "--routine", "emergency_stop", "--out", str(tmp_path)])
    assert code == 0
    manifest = json.loads((tmp_path / "roborace_use_cases_stories.json").read_text())
    assert [m["story_name"] for m in manifest] == [
        "emergency_stop_red_flag_story", "emergency_stop_location_error_story"]
    assert run(["parse", str(tmp_path)]) == 0


def test_stories_to_stdout(capsys):
    assert run(["stories", "corpus", "--class", "ROBORACE_USE_CASES",
                "--routine", "emergency_stop"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("class ROBORACE_USE_CASES_STORIES")


def test_nothing_to_extract_is_informational(capsys):
    code, rep = report(capsys, "stories", "corpus", "--class", "ROBORACE_USE_CASES",
                       "--routine", "safe_stop", "--out", "unused")
    assert code == 0
    assert [d["code"] for d in all_diagnostics(rep) if d["severity"] == "info"] == \
        ["NOTHING_TO_EXTRACT"]


def test_testgen_output_checks_conservatively(capsys, tmp_path):
    assert run(["testgen", "corpus", "--class", "ROBORACE_USE_CASES",
                "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["roborace_use_cases_stories.rsl", "roborace_use_cases_test.json",
                     "roborace_use_cases_test.rsl"]
    capsys.readouterr()
    code, rep = report(capsys, "parse", "corpus", str(tmp_path))
    assert code == 0


def test_unknown_class_for_stories(capsys):
    assert run(["stories", "corpus", "--class", "GHOST"]) == 2


def test_color_setting(capsys, monkeypatch):
    monkeypatch.setenv("REQLENS_COLOR", "always")
    run(["check", "corpus/roborace.rsl"])
    assert "\033[31m" in capsys.readouterr().out
