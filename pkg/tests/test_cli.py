import io
import re
import pathlib
from contextlib import redirect_stdout

import pytest

from hopad.cli import (
    CliError,
    format_automaton,
    format_data_word,
    main,
    parse_automaton_text,
    parse_data_word,
    parse_stack_literal,
    render_stack,
)
from hopad.core import Atom, automaton_diagnostics

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run_cli(*argv):
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(list(argv))
    return code, buffer.getvalue()


def test_data_word_round_trip():
    word = parse_data_word("[@1 $@0 ]@1")
    assert word == (("[", 1), ("$", 0), ("]", 1))
    assert format_data_word(word) == "[@1 $@0 ]@1"
    assert parse_data_word("") == ()
    with pytest.raises(CliError):
        parse_data_word("a")
    with pytest.raises(CliError):
        parse_data_word("a@-1")


def test_stack_literal_round_trip():
    text = "[[(X,-)] [(X,1) (Y,3;1,4)]]"
    stack = parse_stack_literal(text, 2)
    assert stack == (
        (Atom("X", None),),
        (Atom("X", 1), Atom("Y", 3, (1, 4))),
    )
    assert render_stack(stack, 2) == text
    with pytest.raises(CliError):
        parse_stack_literal("[[]]", 2)  # ill-formed: empty 1-stack
    with pytest.raises(CliError):
        parse_stack_literal("[(X,-)] junk", 1)


def test_automaton_file_round_trip():
    for name in ("u-machine.aut", "classification-example.scenario", "excursion.scenario"):
        text = (GOLDEN / name).read_text()
        scenario = parse_automaton_text(text)
        assert automaton_diagnostics(scenario.automaton) == []
        reparsed = parse_automaton_text(format_automaton(scenario.automaton))
        assert reparsed.automaton == scenario.automaton


def test_u_machine_golden():
    code, out = run_cli("u-machine")
    assert code == 0
    assert out == (GOLDEN / "u-machine.aut").read_text()


def test_validate_exit_codes(tmp_path):
    code, out = run_cli("validate", str(GOLDEN / "u-machine.aut"))
    assert code == 0 and out.startswith("ok:")
    bad = tmp_path / "bad.aut"
    bad.write_text("level 1\ninitial-state q\ninitial-symbol X\n"
                   "stack-alphabet X\ntrans q X in a q collapse 1\n")
    code, _ = run_cli("validate", str(bad))
    assert code == 2
    code, _ = run_cli("validate", str(tmp_path / "missing.aut"))
    assert code == 2


def test_accept_and_u_check_exit_codes():
    aut = str(GOLDEN / "u-machine.aut")
    assert run_cli("accept", aut, "--word", "[@1 $@0 ]@1")[0] == 0
    assert run_cli("accept", aut, "--word", "[@1 $@0 ]@2")[0] == 1
    assert run_cli("u-check", "--word", "[@1 $@0 ]@1")[0] == 0
    code, out = run_cli("u-check", "--word", "[@1 ]@1")
    assert code == 1 and "dollar-count" in out


def test_run_dump_golden():
    code, out = run_cli(
        "run", str(GOLDEN / "u-machine.aut"), "--word", "[@1 $@0 ]@1", "--dump"
    )
    assert code == 0
    assert out == (GOLDEN / "u-run-dump.txt").read_text()


def test_classify_matches_expected_grid():
    code, out = run_cli("classify", str(GOLDEN / "classification-example.scenario"))
    assert code == 0
    lines = out.strip().splitlines()
    rows = [re.split(r"\s{2,}", line.strip()) for line in lines[1:]]
    expected = {
        0: ("{0}", "{0}", "{}", "{}"),
        1: ("{0,1}", "{0,1}", "{}", "{}"),
        2: ("{2}", "{0,1,2}", "{0,1}", "{}"),
        3: ("{0,3}", "{0,3}", "{}", "{1,2}"),
        4: ("{4}", "{0,3,4}", "{0,3}", "{}"),
        5: ("{4,5}", "{0,3,4,5}", "{}", "{}"),
        6: ("{4,6}", "{0,3,4,5,6}", "{5}", "{}"),
    }
    assert len(rows) == 7
    for row in rows:
        j = int(row[0])
        u0, u1, r1, r2 = expected[j]
        assert row[2] == u0 and row[3] == u1, row
        assert row[5] == r1 and row[6] == r2, row


def test_classify_subrun_span():
    code, out = run_cli(
        "classify", str(GOLDEN / "classification-example.scenario"), "--from", "1", "--to", "3"
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 4  # header plus j=0..2


def test_types_output_is_stable():
    code, first = run_cli(
        "types", str(GOLDEN / "excursion.scenario"), "--monoid", "presence"
    )
    assert code == 0
    assert "entry g data" in first
    assert "(desc" in first and "idv" in first
    _, second = run_cli(
        "types", str(GOLDEN / "excursion.scenario"), "--monoid", "presence"
    )
    assert first == second


def test_src_command():
    code, out = run_cli(
        "src",
        str(GOLDEN / "excursion.scenario"),
        "--word",
        "c@0 a@7",
        "--k",
        "0",
        "--monoid",
        "presence",
    )
    assert code == 0
    assert "src^1" in out and "src^2" in out and "case 3" in out


def test_gen_word_command():
    assert run_cli("gen-word", "--k", "0") == (0, "[][\n")
    assert run_cli("gen-word", "--k", "1", "--n", "2") == (0, "[][[][]][\n")
    code, out = run_cli("gen-word", "--k", "0", "--decorate")
    assert code == 0 and out == "[@1 ]@2 [@3\n"


def test_verify_command_smoke():
    code, out = run_cli("verify", "--suite", "monoid-laws", "--suite", "w-recurrence")
    assert code == 0
    assert out.splitlines()[0].startswith("suite=monoid-laws status=pass")
