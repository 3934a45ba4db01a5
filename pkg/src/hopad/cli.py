"""Command-line entry point, file formats, and rendering.

Automaton files are line-oriented UTF-8 with `#` comments:

    level 2
    collapsible true
    input-alphabet [ ] $
    stack-alphabet X Y [ ]
    initial-state start
    initial-symbol X
    accepting accept
    trans start X eps work push 2 X
    trans work X in [ copy-open push 1 [

plus optional scenario directives `start-state q` and
`start-stack [[(X,-)] [(X,1)]]` for commands that replay from a seeded
configuration.  Data words are whitespace-separated `letter@value`
tokens.  Stacks render as nested brackets of atoms `(sym,data)` with
`-` for the empty data slot and collapse links after `;`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

from .core import (
    Atom,
    Automaton,
    Configuration,
    InvalidAutomaton,
    Op,
    Run,
    Stack,
    Step,
    Transition,
    empty_run,
    execute_word,
    extend_run,
    initial_configuration,
    is_well_formed,
    step,
    validate_automaton,
)


class CliError(Exception):
    """Parse or validation failure; maps to exit code 2."""


# ---------------------------------------------------------------------------
# data words


def parse_data_word(text: str):
    word = []
    for token in text.split():
        if "@" not in token:
            raise CliError(f"token {token!r} is not letter@value")
        letter, _, value = token.rpartition("@")
        if not letter:
            raise CliError(f"token {token!r} has an empty letter")
        if not value.isdigit():
            raise CliError(f"token {token!r} has a non-numeric value")
        word.append((letter, int(value)))
    return tuple(word)


def format_data_word(word) -> str:
    return " ".join(f"{a}@{d}" for a, d in word)


# ---------------------------------------------------------------------------
# stacks


def render_atom(atom: Atom) -> str:
    data = "-" if atom.data is None else str(atom.data)
    links = "" if atom.links is None else ";" + ",".join(str(x) for x in atom.links)
    return f"({atom.symbol},{data}{links})"


def render_stack(stack: Stack, level: int) -> str:
    if level == 0:
        return render_atom(stack)
    return "[" + " ".join(render_stack(s, level - 1) for s in stack) + "]"


def render_op(op: Op) -> str:
    return str(op)


class _StackParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise CliError(f"stack literal: {message} at offset {self.pos}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def parse(self, level: int):
        self.skip_ws()
        if level == 0:
            return self.parse_atom()
        if self.pos >= len(self.text) or self.text[self.pos] != "[":
            self.error(f"expected '[' opening a level-{level} stack")
        self.pos += 1
        children = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                self.error("unterminated stack")
            if self.text[self.pos] == "]":
                self.pos += 1
                return tuple(children)
            children.append(self.parse(level - 1))

    def parse_atom(self):
        if self.pos >= len(self.text) or self.text[self.pos] != "(":
            self.error("expected '(' opening an atom")
        end = self.text.find(")", self.pos)
        if end < 0:
            self.error("unterminated atom")
        body = self.text[self.pos + 1 : end]
        self.pos = end + 1
        if ";" in body:
            main, _, linkpart = body.partition(";")
            try:
                links = tuple(int(x) for x in linkpart.split(","))
            except ValueError:
                self.error(f"bad links {linkpart!r}")
        else:
            main, links = body, None
        symbol, sep, data = main.rpartition(",")
        if not sep:
            self.error(f"atom {body!r} needs symbol,data")
        if data == "-":
            value = None
        elif data.isdigit():
            value = int(data)
        else:
            self.error(f"bad data value {data!r}")
        return Atom(symbol, value, links)


def parse_stack_literal(text: str, level: int) -> Stack:
    parser = _StackParser(text)
    stack = parser.parse(level)
    parser.skip_ws()
    if parser.pos != len(text):
        parser.error("trailing input")
    if not is_well_formed(stack, level):
        raise CliError("stack literal is not well formed")
    return stack


# ---------------------------------------------------------------------------
# automaton files


@dataclass
class Scenario:
    automaton: Automaton
    start: Optional[Configuration] = None

    def start_configuration(self) -> Configuration:
        if self.start is not None:
            return self.start
        return initial_configuration(self.automaton)


def _parse_op(tokens: list[str], where: str) -> Op:
    if not tokens:
        raise CliError(f"{where}: missing operation")
    kind = tokens[0]
    if kind == "pop" and len(tokens) == 2 and tokens[1].isdigit():
        return Op("pop", int(tokens[1]))
    if kind == "push" and len(tokens) == 3 and tokens[1].isdigit():
        return Op("push", int(tokens[1]), tokens[2])
    if kind == "collapse" and len(tokens) == 2 and tokens[1].isdigit():
        return Op("collapse", int(tokens[1]))
    raise CliError(f"{where}: bad operation {' '.join(tokens)!r}")


def parse_automaton_text(text: str) -> Scenario:
    fields: dict = {
        "level": None,
        "collapsible": False,
        "input-alphabet": [],
        "stack-alphabet": [],
        "initial-state": None,
        "initial-symbol": None,
        "accepting": [],
    }
    transitions: list[Transition] = []
    start_state = None
    start_stack_text = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        tokens = line.split()
        key = tokens[0]
        rest = tokens[1:]
        if key == "level":
            if len(rest) != 1 or not rest[0].isdigit():
                raise CliError(f"{where}: level needs one number")
            fields["level"] = int(rest[0])
        elif key == "collapsible":
            if rest not in (["true"], ["false"]):
                raise CliError(f"{where}: collapsible needs true or false")
            fields["collapsible"] = rest == ["true"]
        elif key in ("input-alphabet", "stack-alphabet", "accepting"):
            fields[key] = rest
        elif key in ("initial-state", "initial-symbol"):
            if len(rest) != 1:
                raise CliError(f"{where}: {key} needs one token")
            fields[key] = rest[0]
        elif key == "trans":
            if len(rest) < 4:
                raise CliError(f"{where}: trans needs source, symbol, input, target, op")
            source, symbol = rest[0], rest[1]
            if rest[2] == "eps":
                letter = None
                target_idx = 3
            elif rest[2] == "in" and len(rest) >= 5:
                letter = rest[3]
                target_idx = 4
            else:
                raise CliError(f"{where}: expected 'eps' or 'in <letter>'")
            target = rest[target_idx]
            transitions.append(
                Transition(source, symbol, letter, target, _parse_op(rest[target_idx + 1 :], where))
            )
        elif key == "start-state":
            if len(rest) != 1:
                raise CliError(f"{where}: start-state needs one token")
            start_state = rest[0]
        elif key == "start-stack":
            start_stack_text = line.split(None, 1)[1]
        else:
            raise CliError(f"{where}: unknown directive {key!r}")
    if fields["level"] is None:
        raise CliError("missing level directive")
    if fields["initial-state"] is None or fields["initial-symbol"] is None:
        raise CliError("missing initial-state or initial-symbol")
    states = {fields["initial-state"], *fields["accepting"]}
    for t in transitions:
        states.add(t.state)
        states.add(t.target)
    aut = Automaton(
        level=fields["level"],
        input_alphabet=frozenset(fields["input-alphabet"]),
        stack_alphabet=frozenset(fields["stack-alphabet"]),
        initial_symbol=fields["initial-symbol"],
        states=frozenset(states),
        initial_state=fields["initial-state"],
        accepting=frozenset(fields["accepting"]),
        transitions=tuple(transitions),
        collapsible=fields["collapsible"],
    )
    start = None
    if start_state is not None or start_stack_text is not None:
        if start_state is None or start_stack_text is None:
            raise CliError("start-state and start-stack must appear together")
        stack = parse_stack_literal(start_stack_text, aut.level)
        start = Configuration(start_state, stack)
    return Scenario(aut, start)


def format_automaton(aut: Automaton) -> str:
    lines = [
        f"level {aut.level}",
        f"collapsible {'true' if aut.collapsible else 'false'}",
        "input-alphabet " + " ".join(sorted(aut.input_alphabet)),
        "stack-alphabet " + " ".join(sorted(aut.stack_alphabet)),
        f"initial-state {aut.initial_state}",
        f"initial-symbol {aut.initial_symbol}",
        "accepting " + " ".join(sorted(aut.accepting)),
    ]
    for t in aut.transitions:
        middle = "eps" if t.letter is None else f"in {t.letter}"
        if t.op.kind == "push":
            op = f"push {t.op.level} {t.op.symbol}"
        else:
            op = f"{t.op.kind} {t.op.level}"
        lines.append(f"trans {t.state} {t.symbol} {middle} {t.target} {op}")
    return "\n".join(lines) + "\n"


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    scenario = parse_automaton_text(text)
    try:
        validate_automaton(scenario.automaton)
    except InvalidAutomaton as exc:
        raise CliError(
            "invalid automaton:\n" + "\n".join(f"  {d}" for d in exc.diagnostics)
        ) from None
    return scenario


# ---------------------------------------------------------------------------
# run construction for scenario commands


def drive_run(scenario: Scenario, word, eps_budget: int) -> Run:
    """Step from the scenario start, interleaving epsilon steps and the
    given letters, until the word is exhausted and no step applies."""
    aut = scenario.automaton
    run = empty_run(aut, scenario.start_configuration())
    pos = 0
    streak = 0
    while True:
        nxt = word[pos] if pos < len(word) else None
        res = step(aut, run.configs[-1], nxt)
        if not isinstance(res, Step):
            return run
        if res.label[0] is None:
            streak += 1
            if streak > eps_budget:
                return run
        else:
            streak = 0
            pos += 1
        run = extend_run(run, res)


# ---------------------------------------------------------------------------
# commands


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except CliError as exc:
        print(exc)
        return 2
    aut = scenario.automaton
    print(
        f"ok: level {aut.level}, {len(aut.states)} states, "
        f"{len(aut.transitions)} transitions, "
        f"{'collapsible' if aut.collapsible else 'non-collapsible'}"
    )
    return 0


def _dump_run(run: Run) -> None:
    level = run.automaton.level
    print(f"i=0 state={run.at(0).state} op=- read=-")
    print(f"  {render_stack(run.at(0).stack, level)}")
    for i, (label, tr) in enumerate(zip(run.labels, run.transitions), start=1):
        read = "eps" if label[0] is None else f"{label[0]}@{label[1]}"
        print(f"i={i} state={run.at(i).state} op={render_op(tr.op)} read={read}")
        print(f"  {render_stack(run.at(i).stack, level)}")


def _cmd_run(args) -> int:
    scenario = load_scenario(args.file)
    word = parse_data_word(args.word)
    if scenario.start is None:
        outcome = execute_word(scenario.automaton, word, args.eps_budget)
        run = outcome.run
        verdict = outcome.kind if outcome.reason is None else f"{outcome.kind} ({outcome.reason})"
    else:
        run = drive_run(scenario, word, args.eps_budget)
        verdict = f"stopped in state {run.configs[-1].state} after {len(run)} steps"
    if args.dump:
        _dump_run(run)
    print(verdict)
    return 0


def _cmd_accept(args) -> int:
    scenario = load_scenario(args.file)
    word = parse_data_word(args.word)
    outcome = execute_word(scenario.automaton, word, args.eps_budget)
    print(outcome.kind)
    return 0 if outcome.accepted else 1


def _cmd_classify(args) -> int:
    from .lineage import classification_table, instrument_lineage

    scenario = load_scenario(args.file)
    word = parse_data_word(args.word) if args.word else ()
    run = drive_run(scenario, word, args.eps_budget)
    lo = args.span_from if args.span_from is not None else 0
    hi = args.span_to if args.span_to is not None else len(run)
    if not 0 <= lo <= hi <= len(run):
        raise CliError(f"span {lo}..{hi} outside 0..{len(run)}")
    run = run.subrun(lo, hi)
    table = classification_table(instrument_lineage(run))
    n = run.automaton.level
    header = ["j", "stack"]
    for k in range(0, n + 1):
        header.append(f"{k}-upper")
    for k in range(1, n + 1):
        header.append(f"{k}-return")
    rows = [header]
    for j in range(len(run) + 1):
        row = [str(j), render_stack(run.at(j).stack, n)]
        for k in range(0, n + 1):
            row.append(_render_set(table.upper[(j, k)]))
        for k in range(1, n + 1):
            row.append(_render_set(table.returns[(j, k)]))
        rows.append(row)
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return 0


def _render_set(values) -> str:
    if not values:
        return "{}"
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def _table_for(args, scenario):
    from .monoid import monoid_by_name
    from .typesys import ResourceCapExceeded, saturate_level0

    aut = scenario.automaton
    monoid = monoid_by_name(args.monoid, sorted(aut.input_alphabet))
    try:
        return saturate_level0(aut, monoid)
    except (ValueError, ResourceCapExceeded) as exc:
        raise CliError(str(exc)) from None


def _cmd_types(args) -> int:
    scenario = load_scenario(args.file)
    table = _table_for(args, scenario)
    uni = table.universe
    for key in sorted(table.entries):
        entry = table.entries[key]
        if not entry:
            continue
        symbol, has_data = key
        print(f"entry {symbol} {'data' if has_data else 'no-data'}")
        for did in sorted(entry):
            mark = " idv" if entry[did] else ""
            print(f"  {did} {uni.render(did)}{mark}")
    stats = table.stats
    print(
        f"stats descriptors={stats.descriptors} goals={stats.goals} "
        f"pairs={stats.table_pairs} passes={stats.passes}"
    )
    return 0


def _cmd_src(args) -> int:
    from .lineage import instrument_lineage, is_k_upper
    from .srcsets import compute_src
    from .typesys import type_of_stack

    scenario = load_scenario(args.file)
    word = parse_data_word(args.word) if args.word else ()
    run = drive_run(scenario, word, args.eps_budget)
    lrun = instrument_lineage(run)
    k = args.k
    if not is_k_upper(lrun, k):
        raise CliError(f"the driven run is not {k}-upper")
    table = _table_for(args, scenario)
    n = scenario.automaton.level
    final = type_of_stack(run.configs[-1].stack, k, table)
    sigmas = {i: tuple(final.typing(i)) for i in range(k + 1, n + 1)}
    result = compute_src(lrun, k, sigmas, table)
    uni = table.universe
    for i in range(k + 1, n + 1):
        ids = sorted(result.sets.get(i, ()))
        print(f"src^{i} =", "{" + ", ".join(uni.render(x) for x in ids) + "}")
    print("derivation:")
    print(result.provenance.render("  "))
    return 0


def _cmd_u_check(args) -> int:
    from .ulang import in_u

    word = parse_data_word(args.word)
    report = in_u(word)
    print("member" if report.member else f"non-member ({report.failed_condition})")
    return 0 if report.member else 1


def _cmd_u_machine(args) -> int:
    from .ulang import build_u_recognizer

    sys.stdout.write(format_automaton(build_u_recognizer()))
    return 0


def _cmd_gen_word(args) -> int:
    from .ulang import decorate_distinct, gen_w

    word = gen_w(args.k, args.n)
    if args.decorate:
        print(format_data_word(decorate_distinct(word)))
    else:
        print(word)
    return 0


def _cmd_verify(args) -> int:
    from .harness import SUITE_NAMES, run_suites

    selection = args.suite if args.suite else list(SUITE_NAMES)
    bounds = {}
    if args.max_steps is not None:
        bounds["run_bound"] = args.max_steps
        bounds["src_bound"] = min(args.max_steps, 5)
    report = run_suites(selection, seed=args.seed, bounds=bounds or None)
    sys.stdout.write(report.text())
    return 0 if report.ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hopad",
        description="higher-order pushdown automata over data words",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("validate", _cmd_validate, help="check an automaton file")
    p.add_argument("file")

    for name, fn in (("run", _cmd_run), ("accept", _cmd_accept)):
        p = add(name, fn, help=f"{name} a data word on an automaton")
        p.add_argument("file")
        p.add_argument("--word", required=(name == "accept"), default="")
        p.add_argument("--eps-budget", type=int, default=10_000)
        if name == "run":
            p.add_argument("--dump", action="store_true")

    p = add("classify", _cmd_classify, help="print the per-subrun classification grid")
    p.add_argument("file")
    p.add_argument("--word", default="")
    p.add_argument("--eps-budget", type=int, default=10_000)
    p.add_argument("--from", dest="span_from", type=int, default=None)
    p.add_argument("--to", dest="span_to", type=int, default=None)

    p = add("types", _cmd_types, help="print the saturated level-0 descriptor table")
    p.add_argument("file")
    p.add_argument("--monoid", default="shape", choices=("shape", "trivial", "presence"))

    p = add("src", _cmd_src, help="print source sets of the driven run")
    p.add_argument("file")
    p.add_argument("--word", default="")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--monoid", default="shape", choices=("shape", "trivial", "presence"))
    p.add_argument("--eps-budget", type=int, default=10_000)

    p = add("u-check", _cmd_u_check, help="membership in the bracket-mirror language")
    p.add_argument("--word", required=True)

    add("u-machine", _cmd_u_machine, help="emit the bracket-mirror recognizer")

    p = add("gen-word", _cmd_gen_word, help="emit a word of the nested bracket family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--decorate", action="store_true", help="attach distinct data values")

    p = add("verify", _cmd_verify, help="run the verification suites")
    p.add_argument("--suite", action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=None)

    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except CliError as exc:
        print(exc, file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
