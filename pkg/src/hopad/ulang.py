"""The mirrored-bracket separating data language and its level-2 recognizer.

A data word over {[, ], $} belongs to the language when it contains
exactly one dollar, removing the dollar leaves a well-formed bracket
expression, and the suffix after the dollar is symmetric to the
length-matched prefix: the i-th letter from the beginning and the i-th
from the end carry the same data value and form a [/] pair.

``build_u_recognizer`` constructs the collapsible level-2 machine for it:
the data values of the brackets read so far are frozen, one per 1-stack
copy; on the dollar the collapse link of the topmost count marker jumps
back to the last unmatched opening bracket, and the mirrored suffix is
consumed by pop^2 steps whose pop-read semantics enforce data equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Automaton,
    DataWord,
    Transition,
    collapse,
    pop,
    push,
    validate_automaton,
)

ALPHABET = ("[", "]", "$")


@dataclass(frozen=True)
class UMembershipReport:
    member: bool
    failed_condition: str  # dollar-count | bracket-wellformedness | suffix-symmetry | none


def in_u(word: DataWord) -> UMembershipReport:
    """Decide membership directly from the three defining conditions.

    The mirrored prefix is the one ending on the last opening bracket
    left unmatched before the dollar (empty when all are matched), so
    the suffix after the dollar is uniquely determined by the rest of
    the word; the suffix must have exactly that length and match it
    position by position.
    """
    letters = [a for a, _ in word]
    for a in letters:
        if a not in ALPHABET:
            raise ValueError(f"letter {a!r} outside the {{[,],$}} alphabet")
    if letters.count("$") != 1:
        return UMembershipReport(False, "dollar-count")
    depth = 0
    for a in letters:
        if a == "[":
            depth += 1
        elif a == "]":
            depth -= 1
            if depth < 0:
                return UMembershipReport(False, "bracket-wellformedness")
    if depth != 0:
        return UMembershipReport(False, "bracket-wellformedness")
    dollar = letters.index("$")
    open_positions = []
    for i, a in enumerate(letters[:dollar]):
        if a == "[":
            open_positions.append(i)
        elif a == "]":
            open_positions.pop()
    prefix_len = open_positions[-1] + 1 if open_positions else 0
    if len(word) - 1 - dollar != prefix_len:
        return UMembershipReport(False, "suffix-symmetry")
    for i in range(prefix_len):
        ai, vi = word[i]
        aj, vj = word[len(word) - 1 - i]
        if vi != vj or {ai, aj} != {"[", "]"}:
            return UMembershipReport(False, "suffix-symmetry")
    return UMembershipReport(True, "none")


def build_u_recognizer() -> Automaton:
    """The collapsible level-2 recognizer.

    Stack symbols: the brackets themselves, X marking 1-stack bottoms and
    Y counting open brackets.  Per input bracket a: push^1(a) (recording
    the data value), push^2 and pop^1 (freezing the record), then
    push^1(Y) for an opening and pop^1 for a closing bracket.  A closing
    bracket on topmost X rejects.  On the dollar: topmost X accepts
    immediately; otherwise collapse^2 on the topmost Y exposes the last
    unmatched opening bracket and each further pop^2 reads one mirrored
    letter, data equality enforced by the pop.
    """
    t = []
    # bootstrap: split off the working copy of the bottom 1-stack
    t.append(Transition("start", "X", None, "work", push(2, "X")))
    # recording phase, four micro-steps per bracket
    for top in ("X", "Y"):
        t.append(Transition("work", top, "[", "copy-open", push(1, "[")))
    t.append(Transition("work", "Y", "]", "copy-close", push(1, "]")))
    t.append(Transition("copy-open", "[", None, "drop-open", push(2, "[")))
    t.append(Transition("drop-open", "[", None, "count-open", pop(1)))
    for top in ("X", "Y"):
        t.append(Transition("count-open", top, None, "work", push(1, "Y")))
    t.append(Transition("copy-close", "]", None, "drop-close", push(2, "]")))
    t.append(Transition("drop-close", "]", None, "uncount-close", pop(1)))
    t.append(Transition("uncount-close", "Y", None, "work", pop(1)))
    # dollar: balanced word accepts at once, otherwise jump back and mirror
    t.append(Transition("work", "X", "$", "accept", push(1, "X")))
    t.append(Transition("work", "Y", "$", "mirror", collapse(2)))
    t.append(Transition("mirror", "[", "]", "mirror", pop(2)))
    t.append(Transition("mirror", "]", "[", "mirror", pop(2)))
    t.append(Transition("mirror", "X", None, "accept", push(1, "X")))
    aut = Automaton(
        level=2,
        input_alphabet=frozenset(ALPHABET),
        stack_alphabet=frozenset({"X", "Y", "[", "]"}),
        initial_symbol="X",
        states=frozenset(
            {
                "start",
                "work",
                "copy-open",
                "drop-open",
                "count-open",
                "copy-close",
                "drop-close",
                "uncount-close",
                "mirror",
                "accept",
            }
        ),
        initial_state="start",
        accepting=frozenset({"accept"}),
        transitions=tuple(t),
        collapsible=True,
    )
    return validate_automaton(aut)


GEN_W_MAX_K = 6


def gen_w(k: int, n_reps: int, max_len: int = 1_000_000) -> str:
    """The bracket-word family w_0 = "[][", w_{k+1} = w_k^N ]^N [."""
    if k < 0 or k > GEN_W_MAX_K:
        raise ValueError(f"k must be in 0..{GEN_W_MAX_K}, got {k}")
    if n_reps < 1:
        raise ValueError(f"repetition count must be >= 1, got {n_reps}")
    size = 3
    for _ in range(k):
        size = n_reps * size + n_reps + 1
        if size > max_len:
            raise ValueError(f"w_{k} with N={n_reps} exceeds the {max_len} length cap")
    w = "[]["
    for _ in range(k):
        w = w * n_reps + "]" * n_reps + "["
    return w


def decorate_distinct(word: str) -> DataWord:
    """Give the i-th letter the data value i (1-based, never 0)."""
    return tuple((a, i) for i, a in enumerate(word, start=1))
