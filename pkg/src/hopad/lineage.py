"""Copy-lineage instrumentation of runs and run classification.

Every nested stack occurrence of every configuration of a run gets a
unique id.  Operations of level j leave the ids of all enclosing stacks
(levels >= j) untouched; a push duplicates the topmost (j-1)-stack with
fresh ids, each linked copy-of its source, and the rewritten top atom of
the duplicate is linked copy-of the atom it replaces; pops and collapses
destroy ids and create none.  The copy-of links form a forest, and the
classifiers below are reachability questions in it:

* a run is k-upper when the final topmost k-stack, traced backward
  through the forest, is the initial topmost k-stack;
* a run is a k-return when the final topmost (k-1)-stack traces back to
  the initial *second* topmost (k-1)-stack and the traced occurrence is
  never the topmost (k-1)-stack before the last step, which exposes it.

``decompose_return`` and ``decompose_upper`` give an independent,
purely syntactic characterization by recursion on the operation
sequence; the two routes must coincide on collapse-free runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Union

from .core import Run, top_atom


class LNode(NamedTuple):
    uid: int
    children: Optional[tuple]  # None at level 0


@dataclass(frozen=True)
class LineageRun:
    run: Run
    snapshots: tuple[LNode, ...]
    parent: Mapping[int, int]  # fresh id -> the id it was copied from
    created: Mapping[int, int]  # id -> index of the step that created it


def _as_lineage(run: Union[Run, LineageRun]) -> LineageRun:
    return run if isinstance(run, LineageRun) else instrument_lineage(run)


def _modify_top(node: LNode, depth: int, fn) -> LNode:
    if depth == 0:
        return fn(node)
    kids = node.children
    return LNode(node.uid, kids[:-1] + (_modify_top(kids[-1], depth - 1, fn),))


def instrument_lineage(run: Run) -> LineageRun:
    n = run.automaton.level
    counter = itertools.count(1)
    parent: dict[int, int] = {}
    created: dict[int, int] = {}

    def fresh(step_index: int) -> int:
        uid = next(counter)
        created[uid] = step_index
        return uid

    def annotate(stack, level) -> LNode:
        uid = fresh(0)
        if level == 0:
            return LNode(uid, None)
        return LNode(uid, tuple(annotate(s, level - 1) for s in stack))

    def copy_plain(node: LNode, idx: int) -> LNode:
        uid = fresh(idx)
        parent[uid] = node.uid
        if node.children is None:
            return LNode(uid, None)
        return LNode(uid, tuple(copy_plain(c, idx) for c in node.children))

    def copy_rewriting_top(node: LNode, level: int, idx: int) -> LNode:
        # the duplicate's top atom is the rewritten one; link it straight
        # to the atom it overwrites
        uid = fresh(idx)
        parent[uid] = node.uid
        if level == 0:
            return LNode(uid, None)
        kids = tuple(copy_plain(c, idx) for c in node.children[:-1])
        kids += (copy_rewriting_top(node.children[-1], level - 1, idx),)
        return LNode(uid, kids)

    snaps = [annotate(run.at(0).stack, n)]
    for idx, tr in enumerate(run.transitions, start=1):
        op = tr.op
        prev = snaps[-1]
        if op.kind == "pop":
            snaps.append(
                _modify_top(prev, n - op.level, lambda s: LNode(s.uid, s.children[:-1]))
            )
        elif op.kind == "push":
            k = op.level

            def dup(s):
                copy = copy_rewriting_top(s.children[-1], k - 1, idx)
                return LNode(s.uid, s.children + (copy,))

            snaps.append(_modify_top(prev, n - k, dup))
        else:  # collapse; link values live in the concrete stack, not the id tree
            keep = top_atom(run.at(idx - 1).stack, n).links[op.level - 1] - 1
            snaps.append(
                _modify_top(
                    prev, n - op.level, lambda s: LNode(s.uid, s.children[:keep])
                )
            )
    return LineageRun(run, tuple(snaps), parent, created)


def _descend(node: LNode, times: int) -> LNode:
    for _ in range(times):
        node = node.children[-1]
    return node


def _topmost_uid(lrun: LineageRun, t: int, k: int) -> int:
    n = lrun.run.automaton.level
    return _descend(lrun.snapshots[t], n - k).uid


def _second_topmost_uid(lrun: LineageRun, t: int, k: int) -> Optional[int]:
    """Id of the second topmost k-stack, or None if the (k+1)-stack is small."""
    n = lrun.run.automaton.level
    holder = _descend(lrun.snapshots[t], n - k - 1)
    if len(holder.children) < 2:
        return None
    return holder.children[-2].uid


def _chain(lrun: LineageRun, uid: int) -> list[int]:
    """The copy-of ancestry, most recent first."""
    out = [uid]
    while out[-1] in lrun.parent:
        out.append(lrun.parent[out[-1]])
    return out


def _rep_at(lrun: LineageRun, chain: list[int], t: int) -> Optional[int]:
    """The chain element alive at time t (creation times decrease along it)."""
    for uid in chain:
        if lrun.created[uid] <= t:
            return uid
    return None


def is_k_upper(run: Union[Run, LineageRun], k: int, i: int = 0, j: Optional[int] = None) -> bool:
    lrun = _as_lineage(run)
    if j is None:
        j = len(lrun.run)
    final = _topmost_uid(lrun, j, k)
    initial = _topmost_uid(lrun, i, k)
    return _rep_at(lrun, _chain(lrun, final), i) == initial


def is_k_return(run: Union[Run, LineageRun], k: int, i: int = 0, j: Optional[int] = None) -> bool:
    lrun = _as_lineage(run)
    if j is None:
        j = len(lrun.run)
    if j <= i:
        return False
    second = _second_topmost_uid(lrun, i, k - 1)
    if second is None:  # topmost k-stack of size < 2
        return False
    chain = _chain(lrun, _topmost_uid(lrun, j, k - 1))
    if _rep_at(lrun, chain, i) != second:
        return False
    for t in range(i, j):
        if _rep_at(lrun, chain, t) == _topmost_uid(lrun, t, k - 1):
            return False
    return True


def remark_k_return(run: Union[Run, LineageRun], k: int, i: int = 0, j: Optional[int] = None) -> bool:
    """The one-line rephrasing: the final topmost k-stack is the traced
    initial topmost k-stack minus its top, removed in the last step.

    Equivalent to ``is_k_return`` on collapse-free runs only: a final
    collapse may expose the traced stack while removing several
    (k-1)-stacks at once, which this single-removal reading rejects."""
    lrun = _as_lineage(run)
    n = lrun.run.automaton.level
    if j is None:
        j = len(lrun.run)
    if j <= i:
        return False
    top_i = _descend(lrun.snapshots[i], n - k)
    top_j = _descend(lrun.snapshots[j], n - k)
    if _rep_at(lrun, _chain(lrun, top_j.uid), i) != top_i.uid:
        return False
    if len(top_j.children) != len(top_i.children) - 1:
        return False
    for pos, child in enumerate(top_j.children):
        if _rep_at(lrun, _chain(lrun, child.uid), i) != top_i.children[pos].uid:
            return False
    # the removal happens in the last step, and what it removes is the
    # traced copy of the initial topmost (k-1)-stack
    last = lrun.run.transitions[j - 1].op
    if last.level != k or last.kind == "push":
        return False
    before = _descend(lrun.snapshots[j - 1], n - k)
    if len(before.children) != len(top_j.children) + 1:
        return False
    removed = before.children[-1]
    if _rep_at(lrun, _chain(lrun, removed.uid), i) != top_i.children[-1].uid:
        return False
    return True


@dataclass
class ClassificationTable:
    """Per (j, k): the sets {i : R[i..j] is k-upper} and {i : ... k-return}."""

    length: int
    level: int
    upper: dict[tuple[int, int], frozenset[int]]
    returns: dict[tuple[int, int], frozenset[int]]


def classification_table(run: Union[Run, LineageRun]) -> ClassificationTable:
    lrun = _as_lineage(run)
    n = lrun.run.automaton.level
    m = len(lrun.run)
    upper = {}
    returns = {}
    for j in range(m + 1):
        for k in range(0, n + 1):
            upper[(j, k)] = frozenset(
                i for i in range(j + 1) if is_k_upper(lrun, k, i, j)
            )
        for k in range(1, n + 1):
            returns[(j, k)] = frozenset(
                i for i in range(j + 1) if is_k_return(lrun, k, i, j)
            )
    return ClassificationTable(m, n, upper, returns)


def is_normalized(run: Union[Run, LineageRun]) -> bool:
    """Every letter-reading push step reads the distinguished value 0."""
    r = run.run if isinstance(run, LineageRun) else run
    for label, tr in zip(r.labels, r.transitions):
        if label[0] is not None and tr.op.kind == "push" and label[1] != 0:
            return False
    return True


@dataclass(frozen=True)
class DecompositionTree:
    shape: str  # "return" | "upper"
    case: int
    level: int
    span: tuple[int, int]
    split: Optional[int] = None
    children: tuple["DecompositionTree", ...] = ()

    def render(self, indent: str = "") -> str:
        head = f"{indent}{self.shape} case {self.case} level {self.level} [{self.span[0]}..{self.span[1]}]"
        if self.split is not None:
            head += f" split {self.split}"
        return "\n".join([head] + [c.render(indent + "  ") for c in self.children])


def decompose_return(
    run: Union[Run, LineageRun],
    r: int,
    i: int = 0,
    j: Optional[int] = None,
    _memo: Optional[dict] = None,
) -> Optional[DecompositionTree]:
    """Derivation of r-return-ness by recursion on the operation sequence.

    Case 1: a single pop^r step.  Case 2: a leading pop^k (k < r) or
    push^k (k != r) followed by an r-return.  Case 3: a leading push^k
    (k >= r) followed by a k-return composed with an r-return.  Collapse
    steps admit no case; the characterization covers collapse-free runs.
    """
    base = run.run if isinstance(run, LineageRun) else run
    if j is None:
        j = len(base)
    if _memo is None:
        _memo = {}
    key = (i, j, r)
    if key in _memo:
        return _memo[key]
    _memo[key] = None  # cycles are impossible; this is just the default
    result = None
    if j > i:
        first = base.transitions[i].op
        if j - i == 1 and first.kind == "pop" and first.level == r:
            result = DecompositionTree("return", 1, r, (i, j))
        if result is None and (
            (first.kind == "pop" and first.level < r)
            or (first.kind == "push" and first.level != r)
        ):
            sub = decompose_return(base, r, i + 1, j, _memo)
            if sub is not None:
                result = DecompositionTree("return", 2, r, (i, j), children=(sub,))
        if result is None and first.kind == "push" and first.level >= r:
            k = first.level
            for m in range(i + 2, j):
                left = decompose_return(base, k, i + 1, m, _memo)
                if left is None:
                    continue
                right = decompose_return(base, r, m, j, _memo)
                if right is not None:
                    result = DecompositionTree(
                        "return", 3, r, (i, j), split=m, children=(left, right)
                    )
                    break
    _memo[key] = result
    return result


def decompose_upper(
    run: Union[Run, LineageRun],
    k: int,
    i: int = 0,
    j: Optional[int] = None,
    _memo: Optional[dict] = None,
) -> Optional[DecompositionTree]:
    """Derivation of k-upper-ness by recursion on the operation sequence.

    Case 1: only operations of level at most k (the empty run included).
    Case 2: a single push^r, r >= k+1.  Case 3: a leading push^r
    (r >= k+1) followed by an r-return.  Case 4: a composition of two
    nonempty k-upper runs.
    """
    base = run.run if isinstance(run, LineageRun) else run
    if j is None:
        j = len(base)
    if _memo is None:
        _memo = {}
    key = (i, j, k)
    if key in _memo:
        return _memo[key]
    _memo[key] = None
    result = None
    ops = [base.transitions[t].op for t in range(i, j)]
    if all(op.level <= k for op in ops):
        result = DecompositionTree("upper", 1, k, (i, j))
    if result is None and j - i == 1 and ops[0].kind == "push" and ops[0].level >= k + 1:
        result = DecompositionTree("upper", 2, k, (i, j))
    if result is None and ops and ops[0].kind == "push" and ops[0].level >= k + 1:
        sub = decompose_return(base, ops[0].level, i + 1, j)
        if sub is not None:
            result = DecompositionTree("upper", 3, k, (i, j), children=(sub,))
    if result is None:
        for m in range(i + 1, j):
            left = decompose_upper(base, k, i, m, _memo)
            if left is None:
                continue
            right = decompose_upper(base, k, m, j, _memo)
            if right is not None:
                result = DecompositionTree(
                    "upper", 4, k, (i, j), split=m, children=(left, right)
                )
                break
    _memo[key] = result
    return result
