"""Source-set computation for k-upper runs and the two transfer checks.

For a normalized k-upper run and assumption sets on the typing of its
final spine pieces, the src sets name the descriptors of the *initial*
spine pieces from which the final important data values originate.  The
computation follows the run's shape: segments that never touch levels
above k pass the sets through unchanged; a push closes them backward
through composers over the initial pieces; a push followed by a return
closes over the descriptors of the post-push topmost k-stack that
realize the return; compositions chain right to left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .core import Run, recompose, spine, top_stack
from .lineage import LineageRun, instrument_lineage, is_k_return, is_k_upper, is_normalized
from .monoid import phi_of_run
from .typesys import (
    NE,
    CheckReport,
    Level0TypeTable,
    stack_typing,
    type_of_stack,
)


@dataclass(frozen=True)
class ProvenanceNode:
    case: int
    span: tuple[int, int]
    split: Optional[int] = None
    children: tuple["ProvenanceNode", ...] = ()

    def render(self, indent: str = "") -> str:
        head = f"{indent}case {self.case} [{self.span[0]}..{self.span[1]}]"
        if self.split is not None:
            head += f" split {self.split}"
        return "\n".join([head] + [c.render(indent + "  ") for c in self.children])


@dataclass(frozen=True)
class SrcResult:
    k: int
    sets: Mapping[int, frozenset[int]]  # level -> descriptor ids, k+1..n
    provenance: ProvenanceNode


def _promotions_through(uni, target: int, r: int, typings: Mapping[int, dict], k: int):
    """Candidates realizing `target` (a level-r descriptor) as a composer
    over the pieces s^r..s^k: level-k descriptors of s^k whose level-r
    drop is the target and whose intermediate slots hold."""
    out = []
    for cand in typings[k]:
        if cand == NE:
            continue
        d = uni.desc(cand)
        if uni.goal(d.goal).r < r + 1:
            continue
        if uni.drop(cand, r) != target:
            continue
        if all(
            all(t in typings[i] for t in uni.psi_at(d, i)) for i in range(k + 1, r + 1)
        ):
            out.append(d)
    return out


def compute_src(
    lrun: Union[Run, LineageRun],
    k: int,
    sigmas: Mapping[int, Sequence[int]],
    table: Level0TypeTable,
) -> SrcResult:
    """Source sets of a k-upper run for final assumption sets `sigmas`
    (level -> descriptor ids over levels k+1..n)."""
    lrun = lrun if isinstance(lrun, LineageRun) else instrument_lineage(lrun)
    run = lrun.run
    aut = run.automaton
    if aut.uses_collapse:
        raise ValueError("src sets cover collapse-free automata only")
    n = aut.level
    uni = table.universe
    if not is_k_upper(lrun, k):
        raise ValueError(f"the run is not {k}-upper")
    final = type_of_stack(run.configs[-1].stack, k, table)
    for i in range(k + 1, n + 1):
        for sid in sigmas.get(i, ()):
            if sid not in final.typing(i):
                raise ValueError(f"assumption {sid} not in the final level-{i} typing")

    def piece_typings(idx: int) -> dict[int, dict]:
        st = type_of_stack(run.at(idx).stack, k, table)
        return {i: st.typing(i) for i in range(k, n + 1)}

    def rec(i: int, j: int, sig: Mapping[int, frozenset]) -> tuple[dict, ProvenanceNode]:
        ops = [run.transitions[t].op for t in range(i, j)]
        if all(op.level <= k for op in ops):
            src = {lvl: frozenset(sig.get(lvl, ())) for lvl in range(k + 1, n + 1)}
            return src, ProvenanceNode(1, (i, j))
        first = ops[0]
        if j - i == 1 and first.kind == "push" and first.level >= k + 1:
            r = first.level
            typ = piece_typings(i)
            src = {
                lvl: set(sig.get(lvl, ())) if lvl != r else set()
                for lvl in range(k + 1, n + 1)
            }
            for sid in sig.get(r, ()):
                if sid == NE:
                    continue
                for d in _promotions_through(uni, sid, r, typ, k):
                    for lvl in range(k + 1, r + 1):
                        src[lvl] |= set(uni.psi_at(d, lvl))
            return (
                {lvl: frozenset(v) for lvl, v in src.items()},
                ProvenanceNode(2, (i, j)),
            )
        if (
            first.kind == "push"
            and first.level >= k + 1
            and is_k_return(lrun, first.level, i + 1, j)
        ):
            r = first.level
            typ = piece_typings(i)
            tail_phi = phi_of_run(table.monoid, run.subrun(i + 1, j))
            goal_id = uni.intern_goal(
                tail_phi,
                r,
                tuple(tuple(sorted(sig.get(lvl, ()))) for lvl in range(n, r, -1)),
                run.at(j).state,
            )
            post_top = top_stack(run.at(i + 1).stack, n, k)
            post_typing = stack_typing(post_top, k, table)
            q1 = run.at(i + 1).state
            src = {lvl: set() for lvl in range(k + 1, n + 1)}
            for lvl in range(k + 1, r + 1):
                src[lvl] |= set(sig.get(lvl, ()))
            # the level-r slot of a realizing descriptor holds against the
            # recomposed partial stack s^r : ... : s^k
            pieces = spine(run.at(i).stack, n, k)
            partial = recompose(pieces[n - r :])
            partial_typing = stack_typing(partial, r, table)
            for rho_id in post_typing:
                if rho_id == NE:
                    continue
                rho = uni.desc(rho_id)
                if rho.state != q1 or rho.goal != goal_id:
                    continue
                if not all(
                    all(t in typ[lvl] for t in uni.psi_at(rho, lvl))
                    for lvl in range(k + 1, n + 1)
                    if lvl != r
                ):
                    continue
                if not all(t in partial_typing for t in uni.psi_at(rho, r)):
                    continue
                for lvl in range(k + 1, n + 1):
                    if lvl != r:
                        src[lvl] |= set(uni.psi_at(rho, lvl))
                for lam in uni.psi_at(rho, r):
                    if lam == NE:
                        continue
                    for d in _promotions_through(uni, lam, r, typ, k):
                        for lvl in range(k + 1, r + 1):
                            src[lvl] |= set(uni.psi_at(d, lvl))
            return (
                {lvl: frozenset(v) for lvl, v in src.items()},
                ProvenanceNode(3, (i, j)),
            )
        for m in range(i + 1, j):
            if is_k_upper(lrun, k, i, m) and is_k_upper(lrun, k, m, j):
                right, right_prov = rec(m, j, sig)
                left, left_prov = rec(i, m, right)
                return left, ProvenanceNode(4, (i, j), split=m, children=(left_prov, right_prov))
        raise ValueError(f"no decomposition case applies on [{i}..{j}]")

    sets, prov = rec(0, len(run), {i: frozenset(sigmas.get(i, ())) for i in range(k + 1, n + 1)})
    return SrcResult(k, sets, prov)


def check_origin(
    aut,
    lrun: Union[Run, LineageRun],
    k: int,
    sigmas: Mapping[int, Sequence[int]],
    table: Level0TypeTable,
    d: int,
    bound: int,
    values: Sequence[int] = (0, 1, 2, 3),
    candidates: Optional[Sequence[Run]] = None,
) -> CheckReport:
    """The origin transfer for one data value d.

    Part 1 (exact): d important in a final piece under the assumption
    sets implies d important in an initial piece under the src sets.
    Part 2 (bounded search): when d is important under src initially,
    some normalized k-upper run with matching read class, final topmost
    k-stack, and held assumptions reads d or keeps it important.
    """
    report = CheckReport("origin")
    lrun = lrun if isinstance(lrun, LineageRun) else instrument_lineage(lrun)
    run = lrun.run
    n = aut.level
    uni = table.universe
    if not is_normalized(lrun):
        report.errors.append("run is not normalized")
    if not is_k_upper(lrun, k):
        report.errors.append(f"run is not {k}-upper")
    if d == 0:
        report.errors.append("d must differ from the normalization value 0")
    init_topk = top_stack(run.at(0).stack, n, k)
    if d in _values_in(init_topk, k):
        report.errors.append(f"d={d} occurs in the initial topmost {k}-stack")
    if report.errors:
        return report

    src = compute_src(lrun, k, sigmas, table)
    init = type_of_stack(run.at(0).stack, k, table)
    final = type_of_stack(run.configs[-1].stack, k, table)
    report.checked += 1

    hit_final = any(
        d in final.typing(i).get(sid, ())
        for i in range(k + 1, n + 1)
        for sid in sigmas.get(i, ())
    )
    hit_init = any(
        d in init.typing(j).get(tid, ())
        for j in range(k + 1, n + 1)
        for tid in src.sets.get(j, ())
    )
    if hit_final and not hit_init:
        report.hard_failures.append(
            f"k={k} d={d}: important in a final piece but in no initial piece under src"
        )
        return report
    if hit_final:
        report.verified += 1

    if hit_init:
        # search for the transferred run from the run's own start
        if candidates is None:
            from .harness import EnumerationSpace, enumerate_runs, universe_for

            space = EnumerationSpace(
                aut,
                run.at(0),
                bound,
                universe_for(aut, run.at(0), values),
                normalized_only=True,
            )
            candidates = enumerate_runs(space)
        target_topk = top_stack(run.configs[-1].stack, n, k)
        phi_r = phi_of_run(table.monoid, run)
        witness = None
        for cand in candidates:
            lc = instrument_lineage(cand)
            if not is_k_upper(lc, k):
                continue
            if phi_of_run(table.monoid, cand) != phi_r:
                continue
            if cand.configs[-1].state != run.configs[-1].state:
                continue
            if top_stack(cand.configs[-1].stack, n, k) != target_topk:
                continue
            ct = type_of_stack(cand.configs[-1].stack, k, table)
            if not all(
                sid in ct.typing(i)
                for i in range(k + 1, n + 1)
                for sid in sigmas.get(i, ())
            ):
                continue
            reads = any(val == d for _, val in cand.read_word)
            keeps = any(
                d in ct.typing(i).get(sid, ())
                for i in range(k + 1, n + 1)
                for sid in sigmas.get(i, ())
            )
            if reads or keeps:
                witness = cand
                break
        if witness is not None:
            report.verified += 1
        else:
            report.unwitnessed.append(
                f"k={k} d={d}: important under src but no transferred run at bound {bound}"
            )
    return report


def _values_in(stack, level) -> set:
    if level == 0:
        return set() if stack.data is None else {stack.data}
    out = set()
    for child in stack:
        out |= _values_in(child, level - 1)
    return out


def check_idv_upper(
    aut,
    lrun: Union[Run, LineageRun],
    k: int,
    d: int,
    d_prime: int,
    table: Level0TypeTable,
    bound: int,
    values: Sequence[int] = (0, 1, 2, 3),
) -> CheckReport:
    """Indistinguishability transfer along a k-upper run.

    Hypotheses (violations are named, not counted as failures): the run
    is normalized and k-upper; within the bound it is the only
    normalized run from its start with its end state and read class;
    d and d' are nonzero, unread, absent from the initial topmost
    k-stack, and indistinguishable in every initial idv set.  Conclusion
    checked: both stay absent from the final topmost k-stack and remain
    indistinguishable in every final idv set.
    """
    report = CheckReport("idv-upper")
    lrun = lrun if isinstance(lrun, LineageRun) else instrument_lineage(lrun)
    run = lrun.run
    n = aut.level
    if not is_normalized(lrun):
        report.errors.append("run is not normalized")
    if not is_k_upper(lrun, k):
        report.errors.append(f"run is not {k}-upper")
    if 0 in (d, d_prime) or d == d_prime:
        report.errors.append("d and d' must be distinct nonzero values")
    reads = {val for _, val in run.read_word}
    if d in reads or d_prime in reads:
        report.errors.append("d and d' must not be read by the run")
    init_topk = top_stack(run.at(0).stack, n, k)
    if d in _values_in(init_topk, k) or d_prime in _values_in(init_topk, k):
        report.errors.append("d and d' must not occur in the initial topmost k-stack")
    if report.errors:
        return report

    init = type_of_stack(run.at(0).stack, k, table)
    for i in range(k + 1, n + 1):
        for sid, idv in init.typing(i).items():
            if (d in idv) != (d_prime in idv):
                report.errors.append(
                    f"hypothesis: d, d' distinguishable at level {i} descriptor {sid}"
                )
                return report

    # uniqueness hypothesis, by enumeration up to the bound
    from .harness import EnumerationSpace, enumerate_runs, universe_for

    phi_r = phi_of_run(table.monoid, run)
    space = EnumerationSpace(
        aut, run.at(0), bound, universe_for(aut, run.at(0), values), normalized_only=True
    )
    for cand in enumerate_runs(space):
        if (
            cand.configs[-1].state == run.configs[-1].state
            and phi_of_run(table.monoid, cand) == phi_r
            and (cand.labels, cand.transitions) != (run.labels, run.transitions)
        ):
            report.errors.append(
                "hypothesis: another normalized run with the same end state and read class"
            )
            return report
    report.notes.append(f"uniqueness assumed beyond bound {bound}")

    report.checked += 1
    final_topk = top_stack(run.configs[-1].stack, n, k)
    if d in _values_in(final_topk, k) or d_prime in _values_in(final_topk, k):
        report.hard_failures.append(
            f"k={k}: d={d} or d'={d_prime} appears in the final topmost k-stack"
        )
        return report
    final = type_of_stack(run.configs[-1].stack, k, table)
    for i in range(k + 1, n + 1):
        for sid, idv in final.typing(i).items():
            if (d in idv) != (d_prime in idv):
                report.hard_failures.append(
                    f"k={k}: d={d}, d'={d_prime} distinguishable at final level {i} "
                    f"descriptor {sid}"
                )
                return report
    report.verified += 1
    return report
