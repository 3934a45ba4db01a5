"""Run descriptors, composers, the level-0 saturation fixpoint, and
compositional stack typing with important-data-value tracking.

A run descriptor of level k summarizes, for a k-stack, how a return can
start from a configuration having that k-stack on top: per-level
assumption sets on the surrounding stack pieces, a start state, and a
goal (read-word class in a finite monoid, return level r, assumption
sets promised for the surviving pieces, end state).  Descriptors and
goals are interned per :class:`Universe`: structural equality implies
identical id, and assumption sets are stored as sorted id tuples.

The saturation rules close the level-0 table under four constructions:
a pop step alone (1a), a pop step chained with a continuation descriptor
of the exposed stack (1b), and a push step whose pushed atom's
descriptor is discharged through a composer against descriptors of the
same entry, without (2a) or with (2b) a same-level continuation.  The
`idv` flag rides along: it marks descriptors whose described runs can
actually use the atom's own data value.

Free assumption-set positions (rule 1a's slots, which must mirror the
goal's promised sets) are instantiated from a per-level slot universe,
default {{}, {ne}}.  For automata of level <= 2 this is complete: no
descriptor can live at level n, so the level-n universe is exactly
{ne} and every subset of it is covered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import Atom, Automaton, Configuration, Run, Stack, spine
from .lineage import LineageRun, instrument_lineage, is_k_return
from .monoid import FiniteMonoid, phi_of_run

NE = 0  # interned id of the "nonempty" marker


@dataclass(frozen=True)
class Goal:
    m: str
    r: int
    sigmas: tuple[tuple[int, ...], ...]  # levels n..r+1
    q: str


@dataclass(frozen=True)
class RunDescriptor:
    level: int
    psis: tuple[tuple[int, ...], ...]  # levels n..level+1
    state: str
    goal: int


class ResourceCapExceeded(RuntimeError):
    def __init__(self, message: str, stats: "SaturationStats"):
        super().__init__(message)
        self.stats = stats


@dataclass
class SaturationStats:
    passes: int = 0
    descriptors: int = 0
    goals: int = 0
    table_pairs: int = 0


class Universe:
    """Interning pool for the descriptors and goals of one saturation."""

    def __init__(self, level: int, cap: Optional[int] = None):
        self.level = level
        self.cap = cap
        self.descriptors: list[Optional[RunDescriptor]] = [None]  # id 0 = ne
        self._desc_ids: dict[RunDescriptor, int] = {}
        self.goals: list[Goal] = []
        self._goal_ids: dict[Goal, int] = {}

    def desc(self, did: int) -> RunDescriptor:
        d = self.descriptors[did]
        if d is None:
            raise ValueError("the ne marker has no descriptor structure")
        return d

    def goal(self, gid: int) -> Goal:
        return self.goals[gid]

    def intern_goal(
        self, m: str, r: int, sigmas: Iterable[Iterable[int]], q: str
    ) -> int:
        sigmas = tuple(tuple(sorted(set(s))) for s in sigmas)
        if not 1 <= r <= self.level:
            raise ValueError(f"return level {r} out of range 1..{self.level}")
        if len(sigmas) != self.level - r:
            raise ValueError(f"goal at level {r} needs {self.level - r} result sets")
        for idx, s in enumerate(sigmas):
            self._check_members(s, self.level - idx)
        g = Goal(m, r, sigmas, q)
        gid = self._goal_ids.get(g)
        if gid is None:
            gid = len(self.goals)
            self.goals.append(g)
            self._goal_ids[g] = gid
        return gid

    def intern_desc(
        self, level: int, psis: Iterable[Iterable[int]], state: str, goal_id: int
    ) -> int:
        psis = tuple(tuple(sorted(set(p))) for p in psis)
        if len(psis) != self.level - level:
            raise ValueError(
                f"descriptor at level {level} needs {self.level - level} assumption sets"
            )
        for idx, p in enumerate(psis):
            self._check_members(p, self.level - idx)
        if self.goal(goal_id).r < level + 1:
            raise ValueError("goal return level must exceed the descriptor level")
        d = RunDescriptor(level, psis, state, goal_id)
        did = self._desc_ids.get(d)
        if did is None:
            if self.cap is not None and len(self.descriptors) > self.cap:
                raise ResourceCapExceeded(
                    f"descriptor cap {self.cap} exceeded",
                    SaturationStats(descriptors=len(self.descriptors) - 1, goals=len(self.goals)),
                )
            self.descriptors.append(d)
            did = len(self.descriptors) - 1
            self._desc_ids[d] = did
        return did

    def _check_members(self, ids: Iterable[int], level: int) -> None:
        for i in ids:
            if i != NE and self.desc(i).level != level:
                raise ValueError(f"id {i} is not a level-{level} descriptor")

    def psi_at(self, d: RunDescriptor, i: int) -> tuple[int, ...]:
        return d.psis[self.level - i]

    def sigma_at(self, g: Goal, i: int) -> tuple[int, ...]:
        return g.sigmas[self.level - i]

    def drop(self, did: int, k: int) -> Optional[int]:
        """The level-k descriptor with the same high slots, state and goal,
        or None when the goal's return level forbids it."""
        d = self.desc(did)
        if d.level >= k:
            raise ValueError(f"cannot drop a level-{d.level} descriptor to level {k}")
        if self.goal(d.goal).r < k + 1:
            return None
        return self.intern_desc(k, d.psis[: self.level - k], d.state, d.goal)

    def struct_key(self, did: int):
        """Order-independent structural form, for cross-run comparisons."""
        if did == NE:
            return "ne"
        d = self.desc(did)
        g = self.goal(d.goal)
        return (
            d.level,
            tuple(
                tuple(sorted((self.struct_key(x) for x in p), key=repr)) for p in d.psis
            ),
            d.state,
            (
                g.m,
                g.r,
                tuple(
                    tuple(sorted((self.struct_key(x) for x in s), key=repr))
                    for s in g.sigmas
                ),
                g.q,
            ),
        )

    def render_goal(self, gid: int) -> str:
        g = self.goal(gid)
        parts = [f"(goal {g.m} {g.r}"]
        for idx, s in enumerate(g.sigmas):
            parts.append(f"(sigma {self.level - idx}{_render_ids(s)})")
        parts.append(f"{g.q})")
        return " ".join(parts)

    def render(self, did: int) -> str:
        if did == NE:
            return "(ne)"
        d = self.desc(did)
        parts = [f"(desc"]
        for idx, p in enumerate(d.psis):
            parts.append(f"(psi {self.level - idx}{_render_ids(p)})")
        parts.append(d.state)
        parts.append(f"{self.render_goal(d.goal)})")
        return " ".join(parts)


def _render_ids(ids: Sequence[int]) -> str:
    return "".join(f" {'ne' if i == NE else i}" for i in ids)


@dataclass
class Level0TypeTable:
    """Fixpoint map (stack symbol, has-data) -> {descriptor id: idv flag}."""

    automaton: Automaton
    monoid: FiniteMonoid
    universe: Universe
    entries: dict[tuple[str, bool], dict[int, bool]]
    stats: SaturationStats
    _typing_cache: dict = field(default_factory=dict, repr=False)


def _slot_products(uni: Universe, levels: Sequence[int], slot_sets) -> Iterable[tuple]:
    pools = [tuple(slot_sets.get(i, ((),))) for i in levels]
    return itertools.product(*pools)


def default_slot_sets(level: int) -> dict[int, tuple[tuple[int, ...], ...]]:
    return {i: ((), (NE,)) for i in range(1, level + 1)}


def saturate_level0(
    aut: Automaton,
    monoid: FiniteMonoid,
    slot_sets: Optional[Mapping[int, Sequence[tuple[int, ...]]]] = None,
    max_descriptors: int = 50_000,
    transition_order: Optional[Sequence] = None,
) -> Level0TypeTable:
    """Least fixpoint of the four level-0 rules, by chaotic iteration.

    `transition_order` only permutes rule application order; the result
    is order-independent (asserted by the shuffled-order test).
    """
    for t in aut.transitions:
        if t.op.kind == "collapse":
            raise ValueError("the type system covers collapse-free automata only")
    n = aut.level
    uni = Universe(n, cap=max_descriptors)
    if slot_sets is None:
        slot_sets = default_slot_sets(n)
    entries: dict[tuple[str, bool], dict[int, bool]] = {
        (sym, hd): {} for sym in sorted(aut.stack_alphabet) for hd in (False, True)
    }
    stats = SaturationStats()
    changed = True

    def phi(letter: Optional[str]) -> str:
        return monoid.identity if letter is None else monoid.letter_map[letter]

    def add(key: tuple[str, bool], did: int, flag: bool) -> None:
        nonlocal changed
        cur = entries[key].get(did)
        if cur is None:
            entries[key][did] = flag
            changed = True
        elif flag and not cur:
            entries[key][did] = True
            changed = True

    def targets(tr) -> list[tuple[tuple[str, bool], bool]]:
        # rule 1's data guard: a letter-reading pop needs a stored value
        if tr.letter is None:
            return [((tr.symbol, False), False), ((tr.symbol, True), False)]
        return [((tr.symbol, True), True)]

    order = tuple(transition_order) if transition_order is not None else aut.transitions
    pops = [t for t in order if t.op.kind == "pop"]
    pushes = [t for t in order if t.op.kind == "push"]

    try:
        while changed:
            changed = False
            stats.passes += 1
            # rule 1a: the pop step itself is a k-return
            for tr in pops:
                k = tr.op.level
                for high in _slot_products(uni, range(n, k, -1), slot_sets):
                    gid = uni.intern_goal(phi(tr.letter), k, high, tr.target)
                    psis = high + ((NE,),) + ((),) * (k - 1)
                    did = uni.intern_desc(0, psis, tr.state, gid)
                    for key, flag in targets(tr):
                        add(key, did, flag)
            # rule 1b: pop chained with a continuation descriptor of the
            # exposed k-stack (instantiated from level-k drops of the table)
            seen_dids = sorted({d for entry in entries.values() for d in entry})
            for tr in pops:
                k = tr.op.level
                for sid in seen_dids:
                    s0 = uni.desc(sid)
                    if s0.state != tr.target:
                        continue
                    tau_id = uni.drop(sid, k)
                    if tau_id is None:
                        continue
                    tau = uni.desc(tau_id)
                    g = uni.goal(tau.goal)
                    gid = uni.intern_goal(
                        monoid.mul(phi(tr.letter), g.m), g.r, g.sigmas, g.q
                    )
                    psis = tau.psis + ((tau_id,),) + ((),) * (k - 1)
                    did = uni.intern_desc(0, psis, tr.state, gid)
                    for key, flag in targets(tr):
                        add(key, did, flag)
            # rules 2a/2b: push discharged through a composer
            for tr in pushes:
                k = tr.op.level
                pushed_key = (tr.op.symbol, tr.letter is not None)
                for hd in (False, True):
                    src_key = (tr.symbol, hd)
                    src_entry = entries[src_key]
                    if not entries[pushed_key]:
                        continue
                    drop_index: dict[int, list[int]] = {}
                    chi_index: dict[tuple, list[int]] = {}
                    for did in src_entry:
                        d = uni.desc(did)
                        dr = uni.drop(did, k)
                        if dr is not None:
                            drop_index.setdefault(dr, []).append(did)
                        if uni.goal(d.goal).r <= k:
                            chi_index.setdefault(
                                (d.state, d.psis[: n - k]), []
                            ).append(did)
                    for tau_id in list(entries[pushed_key]):
                        tau = uni.desc(tau_id)
                        if tau.state != tr.target:
                            continue  # the continuation starts where the push lands
                        g1 = uni.goal(tau.goal)
                        if g1.r != k:
                            gid = uni.intern_goal(
                                monoid.mul(phi(tr.letter), g1.m),
                                g1.r,
                                g1.sigmas,
                                g1.q,
                            )
                            chis: list[Optional[int]] = [None]
                        else:
                            chis = list(chi_index.get((g1.q, g1.sigmas), ()))
                            if not chis:
                                continue
                        for phi_by_level, used_flag in _discharges(
                            uni, uni.psi_at(tau, k), src_entry, drop_index, k
                        ):
                            for chi_id in chis:
                                if chi_id is None:
                                    psis = _merge_psis(uni, n, k, tau, phi_by_level, None)
                                    add(
                                        src_key,
                                        uni.intern_desc(0, psis, tr.state, gid),
                                        used_flag,
                                    )
                                else:
                                    chi = uni.desc(chi_id)
                                    g2 = uni.goal(chi.goal)
                                    psis = _merge_psis(uni, n, k, tau, phi_by_level, chi)
                                    gid2 = uni.intern_goal(
                                        monoid.mul(
                                            monoid.mul(phi(tr.letter), g1.m), g2.m
                                        ),
                                        g2.r,
                                        g2.sigmas,
                                        g2.q,
                                    )
                                    add(
                                        src_key,
                                        uni.intern_desc(0, psis, tr.state, gid2),
                                        used_flag or src_entry[chi_id],
                                    )
    except ResourceCapExceeded as exc:
        raise ResourceCapExceeded(str(exc), _snap_stats(stats, uni, entries)) from None
    return Level0TypeTable(aut, monoid, uni, entries, _snap_stats(stats, uni, entries))


def _snap_stats(stats, uni, entries) -> SaturationStats:
    stats.descriptors = len(uni.descriptors) - 1
    stats.goals = len(uni.goals)
    stats.table_pairs = sum(len(e) for e in entries.values())
    return stats


def _merge_psis(uni, n, k, tau, phi_by_level, chi) -> tuple:
    psis = []
    for i in range(n, 0, -1):
        if i > k:
            psis.append(uni.psi_at(tau, i))
        else:
            merged = set(phi_by_level.get(i, ()))
            if i < k:
                merged |= set(uni.psi_at(tau, i))
            if chi is not None:
                merged |= set(uni.psi_at(chi, i))
            psis.append(tuple(sorted(merged)))
    return tuple(psis)


def _discharges(uni, psi_k, flags, drop_index, k, state_cap=50_000):
    """Composers for the level-k slot against level-0 descriptors.

    ne members are dischargeable for free; every other member needs a
    level-0 descriptor of the entry whose level-k drop is it.  A choice
    only reaches the produced descriptor through the union of the chosen
    contributions (levels 1..k) and the disjunction of their idv flags,
    so choices are deduplicated on exactly that, member by member.

    Yields (per-level contribution sets for levels 1..k, flag).
    """
    empty = tuple(() for _ in range(k))
    states: dict[tuple, bool] = {empty: False}
    for member in psi_k:
        if member == NE:
            continue
        matches = drop_index.get(member, ())
        if not matches:
            return
        contribs = set()
        for did in matches:
            d = uni.desc(did)
            contribs.add(
                (tuple(uni.psi_at(d, i) for i in range(1, k + 1)), flags[did])
            )
        nxt: dict[tuple, bool] = {}
        for vec, flag in states.items():
            for cvec, cflag in contribs:
                merged = tuple(
                    tuple(sorted(set(v) | set(c))) for v, c in zip(vec, cvec)
                )
                nf = flag or cflag
                nxt[merged] = nxt.get(merged, False) or nf
        if len(nxt) > state_cap:
            raise ResourceCapExceeded(
                f"composer state space exceeds {state_cap}", SaturationStats()
            )
        states = nxt
    for vec, flag in states.items():
        yield {i: vec[i - 1] for i in range(1, k + 1)}, flag


def check_composer(
    uni: Universe,
    k: int,
    l: int,
    phis: Sequence[Iterable[int]],
    psi_k: Iterable[int],
) -> Optional[dict[int, int]]:
    """Decide whether (phis; psi_k) is a composer for levels k down to l.

    `phis` lists the candidate sets for levels k, k-1, ..., l.  Returns
    the witness assignment (each non-ne member of psi_k to its chosen
    level-l descriptor) or None.  Rule 2 discharges ne for free, rule 1
    requires each member to be the level-k drop of its chosen level-l
    element, and rule 3 forces the per-level exact unions.
    """
    phis = [frozenset(p) for p in phis]
    if len(phis) != k - l + 1:
        raise ValueError(f"need sets for levels {k}..{l}")
    members = tuple(sorted(set(psi_k)))
    options = []
    for member in members:
        if member == NE:
            options.append((None,))
            continue
        cands = tuple(
            c
            for c in phis[-1]
            if c != NE and uni.desc(c).level == l and uni.drop(c, k) == member
        )
        if not cands:
            return None
        options.append(cands)
    for combo in itertools.product(*options):
        chosen = {m: c for m, c in zip(members, combo) if c is not None}
        if frozenset(chosen.values()) != phis[-1]:
            continue
        ok = True
        for idx, i in enumerate(range(k, l, -1)):
            union = set()
            for c in chosen.values():
                union |= set(uni.psi_at(uni.desc(c), i))
            if frozenset(union) != phis[idx]:
                ok = False
                break
        if ok:
            return chosen
    return None


# ---------------------------------------------------------------------------
# compositional stack typing

Typing = dict  # descriptor id -> frozenset of important data values


def atom_typing(atom: Atom, table: Level0TypeTable) -> Typing:
    entry = table.entries.get((atom.symbol, atom.data is not None), {})
    own = frozenset((atom.data,)) if atom.data is not None else frozenset()
    return {
        did: (own if flag else frozenset()) for did, flag in entry.items()
    }


def combine_types(rest: Typing, top: Typing, k: int, table: Level0TypeTable) -> Typing:
    """Typing of t^k : t^(k-1) from the typings of the two parts.

    A descriptor of the top part promotes when its level-k assumption
    set holds in the rest; ne is always present (the result is
    nonempty).  Important values of a promoted descriptor are those of
    every witness plus those of the assumption descriptors it consumed.
    """
    uni = table.universe
    out: dict[int, set] = {NE: set()}
    for did, idv in top.items():
        if did == NE:
            continue
        d = uni.desc(did)
        if uni.goal(d.goal).r < k + 1:
            continue  # the descriptor's goal retires at its return level
        need = uni.psi_at(d, k)
        if all(t in rest for t in need):
            pid = uni.intern_desc(k, d.psis[:-1], d.state, d.goal)
            acc = out.setdefault(pid, set())
            acc |= idv
            for t in need:
                acc |= rest[t]
    return {did: frozenset(v) for did, v in out.items()}


def stack_typing(stack: Stack, level: int, table: Level0TypeTable) -> Typing:
    """type() and idv() of a concrete stack, bottom-up; empty stacks have
    empty type, nonempty ones always contain ne."""
    key = (stack, level)
    cached = table._typing_cache.get(key)
    if cached is not None:
        return cached
    if level == 0:
        result = atom_typing(stack, table)
    else:
        acc: Typing = {}
        for elem in stack:
            acc = combine_types(acc, stack_typing(elem, level - 1, table), level, table)
        result = acc
    table._typing_cache[key] = result
    return result


@dataclass(frozen=True)
class StackTyping:
    """Typings of the spine pieces s^n .. s^k of a stack."""

    level: int
    k: int
    pieces: tuple
    typings: tuple

    def piece(self, i: int):
        return self.pieces[self.level - i]

    def typing(self, i: int) -> Typing:
        return self.typings[self.level - i]


def type_of_stack(stack: Stack, k: int, table: Level0TypeTable) -> StackTyping:
    n = table.automaton.level
    pieces = spine(stack, n, k)
    typings = tuple(
        stack_typing(piece, lvl, table)
        for piece, lvl in zip(pieces, range(n, k - 1, -1))
    )
    return StackTyping(n, k, pieces, typings)


# ---------------------------------------------------------------------------
# agreement and the two soundness checks


def agrees(
    run: Union[Run, LineageRun], goal: Union[int, Goal], table: Level0TypeTable
) -> bool:
    """phi matches, the run is an r-return into the right state, and the
    final spine pieces above r carry the promised descriptor sets."""
    lrun = run if isinstance(run, LineageRun) else instrument_lineage(run)
    uni = table.universe
    g = uni.goal(goal) if isinstance(goal, int) else goal
    if phi_of_run(table.monoid, lrun.run) != g.m:
        return False
    if lrun.run.configs[-1].state != g.q:
        return False
    if not is_k_return(lrun, g.r):
        return False
    n = table.automaton.level
    final = type_of_stack(lrun.run.configs[-1].stack, g.r, table)
    for i in range(g.r + 1, n + 1):
        typing = final.typing(i)
        if not all(t in typing for t in uni.sigma_at(g, i)):
            return False
    return True


@dataclass
class CheckReport:
    name: str
    hard_failures: list = field(default_factory=list)
    unwitnessed: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    verified: int = 0
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.hard_failures and not self.errors

    def summary(self) -> str:
        return (
            f"{self.name}: checked={self.checked} verified={self.verified} "
            f"hard={len(self.hard_failures)} soft={len(self.unwitnessed)} "
            f"errors={len(self.errors)}"
        )


def goal_space(table: Level0TypeTable) -> list[int]:
    """Goals the soundness checks quantify over: every goal materialized
    during saturation plus all goals assembled from {{}, {ne}} and
    singleton drops per level (complete for levels <= 2)."""
    uni = table.universe
    n = table.automaton.level
    out = {d.goal for d in uni.descriptors[1:] if d is not None}
    seen = sorted({did for entry in table.entries.values() for did in entry})
    level_opts: dict[int, list] = {}
    for i in range(1, n + 1):
        opts = {(), (NE,)}
        for did in seen:
            dropped = uni.drop(did, i) if uni.desc(did).level < i else None
            if dropped is not None:
                opts.add((dropped,))
        level_opts[i] = sorted(opts)
    for r in range(1, n + 1):
        for m in table.monoid.carrier:
            for q in sorted(table.automaton.states):
                for vec in itertools.product(
                    *(level_opts[i] for i in range(n, r, -1))
                ):
                    out.add(uni.intern_goal(m, r, vec, q))
    return sorted(out)


def find_witness(
    table: Level0TypeTable,
    config: Configuration,
    k: int,
    goal_id: int,
    d: Optional[int] = None,
) -> Optional[int]:
    """A descriptor of type(s^k) matching the configuration's state and
    the goal, with all assumption sets held by the spine pieces; when a
    data value `d` is given, it must additionally be important under the
    descriptor or one of its assumption descriptors."""
    uni = table.universe
    n = table.automaton.level
    st = type_of_stack(config.stack, k, table)
    for did, idv in st.typing(k).items():
        if did == NE:
            continue
        desc = uni.desc(did)
        if desc.state != config.state or desc.goal != goal_id:
            continue
        ok = True
        for i in range(k + 1, n + 1):
            typing_i = st.typing(i)
            if not all(t in typing_i for t in uni.psi_at(desc, i)):
                ok = False
                break
        if not ok:
            continue
        if d is None:
            return did
        if d in idv:
            return did
        for i in range(k + 1, n + 1):
            typing_i = st.typing(i)
            for t in uni.psi_at(desc, i):
                if d in typing_i.get(t, ()):
                    return did
    return None


def _prepared_runs(aut, config, table, bound, values, normalized_only):
    from .harness import EnumerationSpace, enumerate_runs, universe_for

    space = EnumerationSpace(
        aut, config, bound, universe_for(aut, config, values), normalized_only
    )
    prepared = []
    n = aut.level
    for run in enumerate_runs(space):
        lrun = instrument_lineage(run)
        final = run.configs[-1]
        info = {
            "run": run,
            "lrun": lrun,
            "phi": phi_of_run(table.monoid, run),
            "state": final.state,
            "returns": {r: is_k_return(lrun, r) for r in range(1, n + 1)},
            "final_typing": {},
            "reads": frozenset(d for a, d in run.read_word),
        }
        for r in range(1, n + 1):
            if info["returns"][r]:
                info["final_typing"][r] = type_of_stack(final.stack, r, table)
        prepared.append(info)
    return prepared


def _run_agrees(info, g, uni, n) -> bool:
    if info["phi"] != g.m or info["state"] != g.q or not info["returns"][g.r]:
        return False
    st = info["final_typing"][g.r]
    for i in range(g.r + 1, n + 1):
        typing = st.typing(i)
        if not all(t in typing for t in uni.sigma_at(g, i)):
            return False
    return True


def _describe_run(run: Run) -> str:
    ops = ",".join(str(op) for op in run.operations())
    word = " ".join(
        f"{a}@{d}" for a, d in run.read_word
    )
    return f"len={len(run)} ops=[{ops}] word=[{word}]"


def check_run2type(
    aut: Automaton,
    config: Configuration,
    table: Level0TypeTable,
    bound: int,
    values: Sequence[int] = (0, 1, 2, 3),
) -> CheckReport:
    """Both directions of the run/descriptor correspondence at a bound.

    1=>2 (hard): every enumerated run agreeing with a goal must be
    witnessed by a matching descriptor with held assumption sets.
    2=>1 (soft): every witnessed (goal, level) pair should exhibit an
    agreeing run within the bound; misses are reported as unwitnessed.
    """
    report = CheckReport("run2type")
    uni = table.universe
    n = aut.level
    prepared = _prepared_runs(aut, config, table, bound, values, False)
    for gid in goal_space(table):
        g = uni.goal(gid)
        agreeing = [info for info in prepared if _run_agrees(info, g, uni, n)]
        for k in range(0, g.r):
            report.checked += 1
            witness = find_witness(table, config, k, gid)
            if agreeing and witness is None:
                report.hard_failures.append(
                    f"k={k} goal={uni.render_goal(gid)} has an agreeing run "
                    f"({_describe_run(agreeing[0]['run'])}) but no witnessing descriptor"
                )
            elif witness is not None and not agreeing:
                report.unwitnessed.append(
                    f"k={k} goal={uni.render_goal(gid)} witnessed by descriptor {witness} "
                    f"but no agreeing run at bound {bound}"
                )
            elif witness is not None and agreeing:
                report.verified += 1
    return report


def check_idv(
    aut: Automaton,
    config: Configuration,
    table: Level0TypeTable,
    bound: int,
    d: int,
    values: Sequence[int] = (0, 1, 2, 3),
) -> CheckReport:
    """The important-data-value correspondence for one value d != 0,
    over normalized enumerated runs."""
    report = CheckReport("idv")
    if d == 0:
        report.errors.append("d must differ from the normalization value 0")
        return report
    uni = table.universe
    n = aut.level
    prepared = _prepared_runs(aut, config, table, bound, values, True)
    for gid in goal_space(table):
        g = uni.goal(gid)
        hits = []
        for info in prepared:
            if not _run_agrees(info, g, uni, n):
                continue
            used = d in info["reads"]
            if not used:
                st = info["final_typing"][g.r]
                for i in range(g.r + 1, n + 1):
                    typing = st.typing(i)
                    if any(d in typing.get(t, ()) for t in uni.sigma_at(g, i)):
                        used = True
                        break
            if used:
                hits.append(info)
        for k in range(0, g.r):
            report.checked += 1
            witness = find_witness(table, config, k, gid, d=d)
            if hits and witness is None:
                report.hard_failures.append(
                    f"k={k} d={d} goal={uni.render_goal(gid)} used by "
                    f"{_describe_run(hits[0]['run'])} but no descriptor carries it"
                )
            elif witness is not None and not hits:
                report.unwitnessed.append(
                    f"k={k} d={d} goal={uni.render_goal(gid)} carried by descriptor "
                    f"{witness} but no agreeing normalized run uses it at bound {bound}"
                )
            elif witness is not None and hits:
                report.verified += 1
    return report
