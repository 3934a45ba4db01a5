import pytest

from hopad.core import Step, empty_run, execute_word, extend_run, step
from hopad.harness import (
    CLASSIFICATION_EXAMPLE_GRID,
    excursion_config,
    excursion_machine,
    random_machine,
    seeded_configurations,
    single_pop_config,
    single_pop_machine,
    classification_example_run,
    u_fragment_corpus,
    EnumerationSpace,
    enumerate_runs,
)
from hopad.lineage import (
    classification_table,
    decompose_return,
    decompose_upper,
    instrument_lineage,
    is_k_return,
    is_k_upper,
    is_normalized,
    remark_k_return,
)


@pytest.fixture(scope="module")
def example_run():
    run = classification_example_run()
    return run, instrument_lineage(run)


def test_classification_grid_exact(example_run):
    run, lrun = example_run
    table = classification_table(lrun)
    for j, (u0, u1, r1, r2) in CLASSIFICATION_EXAMPLE_GRID.items():
        assert set(table.upper[(j, 0)]) == u0, f"0-upper at j={j}"
        assert set(table.upper[(j, 1)]) == u1, f"1-upper at j={j}"
        assert set(table.returns[(j, 1)]) == r1, f"1-return at j={j}"
        assert set(table.returns[(j, 2)]) == r2, f"2-return at j={j}"


def test_whole_example_run_is_not_a_1_return(example_run):
    _, lrun = example_run
    assert not is_k_return(lrun, 1)


def test_every_run_is_top_level_upper(example_run):
    run, lrun = example_run
    for i in range(len(run) + 1):
        for j in range(i, len(run) + 1):
            assert is_k_upper(lrun, 2, i, j)


def test_lineage_identity_across_copy_and_pop(example_run):
    run, lrun = example_run
    # the [c d] column untouched by the copy: same occurrence at j=0 and j=3
    n1 = lrun.snapshots[0].children[-1]
    n3 = lrun.snapshots[3].children[-1]
    assert n1.uid == n3.uid
    # the push at step 1 created a fresh duplicate linked to it
    dup = lrun.snapshots[1].children[-1]
    assert lrun.parent[dup.uid] == n1.uid
    assert lrun.created[dup.uid] == 1
    # fresh atoms inside the duplicate link to their sources
    for child, source in zip(dup.children, n1.children):
        assert lrun.parent[child.uid] == source.uid
    # the pop at step 3 destroys the duplicate: gone from the snapshot
    ids3 = {c.uid for c in lrun.snapshots[3].children}
    assert dup.uid not in ids3


def test_single_push_is_0_upper():
    aut = excursion_machine()
    cfg = excursion_config()
    res = step(aut, cfg, ("b", 0))  # push^1(h)
    assert isinstance(res, Step)
    run = extend_run(empty_run(aut, cfg), res)
    lrun = instrument_lineage(run)
    assert is_k_upper(lrun, 0)
    assert is_k_upper(lrun, 1)
    assert decompose_upper(run, 0).case == 2


def test_single_pop_is_a_return():
    aut = single_pop_machine()
    cfg = single_pop_config()
    res = step(aut, cfg, ("a", 5))
    run = extend_run(empty_run(aut, cfg), res)
    lrun = instrument_lineage(run)
    assert is_k_return(lrun, 1)
    assert decompose_return(run, 1).case == 1
    assert remark_k_return(lrun, 1)


def test_empty_runs_are_upper_not_returns(example_run):
    run, lrun = example_run
    for j in range(len(run) + 1):
        for k in (0, 1, 2):
            assert is_k_upper(lrun, k, j, j)
        for k in (1, 2):
            assert not is_k_return(lrun, k, j, j)


def test_upper_monotone_in_level(example_run):
    run, lrun = example_run
    for i in range(len(run) + 1):
        for j in range(i, len(run) + 1):
            for k in (0, 1):
                if is_k_upper(lrun, k, i, j):
                    assert is_k_upper(lrun, k + 1, i, j)


def test_returns_are_upper(example_run):
    run, lrun = example_run
    for i in range(len(run) + 1):
        for j in range(i, len(run) + 1):
            for k in (1, 2):
                if is_k_return(lrun, k, i, j):
                    assert is_k_upper(lrun, k, i, j)


def test_upper_closed_under_composition(example_run):
    run, lrun = example_run
    for i in range(len(run) + 1):
        for m in range(i, len(run) + 1):
            for j in range(m, len(run) + 1):
                for k in (0, 1, 2):
                    if is_k_upper(lrun, k, i, m) and is_k_upper(lrun, k, m, j):
                        assert is_k_upper(lrun, k, i, j)


def test_decomposition_examples(example_run):
    run, lrun = example_run
    # pop^1 then pop^2: case 2 over a case-1 leaf
    tree = decompose_return(run, 2, 1, 3)
    assert tree.case == 2
    assert tree.children[0].case == 1
    # push^2 then a 2-return: upper case 3
    tree = decompose_upper(run, 1, 0, 3)
    assert tree.case == 3
    # no derivation for the whole run as a 1-return
    assert decompose_return(run, 1, 0, 6) is None
    # all-level<=k segment: case-1 leaf
    assert decompose_upper(run, 1, 3, 5).case == 1


def test_is_normalized():
    aut = excursion_machine()
    cfg = excursion_config()
    run = empty_run(aut, cfg)
    assert is_normalized(run)
    push0 = extend_run(run, step(aut, cfg, ("c", 0)))
    assert is_normalized(push0)
    push7 = extend_run(run, step(aut, cfg, ("c", 7)))
    assert not is_normalized(push7)
    pop9 = extend_run(run, step(aut, cfg, ("b", 0)))
    pop9 = extend_run(pop9, step(aut, pop9.configs[-1], ("a", 0)))
    assert is_normalized(pop9)


def test_classifiers_equal_decompositions_on_corpus():
    corpora = [
        (single_pop_machine(), [single_pop_config()]),
        (excursion_machine(), [excursion_config()]),
    ]
    frag, cfgs = u_fragment_corpus()
    corpora.append((frag, cfgs))
    for i in range(6):
        aut = random_machine(99, i)
        corpora.append((aut, seeded_configurations(aut, 3, (0, 1), 3)))
    from hopad.harness import universe_for

    for aut, cfgs in corpora:
        for cfg in cfgs:
            space = EnumerationSpace(aut, cfg, 5, universe_for(aut, cfg, (0, 1)))
            for run in enumerate_runs(space):
                lrun = instrument_lineage(run)
                for k in range(0, aut.level + 1):
                    assert is_k_upper(lrun, k) == (
                        decompose_upper(run, k) is not None
                    ), (run.operations(), k)
                for r in range(1, aut.level + 1):
                    lhs = is_k_return(lrun, r)
                    assert lhs == (decompose_return(run, r) is not None), (
                        run.operations(),
                        r,
                    )
                    assert lhs == remark_k_return(lrun, r)


def test_collapse_lineage_on_recognizer_run():
    from hopad.ulang import build_u_recognizer

    aut = build_u_recognizer()
    word = (("[", 1), ("[", 2), ("$", 0), ("]", 2), ("]", 1))
    out = execute_word(aut, word)
    assert out.accepted
    lrun = instrument_lineage(out.run)
    # the collapse step destroys ids and creates none
    idx = next(
        i for i, t in enumerate(out.run.transitions, start=1) if t.op.kind == "collapse"
    )
    before = {c.uid for c in lrun.snapshots[idx - 1].children}
    after = {c.uid for c in lrun.snapshots[idx].children}
    assert after < before
    assert max(lrun.created.values()) <= len(out.run)
    # classification still works: the collapse run is 2-upper everywhere
    table = classification_table(lrun)
    for j in range(len(out.run) + 1):
        assert set(table.upper[(j, 2)]) == set(range(j + 1))
