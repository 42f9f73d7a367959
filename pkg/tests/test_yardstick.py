import pytest
from hypothesis import given
from hypothesis import strategies as st

from svasreach.corpus import counter_programs
from svasreach.counterprog import bounded_halting, halts, parse_cp
from svasreach.execution import (
    Reachable,
    SearchLimits,
    Unreachable,
    accepting_tallies,
    count_events,
    run_policy,
    search_reach,
)
from svasreach.svas import Dec, Inc, parse_svas, serialize_svas, validate
from svasreach.yardstick import (
    LevelTooSmall,
    PairInvariant,
    TooLarge,
    compile_program,
    complement,
    emit_dec_harness,
    emit_ztest_harness,
    tetration,
)


def tower(b, k):
    return 1 if k == 0 else b ** tower(b, k - 1)


def test_tetration_examples():
    assert tetration(2, 0).value == 1
    assert tetration(2, 1).value == 2
    assert tetration(2, 3).value == 16
    assert tetration(2, 4).value == 65536
    assert int(tetration(3, 2)) == 27


@given(st.integers(2, 4), st.integers(0, 3))
def test_tetration_matches_recursion(b, k):
    assert tetration(b, k).value == tower(b, k)


def test_tetration_budget():
    big = tetration(2, 5).value
    assert big.bit_length() == 65537
    with pytest.raises(TooLarge):
        tetration(2, 6)
    with pytest.raises(ValueError):
        tetration(1, 2)


def test_level_checks():
    with pytest.raises(LevelTooSmall):
        emit_dec_harness(0)
    with pytest.raises(LevelTooSmall):
        compile_program(parse_cp("counters:\nhalt"), 0)
    with pytest.raises(ValueError):
        emit_ztest_harness(1, 3)


def test_emitted_programs_are_valid():
    units = [emit_dec_harness(k) for k in (1, 2, 3)]
    units += [emit_ztest_harness(2, 1)]
    units += [compile_program(p, n) for p in counter_programs().values() for n in (1, 3)]
    for u in units:
        assert validate(u.program) == []
        assert u.annotations.missing(u.program) == []
        assert len(u.sourcemap) == len(u.program)
        q = parse_svas(serialize_svas(u.program))
        assert q.same_structure(u.program)


def test_translation_of_increment():
    cp = parse_cp("counters: x\ninc x\ndec x\nhalt")
    u = compile_program(cp, 1)
    body0 = sorted(i for i, (_, src) in enumerate(u.sourcemap) if src == 0)
    body1 = sorted(i for i, (_, src) in enumerate(u.sourcemap) if src == 1)
    assert [u.program.commands[i] for i in body0] == [Inc("x"), Dec("x'")]
    assert [u.program.commands[i] for i in body1] == [Dec("x"), Inc("x'")]
    assert complement("x") == "x'"


def test_sourcemap_text():
    u = emit_ztest_harness(1, 0)
    lines = u.sourcemap_text().splitlines()
    assert len(lines) == len(u.program)
    assert lines[0].split()[0] == "0"
    assert any(line.split()[1].startswith("Dec_1") for line in lines)
    cu = compile_program(parse_cp("counters: x\ninc x\nhalt"), 1)
    tagged = [line for line in cu.sourcemap_text().splitlines() if len(line.split()) == 3]
    assert tagged and all(line.split()[2] in ("0", "1") for line in tagged)


def test_levels():
    u = emit_dec_harness(3)
    assert u.top == 3
    assert u.levelmap[1].digits is not None and u.levelmap[3].digits is None
    assert u.level_of("s.2") == 2
    assert u.body(1) and u.body(2) and u.body(3)


@pytest.mark.parametrize("k, steps", [(1, 30), (2, 732), (3, 28202)])
def test_dec_harness_honest(k, steps):
    u = emit_dec_harness(k)
    inv = PairInvariant(u)
    t = run_policy(u.program, u.annotations, 100_000, observe=inv)
    assert t.accepted and t.length == steps
    body = u.body(k)
    s = u.levelmap[k].scratch[0]
    in_body = sum(1 for idx, cmd, _ in t.steps if idx in body and cmd == Dec(s))
    assert in_body == tetration(2, k).value
    assert count_events(t, s)[1] == tetration(2, k).value
    assert inv.violations == [] and inv.checked > 0


def test_dec_harness_exhaustive_level_one():
    u = emit_dec_harness(1)
    s = u.levelmap[1].scratch[0]
    ex = accepting_tallies(u.program, s, u.body(1), SearchLimits(max_counter=3))
    assert ex.closed and ex.tallies == {2}


def test_ztest_restores_pair():
    u = emit_ztest_harness(2, 0)
    drain = min(u.indices("epilogue"))
    seen = []

    def watch(conf):
        if conf.pc == drain:
            seen.append((conf.value(u.program, "x"), conf.value(u.program, "x'")))

    t = run_policy(u.program, u.annotations, 100_000, observe=watch)
    assert t.accepted
    assert seen == [(0, 4)]
    assert isinstance(search_reach(u.program, SearchLimits(max_counter=5)), Reachable)


def test_ztest_level_one():
    assert isinstance(search_reach(emit_ztest_harness(1, 0).program,
                                   SearchLimits(max_counter=3)), Reachable)
    assert isinstance(search_reach(emit_ztest_harness(1, 1).program,
                                   SearchLimits(max_counter=3)), Unreachable)
    assert isinstance(search_reach(emit_ztest_harness(1, 2).program,
                                   SearchLimits(max_counter=3)), Unreachable)


def test_invariant_catches_tampering():
    u = emit_dec_harness(1)
    inv = PairInvariant(u)
    t = run_policy(u.program, u.annotations, 1000)
    # first configuration after level 1 is initialised
    conf = next(c for _, _, c in t.steps if inv.phase[c.pc] > 1 and c.pc not in u.midstep)
    inv(conf)
    assert inv.violations == [] and inv.checked
    vals = list(conf.counters)
    vals[u.program.counter_index["s.1"]] += 1
    inv(conf._replace(counters=tuple(vals)))
    assert [names for _, names, _ in inv.violations] == [("s.1", "s.1'")]


def test_sizes_affine():
    p = counter_programs()["transfer"]
    sizes = [len(compile_program(p, n).program) for n in range(1, 8)]
    diffs = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(diffs) == 1 and diffs.pop() > 0


@pytest.mark.parametrize("name", sorted(counter_programs()))
def test_level_one_matches_oracle(name):
    cp = counter_programs()[name]
    res = search_reach(compile_program(cp, 1).program, SearchLimits(max_counter=3))
    assert isinstance(res, (Reachable, Unreachable))
    assert isinstance(res, Reachable) == halts(bounded_halting(cp, 2))
