"""Acceptance gate: ten criteria at their stated tolerances.

Run alone with ``pytest tests/test_acceptance.py``; one PASS/FAIL line per
criterion is printed in the terminal summary.

A note on the search limits used below: an exploration only reports itself
closed if no successor was ever dropped for exceeding a limit, so a closed
search covers the entire reachable configuration space, and the caps merely
guard against runaway growth.
"""

import random
import time

import numpy as np

from svasreach.corpus import counter_programs, svas_programs
from svasreach.counterprog import bounded_halting, halts
from svasreach.execution import (
    Reachable,
    SearchLimits,
    Unreachable,
    accepting_tallies,
    count_events,
    enumerate_witnesses,
    replay,
    run_policy,
    search_reach,
)
from svasreach.logic import (
    DecodeError,
    LeafDataForest,
    Structure,
    data_matching_valid,
    decode_forest,
    emit_formula,
    encode_trace,
    evaluate,
    mutate_forest_described,
    random_forest,
    random_sentence,
)
from svasreach.logic.encoding import alphabet
from svasreach.logic.formula import And, Not, Or
from svasreach.svas import Dec
from svasreach.yardstick import (
    PairInvariant,
    compile_program,
    emit_dec_harness,
    emit_ztest_harness,
    tetration,
)

HONEST_STEPS = 500_000  # halting corpus runs at n = 3 need fewer than 50k steps


def limits_for(k: int) -> SearchLimits:
    # one above the pair total leaves room for the inc-before-dec overshoot
    return SearchLimits(max_configs=5_000_000, max_stack=64,
                        max_counter=tetration(2, k).value + 1)


def dec_exhaustive(k: int):
    unit = emit_dec_harness(k)
    inv = PairInvariant(unit)
    s = unit.levelmap[k].scratch[0]
    t0 = time.perf_counter()
    ex = accepting_tallies(unit.program, s, unit.body(k), limits_for(k), visit=inv)
    return ex, inv, time.perf_counter() - t0


# Shared invariant tally for criterion 6, filled by criteria 1 to 5.
INVARIANT = {"checked": 0, "violations": [], "sources": set()}


def note_invariant(name: str, inv: PairInvariant):
    INVARIANT["checked"] += inv.checked
    INVARIANT["violations"].extend((name, v) for v in inv.violations)
    INVARIANT["sources"].add(name)


def test_criterion_01_dec_exact_k1(criterion):
    with criterion(1, "Dec_1 decrements s.1 exactly 2 times on every accepting run") as rec:
        ex, inv, secs = dec_exhaustive(1)
        note_invariant("dec1", inv)
        rec["detail"] = (f"closed={ex.closed} accepting={ex.accepting} tallies={sorted(ex.tallies)} "
                         f"configs={ex.stats.explored} {secs:.2f}s")
        assert ex.closed
        assert ex.accepting >= 1
        assert ex.tallies == {2}
        assert secs < 5


def test_criterion_02_dec_exact_k2(criterion):
    with criterion(2, "Dec_2 decrements s.2 exactly 4 times on every accepting run") as rec:
        ex, inv, secs = dec_exhaustive(2)
        note_invariant("dec2", inv)
        rec["detail"] = (f"closed={ex.closed} accepting={ex.accepting} tallies={sorted(ex.tallies)} "
                         f"configs={ex.stats.explored} {secs:.2f}s")
        assert ex.closed
        assert ex.accepting >= 1
        assert ex.tallies == {4}
        assert secs < 300


def test_criterion_03_dec_honest_k3(criterion):
    with criterion(3, "honest Dec_3 run accepts with exactly 16 decrements of s.3") as rec:
        unit = emit_dec_harness(3)
        inv = PairInvariant(unit)
        body = unit.body(3)
        s = unit.levelmap[3].scratch[0]
        t0 = time.perf_counter()
        t = run_policy(unit.program, unit.annotations, HONEST_STEPS, observe=inv)
        secs = time.perf_counter() - t0
        note_invariant("dec3", inv)
        in_body = sum(1 for idx, cmd, _ in t.steps if idx in body and cmd == Dec(s))
        rec["detail"] = f"{t.outcome.value} steps={t.length} decrements={in_body} {secs:.2f}s"
        assert t.accepted
        assert in_body == 16 == tetration(2, 3).value
        assert count_events(t, s)[1] == 16
        assert secs < 60


def test_criterion_04_zero_test(criterion):
    with criterion(4, "zero-test harness: preload 0 reachable, preload 1 unreachable") as rec:
        out = {}
        for k in (1, 2):
            for preload in (0, 1):
                unit = emit_ztest_harness(k, preload)
                inv = PairInvariant(unit)
                out[k, preload] = search_reach(unit.program, limits_for(k), visit=inv)
                note_invariant(f"zt{k}.{preload}", inv)
        rec["detail"] = ", ".join(f"k={k} preload {p}: {type(r).__name__}"
                                  for (k, p), r in out.items())
        for k in (1, 2):
            assert isinstance(out[k, 0], Reachable)
            assert isinstance(out[k, 1], Unreachable)


def test_criterion_05_end_to_end(criterion):
    with criterion(5, "compiled programs agree with the bounded halting oracle") as rec:
        progs = counter_programs()
        assert len(progs) >= 10 and all(len(p) <= 8 for p in progs.values())
        kinds = {type(bounded_halting(p, 4)).__name__ for p in progs.values()}
        assert len(kinds) == 4  # halting, bound-exceeding, aborting and diverging
        disagreements = []
        checked = 0
        for name, cp in progs.items():
            for n in (1, 2, 3):
                bound = tetration(2, n).value
                want = halts(bounded_halting(cp, bound))
                unit = compile_program(cp, n)
                inv = PairInvariant(unit)
                if n < 3:
                    res = search_reach(unit.program, limits_for(n), visit=inv)
                    if not isinstance(res, (Reachable, Unreachable)):
                        disagreements.append((name, n, f"inconclusive {res.limit}"))
                        continue
                    got = isinstance(res, Reachable)
                else:
                    t = run_policy(unit.program, unit.annotations, HONEST_STEPS,
                                   record=False, observe=inv)
                    got = t.accepted
                note_invariant(f"{name}@{n}", inv)
                checked += 1
                if got != want:
                    disagreements.append((name, n, f"compiled={got} oracle={want}"))
        rec["detail"] = f"{len(progs)} programs x 3 levels, {checked} verdicts, {len(disagreements)} disagreements"
        assert disagreements == []


def test_criterion_06_pair_invariant(criterion):
    with criterion(6, "pair sums stay at 2⇑k after initialisation") as rec:
        if not {"dec1", "dec2", "dec3", "zt2.1"} <= INVARIANT["sources"]:
            # run on its own: reproduce the explorations of criteria 1 to 4 here
            for k in (1, 2):
                note_invariant(f"dec{k}", dec_exhaustive(k)[1])
                for preload in (0, 1):
                    unit = emit_ztest_harness(k, preload)
                    inv = PairInvariant(unit)
                    search_reach(unit.program, limits_for(k), visit=inv)
                    note_invariant(f"zt{k}.{preload}", inv)
        rec["detail"] = (f"{INVARIANT['checked']} pair checks over {len(INVARIANT['sources'])} "
                         f"runs, {len(INVARIANT['violations'])} violations")
        assert INVARIANT["checked"] > 0
        assert INVARIANT["violations"] == []


def test_criterion_07_size_growth(criterion):
    with criterion(7, "compiled size is exactly affine in n over 1..10") as rec:
        slopes = set()
        worst = 0.0
        for name, cp in counter_programs().items():
            ns = np.arange(1, 11)
            sizes = np.array([len(compile_program(cp, int(n)).program) for n in ns])
            design = np.stack([np.ones_like(ns), ns], axis=1).astype(float)
            coef, *_ = np.linalg.lstsq(design, sizes.astype(float), rcond=None)
            residual = float(np.abs(design @ coef - sizes).max())
            worst = max(worst, residual)
            diffs = set(np.diff(sizes).tolist())
            assert len(diffs) == 1, (name, sizes)
            slopes |= diffs
        rec["detail"] = f"slopes={sorted(slopes)} max residual={worst:.1e}"
        assert worst < 1e-6


def accepted_traces(p, want, bits=12):
    out, seen = [], set()
    for w in enumerate_witnesses(p, bits):
        t = replay(p, w)
        key = tuple(t.command_indices)
        if key not in seen:
            seen.add(key)
            out.append(t)
        if len(out) == want:
            break
    return out


def harness_cases():
    """Compiled programs with their single honest accepting trace."""
    for label, unit in (("dec1", emit_dec_harness(1)), ("dec2", emit_dec_harness(2)),
                        ("zt1", emit_ztest_harness(1, 0))):
        yield label, unit.program, run_policy(unit.program, unit.annotations, HONEST_STEPS)


def test_criterion_08_logic_positive(criterion):
    with criterion(8, "encodings of accepted traces satisfy the sentence") as rec:
        programs = 0
        traces = 0
        for name, p in svas_programs().items():
            phi = emit_formula(p)
            ts = accepted_traces(p, 8)
            assert len(ts) >= 5, name
            for t in ts:
                assert evaluate(phi, encode_trace(p, t)), name
            programs += 1
            traces += len(ts)
        for label, p, t in harness_cases():
            assert t.accepted
            assert evaluate(emit_formula(p), encode_trace(p, t)), label
            traces += 1
        rec["detail"] = f"{programs} corpus programs, {traces} traces incl. 3 compiled harness runs"
        assert programs >= 5


def test_criterion_09_logic_mutations(criterion):
    with criterion(9, "sentence agrees with decoder on seeded mutations") as rec:
        cases = []
        for name, p in svas_programs().items():
            for t in accepted_traces(p, 5):
                cases.append((name, p, encode_trace(p, t)))
        for label, p, t in harness_cases():
            cases.append((label, p, encode_trace(p, t)))
        total = sat = 0
        bad = []
        kinds = {}
        for i, (name, p, forest) in enumerate(cases):
            phi = emit_formula(p)
            letters = alphabet(p).letters
            for seed in range(4):
                f, kind, what = mutate_forest_described(forest, 1000 * i + seed, letters)
                got = evaluate(phi, f)
                try:
                    want = decode_forest(p, f).accepted and data_matching_valid(p, f)
                except DecodeError:
                    want = False
                total += 1
                sat += got
                kinds[kind] = kinds.get(kind, 0) + 1
                if got != want:
                    bad.append((name, what, got, want))
        rec["detail"] = (f"{total} mutants, {sat} still models, kinds={dict(sorted(kinds.items()))}, "
                         f"{len(bad)} disagreements")
        assert total >= 50
        assert bad == []


def _brute_force_orders(forest: LeafDataForest):
    s = Structure(forest)
    leaves = [i for i in range(s.size) if s.leaf[i]]
    internal = [i for i in range(s.size) if not s.leaf[i]]
    for i in internal:
        assert not s.prec[i].any() and not s.prec[:, i].any()
        assert not s.dataeq[i].any() and not s.dataeq[:, i].any()
    for a in leaves:
        assert not s.prec[a, a]
        assert s.dataeq[a, a]
        for b in leaves:
            if a != b:
                assert s.prec[a, b] != s.prec[b, a]  # total and antisymmetric
            assert s.dataeq[a, b] == s.dataeq[b, a]
            for c in leaves:
                if s.prec[a, b] and s.prec[b, c]:
                    assert s.prec[a, c]
                if s.dataeq[a, b] and s.dataeq[b, c]:
                    assert s.dataeq[a, c]


def test_criterion_10_evaluator_sanity(criterion):
    with criterion(10, "tautology, contradiction and relation checks on random inputs") as rec:
        rng = random.Random(2024)
        forests = [random_forest(rng, max_nodes=12) for _ in range(100)]
        sentences = [random_sentence(rng, depth=4) for _ in range(100)]
        assert max(len(f) for f in forests) <= 12
        structures = [Structure(f) for f in forests]
        pairs = 0
        for phi in sentences:
            contradiction = And((phi, Not(phi)))
            tautology = Or((phi, Not(phi)))
            for s in structures:
                assert evaluate(contradiction, s) is False
                assert evaluate(tautology, s) is True
                pairs += 1
        for f in forests:
            _brute_force_orders(f)
        rec["detail"] = f"{pairs} forest/sentence pairs, {len(forests)} forests brute-forced"
