import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svasreach.svas import (
    Dec,
    Goto,
    Halt,
    Inc,
    Pop,
    Push,
    SvasError,
    parse_svas,
    program,
    serialize_svas,
    validate,
)


def test_parse_minimal():
    p = parse_svas("counters: x\nalphabet:\nL0: inc x\nhalt")
    assert p.commands == (Inc("x"), Halt())
    assert p.counters == ("x",)
    assert p.alphabet == ()
    assert p.labels == {"L0": 0}


def test_serialize_canonical():
    p = program(["x"], [], [Inc("x"), Halt()])
    assert serialize_svas(p) == "counters: x\nalphabet:\nC0: inc x\nC1: halt"


def test_serialize_deterministic_goto():
    p = program([], [], [Halt(), Halt(), Halt(), Goto("C3", "C3"), Halt()])
    # not a valid program, but printing does not care
    assert "C3: goto C3 or C3" in serialize_svas(p)


def test_halt_not_last_is_rejected():
    with pytest.raises(SvasError) as err:
        parse_svas("counters: x\nalphabet:\nhalt\ninc x\n")
    assert err.value.kind == "HaltNotLast"
    assert err.value.line == 3


def test_validate_kinds():
    ok = program(["x"], [], [Inc("x"), Halt()])
    assert validate(ok) == []
    bad = program(["x"], [], [Halt(), Inc("x")])
    assert [v.kind for v in validate(bad)] == ["HaltNotLast"]
    dangling = program([], [], [Goto("C0", "nowhere"), Halt()])
    assert [v.kind for v in validate(dangling)] == ["DanglingLabel"]
    undeclared = program([], ["a"], [Inc("y"), Push("b"), Halt()])
    assert [v.kind for v in validate(undeclared)] == ["UndeclaredCounter", "UndeclaredSymbol"]
    assert [v.kind for v in validate(program([], [], []))] == ["MissingHalt"]


@pytest.mark.parametrize("text, kind", [
    ("counters: x\nalphabet:\nfrob x\nhalt", "SyntaxError"),
    ("counters: x\nalphabet:\nA: inc x\nA: halt", "DuplicateLabel"),
    ("counters: x\nalphabet:\ngoto A or B\nA: halt", "DanglingLabel"),
    ("counters: x\nalphabet:\ninc x\ncounters: y\nhalt", "SyntaxError"),
    ("counters: x\nstates: q\nhalt", "SyntaxError"),
    ("counters: x x\nalphabet:\nhalt", "DuplicateCounter"),
    ("counters: x\nalphabet:\nL:\nhalt", "SyntaxError"),
])
def test_parse_errors(text, kind):
    with pytest.raises(SvasError) as err:
        parse_svas(text)
    assert err.value.kind == kind


def test_comments_and_stacked_labels():
    p = parse_svas("""
        # a comment
        counters: x   # trailing
        alphabet: a
        A: B: push a
        pop a
        goto A or C
        C: halt
    """)
    assert p.labels == {"A": 0, "B": 0, "C": 3}
    assert p.successors(2) == (0, 3)
    assert p.successors(3) == ()


def test_successors_collapse_deterministic_goto():
    p = parse_svas("counters:\nalphabet:\nA: goto B or B\nB: halt")
    assert p.successors(0) == (1,)


# ---------------------------------------------------------------- round trip


@st.composite
def programs(draw):
    counters = draw(st.lists(st.sampled_from("xyzw"), unique=True, max_size=3))
    symbols = draw(st.lists(st.sampled_from("abc"), unique=True, max_size=2))
    n = draw(st.integers(1, 10))
    cmds = []
    for _ in range(n - 1):
        options = ["goto"]
        if counters:
            options += ["inc", "dec"]
        if symbols:
            options += ["push", "pop"]
        op = draw(st.sampled_from(options))
        if op == "goto":
            cmds.append(Goto(f"C{draw(st.integers(0, n - 1))}", f"C{draw(st.integers(0, n - 1))}"))
        elif op in ("inc", "dec"):
            cmds.append((Inc if op == "inc" else Dec)(draw(st.sampled_from(counters))))
        else:
            cmds.append((Push if op == "push" else Pop)(draw(st.sampled_from(symbols))))
    cmds.append(Halt())
    return program(counters, symbols, cmds)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_round_trip(p):
    text = serialize_svas(p)
    q = parse_svas(text)
    assert q == p
    assert q.same_structure(p)
    assert serialize_svas(q) == text


@settings(max_examples=100, deadline=None)
@given(programs())
def test_relabelling_keeps_structure(p):
    # rename every label; the canonical form must not change
    text = serialize_svas(p)
    renamed = text.replace("C", "Lbl_")
    q = parse_svas(renamed)
    assert q.same_structure(p)
    assert serialize_svas(q) == text
