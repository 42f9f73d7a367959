"""Deterministic counter programs with zero tests, and the bounded halting oracle.

Text format (shares the SVAS header conventions, no alphabet)::

    counters: x
    L:  inc x
        ifz x then L else E
    E:  goto H
    H:  halt
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .svas import Dec, Halt, Inc, SvasError, Violation, read_headers

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Jump:
    target: str

    def __str__(self):
        return f"goto {self.target}"


@dataclass(frozen=True)
class Ifz:
    counter: str
    then: str
    orelse: str

    def __str__(self):
        return f"ifz {self.counter} then {self.then} else {self.orelse}"


CCommand = Union[Inc, Dec, Jump, Ifz, Halt]


@dataclass(frozen=True)
class CounterProgram:
    counters: tuple[str, ...]
    commands: tuple[CCommand, ...]
    labels: dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def counter_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.counters)}

    def target(self, label: str) -> int:
        return self.labels[label]

    def shape(self) -> tuple:
        cmds = []
        for cmd in self.commands:
            if isinstance(cmd, Jump):
                cmds.append(("goto", self.labels[cmd.target]))
            elif isinstance(cmd, Ifz):
                cmds.append(("ifz", cmd.counter, self.labels[cmd.then], self.labels[cmd.orelse]))
            else:
                cmds.append(cmd)
        return self.counters, tuple(cmds)

    def same_structure(self, other: "CounterProgram") -> bool:
        return self.shape() == other.shape()

    def __len__(self):
        return len(self.commands)


def validate_cp(cp: CounterProgram) -> list[Violation]:
    out = []
    declared = set(cp.counters)
    for name in cp.counters:
        if not _IDENT.match(name):
            out.append(Violation("BadCounterName", None, name))
    halts = [i for i, c in enumerate(cp.commands) if isinstance(c, Halt)]
    if not halts:
        out.append(Violation("MissingHalt", None, "program has no halt command"))
    for i in halts:
        if i != len(cp.commands) - 1:
            out.append(Violation("HaltNotLast", i, "halt must be the last command"))
    for i, cmd in enumerate(cp.commands):
        if isinstance(cmd, (Inc, Dec, Ifz)) and cmd.counter not in declared:
            out.append(Violation("UndeclaredCounter", i, cmd.counter))
        targets = (cmd.target,) if isinstance(cmd, Jump) else (
            (cmd.then, cmd.orelse) if isinstance(cmd, Ifz) else ())
        for label in targets:
            if label not in cp.labels:
                out.append(Violation("DanglingLabel", i, label))
    return out


def _parse_ccommand(words: list[str], lineno: int) -> CCommand:
    op = words[0]
    if op == "halt" and len(words) == 1:
        return Halt()
    if op in ("inc", "dec") and len(words) == 2:
        return (Inc if op == "inc" else Dec)(words[1])
    if op == "goto" and len(words) == 2:
        return Jump(words[1])
    if op == "ifz" and len(words) == 6 and words[2] == "then" and words[4] == "else":
        return Ifz(words[1], words[3], words[5])
    raise SvasError("SyntaxError", f"cannot parse command {' '.join(words)!r}", lineno)


def parse_cp(text: str) -> CounterProgram:
    headers, body = read_headers(text, ("counters",))
    labels: dict[str, int] = {}
    commands, lines = [], []
    for lineno, names, rest in body:
        for name in names:
            if name in labels:
                raise SvasError("DuplicateLabel", name, lineno)
            labels[name] = len(commands)
        commands.append(_parse_ccommand(rest.split(), lineno))
        lines.append(lineno)
    cp = CounterProgram(tuple(headers.get("counters", [])), tuple(commands), labels)
    problems = validate_cp(cp)
    if problems:
        v = problems[0]
        raise SvasError(v.kind, v.detail, lines[v.index] if v.index is not None else None)
    return cp


def serialize_cp(cp: CounterProgram) -> str:
    lines = [("counters: " + " ".join(cp.counters)).rstrip()]
    for i, cmd in enumerate(cp.commands):
        if isinstance(cmd, Jump):
            cmd = Jump(f"C{cp.labels[cmd.target]}")
        elif isinstance(cmd, Ifz):
            cmd = Ifz(cmd.counter, f"C{cp.labels[cmd.then]}", f"C{cp.labels[cmd.orelse]}")
        lines.append(f"C{i}: {cmd}")
    return "\n".join(lines)


# ---------------------------------------------------------------- oracle


@dataclass(frozen=True)
class HaltsWithinBound:
    length: int  # commands executed, halt included


@dataclass(frozen=True)
class ExceedsBound:
    step: int
    counter: str


@dataclass(frozen=True)
class AbortsOnDecrement:
    step: int


@dataclass(frozen=True)
class Diverges:
    step: int  # first step whose starting configuration was already visited


BoundedRunResult = Union[HaltsWithinBound, ExceedsBound, AbortsOnDecrement, Diverges]


def bounded_halting(cp: CounterProgram, bound: int) -> BoundedRunResult:
    """Decide whether the unique run of ``cp`` halts with every counter ``<= bound``.

    The run is simulated with an exact visited set; the bounded configuration
    space is finite, so a repeated configuration proves divergence.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    idx = cp.counter_index
    ops = []
    for cmd in cp.commands:
        if isinstance(cmd, Inc):
            ops.append(("inc", idx[cmd.counter]))
        elif isinstance(cmd, Dec):
            ops.append(("dec", idx[cmd.counter]))
        elif isinstance(cmd, Jump):
            ops.append(("goto", cp.labels[cmd.target]))
        elif isinstance(cmd, Ifz):
            ops.append(("ifz", idx[cmd.counter], cp.labels[cmd.then], cp.labels[cmd.orelse]))
        else:
            ops.append(("halt",))
    pc, vals = 0, [0] * len(cp.counters)
    seen = set()
    step = 0
    while True:
        key = (pc, tuple(vals))
        if key in seen:
            return Diverges(step)
        seen.add(key)
        op = ops[pc]
        kind = op[0]
        if kind == "halt":
            return HaltsWithinBound(step + 1)
        if kind == "inc":
            if vals[op[1]] + 1 > bound:
                return ExceedsBound(step, cp.counters[op[1]])
            vals[op[1]] += 1
            pc += 1
        elif kind == "dec":
            if vals[op[1]] == 0:
                return AbortsOnDecrement(step)
            vals[op[1]] -= 1
            pc += 1
        elif kind == "goto":
            pc = op[1]
        else:
            pc = op[2] if vals[op[1]] == 0 else op[3]
        step += 1


def halts(result: BoundedRunResult) -> bool:
    return isinstance(result, HaltsWithinBound)
