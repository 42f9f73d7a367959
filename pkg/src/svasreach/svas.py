"""Stack vector addition systems: program model, text format and validation.

A program is a finite list of commands over non-negative counters and a
finite-alphabet stack::

    counters: x y
    alphabet: a
    L0: inc x
        goto L1 or L2
    L1: push a
        pop a
    L2: dec x
        halt

Jumps refer to labels. A deterministic jump is written ``goto L or L``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union


class SvasError(ValueError):
    """Raised for malformed program text or invalid programs."""

    def __init__(self, kind: str, message: str, line: int | None = None):
        self.kind = kind
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{kind}: {where}{message}")


@dataclass(frozen=True)
class Inc:
    counter: str

    def __str__(self):
        return f"inc {self.counter}"


@dataclass(frozen=True)
class Dec:
    counter: str

    def __str__(self):
        return f"dec {self.counter}"


@dataclass(frozen=True)
class Push:
    symbol: str

    def __str__(self):
        return f"push {self.symbol}"


@dataclass(frozen=True)
class Pop:
    symbol: str

    def __str__(self):
        return f"pop {self.symbol}"


@dataclass(frozen=True)
class Goto:
    first: str
    second: str

    def __str__(self):
        return f"goto {self.first} or {self.second}"


@dataclass(frozen=True)
class Halt:
    def __str__(self):
        return "halt"


Command = Union[Inc, Dec, Push, Pop, Goto, Halt]


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int | None
    detail: str

    def __str__(self):
        at = f" at command {self.index}" if self.index is not None else ""
        return f"{self.kind}{at}: {self.detail}"


@dataclass(frozen=True)
class SvasProgram:
    counters: tuple[str, ...]
    alphabet: tuple[str, ...]
    commands: tuple[Command, ...]
    labels: dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def counter_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.counters)}

    @cached_property
    def targets(self) -> tuple[tuple[int, int] | None, ...]:
        """Resolved jump targets per command (``None`` for non-jumps)."""
        out = []
        for cmd in self.commands:
            if isinstance(cmd, Goto):
                out.append((self.labels[cmd.first], self.labels[cmd.second]))
            else:
                out.append(None)
        return tuple(out)

    def shape(self) -> tuple:
        """Label-independent structure, used for structural equality."""
        cmds = []
        for cmd, tgt in zip(self.commands, self.targets):
            cmds.append(("goto",) + tgt if tgt is not None else cmd)
        return self.counters, self.alphabet, tuple(cmds)

    def same_structure(self, other: "SvasProgram") -> bool:
        return self.shape() == other.shape()

    def successors(self, index: int) -> tuple[int, ...]:
        """Command indices that may follow command ``index`` in a run."""
        cmd = self.commands[index]
        if isinstance(cmd, Halt):
            return ()
        if isinstance(cmd, Goto):
            a, b = self.targets[index]
            return (a,) if a == b else (a, b)
        return (index + 1,)

    def __len__(self):
        return len(self.commands)


def validate(p: SvasProgram) -> list[Violation]:
    out = []
    counters, symbols = set(p.counters), set(p.alphabet)
    if len(counters) != len(p.counters):
        out.append(Violation("DuplicateCounter", None, " ".join(p.counters)))
    if len(symbols) != len(p.alphabet):
        out.append(Violation("DuplicateSymbol", None, " ".join(p.alphabet)))
    halts = [i for i, c in enumerate(p.commands) if isinstance(c, Halt)]
    if not halts:
        out.append(Violation("MissingHalt", None, "program has no halt command"))
    for i in halts:
        if i != len(p.commands) - 1:
            out.append(Violation("HaltNotLast", i, "halt must be the last command"))
    for i, cmd in enumerate(p.commands):
        if isinstance(cmd, (Inc, Dec)) and cmd.counter not in counters:
            out.append(Violation("UndeclaredCounter", i, cmd.counter))
        elif isinstance(cmd, (Push, Pop)) and cmd.symbol not in symbols:
            out.append(Violation("UndeclaredSymbol", i, cmd.symbol))
        elif isinstance(cmd, Goto):
            for label in (cmd.first, cmd.second):
                if label not in p.labels:
                    out.append(Violation("DanglingLabel", i, label))
    for label, idx in p.labels.items():
        if not 0 <= idx < len(p.commands):
            out.append(Violation("DanglingLabel", None, f"{label} -> {idx}"))
    return out


def check(p: SvasProgram) -> SvasProgram:
    """Return ``p`` unchanged, or raise :class:`SvasError` on the first violation."""
    problems = validate(p)
    if problems:
        v = problems[0]
        raise SvasError(v.kind, v.detail if v.index is None else f"command {v.index}: {v.detail}")
    return p


_NAME = r"[^\s#:]+"
_HEADER = re.compile(r"^(counters|alphabet)\s*:(.*)$")
_LABEL = re.compile(rf"^({_NAME})\s*:\s*(.*)$")


def split_lines(text: str):
    """Yield ``(line number, header or None, labels, body)`` for non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            yield lineno, m.group(1), [], m.group(2).split()
            continue
        labels = []
        while True:
            m = _LABEL.match(line)
            if not m:
                break
            labels.append(m.group(1))
            line = m.group(2).strip()
        yield lineno, None, labels, line


def read_headers(text: str, allowed: tuple[str, ...]):
    """Collect header declarations and the remaining command lines."""
    headers: dict[str, list[str]] = {}
    body = []
    for lineno, header, labels, rest in split_lines(text):
        if header is not None:
            if header not in allowed:
                raise SvasError("SyntaxError", f"unexpected header {header!r}", lineno)
            if header in headers:
                raise SvasError("SyntaxError", f"duplicate header {header!r}", lineno)
            if body:
                raise SvasError("SyntaxError", "headers must precede commands", lineno)
            headers[header] = rest
        else:
            if not rest:
                raise SvasError("SyntaxError", "label without a command", lineno)
            body.append((lineno, labels, rest))
    return headers, body


def _parse_command(words: list[str], lineno: int) -> Command:
    op = words[0]
    if op == "halt" and len(words) == 1:
        return Halt()
    if op in ("inc", "dec", "push", "pop") and len(words) == 2:
        return {"inc": Inc, "dec": Dec, "push": Push, "pop": Pop}[op](words[1])
    if op == "goto" and len(words) == 4 and words[2] == "or":
        return Goto(words[1], words[3])
    raise SvasError("SyntaxError", f"cannot parse command {' '.join(words)!r}", lineno)


def parse_svas(text: str) -> SvasProgram:
    headers, body = read_headers(text, ("counters", "alphabet"))
    labels: dict[str, int] = {}
    commands = []
    lines = []
    for lineno, names, rest in body:
        for name in names:
            if name in labels:
                raise SvasError("DuplicateLabel", name, lineno)
            labels[name] = len(commands)
        commands.append(_parse_command(rest.split(), lineno))
        lines.append(lineno)
    p = SvasProgram(
        tuple(headers.get("counters", [])),
        tuple(headers.get("alphabet", [])),
        tuple(commands),
        labels,
    )
    problems = validate(p)
    if problems:
        v = problems[0]
        line = lines[v.index] if v.index is not None else None
        raise SvasError(v.kind, v.detail, line)
    return p


def canonical_label(index: int) -> str:
    return f"C{index}"


def serialize_svas(p: SvasProgram) -> str:
    lines = [
        ("counters: " + " ".join(p.counters)).rstrip(),
        ("alphabet: " + " ".join(p.alphabet)).rstrip(),
    ]
    for i, (cmd, tgt) in enumerate(zip(p.commands, p.targets)):
        if tgt is not None:
            cmd = Goto(canonical_label(tgt[0]), canonical_label(tgt[1]))
        lines.append(f"{canonical_label(i)}: {cmd}")
    return "\n".join(lines)


def program(counters, alphabet, commands, labels=None) -> SvasProgram:
    """Build a program; labels default to canonical ``Ci`` names for every index."""
    commands = tuple(commands)
    if labels is None:
        labels = {canonical_label(i): i for i in range(len(commands))}
    return SvasProgram(tuple(counters), tuple(alphabet), commands, dict(labels))
