"""Execution semantics for SVAS programs.

Configurations are plain named tuples so that the search can hash and store
millions of them cheaply. Counter values are kept in a tuple aligned with
``program.counters``; the stack is a tuple of symbols with the top at the end.
"""

from __future__ import annotations

import enum
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from .svas import Dec, Goto, Halt, Inc, Pop, Push, SvasProgram


class Configuration(NamedTuple):
    pc: int
    counters: tuple[int, ...]
    stack: tuple[str, ...] = ()

    def valuation(self, p: SvasProgram) -> dict[str, int]:
        return dict(zip(p.counters, self.counters))

    def value(self, p: SvasProgram, counter: str) -> int:
        return self.counters[p.counter_index[counter]]


def initial(p: SvasProgram) -> Configuration:
    return Configuration(0, (0,) * len(p.counters), ())


def is_accepting(p: SvasProgram, c: Configuration) -> bool:
    return isinstance(p.commands[c.pc], Halt) and not c.stack and not any(c.counters)


class Abort(NamedTuple):
    reason: str


class Halted(NamedTuple):
    pass


class Successors(NamedTuple):
    """Successor configurations paired with the choice bit (``None`` for non-jumps)."""

    items: tuple[tuple[Configuration, int | None], ...]


StepOutcome = Successors | Abort | Halted

DECREMENT_OF_ZERO = "DecrementOfZero"
POP_ON_EMPTY = "PopOnEmpty"
POP_MISMATCH = "PopMismatch"


class _Compiled:
    # Per-command opcode table; avoids isinstance dispatch in the hot loops.
    INC, DEC, PUSH, POP, GOTO, HALT = range(6)

    def __init__(self, p: SvasProgram):
        ops = []
        for cmd, tgt in zip(p.commands, p.targets):
            if isinstance(cmd, Inc):
                ops.append((self.INC, p.counter_index[cmd.counter], None))
            elif isinstance(cmd, Dec):
                ops.append((self.DEC, p.counter_index[cmd.counter], None))
            elif isinstance(cmd, Push):
                ops.append((self.PUSH, cmd.symbol, None))
            elif isinstance(cmd, Pop):
                ops.append((self.POP, cmd.symbol, None))
            elif isinstance(cmd, Goto):
                ops.append((self.GOTO, tgt[0], tgt[1]))
            else:
                ops.append((self.HALT, None, None))
        self.ops = ops


_compiled_cache: dict[int, tuple[SvasProgram, _Compiled]] = {}


def _compiled(p: SvasProgram) -> _Compiled:
    hit = _compiled_cache.get(id(p))
    if hit is not None and hit[0] is p:
        return hit[1]
    comp = _Compiled(p)
    if len(_compiled_cache) > 64:
        _compiled_cache.clear()
    _compiled_cache[id(p)] = (p, comp)
    return comp


def _advance(ops, state):
    """Successor states of a raw ``(pc, counters, stack)`` triple.

    Returns a list of ``(state, bit)`` pairs, an abort reason string, or ``None``
    when the program counter is at ``halt``.
    """
    pc, counters, stack = state
    op, a, b = ops[pc]
    if op == 0:
        vals = list(counters)
        vals[a] += 1
        return [(Configuration(pc + 1, tuple(vals), stack), None)]
    if op == 1:
        if counters[a] == 0:
            return DECREMENT_OF_ZERO
        vals = list(counters)
        vals[a] -= 1
        return [(Configuration(pc + 1, tuple(vals), stack), None)]
    if op == 2:
        return [(Configuration(pc + 1, counters, stack + (a,)), None)]
    if op == 3:
        if not stack:
            return POP_ON_EMPTY
        if stack[-1] != a:
            return POP_MISMATCH
        return [(Configuration(pc + 1, counters, stack[:-1]), None)]
    if op == 4:
        return [(Configuration(a, counters, stack), 0), (Configuration(b, counters, stack), 1)]
    return None


def step(p: SvasProgram, c: Configuration) -> StepOutcome:
    out = _advance(_compiled(p).ops, c)
    if out is None:
        return Halted()
    if isinstance(out, str):
        return Abort(out)
    return Successors(tuple(out))


# ---------------------------------------------------------------- traces


class Outcome(enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"  # halted, but counters or stack non-empty
    ABORTED = "Aborted"
    LIMIT_HIT = "LimitHit"


@dataclass
class RunTrace:
    program: SvasProgram
    steps: list[tuple[int, object, Configuration]] = field(default_factory=list)
    inc_counts: dict[str, int] = field(default_factory=dict)
    dec_counts: dict[str, int] = field(default_factory=dict)
    outcome: Outcome = Outcome.LIMIT_HIT
    reason: str = ""
    final: Configuration | None = None
    length: int = 0
    commands_seen: list[int] | None = None

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPTED

    @property
    def command_indices(self) -> list[int]:
        if self.commands_seen is not None:
            return list(self.commands_seen)
        return [idx for idx, _, _ in self.steps]


def count_events(t: RunTrace, counter: str) -> tuple[int, int]:
    if counter not in t.program.counter_index:
        raise KeyError(f"unknown counter {counter!r}")
    return t.inc_counts.get(counter, 0), t.dec_counts.get(counter, 0)


class _Recorder:
    def __init__(self, p: SvasProgram, record: bool, observe):
        self.p = p
        self.trace = RunTrace(p, commands_seen=None if record else [])
        self.record = record
        self.observe = observe
        self.inc = [0] * len(p.counters)
        self.dec = [0] * len(p.counters)
        self.ops = _compiled(p).ops

    def note(self, idx: int, after: Configuration):
        op, a, _ = self.ops[idx]
        if op == 0:
            self.inc[a] += 1
        elif op == 1:
            self.dec[a] += 1
        if self.record:
            self.trace.steps.append((idx, self.p.commands[idx], after))
        else:
            self.trace.commands_seen.append(idx)
        self.trace.length += 1
        if self.observe is not None:
            self.observe(after)

    def finish(self, outcome: Outcome, final: Configuration, reason: str = "") -> RunTrace:
        t = self.trace
        t.outcome, t.final, t.reason = outcome, final, reason
        names = self.p.counters
        t.inc_counts = {names[i]: n for i, n in enumerate(self.inc) if n}
        t.dec_counts = {names[i]: n for i, n in enumerate(self.dec) if n}
        return t


def _finish_at_halt(rec: _Recorder, c: Configuration) -> RunTrace:
    if is_accepting(rec.p, c):
        return rec.finish(Outcome.ACCEPTED, c)
    return rec.finish(Outcome.REJECTED, c, "NonEmptyAtHalt")


def replay(p: SvasProgram, witness: Sequence[int], *, max_steps: int | None = None,
           record: bool = True) -> RunTrace:
    """Run ``p`` deterministically, consuming one witness bit per ``goto``."""
    rec = _Recorder(p, record, None)
    ops = rec.ops
    c = initial(p)
    bits = list(witness)
    used = 0
    while max_steps is None or rec.trace.length < max_steps:
        out = _advance(ops, c)
        if out is None:
            rec.note(c.pc, c)
            if used < len(bits):
                return rec.finish(Outcome.REJECTED, c, "WitnessTooLong")
            return _finish_at_halt(rec, c)
        if isinstance(out, str):
            return rec.finish(Outcome.ABORTED, c, out)
        idx = c.pc
        if len(out) == 2:
            if used >= len(bits):
                return rec.finish(Outcome.ABORTED, c, "WitnessTooShort")
            c = out[bits[used]][0]
            used += 1
        else:
            c = out[0][0]
        rec.note(idx, c)
    return rec.finish(Outcome.LIMIT_HIT, c, "StepLimit")


def follow(p: SvasProgram, commands: Sequence[int]) -> RunTrace:
    """Replay a run given as its sequence of executed command indices.

    The trace is accepted only if the sequence starts at command 0, every
    index is a legal successor of the previous one, and it ends at an
    accepting ``halt``.
    """
    rec = _Recorder(p, True, None)
    ops = rec.ops
    c = initial(p)
    seq = list(commands)
    if not seq:
        return rec.finish(Outcome.ABORTED, c, "EmptyRun")
    for pos, idx in enumerate(seq):
        if c.pc != idx:
            return rec.finish(Outcome.ABORTED, c, "IllegalSuccessor")
        out = _advance(ops, c)
        if out is None:
            rec.note(idx, c)
            if pos != len(seq) - 1:
                return rec.finish(Outcome.ABORTED, c, "EventsAfterHalt")
            return _finish_at_halt(rec, c)
        if isinstance(out, str):
            return rec.finish(Outcome.ABORTED, c, out)
        nxt = seq[pos + 1] if pos + 1 < len(seq) else None
        c = out[0][0]
        if len(out) == 2 and out[0][0].pc != nxt and out[1][0].pc == nxt:
            c = out[1][0]
        rec.note(idx, c)
    return rec.finish(Outcome.ABORTED, c, "EndsBeforeHalt")


def write_witness(witness: Iterable[int]) -> str:
    return "".join("1" if b else "0" for b in witness) + "\n"


def read_witness(text: str) -> list[int]:
    line = text.strip()
    if any(ch not in "01" for ch in line):
        raise ValueError("witness must be a line of '0'/'1' characters")
    return [int(ch) for ch in line]


def format_trace(t: RunTrace) -> str:
    """Line-per-step export followed by a ``# key=value`` summary footer."""
    p = t.program
    lines = []
    for idx, cmd, conf in t.steps:
        vals = ",".join(f"{n}={v}" for n, v in zip(p.counters, conf.counters))
        lines.append(f"{idx}\t{cmd}\t{vals}\t{' '.join(conf.stack)}")
    lines.append(f"# outcome={t.outcome.value} reason={t.reason or '-'} steps={t.length}")
    for name in p.counters:
        i, d = t.inc_counts.get(name, 0), t.dec_counts.get(name, 0)
        if i or d:
            lines.append(f"# counter={name} inc={i} dec={d}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- policy runs


class MissingAnnotation(KeyError):
    pass


@dataclass(frozen=True)
class Predicate:
    """Guard of an annotated jump: ``zero(c)``, ``nonzero(c)``, ``top(a)`` or ``allones(k)``."""

    kind: str
    arg: str

    KINDS = ("zero", "nonzero", "top", "allones")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown predicate kind {self.kind!r}")

    def __str__(self):
        return f"{self.kind}({self.arg})"

    @classmethod
    def parse(cls, text: str) -> "Predicate":
        text = text.strip()
        if "(" not in text or not text.endswith(")"):
            raise ValueError(f"cannot parse predicate {text!r}")
        kind, arg = text[:-1].split("(", 1)
        return cls(kind, arg)


@dataclass
class ChoiceAnnotationTable:
    """Resolves two-way jumps into one canonical run.

    ``entries`` maps a ``goto`` index to ``(predicate, branch taken when it holds)``.
    ``digits`` maps a level name to its ``(zero digit, one digit)`` stack symbols,
    which ``allones`` predicates inspect.
    """

    entries: dict[int, tuple[Predicate, int]] = field(default_factory=dict)
    digits: dict[str, tuple[str, str]] = field(default_factory=dict)

    def holds(self, p: SvasProgram, pred: Predicate, c: Configuration) -> bool:
        kind = pred.kind
        if kind == "zero":
            return c.counters[p.counter_index[pred.arg]] == 0
        if kind == "nonzero":
            return c.counters[p.counter_index[pred.arg]] != 0
        if kind == "top":
            return bool(c.stack) and c.stack[-1] == pred.arg
        zero, one = self.digits[pred.arg]
        for sym in reversed(c.stack):
            if sym == zero:
                return False
            if sym != one:
                break
        return True

    def choose(self, p: SvasProgram, index: int, c: Configuration) -> int:
        try:
            pred, branch = self.entries[index]
        except KeyError:
            raise MissingAnnotation(index) from None
        return branch if self.holds(p, pred, c) else 1 - branch

    def missing(self, p: SvasProgram) -> list[int]:
        """Two-way jumps of ``p`` that carry no annotation."""
        return [i for i, t in enumerate(p.targets)
                if t is not None and t[0] != t[1] and i not in self.entries]

    def to_text(self) -> str:
        lines = [f"digits {lvl} {z} {o}" for lvl, (z, o) in sorted(self.digits.items())]
        lines += [f"{i} {pred} {branch}" for i, (pred, branch) in sorted(self.entries.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ChoiceAnnotationTable":
        table = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            words = raw.split("#", 1)[0].split()
            if not words:
                continue
            try:
                if words[0] == "digits" and len(words) == 4:
                    table.digits[words[1]] = (words[2], words[3])
                elif len(words) == 3:
                    table.entries[int(words[0])] = (Predicate.parse(words[1]), int(words[2]))
                else:
                    raise ValueError("expected 'index predicate branch'")
            except ValueError as exc:
                raise ValueError(f"annotation line {lineno}: {exc}") from None
        return table


def run_policy(p: SvasProgram, ann: ChoiceAnnotationTable, max_steps: int, *,
               record: bool = True, observe: Callable[[Configuration], None] | None = None,
               ) -> RunTrace:
    """Deterministic run that resolves each two-way ``goto`` through ``ann``.

    Raises :class:`MissingAnnotation` when a two-way jump without an entry is reached.
    """
    rec = _Recorder(p, record, observe)
    ops = rec.ops
    c = initial(p)
    if observe is not None:
        observe(c)
    while rec.trace.length < max_steps:
        out = _advance(ops, c)
        if out is None:
            rec.note(c.pc, c)
            return _finish_at_halt(rec, c)
        if isinstance(out, str):
            return rec.finish(Outcome.ABORTED, c, out)
        idx = c.pc
        if len(out) == 2:
            _, a, b = ops[idx]
            bit = 0 if a == b else ann.choose(p, idx, c)
            c = out[bit][0]
        else:
            c = out[0][0]
        rec.note(idx, c)
    return rec.finish(Outcome.LIMIT_HIT, c, "StepLimit")


# ---------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchLimits:
    max_configs: int = 1_000_000
    max_stack: int = 64
    max_counter: int = 1_000

    def __post_init__(self):
        if min(self.max_configs, self.max_stack, self.max_counter) <= 0:
            raise ValueError("search limits must be positive")


@dataclass
class SearchStats:
    explored: int = 0
    frontier_peak: int = 0
    seconds: float = 0.0
    limit: str = ""

    def footer(self) -> str:
        return (f"explored={self.explored} frontier_peak={self.frontier_peak} "
                f"seconds={self.seconds:.3f} limit={self.limit or '-'}")


@dataclass
class Reachable:
    witness: list[int]
    stats: SearchStats


@dataclass
class Unreachable:
    stats: SearchStats


@dataclass
class Inconclusive:
    limit: str
    stats: SearchStats


SearchResult = Reachable | Unreachable | Inconclusive


@dataclass
class Exploration:
    """Outcome of an exhaustive walk that does not stop at the first acceptance."""

    closed: bool
    tallies: set[int]
    stats: SearchStats
    accepting: int = 0


def _explore(p, limits, *, stop_at_accept, tally_pcs=None, tally_counter=None, visit=None):
    """Breadth-first walk of the configuration graph.

    With ``tally_pcs`` the graph is the product with a count of ``dec`` of
    ``tally_counter`` executed at those command indices, so the set of counts
    at accepting configurations ranges over every accepting run.
    """
    t0 = time.perf_counter()
    ops = _compiled(p).ops
    stats = SearchStats()
    halt_pc = len(p.commands) - 1
    tally_idx = p.counter_index[tally_counter] if tally_counter is not None else None
    tally_pcs = frozenset(tally_pcs or ())
    tracked = tally_idx is not None

    start = initial(p)
    root = (start, 0) if tracked else start
    parents: dict = {root: None}
    frontier = deque([root])
    tallies: set[int] = set()
    accepting = 0
    found = None
    limit = ""
    max_stack, max_counter, max_configs = limits.max_stack, limits.max_counter, limits.max_configs

    while frontier:
        if len(frontier) > stats.frontier_peak:
            stats.frontier_peak = len(frontier)
        node = frontier.popleft()
        conf, tally = node if tracked else (node, 0)
        stats.explored += 1
        if visit is not None:
            visit(conf)
        if conf.pc == halt_pc:
            if not conf.stack and not any(conf.counters):
                accepting += 1
                tallies.add(tally)
                if stop_at_accept:
                    found = node
                    break
            continue
        out = _advance(ops, conf)
        if out is None or isinstance(out, str):
            continue
        bump = 0
        if tracked and conf.pc in tally_pcs:
            op, a, _ = ops[conf.pc]
            if op == 1 and a == tally_idx:
                bump = 1
        for nxt, bit in out:
            if len(nxt.stack) > max_stack:
                limit = "max_stack"
                continue
            if nxt.counters and max(nxt.counters) > max_counter:
                limit = "max_counter"
                continue
            key = (nxt, tally + bump) if tracked else nxt
            if key in parents:
                continue
            if len(parents) >= max_configs:
                limit = "max_configs"
                continue
            parents[key] = (node, bit)
            frontier.append(key)

    stats.seconds = time.perf_counter() - t0
    stats.limit = limit
    witness = None
    if found is not None:
        witness = []
        node = found
        while parents[node] is not None:
            node, bit = parents[node]
            if bit is not None:
                witness.append(bit)
        witness.reverse()
    return witness, Exploration(closed=not limit and found is None, tallies=tallies,
                                stats=stats, accepting=accepting)


def search_reach(p: SvasProgram, limits: SearchLimits | None = None, *,
                 visit: Callable[[Configuration], None] | None = None) -> SearchResult:
    """Decide reachability of an accepting configuration within ``limits``."""
    limits = limits or SearchLimits()
    witness, ex = _explore(p, limits, stop_at_accept=True, visit=visit)
    if witness is not None:
        return Reachable(witness, ex.stats)
    if ex.closed:
        return Unreachable(ex.stats)
    return Inconclusive(ex.stats.limit, ex.stats)


def accepting_tallies(p: SvasProgram, counter: str, pcs: Iterable[int],
                      limits: SearchLimits | None = None, *,
                      visit: Callable[[Configuration], None] | None = None) -> Exploration:
    """Collect, over all accepting runs, how often ``dec counter`` runs at ``pcs``."""
    limits = limits or SearchLimits()
    _, ex = _explore(p, limits, stop_at_accept=False, tally_pcs=pcs,
                     tally_counter=counter, visit=visit)
    return ex


def enumerate_witnesses(p: SvasProgram, max_bits: int, *, max_steps: int = 10_000):
    """Brute force: replay every bit string of length ``<= max_bits``; yield accepting ones."""
    for n in range(max_bits + 1):
        for code in range(1 << n):
            bits = [(code >> (n - 1 - i)) & 1 for i in range(n)]
            t = replay(p, bits, max_steps=max_steps, record=False)
            if t.accepted:
                yield bits
