"""Yardstick compiler from bounded counter programs to SVAS.

Every simulated counter ``x`` gets a complement ``x'`` with ``x + x' = 2⇑n``.
A zero test of ``x`` moves ``x'`` into the level-``n`` scratch counter ``s.n``
and then calls ``Dec_n``, which can only finish after exactly ``2⇑n``
decrements of ``s.n``. ``Dec_{k+1}`` is built from level-``k`` machinery: it
counts through every value of a ``2⇑k``-digit binary number kept on the stack.

Naming scheme for emitted symbols:

========================  ======================================
``s.k``, ``s.k'``         scratch pair consumed by ``Dec_k``
``t.k``, ``u.k`` (+ ')    level-k pairs counting stack digits
``d0.k``, ``d1.k``        binary digits of the level-k number
``rk.i``                  return symbol of the i-th ``Dec_k`` call
``x'``                    complement of source counter ``x``
========================  ======================================
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

from .counterprog import CounterProgram, Ifz, Jump
from .execution import ChoiceAnnotationTable, Configuration, Predicate
from .svas import Dec, Goto, Halt, Inc, Pop, Push, SvasProgram, check

MAX_DIGITS = 100_000


class TooLarge(ValueError):
    pass


class LevelTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class TetrationValue:
    base: int
    height: int
    value: int

    def __int__(self):
        return self.value


def tetration(b: int, k: int, max_digits: int = MAX_DIGITS) -> TetrationValue:
    """``b⇑k``: a tower of ``k`` copies of ``b`` (``b⇑0 = 1``)."""
    if b < 2 or k < 0:
        raise ValueError("tetration needs b >= 2 and k >= 0")
    value = 1
    for _ in range(k):
        if value > max_digits / math.log10(b):
            raise TooLarge(f"{b}⇑{k} has more than {max_digits} decimal digits")
        value = b ** value
    return TetrationValue(b, k, value)


def complement(name: str) -> str:
    return name + "'"


@dataclass
class Level:
    k: int
    pairs: list[tuple[str, str]]
    digits: tuple[str, str] | None = None
    returns: list[str] = field(default_factory=list)

    @property
    def scratch(self) -> tuple[str, str]:
        return self.pairs[0]


@dataclass
class CompiledUnit:
    program: SvasProgram
    annotations: ChoiceAnnotationTable
    levelmap: dict[int, Level]
    sourcemap: list[tuple[str, int | None]]
    midstep: dict[int, tuple[str, str]]
    call_sites: list[tuple[int, str, int]]  # (level, return symbol, push index)
    return_jumps: dict[int, int] = field(default_factory=dict)  # jump index -> push index

    @property
    def top(self) -> int:
        return max(self.levelmap)

    def gadget(self, index: int) -> str:
        return self.sourcemap[index][0]

    def indices(self, gadget: str) -> frozenset[int]:
        """Command indices whose gadget path starts with the component ``gadget``."""
        return frozenset(i for i, (path, _) in enumerate(self.sourcemap)
                         if path.split("/", 1)[0] == gadget)

    def body(self, k: int) -> frozenset[int]:
        return self.indices(f"Dec_{k}")

    def level_of(self, counter: str) -> int:
        for k, lvl in self.levelmap.items():
            if any(counter in pair for pair in lvl.pairs):
                return k
        raise KeyError(counter)

    def sourcemap_text(self) -> str:
        lines = []
        for i, (path, src) in enumerate(self.sourcemap):
            lines.append(f"{i} {path}" + (f" {src}" if src is not None else ""))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- emission


class _Emitter:
    def __init__(self):
        self.cmds = []
        self.labels: dict[str, int] = {}
        self.paths: list[str] = []
        self.sources: list[int | None] = []
        self.ann: dict[int, tuple[Predicate, int]] = {}
        self.mid: dict[int, tuple[str, str]] = {}
        self.counters: list[str] = []
        self.alphabet: list[str] = []
        self.scope: list[str] = []
        self.source: int | None = None
        self._fresh = 0

    def declare(self, *names):
        for name in names:
            if name not in self.counters:
                self.counters.append(name)

    def symbol(self, name):
        if name not in self.alphabet:
            self.alphabet.append(name)

    def fresh(self) -> str:
        self._fresh += 1
        return f"L{self._fresh}"

    def here(self, label):
        self.labels[label] = len(self.cmds)

    @contextmanager
    def within(self, part):
        self.scope.append(part)
        try:
            yield
        finally:
            self.scope.pop()

    def emit(self, cmd, mid=None):
        if mid is not None:
            self.mid[len(self.cmds)] = mid
        self.cmds.append(cmd)
        self.paths.append("/".join(self.scope))
        self.sources.append(self.source)

    def goto(self, a, b=None, pred=None, branch=0):
        if pred is not None:
            self.ann[len(self.cmds)] = (pred, branch)
        self.emit(Goto(a, a if b is None else b))

    def loop(self, pred, body):
        """``while <guess>: body`` with ``pred`` as the honest continue condition."""
        head, inner, done = self.fresh(), self.fresh(), self.fresh()
        self.here(head)
        self.goto(inner, done, pred, 0)
        self.here(inner)
        body()
        self.goto(head)
        self.here(done)


def _nonzero(c):
    return Predicate("nonzero", c)


class _Yardstick:
    def __init__(self, e: _Emitter, top: int, extra: list[tuple[str, str]] = ()):
        self.e = e
        self.top = top
        self.levels: dict[int, Level] = {}
        for k in range(1, top + 1):
            names = ("s",) if k == top else ("s", "t", "u")
            pairs = [(f"{n}.{k}", complement(f"{n}.{k}")) for n in names]
            if k == top:
                pairs += list(extra)
            digits = (f"d0.{k}", f"d1.{k}") if k < top else None
            self.levels[k] = Level(k, pairs, digits)
            for pair in pairs:
                e.declare(*pair)
        for lvl in self.levels.values():
            if lvl.digits:
                e.symbol(lvl.digits[0])
                e.symbol(lvl.digits[1])
        self.pair_of = {c: pair for lvl in self.levels.values() for pair in lvl.pairs for c in pair}
        self.entry = {k: f"Dec_{k}" for k in self.levels}
        self.sites: dict[int, list[tuple[str, str, int]]] = {k: [] for k in self.levels}
        self.return_jumps: dict[int, int] = {}

    # -- primitive moves

    def move(self, first, second):
        """Two commands updating one complement pair; the pair is off by one in between."""
        self.e.emit(first)
        self.e.emit(second, mid=self.pair_of[second.counter])

    def call_dec(self, k):
        e = self.e
        sym = f"r{k}.{len(self.sites[k])}"
        e.symbol(sym)
        self.levels[k].returns.append(sym)
        ret = e.fresh()
        self.sites[k].append((sym, ret, len(e.cmds)))
        e.emit(Push(sym))
        e.goto(self.entry[k])
        e.here(ret)

    # -- gadgets

    def zt_pass(self, k, c, cbar):
        """Move ``cbar`` into ``s.k`` (incrementing ``c``), then run ``Dec_k``.

        Completes only if ``cbar`` held ``2⇑k``, i.e. ``c`` was zero.
        """
        s, sbar = self.levels[k].scratch

        def transfer():
            self.move(Dec(cbar), Inc(c))
            self.move(Inc(s), Dec(sbar))

        self.e.loop(_nonzero(cbar), transfer)
        self.call_dec(k)

    def zero_test(self, k, c, cbar):
        with self.e.within(f"ZT_{k}({c})"):
            self.zt_pass(k, c, cbar)
            self.zt_pass(k, cbar, c)

    def skeleton(self, k, counted):
        """Count ``2⇑(k+1)`` steps with a ``2⇑k``-digit stack number; ``counted`` emits one step."""
        e = self.e
        (t, tbar), (u, ubar) = self.levels[k].pairs[1:3]
        d0, d1 = self.levels[k].digits

        with e.within("push-zeros"):
            def push_zero():
                e.emit(Push(d0))
                self.move(Dec(ubar), Inc(u))

            e.loop(_nonzero(ubar), push_zero)
            self.zero_test(k, ubar, u)

        head, incr, final = e.fresh(), e.fresh(), e.fresh()
        e.here(head)
        e.goto(incr, final, Predicate("allones", str(k)), 1)
        e.here(incr)
        with e.within("increment"):
            def pop_one():
                e.emit(Pop(d1))
                self.move(Inc(t), Dec(tbar))

            def push_zero_back():
                e.emit(Push(d0))
                self.move(Dec(t), Inc(tbar))

            e.loop(Predicate("top", d1), pop_one)
            e.emit(Pop(d0))
            e.emit(Push(d1))
            e.loop(_nonzero(t), push_zero_back)
            self.zero_test(k, t, tbar)
            counted()
            e.goto(head)
        e.here(final)
        with e.within("pop-ones"):
            def pop_final():
                e.emit(Pop(d1))
                self.move(Dec(u), Inc(ubar))

            e.loop(_nonzero(u), pop_final)
            self.zero_test(k, u, ubar)
            counted()

    def dec_body(self, k):
        e = self.e
        with e.within(f"Dec_{k}"):
            e.here(self.entry[k])
            s, sbar = self.levels[k].scratch
            if k == 1:
                for _ in range(2):
                    self.move(Dec(s), Inc(sbar))
            else:
                self.skeleton(k - 1, lambda: self.move(Dec(s), Inc(sbar)))
            with e.within("return"):
                sites = self.sites[k]
                for i, (sym, ret, site) in enumerate(sites):
                    leaf = e.fresh()
                    if i + 1 < len(sites):
                        nxt = e.fresh()
                        e.goto(leaf, nxt, Predicate("top", sym), 0)
                    else:
                        e.goto(leaf)
                    e.here(leaf)
                    e.emit(Pop(sym))
                    self.return_jumps[len(e.cmds)] = site
                    e.goto(ret)
                    if i + 1 < len(sites):
                        e.here(nxt)

    def init(self):
        e = self.e
        with e.within("Init_1"):
            for _, cbar in self.levels[1].pairs:
                e.emit(Inc(cbar))
                e.emit(Inc(cbar))
        for k in range(1, self.top):
            bars = [cbar for _, cbar in self.levels[k + 1].pairs]

            def counted(bars=bars):
                for cbar in bars:
                    e.emit(Inc(cbar))

            with e.within(f"Init_{k + 1}"):
                self.skeleton(k, counted)

    def finish(self) -> CompiledUnit:
        """Drain every counter, emit the subroutine bodies and the final halt."""
        e = self.e
        end = "END"
        with e.within("epilogue"):
            for c in list(e.counters):
                e.loop(_nonzero(c), lambda c=c: e.emit(Dec(c)))
            e.goto(end)
        for k in range(self.top, 0, -1):
            self.dec_body(k)
        with e.within("end"):
            e.here(end)
            e.emit(Halt())
        prog = check(SvasProgram(tuple(e.counters), tuple(e.alphabet), tuple(e.cmds), dict(e.labels)))
        digits = {str(k): lvl.digits for k, lvl in self.levels.items() if lvl.digits}
        sites = [(k, sym, idx) for k, lst in self.sites.items() for sym, _, idx in lst]
        return CompiledUnit(
            program=prog,
            annotations=ChoiceAnnotationTable(dict(e.ann), digits),
            levelmap=self.levels,
            sourcemap=list(zip(e.paths, e.sources)),
            midstep=dict(e.mid),
            call_sites=sites,
            return_jumps=dict(self.return_jumps),
        )


def _source_label(i: int) -> str:
    return f"S{i}"


def compile_program(cp: CounterProgram, n: int) -> CompiledUnit:
    """Compile ``cp`` into an SVAS that simulates it while counters stay within ``2⇑n``."""
    if n < 1:
        raise LevelTooSmall("level must be at least 1")
    e = _Emitter()
    extra = [(x, complement(x)) for x in cp.counters]
    for pair in extra:
        e.declare(*pair)
    y = _Yardstick(e, n, extra)
    y.init()
    for i, cmd in enumerate(cp.commands):
        e.source = i
        e.here(_source_label(i))
        with e.within(f"cmd{i}"):
            if isinstance(cmd, Inc):
                y.move(Inc(cmd.counter), Dec(complement(cmd.counter)))
            elif isinstance(cmd, Dec):
                y.move(Dec(cmd.counter), Inc(complement(cmd.counter)))
            elif isinstance(cmd, Jump):
                e.goto(_source_label(cp.labels[cmd.target]))
            elif isinstance(cmd, Ifz):
                x, xbar = cmd.counter, complement(cmd.counter)
                zero, nonzero = e.fresh(), e.fresh()
                e.goto(zero, nonzero, Predicate("zero", x), 0)
                e.here(zero)
                with e.within("zero"):
                    y.zero_test(n, x, xbar)
                    e.goto(_source_label(cp.labels[cmd.then]))
                e.here(nonzero)
                with e.within("nonzero"):
                    y.move(Dec(x), Inc(xbar))
                    y.move(Inc(x), Dec(xbar))
                    e.goto(_source_label(cp.labels[cmd.orelse]))
            # halt falls through into the epilogue
    e.source = None
    return y.finish()


def emit_dec_harness(k: int) -> CompiledUnit:
    """Initialise levels ``1..k``, fill ``s.k`` completely, call ``Dec_k`` once, drain, halt."""
    if k < 1:
        raise LevelTooSmall("level must be at least 1")
    tetration(2, k)
    e = _Emitter()
    y = _Yardstick(e, k)
    y.init()
    s, sbar = y.levels[k].scratch
    with e.within("harness"):
        e.loop(_nonzero(sbar), lambda: y.move(Dec(sbar), Inc(s)))
        y.call_dec(k)
    return y.finish()


def emit_ztest_harness(k: int, preload: int) -> CompiledUnit:
    """Initialise levels ``1..k`` and a level-k pair ``(x, x')``, add ``preload`` to ``x``,
    then zero-test ``x`` (both passes), drain and halt."""
    if k < 1:
        raise LevelTooSmall("level must be at least 1")
    bound = tetration(2, k).value
    if not 0 <= preload <= bound:
        raise ValueError(f"preload must lie in 0..{bound}")
    e = _Emitter()
    e.declare("x", "x'")
    y = _Yardstick(e, k, [("x", "x'")])
    y.init()
    with e.within("harness"):
        for _ in range(preload):
            y.move(Inc("x"), Dec("x'"))
        y.zero_test(k, "x", "x'")
    return y.finish()


# ---------------------------------------------------------------- invariants


class PairInvariant:
    """Checks ``c + c' = 2⇑k`` for every level-k pair of a compiled unit.

    A pair is checked once its level is initialised: not while the program
    counter, or any pending return address on the stack, lies in ``Init_j``
    for ``j <= k``; never in the epilogue; and not between the two commands
    of a pair update.
    """

    def __init__(self, unit: CompiledUnit):
        p = unit.program
        idx = p.counter_index
        self.unit = unit
        self.pairs = []
        for k, lvl in unit.levelmap.items():
            total = tetration(2, k).value
            for c, cbar in lvl.pairs:
                self.pairs.append((k, idx[c], idx[cbar], total, (c, cbar)))
        inf = len(unit.levelmap) + 1
        self.phase = []
        for path, _ in unit.sourcemap:
            head = path.split("/", 1)[0]
            if head.startswith("Init_"):
                self.phase.append(int(head[5:]))
            elif head in ("epilogue", "end"):
                self.phase.append(0)
            else:
                self.phase.append(inf)
        for jump, site in unit.return_jumps.items():
            self.phase[jump] = min(self.phase[jump], self.phase[site])
        self.site_phase = {sym: self.phase[i] for _, sym, i in unit.call_sites
                           if self.phase[i] != inf}
        self.inf = inf
        self.checked = 0
        self.violations: list[tuple[Configuration, tuple[str, str], int]] = []

    def __call__(self, conf: Configuration):
        phase = self.phase[conf.pc]
        if phase == 0:
            return
        if self.site_phase:
            for sym in conf.stack:
                ph = self.site_phase.get(sym)
                if ph is not None and ph < phase:
                    phase = ph
        skip = self.unit.midstep.get(conf.pc)
        vals = conf.counters
        for k, i, j, total, names in self.pairs:
            if k >= phase or names == skip:
                continue
            self.checked += 1
            if vals[i] + vals[j] != total:
                self.violations.append((conf, names, vals[i] + vals[j]))
