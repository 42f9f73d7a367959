"""Accepting SVAS computations as leaf-data forests, and the sentence defining them.

Letters of the encoding of a program ``p``:

* ``c{i}`` -- a leaf for command ``i`` when it is ``inc``, ``dec``, ``goto`` or ``halt``;
* ``p{i}_{j}`` -- a node opened by ``push a`` at ``i`` and closed by ``pop a`` at ``j``.

Traversing the forest (a node's letter once before its children, once after)
spells out the executed commands. Each increment of ``c`` shares its data
value with exactly one later decrement of ``c``; every other leaf has a value
of its own.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass

from ..execution import RunTrace, follow
from ..svas import Dec, Goto, Halt, Inc, Pop, Push, SvasProgram
from .forest import LeafDataForest, Node
from .formula import (
    FALSE,
    And,
    Child,
    DataEq,
    Equal,
    Exists,
    Forall,
    Formula,
    Implies,
    Letter,
    Next,
    Not,
    Or,
    Prec,
    conj,
    disj,
    other,
)


class NotAccepted(ValueError):
    pass


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Letters for one program, with the commands each letter starts and ends with."""

    leaf: dict[str, int]
    pair: dict[str, tuple[int, int]]

    def first(self, letter: str) -> int:
        return self.leaf[letter] if letter in self.leaf else self.pair[letter][0]

    def last(self, letter: str) -> int:
        return self.leaf[letter] if letter in self.leaf else self.pair[letter][1]

    def __contains__(self, letter: str) -> bool:
        return letter in self.leaf or letter in self.pair

    @property
    def letters(self) -> list[str]:
        return list(self.leaf) + list(self.pair)


def leaf_letter(i: int) -> str:
    return f"c{i}"


def pair_letter(i: int, j: int) -> str:
    return f"p{i}_{j}"


def alphabet(p: SvasProgram) -> Alphabet:
    leaf = {}
    pushes, pops = defaultdict(list), defaultdict(list)
    for i, cmd in enumerate(p.commands):
        if isinstance(cmd, Push):
            pushes[cmd.symbol].append(i)
        elif isinstance(cmd, Pop):
            pops[cmd.symbol].append(i)
        else:
            leaf[leaf_letter(i)] = i
    pair = {pair_letter(i, j): (i, j)
            for sym, opens in pushes.items() for i in opens for j in pops.get(sym, ())}
    return Alphabet(leaf, pair)


# ---------------------------------------------------------------- encoder


def encode_trace(p: SvasProgram, t: RunTrace) -> LeafDataForest:
    if not t.accepted:
        raise NotAccepted(f"trace outcome is {t.outcome.value}")
    fresh = itertools.count()
    pending: dict[str, deque[int]] = defaultdict(deque)
    roots: list[Node] = []
    opened: list[tuple[Node, int]] = []

    def attach(node):
        (opened[-1][0].children if opened else roots).append(node)

    for idx in t.command_indices:
        cmd = p.commands[idx]
        if isinstance(cmd, Push):
            opened.append((Node(""), idx))
        elif isinstance(cmd, Pop):
            node, start = opened.pop()
            node.letter = pair_letter(start, idx)
            if not node.children:
                node.data = next(fresh)
            attach(node)
        elif isinstance(cmd, Inc):
            value = next(fresh)
            pending[cmd.counter].append(value)
            attach(Node(leaf_letter(idx), [], value))
        elif isinstance(cmd, Dec):
            attach(Node(leaf_letter(idx), [], pending[cmd.counter].popleft()))
        else:
            attach(Node(leaf_letter(idx), [], next(fresh)))
    assert not opened and not any(pending.values()), "accepted trace must be balanced"
    return _renumber(LeafDataForest(roots))


def _renumber(forest: LeafDataForest) -> LeafDataForest:
    """Rename data values to 0, 1, 2, ... in document order of first use."""
    names: dict[int, int] = {}
    for leaf in forest.leaves():
        leaf.data = names.setdefault(leaf.data, len(names))
    return forest


# ---------------------------------------------------------------- decoder


def events(p: SvasProgram, forest: LeafDataForest) -> list[int]:
    """Command indices spelled by a traversal of ``forest``; raises :class:`DecodeError`."""
    sigma = alphabet(p)
    out: list[int] = []
    stack: list[tuple[Node, bool]] = [(r, False) for r in reversed(forest.roots)]
    while stack:
        node, closing = stack.pop()
        letter = node.letter
        if closing:
            out.append(sigma.pair[letter][1])
            continue
        if letter in sigma.leaf:
            if not node.is_leaf:
                raise DecodeError(f"leaf letter {letter!r} on an internal node")
            out.append(sigma.leaf[letter])
        elif letter in sigma.pair:
            out.append(sigma.pair[letter][0])
            stack.append((node, True))
            stack.extend((ch, False) for ch in reversed(node.children))
        else:
            raise DecodeError(f"unknown letter {letter!r}")
    return out


def decode_forest(p: SvasProgram, forest: LeafDataForest) -> RunTrace:
    return follow(p, events(p, forest))


def data_matching_valid(p: SvasProgram, forest: LeafDataForest) -> bool:
    """Every data class is a single non-counter leaf, or an increment of some
    counter paired with a later decrement of the same counter."""
    role = {}
    for i, cmd in enumerate(p.commands):
        if isinstance(cmd, (Inc, Dec)):
            role[leaf_letter(i)] = ("inc" if isinstance(cmd, Inc) else "dec", cmd.counter)
    classes: dict[int, list[tuple[int, tuple[str, str] | None]]] = defaultdict(list)
    for pos, leaf in enumerate(forest.leaves()):
        classes[leaf.data].append((pos, role.get(leaf.letter)))
    for members in classes.values():
        if len(members) == 1:
            if members[0][1] is not None:
                return False
            continue
        if len(members) != 2 or any(r is None for _, r in members):
            return False
        (p1, (k1, c1)), (p2, (k2, c2)) = sorted(members)
        if (k1, k2) != ("inc", "dec") or c1 != c2:
            return False
    return True


# ---------------------------------------------------------------- the sentence


def _letters(names, v) -> Formula:
    return disj(*(Letter(a, v) for a in names)) if names else FALSE


def emit_formula(p: SvasProgram) -> Formula:
    """Sentence whose models are exactly the encodings of accepting runs of ``p``
    (up to renaming data values)."""
    sigma = alphabet(p)
    x, y = "x", "y"
    succ = {i: set(p.successors(i)) for i in range(len(p.commands))}
    by_first: dict[int, list[str]] = defaultdict(list)
    by_last: dict[int, list[str]] = defaultdict(list)
    for a in sigma.letters:
        by_first[sigma.first(a)].append(a)
        by_last[sigma.last(a)].append(a)

    def starts_with(cmds, v):
        return _letters([a for c in sorted(cmds) for a in by_first.get(c, ())], v)

    def ends_before(j, v):
        """Letters whose last command may be followed by command ``j``."""
        return _letters([a for a in sigma.letters if j in succ[sigma.last(a)]], v)

    def has_child(v):
        return Exists(other(v), Child(v, other(v)))

    def is_root(v):
        return Not(Exists(other(v), Child(other(v), v)))

    def first_sibling(v):
        return Not(Exists(other(v), Next(other(v), v)))

    def last_sibling(v):
        return Not(Exists(other(v), Next(v, other(v))))

    halt_letter = leaf_letter(len(p.commands) - 1)
    bad_pair_leaves = [a for a, (i, j) in sigma.pair.items() if j != i + 1]

    labelling = [
        Forall(x, _letters(sigma.letters, x)),
        Forall(x, Implies(has_child(x), _letters(list(sigma.pair), x))),
        Forall(x, Implies(Not(has_child(x)), Not(_letters(bad_pair_leaves, x)))),
    ]
    ends = [
        Exists(x, conj(is_root(x), first_sibling(x), starts_with({0}, x))),
        Forall(x, Implies(conj(is_root(x), last_sibling(x)),
                          conj(Letter(halt_letter, x), Not(has_child(x))))),
    ]
    flow = [
        Forall(x, Forall(y, Implies(Next(x, y), conj(*[
            Implies(_letters(names, x), starts_with(succ[last], y))
            for last, names in sorted(by_last.items())
        ])))),
        Forall(x, Forall(y, Implies(conj(Child(x, y), first_sibling(y)), conj(*[
            Implies(Letter(a, x), starts_with(succ[i], y))
            for a, (i, _) in sigma.pair.items()
        ] or [Not(Child(x, y))])))),
        Forall(x, Forall(y, Implies(conj(Child(x, y), last_sibling(y)), conj(*[
            Implies(Letter(a, x), ends_before(j, y))
            for a, (_, j) in sigma.pair.items()
        ] or [Not(Child(x, y))])))),
    ]

    incs: dict[str, list[str]] = defaultdict(list)
    decs: dict[str, list[str]] = defaultdict(list)
    for a, i in sigma.leaf.items():
        cmd = p.commands[i]
        if isinstance(cmd, Inc):
            incs[cmd.counter].append(a)
        elif isinstance(cmd, Dec):
            decs[cmd.counter].append(a)
    all_incs = [a for names in incs.values() for a in names]
    all_decs = [a for names in decs.values() for a in names]
    counter_letters = set(all_incs) | set(all_decs)
    plain = [a for a in sigma.letters if a not in counter_letters]

    data = [
        Forall(x, Forall(y, Implies(conj(_letters(all_incs, x), _letters(all_incs, y), DataEq(x, y)),
                                    Equal(x, y)))),
        Forall(x, Forall(y, Implies(conj(_letters(all_decs, x), _letters(all_decs, y), DataEq(x, y)),
                                    Equal(x, y)))),
        Forall(x, Implies(_letters(plain, x), Forall(y, Implies(DataEq(x, y), Equal(x, y))))),
    ]
    for counter in p.counters:
        data.append(Forall(x, Implies(_letters(decs[counter], x), Exists(y, conj(
            _letters(incs[counter], y), DataEq(x, y), Prec(y, x))))))
        data.append(Forall(x, Implies(_letters(incs[counter], x), Exists(y, conj(
            _letters(decs[counter], y), DataEq(x, y))))))
    return And(tuple(labelling + ends + flow + data))
