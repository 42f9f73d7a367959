"""Two-variable first-order logic over leaf-data forests.

Atoms: ``letter_a(v)``, ``child(v,w)`` (w is a child of v), ``next(v,w)``
(w is the next sibling of v), ``prec(v,w)`` (both leaves, v before w in
document order), ``dataeq(v,w)`` (both leaves, same data), ``eq(v,w)``.
Variables are ``x`` and ``y`` only; quantifiers may rebind them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .forest import LeafDataForest, Structure

VARS = ("x", "y")


class FreeVariable(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Letter:
    letter: str
    var: str


@dataclass(frozen=True, eq=False)
class Rel:
    name: str  # child | next | prec | dataeq | eq
    left: str
    right: str


@dataclass(frozen=True, eq=False)
class Not:
    body: "Formula"


@dataclass(frozen=True, eq=False)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, eq=False)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, eq=False)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True, eq=False)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Letter, Rel, Not, And, Or, Implies, Exists, Forall]
RELATIONS = ("child", "next", "prec", "dataeq", "eq")

TRUE = And(())
FALSE = Or(())


def Child(v, w):
    return Rel("child", v, w)


def Next(v, w):
    return Rel("next", v, w)


def Prec(v, w):
    return Rel("prec", v, w)


def DataEq(v, w):
    return Rel("dataeq", v, w)


def Equal(v, w):
    return Rel("eq", v, w)


def conj(*parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(*parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def other(v: str) -> str:
    return "y" if v == "x" else "x"


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Letter):
        return frozenset((f.var,))
    if isinstance(f, Rel):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def _check_vars(f: Formula):
    if isinstance(f, Letter):
        names = (f.var,)
    elif isinstance(f, Rel):
        if f.name not in RELATIONS:
            raise ValueError(f"unknown relation {f.name!r}")
        names = (f.left, f.right)
    elif isinstance(f, (Exists, Forall)):
        names = (f.var,)
    else:
        names = ()
    for v in names:
        if v not in VARS:
            raise ValueError(f"variable {v!r} is not one of x, y")


def size(f: Formula) -> int:
    """Number of syntax nodes (shared subterms counted once per occurrence)."""
    n, stack = 0, [f]
    while stack:
        g = stack.pop()
        n += 1
        stack.extend(_children(g))
    return n


def _children(f):
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def _sentence(f: Formula):
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        _check_vars(g)
        stack.extend(_children(g))
    free = free_vars(f)
    if free:
        raise FreeVariable(f"formula has free variables {sorted(free)}")


# ---------------------------------------------------------------- evaluation


def evaluate(f: Formula, forest: LeafDataForest | Structure) -> bool:
    """Truth of sentence ``f`` in ``forest``.

    Every subformula is evaluated once into a boolean table indexed by the
    values of ``x`` (rows) and ``y`` (columns); a variable that is not free
    leaves its axis at length one.
    """
    _sentence(f)
    st = forest if isinstance(forest, Structure) else Structure(forest)
    memo: dict[int, np.ndarray] = {}
    return bool(_table(f, st, memo)[0, 0])


def _table(f, st: Structure, memo):
    key = id(f)
    hit = memo.get(key)
    if hit is not None:
        return hit
    n = st.size
    if isinstance(f, Letter):
        vec = st.letter(f.letter)
        out = vec[:, None] if f.var == "x" else vec[None, :]
    elif isinstance(f, Rel):
        m = st.relation(f.name)
        if f.left == f.right:
            d = np.diagonal(m).copy()
            out = d[:, None] if f.left == "x" else d[None, :]
        else:
            out = m if f.left == "x" else m.T
    elif isinstance(f, Not):
        out = ~_table(f.body, st, memo)
    elif isinstance(f, And):
        out = np.ones((1, 1), dtype=bool)
        for part in f.parts:
            out = out & _table(part, st, memo)
            if out.size == 1 and not out.flat[0] and out.shape == (1, 1):
                break
    elif isinstance(f, Or):
        out = np.zeros((1, 1), dtype=bool)
        for part in f.parts:
            out = out | _table(part, st, memo)
            if out.size == 1 and out.flat[0] and out.shape == (1, 1):
                break
    elif isinstance(f, Implies):
        out = ~_table(f.left, st, memo) | _table(f.right, st, memo)
    else:
        body = _table(f.body, st, memo)
        axis = 0 if f.var == "x" else 1
        shape = (n, body.shape[1]) if axis == 0 else (body.shape[0], n)
        full = np.broadcast_to(body, shape)
        if isinstance(f, Exists):
            out = full.any(axis=axis, keepdims=True)
        else:
            out = full.all(axis=axis, keepdims=True)
    memo[key] = out
    return out


def evaluate_naive(f: Formula, forest: LeafDataForest | Structure) -> bool:
    """Reference evaluator: explicit loops over variable assignments."""
    _sentence(f)
    st = forest if isinstance(forest, Structure) else Structure(forest)
    return _sat(f, st, {})


def _sat(f, st: Structure, env: dict[str, int]) -> bool:
    if isinstance(f, Letter):
        return st.letters[env[f.var]] == f.letter
    if isinstance(f, Rel):
        return bool(st.relation(f.name)[env[f.left], env[f.right]])
    if isinstance(f, Not):
        return not _sat(f.body, st, env)
    if isinstance(f, And):
        return all(_sat(p, st, env) for p in f.parts)
    if isinstance(f, Or):
        return any(_sat(p, st, env) for p in f.parts)
    if isinstance(f, Implies):
        return (not _sat(f.left, st, env)) or _sat(f.right, st, env)
    results = (_sat(f.body, st, {**env, f.var: i}) for i in range(st.size))
    return any(results) if isinstance(f, Exists) else all(results)


# ---------------------------------------------------------------- s-expressions


def to_sexpr(f: Formula) -> str:
    if isinstance(f, Letter):
        return f"letter_{f.letter}({f.var})"
    if isinstance(f, Rel):
        return f"{f.name}({f.left},{f.right})"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.body)})"
    if isinstance(f, And):
        return "(and" + "".join(" " + to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(or" + "".join(" " + to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return f"(implies {to_sexpr(f.left)} {to_sexpr(f.right)})"
    kw = "exists" if isinstance(f, Exists) else "forall"
    return f"({kw} {f.var} {to_sexpr(f.body)})"


_TOKEN = re.compile(r"\(|\)|[^\s()]+\([xy](?:,[xy])?\)|[^\s()]+")
_ATOM = re.compile(r"^([^\s()]+)\(([xy])(?:,([xy]))?\)$")


def parse_sexpr(text: str) -> Formula:
    tokens = _TOKEN.findall(text)
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of formula")
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            m = _ATOM.match(tok)
            if not m:
                raise ValueError(f"bad atom {tok!r}")
            head, a, b = m.groups()
            if b is None:
                if not head.startswith("letter_"):
                    raise ValueError(f"bad unary atom {tok!r}")
                return Letter(head[len("letter_"):], a)
            if head not in RELATIONS:
                raise ValueError(f"unknown relation {head!r}")
            return Rel(head, a, b)
        op = tokens[pos]
        pos += 1
        if op in ("exists", "forall"):
            var = tokens[pos]
            pos += 1
            body = parse()
            out = (Exists if op == "exists" else Forall)(var, body)
        else:
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse())
            if op == "not" and len(args) == 1:
                out = Not(args[0])
            elif op == "implies" and len(args) == 2:
                out = Implies(*args)
            elif op == "and":
                out = And(tuple(args))
            elif op == "or":
                out = Or(tuple(args))
            else:
                raise ValueError(f"bad connective {op!r} with {len(args)} arguments")
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError("missing ')'")
        pos += 1
        return out

    f = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after formula")
    return f


def same_formula(f: Formula, g: Formula) -> bool:
    return to_sexpr(f) == to_sexpr(g)
