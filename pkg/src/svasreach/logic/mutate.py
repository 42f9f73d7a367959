"""Seeded edits of forests, and random forests and sentences for testing."""

from __future__ import annotations

import random
from typing import Sequence

from .forest import LeafDataForest, Node
from .formula import (
    RELATIONS,
    And,
    Exists,
    Forall,
    Formula,
    Implies,
    Letter,
    Not,
    Or,
    Rel,
)

EDIT_KINDS = ("relabel", "swap", "data", "delete", "reparent")


def _slots(forest: LeafDataForest):
    """``(node, container list, parent or None)`` for every node, document order."""
    out = []

    def walk(container, parent):
        for node in container:
            out.append((node, container, parent))
            walk(node.children, node)

    walk(forest.roots, None)
    return out


def _fresh(forest: LeafDataForest) -> int:
    return max((n.data for n in forest.leaves() if n.data is not None), default=-1) + 1


def _subtree_ids(node: Node) -> set[int]:
    ids, stack = set(), [node]
    while stack:
        n = stack.pop()
        ids.add(id(n))
        stack.extend(n.children)
    return ids


def _try(kind, forest, rng, pool):
    slots = _slots(forest)
    if kind == "relabel":
        node = rng.choice(slots)[0]
        choices = sorted(set(pool) - {node.letter})
        if not choices:
            return None
        old, node.letter = node.letter, rng.choice(choices)
        return f"relabel {old} -> {node.letter}"
    if kind == "swap":
        groups = [forest.roots] + [n.children for n, _, _ in slots]
        pairs = [(g, i) for g in groups for i in range(len(g) - 1)]
        if not pairs:
            return None
        group, i = rng.choice(pairs)
        group[i], group[i + 1] = group[i + 1], group[i]
        return f"swap siblings {group[i + 1].letter} <-> {group[i].letter}"
    if kind == "data":
        leaves = forest.leaves()
        if not leaves:
            return None
        leaf = rng.choice(leaves)
        values = sorted({n.data for n in leaves} - {leaf.data})
        new = rng.choice(values) if values and rng.random() < 0.7 else _fresh(forest)
        old, leaf.data = leaf.data, new
        return f"data {leaf.letter} @{old} -> @{new}"
    if kind == "delete":
        leaves = [(n, c, par) for n, c, par in slots if n.is_leaf]
        if not leaves:
            return None
        node, container, parent = rng.choice(leaves)
        container.remove(node)
        if parent is not None and parent.is_leaf:
            parent.data = _fresh(forest)
        return f"delete {node.letter}"
    if kind == "reparent":
        node, container, parent = rng.choice(slots)
        inside = _subtree_ids(node)
        targets = [None] + [n for n, _, _ in slots if id(n) not in inside]
        target = rng.choice(targets)
        container.remove(node)
        if parent is not None and parent.is_leaf:
            parent.data = _fresh(forest)
        dest = forest.roots if target is None else target.children
        if target is not None and target.data is not None:
            target.data = None
        dest.insert(rng.randint(0, len(dest)), node)
        return f"reparent {node.letter} under {'<root>' if target is None else target.letter}"
    raise ValueError(kind)


def mutate_forest_described(forest: LeafDataForest, seed: int,
                            alphabet: Sequence[str] | None = None,
                            ) -> tuple[LeafDataForest, str, str]:
    """One random edit, deterministic in ``seed``; returns ``(forest, kind, description)``.

    The input is not modified and the result always differs from it.
    """
    if not forest.roots:
        raise ValueError("cannot mutate an empty forest")
    rng = random.Random(seed)
    pool = list(alphabet) if alphabet is not None else []
    pool = sorted(set(pool) | {n.letter for n in forest.nodes()})
    before = forest.to_text()
    kinds = list(EDIT_KINDS)
    for _ in range(64):
        kind = rng.choice(kinds)
        out = forest.copy()
        what = _try(kind, out, rng, pool)
        if what is not None and out.to_text() != before:
            out.validate()
            return out, kind, what
    out = forest.copy()
    leaf = out.leaves()[0]
    leaf.data = _fresh(out)
    return out, "data", f"data {leaf.letter} -> @{leaf.data}"


def mutate_forest(forest: LeafDataForest, seed: int,
                  alphabet: Sequence[str] | None = None) -> LeafDataForest:
    return mutate_forest_described(forest, seed, alphabet)[0]


# ---------------------------------------------------------------- generators


def random_forest(rng: random.Random, max_nodes: int = 12,
                  letters: Sequence[str] = ("a", "b", "c"), max_data: int = 3) -> LeafDataForest:
    n = rng.randint(1, max_nodes)
    nodes = [Node(rng.choice(letters)) for _ in range(n)]
    roots = []
    for i, node in enumerate(nodes):
        parent = rng.randint(-1, i - 1) if i else -1
        (roots if parent < 0 else nodes[parent].children).append(node)
    for node in nodes:
        if node.is_leaf:
            node.data = rng.randint(0, max_data)
    return LeafDataForest(roots)


def random_sentence(rng: random.Random, depth: int = 4,
                    letters: Sequence[str] = ("a", "b", "c")) -> Formula:
    """A random sentence: free variables are closed off with random quantifiers."""
    body = _random_formula(rng, depth, letters)
    for v in ("x", "y"):
        body = (Exists if rng.random() < 0.5 else Forall)(v, body)
    return body


def _random_formula(rng, depth, letters) -> Formula:
    var = lambda: rng.choice("xy")  # noqa: E731
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.35:
            return Letter(rng.choice(letters), var())
        return Rel(rng.choice(RELATIONS), var(), var())
    kind = rng.choice(("not", "and", "or", "implies", "exists", "forall"))
    sub = lambda: _random_formula(rng, depth - 1, letters)  # noqa: E731
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And((sub(), sub()))
    if kind == "or":
        return Or((sub(), sub()))
    if kind == "implies":
        return Implies(sub(), sub())
    return (Exists if kind == "exists" else Forall)(var(), sub())
