"""Leaf-data forests and their indented text format.

Each node has a letter; leaves additionally carry a non-negative integer
data value. Text format, two spaces of indentation per level::

    p0_3
      c1 @0
      c2 @1
    c4 @2
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class ForestError(ValueError):
    pass


@dataclass
class Node:
    letter: str
    children: list["Node"] = field(default_factory=list)
    data: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class LeafDataForest:
    roots: list[Node] = field(default_factory=list)

    def nodes(self) -> list[Node]:
        """All nodes in document order (pre-order, roots left to right)."""
        out = []
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes() if n.is_leaf]

    def __len__(self):
        return len(self.nodes())

    def copy(self) -> "LeafDataForest":
        return copy.deepcopy(self)

    def validate(self) -> None:
        for node in self.nodes():
            if node.is_leaf:
                if node.data is None or node.data < 0:
                    raise ForestError(f"leaf {node.letter!r} needs a non-negative data value")
            elif node.data is not None:
                raise ForestError(f"internal node {node.letter!r} carries data")

    def to_text(self) -> str:
        lines = []

        def walk(node, depth):
            pad = "  " * depth
            if node.is_leaf:
                lines.append(f"{pad}{node.letter} @{node.data}")
            else:
                lines.append(f"{pad}{node.letter}")
                for child in node.children:
                    walk(child, depth + 1)

        for root in self.roots:
            walk(root, 0)
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "LeafDataForest":
        roots: list[Node] = []
        path: list[Node] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            indent = len(raw) - len(raw.lstrip(" "))
            if indent % 2:
                raise ForestError(f"line {lineno}: odd indentation")
            depth = indent // 2
            if depth > len(path):
                raise ForestError(f"line {lineno}: indentation skips a level")
            words = raw.split()
            data = None
            if len(words) == 2 and words[1].startswith("@"):
                try:
                    data = int(words[1][1:])
                except ValueError:
                    raise ForestError(f"line {lineno}: bad data value {words[1]!r}") from None
            elif len(words) != 1:
                raise ForestError(f"line {lineno}: expected 'letter' or 'letter @data'")
            node = Node(words[0], [], data)
            del path[depth:]
            if path:
                if path[-1].data is not None:
                    raise ForestError(f"line {lineno}: data value on an internal node")
                path[-1].children.append(node)
            else:
                roots.append(node)
            path.append(node)
        forest = cls(roots)
        forest.validate()
        return forest


class Structure:
    """Relations of a forest as boolean matrices indexed by document order.

    ``next`` relates consecutive siblings, and also consecutive roots.
    ``prec`` and ``dataeq`` only relate leaves.
    """

    def __init__(self, forest: LeafDataForest):
        nodes = forest.nodes()
        self.nodes = nodes
        n = self.size = len(nodes)
        pos = {id(node): i for i, node in enumerate(nodes)}
        self.letters = [node.letter for node in nodes]
        self.child = np.zeros((n, n), dtype=bool)
        self.next = np.zeros((n, n), dtype=bool)
        self.parent = [-1] * n
        for group in [forest.roots] + [node.children for node in nodes]:
            for a, b in zip(group, group[1:]):
                self.next[pos[id(a)], pos[id(b)]] = True
        for node in nodes:
            for ch in node.children:
                self.child[pos[id(node)], pos[id(ch)]] = True
                self.parent[pos[id(ch)]] = pos[id(node)]
        leaf = np.array([node.is_leaf for node in nodes], dtype=bool)
        self.leaf = leaf
        order = np.arange(n)
        self.prec = leaf[:, None] & leaf[None, :] & (order[:, None] < order[None, :])
        data = np.array([node.data if node.is_leaf and node.data is not None else -1
                         for node in nodes], dtype=np.int64)
        self.data = data
        self.dataeq = leaf[:, None] & leaf[None, :] & (data[:, None] == data[None, :])
        self.eq = np.eye(n, dtype=bool)

    @cached_property
    def _letter_index(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        arr = np.array(self.letters, dtype=object)
        for letter in set(self.letters):
            out[letter] = arr == letter
        return out

    def letter(self, a: str) -> np.ndarray:
        vec = self._letter_index.get(a)
        if vec is None:
            return np.zeros(self.size, dtype=bool)
        return vec

    def relation(self, name: str) -> np.ndarray:
        return {"child": self.child, "next": self.next, "prec": self.prec,
                "dataeq": self.dataeq, "eq": self.eq}[name]
