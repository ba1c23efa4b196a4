"""Colored rooted trees (N-trees).

A tree is stored in canonical form: its children are kept sorted by their
canonical key, so two structurally equal trees compare (and hash) equal and
serialize to the same string.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

MAX_ORDER = 6
MAX_COLORS = 8


class TreeLimitError(ValueError):
    """Raised when an enumeration request exceeds the configured guard limits."""


@dataclass(frozen=True, eq=False)
class ColoredTree:
    """Rooted tree whose nodes carry colors in ``1..N``.

    Use :func:`tree` or :meth:`ColoredTree.make` to build instances; both sort
    the children into canonical order.
    """

    root_color: int
    children: tuple["ColoredTree", ...] = ()
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.root_color < 1:
            raise ValueError(f"colors are 1-based, got {self.root_color}")
        kids = tuple(sorted(self.children, key=lambda t: t.key))
        object.__setattr__(self, "children", kids)
        order = 1 + sum(c.order for c in kids)
        object.__setattr__(
            self, "_key", (order, self.root_color, tuple(c.key for c in kids))
        )

    @classmethod
    def make(cls, root_color: int, children: Sequence["ColoredTree"] = ()) -> "ColoredTree":
        return cls(root_color, tuple(children))

    @property
    def key(self) -> tuple:
        """Canonical sort key ``(order, color, child keys)``."""
        return self._key

    @property
    def order(self) -> int:
        return self._key[0]

    def __eq__(self, other):
        if not isinstance(other, ColoredTree):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other: "ColoredTree") -> bool:
        return self._key < other._key

    def __repr__(self):
        return f"ColoredTree({self.encode()!r})"

    def encode(self) -> str:
        """Depth-first string form, e.g. ``3[1,1]`` for a root of color 3 with
        two leaves of color 1."""
        if not self.children:
            return str(self.root_color)
        return f"{self.root_color}[{','.join(c.encode() for c in self.children)}]"

    @cached_property
    def multiset(self) -> tuple[tuple["ColoredTree", int], ...]:
        """Children grouped as ``((tree, multiplicity), ...)``."""
        return tuple(
            (child, len(list(group)))
            for child, group in itertools.groupby(self.children)
        )

    def colors(self) -> tuple[int, ...]:
        """Node colors in depth-first (pre-order) sequence."""
        out = [self.root_color]
        for c in self.children:
            out.extend(c.colors())
        return tuple(out)

    def flatten(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Pre-order ``(parents, colors)``; the root has parent ``-1``."""
        parents: list[int] = []
        colors: list[int] = []

        def visit(t: ColoredTree, parent: int) -> None:
            me = len(parents)
            parents.append(parent)
            colors.append(t.root_color)
            for c in t.children:
                visit(c, me)

        visit(self, -1)
        return tuple(parents), tuple(colors)

    def recolor(self, mapping) -> "ColoredTree":
        """Apply ``mapping(color) -> color`` to every node."""
        return ColoredTree(mapping(self.root_color),
                           tuple(c.recolor(mapping) for c in self.children))

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "root_color": self.root_color,
            "children": [c.to_dict() for c in self.children],
            "sigma": symmetry(self),
            "gamma": density(self),
        }


def tree(spec) -> ColoredTree:
    """Build a tree from nested ``(color, [children...])`` or a bare color.

    >>> tree((3, [1, 1])).encode()
    '3[1,1]'
    """
    if isinstance(spec, ColoredTree):
        return spec
    if isinstance(spec, int):
        return ColoredTree(spec)
    color, kids = spec
    return ColoredTree(color, tuple(tree(k) for k in kids))


def parse(text: str) -> ColoredTree:
    """Inverse of :meth:`ColoredTree.encode`."""
    pos = 0

    def node() -> ColoredTree:
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"expected color at offset {pos} in {text!r}")
        color = int(text[start:pos])
        kids = []
        if pos < len(text) and text[pos] == "[":
            pos += 1
            kids.append(node())
            while text[pos] == ",":
                pos += 1
                kids.append(node())
            if text[pos] != "]":
                raise ValueError(f"expected ']' at offset {pos} in {text!r}")
            pos += 1
        return ColoredTree(color, tuple(kids))

    try:
        t = node()
    except IndexError:
        raise ValueError(f"unexpected end of input in {text!r}") from None
    if pos != len(text):
        raise ValueError(f"trailing input in {text!r}")
    return t


def symmetry(t: ColoredTree) -> int:
    """sigma(t) = prod m_j! * sigma(t_j)**m_j over distinct children t_j."""
    out = 1
    for child, m in t.multiset:
        out *= math.factorial(m) * symmetry(child) ** m
    return out


def density(t: ColoredTree) -> int:
    """gamma(t) = |t| * prod gamma(child); does not depend on colors."""
    out = t.order
    for c in t.children:
        out *= density(c)
    return out


@dataclass(frozen=True)
class NTreeSet:
    """All canonical N-colored trees of order ``<= max_order``."""

    max_order: int
    colors: int
    by_order: tuple[tuple[ColoredTree, ...], ...]

    @property
    def trees(self) -> tuple[ColoredTree, ...]:
        return tuple(itertools.chain.from_iterable(self.by_order))

    def of_order(self, k: int) -> tuple[ColoredTree, ...]:
        return self.by_order[k - 1]

    def up_to(self, k: int) -> tuple[ColoredTree, ...]:
        return tuple(itertools.chain.from_iterable(self.by_order[:k]))

    def __len__(self):
        return sum(len(g) for g in self.by_order)

    def __iter__(self):
        return iter(self.trees)

    def __contains__(self, t):
        return isinstance(t, ColoredTree) and t.order <= self.max_order and t in self.by_order[t.order - 1]


def _multisets(pool: Sequence[ColoredTree], total: int, start: int = 0) -> Iterator[list[ColoredTree]]:
    # non-decreasing index sequences into ``pool`` whose orders sum to ``total``
    if total == 0:
        yield []
        return
    for idx in range(start, len(pool)):
        t = pool[idx]
        if t.order > total:
            continue
        for rest in _multisets(pool, total - t.order, idx):
            yield [t, *rest]


def enumerate_trees(q: int, N: int, *, max_order: int = MAX_ORDER,
                    max_colors: int = MAX_COLORS) -> NTreeSet:
    """Enumerate every canonical colored rooted tree with at most ``q`` nodes.

    Trees of order ``n`` are built by attaching a root of each color to every
    multiset of smaller trees whose orders sum to ``n - 1``.
    """
    if q < 1 or N < 1:
        raise ValueError("need q >= 1 and N >= 1")
    if q > max_order or N > max_colors:
        raise TreeLimitError(
            f"enumeration of order {q} with {N} colors exceeds the guard "
            f"(order <= {max_order}, colors <= {max_colors})"
        )
    levels: list[tuple[ColoredTree, ...]] = [
        tuple(ColoredTree(c) for c in range(1, N + 1))
    ]
    for n in range(2, q + 1):
        pool = [t for level in levels for t in level]
        new = []
        for color in range(1, N + 1):
            for kids in _multisets(pool, n - 1):
                new.append(ColoredTree(color, tuple(kids)))
        levels.append(tuple(sorted(new)))
    return NTreeSet(q, N, tuple(levels))


@dataclass(frozen=True)
class LabeledTree:
    """A tree whose nodes (pre-order) carry stage labels in ``1..s``.

    ``edges`` holds ``(parent_label, child_label, child_color)`` triples.
    """

    base: ColoredTree
    labels: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    @property
    def root_label(self) -> int:
        return self.labels[0]

    @property
    def root_color(self) -> int:
        return self.base.root_color


def labelings(t: ColoredTree, s: int) -> Iterator[LabeledTree]:
    """Yield all ``s**|t|`` assignments of labels ``1..s`` to the nodes of ``t``."""
    if s < 1:
        raise ValueError("stage count must be >= 1")
    parents, colors = t.flatten()
    for labels in itertools.product(range(1, s + 1), repeat=len(parents)):
        edges = tuple(
            (labels[p], labels[k], colors[k])
            for k, p in enumerate(parents) if p >= 0
        )
        yield LabeledTree(t, labels, edges)
