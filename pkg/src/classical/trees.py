"""
Undecorated rooted trees and forests.

Grammar: `.` is the single node, `B+(t1 t2 ...)` grafts trees on a new root.
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator

from src.utils.errors import GrammarError


@dataclass(frozen=True, eq=False)
class PlainTree:
    children: tuple["PlainTree", ...] = ()
    key: str = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(sorted(self.children)))
        if self.children:
            key = "B+(" + " ".join(c.key for c in self.children) + ")"
        else:
            key = "."
        object.__setattr__(self, "key", key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlainTree) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "PlainTree") -> bool:
        return (self.order, self.key) < (other.order, other.key)

    def __repr__(self) -> str:
        return f"PlainTree({self.key})"

    def __str__(self) -> str:
        return self.key

    @cached_property
    def order(self) -> int:
        """Number of nodes |tau|."""
        return 1 + sum(c.order for c in self.children)

    @cached_property
    def edges(self) -> int:
        return self.order - 1

    @cached_property
    def symmetry_factor(self) -> int:
        s = 1
        for child, m in Counter(self.children).items():
            s *= math.factorial(m) * child.symmetry_factor ** m
        return s

    @cached_property
    def density(self) -> int:
        """gamma(tau) = |tau| prod gamma(tau_j)."""
        return self.order * math.prod(c.density for c in self.children)


DOT = PlainTree()


def b_plus(*children: PlainTree) -> PlainTree:
    return PlainTree(tuple(children))


def ladder(n: int) -> PlainTree:
    t = DOT
    for _ in range(n - 1):
        t = b_plus(t)
    return t


def gamma_density(tree: PlainTree) -> int:
    return tree.density


@dataclass(frozen=True, eq=False)
class PlainForest:
    trees: tuple[PlainTree, ...] = ()
    key: str = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(sorted(self.trees)))
        object.__setattr__(self, "key", " ".join(t.key for t in self.trees) if self.trees else "1")

    @classmethod
    def of(cls, *trees: PlainTree) -> "PlainForest":
        return cls(tuple(trees))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlainForest) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "PlainForest") -> bool:
        return self.key < other.key

    def __mul__(self, other: "PlainForest") -> "PlainForest":
        return PlainForest(self.trees + other.trees)

    def __iter__(self):
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"PlainForest({self.key})"

    @property
    def is_empty(self) -> bool:
        return not self.trees

    @cached_property
    def order(self) -> int:
        return sum(t.order for t in self.trees)

    @cached_property
    def symmetry_factor(self) -> int:
        s = 1
        for t, m in Counter(self.trees).items():
            s *= math.factorial(m) * t.symmetry_factor ** m
        return s


EMPTY = PlainForest()


def parse_plain(text: str) -> PlainTree:
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def tree() -> PlainTree:
        nonlocal pos
        skip()
        if text.startswith(".", pos):
            pos += 1
            return DOT
        if text.startswith("B+(", pos):
            pos += 3
            children = []
            skip()
            while not text.startswith(")", pos):
                if pos >= len(text):
                    raise GrammarError(text, pos, "unterminated B+(")
                children.append(tree())
                skip()
            pos += 1
            return PlainTree(tuple(children))
        raise GrammarError(text, pos, "expected '.' or 'B+('")

    result = tree()
    skip()
    if pos != len(text):
        raise GrammarError(text, pos, "trailing input")
    return result


@lru_cache(maxsize=None)
def trees_of_order(n: int) -> tuple[PlainTree, ...]:
    if n < 1:
        return ()
    if n == 1:
        return (DOT,)
    return tuple(sorted(PlainTree(f) for f in _forests_of_order(n - 1, n - 1)))


def _forests_of_order(total: int, max_part: int) -> Iterator[tuple[PlainTree, ...]]:
    """Multisets of trees with the given total order, as nondecreasing tuples."""
    if total == 0:
        yield ()
        return
    candidates = [t for size in range(1, min(total, max_part) + 1) for t in trees_of_order(size)]
    candidates.sort()

    def extend(start: int, remaining: int, chosen: list[PlainTree]):
        if remaining == 0:
            yield tuple(chosen)
            return
        for i in range(start, len(candidates)):
            t = candidates[i]
            if t.order <= remaining:
                yield from extend(i, remaining - t.order, chosen + [t])

    yield from extend(0, total, [])


def trees_up_to(max_nodes: int) -> list[PlainTree]:
    return [t for n in range(1, max_nodes + 1) for t in trees_of_order(n)]
