"""
Decorated rooted trees and forests.

A tree is X^k Xi_l prod_i I_{a_i}(tau_i): a node decoration k, an optional
root noise l (None stands for Xi_0) and a sorted multiset of planted branches.
Every tree carries its canonical grammar string in `key`; equality and hashing
go through it.
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from src.trees import multi_index as mi
from src.trees.multi_index import MultiIndex
from src.utils.errors import NoiseClash

ZERO_NOISE = "0"


class EdgeDecoration(NamedTuple):
    label: str
    derivative: MultiIndex

    def shifted(self, ell: MultiIndex) -> "EdgeDecoration":
        return EdgeDecoration(self.label, mi.add(self.derivative, ell))

    def lowered(self, ell: MultiIndex) -> "EdgeDecoration | None":
        d = mi.sub(self.derivative, ell)
        return None if d is None else EdgeDecoration(self.label, d)

    def render(self) -> str:
        return f"{self.label},{mi.render(self.derivative)}"


Branch = tuple[EdgeDecoration, "DecoratedTree"]


def _normalize_noise(noise: str | None) -> str | None:
    return None if noise in (None, ZERO_NOISE) else noise


def _branch_order(branch: Branch) -> tuple:
    edge, child = branch
    return (edge.label, edge.derivative, child.key)


@dataclass(frozen=True, eq=False)
class DecoratedTree:
    decoration: MultiIndex
    noise: str | None = None
    branches: tuple[Branch, ...] = ()
    key: str = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "noise", _normalize_noise(self.noise))
        object.__setattr__(self, "branches", tuple(sorted(self.branches, key=_branch_order)))
        object.__setattr__(self, "key", self._encode())

    def _encode(self) -> str:
        factors = []
        if not mi.is_zero(self.decoration):
            factors.append(f"X^{mi.render(self.decoration)}")
        if self.noise is not None:
            factors.append(f"Xi[{self.noise}]")
        for edge, child in self.branches:
            factors.append(f"I[{edge.render()}]({child.key})")
        return "*".join(factors) if factors else "1"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DecoratedTree) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "DecoratedTree") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"DecoratedTree({self.key})"

    def __str__(self) -> str:
        return self.key

    @property
    def dim(self) -> int:
        return len(self.decoration)

    @property
    def is_unit(self) -> bool:
        return self.key == "1"

    @property
    def noise_label(self) -> str:
        return ZERO_NOISE if self.noise is None else self.noise

    @cached_property
    def symmetry_factor(self) -> int:
        counts = Counter(self.branches)
        s = mi.factorial(self.decoration)
        for (_, child), m in counts.items():
            s *= math.factorial(m) * child.symmetry_factor ** m
        return s

    @cached_property
    def node_count(self) -> int:
        return 1 + sum(child.node_count for _, child in self.branches)

    @cached_property
    def edge_count(self) -> int:
        """Kernel edges plus noise leaves."""
        own = 0 if self.noise is None else 1
        return own + sum(1 + child.edge_count for _, child in self.branches)

    @cached_property
    def noise_count(self) -> int:
        own = 0 if self.noise is None else 1
        return own + sum(child.noise_count for _, child in self.branches)

    @cached_property
    def zero_noise_count(self) -> int:
        """Number of nodes carrying Xi_0."""
        own = 1 if self.noise is None else 0
        return own + sum(child.zero_noise_count for _, child in self.branches)

    def polynomial_weight(self, scaling: Sequence[Fraction]) -> Fraction:
        """Sum of scaled node decorations and edge derivatives."""
        w = mi.weight(self.decoration, scaling)
        for edge, child in self.branches:
            w += mi.weight(edge.derivative, scaling) + child.polynomial_weight(scaling)
        return w

    def planted_factors(self) -> list["DecoratedTree"]:
        return [planted(edge, child) for edge, child in self.branches]

    def with_branches(self, branches: Iterable[Branch]) -> "DecoratedTree":
        return DecoratedTree(self.decoration, self.noise, tuple(branches))

    def positive_part(self) -> "DecoratedTree":
        """The T+ part X^k prod I(tau_i), root noise dropped."""
        return DecoratedTree(self.decoration, None, self.branches)

    def labels(self) -> set[str]:
        out = {self.noise_label}
        for edge, child in self.branches:
            out.add(edge.label)
            out |= child.labels()
        return out


def unit_tree(dim: int) -> DecoratedTree:
    return DecoratedTree(mi.zero(dim))


def monomial(k: MultiIndex) -> DecoratedTree:
    return DecoratedTree(tuple(k))


def noise_tree(label: str, dim: int) -> DecoratedTree:
    return DecoratedTree(mi.zero(dim), label)


def planted(edge: EdgeDecoration, child: DecoratedTree) -> DecoratedTree:
    return DecoratedTree(mi.zero(child.dim), None, ((edge, child),))


def tree_product(sigma: DecoratedTree, tau: DecoratedTree) -> DecoratedTree:
    """Identify the roots of sigma and tau."""
    if sigma.noise is not None and tau.noise is not None:
        raise NoiseClash(f"both roots carry a noise: {sigma.key} and {tau.key}")
    return DecoratedTree(
        mi.add(sigma.decoration, tau.decoration),
        sigma.noise if sigma.noise is not None else tau.noise,
        sigma.branches + tau.branches,
    )


def product_of(trees: Iterable[DecoratedTree], dim: int) -> DecoratedTree:
    out = unit_tree(dim)
    for t in trees:
        out = tree_product(out, t)
    return out


def canonicalize(tree: DecoratedTree) -> DecoratedTree:
    """Rebuild a tree bottom-up; construction already sorts, so this is idempotent."""
    return DecoratedTree(
        tuple(tree.decoration),
        tree.noise,
        tuple((EdgeDecoration(e.label, tuple(e.derivative)), canonicalize(c)) for e, c in tree.branches),
    )


@dataclass(frozen=True, eq=False)
class Forest:
    """Multiset of trees; the tree 1 is the empty forest."""
    trees: tuple[DecoratedTree, ...] = ()
    key: str = field(init=False, repr=False)

    def __post_init__(self):
        kept = tuple(sorted(t for t in self.trees if not t.is_unit))
        object.__setattr__(self, "trees", kept)
        object.__setattr__(self, "key", "{" + " , ".join(t.key for t in kept) + "}")

    @classmethod
    def of(cls, *trees: DecoratedTree) -> "Forest":
        return cls(tuple(trees))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Forest) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Forest") -> bool:
        return self.key < other.key

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __repr__(self) -> str:
        return f"Forest({self.key})"

    def __str__(self) -> str:
        return self.key

    @property
    def is_empty(self) -> bool:
        return not self.trees

    def __mul__(self, other: "Forest") -> "Forest":
        return Forest(self.trees + other.trees)

    @cached_property
    def symmetry_factor(self) -> int:
        s = 1
        for t, m in Counter(self.trees).items():
            s *= math.factorial(m) * t.symmetry_factor ** m
        return s
