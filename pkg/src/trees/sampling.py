"""
Seeded random decorated trees for the property checks.
"""
import random
from typing import Sequence

from src.trees.decorated import DecoratedTree, EdgeDecoration
from src.trees.multi_index import MultiIndex


def random_multi_index(rng: random.Random, dim: int, max_entry: int) -> MultiIndex:
    return tuple(rng.randint(0, max_entry) for _ in range(dim))


def random_edge(rng: random.Random, dim: int, kernel_labels: Sequence[str], max_derivative: int = 1
                ) -> EdgeDecoration:
    return EdgeDecoration(rng.choice(list(kernel_labels)), random_multi_index(rng, dim, max_derivative))


def random_tree(rng: random.Random, dim: int, max_edges: int, kernel_labels: Sequence[str] = ("t",),
                noise_labels: Sequence[str] = ("0", "l"), max_decoration: int = 2, max_derivative: int = 1,
                positive: bool = False) -> DecoratedTree:
    """A tree with at most max_edges kernel edges; positive=True gives an element of T+ (no root noise)."""
    budget = rng.randint(0, max_edges)

    def grow(edges: int, root: bool) -> DecoratedTree:
        decoration = random_multi_index(rng, dim, max_decoration)
        noise = None if (positive and root) else rng.choice(list(noise_labels))
        branches = []
        while edges > 0:
            size = rng.randint(0, edges - 1)
            edges -= size + 1
            edge = random_edge(rng, dim, kernel_labels, max_derivative)
            branches.append((edge, grow(size, False)))
        return DecoratedTree(decoration, noise, tuple(branches))

    return grow(budget, True)


def random_trees(rng: random.Random, count: int, dim: int, max_edges: int, **options) -> list[DecoratedTree]:
    return [random_tree(rng, dim, max_edges, **options) for _ in range(count)]
