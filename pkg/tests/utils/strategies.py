"""
Hypothesis strategies for decorated trees and characters, built on the seeded
samplers of the package.
"""
from fractions import Fraction

from hypothesis import strategies as st

from src.trees.decorated import EdgeDecoration
from src.trees.sampling import random_tree

DIM = 2
KERNELS = ("t",)
NOISES = ("0", "l")


def rationals(span: int = 5, max_den: int = 4):
    return st.builds(Fraction, st.integers(-span, span), st.integers(1, max_den))


def edges(dim: int = DIM, max_derivative: int = 2):
    return st.builds(
        EdgeDecoration,
        st.sampled_from(KERNELS),
        st.tuples(*(st.integers(0, max_derivative) for _ in range(dim))),
    )


@st.composite
def decorated_trees(draw, dim: int = DIM, max_edges: int = 3, positive: bool = False):
    rng = draw(st.randoms(use_true_random=False))
    return random_tree(rng, dim, max_edges, KERNELS, NOISES, positive=positive)


def positive_trees(dim: int = DIM, max_edges: int = 3):
    return decorated_trees(dim=dim, max_edges=max_edges, positive=True)


@st.composite
def characters(draw, trees):
    """{tree: rational} over a subset of the given trees."""
    chosen = draw(st.lists(st.sampled_from(list(trees)), unique=True, max_size=4))
    return {t: draw(rationals()) for t in chosen}
