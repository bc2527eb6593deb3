"""
Coproducts on decorated trees: Delta2 (and its hat variant), Delta_circ and Delta1.

Every coproduct returns a SplitCombination keyed by (left, right):
  - delta2: left in T+ (the cut branches), right the trunk holding the root;
  - delta_circ / delta1: left a Forest of extracted trees, right the
    contracted tree.
The l-sums of delta2 are truncated at |l|_s <= cap.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from src.trees import multi_index as mi
from src.trees.combination import LinearCombination
from src.trees.decorated import (
    DecoratedTree,
    EdgeDecoration,
    Forest,
    monomial,
    noise_tree,
    planted,
    tree_product,
    unit_tree,
)

SplitCombination = LinearCombination[tuple]


def _times(u: SplitCombination, v: SplitCombination, left_product, right_product) -> SplitCombination:
    out: SplitCombination = LinearCombination()
    for (l1, r1), c1 in u.items():
        for (l2, r2), c2 in v.items():
            out.add_term((left_product(l1, l2), right_product(r1, r2)), c1 * c2)
    return out


def tree_times(u: SplitCombination, v: SplitCombination) -> SplitCombination:
    return _times(u, v, tree_product, tree_product)


def _forest_times(u: SplitCombination, v: SplitCombination) -> SplitCombination:
    return _times(u, v, lambda a, b: a * b, tree_product)


def _polynomial_split(k: mi.MultiIndex) -> SplitCombination:
    """Delta2 X^k = sum_j (k choose j) X^j (x) X^(k-j)."""
    out: SplitCombination = LinearCombination()
    for j in mi.below(k):
        out.add_term((monomial(j), monomial(mi.sub(k, j))), mi.binomial(k, j))
    return out


def _shifts(cap: Fraction, scaling: tuple[Fraction, ...]) -> list[mi.MultiIndex]:
    return list(mi.up_to_weight(len(scaling), scaling, cap))


@lru_cache(maxsize=None)
def _delta2(tau: DecoratedTree, cap: Fraction, scaling: tuple[Fraction, ...]) -> SplitCombination:
    dim = tau.dim
    unit = unit_tree(dim)
    out = _polynomial_split(tau.decoration)
    if tau.noise is not None:
        out = tree_times(out, LinearCombination.single((unit, noise_tree(tau.noise, dim))))
    for edge, child in tau.branches:
        out = tree_times(out, _delta2_planted(edge, child, cap, scaling))
    return out


@lru_cache(maxsize=None)
def _delta2_planted(edge: EdgeDecoration, child: DecoratedTree, cap: Fraction,
                    scaling: tuple[Fraction, ...]) -> SplitCombination:
    """Delta2 I_a(tau) = (id (x) I_a) Delta2 tau + sum_l I_{a+l}(tau) / l! (x) X^l."""
    out: SplitCombination = LinearCombination()
    for (left, right), c in _delta2(child, cap, scaling).items():
        out.add_term((left, planted(edge, right)), c)
    for ell in _shifts(cap, scaling):
        out.add_term((planted(edge.shifted(ell), child), monomial(ell)), Fraction(1, mi.factorial(ell)))
    return out


def delta2(tau: DecoratedTree, cap: Fraction | int, scaling: Sequence[Fraction], hat: bool = False
           ) -> SplitCombination:
    """Delta2 tau; with `hat` a root noise l != 0 may also stay with the whole tree (tau (x) 1)."""
    if cap < 0:
        raise ValueError("the polynomial cap must be non-negative")
    out = _delta2(tau, Fraction(cap), tuple(Fraction(s) for s in scaling)).copy()
    if hat and tau.noise is not None:
        out.add_term((tau, unit_tree(tau.dim)), 1)
    return out


def delta_hat2(tau: DecoratedTree, cap: Fraction | int, scaling: Sequence[Fraction]) -> SplitCombination:
    return delta2(tau, cap, scaling, hat=True)


@lru_cache(maxsize=None)
def _delta_circ(tau: DecoratedTree, cap: Fraction, scaling: tuple[Fraction, ...]) -> SplitCombination:
    """Delta_circ: trivial on X^k and on the root noise, Delta1 inside every branch."""
    out: SplitCombination = LinearCombination.single((Forest(), tau.with_branches(())))
    for edge, child in tau.branches:
        branch: SplitCombination = LinearCombination()
        for (extracted, contracted), c in _delta1(child, cap, scaling).items():
            branch.add_term((extracted, planted(edge, contracted)), c)
        out = _forest_times(out, branch)
    return out


@lru_cache(maxsize=None)
def _delta1(tau: DecoratedTree, cap: Fraction, scaling: tuple[Fraction, ...]) -> SplitCombination:
    """Delta1 = M^{(13)(2)} (Delta_circ (x) id) hat-Delta2: the trunk joins the extracted forest."""
    out: SplitCombination = LinearCombination()
    for (cut, trunk), c in delta2(tau, cap, scaling, hat=True).items():
        for (extracted, contracted), d in _delta_circ(cut, cap, scaling).items():
            out.add_term((extracted * Forest.of(trunk), contracted), c * d)
    return out


def delta_circ(tau: DecoratedTree, cap: Fraction | int, scaling: Sequence[Fraction]) -> SplitCombination:
    return _delta_circ(tau, Fraction(cap), tuple(Fraction(s) for s in scaling)).copy()


def delta1(tau: DecoratedTree, cap: Fraction | int, scaling: Sequence[Fraction]) -> SplitCombination:
    if cap < 0:
        raise ValueError("the polynomial cap must be non-negative")
    return _delta1(tau, Fraction(cap), tuple(Fraction(s) for s in scaling)).copy()


def pairing(sigma: DecoratedTree, tau: DecoratedTree, tau_bar: DecoratedTree, cap: Fraction | int,
            scaling: Sequence[Fraction]) -> Fraction:
    """m(sigma, tau, tau_bar) = <sigma / S(sigma) (x) tau / S(tau), Delta2 tau_bar>."""
    c = delta2(tau_bar, cap, scaling).coefficient((sigma, tau))
    return Fraction(c)


def sufficient_cap(trees, scaling: Sequence[Fraction]) -> Fraction:
    """Largest polynomial weight among the given trees; no pairing with them is lost below it."""
    return max((t.polynomial_weight(scaling) for t in trees), default=Fraction(0))
