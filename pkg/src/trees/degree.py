from fractions import Fraction
from typing import TYPE_CHECKING

from src.trees import multi_index as mi
from src.trees.combination import LinearCombination
from src.trees.decorated import DecoratedTree

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


def degree(tree: DecoratedTree, spec: "EquationSpec") -> Fraction:
    """deg(X^k Xi_l prod I_a(tau)) = |k|_s + |l|_s + sum(|a|_s + deg tau)."""
    cache = spec._cache.setdefault("degree", {})
    hit = cache.get(tree.key)
    if hit is not None:
        return hit
    value = mi.weight(tree.decoration, spec.scaling) + spec.label_degree(tree.noise_label)
    for edge, child in tree.branches:
        value += spec.edge_degree(edge) + degree(child, spec)
    cache[tree.key] = value
    return value


def project_leq_degree(u: LinearCombination, gamma: Fraction | float, spec: "EquationSpec") -> LinearCombination:
    """Drop every term of degree > gamma; gamma may be float('inf')."""
    return u.filter(lambda tree: degree(tree, spec) <= gamma)
