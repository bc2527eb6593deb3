"""
Characters: finite-support functionals on decorated trees.

LINEAR characters are read off their table. FOREST characters are
multiplicative for the forest product and send the tree 1 (the empty forest)
to 1. TREE_PRODUCT characters live on T+ and are multiplicative for the tree
product; their table holds values on the generators X_i and planted trees.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable

from src.trees import multi_index as mi
from src.trees.combination import Scalar, is_zero_scalar, normalize_scalar, scalar_record
from src.trees.decorated import DecoratedTree, Forest, monomial
from src.utils.errors import MalformedLeft


class CharacterMode(str, Enum):
    LINEAR = "linear"
    FOREST = "forest"
    TREE_PRODUCT = "tree_product"


@dataclass
class Character:
    values: dict[DecoratedTree, Scalar] = field(default_factory=dict)
    mode: CharacterMode = CharacterMode.LINEAR

    def __post_init__(self):
        self.values = {
            t: normalize_scalar(v) for t, v in self.values.items() if not is_zero_scalar(v)
        }
        if self.mode == CharacterMode.TREE_PRODUCT:
            for t in self.values:
                if t.noise is not None:
                    raise MalformedLeft(f"tree-product character defined on a noisy root: {t.key}")
                monomial_generator = not t.branches and sum(t.decoration) == 1
                planted_generator = len(t.branches) == 1 and not any(t.decoration)
                if not (monomial_generator or planted_generator):
                    raise ValueError(f"{t.key} is not a generator of T+")

    def __call__(self, x: DecoratedTree | Forest) -> Scalar:
        if isinstance(x, Forest):
            if self.mode != CharacterMode.FOREST:
                raise TypeError("only forest characters evaluate on forests")
            return math.prod((self.values.get(t, Fraction(0)) for t in x.trees), start=Fraction(1))
        if self.mode == CharacterMode.LINEAR:
            return self.values.get(x, Fraction(0))
        if self.mode == CharacterMode.FOREST:
            return Fraction(1) if x.is_unit else self.values.get(x, Fraction(0))
        return self._tree_product_value(x)

    def _tree_product_value(self, tree: DecoratedTree) -> Scalar:
        if tree.noise is not None:
            raise MalformedLeft(f"{tree.key} carries a root noise")
        value: Scalar = Fraction(1)
        dim = tree.dim
        for i, k in enumerate(tree.decoration):
            if k:
                value = value * self.values.get(monomial(mi.unit(i, dim)), Fraction(0)) ** k
        for factor in tree.planted_factors():
            value = value * self.values.get(factor, Fraction(0))
        return normalize_scalar(value)

    def support(self) -> list[DecoratedTree]:
        return sorted(self.values)

    def restricted(self, keep: Callable[[DecoratedTree], bool]) -> "Character":
        return Character({t: v for t, v in self.values.items() if keep(t)}, self.mode)

    def to_records(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "values": [{**scalar_record(self.values[t]), "tree": t.key} for t in self.support()],
        }
