import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from src.classical.coproducts import bck_coproduct, ec_coproduct
from src.classical.trees import DOT, PlainForest, PlainTree, trees_up_to
from src.trees.combination import Scalar, is_zero_scalar, normalize_scalar


class Coproduct(str, Enum):
    BCK = "bck"
    EC = "ec"


@dataclass
class ClassicalCharacter:
    """alpha on trees; `empty` is alpha(1), the coefficient of y in the B-series.

    On forests the character is multiplicative and the empty forest gives 1.
    """
    values: dict[PlainTree, Scalar] = field(default_factory=dict)
    empty: Scalar = Fraction(1)

    def __post_init__(self):
        self.values = {t: normalize_scalar(v) for t, v in self.values.items() if not is_zero_scalar(v)}
        self.empty = normalize_scalar(self.empty)

    def __call__(self, x: PlainTree | PlainForest) -> Scalar:
        if isinstance(x, PlainTree):
            return self.values.get(x, Fraction(0))
        value: Scalar = Fraction(1)
        for t in x.trees:
            value = value * self.values.get(t, Fraction(0))
        return value

    def max_order(self) -> int:
        return max((t.order for t in self.values), default=0)

    def restricted(self, max_nodes: int) -> "ClassicalCharacter":
        return ClassicalCharacter({t: v for t, v in self.values.items() if t.order <= max_nodes}, self.empty)

    def to_records(self) -> dict:
        return {
            "empty": str(self.empty),
            "values": {t.key: str(v) for t, v in sorted(self.values.items())},
        }


def counit(empty: Scalar = 1) -> ClassicalCharacter:
    """epsilon: zero on every tree."""
    return ClassicalCharacter({}, empty)


def ec_counit() -> ClassicalCharacter:
    """Counit for the EC convolution: 1 on the single node, zero elsewhere."""
    return ClassicalCharacter({DOT: 1}, 0)


def exact_flow_character(max_nodes: int) -> ClassicalCharacter:
    return ClassicalCharacter({t: Fraction(1, t.density) for t in trees_up_to(max_nodes)}, 1)


def convolve(alpha: ClassicalCharacter, beta: ClassicalCharacter, coproduct: Coproduct | str,
             max_nodes: int) -> ClassicalCharacter:
    """(alpha (x) beta) o Delta on all trees up to max_nodes."""
    coproduct = Coproduct(coproduct)
    delta: Callable = bck_coproduct if coproduct == Coproduct.BCK else ec_coproduct
    values = {}
    for tree in trees_up_to(max_nodes):
        total: Scalar = Fraction(0)
        for (left, right), c in delta(tree).items():
            total = total + c * alpha(left) * beta(right)
        values[tree] = total
    empty = alpha.empty * beta.empty if coproduct == Coproduct.BCK else beta.empty
    return ClassicalCharacter(values, empty)


def bck_inverse(alpha: ClassicalCharacter, max_nodes: int) -> ClassicalCharacter:
    """Inverse in the Butcher group; requires alpha(1) = 1."""
    if alpha.empty != 1:
        raise ValueError("the Butcher group inverse needs alpha(1) = 1")
    inverse = ClassicalCharacter({}, 1)
    for tree in trees_up_to(max_nodes):
        total: Scalar = Fraction(0)
        for (left, right), c in bck_coproduct(tree).items():
            if left.is_empty:
                continue
            total = total + c * alpha(left) * inverse(right)
        inverse.values[tree] = normalize_scalar(-total)
    return ClassicalCharacter(inverse.values, 1)


def modified_field_character(alpha: ClassicalCharacter, max_nodes: int) -> ClassicalCharacter:
    """beta with beta(1) = 0 and beta *_EC e = alpha: the backward-error vector field."""
    flow = exact_flow_character(max_nodes)
    beta = ClassicalCharacter({}, 0)
    for tree in trees_up_to(max_nodes):
        total: Scalar = Fraction(0)
        for (extracted, contracted), c in ec_coproduct(tree).items():
            if contracted.trees == (DOT,):
                continue
            total = total + c * beta(extracted) * flow(contracted)
        beta.values[tree] = normalize_scalar(alpha(tree) - total)
    return ClassicalCharacter(beta.values, 0)


def random_rational(rng: random.Random, span: int = 5, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def random_character(rng: random.Random, max_nodes: int, empty: Scalar = 1) -> ClassicalCharacter:
    return ClassicalCharacter({t: random_rational(rng) for t in trees_up_to(max_nodes)}, empty)
