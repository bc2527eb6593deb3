"""
Regularity-structures B-series.

B_-(alpha) = sum_tau alpha(tau) / S(tau) F_t(tau) over the support of alpha;
B_+^a(alpha) = sum_k alpha(X^k) Z_{(t, m+k)} / k! + sum alpha(I_a(tau)) / S(tau) F_t(tau)
for a = (t, m).
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Iterator

from src.symbolic.diff_expr import DiffExpr
from src.symbolic.elementary import elementary_differential
from src.trees import multi_index as mi
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination, is_zero_scalar
from src.trees.decorated import DecoratedTree, EdgeDecoration, monomial, product_of
from src.trees.degree import degree

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


@dataclass
class BSeriesMinus:
    coefficients: Character
    spec: "EquationSpec"

    def __post_init__(self):
        if self.coefficients.mode != CharacterMode.LINEAR:
            raise TypeError("B_- series take a linear character on T")

    @classmethod
    def from_combination(cls, u: LinearCombination, spec: "EquationSpec") -> "BSeriesMinus":
        """The series whose value is sum c_tau F(tau), i.e. alpha(tau) = S(tau) c_tau."""
        return cls(Character({t: c * t.symmetry_factor for t, c in u.items()}), spec)

    def as_combination(self) -> LinearCombination:
        return LinearCombination([(t, v / t.symmetry_factor) for t, v in self.coefficients.values.items()])

    def eval(self, target: str) -> DiffExpr:
        out = DiffExpr()
        for tau in self.coefficients.support():
            out.add_scaled(elementary_differential(target, tau, self.spec), self.coefficients(tau) / tau.symmetry_factor)
        return out

    def eval_all(self) -> dict[str, DiffExpr]:
        return {t: self.eval(t) for t in sorted(self.spec.kernel_labels)}

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": self.coefficients.to_records()["values"],
            "value": {t: e.to_records() for t, e in self.eval_all().items()},
        }


def planted_support(plus: Character, spec: "EquationSpec", index: EdgeDecoration | None = None
                    ) -> list[tuple[DecoratedTree, Fraction]]:
    """Planted generators of positive degree carrying a nonzero coefficient, optionally of one type."""
    out = []
    for p in plus.support():
        if not p.branches:
            continue
        edge, _ = p.branches[0]
        if (index is None or edge == index) and degree(p, spec) > 0:
            out.append((p, degree(p, spec)))
    return out


@dataclass
class BSeriesPlus:
    coefficients: Character
    index: EdgeDecoration
    spec: "EquationSpec"
    gamma: Fraction

    def __post_init__(self):
        if self.coefficients.mode != CharacterMode.TREE_PRODUCT:
            raise TypeError("B_+ series take a tree-product character on T+")

    def eval(self) -> DiffExpr:
        spec = self.spec
        out = DiffExpr()
        for k in mi.up_to_weight(spec.dim, spec.scaling, self.gamma):
            c = self.coefficients(monomial(k))
            out.add_scaled(DiffExpr.variable(self.index.shifted(k)), c / mi.factorial(k))
        for p, _ in planted_support(self.coefficients, spec, self.index):
            _, child = p.branches[0]
            if degree(p, spec) <= self.gamma:
                value = elementary_differential(self.index.label, child, spec)
                out.add_scaled(value, self.coefficients(p) / child.symmetry_factor)
        return out


def positive_elements(plus: Character, budget: Fraction, spec: "EquationSpec"
                      ) -> Iterator[tuple[DecoratedTree, Fraction]]:
    """X^k prod I_{a_i}(tau_i) built from the positive planted support, of degree <= budget, with plus(sigma)."""
    if budget < 0:
        return
    gens = planted_support(plus, spec)
    dim = spec.dim

    def extend(start: int, chosen: list[DecoratedTree], used: Fraction):
        for k in mi.up_to_weight(dim, spec.scaling, budget - used):
            sigma = product_of([monomial(k), *chosen], dim)
            value = plus(sigma)
            if not is_zero_scalar(value):
                yield sigma, value
        for i in range(start, len(gens)):
            p, deg = gens[i]
            if used + deg <= budget:
                yield from extend(i, chosen + [p], used + deg)

    yield from extend(0, [], Fraction(0))
