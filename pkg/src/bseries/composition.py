"""
Composition of a B_- series with the B_+ family of one tree-product character.

Two independent computations are compared:
  - direct: Taylor-expand every F_t(tau) around Z after replacing each variable
    Z_b by B_+^b(beta), keeping the increments whose degrees fit in gamma - deg tau;
  - convolution: sum alpha(tau) beta(sigma) / (S(sigma) S(tau)) sigma star2 tau,
    read back as the character beta star2 alpha.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from src.algebra.grafting import star2
from src.bseries.series import BSeriesMinus, planted_support, positive_elements
from src.models.report import CheckReport
from src.symbolic.diff_expr import DiffExpr, derive_D
from src.symbolic.elementary import elementary_differential
from src.trees import multi_index as mi
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination, Scalar, is_zero_scalar
from src.trees.decorated import DecoratedTree, EdgeDecoration, monomial, noise_tree
from src.trees.degree import degree
from src.utils.errors import TheoremMismatch
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


@dataclass(frozen=True)
class Increment:
    """One term of B_+^b(beta) - Z_b: a variable, its degree and its value."""
    variable: EdgeDecoration
    degree: Fraction
    value: DiffExpr


def active_variables(e: DiffExpr, spec: "EquationSpec") -> list[EdgeDecoration]:
    """Variables some iterated D_b can act on: the Z's present and the dependencies of every atom."""
    out = set(e.variables())
    for atom in e.atoms():
        out |= spec.dependencies(atom.target, atom.noise)
    return sorted(out)


def increments(plus: Character, variables: Sequence[EdgeDecoration], budget: Fraction,
               spec: "EquationSpec") -> list[Increment]:
    out = []
    planted = planted_support(plus, spec)
    for b in variables:
        for k in mi.up_to_weight(spec.dim, spec.scaling, budget):
            if mi.is_zero(k):
                continue
            c = plus(monomial(k))
            if not is_zero_scalar(c):
                value = DiffExpr.variable(b.shifted(k)) * (c / mi.factorial(k))
                out.append(Increment(b, mi.weight(k, spec.scaling), value))
        for p, deg in planted:
            edge, child = p.branches[0]
            if edge == b and deg <= budget:
                value = elementary_differential(b.label, child, spec) * (plus(p) / child.symmetry_factor)
                out.append(Increment(b, deg, value))
    return out


def taylor_substitute(e: DiffExpr, plus: Character, budget: Fraction, spec: "EquationSpec") -> DiffExpr:
    """e(Z + delta) = sum prod delta^n / n! prod D^n e, over increment multisets of degree <= budget."""
    out = DiffExpr()
    if budget < 0 or not e:
        return out
    items = increments(plus, active_variables(e, spec), budget, spec)

    def walk(i: int, remaining: Fraction, expr: DiffExpr, factor: DiffExpr):
        if not expr:
            return
        if i == len(items):
            out.add_scaled(expr * factor)
            return
        walk(i + 1, remaining, expr, factor)
        item = items[i]
        n = 1
        while n * item.degree <= remaining:
            expr = derive_D(expr, item.variable, spec)
            factor = factor * item.value * Fraction(1, n)
            walk(i + 1, remaining - n * item.degree, expr, factor)
            n += 1

    walk(0, budget, e, DiffExpr.constant(1))
    return out


def compose_direct(minus: BSeriesMinus, plus: Character, gamma: Fraction, target: str) -> DiffExpr:
    """B_-(alpha) o B_+(beta) by Faa di Bruno, truncated at degree gamma."""
    spec = minus.spec
    out = DiffExpr()
    for tau in minus.coefficients.support():
        deg = degree(tau, spec)
        if deg > gamma:
            continue
        value = taylor_substitute(elementary_differential(target, tau, spec), plus, gamma - deg, spec)
        out.add_scaled(value, minus.coefficients(tau) / tau.symmetry_factor)
    return out


def star2_convolution(minus: BSeriesMinus, plus: Character, gamma: Fraction) -> BSeriesMinus:
    """beta star2 alpha = (beta (x) alpha) Delta2, through the star2 products."""
    spec = minus.spec
    total: LinearCombination = LinearCombination()
    for tau in minus.coefficients.support():
        deg = degree(tau, spec)
        if deg > gamma:
            continue
        a = minus.coefficients(tau) / tau.symmetry_factor
        for sigma, b in positive_elements(plus, gamma - deg, spec):
            total.add_scaled(star2(sigma, tau), a * b / sigma.symmetry_factor)
    return BSeriesMinus.from_combination(total, spec)


Sides = dict[str, dict[str, list]]


def compare_sides(report: CheckReport, target: str, lhs: DiffExpr, rhs: DiffExpr, sides: Sides | None = None,
                  **context):
    report.record(lhs == rhs, target=target, lhs=lhs.to_records(), rhs=rhs.to_records(),
                  difference=(lhs - rhs).to_records(), **context)
    if sides is not None:
        key = ":".join([target, *(str(v) for v in context.values())])
        sides[key] = {"lhs": lhs.to_records(), "rhs": rhs.to_records()}


def check_composition(minus: BSeriesMinus, plus: Character, gamma: Fraction | int,
                      targets: Sequence[str] | None = None, sides: Sides | None = None
                      ) -> tuple[BSeriesMinus, CheckReport]:
    """Direct Taylor composition against the star2 convolution; `sides` collects both per target."""
    gamma = Fraction(gamma)
    if plus.mode != CharacterMode.TREE_PRODUCT:
        raise TypeError("the B_+ side needs a tree-product character")
    log = get_logger("Composition")
    convolution = star2_convolution(minus, plus, gamma)
    report = CheckReport("composition", details={"gamma": str(gamma), "support": len(minus.coefficients.values)})
    for target in targets or sorted(minus.spec.kernel_labels):
        compare_sides(report, target, compose_direct(minus, plus, gamma, target), convolution.eval(target), sides)
    log.debug("Composition checked", gamma=str(gamma), passed=report.passed)
    return convolution, report


def raise_on_mismatch(report: CheckReport, **context):
    if not report.passed:
        witness = report.mismatches[0]
        summary = f"{len(report.mismatches)} of {report.checked} comparisons differ (target {witness.get('target')})"
        raise TheoremMismatch(report.identity, {"summary": summary, **context, **witness})


def compose_series(minus: BSeriesMinus, plus: Character, gamma: Fraction | int,
                   targets: Sequence[str] | None = None) -> BSeriesMinus:
    """B_-(alpha) o B_+(beta) = B_-(beta star2 alpha); raises TheoremMismatch when the two paths differ."""
    convolution, report = check_composition(minus, plus, gamma, targets)
    raise_on_mismatch(report, gamma=str(gamma))
    return convolution


def compose_with_function(target: str, noise: str, plus: Character, gamma: Fraction | int,
                          spec: "EquationSpec") -> BSeriesMinus:
    """F^noise_target(B_+(beta)) as a B_- series supported on X^k prod I(tau_i) Xi_noise."""
    minus = BSeriesMinus(Character({noise_tree(noise, spec.dim): 1}), spec)
    return compose_series(minus, plus, gamma, [target])


class CoherentCharacter:
    """Fully multiplicative alpha with alpha(I_{(t,m)}(tau)) = alpha(tau).

    Determined by its values on the noises and on the X_i.
    """

    def __init__(self, noise_values: dict[str, Scalar], poly_values: Sequence[Scalar]):
        self.noise_values = {("0" if k in (None, "0") else k): v for k, v in noise_values.items()}
        self.noise_values.setdefault("0", Fraction(1))
        self.poly_values = tuple(poly_values)

    def __call__(self, tau: DecoratedTree) -> Scalar:
        value: Scalar = self.noise_values.get(tau.noise_label, Fraction(0))
        for x, k in zip(self.poly_values, tau.decoration):
            value = value * x ** k
        for _, child in tau.branches:
            value = value * self(child)
        return value

    def plus_character(self, spec: "EquationSpec", planted: Sequence[DecoratedTree]) -> Character:
        values = {monomial(mi.unit(i, spec.dim)): x for i, x in enumerate(self.poly_values)}
        for p in planted:
            values[p] = self(p.branches[0][1])
        return Character(values, CharacterMode.TREE_PRODUCT)


def verify_coherence(alpha: CoherentCharacter, target: str, gamma: Fraction | int, spec: "EquationSpec",
                     planted: Sequence[DecoratedTree]) -> CheckReport:
    """f^t = sum_l alpha(Xi_l) F^l_t composed with B_+(alpha) re-integrates to the coefficients alpha(tau)."""
    gamma = Fraction(gamma)
    noises = {noise_tree(l, spec.dim): alpha.noise_values.get(l, 0) for l in spec.noises_for(target)}
    minus = BSeriesMinus(Character(noises), spec)
    plus = alpha.plus_character(spec, planted)
    convolution, report = check_composition(minus, plus, gamma, [target])
    report.identity = "coherence"
    reintegrated = DiffExpr()
    for tau_bar, value in convolution.coefficients.values.items():
        expected = alpha(tau_bar)
        report.record(value == expected, tree=tau_bar.key, composed=str(value), expected=str(expected))
        reintegrated.add_scaled(elementary_differential(target, tau_bar, spec), expected / tau_bar.symmetry_factor)
    compare_sides(report, target, convolution.eval(target), reintegrated, form="reintegrated")
    return report
