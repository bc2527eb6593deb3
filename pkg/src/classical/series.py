"""
Scalar B-series for polynomial vector fields y' = f(y), evaluated with sympy.

Used as the Taylor oracle for the composition and substitution theorems.
"""
from fractions import Fraction
from functools import lru_cache

import sympy

from src.classical.characters import ClassicalCharacter, Coproduct, convolve, exact_flow_character
from src.classical.trees import PlainTree, trees_up_to
from src.models.report import CheckReport
from src.trees.combination import Scalar
from src.utils.errors import OrderTooLarge
from src.utils.logger import get_logger

Y, H = sympy.symbols("y h")


def to_sympy(c: Scalar) -> sympy.Expr:
    if isinstance(c, Fraction):
        return sympy.Rational(c.numerator, c.denominator)
    return sympy.sympify(c)


def parse_field(text: str) -> sympy.Expr:
    expr = sympy.sympify(text, locals={"y": Y})
    if not expr.free_symbols <= {Y} or not expr.is_polynomial(Y):
        raise ValueError(f"vector field must be a polynomial in y, got {text!r}")
    return sympy.expand(expr)


MAX_ORDER = 8


def _check_order(order: int):
    if order > MAX_ORDER:
        raise OrderTooLarge(f"order {order} exceeds the supported bound {MAX_ORDER}")


@lru_cache(maxsize=None)
def elementary_differential(tree: PlainTree, field: sympy.Expr) -> sympy.Expr:
    """F[.] = f, F[tau] = f^(n) prod F[tau_j]."""
    value = sympy.diff(field, Y, len(tree.children))
    for child in tree.children:
        value = value * elementary_differential(child, field)
    return sympy.expand(value)


def truncate(expr: sympy.Expr, order: int) -> sympy.Expr:
    expr = sympy.expand(expr)
    return sympy.Add(*(expr.coeff(H, n) * H**n for n in range(order + 1)))


def b_series(alpha: ClassicalCharacter, field: sympy.Expr, order: int) -> sympy.Expr:
    """alpha(1) y + sum h^|tau| alpha(tau) F[tau] / S(tau) over |tau| <= order."""
    total = to_sympy(alpha.empty) * Y
    for tree in trees_up_to(order):
        coeff = alpha(tree)
        if coeff:
            total += H**tree.order * to_sympy(coeff) / tree.symmetry_factor * elementary_differential(tree, field)
    return sympy.expand(total)


def exact_flow(field: sympy.Expr, order: int) -> sympy.Expr:
    """Taylor expansion of the exact solution: D_0 = y, D_n = D_{n-1}' f."""
    term, total = Y, Y
    for n in range(1, order + 1):
        term = sympy.expand(sympy.diff(term, Y) * field)
        total += H**n / sympy.factorial(n) * term
    return sympy.expand(total)


def compose(beta: ClassicalCharacter, alpha: ClassicalCharacter, field: sympy.Expr, order: int) -> sympy.Expr:
    """B(beta)(B(alpha)(y)) by substituting the inner series into the outer one."""
    inner = b_series(alpha, field, order)
    total = to_sympy(beta.empty) * inner
    for tree in trees_up_to(order):
        coeff = beta(tree)
        if coeff:
            shifted = elementary_differential(tree, field).subs(Y, inner)
            total += H**tree.order * to_sympy(coeff) / tree.symmetry_factor * shifted
    return truncate(total, order)


def substitute(beta: ClassicalCharacter, alpha: ClassicalCharacter, field: sympy.Expr, order: int) -> sympy.Expr:
    """B(beta, (1/h) B(alpha, f, h), h); requires alpha(1) = 0."""
    if alpha.empty != 0:
        raise ValueError("substitution needs alpha(1) = 0")
    modified = sympy.expand(b_series(alpha, field, order) / H)
    total = to_sympy(beta.empty) * Y
    cache: dict[PlainTree, sympy.Expr] = {}

    def diff_of(tree: PlainTree) -> sympy.Expr:
        if tree not in cache:
            value = sympy.diff(modified, Y, len(tree.children))
            for child in tree.children:
                value = value * diff_of(child)
            cache[tree] = truncate(value, order)
        return cache[tree]

    for tree in trees_up_to(order):
        coeff = beta(tree)
        if coeff:
            total += H**tree.order * to_sympy(coeff) / tree.symmetry_factor * diff_of(tree)
    return truncate(total, order)


def _compare(report: CheckReport, lhs: sympy.Expr, rhs: sympy.Expr, order: int):
    diff = sympy.expand(lhs - rhs)
    for n in range(order + 1):
        c = sympy.expand(diff.coeff(H, n))
        report.record(c == 0, power=n, difference=sympy.sstr(c))


def verify_classical_composition(alpha: ClassicalCharacter, beta: ClassicalCharacter,
                                 field: sympy.Expr, order: int) -> CheckReport:
    """B(beta) o B(alpha) against B(beta *_BCK alpha), coefficientwise in h."""
    _check_order(order)
    log = get_logger("ClassicalSeries")
    report = CheckReport("classical_composition", details={"field": sympy.sstr(field), "order": order})
    lhs = compose(beta, alpha, field, order)
    rhs = b_series(convolve(beta, alpha, Coproduct.BCK, order), field, order)
    _compare(report, lhs, rhs, order)
    log.debug("Classical composition checked", order=order, passed=report.passed)
    return report


def verify_classical_substitution(beta: ClassicalCharacter, alpha: ClassicalCharacter,
                                  field: sympy.Expr, order: int) -> CheckReport:
    """B(beta, B(alpha)/h) against B(alpha *_EC beta)."""
    _check_order(order)
    report = CheckReport("classical_substitution", details={"field": sympy.sstr(field), "order": order})
    lhs = substitute(beta, alpha, field, order)
    rhs = b_series(convolve(alpha, beta, Coproduct.EC, order), field, order)
    _compare(report, lhs, rhs, order)
    return report


def verify_classical_cointeraction(beta: ClassicalCharacter, alpha1: ClassicalCharacter,
                                   alpha2: ClassicalCharacter, max_nodes: int) -> CheckReport:
    """(beta *_EC a1) *_BCK (beta *_EC a2) = beta *_EC (a1 *_BCK a2) on every tree."""
    report = CheckReport("classical_cointeraction", details={"max_nodes": max_nodes})
    lhs = convolve(
        convolve(beta, alpha1, Coproduct.EC, max_nodes),
        convolve(beta, alpha2, Coproduct.EC, max_nodes),
        Coproduct.BCK,
        max_nodes,
    )
    rhs = convolve(beta, convolve(alpha1, alpha2, Coproduct.BCK, max_nodes), Coproduct.EC, max_nodes)
    for tree in trees_up_to(max_nodes):
        report.record(lhs(tree) == rhs(tree), tree=tree.key, lhs=str(lhs(tree)), rhs=str(rhs(tree)))
    return report


def verify_exact_flow(field: sympy.Expr, order: int, max_nodes: int | None = None) -> CheckReport:
    """B(1/gamma) reproduces the Taylor expansion of the exact flow."""
    report = CheckReport("classical_exact_flow", details={"field": sympy.sstr(field), "order": order})
    series = b_series(exact_flow_character(max_nodes or order), field, order)
    _compare(report, series, exact_flow(field, order), order)
    return report
