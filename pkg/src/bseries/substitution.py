"""
Substitution and root substitution of B_- series.

Substituting B_-(beta) into the Xi_0 nonlinearity replaces F^0_t by
f_t = F_t(1) + sum_{sigma != 1} beta(sigma) / S(sigma) F_t(sigma) at every Xi_0
node (F-hat) or at the root only (F-tilde). The tree side of both is the
adjoint map M*_beta, respectively R*_beta.
"""
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Sequence

from src.algebra.renormalisation import M_beta_forward, Insertion
from src.bseries.composition import Sides, compare_sides, compose_direct, raise_on_mismatch
from src.bseries.series import BSeriesMinus, positive_elements
from src.models.report import CheckReport
from src.symbolic.diff_expr import DiffExpr, derive_D, derive_partial, product
from src.symbolic.elementary import differentiated_atom, elementary_differential
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination
from src.trees.decorated import DecoratedTree, unit_tree
from src.trees.degree import degree
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec

BranchEvaluator = Callable[[str, DecoratedTree], DiffExpr]


def substituted_nonlinearity(target: str, beta: Character, spec: "EquationSpec",
                             max_degree: Fraction | None = None) -> DiffExpr:
    """F_t(1) + sum beta(sigma)/S(sigma) F_t(sigma), optionally over deg sigma <= max_degree only."""
    if max_degree is not None and max_degree < 0:
        out = DiffExpr()
    else:
        out = elementary_differential(target, unit_tree(spec.dim), spec)
    for sigma in beta.support():
        if sigma.is_unit or (max_degree is not None and degree(sigma, spec) > max_degree):
            continue
        out.add_scaled(elementary_differential(target, sigma, spec), beta(sigma) / sigma.symmetry_factor)
    return out


def root_replaced(target: str, tau: DecoratedTree, beta: Character, spec: "EquationSpec",
                  branches: BranchEvaluator, max_degree: Fraction | None = None) -> DiffExpr:
    """{d^k D_{a_1} ... D_{a_n} f} prod branches(t_j, tau_j), f the substituted nonlinearity at a Xi_0 root."""
    edges = [edge for edge, _ in tau.branches]
    if tau.noise is not None:
        head = differentiated_atom(target, tau.noise, edges, spec)
    else:
        head = substituted_nonlinearity(target, beta, spec, max_degree)
        for edge in edges:
            head = derive_D(head, edge, spec)
    if not head:
        return head
    head = derive_partial(head, tau.decoration, spec)
    return head * product(branches(edge.label, child) for edge, child in tau.branches)


class HatEvaluator:
    """F-hat: the substituted nonlinearity at every Xi_0 node, memoised."""

    def __init__(self, beta: Character, spec: "EquationSpec"):
        self.beta = beta
        self.spec = spec
        self._memo: dict[tuple[str, str], DiffExpr] = {}

    def __call__(self, target: str, tau: DecoratedTree) -> DiffExpr:
        key = (target, tau.key)
        if key not in self._memo:
            self._memo[key] = root_replaced(target, tau, self.beta, self.spec, self)
        return self._memo[key]


def tilde_F(target: str, tau: DecoratedTree, beta: Character, spec: "EquationSpec",
            branches: BranchEvaluator | None = None, max_degree: Fraction | None = None) -> DiffExpr:
    """F-tilde: substitution at the root only; branches use F unless told otherwise.

    With max_degree set, only sigma with deg sigma <= max_degree enter the root nonlinearity.
    """
    branches = branches or (lambda t, child: elementary_differential(t, child, spec))
    return root_replaced(target, tau, beta, spec, branches, max_degree)


def _weighted_sum(minus: BSeriesMinus, evaluate: Callable[[DecoratedTree], DiffExpr]) -> DiffExpr:
    out = DiffExpr()
    for tau in minus.coefficients.support():
        out.add_scaled(evaluate(tau), minus.coefficients(tau) / tau.symmetry_factor)
    return out


def _tree_side(minus: BSeriesMinus, apply: Callable[[DecoratedTree], LinearCombination]) -> BSeriesMinus:
    total: LinearCombination = LinearCombination()
    for tau in minus.coefficients.support():
        total.add_scaled(apply(tau), minus.coefficients(tau) / tau.symmetry_factor)
    return BSeriesMinus.from_combination(total, minus.spec)


def check_substitution(minus: BSeriesMinus, beta: Character, targets: Sequence[str] | None = None,
                       with_delta1: bool = False, sides: Sides | None = None) -> tuple[BSeriesMinus, CheckReport]:
    """B_-(alpha, F-hat) against B_-(beta star1 alpha), (beta star1 alpha)(tau_bar) = alpha(M_beta tau_bar)."""
    spec = minus.spec
    insertion = Insertion(beta, spec.dim)
    convolution = _tree_side(minus, insertion.m_star)
    report = CheckReport("substitution", details={"support": len(minus.coefficients.values),
                                                  "beta_support": len(beta.values)})
    hat = HatEvaluator(beta, spec)
    for target in targets or sorted(spec.kernel_labels):
        lhs = _weighted_sum(minus, lambda tau: hat(target, tau))
        compare_sides(report, target, lhs, convolution.eval(target), sides)
    if with_delta1:
        for tau_bar, value in convolution.coefficients.values.items():
            forward = M_beta_forward(beta, tau_bar, spec.scaling)
            expected = sum((minus.coefficients(t) * c for t, c in forward.items()), Fraction(0))
            report.record(value == expected, tree=tau_bar.key, form="delta1",
                          star1=str(value), delta1=str(expected))
    get_logger("Substitution").debug("Substitution checked", passed=report.passed, checked=report.checked)
    return convolution, report


def substitute_series(minus: BSeriesMinus, beta: Character, targets: Sequence[str] | None = None
                      ) -> BSeriesMinus:
    """B_-(alpha) substituted with B_-(beta) = B_-(beta star1 alpha); raises TheoremMismatch on disagreement."""
    convolution, report = check_substitution(minus, beta, targets)
    raise_on_mismatch(report)
    return convolution


def check_root_substitution(minus: BSeriesMinus, beta: Character, targets: Sequence[str] | None = None,
                            sides: Sides | None = None) -> tuple[BSeriesMinus, CheckReport]:
    """B_-(alpha, F-tilde) against sum alpha/S F(R*_beta tau), plus F-tilde with F-hat branches against F(M*_beta tau)."""
    spec = minus.spec
    insertion = Insertion(beta, spec.dim)
    rooted = _tree_side(minus, insertion.r_star)
    renormalised = _tree_side(minus, insertion.m_star)
    hat = HatEvaluator(beta, spec)
    report = CheckReport("root_substitution", details={"support": len(minus.coefficients.values)})
    for target in targets or sorted(spec.kernel_labels):
        lhs = _weighted_sum(minus, lambda tau: tilde_F(target, tau, beta, spec))
        compare_sides(report, target, lhs, rooted.eval(target), sides, form="root")
        lhs = _weighted_sum(minus, lambda tau: tilde_F(target, tau, beta, spec, hat))
        compare_sides(report, target, lhs, renormalised.eval(target), sides, form="hat_branches")
    return rooted, report


def check_root_composition(alpha: Character, beta: Character, gamma: Fraction | int, spec: "EquationSpec",
                           targets: Sequence[str] | None = None) -> CheckReport:
    """For a tree-product alpha, root substitution of B_-(beta) equals the composition B_-(beta) o B_+(alpha)."""
    if alpha.mode != CharacterMode.TREE_PRODUCT:
        raise TypeError("root composition needs a tree-product alpha")
    gamma = Fraction(gamma)
    degrees = [degree(s, spec) for s in beta.support()] + [Fraction(0)]
    budget = gamma - min(degrees)
    with_unit = dict(beta.values)
    with_unit[unit_tree(spec.dim)] = Fraction(1)
    ambient = BSeriesMinus(Character(with_unit), spec)
    report = CheckReport("root_composition", details={"gamma": str(gamma)})
    for target in targets or sorted(spec.kernel_labels):
        lhs = DiffExpr()
        for tau, value in positive_elements(alpha, budget, spec):
            local = tilde_F(target, tau, beta, spec, max_degree=gamma - degree(tau, spec))
            lhs.add_scaled(local, value / tau.symmetry_factor)
        compare_sides(report, target, lhs, compose_direct(ambient, alpha, gamma, target))
    return report


def root_substitute_series(minus: BSeriesMinus, beta: Character, targets: Sequence[str] | None = None
                           ) -> BSeriesMinus:
    rooted, report = check_root_substitution(minus, beta, targets)
    raise_on_mismatch(report)
    return rooted
