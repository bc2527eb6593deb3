"""
Elementary differentials F_t(tau) and the star2 morphism property.
"""
from typing import TYPE_CHECKING, Sequence

from src.algebra.grafting import deformed_graft, raise_decoration, split_positive, star2
from src.models.report import CheckReport
from src.symbolic.diff_expr import DiffExpr, derive_D, derive_partial, product
from src.trees.combination import LinearCombination
from src.trees.decorated import DecoratedTree, EdgeDecoration
from src.trees.multi_index import MultiIndex
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


def differentiated_atom(target: str, noise: str, derivs: Sequence[EdgeDecoration], spec: "EquationSpec") -> DiffExpr:
    """D_{a_1} ... D_{a_n} F^noise_target; zero as soon as some a_j leaves the dependency set."""
    out = DiffExpr.atom(target, noise)
    for a in derivs:
        out = derive_D(out, a, spec)
    return out


def elementary_differential(target: str, tau: DecoratedTree, spec: "EquationSpec") -> DiffExpr:
    """F_t(X^k Xi_l prod I_{a_j}(tau_j)) = {d^k D_{a_1} ... D_{a_n} F^l_t} prod F_{t_j}(tau_j)."""
    cache = spec._cache.setdefault("elementary", {})
    hit = cache.get((target, tau.key))
    if hit is not None:
        return hit.copy()
    edges = [edge for edge, _ in tau.branches]
    head = differentiated_atom(target, tau.noise_label, edges, spec)
    if head:
        head = derive_partial(head, tau.decoration, spec)
    value = head
    if value:
        value = value * product(elementary_differential(edge.label, child, spec) for edge, child in tau.branches)
    cache[(target, tau.key)] = value
    return value.copy()


def elementary_of_combination(target: str, u: LinearCombination, spec: "EquationSpec") -> DiffExpr:
    out = DiffExpr()
    for tau, c in u.items():
        out.add_scaled(elementary_differential(target, tau, spec), c)
    return out


def morphism_rhs(target: str, sigma: DecoratedTree, tau: DecoratedTree, spec: "EquationSpec") -> DiffExpr:
    """{d^k D_{a_1} ... D_{a_n} F_t(tau)} prod F_{t_j}(sigma_j) for sigma = X^k prod I_{a_j}(sigma_j)."""
    k, factors = split_positive(sigma)
    head = elementary_differential(target, tau, spec)
    for factor in factors:
        edge, _ = factor.branches[0]
        head = derive_D(head, edge, spec)
    head = derive_partial(head, k, spec)
    return head * product(
        elementary_differential(f.branches[0][0].label, f.branches[0][1], spec) for f in factors
    )


def verify_star_morphism(spec: "EquationSpec", positive: Sequence[DecoratedTree],
                         trees: Sequence[DecoratedTree], targets: Sequence[str] | None = None) -> CheckReport:
    """F_t(sigma star2 tau) against the derivative form, for every pair and target."""
    log = get_logger("ElementaryDifferentials")
    report = CheckReport("star_morphism", details={"positive": len(positive), "trees": len(trees)})
    for target in targets or sorted(spec.kernel_labels):
        for sigma in positive:
            for tau in trees:
                lhs = elementary_of_combination(target, star2(sigma, tau), spec)
                rhs = morphism_rhs(target, sigma, tau, spec)
                report.record(lhs == rhs, target=target, sigma=sigma.key, tau=tau.key,
                              difference=(lhs - rhs).to_records())
    log.debug("Morphism property checked", checked=report.checked, passed=report.passed)
    return report


def graft_rule_holds(target: str, tau_bar: DecoratedTree, a: EdgeDecoration, sigma: DecoratedTree,
                     spec: "EquationSpec") -> bool:
    """F_t(tau_bar graft^a sigma) = F_{t_a}(tau_bar) D_a F_t(sigma)."""
    lhs = elementary_of_combination(target, deformed_graft(tau_bar, a, sigma), spec)
    rhs = elementary_differential(a.label, tau_bar, spec) * derive_D(elementary_differential(target, sigma, spec), a, spec)
    return lhs == rhs


def raise_rule_holds(target: str, sigma: DecoratedTree, k: MultiIndex, spec: "EquationSpec") -> bool:
    """F_t(raise^k sigma) = d^k F_t(sigma)."""
    lhs = elementary_of_combination(target, raise_decoration(sigma, k), spec)
    return lhs == derive_partial(elementary_differential(target, sigma, spec), k, spec)
