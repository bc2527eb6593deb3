"""
Algebraic identities of grafting, star2 and Delta2, checked on given instances.
"""
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from src.algebra.coproducts import delta2, delta_hat2, tree_times
from src.algebra.grafting import deformed_graft, graft_combination, raise_decoration, star2, star2_combination
from src.models.report import CheckReport
from src.trees import multi_index as mi
from src.trees.combination import LinearCombination
from src.trees.decorated import DecoratedTree, EdgeDecoration, tree_product
from src.trees.degree import degree
from src.utils.errors import NoiseClash

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


def _single(tree: DecoratedTree) -> LinearCombination:
    return LinearCombination.single(tree)


def check_multi_pre_lie(triples: Iterable[tuple[DecoratedTree, DecoratedTree, DecoratedTree]],
                        a: EdgeDecoration, b: EdgeDecoration) -> CheckReport:
    """(t1 ^a t2) ^b t3 - t1 ^a (t2 ^b t3) is symmetric under (t1, a) <-> (t2, b)."""
    report = CheckReport("multi_pre_lie", details={"a": a.render(), "b": b.render()})
    for t1, t2, t3 in triples:
        lhs = (graft_combination(deformed_graft(t1, a, t2), b, _single(t3))
               - graft_combination(_single(t1), a, deformed_graft(t2, b, t3)))
        rhs = (graft_combination(deformed_graft(t2, b, t1), a, _single(t3))
               - graft_combination(_single(t2), b, deformed_graft(t1, a, t3)))
        report.record(lhs == rhs, trees=[t1.key, t2.key, t3.key], difference=(lhs - rhs).to_records())
    return report


def check_non_commutation(pairs: Iterable[tuple[DecoratedTree, DecoratedTree]], a: EdgeDecoration,
                          i: int) -> CheckReport:
    """up^i (s ^a t) = (up^i s) ^a t + s ^a (up^i t) - s ^{a - e_i} t."""
    report = CheckReport("non_commutation", details={"a": a.render(), "axis": i})
    for sigma, tau in pairs:
        e = mi.unit(i, sigma.dim)
        lhs = deformed_graft(sigma, a, tau).linear_map(lambda t: raise_decoration(t, e))
        rhs = graft_combination(raise_decoration(sigma, e), a, _single(tau))
        rhs = rhs + graft_combination(_single(sigma), a, raise_decoration(tau, e))
        lowered = a.lowered(e)
        if lowered is not None:
            rhs = rhs - deformed_graft(sigma, lowered, tau)
        report.record(lhs == rhs, sigma=sigma.key, tau=tau.key, difference=(lhs - rhs).to_records())
    return report


def check_star2_associativity(triples: Iterable[tuple[DecoratedTree, DecoratedTree, DecoratedTree]]
                              ) -> CheckReport:
    """(s star2 s') star2 s'' = s star2 (s' star2 s'') for s, s' in T+."""
    report = CheckReport("star2_associativity")
    for s1, s2, s3 in triples:
        lhs = star2_combination(star2(s1, s2), _single(s3))
        rhs = star2_combination(_single(s1), star2(s2, s3))
        report.record(lhs == rhs, trees=[s1.key, s2.key, s3.key], difference=(lhs - rhs).to_records())
    return report


def check_duality(positive: Sequence[DecoratedTree], trees: Sequence[DecoratedTree], cap: Fraction,
                  scaling: Sequence[Fraction]) -> CheckReport:
    """<sigma star2 tau, tau_bar> = <sigma (x) tau, Delta2 tau_bar> for every triple."""
    report = CheckReport("star2_delta2_duality", details={"cap": str(cap)})
    coproducts = {tau_bar: delta2(tau_bar, cap, scaling) for tau_bar in trees}
    for sigma in positive:
        for tau in trees:
            product = star2(sigma, tau)
            for tau_bar in trees:
                lhs = product.coefficient(tau_bar) * tau_bar.symmetry_factor
                rhs = coproducts[tau_bar].coefficient((sigma, tau)) * sigma.symmetry_factor * tau.symmetry_factor
                report.record(lhs == rhs, sigma=sigma.key, tau=tau.key, tau_bar=tau_bar.key,
                              star2=str(lhs), delta2=str(rhs))
    return report


def check_degree_additivity(positive: Sequence[DecoratedTree], trees: Sequence[DecoratedTree],
                            spec: "EquationSpec") -> CheckReport:
    report = CheckReport("star2_degree")
    for sigma in positive:
        for tau in trees:
            expected = degree(sigma, spec) + degree(tau, spec)
            for term in star2(sigma, tau).keys():
                report.record(degree(term, spec) == expected, sigma=sigma.key, tau=tau.key, term=term.key)
    return report


def check_noise_product(positive: Sequence[DecoratedTree], noises: Sequence[DecoratedTree]) -> CheckReport:
    """sigma star2 Xi_l = sigma Xi_l with coefficient 1."""
    report = CheckReport("star2_noise")
    for sigma in positive:
        for xi in noises:
            expected = _single(tree_product(sigma, xi))
            report.record(star2(sigma, xi) == expected, sigma=sigma.key, noise=xi.key)
    return report


def check_delta2_multiplicativity(pairs: Iterable[tuple[DecoratedTree, DecoratedTree]], cap: Fraction,
                                  scaling: Sequence[Fraction]) -> CheckReport:
    """Delta2(s t) = Delta2 s . Delta2 t, as far as the cap lets both sides see."""
    report = CheckReport("delta2_multiplicative", details={"cap": str(cap)})
    for sigma, tau in pairs:
        try:
            joint = tree_product(sigma, tau)
        except NoiseClash:
            continue
        lhs = delta2(joint, cap, scaling)
        rhs = tree_times(delta2(sigma, cap, scaling), delta2(tau, cap, scaling))
        report.record(lhs == rhs, sigma=sigma.key, tau=tau.key, difference=(lhs - rhs).to_records())
    return report


def check_root_extraction(trees: Iterable[DecoratedTree], cap: Fraction, scaling: Sequence[Fraction]) -> CheckReport:
    """The hat coaction adds tau (x) 1 exactly on trees with a root noise."""
    report = CheckReport("delta_hat2")
    for tau in trees:
        extra = delta_hat2(tau, cap, scaling) - delta2(tau, cap, scaling)
        one = DecoratedTree(mi.zero(tau.dim))
        expected = LinearCombination.single((tau, one)) if tau.noise is not None else LinearCombination()
        report.record(extra == expected, tree=tau.key)
    return report
