"""
The product star1, the maps M*_beta, hat-M*_beta, R*_beta and their forward
counterparts, preparation maps and the renormalisation maps they generate.

beta is always a FOREST character on T: beta(1) = 1 and the insertion at a
Xi_0 node is M*_beta Xi_0 = 1 + sum_{sigma != 1} beta(sigma) / S(sigma) sigma.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from src.algebra.coproducts import delta1, delta2, sufficient_cap
from src.algebra.grafting import star2, star2_combination
from src.models.report import CheckReport
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination, inner_product
from src.trees.decorated import Branch, DecoratedTree, EdgeDecoration, Forest, unit_tree
from src.utils.errors import IncompatiblePreparationMap
from src.utils.logger import get_logger

TreeCombination = LinearCombination[DecoratedTree]


def _assemble(tau: DecoratedTree, slots: Sequence[tuple[EdgeDecoration, TreeCombination]],
              noise: str | None = None) -> TreeCombination:
    """X^k Xi_noise prod_i I_{a_i}(u_i) expanded multilinearly over the combinations u_i."""
    out: TreeCombination = LinearCombination()
    for picks in itertools.product(*(list(u.items()) for _, u in slots)):
        coefficient = Fraction(1)
        branches: list[Branch] = []
        for (edge, _), (child, c) in zip(slots, picks):
            coefficient *= c
            branches.append((edge, child))
        out.add_term(DecoratedTree(tau.decoration, noise, tuple(branches)), coefficient)
    return out


def _check_forest_character(beta: Character):
    if beta.mode != CharacterMode.FOREST:
        raise TypeError(f"renormalisation needs a forest character, got {beta.mode.value}")


@lru_cache(maxsize=None)
def _star1(forest: Forest, tau: DecoratedTree) -> TreeCombination:
    sigmas = list(forest)
    if not sigmas:
        return LinearCombination.single(tau)
    slots = list(tau.branches)
    out: TreeCombination = LinearCombination()

    def spread(members: list[DecoratedTree]) -> Iterable[list[tuple[EdgeDecoration, TreeCombination]]]:
        for targets in itertools.product(range(len(slots)), repeat=len(members)):
            blocks: list[list[DecoratedTree]] = [[] for _ in slots]
            for member, slot in zip(members, targets):
                blocks[slot].append(member)
            yield [(edge, _star1(Forest(tuple(block)), child)) for (edge, child), block in zip(slots, blocks)]

    for filled in spread(sigmas):
        out.add_scaled(_assemble(tau, filled, tau.noise))
    if tau.noise is None:
        for j, root_insert in enumerate(sigmas):
            rest = sigmas[:j] + sigmas[j + 1:]
            for filled in spread(rest):
                trunk = _assemble(tau, filled)
                out.add_scaled(star2_combination(trunk, LinearCombination.single(root_insert)))
    return out


def star1(forest: Forest, tau: DecoratedTree) -> TreeCombination:
    """sigma_1 ... sigma_m star1 tau: every sigma_r replaces a Xi_0 node of tau.

    The sigmas are labelled: each one either replaces the root (only when the
    root carries Xi_0) or descends into one of the branches, empty blocks allowed.
    """
    return _star1(forest, tau).copy()


def zero_insertion(beta: Character, dim: int, include_unit: bool = True) -> TreeCombination:
    """M*_beta Xi_0 = 1 + sum beta(sigma)/S(sigma) sigma over the support.

    `include_unit=False` drops the tree 1; the substitution identities only
    hold with it, since beta(1) = 1 for a forest character.
    """
    _check_forest_character(beta)
    out: TreeCombination = LinearCombination()
    for sigma in beta.support():
        if not sigma.is_unit:
            out.add_term(sigma, beta(sigma) / sigma.symmetry_factor)
    if include_unit:
        out.add_term(unit_tree(dim), 1)
    return out


class Insertion:
    """Memoised M*_beta for one character."""

    def __init__(self, beta: Character, dim: int):
        self.beta = beta
        self.root = zero_insertion(beta, dim)
        self._memo: dict[DecoratedTree, TreeCombination] = {}

    def m_star(self, tau: DecoratedTree) -> TreeCombination:
        hit = self._memo.get(tau)
        if hit is None:
            trunk = self.m_hat_star(tau)
            hit = trunk if tau.noise is not None else star2_combination(trunk, self.root)
            self._memo[tau] = hit
        return hit

    def m_hat_star(self, tau: DecoratedTree) -> TreeCombination:
        slots = [(edge, self.m_star(child)) for edge, child in tau.branches]
        return _assemble(tau, slots, tau.noise)

    def r_star(self, tau: DecoratedTree) -> TreeCombination:
        if tau.noise is not None:
            return LinearCombination.single(tau)
        return star2_combination(LinearCombination.single(tau), self.root)


def M_star(beta: Character, tau: DecoratedTree) -> TreeCombination:
    """M*_beta(X^k prod I(tau_i) Xi_l) = (X^k prod I(M*_beta tau_i)) star2 M*_beta Xi_l."""
    return Insertion(beta, tau.dim).m_star(tau).copy()


def M_hat_star(beta: Character, tau: DecoratedTree) -> TreeCombination:
    """Like M*_beta but without the insertion at the root."""
    return Insertion(beta, tau.dim).m_hat_star(tau)


def R_star(beta: Character, tau: DecoratedTree) -> TreeCombination:
    """R*_beta tau = tau+ star2 M*_beta Xi_0 when the root carries Xi_0, tau otherwise."""
    return Insertion(beta, tau.dim).r_star(tau)


def R_beta(beta: Character, tau_bar: DecoratedTree, scaling: Sequence[Fraction],
           cap: Fraction | None = None) -> TreeCombination:
    """R_beta tau_bar = sum over Delta2 tau_bar = L (x) T of beta(T) L, plus tau_bar if its root noise is not Xi_0."""
    _check_forest_character(beta)
    cap = sufficient_cap(beta.support(), scaling) if cap is None else cap
    out: TreeCombination = LinearCombination()
    for (left, right), c in delta2(tau_bar, cap, scaling).items():
        out.add_term(left, c * beta(right))
    if tau_bar.noise is not None:
        out.add_term(tau_bar, 1)
    return out


def M_beta_forward(beta: Character, tau_bar: DecoratedTree, scaling: Sequence[Fraction],
                   cap: Fraction | None = None) -> TreeCombination:
    """M_beta = (beta (x) id) Delta1."""
    _check_forest_character(beta)
    cap = sufficient_cap(beta.support(), scaling) if cap is None else cap
    out: TreeCombination = LinearCombination()
    for (extracted, contracted), c in delta1(tau_bar, cap, scaling).items():
        out.add_term(contracted, c * beta(extracted))
    return out


@dataclass
class PreparationMap:
    """R = R_beta plus finitely many additive corrections R(tau_bar) += corrections[tau_bar]."""
    beta: Character
    scaling: tuple[Fraction, ...]
    corrections: dict[DecoratedTree, TreeCombination] = field(default_factory=dict)
    cap: Fraction | None = None

    def __post_init__(self):
        _check_forest_character(self.beta)
        self.scaling = tuple(Fraction(s) for s in self.scaling)
        if self.cap is None:
            self.cap = sufficient_cap(self.beta.support(), self.scaling)
        self._adjoint_corrections: dict[DecoratedTree, TreeCombination] = {}
        for tau_bar, image in self.corrections.items():
            for tau, c in image.items():
                share = self._adjoint_corrections.setdefault(tau, LinearCombination())
                share.add_term(tau_bar, c * Fraction(tau.symmetry_factor, tau_bar.symmetry_factor))

    @classmethod
    def identity(cls, scaling: Sequence[Fraction]) -> "PreparationMap":
        return cls(Character({}, CharacterMode.FOREST), tuple(scaling))

    def apply(self, tau_bar: DecoratedTree) -> TreeCombination:
        out = R_beta(self.beta, tau_bar, self.scaling, self.cap)
        if tau_bar in self.corrections:
            out.add_scaled(self.corrections[tau_bar])
        return out

    def adjoint(self, tau: DecoratedTree) -> TreeCombination:
        out = R_star(self.beta, tau)
        if tau in self._adjoint_corrections:
            out.add_scaled(self._adjoint_corrections[tau])
        return out

    def adjoint_combination(self, u: TreeCombination) -> TreeCombination:
        return u.linear_map(self.adjoint)


def check_right_morphism(prep: PreparationMap, positive: Iterable[DecoratedTree],
                         trees: Iterable[DecoratedTree]) -> CheckReport:
    """R*(sigma star2 tau) = sigma star2 R* tau over all given pairs."""
    trees = list(trees)
    report = CheckReport("right_morphism")
    for sigma in positive:
        for tau in trees:
            lhs = prep.adjoint_combination(star2(sigma, tau))
            rhs = star2_combination(LinearCombination.single(sigma), prep.adjoint(tau))
            report.record(lhs == rhs, sigma=sigma.key, tau=tau.key,
                          difference=(lhs - rhs).to_records())
    return report


class RenormalisationMap:
    """M = M_circ R with M_circ(X^k Xi prod I(tau_i)) = X^k Xi prod I(M tau_i)."""

    def __init__(self, preparation: PreparationMap):
        self.preparation = preparation
        self._forward: dict[DecoratedTree, TreeCombination] = {}
        self._backward: dict[DecoratedTree, TreeCombination] = {}

    def _m_circ(self, tau: DecoratedTree) -> TreeCombination:
        slots = [(edge, self.apply(child)) for edge, child in tau.branches]
        return _assemble(tau, slots, tau.noise)

    def apply(self, tau: DecoratedTree) -> TreeCombination:
        hit = self._forward.get(tau)
        if hit is None:
            hit = self.preparation.apply(tau).linear_map(self._m_circ)
            self._forward[tau] = hit
        return hit

    def adjoint(self, tau: DecoratedTree) -> TreeCombination:
        """M* tau = R*(X^k Xi prod I(M* tau_i))."""
        hit = self._backward.get(tau)
        if hit is None:
            slots = [(edge, self.adjoint(child)) for edge, child in tau.branches]
            hit = _assemble(tau, slots, tau.noise).linear_map(self.preparation.adjoint)
            self._backward[tau] = hit
        return hit


def build_renorm_from_preparation(prep: PreparationMap, positive: Iterable[DecoratedTree] = (),
                                  trees: Iterable[DecoratedTree] = (), validate: bool = True
                                  ) -> RenormalisationMap:
    """Wrap a preparation map, rejecting it when R* fails to be a right star2-morphism."""
    if validate:
        report = check_right_morphism(prep, positive, trees)
        get_logger("Renormalisation").debug("Checked preparation map", pairs=report.checked,
                                            mismatches=len(report.mismatches))
        if not report.passed:
            witness = report.mismatches[0]
            raise IncompatiblePreparationMap(
                f"R* is not a right star2-morphism on ({witness['sigma']}, {witness['tau']})", witness
            )
    return RenormalisationMap(prep)


def verify_cointeraction_decorated(beta: Character, positive: Sequence[DecoratedTree],
                                   trees: Sequence[DecoratedTree], alpha1: Character | None = None,
                                   alpha2: Character | None = None) -> CheckReport:
    """M*(tau star2 sigma) = hat-M* tau star2 M* sigma, treewise and for the series of alpha1, alpha2."""
    log = get_logger("Renormalisation")
    report = CheckReport("cointeraction", details={"positive": len(positive), "trees": len(trees)})
    if not positive or not trees:
        return report
    ins = Insertion(beta, positive[0].dim)
    for tau in positive:
        hat_tau = ins.m_hat_star(tau)
        for sigma in trees:
            lhs = star2(tau, sigma).linear_map(ins.m_star)
            rhs = star2_combination(hat_tau, ins.m_star(sigma))
            report.record(lhs == rhs, tau=tau.key, sigma=sigma.key, difference=(lhs - rhs).to_records())
    for tau in positive:
        for other in positive:
            lhs = star2(tau, other).linear_map(ins.m_hat_star)
            rhs = star2_combination(ins.m_hat_star(tau), ins.m_hat_star(other))
            report.record(lhs == rhs, tau=tau.key, sigma=other.key, form="hat_morphism",
                          difference=(lhs - rhs).to_records())
    if alpha1 is not None and alpha2 is not None:
        u = LinearCombination([(t, alpha1(t) / t.symmetry_factor) for t in positive])
        v = LinearCombination([(s, alpha2(s) / s.symmetry_factor) for s in trees])
        lhs = star2_combination(u, v).linear_map(ins.m_star)
        rhs = star2_combination(u.linear_map(ins.m_hat_star), v.linear_map(ins.m_star))
        report.record(lhs == rhs, form="series", difference=(lhs - rhs).to_records())
    log.debug("Co-interaction checked", checked=report.checked, passed=report.passed)
    return report


def check_adjoint(beta: Character, trees: Sequence[DecoratedTree], scaling: Sequence[Fraction]) -> CheckReport:
    """<M* tau, sigma> = <tau, M_beta sigma> and <R* tau, sigma> = <tau, R_beta sigma> on all pairs."""
    trees = list(trees)
    report = CheckReport("renormalisation_adjoint", details={"trees": len(trees)})
    if not trees:
        return report
    cap = sufficient_cap(trees + beta.support(), scaling)
    ins = Insertion(beta, trees[0].dim)
    forward_m = {sigma: M_beta_forward(beta, sigma, scaling, cap) for sigma in trees}
    forward_r = {sigma: R_beta(beta, sigma, scaling, cap) for sigma in trees}
    for tau in trees:
        single = LinearCombination.single(tau)
        for name, backward, forward in (("M", ins.m_star(tau), forward_m), ("R", ins.r_star(tau), forward_r)):
            for sigma in trees:
                lhs = inner_product(backward, LinearCombination.single(sigma))
                rhs = inner_product(single, forward[sigma])
                report.record(lhs == rhs, map=name, tau=tau.key, sigma=sigma.key, adjoint=str(lhs), forward=str(rhs))
    return report
