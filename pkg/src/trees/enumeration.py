"""
Rule-driven enumeration of decorated trees up to a degree cutoff.

A node of type t (the label of its incoming edge, or the series target at the
root) may carry a noise l when (t, l) is a dependency key, branches I_a with
a in dependency(t, l) (at most `arity` of them) and any polynomial decoration
that fits in the remaining degree budget.
"""
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Literal

from src.trees import multi_index as mi
from src.trees.decorated import DecoratedTree, EdgeDecoration, planted, product_of, unit_tree
from src.trees.degree import degree
from src.utils.errors import NotSubcritical, OrderTooLarge
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec

Space = Literal["T", "T+"]
_INF = Fraction(10**9)


class TreeEnumerator:
    def __init__(self, spec: "EquationSpec", max_trees: int | None = None):
        self.spec = spec
        if max_trees is None:
            from src.config.settings import get_settings
            max_trees = get_settings().max_trees
        self.max_trees = max_trees
        self.log = get_logger("TreeEnumerator")
        self._memo: dict[tuple[str, Fraction], list[DecoratedTree]] = {}
        self.lower = self._lower_bounds()
        self._check_steps()

    def _min_branch(self, target: str, noise: str, lower: dict[str, Fraction]) -> Fraction | None:
        dep = self.spec.dependencies(target, noise)
        if not dep:
            return None
        return min(self.spec.edge_degree(a) + lower[a.label] for a in dep)

    def _lower_bounds(self) -> dict[str, Fraction]:
        """Least degree of a tree whose root has a given type, by fixed-point relaxation."""
        spec = self.spec
        lower = {
            t: min((spec.label_degree(n) for n in spec.noises_for(t)), default=_INF)
            for t in spec.kernel_labels
        }
        for _ in range(100 * (len(lower) + 1)):
            changed = False
            for t in spec.kernel_labels:
                for noise in spec.noises_for(t):
                    minc = self._min_branch(t, noise, lower)
                    if minc is None or minc >= 0:
                        continue
                    arity = spec.arity(t, noise)
                    if arity is None:
                        raise NotSubcritical(
                            f"({t}, {noise}) admits unboundedly many branches of degree {minc}"
                        )
                    candidate = spec.label_degree(noise) + arity * minc
                    if candidate < lower[t]:
                        lower[t] = candidate
                        changed = True
            if not changed:
                return lower
        raise NotSubcritical("tree degrees are unbounded below")

    def _slack(self, target: str, noise: str, slots: int | None) -> Fraction:
        """Most negative total contribution of `slots` further branches."""
        minc = self._min_branch(target, noise, self.lower)
        if minc is None or minc >= 0 or not slots:
            return Fraction(0)
        return slots * minc

    def _check_steps(self):
        spec = self.spec
        for (t, noise), dep in spec.dependency_map.items():
            arity = spec.arity(t, noise)
            if not dep or arity == 0:
                continue
            minc = self._min_branch(t, noise, self.lower)
            if arity is None and minc <= 0:
                raise NotSubcritical(f"({t}, {noise}) admits unboundedly many branches of degree {minc}")
            others = self._slack(t, noise, None if arity is None else arity - 1)
            for a in dep:
                step = spec.label_degree(noise) + spec.edge_degree(a) + others
                if step <= 0:
                    raise NotSubcritical(
                        f"grafting I[{a.render()}] under ({t}, {noise}) does not raise the degree (step {step})"
                    )

    def _generate(self, target: str, budget: Fraction) -> list[DecoratedTree]:
        """All trees with root type `target` and degree <= budget."""
        memo_key = (target, budget)
        if memo_key in self._memo:
            return self._memo[memo_key]
        out: list[DecoratedTree] = []
        if budget >= self.lower.get(target, _INF):
            for noise in self.spec.noises_for(target):
                out.extend(self._generate_with_noise(target, noise, budget))
        self._memo[memo_key] = out
        if len(out) > self.max_trees:
            raise OrderTooLarge(f"more than {self.max_trees} trees of type {target} up to degree {budget}")
        return out

    def _generate_with_noise(self, target: str, noise: str, budget: Fraction) -> Iterator[DecoratedTree]:
        spec = self.spec
        base = spec.label_degree(noise)
        arity = spec.arity(target, noise)
        options: list[tuple[Fraction, EdgeDecoration, DecoratedTree]] = []
        if arity != 0:
            room = budget - base - self._slack(target, noise, None if arity is None else arity - 1)
            for a in sorted(spec.dependencies(target, noise)):
                for child in self._generate(a.label, room - spec.edge_degree(a)):
                    options.append((spec.edge_degree(a) + degree(child, spec), a, child))
        dim = spec.dim

        def extend(start: int, chosen: list[tuple[EdgeDecoration, DecoratedTree]], used: Fraction):
            remaining = budget - base - used
            for k in mi.up_to_weight(dim, spec.scaling, remaining):
                yield DecoratedTree(k, noise, tuple(chosen))
            if arity is not None and len(chosen) >= arity:
                return
            slots_after = None if arity is None else arity - len(chosen) - 1
            slack = self._slack(target, noise, slots_after)
            for i in range(start, len(options)):
                c, a, child = options[i]
                if base + used + c + slack <= budget:
                    yield from extend(i, chosen + [(a, child)], used + c)

        yield from extend(0, [], Fraction(0))

    def planted_generators(self, gamma: Fraction) -> list[DecoratedTree]:
        """Planted trees I_a(tau) of positive degree <= gamma."""
        out = set()
        for a in self.spec.all_variables():
            for child in self._generate(a.label, gamma - self.spec.edge_degree(a)):
                p = planted(a, child)
                if 0 < degree(p, self.spec) <= gamma:
                    out.add(p)
        return sorted(out, key=lambda t: (degree(t, self.spec), t.key))

    def enumerate(self, gamma: Fraction | int | str, space: Space = "T") -> list[DecoratedTree]:
        gamma = Fraction(gamma)
        spec = self.spec
        found: set[DecoratedTree] = set()
        if space == "T":
            for t in spec.kernel_labels:
                found.update(self._generate(t, gamma))
            unit = unit_tree(spec.dim)
            if degree(unit, spec) <= gamma:
                found.add(unit)
        elif space == "T+":
            found.update(self._positive_products(gamma))
        else:
            raise ValueError(f"unknown space {space!r}")
        if len(found) > self.max_trees:
            raise OrderTooLarge(f"{len(found)} trees exceed the bound {self.max_trees}")
        result = sorted(found, key=lambda t: (degree(t, spec), t.key))
        self.log.debug("Enumerated trees", space=space, gamma=str(gamma), count=len(result))
        return result

    def _positive_products(self, gamma: Fraction) -> Iterator[DecoratedTree]:
        spec = self.spec
        gens = self.planted_generators(gamma)
        degs = [degree(g, spec) for g in gens]
        dim = spec.dim

        def extend(start: int, chosen: list[DecoratedTree], used: Fraction):
            for k in mi.up_to_weight(dim, spec.scaling, gamma - used):
                yield product_of([DecoratedTree(k), *chosen], dim)
            for i in range(start, len(gens)):
                if used + degs[i] <= gamma:
                    yield from extend(i, chosen + [gens[i]], used + degs[i])

        if gamma >= 0:
            yield from extend(0, [], Fraction(0))


def enumerate_trees(spec: "EquationSpec", gamma: Fraction | int | str, space: Space = "T",
                    max_trees: int | None = None) -> list[DecoratedTree]:
    return TreeEnumerator(spec, max_trees).enumerate(gamma, space)
