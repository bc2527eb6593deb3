"""
Deformed grafting, node-decoration raising and the product star2.

Nodes of a tree are addressed by paths: the tuple of branch indices followed
from the root. Every operation rebuilds the tree in one pass from a table of
per-node edits, so paths always refer to the original tree.
"""
import itertools
from typing import Iterable, Iterator

from src.trees import multi_index as mi
from src.trees.combination import LinearCombination
from src.trees.decorated import Branch, DecoratedTree, EdgeDecoration
from src.trees.multi_index import MultiIndex
from src.utils.errors import MalformedLeft

Path = tuple[int, ...]
TreeCombination = LinearCombination[DecoratedTree]


def node_paths(tree: DecoratedTree, prefix: Path = ()) -> Iterator[tuple[Path, DecoratedTree]]:
    """Preorder walk over (path, subtree rooted at that node)."""
    yield prefix, tree
    for i, (_, child) in enumerate(tree.branches):
        yield from node_paths(child, prefix + (i,))


def _rebuild(tree: DecoratedTree, edits: dict[Path, tuple[MultiIndex, tuple[Branch, ...]]],
             path: Path = ()) -> DecoratedTree:
    branches = tuple((edge, _rebuild(child, edits, path + (i,))) for i, (edge, child) in enumerate(tree.branches))
    decoration, extra = edits.get(path, (tree.decoration, ()))
    return DecoratedTree(decoration, tree.noise, branches + extra)


def _as_planted(factor: DecoratedTree) -> tuple[EdgeDecoration, DecoratedTree]:
    if factor.noise is not None or any(factor.decoration) or len(factor.branches) != 1:
        raise MalformedLeft(f"{factor.key} is not a planted tree")
    return factor.branches[0]


def _graft_at_node(decoration: MultiIndex, incoming: list[tuple[EdgeDecoration, DecoratedTree]]
                   ) -> Iterator[tuple[int, MultiIndex, tuple[Branch, ...]]]:
    """All deformations at one node receiving several planted factors at once.

    Yields (coefficient, lowered decoration, new branches) with the
    multinomial n! / (l_1! ... l_r! (n - sum l)!).
    """
    choices = [list(mi.below(decoration)) for _ in incoming]
    for ells in itertools.product(*choices):
        coefficient = mi.multinomial(decoration, ells)
        if coefficient == 0:
            continue
        new_edges = []
        for (edge, child), ell in zip(incoming, ells):
            lowered = edge.lowered(ell)
            if lowered is None:
                break
            new_edges.append((lowered, child))
        else:
            rest = mi.sub(decoration, mi.total(ells, len(decoration)))
            yield coefficient, rest, tuple(new_edges)


def _raise_splits(k: MultiIndex, paths: list[Path]) -> Iterator[tuple[int, dict[Path, MultiIndex]]]:
    """Decompositions k = sum_v k_v over the given nodes, weighted k! / prod k_v!."""
    if mi.is_zero(k):
        yield 1, {}
        return
    for parts in mi.decompositions(k, len(paths)):
        weight = mi.multinomial(k, parts)
        yield weight, {p: kv for p, kv in zip(paths, parts) if not mi.is_zero(kv)}


def simultaneous_graft(factors: Iterable[DecoratedTree], tau: DecoratedTree, k: MultiIndex | None = None
                       ) -> TreeCombination:
    """(prod I_{a_i}(sigma_i)) grafted jointly onto tau, then raised by k on the nodes of tau."""
    planted_factors = [_as_planted(f) for f in factors]
    nodes = list(node_paths(tau))
    paths = [p for p, _ in nodes]
    decorations = {p: node.decoration for p, node in nodes}
    k = k if k is not None else mi.zero(tau.dim)
    out: TreeCombination = LinearCombination()

    for targets in itertools.product(paths, repeat=len(planted_factors)):
        incoming: dict[Path, list] = {}
        for path, factor in zip(targets, planted_factors):
            incoming.setdefault(path, []).append(factor)
        per_node = [list(_graft_at_node(decorations[p], fs)) for p, fs in incoming.items()]
        for picks in itertools.product(*per_node):
            coefficient = 1
            lowered: dict[Path, MultiIndex] = dict(decorations)
            extra: dict[Path, tuple[Branch, ...]] = {}
            for path, (c, rest, edges) in zip(incoming, picks):
                coefficient *= c
                lowered[path] = rest
                extra[path] = edges
            for weight, raised in _raise_splits(k, paths):
                edits = {
                    p: (mi.add(lowered[p], raised[p]) if p in raised else lowered[p], extra.get(p, ()))
                    for p in paths
                }
                out.add_term(_rebuild(tau, edits), coefficient * weight)
    return out


def deformed_graft(sigma: DecoratedTree, a: EdgeDecoration, tau: DecoratedTree) -> TreeCombination:
    """sigma grafted onto tau along an edge of type a, with the binomial deformation."""
    return simultaneous_graft([_planted(a, sigma)], tau)


def _planted(a: EdgeDecoration, sigma: DecoratedTree) -> DecoratedTree:
    return DecoratedTree(mi.zero(sigma.dim), None, ((a, sigma),))


def raise_decoration(tau: DecoratedTree, k: MultiIndex, targets: Iterable[Path] | None = None,
                     weighted: bool = True) -> TreeCombination:
    """Distribute X^k over nodes of tau.

    With `weighted` every split k = sum k_v carries k! / prod k_v!, which makes
    raise_decoration(tau, k) the product of the single raises (up^{e_i})^{k_i}.
    """
    nodes = dict(node_paths(tau))
    paths = list(nodes) if targets is None else [tuple(p) for p in targets]
    out: TreeCombination = LinearCombination()
    for weight, raised in _raise_splits(k, paths):
        edits = {p: (mi.add(nodes[p].decoration, kv), ()) for p, kv in raised.items()}
        out.add_term(_rebuild(tau, edits), weight if weighted else 1)
    return out


def split_positive(sigma: DecoratedTree) -> tuple[MultiIndex, list[DecoratedTree]]:
    """X^k prod I_{a_i}(sigma_i) as (k, planted factors); root noise is rejected."""
    if sigma.noise is not None:
        raise MalformedLeft(f"left factor {sigma.key} carries the root noise {sigma.noise}")
    return sigma.decoration, sigma.planted_factors()


def star2(sigma: DecoratedTree, tau: DecoratedTree) -> TreeCombination:
    k, factors = split_positive(sigma)
    return simultaneous_graft(factors, tau, k)


def star2_combination(u: TreeCombination, v: TreeCombination) -> TreeCombination:
    out: TreeCombination = LinearCombination()
    for sigma, c in u.items():
        for tau, d in v.items():
            out.add_scaled(star2(sigma, tau), c * d)
    return out


def graft_combination(u: TreeCombination, a: EdgeDecoration, v: TreeCombination) -> TreeCombination:
    out: TreeCombination = LinearCombination()
    for sigma, c in u.items():
        for tau, d in v.items():
            out.add_scaled(deformed_graft(sigma, a, tau), c * d)
    return out


def plain_graft(sigma: DecoratedTree, a: EdgeDecoration, tau: DecoratedTree) -> TreeCombination:
    """Undeformed grafting: sum over nodes v of tau of sigma attached at v along a."""
    out: TreeCombination = LinearCombination()
    for path, node in node_paths(tau):
        out.add_term(_rebuild(tau, {path: (node.decoration, ((a, sigma),))}), 1)
    return out
