"""
Butcher-Connes-Kreimer and extraction-contraction coproducts on plain trees.

Both return LinearCombination keyed by (left forest, right forest).
BCK: left is the trunk, right the pruned forest. EC: left is the extracted
spanning forest, right the contracted tree.
"""
import itertools
from functools import lru_cache

from src.classical.trees import EMPTY, PlainForest, PlainTree
from src.trees.combination import LinearCombination

Split = tuple[PlainForest, PlainForest]


@lru_cache(maxsize=None)
def _rooted_cuts(tree: PlainTree) -> tuple[tuple[PlainTree, PlainForest], ...]:
    """Admissible cuts keeping the root: (trunk, pruned forest), no-cut included."""
    per_child = []
    for child in tree.children:
        options = [(None, PlainForest.of(child))]
        options.extend(_rooted_cuts(child))
        per_child.append(options)
    out = []
    for choice in itertools.product(*per_child):
        trunk_children = tuple(t for t, _ in choice if t is not None)
        pruned = PlainForest(tuple(tr for _, f in choice for tr in f.trees))
        out.append((PlainTree(trunk_children), pruned))
    return tuple(out)


def bck_coproduct(tree: PlainTree) -> LinearCombination[Split]:
    out: LinearCombination[Split] = LinearCombination()
    for trunk, pruned in _rooted_cuts(tree):
        out.add_term((PlainForest.of(trunk), pruned), 1)
    out.add_term((EMPTY, PlainForest.of(tree)), 1)
    return out


def _edges(tree: PlainTree) -> tuple[list[int], list[PlainTree]]:
    """Parent array in preorder; parent[0] = -1."""
    parents: list[int] = []
    nodes: list[PlainTree] = []

    def walk(t: PlainTree, parent: int):
        idx = len(nodes)
        parents.append(parent)
        nodes.append(t)
        for c in t.children:
            walk(c, idx)

    walk(tree, -1)
    return parents, nodes


def _build(root: int, children_of: dict[int, list[int]]) -> PlainTree:
    return PlainTree(tuple(_build(c, children_of) for c in children_of.get(root, [])))


@lru_cache(maxsize=None)
def _ec_terms(tree: PlainTree) -> tuple[Split, ...]:
    parents, _ = _edges(tree)
    n = len(parents)
    edge_list = [v for v in range(1, n)]
    out = []
    for mask in range(1 << len(edge_list)):
        kept = {edge_list[i] for i in range(len(edge_list)) if mask >> i & 1}
        comp = list(range(n))

        def find(v: int) -> int:
            while comp[v] != v:
                comp[v] = comp[comp[v]]
                v = comp[v]
            return v

        # children are numbered after their parent, so the component root is its smallest node
        for v in sorted(kept):
            a, b = find(v), find(parents[v])
            comp[max(a, b)] = min(a, b)
        roots = sorted({find(v) for v in range(n)})
        inner: dict[int, list[int]] = {}
        for v in kept:
            inner.setdefault(parents[v], []).append(v)
        extracted = PlainForest(tuple(_build(r, inner) for r in roots))
        outer: dict[int, list[int]] = {}
        for r in roots:
            if r != 0:
                outer.setdefault(find(parents[r]), []).append(r)
        contracted = _build(0, outer)
        out.append((extracted, PlainForest.of(contracted)))
    return tuple(out)


def ec_coproduct(tree: PlainTree) -> LinearCombination[Split]:
    out: LinearCombination[Split] = LinearCombination()
    for split in _ec_terms(tree):
        out.add_term(split, 1)
    return out
