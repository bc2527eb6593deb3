from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination, inner_product
from src.trees.decorated import DecoratedTree, EdgeDecoration, Forest, monomial, noise_tree, planted, tree_product
from src.trees.degree import degree, project_leq_degree
from src.trees.enumeration import TreeEnumerator, enumerate_trees
from src.trees.grammar import parse_forest, parse_tree

__all__ = [
    "Character", "CharacterMode", "DecoratedTree", "EdgeDecoration", "Forest", "LinearCombination",
    "TreeEnumerator", "degree", "enumerate_trees", "inner_product", "monomial", "noise_tree", "parse_forest",
    "parse_tree", "planted", "project_leq_degree", "tree_product",
]
