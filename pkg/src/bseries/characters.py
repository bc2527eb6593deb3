"""
Seeded random and symbolic characters for the theorem checks.
"""
import random
from pathlib import Path
from typing import Any, Sequence

import sympy
import yaml

from src.classical.characters import random_rational
from src.models.equation_spec import EquationSpec, parse_rational
from src.trees import multi_index as mi
from src.trees.character import Character, CharacterMode
from src.trees.decorated import DecoratedTree, monomial
from src.trees.grammar import parse_tree
from src.utils.errors import SpecError


def sample(rng: random.Random, items: Sequence, n: int) -> list:
    """At most n items, drawn without replacement and kept in their original order."""
    items = list(items)
    if len(items) <= n:
        return items
    return [items[i] for i in sorted(rng.sample(range(len(items)), n))]


def random_minus(rng: random.Random, trees: Sequence[DecoratedTree], density: float = 1.0) -> Character:
    """Linear character on T with random rational values; 1 keeps the value 1."""
    values = {}
    for tau in trees:
        if tau.is_unit:
            values[tau] = 1
        elif rng.random() < density:
            values[tau] = random_rational(rng)
    return Character(values)


def random_forest(rng: random.Random, trees: Sequence[DecoratedTree], density: float = 1.0) -> Character:
    return Character(
        {tau: random_rational(rng) for tau in trees if not tau.is_unit and rng.random() < density},
        CharacterMode.FOREST,
    )


def tree_product_generators(spec: EquationSpec, planted: Sequence[DecoratedTree]) -> list[DecoratedTree]:
    return [monomial(mi.unit(i, spec.dim)) for i in range(spec.dim)] + list(planted)


def random_plus(rng: random.Random, spec: EquationSpec, planted: Sequence[DecoratedTree]) -> Character:
    """Tree-product character with random values on the X_i and the planted generators."""
    return Character(
        {g: random_rational(rng) for g in tree_product_generators(spec, planted)},
        CharacterMode.TREE_PRODUCT,
    )


def _symbols(prefix: str, trees: Sequence[DecoratedTree]) -> dict[DecoratedTree, sympy.Symbol]:
    return {tau: sympy.Symbol(f"{prefix}_{i}") for i, tau in enumerate(trees)}


def symbolic_minus(trees: Sequence[DecoratedTree], prefix: str = "a") -> Character:
    values = _symbols(prefix, [t for t in trees if not t.is_unit])
    values.update({t: 1 for t in trees if t.is_unit})
    return Character(values)


def symbolic_plus(spec: EquationSpec, planted: Sequence[DecoratedTree], prefix: str = "c") -> Character:
    return Character(_symbols(prefix, tree_product_generators(spec, planted)), CharacterMode.TREE_PRODUCT)


def symbol_table(character: Character) -> dict[str, str]:
    """Symbol name to tree key, for reports of symbolic runs."""
    return {str(v): t.key for t, v in character.values.items() if isinstance(v, sympy.Symbol)}


def symbolic_like(character: Character, prefix: str) -> Character:
    """Same support and mode, one symbol per tree; a forest or linear 1 keeps the value 1."""
    values: dict[DecoratedTree, Any] = {}
    for i, tau in enumerate(character.support()):
        values[tau] = 1 if tau.is_unit else sympy.Symbol(f"{prefix}_{i}")
    return Character(values, character.mode)


def character_from_data(data: Any, spec: EquationSpec, mode: CharacterMode | str = CharacterMode.LINEAR
                        ) -> Character:
    """Accepts {tree: value}, {"mode": .., "values": ..} or a list of {tree, num, den} records."""
    if isinstance(data, dict) and "values" in data:
        mode = data.get("mode", mode)
        data = data["values"]
    if isinstance(data, list):
        pairs = [(rec["tree"], rec.get("value", f"{rec.get('num', 0)}/{rec.get('den', 1)}")) for rec in data]
    elif isinstance(data, dict):
        pairs = list(data.items())
    else:
        raise SpecError(f"cannot read a character from {type(data).__name__}")
    try:
        values = {parse_tree(str(t), spec=spec): parse_rational(v) for t, v in pairs}
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"invalid character value: {exc}") from exc
    return Character(values, CharacterMode(mode))


def load_character(path: str | Path, spec: EquationSpec, mode: CharacterMode | str = CharacterMode.LINEAR
                   ) -> Character:
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as exc:
        raise SpecError(f"cannot read character {path}: {exc}") from exc
    return character_from_data(data, spec, mode)
