"""
Tests for B_- and B_+ series, composition, substitution and coherence.
"""
from fractions import Fraction

import pytest
import sympy

from src.bseries.characters import (
    character_from_data,
    load_character,
    random_forest,
    random_minus,
    random_plus,
    symbol_table,
    symbolic_like,
    symbolic_minus,
    symbolic_plus,
)
from src.bseries.composition import (
    CoherentCharacter,
    check_composition,
    compose_series,
    compose_with_function,
    raise_on_mismatch,
    taylor_substitute,
    verify_coherence,
)
from src.bseries.series import BSeriesMinus, BSeriesPlus, positive_elements
from src.bseries.substitution import (
    check_root_composition,
    check_root_substitution,
    check_substitution,
    root_substitute_series,
    substitute_series,
    tilde_F,
)
from src.models.report import CheckReport
from src.symbolic.diff_expr import DiffExpr
from src.trees.character import Character, CharacterMode
from src.trees.decorated import EdgeDecoration, monomial, unit_tree
from src.trees.degree import degree
from src.trees.enumeration import TreeEnumerator
from src.trees.grammar import parse_tree
from src.utils.errors import SpecError, TheoremMismatch

XI = "Xi[xi]"
I_XI = "I[u,(0,0)](Xi[xi])"
U = EdgeDecoration("u", (0, 0))


@pytest.fixture(scope="module")
def toy_setup(toy):
    enumerator = TreeEnumerator(toy)
    trees = enumerator.enumerate(0)
    planted = enumerator.planted_generators(Fraction(6, 5))
    negative = [t for t in trees if degree(t, toy) < 0]
    return trees, planted, negative


class TestSeries:
    """Evaluation of B_- and B_+."""

    def test_empty_minus_is_zero(self, toy):
        series = BSeriesMinus(Character({}), toy)
        assert series.eval("u") == DiffExpr()
        assert not series.eval("u")

    def test_minus_weights_by_symmetry(self, toy):
        tau = parse_tree(f"{I_XI}*{I_XI}", spec=toy)
        series = BSeriesMinus(Character({tau: 4}), toy)
        assert series.as_combination().coefficient(tau) == 2
        assert BSeriesMinus.from_combination(series.as_combination(), toy).coefficients(tau) == 4

    def test_minus_of_noise(self, toy):
        series = BSeriesMinus(Character({parse_tree(XI, spec=toy): Fraction(2, 3)}), toy)
        assert series.eval("u") == DiffExpr.atom("u", "xi") * Fraction(2, 3)

    def test_minus_needs_linear_character(self, toy):
        with pytest.raises(TypeError):
            BSeriesMinus(Character({}, CharacterMode.FOREST), toy)

    def test_plus_needs_tree_product_character(self, toy):
        with pytest.raises(TypeError):
            BSeriesPlus(Character({}), U, toy, Fraction(1))

    def test_plus_value(self, toy):
        planted = parse_tree(I_XI, spec=toy)
        plus = Character({monomial((0, 1)): 3, planted: Fraction(1, 2)}, CharacterMode.TREE_PRODUCT)
        value = BSeriesPlus(plus, U, toy, Fraction(1)).eval()
        expected = (DiffExpr.variable(U) + DiffExpr.variable(EdgeDecoration("u", (0, 1))) * 3
                    + DiffExpr.atom("u", "xi") * Fraction(1, 2))
        assert value == expected

    def test_positive_elements_carry_values(self, toy):
        planted = parse_tree(I_XI, spec=toy)
        plus = Character({monomial((0, 1)): 2, planted: 5}, CharacterMode.TREE_PRODUCT)
        found = dict(positive_elements(plus, Fraction(9, 5), toy))
        assert found[unit_tree(2)] == 1
        assert found[parse_tree(f"X^(0,1)*{I_XI}", spec=toy)] == 10
        assert all(degree(s, toy) <= Fraction(9, 5) for s in found)


class TestComposition:
    """B_-(alpha) o B_+(beta) = B_-(beta star2 alpha)."""

    def test_taylor_substitute_of_variable(self, toy):
        plus = Character({monomial((0, 1)): 2}, CharacterMode.TREE_PRODUCT)
        result = taylor_substitute(DiffExpr.variable(U), plus, Fraction(1), toy)
        assert result == DiffExpr.variable(U) + DiffExpr.variable(EdgeDecoration("u", (0, 1))) * 2

    def test_random_characters(self, toy, toy_setup, rng):
        trees, planted, _ = toy_setup
        for _ in range(3):
            minus = BSeriesMinus(random_minus(rng, trees[:6]), toy)
            plus = random_plus(rng, toy, planted)
            composed, report = check_composition(minus, plus, 0)
            assert report.passed, report.mismatches
            assert all(degree(t, toy) <= 0 for t in composed.coefficients.support())

    def test_unit_plus_is_neutral(self, toy, toy_setup, rng):
        """beta = 1 on T+ only pairs with sigma = 1."""
        trees, _, _ = toy_setup
        minus = BSeriesMinus(random_minus(rng, trees[:6]), toy)
        composed = compose_series(minus, Character({}, CharacterMode.TREE_PRODUCT), 0)
        assert composed.coefficients.values == minus.coefficients.values

    def test_compose_with_function(self, toy, toy_setup, rng):
        _, planted, _ = toy_setup
        result = compose_with_function("u", "xi", random_plus(rng, toy, planted), 0, toy)
        assert result.coefficients(parse_tree(XI, spec=toy)) == 1
        assert all(t.noise == "xi" for t in result.coefficients.support())

    def test_symbolic(self, toy, toy_setup):
        trees, planted, _ = toy_setup
        minus = BSeriesMinus(symbolic_minus(trees[:4]), toy)
        plus = symbolic_plus(toy, planted[:2])
        _, report = check_composition(minus, plus, 0)
        assert report.passed, report.mismatches

    def test_plus_mode_checked(self, toy):
        with pytest.raises(TypeError):
            check_composition(BSeriesMinus(Character({}), toy), Character({}), 0)

    def test_mismatch_raises(self):
        report = CheckReport("composition")
        report.record(False, target="u")
        with pytest.raises(TheoremMismatch) as info:
            raise_on_mismatch(report, gamma="0")
        assert info.value.identity == "composition"
        assert info.value.counterexample["target"] == "u"


class TestSubstitution:
    """Substitution at every Xi_0 node and at the root only."""

    def test_empty_beta_is_identity(self, toy, toy_setup, rng):
        trees, _, _ = toy_setup
        minus = BSeriesMinus(random_minus(rng, trees[:8]), toy)
        result = substitute_series(minus, Character({}, CharacterMode.FOREST))
        assert result.coefficients.values == minus.coefficients.values

    def test_random_characters(self, toy, toy_setup, rng):
        trees, _, negative = toy_setup
        for _ in range(2):
            minus = BSeriesMinus(random_minus(rng, trees[:6]), toy)
            beta = random_forest(rng, negative[:3])
            _, report = check_substitution(minus, beta, with_delta1=True)
            assert report.passed, report.mismatches
            _, report = check_root_substitution(minus, beta)
            assert report.passed, report.mismatches

    def test_root_substitution_of_noise_root(self, toy):
        """Trees whose root carries Xi[xi] are left alone."""
        xi = parse_tree(f"X^(0,1)*{XI}", spec=toy)
        minus = BSeriesMinus(Character({xi: 3}), toy)
        beta = Character({parse_tree(XI, spec=toy): 2}, CharacterMode.FOREST)
        assert root_substitute_series(minus, beta).coefficients.values == {xi: 3}

    def test_root_composition(self, toy, toy_setup, rng):
        trees, planted, negative = toy_setup
        beta = random_forest(rng, negative[:3])
        alpha = random_plus(rng, toy, planted)
        report = check_root_composition(alpha, beta, 0, toy)
        assert report.passed, report.mismatches

    def test_tilde_f_degree_cutoff(self, toy):
        """Root nonlinearity keeps only sigma up to the cutoff; below zero even F(1) drops."""
        xi = parse_tree(XI, spec=toy)
        beta = Character({xi: 2}, CharacterMode.FOREST)
        root = unit_tree(2)
        full = tilde_F("u", root, beta, toy)
        assert tilde_F("u", root, beta, toy, max_degree=Fraction(0)) == full
        only_xi = tilde_F("u", root, beta, toy, max_degree=Fraction(-6, 5))
        assert only_xi and only_xi != full
        assert not tilde_F("u", root, beta, toy, max_degree=Fraction(-2))

    def test_root_composition_needs_tree_product(self, toy):
        with pytest.raises(TypeError):
            check_root_composition(Character({}), Character({}, CharacterMode.FOREST), 0, toy)


class TestCoherence:
    """Coherent characters re-integrate under composition."""

    def test_values(self, toy):
        alpha = CoherentCharacter({"xi": 2}, [1, 3])
        assert alpha(unit_tree(2)) == 1
        assert alpha(parse_tree(I_XI, spec=toy)) == 2
        assert alpha(parse_tree(f"X^(0,1)*{XI}", spec=toy)) == 6

    def test_plus_character(self, toy, toy_setup):
        _, planted, _ = toy_setup
        plus = CoherentCharacter({"xi": 2}, [1, 3]).plus_character(toy, planted)
        assert plus.mode == CharacterMode.TREE_PRODUCT
        assert plus(parse_tree(f"X^(0,1)*{I_XI}", spec=toy)) == 6

    def test_reintegration(self, toy, toy_setup):
        _, planted, _ = toy_setup
        alpha = CoherentCharacter({"xi": Fraction(-1, 2)}, [2, Fraction(1, 3)])
        report = verify_coherence(alpha, "u", 0, toy, planted)
        assert report.identity == "coherence"
        assert report.passed, report.mismatches


class TestCharacterFiles:
    """Characters read from YAML data."""

    def test_mapping(self, toy):
        alpha = character_from_data({XI: "1/2", "1": 1}, toy)
        assert alpha(parse_tree(XI, spec=toy)) == Fraction(1, 2)
        assert alpha.mode == CharacterMode.LINEAR

    def test_mode_and_records(self, toy):
        data = {"mode": "forest", "values": [{"tree": XI, "num": 3, "den": 4}]}
        beta = character_from_data(data, toy)
        assert beta.mode == CharacterMode.FOREST
        assert beta(parse_tree(XI, spec=toy)) == Fraction(3, 4)

    def test_load(self, toy, tmp_path):
        path = tmp_path / "plus.yaml"
        path.write_text(f'"X^(0,1)": 2\n"{I_XI}": -1\n')
        plus = load_character(path, toy, CharacterMode.TREE_PRODUCT)
        assert plus(parse_tree(f"X^(0,1)*{I_XI}", spec=toy)) == -2

    def test_bad_value(self, toy):
        with pytest.raises(SpecError):
            character_from_data({XI: "1/0"}, toy)
        with pytest.raises(SpecError):
            character_from_data("nonsense", toy)

    def test_missing_file(self, toy, tmp_path):
        with pytest.raises(SpecError):
            load_character(tmp_path / "missing.yaml", toy)

    def test_symbolic_like(self, toy):
        alpha = Character({unit_tree(2): 1, parse_tree(XI, spec=toy): 5})
        symbolic = symbolic_like(alpha, "a")
        assert symbolic(unit_tree(2)) == 1
        assert isinstance(symbolic(parse_tree(XI, spec=toy)), sympy.Symbol)
        assert symbol_table(symbolic) == {"a_1": XI}
