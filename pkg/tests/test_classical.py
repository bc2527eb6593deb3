"""
Tests for plain trees, the BCK and EC coproducts and scalar B-series.
"""
from fractions import Fraction

import pytest
import sympy

from src.classical.characters import (
    ClassicalCharacter,
    Coproduct,
    bck_inverse,
    convolve,
    counit,
    ec_counit,
    exact_flow_character,
    modified_field_character,
    random_character,
)
from src.classical.coproducts import bck_coproduct, ec_coproduct
from src.classical.series import (
    H,
    Y,
    b_series,
    exact_flow,
    parse_field,
    substitute,
    verify_classical_cointeraction,
    verify_classical_composition,
    verify_classical_substitution,
    verify_exact_flow,
)
from src.classical.trees import (
    DOT,
    EMPTY,
    PlainForest,
    b_plus,
    gamma_density,
    ladder,
    parse_plain,
    trees_of_order,
    trees_up_to,
)
from src.utils.errors import GrammarError, OrderTooLarge


class TestPlainTrees:
    """Enumeration, parsing and the classical tree functions."""

    def test_counts(self):
        assert [len(trees_of_order(n)) for n in range(1, 7)] == [1, 1, 2, 4, 9, 20]

    def test_parse(self):
        tree = parse_plain("B+(B+(.) .)")
        assert tree == b_plus(DOT, ladder(2))
        assert tree.key == "B+(. B+(.))"
        assert tree.order == 4
        assert tree.density == 8
        assert gamma_density(ladder(3)) == 6

    def test_parse_error(self):
        with pytest.raises(GrammarError):
            parse_plain("B+(. ")

    def test_symmetry(self):
        assert b_plus(DOT, DOT, DOT).symmetry_factor == 6
        assert ladder(5).symmetry_factor == 1
        assert b_plus(ladder(2), ladder(2)).symmetry_factor == 2


class TestCoproducts:
    """BCK admissible cuts and EC spanning forests."""

    def test_bck_on_cherry(self):
        cherry = b_plus(DOT, DOT)
        result = bck_coproduct(cherry)
        assert result.coefficient((PlainForest.of(ladder(2)), PlainForest.of(DOT))) == 2
        assert result.coefficient((PlainForest.of(DOT), PlainForest.of(DOT, DOT))) == 1
        assert result.coefficient((EMPTY, PlainForest.of(cherry))) == 1
        assert result.coefficient((PlainForest.of(cherry), EMPTY)) == 1

    def test_ec_on_edge(self):
        result = ec_coproduct(ladder(2))
        assert result.coefficient((PlainForest.of(DOT, DOT), PlainForest.of(ladder(2)))) == 1
        assert result.coefficient((PlainForest.of(ladder(2)), PlainForest.of(DOT))) == 1

    def test_ec_term_count(self):
        """One term per subset of edges."""
        tree = b_plus(DOT, ladder(2))
        assert sum(c for _, c in ec_coproduct(tree).items()) == 2 ** tree.edges


class TestCharacters:
    """Butcher-group inverse, convolutions and the modified field."""

    def test_exact_flow_inverse(self):
        inverse = bck_inverse(exact_flow_character(5), 5)
        for tree in trees_up_to(5):
            assert inverse(tree) == Fraction((-1) ** tree.order, tree.density)

    def test_flow_squared(self):
        e = exact_flow_character(5)
        doubled = convolve(e, e, Coproduct.BCK, 5)
        assert doubled.empty == 1
        for tree in trees_up_to(5):
            assert doubled(tree) == Fraction(2 ** tree.order, tree.density)

    def test_counits(self, rng):
        alpha = random_character(rng, 4)
        assert convolve(alpha, counit(), Coproduct.BCK, 4).values == alpha.restricted(4).values
        assert convolve(ec_counit(), alpha, Coproduct.EC, 4).values == alpha.restricted(4).values

    def test_modified_field_of_exact_flow(self):
        beta = modified_field_character(exact_flow_character(5), 5)
        assert beta.values == {DOT: 1}
        assert beta.empty == 0

    def test_inverse_needs_unit(self):
        with pytest.raises(ValueError):
            bck_inverse(ClassicalCharacter({DOT: 1}, 0), 3)

    def test_cointeraction(self, rng):
        beta = random_character(rng, 4, empty=0)
        a1, a2 = random_character(rng, 4), random_character(rng, 4)
        assert verify_classical_cointeraction(beta, a1, a2, 4).passed


class TestSeries:
    """B-series of polynomial fields against the Taylor oracle."""

    def test_parse_field(self):
        assert parse_field("y**2 + 1") == Y**2 + 1
        with pytest.raises(ValueError):
            parse_field("sin(y)")
        with pytest.raises(ValueError):
            parse_field("y*z")

    @pytest.mark.parametrize("text", ["y", "y**2", "y**3 - y"])
    def test_exact_flow(self, text):
        assert verify_exact_flow(parse_field(text), 5).passed

    def test_linear_field_flow_is_exponential(self):
        taylor = sum(H**n / sympy.factorial(n) for n in range(5)) * Y
        assert (exact_flow(Y, 4) - taylor).expand() == 0

    def test_composition(self, rng):
        field = Y**2 + 1
        alpha, beta = random_character(rng, 4), random_character(rng, 4)
        report = verify_classical_composition(alpha, beta, field, 4)
        assert report.passed, report.mismatches

    def test_substitution(self, rng):
        field = Y**2 + 1
        beta = random_character(rng, 4)
        inner = random_character(rng, 4, empty=0)
        report = verify_classical_substitution(beta, inner, field, 4)
        assert report.passed, report.mismatches

    def test_substitution_needs_zero_unit(self, rng):
        with pytest.raises(ValueError):
            substitute(random_character(rng, 3), random_character(rng, 3), Y, 3)

    def test_order_bound(self, rng):
        alpha = random_character(rng, 2)
        with pytest.raises(OrderTooLarge):
            verify_classical_composition(alpha, alpha, Y, 9)

    def test_series_of_counit(self):
        assert b_series(counit(), Y**2, 4) == Y
