"""
Tests for symbolic nonlinearities and elementary differentials.
"""
from fractions import Fraction

from src.symbolic.diff_expr import DiffExpr, derive_D, derive_partial
from src.symbolic.elementary import (
    differentiated_atom,
    elementary_differential,
    graft_rule_holds,
    raise_rule_holds,
    verify_star_morphism,
)
from src.trees.decorated import EdgeDecoration, unit_tree
from src.trees.enumeration import TreeEnumerator
from src.trees.grammar import parse_tree

A4 = EdgeDecoration("u", (0, 0, 0, 0))
U = EdgeDecoration("u", (0, 0))
DU = EdgeDecoration("u", (0, 1))


class TestDiffExpr:
    """Expanded polynomials in Z with derivative atoms."""

    def test_product_collects_powers(self):
        z = DiffExpr.variable(U)
        assert z * z == DiffExpr.variable(U, 2)
        assert str(next(iter((z * z).keys()))) == "Z[u,(0,0)]^2"

    def test_derive_variable(self, toy):
        assert derive_D(DiffExpr.variable(U, 3), U, toy) == DiffExpr.variable(U, 2) * 3
        assert not derive_D(DiffExpr.variable(U), DU, toy)

    def test_derive_atom_respects_dependencies(self, toy):
        assert derive_D(DiffExpr.atom("u", "xi"), U, toy) == DiffExpr.atom("u", "xi", [U])
        assert not derive_D(DiffExpr.atom("u", "xi"), DU, toy)

    def test_time_derivative_of_atom(self, phi4):
        """d^{e_1} F = Z_{a + e_1} D_a F for the single dependency a."""
        result = derive_partial(DiffExpr.atom("u"), (0, 1, 0, 0), phi4)
        expected = DiffExpr.variable(EdgeDecoration("u", (0, 1, 0, 0))) * DiffExpr.atom("u", "0", [A4])
        assert result == expected

    def test_partial_of_constant(self, toy):
        assert not derive_partial(DiffExpr.constant(3), (1, 0), toy)
        assert derive_partial(DiffExpr.constant(3), (0, 0), toy) == DiffExpr.constant(3)

    def test_records(self, toy):
        records = (DiffExpr.variable(U) * DiffExpr.atom("u", "xi") * Fraction(1, 2)).to_records()
        assert records == [{
            "coeff": {"num": 1, "den": 2},
            "Z": [["u", [0, 0], 1]],
            "atoms": [["u", "xi", []]],
        }]


class TestElementaryDifferential:
    """F_t(tau) on small trees."""

    def test_noise(self, phi4):
        assert elementary_differential("u", parse_tree("Xi[xi]", spec=phi4), phi4) == DiffExpr.atom("u", "xi")

    def test_unit(self, phi4):
        assert elementary_differential("u", unit_tree(phi4.dim), phi4) == DiffExpr.atom("u")

    def test_planted_noise(self, phi4):
        tau = parse_tree("I[u,(0,0,0,0)](Xi[xi])", spec=phi4)
        expected = DiffExpr.atom("u", "0", [A4]) * DiffExpr.atom("u", "xi")
        assert elementary_differential("u", tau, phi4) == expected

    def test_derivative_outside_dependencies(self, phi4):
        tau = parse_tree("I[u,(1,0,0,0)](Xi[xi])", spec=phi4)
        assert not elementary_differential("u", tau, phi4)
        assert not differentiated_atom("u", "xi", [A4], phi4)

    def test_cherry(self, phi4):
        leaf = "I[u,(0,0,0,0)](Xi[xi])"
        tau = parse_tree(f"{leaf}*{leaf}", spec=phi4)
        expected = DiffExpr.atom("u", "0", [A4, A4]) * DiffExpr.atom("u", "xi") * DiffExpr.atom("u", "xi")
        assert elementary_differential("u", tau, phi4) == expected

    def test_polynomial_decoration(self, toy):
        """F_u(X^(0,1)) = Z_(u,(0,1)) D_u F + Z_(u,(0,2)) D_du F."""
        result = elementary_differential("u", parse_tree("X^(0,1)", spec=toy), toy)
        expected = (DiffExpr.variable(DU) * DiffExpr.atom("u", "0", [U])
                    + DiffExpr.variable(EdgeDecoration("u", (0, 2))) * DiffExpr.atom("u", "0", [DU]))
        assert result == expected


class TestMorphism:
    """F_t(sigma star2 tau) in derivative form, and the grafting and raising rules."""

    def test_graft_rule(self, toy):
        xi = parse_tree("Xi[xi]", spec=toy)
        for tau in (unit_tree(2), parse_tree("I[u,(0,1)](Xi[xi])", spec=toy), parse_tree("X^(0,1)", spec=toy)):
            assert graft_rule_holds("u", xi, DU, tau, toy)

    def test_raise_rule(self, toy):
        tau = parse_tree("I[u,(0,0)](Xi[xi])", spec=toy)
        assert raise_rule_holds("u", tau, (0, 1), toy)
        assert raise_rule_holds("u", tau, (1, 0), toy)

    def test_star_morphism_toy(self, toy):
        enumerator = TreeEnumerator(toy)
        positive = enumerator.enumerate(Fraction(6, 5), "T+")
        trees = enumerator.enumerate(0)
        report = verify_star_morphism(toy, positive[:8], trees[:8])
        assert report.passed, report.mismatches
        assert report.checked == min(len(positive), 8) * min(len(trees), 8)
