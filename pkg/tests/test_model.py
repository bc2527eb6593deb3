"""
Tests for the numerical model: grids, kernels, noises and the Pi evaluators.
"""
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from src.algebra.renormalisation import PreparationMap
from src.config.settings import ModelConfig
from src.model import Grid, KernelSpec, NoiseSpec, PiEvaluator, build_model, load_field, save_field
from src.model.grid import scaled_distance
from src.model.kernel import time_cutoff
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination
from src.trees.decorated import monomial, unit_tree
from src.trees.enumeration import TreeEnumerator
from src.trees.grammar import parse_tree
from src.utils.errors import (
    DegenerateSamples,
    IncompatiblePreparationMap,
    SpecError,
    StencilExceeded,
    UnknownLabel,
)

XI = "Xi[xi]"
I_XI = "I[u,(0,0)](Xi[xi])"


class TestGrid:
    """Centred box grids and field files."""

    def test_axis_is_centred(self):
        grid = Grid.uniform(2, 4, 0.5)
        assert np.allclose(grid.axis(0), [-0.75, -0.25, 0.25, 0.75])
        assert grid.center() == (2, 2)
        assert grid.cell_volume == 0.25
        assert len(grid.offsets(1)) == 7

    def test_bad_index(self):
        with pytest.raises(IndexError):
            Grid.uniform(2, 4, 0.5).point((0, 4))

    def test_degenerate(self):
        with pytest.raises(SpecError):
            Grid((1, 4), (0.1, 0.1))
        with pytest.raises(SpecError):
            Grid((4,), (0.1, 0.1))

    def test_header(self):
        grid = Grid((3, 5), (0.25, 0.125))
        assert Grid.from_header("# " + grid.header()) == grid
        with pytest.raises(SpecError):
            Grid.from_header("# shape=3,5")

    def test_field_file(self, tmp_path):
        grid = Grid((3, 4), (0.5, 0.25))
        values = np.arange(12, dtype=float).reshape(3, 4) / 7
        path = tmp_path / "fields" / "pi.csv"
        save_field(path, values, grid)
        loaded, loaded_grid = load_field(path)
        assert loaded_grid == grid
        assert np.array_equal(loaded, values)

    def test_field_shape_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            save_field(tmp_path / "x.csv", np.zeros((2, 2)), Grid((3, 4), (0.5, 0.25)))
        with pytest.raises(SpecError):
            load_field(tmp_path / "missing.csv")

    def test_scaled_distance(self):
        assert scaled_distance((0.25, -0.5), (2, 1)) == pytest.approx(0.5)


class TestKernel:
    """Cut-off heat kernels, spectral derivatives and convolution."""

    def test_time_cutoff(self):
        values = time_cutoff(np.array([-0.1, 0.0, 0.125, 0.25, 0.3]), 0.25)
        assert values[0] == values[1] == values[3] == values[4] == 0
        assert values[2] == pytest.approx(1.0)

    def test_convolving_a_delta(self, toy_model):
        kernels = toy_model.kernels
        n = toy_model.grid.shape[0]
        values = np.zeros(toy_model.grid.shape)
        j = (10, 20)
        values[j] = 1.0
        result = kernels.convolve("u", (0, 0), values)
        samples = kernels.derivative("u", (0, 0))
        for i in [(12, 20), (20, 15), (5, 5)]:
            offset = tuple(a - b + n - 1 for a, b in zip(i, j))
            assert result[i] == pytest.approx(samples[offset] * toy_model.grid.cell_volume, abs=1e-12)

    def test_derivative_errors(self, toy_model):
        kernels = toy_model.kernels
        with pytest.raises(StencilExceeded):
            kernels.derivative("u", (0, 5))
        with pytest.raises(UnknownLabel):
            kernels.derivative("v", (0, 0))
        with pytest.raises(ValueError):
            kernels.derivative("u", (0, 0, 0))

    def test_spectral_derivative_matches_differences(self):
        kernels = KernelSpec.heat(Grid.uniform(1, 64, 1 / 256), ["u"])
        assert kernels.derivative_consistency("u", 0) < 0.01

    def test_sample_shape_checked(self):
        grid = Grid.uniform(2, 4, 0.5)
        with pytest.raises(ValueError):
            KernelSpec(grid, {"u": np.zeros((4, 4))})


class TestNoise:
    """Seeded smooth noises."""

    def test_deterministic(self):
        grid = Grid.uniform(2, 16, 1 / 16)
        a = NoiseSpec.generate(grid, ["0", "xi"], seed=3)
        b = NoiseSpec.generate(grid, ["0", "xi"], seed=3)
        assert np.array_equal(a("xi"), b("xi"))
        assert a("xi").std() == pytest.approx(1.0)
        assert np.array_equal(a("0"), np.ones(grid.shape))
        assert np.array_equal(a(None), np.ones(grid.shape))

    def test_unknown(self):
        noises = NoiseSpec.generate(Grid.uniform(1, 16, 0.1), ["xi"], seed=1)
        with pytest.raises(UnknownLabel):
            noises("eta")


class TestEvaluator:
    """Pi, Pi_z, f_z and the renormalised model on the toy equation."""

    def test_plain_model_of_monomials_and_noise(self, toy, toy_model):
        x0, x1 = toy_model.grid.mesh()
        assert np.allclose(toy_model.eval_pi(monomial((1, 2))), x0 * x1 ** 2)
        assert np.array_equal(toy_model.eval_pi(parse_tree(XI, spec=toy)), toy_model.noises("xi"))

    def test_polynomial_exactness(self, toy_model):
        report = toy_model.check_polynomial_exactness(toy_model.grid.center())
        assert report.passed, report.mismatches

    def test_f_z_on_coordinates(self, toy_model):
        z = toy_model.grid.center()
        point = toy_model.grid.point(z)
        assert toy_model.eval_f_z(z, monomial((0, 1))) == pytest.approx(-point[1])
        assert toy_model.eval_f_z(z, monomial((0, 0))) == 1

    @pytest.mark.parametrize("text", [I_XI, "I[u,(0,1)](Xi[xi])", f"X^(0,1)*{I_XI}"])
    def test_factorization(self, toy, toy_model, text):
        outcome = toy_model.eval_f_z_factorization(toy_model.grid.center(), parse_tree(text, spec=toy))
        assert outcome["passed"], outcome

    def test_recentred_vanishes_at_base_point(self, toy, toy_model):
        z = toy_model.grid.center()
        field = toy_model.eval_pi_recentred(z, parse_tree(I_XI, spec=toy))
        assert abs(toy_model.eval_pi_recentred(z, parse_tree(I_XI, spec=toy), z)) <= 1e-12 * max(1.0, np.abs(field).max())

    def test_multiplicativity(self, toy, toy_model):
        pairs = [
            (monomial((0, 1)), parse_tree(I_XI, spec=toy)),
            (parse_tree(I_XI, spec=toy), parse_tree(XI, spec=toy)),
            (parse_tree(XI, spec=toy), parse_tree(XI, spec=toy)),
        ]
        report = toy_model.check_multiplicativity(pairs, toy_model.grid.center())
        assert report.passed, report.mismatches
        assert report.checked == 4

    def test_decay_of_a_space_monomial(self, toy_model):
        z = toy_model.grid.center()
        assert toy_model.estimate_decay_exponent(z, monomial((0, 1))) == pytest.approx(1.0, abs=1e-9)

    def test_decay_of_monomials_on_a_parabolic_grid(self, toy):
        """Time steps h_x^2 make the time ball resolve at every scale."""
        grid = Grid((65, 17), (1 / 1024, 1 / 32))
        evaluator = PiEvaluator(toy, grid, KernelSpec.heat(grid, ["u"]), NoiseSpec.generate(grid, ["xi"], 7))
        z = grid.center()
        assert evaluator.resolved_scales(z, (4, 2, 1)) == [4, 2, 1]
        assert evaluator.estimate_decay_exponent(z, monomial((1, 0)), (4, 2, 1)) == pytest.approx(2.0, abs=1e-9)
        assert evaluator.estimate_decay_exponent(z, monomial((0, 1)), (4, 2, 1)) == pytest.approx(1.0, abs=1e-9)

    def test_unresolved_time_ball_is_degenerate(self, toy_model):
        with pytest.raises(DegenerateSamples):
            toy_model.estimate_decay_exponent(toy_model.grid.center(), monomial((1, 0)))

    def test_resolved_scales(self, toy_model):
        assert toy_model.decay_unit() == pytest.approx(1 / 32)
        assert toy_model.ball_radii(8 / 32) == [2, 8]
        assert toy_model.resolved_scales(toy_model.grid.center()) == [8, 4, 2, 1]
        assert toy_model.resolved_scales((3, 3)) == [2, 1]

    def test_decay_of_a_planted_noise(self, toy):
        """I(Xi) on the default 64 x 64 grid decays at least like its degree 4/5 up to 0.2."""
        evaluator = build_model(toy, ModelConfig(), seed=7)
        z = evaluator.grid.center()
        tau = parse_tree(I_XI, spec=toy)
        assert len(evaluator.decay_profile(z, tau)) == 4
        assert evaluator.estimate_decay_exponent(z, tau) >= 0.8 - 0.2

    def test_decay_needs_two_scales(self, toy_model):
        with pytest.raises(DegenerateSamples):
            toy_model.estimate_decay_exponent(toy_model.grid.center(), monomial((0, 1)), scales=(1,))

    def test_stencil_exceeded(self, toy, toy_model):
        with pytest.raises(StencilExceeded):
            toy_model.eval_pi(parse_tree("I[u,(0,5)](Xi[xi])", spec=toy))

    def test_identity_renormalisation(self, toy, toy_model):
        z = toy_model.grid.center()
        tau = parse_tree(I_XI, spec=toy)
        prep = PreparationMap.identity(toy.scaling)
        assert np.allclose(toy_model.eval_pi_renormalised(z, tau, prep), toy_model.eval_pi_recentred(z, tau))

    def test_validate_preparation(self, toy, toy_model):
        enumerator = TreeEnumerator(toy)
        positive = enumerator.enumerate(Fraction(6, 5), "T+")[:4]
        trees = enumerator.enumerate(0)
        toy_model.validate_preparation(PreparationMap.identity(toy.scaling), positive, trees[:6])
        target = parse_tree("I[u,(0,1)](Xi[xi])", spec=toy)
        bad = PreparationMap(Character({}, CharacterMode.FOREST), toy.scaling,
                             {target: LinearCombination.single(unit_tree(2))})
        with pytest.raises(IncompatiblePreparationMap):
            toy_model.validate_preparation(bad, enumerator.enumerate(Fraction(6, 5), "T+"), trees)

    def test_dimension_mismatch(self, phi4, toy_model):
        with pytest.raises(ValueError):
            PiEvaluator(phi4, toy_model.grid, toy_model.kernels, toy_model.noises)


class TestModelConfig:
    """Grid defaults per dimension."""

    def test_coarse_grid_above_two_dimensions(self):
        assert ModelConfig.for_dimension(4).points == 12
        assert ModelConfig.for_dimension(2).points == 64
        assert ModelConfig.for_dimension(4, points=16).points == 16

    def test_full_grid_for_low_dimensions(self):
        config = ModelConfig.for_dimension(2, full=True)
        assert (config.points, config.spacing) == (256, 1 / 128)
        assert ModelConfig.for_dimension(4, full=True).points == 12
        assert ModelConfig.for_dimension(2, full=True, points=128).points == 128

    def test_validation(self):
        with pytest.raises(ValidationError):
            ModelConfig(points=4)
