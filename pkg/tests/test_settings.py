"""
Tests for run settings and equation spec loading.
"""
import json
from fractions import Fraction
from pathlib import Path

import pytest
import structlog

from src.config.settings import Settings, get_settings
from src.models.equation_spec import SPECS_DIR, load_spec, parse_rational, resolve_spec_path
from src.trees.decorated import EdgeDecoration
from src.trees.enumeration import TreeEnumerator
from src.utils.errors import SpecError, UnknownLabel
from src.utils import logger as logger_module
from src.utils.logger import get_logger, setup_logging


class TestSettings:
    """Environment defaults and CLI overrides."""

    def test_defaults(self, monkeypatch):
        for name in ("RSB_SEED", "RSB_DEBUG", "RSB_GAMMA", "RSB_CAP", "RSB_MAX_TREES", "RSB_REPORT_DIR"):
            monkeypatch.delenv(name, raising=False)
        settings = get_settings()
        assert settings.seed == 42
        assert settings.debug is False
        assert settings.gamma is None
        assert settings.max_trees == 5000
        assert settings.report_dir == Path("reports")

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("RSB_SEED", "7")
        monkeypatch.setenv("RSB_DEBUG", "yes")
        monkeypatch.setenv("RSB_GAMMA", "-1/5")
        monkeypatch.setenv("RSB_CAP", "")
        monkeypatch.setenv("RSB_REPORT_DIR", "out")
        settings = Settings.from_env()
        assert settings.seed == 7
        assert settings.debug is True
        assert settings.gamma == Fraction(-1, 5)
        assert settings.cap is None
        assert settings.report_dir == Path("out")

    def test_overrides_skip_missing_values(self):
        settings = Settings(seed=3, gamma="1/2").with_overrides(seed=None, gamma="2/3", max_trees=10)
        assert settings.seed == 3
        assert settings.gamma == Fraction(2, 3)
        assert settings.max_trees == 10

    def test_max_trees_reaches_the_enumerator(self, monkeypatch, toy):
        monkeypatch.setenv("RSB_MAX_TREES", "12")
        assert get_settings().max_trees == 12
        assert TreeEnumerator(toy).max_trees == 12
        assert TreeEnumerator(toy, 3).max_trees == 3


class TestRationals:
    """Degrees and scalings read as exact fractions."""

    def test_forms(self):
        assert parse_rational("-13/5") == Fraction(-13, 5)
        assert parse_rational(" 1 / 2 ") == Fraction(1, 2)
        assert parse_rational(0.5) == Fraction(1, 2)
        assert parse_rational(3) == 3

    def test_rejects(self):
        with pytest.raises(ValueError):
            parse_rational(True)
        with pytest.raises(ValueError):
            parse_rational([1])


class TestEquationSpec:
    """Bundled specs and validation of user specs."""

    def test_phi4(self, phi4):
        assert phi4.dim == 4
        assert phi4.noise_labels["xi"] == Fraction(-13, 5)
        assert phi4.arity("u", "0") == 3
        assert phi4.dependencies("u", "0") == frozenset({EdgeDecoration("u", (0, 0, 0, 0))})

    def test_toy(self, toy):
        assert toy.scaling == (2, 1)
        assert toy.poly_degree_cap == 3
        assert toy.edge_degree(EdgeDecoration("u", (0, 1))) == 1
        assert toy.noises_for("u") == ["0", "xi"]
        with pytest.raises(UnknownLabel):
            toy.label_degree("v")

    def test_bundled_name_resolves(self):
        assert load_spec("toy_1plus1.yaml").name == "toy_1plus1"
        assert load_spec("toy_1plus1").name == "toy_1plus1"
        assert resolve_spec_path("phi4") == SPECS_DIR / "phi4.yaml"

    def test_spec_gamma(self, toy, phi4, tmp_path):
        assert toy.gamma == 0
        assert phi4.gamma == 0
        path = tmp_path / "cut.json"
        path.write_text(json.dumps({**toy.to_dict(), "gamma": "-1/5"}))
        assert load_spec(path).gamma == Fraction(-1, 5)

    def test_json_spec(self, tmp_path, toy):
        path = tmp_path / "copy.json"
        path.write_text(json.dumps(toy.to_dict()))
        loaded = load_spec(path)
        assert loaded.scaling == toy.scaling
        assert loaded.dependency_map == toy.dependency_map

    @pytest.mark.parametrize("body", [
        "dimension: 1\nscaling: [2]\nkernel_labels: {u: 2}\nnoise_labels: {'0': 0}\n",
        "dimension: 1\nscaling: [2, 1]\nkernel_labels: {u: 2}\nnoise_labels: {xi: -1}\n",
        "dimension: 1\nscaling: [2, 1]\nkernel_labels: {u: 2}\nnoise_labels: {'0': 0, u: 1}\n",
        "dimension: 1\nscaling: [2, 1]\nkernel_labels: {u: 2}\nnoise_labels: {'0': 0}\n"
        "dependency: [{target: u, noise: '0', variables: [[u, [0]]]}]\n",
        "- not a mapping\n",
        "dimension: [\n",
    ])
    def test_invalid(self, tmp_path, body):
        path = tmp_path / "bad.yaml"
        path.write_text(body)
        with pytest.raises(SpecError):
            load_spec(path)

    def test_missing(self, tmp_path):
        with pytest.raises(SpecError):
            load_spec(tmp_path / "nowhere.yaml")


class TestLogging:
    """Structured events on stderr."""

    @pytest.fixture(autouse=True)
    def _reset(self):
        structlog.reset_defaults()
        logger_module._configured = False
        yield
        structlog.reset_defaults()
        logger_module._configured = False

    def test_events_follow_the_captured_stream(self, capsys):
        setup_logging(debug=True, colors=False)
        get_logger("Enumeration").debug("Trees enumerated", count=3)
        err = capsys.readouterr().err
        assert "Trees enumerated" in err
        assert "component=Enumeration" in err
        assert "count=3" in err

    def test_library_use_is_quiet_below_warnings(self, capsys):
        get_logger("Enumeration").info("Trees enumerated")
        get_logger("Enumeration").warning("Enumeration truncated")
        err = capsys.readouterr().err
        assert "Trees enumerated" not in err
        assert "Enumeration truncated" in err
