import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, PrivateAttr, ValidationError, field_validator, model_validator

from src.trees.decorated import ZERO_NOISE, EdgeDecoration
from src.trees.multi_index import MultiIndex
from src.utils.errors import SpecError, UnknownLabel

SPECS_DIR = Path(__file__).resolve().parent.parent.parent / "specs"


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.replace(" ", ""))
    raise ValueError(f"cannot read {value!r} as a rational")


class DependencyRule(BaseModel):
    """Variables on which the nonlinearity F^noise_target depends."""
    model_config = ConfigDict(frozen=True)

    target: str
    noise: str = ZERO_NOISE
    variables: tuple[tuple[str, tuple[int, ...]], ...] = ()
    arity: int | None = None

    @field_validator("noise", mode="before")
    @classmethod
    def _noise_as_text(cls, v: Any) -> str:
        return str(v)

    @field_validator("arity")
    @classmethod
    def _arity_non_negative(cls, v: int | None) -> int | None:
        if v is not None and v < 0:
            raise ValueError("arity must be non-negative")
        return v


class EquationSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = "spec"
    dimension: int
    scaling: tuple[Fraction, ...]
    kernel_labels: dict[str, Fraction]
    noise_labels: dict[str, Fraction]
    dependency: tuple[DependencyRule, ...] = ()
    poly_degree_cap: int = 4
    gamma: Fraction | None = None

    _cache: dict = PrivateAttr(default_factory=dict)

    @field_validator("scaling", mode="before")
    @classmethod
    def _scaling_rationals(cls, v: Any) -> tuple[Fraction, ...]:
        return tuple(parse_rational(x) for x in v)

    @field_validator("gamma", mode="before")
    @classmethod
    def _gamma_rational(cls, v: Any) -> Fraction | None:
        return None if v is None else parse_rational(v)

    @field_validator("kernel_labels", "noise_labels", mode="before")
    @classmethod
    def _label_degrees(cls, v: Any) -> dict[str, Fraction]:
        return {str(name): parse_rational(deg) for name, deg in dict(v).items()}

    @model_validator(mode="after")
    def _check_consistency(self) -> "EquationSpec":
        if self.dimension < 0:
            raise ValueError("dimension must be non-negative")
        if len(self.scaling) != self.dimension + 1:
            raise ValueError(f"scaling needs {self.dimension + 1} entries")
        if any(s <= 0 for s in self.scaling):
            raise ValueError("scaling entries must be positive")
        if ZERO_NOISE not in self.noise_labels:
            raise ValueError("noise labels must contain the label '0'")
        clash = set(self.kernel_labels) & set(self.noise_labels)
        if clash:
            raise ValueError(f"labels used both as kernel and noise: {sorted(clash)}")
        seen = set()
        for rule in self.dependency:
            if rule.target not in self.kernel_labels:
                raise ValueError(f"dependency target {rule.target!r} is not a kernel label")
            if rule.noise not in self.noise_labels:
                raise ValueError(f"dependency noise {rule.noise!r} is not a noise label")
            if (rule.target, rule.noise) in seen:
                raise ValueError(f"duplicate dependency entry ({rule.target}, {rule.noise})")
            seen.add((rule.target, rule.noise))
            for label, m in rule.variables:
                if label not in self.kernel_labels:
                    raise ValueError(f"dependency variable {label!r} is not a kernel label")
                if len(m) != self.dimension + 1 or any(x < 0 for x in m):
                    raise ValueError(f"bad multi-index {m} for variable {label!r}")
        return self

    @property
    def dim(self) -> int:
        return self.dimension + 1

    def label_degree(self, label: str) -> Fraction:
        if label in self.kernel_labels:
            return self.kernel_labels[label]
        if label in self.noise_labels:
            return self.noise_labels[label]
        raise UnknownLabel(f"label {label!r} is not declared in spec {self.name!r}")

    def edge_degree(self, edge: EdgeDecoration) -> Fraction:
        """|(t, m)|_s = |t|_s - |m|_s."""
        if edge.label not in self.kernel_labels:
            raise UnknownLabel(f"kernel label {edge.label!r} is not declared in spec {self.name!r}")
        return self.kernel_labels[edge.label] - sum(
            (s * x for s, x in zip(self.scaling, edge.derivative)), Fraction(0)
        )

    @property
    def dependency_map(self) -> dict[tuple[str, str], frozenset[EdgeDecoration]]:
        if "dep" not in self._cache:
            self._cache["dep"] = {
                (r.target, r.noise): frozenset(EdgeDecoration(lbl, tuple(m)) for lbl, m in r.variables)
                for r in self.dependency
            }
        return self._cache["dep"]

    def dependencies(self, target: str, noise: str) -> frozenset[EdgeDecoration]:
        return self.dependency_map.get((target, noise), frozenset())

    def arity(self, target: str, noise: str) -> int | None:
        for r in self.dependency:
            if r.target == target and r.noise == noise:
                return r.arity
        return 0

    def noises_for(self, target: str) -> list[str]:
        return sorted(noise for (t, noise) in self.dependency_map if t == target)

    def all_variables(self) -> list[EdgeDecoration]:
        out = set()
        for variables in self.dependency_map.values():
            out |= variables
        return sorted(out)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "scaling": [str(s) for s in self.scaling],
            "kernel_labels": {k: str(v) for k, v in sorted(self.kernel_labels.items())},
            "noise_labels": {k: str(v) for k, v in sorted(self.noise_labels.items())},
            "dependency": [
                {
                    "target": r.target,
                    "noise": r.noise,
                    "variables": [[lbl, list(m)] for lbl, m in r.variables],
                    **({"arity": r.arity} if r.arity is not None else {}),
                }
                for r in self.dependency
            ],
            "poly_degree_cap": self.poly_degree_cap,
            **({"gamma": str(self.gamma)} if self.gamma is not None else {}),
        }


def resolve_spec_path(path: str | Path) -> Path:
    """A path as given, else a bundled spec by file name or by bare name."""
    path = Path(path)
    if path.exists():
        return path
    for candidate in (SPECS_DIR / path, SPECS_DIR / f"{path}.yaml"):
        if candidate.exists():
            return candidate
    return path


def load_spec(path: str | Path) -> EquationSpec:
    path = resolve_spec_path(path)
    try:
        with open(path) as f:
            if path.suffix in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (OSError, yaml.YAMLError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecError(f"spec {path} is not a mapping")
    data.setdefault("name", path.stem)
    try:
        return EquationSpec.model_validate(data)
    except ValidationError as exc:
        raise SpecError(f"invalid spec {path}: {exc}") from exc


def bundled_spec(name: str) -> EquationSpec:
    return load_spec(SPECS_DIR / f"{name}.yaml")


def as_multi_index(values: Any) -> MultiIndex:
    return tuple(int(x) for x in values)
