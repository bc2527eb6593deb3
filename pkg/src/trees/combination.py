"""
Finite formal linear combinations with exact coefficients.

Keys are trees, forests or pairs of them; coefficients are Fractions, or sympy
expressions in symbolic mode. Zero coefficients are never stored.
"""
from fractions import Fraction
from typing import Any, Callable, Generic, Hashable, Iterable, Iterator, TypeVar

import sympy

K = TypeVar("K", bound=Hashable)
Scalar = Any


def is_zero_scalar(c: Scalar) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return sympy.expand(c) == 0


def normalize_scalar(c: Scalar) -> Scalar:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    c = sympy.expand(c)
    if c.is_Rational:
        return Fraction(int(c.p), int(c.q))
    return c


def scalar_record(c: Scalar) -> dict[str, Any]:
    if isinstance(c, Fraction):
        return {"num": c.numerator, "den": c.denominator}
    return {"expr": sympy.sstr(c)}


class LinearCombination(Generic[K]):
    __slots__ = ("_terms",)

    def __init__(self, terms: dict[K, Scalar] | Iterable[tuple[K, Scalar]] | None = None):
        self._terms: dict[K, Scalar] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, c in items:
                self.add_term(key, c)

    @classmethod
    def single(cls, key: K, coefficient: Scalar = 1) -> "LinearCombination[K]":
        return cls([(key, coefficient)])

    def add_term(self, key: K, coefficient: Scalar):
        if is_zero_scalar(coefficient):
            return
        c = normalize_scalar(self._terms.get(key, 0) + coefficient)
        if is_zero_scalar(c):
            self._terms.pop(key, None)
        else:
            self._terms[key] = c

    def add_scaled(self, other: "LinearCombination[K]", factor: Scalar = 1):
        if is_zero_scalar(factor):
            return
        for key, c in other._terms.items():
            self.add_term(key, c * factor)

    def coefficient(self, key: K) -> Scalar:
        return self._terms.get(key, Fraction(0))

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def sorted_items(self) -> list[tuple[K, Scalar]]:
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    def __iter__(self) -> Iterator[K]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, key: object) -> bool:
        return key in self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearCombination):
            return NotImplemented
        return not (self - other)._terms

    def __add__(self, other: "LinearCombination[K]") -> "LinearCombination[K]":
        out = self.copy()
        out.add_scaled(other)
        return out

    def __sub__(self, other: "LinearCombination[K]") -> "LinearCombination[K]":
        out = self.copy()
        out.add_scaled(other, -1)
        return out

    def __mul__(self, factor: Scalar) -> "LinearCombination[K]":
        out = type(self)()
        out.add_scaled(self, factor)
        return out

    __rmul__ = __mul__

    def __neg__(self) -> "LinearCombination[K]":
        return self * -1

    def copy(self) -> "LinearCombination[K]":
        out = type(self)()
        out._terms = dict(self._terms)
        return out

    def filter(self, keep: Callable[[K], bool]) -> "LinearCombination[K]":
        return type(self)([(k, c) for k, c in self._terms.items() if keep(k)])

    def linear_map(self, fn: Callable[[K], "LinearCombination"]) -> "LinearCombination":
        """Extend fn: key -> combination linearly."""
        out = LinearCombination()
        for key, c in self._terms.items():
            out.add_scaled(fn(key), c)
        return out

    def to_records(self) -> list[dict[str, Any]]:
        records = []
        for key, c in self.sorted_items():
            rec = scalar_record(c)
            if isinstance(key, tuple):
                rec["left"], rec["right"] = str(key[0]), str(key[1])
            else:
                rec["tree"] = str(key)
            records.append(rec)
        return records

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, c in self.sorted_items():
            shown = f"{key[0]} ⊗ {key[1]}" if isinstance(key, tuple) else str(key)
            parts.append(f"({c}) {shown}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LinearCombination({self.render()})"


def _sort_key(key: Any) -> tuple:
    if isinstance(key, tuple):
        return tuple(str(k) for k in key)
    return (str(key),)


def inner_product(u: LinearCombination, v: LinearCombination) -> Scalar:
    """<sigma, tau> = delta * S(tau), extended bilinearly."""
    total = Fraction(0)
    small, large = (u, v) if len(u) <= len(v) else (v, u)
    for key, c in small.items():
        if key in large:
            total = total + c * large.coefficient(key) * _symmetry(key)
    return normalize_scalar(total)


def _symmetry(key: Any) -> int:
    if isinstance(key, tuple):
        return _symmetry(key[0]) * _symmetry(key[1])
    return key.symmetry_factor
