"""
Multi-indices in N^{d+1}, stored as plain tuples of non-negative ints.

Subtraction that would go negative returns None; callers drop the term.
"""
import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence

MultiIndex = tuple[int, ...]


def zero(dim: int) -> MultiIndex:
    return (0,) * dim


def unit(i: int, dim: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(dim))


def is_zero(k: MultiIndex) -> bool:
    return not any(k)


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def sub(a: MultiIndex, b: MultiIndex) -> MultiIndex | None:
    out = tuple(x - y for x, y in zip(a, b, strict=True))
    if any(x < 0 for x in out):
        return None
    return out


def total(parts: Sequence[MultiIndex], dim: int) -> MultiIndex:
    acc = zero(dim)
    for p in parts:
        acc = add(acc, p)
    return acc


def factorial(k: MultiIndex) -> int:
    return math.prod(math.factorial(x) for x in k)


def binomial(n: MultiIndex, ell: MultiIndex) -> int:
    return math.prod(math.comb(x, y) for x, y in zip(n, ell, strict=True))


def multinomial(n: MultiIndex, parts: Sequence[MultiIndex]) -> int:
    """n! / (parts! * (n - sum parts)!), zero when the parts exceed n."""
    rest = sub(n, total(parts, len(n)))
    if rest is None:
        return 0
    denom = factorial(rest) * math.prod(factorial(p) for p in parts)
    return factorial(n) // denom


def weight(k: MultiIndex, scaling: Sequence[Fraction]) -> Fraction:
    """Scaled length |k|_s."""
    return sum((Fraction(s) * x for s, x in zip(scaling, k, strict=True)), Fraction(0))


def below(n: MultiIndex) -> Iterator[MultiIndex]:
    """All ell with 0 <= ell <= n componentwise."""
    return itertools.product(*(range(x + 1) for x in n))


def up_to_weight(dim: int, scaling: Sequence[Fraction], bound: Fraction) -> Iterator[MultiIndex]:
    """All k with |k|_s <= bound, in lexicographic order."""
    if bound < 0:
        return
    ranges = [range(int(Fraction(bound) // Fraction(s)) + 1) for s in scaling]
    for k in itertools.product(*ranges):
        if weight(k, scaling) <= bound:
            yield k


def decompositions(k: MultiIndex, parts: int) -> Iterator[tuple[MultiIndex, ...]]:
    """All ordered tuples of `parts` multi-indices summing to k."""
    if parts == 0:
        if is_zero(k):
            yield ()
        return
    if parts == 1:
        yield (k,)
        return
    for first in below(k):
        rest = sub(k, first)
        for tail in decompositions(rest, parts - 1):
            yield (first, *tail)


def render(k: MultiIndex) -> str:
    return "(" + ",".join(str(x) for x in k) + ")"
