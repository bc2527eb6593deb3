"""
Symbolic nonlinearities: polynomials in the variables Z_a with coefficients
built from derivative atoms D_{a_1} ... D_{a_n} F^l_t.

Every expression is fully expanded; equality is structural on the canonical
monomials. Derivations need the equation spec for the dependency sets.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable

from src.trees import multi_index as mi
from src.trees.combination import LinearCombination, Scalar, scalar_record
from src.trees.decorated import ZERO_NOISE, EdgeDecoration
from src.trees.multi_index import MultiIndex

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec


@dataclass(frozen=True, order=True)
class Atom:
    """D_{derivs} F^noise_target with the derivatives in sorted order."""
    target: str
    noise: str = ZERO_NOISE
    derivs: tuple[EdgeDecoration, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "derivs", tuple(sorted(EdgeDecoration(d[0], tuple(d[1])) for d in self.derivs)))

    def with_derivative(self, a: EdgeDecoration) -> "Atom":
        return Atom(self.target, self.noise, self.derivs + (a,))

    def __str__(self) -> str:
        ds = "".join(f"D[{d.render()}]" for d in self.derivs)
        return f"{ds}F[{self.target};{self.noise}]"

    def to_record(self) -> list[Any]:
        return [self.target, self.noise, [[d.label, list(d.derivative)] for d in self.derivs]]


def _power_text(base: str, power: int) -> str:
    return base if power == 1 else f"{base}^{power}"


@dataclass(frozen=True)
class Monomial:
    z: tuple[tuple[EdgeDecoration, int], ...] = ()
    atoms: tuple[tuple[Atom, int], ...] = ()
    text: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(sorted((b, p) for b, p in self.z if p)))
        object.__setattr__(self, "atoms", tuple(sorted((a, p) for a, p in self.atoms if p)))
        parts = [_power_text(f"Z[{b.render()}]", p) for b, p in self.z]
        parts += [_power_text(str(a), p) for a, p in self.atoms]
        object.__setattr__(self, "text", "*".join(parts) if parts else "1")

    @classmethod
    def build(cls, z: Counter | dict = None, atoms: Counter | dict = None) -> "Monomial":
        return cls(tuple((z or {}).items()), tuple((atoms or {}).items()))

    def z_counts(self) -> Counter:
        return Counter(dict(self.z))

    def atom_counts(self) -> Counter:
        return Counter(dict(self.atoms))

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial.build(self.z_counts() + other.z_counts(), self.atom_counts() + other.atom_counts())

    def __str__(self) -> str:
        return self.text

    def __lt__(self, other: "Monomial") -> bool:
        return self.text < other.text


ONE = Monomial()


class DiffExpr(LinearCombination[Monomial]):
    """A rational (or sympy) combination of monomials; `*` between two expressions multiplies them."""

    @classmethod
    def constant(cls, c: Scalar = 1) -> "DiffExpr":
        return cls([(ONE, c)])

    @classmethod
    def variable(cls, a: EdgeDecoration, power: int = 1) -> "DiffExpr":
        return cls([(Monomial(((a, power),)), 1)])

    @classmethod
    def atom(cls, target: str, noise: str = ZERO_NOISE, derivs: Iterable[EdgeDecoration] = ()) -> "DiffExpr":
        return cls([(Monomial((), ((Atom(target, noise, tuple(derivs)), 1),)), 1)])

    def __mul__(self, other) -> "DiffExpr":
        if not isinstance(other, LinearCombination):
            return super().__mul__(other)
        out = DiffExpr()
        for m1, c1 in self.items():
            for m2, c2 in other.items():
                out.add_term(m1 * m2, c1 * c2)
        return out

    def __rmul__(self, factor) -> "DiffExpr":
        return super().__mul__(factor)

    def variables(self) -> set[EdgeDecoration]:
        return {b for m in self.keys() for b, _ in m.z}

    def atoms(self) -> set[Atom]:
        return {a for m in self.keys() for a, _ in m.atoms}

    def to_records(self) -> list[dict[str, Any]]:
        records = []
        for m, c in self.sorted_items():
            records.append({
                "coeff": scalar_record(c),
                "Z": [[b.label, list(b.derivative), p] for b, p in m.z],
                "atoms": [a.to_record() for a, p in m.atoms for _ in range(p)],
            })
        return records

    def __repr__(self) -> str:
        return f"DiffExpr({self.render()})"


def product(factors: Iterable[DiffExpr]) -> DiffExpr:
    out = DiffExpr.constant(1)
    for f in factors:
        out = out * f
    return out


def _lowered(counts: Counter, key, power: int) -> Counter:
    out = Counter(counts)
    out[key] = power - 1
    if out[key] == 0:
        del out[key]
    return out


def derive_monomial_D(m: Monomial, a: EdgeDecoration, spec: "EquationSpec") -> DiffExpr:
    out = DiffExpr()
    z, atoms = m.z_counts(), m.atom_counts()
    for b, p in m.z:
        if b == a:
            out.add_term(Monomial.build(_lowered(z, b, p), atoms), p)
    for atom, p in m.atoms:
        if a in spec.dependencies(atom.target, atom.noise):
            rest = _lowered(atoms, atom, p)
            rest[atom.with_derivative(a)] += 1
            out.add_term(Monomial.build(z, rest), p)
    return out


def derive_D(e: DiffExpr, a: EdgeDecoration, spec: "EquationSpec") -> DiffExpr:
    """Leibniz derivation with D_a Z_b = delta_ab and D_a atom = atom with a added (zero outside dep)."""
    out = DiffExpr()
    for m, c in e.items():
        out.add_scaled(derive_monomial_D(m, a, spec), c)
    return out


def _partial_once(e: DiffExpr, i: int, spec: "EquationSpec") -> DiffExpr:
    """d^{e_i} = sum_a Z_{a + e_i} D_a."""
    step = mi.unit(i, spec.dim)
    out = DiffExpr()
    for m, c in e.items():
        z, atoms = m.z_counts(), m.atom_counts()
        for b, p in m.z:
            rest = _lowered(z, b, p)
            rest[b.shifted(step)] += 1
            out.add_term(Monomial.build(rest, atoms), c * p)
        for atom, p in m.atoms:
            for dep in sorted(spec.dependencies(atom.target, atom.noise)):
                rest = _lowered(atoms, atom, p)
                rest[atom.with_derivative(dep)] += 1
                zs = Counter(z)
                zs[dep.shifted(step)] += 1
                out.add_term(Monomial.build(zs, rest), c * p)
    return out


def derive_partial(e: DiffExpr, k: MultiIndex, spec: "EquationSpec") -> DiffExpr:
    """d^k = prod_i (d^{e_i})^{k_i}, fully expanded."""
    out = e
    for i, times in enumerate(k):
        for _ in range(times):
            out = _partial_once(out, i, spec)
    return out if out is not e else e.copy()