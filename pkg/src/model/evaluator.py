"""
Numerical models on a grid: Pi, the recentred Pi_z, the recentering
character f_z and the renormalised Pi^R_z.

All maps are multiplicative for the tree product. Integration is the discrete
convolution of KernelSpec; the Taylor subtraction of Pi_z keeps the k with
|k|_s <= deg I_a(tau) (or < with strict=True), and f_z uses the matching
indicator so that Pi_z = (f_z (x) Pi) Delta2 holds exactly.
"""
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from src.algebra.coproducts import delta2
from src.algebra.renormalisation import PreparationMap, build_renorm_from_preparation
from src.model.grid import Grid, GridIndex, scaled_distance
from src.model.kernel import KernelSpec
from src.model.noise import NoiseSpec
from src.models.report import CheckReport
from src.trees import multi_index as mi
from src.trees.decorated import DecoratedTree, EdgeDecoration, monomial, tree_product
from src.trees.degree import degree
from src.utils.errors import DegenerateSamples, NoiseClash
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec

DEFAULT_SCALES = (8, 4, 2, 1)


class PiEvaluator:
    def __init__(self, spec: "EquationSpec", grid: Grid, kernels: KernelSpec, noises: NoiseSpec,
                 strict: bool = False):
        if grid.dim != spec.dim:
            raise ValueError(f"grid of dimension {grid.dim} for an equation in dimension {spec.dim}")
        self.spec = spec
        self.grid = grid
        self.kernels = kernels
        self.noises = noises
        self.strict = strict
        self.mesh = grid.mesh()
        self._plain: dict[str, np.ndarray] = {}
        self._recentred: dict[tuple[GridIndex, str], np.ndarray] = {}
        self._renormalised: dict[tuple[int, GridIndex, str], np.ndarray] = {}
        self.log = get_logger("PiEvaluator")

    def _keeps(self, deg: Fraction) -> bool:
        return deg > 0 if self.strict else deg >= 0

    def _planted_degree(self, edge: EdgeDecoration, child: DecoratedTree) -> Fraction:
        return self.spec.edge_degree(edge) + degree(child, self.spec)

    def _taylor_indices(self, deg: Fraction) -> list[mi.MultiIndex]:
        if deg < 0:
            return []
        scaling = self.spec.scaling
        return [k for k in mi.up_to_weight(self.spec.dim, scaling, deg) if self._keeps(deg - mi.weight(k, scaling))]

    def _power(self, k: mi.MultiIndex, center: np.ndarray | None = None) -> np.ndarray:
        out = np.ones(self.grid.shape)
        for i, p in enumerate(k):
            if p:
                base = self.mesh[i] if center is None else self.mesh[i] - center[i]
                out = out * base ** p
        return out

    @staticmethod
    def _at(field: np.ndarray, z_prime: GridIndex | None):
        return field if z_prime is None else float(field[tuple(z_prime)])

    def eval_pi(self, tau: DecoratedTree, z_prime: GridIndex | None = None):
        """Pi X^k = x^k, Pi Xi_l = xi_l, Pi I_(t,m)(tau) = D^m K_t * Pi tau, multiplicatively."""
        if tau.key not in self._plain:
            field = self._power(tau.decoration) * self.noises(tau.noise)
            for edge, child in tau.branches:
                field = field * self.kernels.convolve(edge.label, edge.derivative, self.eval_pi(child))
            self._plain[tau.key] = field
        return self._at(self._plain[tau.key], z_prime)

    def _integrate(self, z: GridIndex, edge: EdgeDecoration, child: DecoratedTree, inner: np.ndarray) -> np.ndarray:
        """D^m K * inner minus its Taylor polynomial at z, up to the degree of I_a(child)."""
        center = self.grid.point(z)
        field = self.kernels.convolve(edge.label, edge.derivative, inner)
        for k in self._taylor_indices(self._planted_degree(edge, child)):
            jet = self.kernels.convolve(edge.label, mi.add(edge.derivative, k), inner)[tuple(z)]
            field = field - self._power(k, center) * (jet / mi.factorial(k))
        return field

    def eval_pi_recentred(self, z: GridIndex, tau: DecoratedTree, z_prime: GridIndex | None = None):
        z = tuple(z)
        self.grid.check_index(z)
        key = (z, tau.key)
        if key not in self._recentred:
            field = self._power(tau.decoration, self.grid.point(z)) * self.noises(tau.noise)
            for edge, child in tau.branches:
                field = field * self._integrate(z, edge, child, self.eval_pi_recentred(z, child))
            self._recentred[key] = field
        return self._at(self._recentred[key], z_prime)

    def eval_f_z(self, z: GridIndex, sigma: DecoratedTree) -> float:
        """f_z on X^k prod I_{a_i}(tau_i): f_z(X_i) = -z_i and the Taylor coefficients of Pi_z at z."""
        z = tuple(z)
        center = self.grid.point(z)
        value = float(np.prod([(-c) ** p for c, p in zip(center, sigma.decoration)]))
        for edge, child in sigma.branches:
            inner = self.eval_pi_recentred(z, child)
            total = 0.0
            for ell in self._taylor_indices(self._planted_degree(edge, child)):
                jet = self.kernels.convolve(edge.label, mi.add(edge.derivative, ell), inner)[z]
                coeff = np.prod([(-c) ** p for c, p in zip(center, ell)]) / mi.factorial(ell)
                total += coeff * jet
            value *= -total
        return value

    def factorization_cap(self, tau: DecoratedTree) -> Fraction:
        """Largest planted degree inside tau, the Delta2 cap the f_z factorization needs."""
        cap = Fraction(0)
        for edge, child in tau.branches:
            cap = max(cap, self._planted_degree(edge, child), self.factorization_cap(child))
        return cap

    def eval_factorized(self, z: GridIndex, tau: DecoratedTree) -> np.ndarray:
        """(f_z (x) Pi) Delta2 tau as a field."""
        out = np.zeros(self.grid.shape)
        for (left, right), c in delta2(tau, self.factorization_cap(tau), self.spec.scaling).items():
            f = self.eval_f_z(z, left)
            if f != 0.0:
                out = out + float(c) * f * self.eval_pi(right)
        return out

    def eval_f_z_factorization(self, z: GridIndex, tau: DecoratedTree, points: Sequence[GridIndex] | None = None,
                               tolerance: float = 1e-6) -> dict:
        """Max discrepancy between Pi_z tau and (f_z (x) Pi) Delta2 tau over the sample points."""
        lhs = self.eval_pi_recentred(z, tau)
        rhs = self.eval_factorized(z, tau)
        if points:
            idx = tuple(np.array(points).T)
            lhs, rhs = lhs[idx], rhs[idx]
        discrepancy = float(np.max(np.abs(lhs - rhs)))
        scale = max(1.0, float(np.max(np.abs(lhs))))
        passed = discrepancy <= tolerance * scale
        self.log.debug("Factorization checked", tree=tau.key, z=list(z), discrepancy=discrepancy)
        return {"tree": tau.key, "z": list(z), "discrepancy": discrepancy, "scale": scale,
                "tolerance": tolerance, "passed": passed}

    def validate_preparation(self, prep: PreparationMap, positive: Iterable[DecoratedTree],
                             trees: Iterable[DecoratedTree]):
        build_renorm_from_preparation(prep, positive, trees, validate=True)

    def _renormalised_product(self, prep: PreparationMap, z: GridIndex, tau: DecoratedTree) -> np.ndarray:
        field = self._power(tau.decoration, self.grid.point(z)) * self.noises(tau.noise)
        for edge, child in tau.branches:
            field = field * self._integrate(z, edge, child, self.eval_pi_renormalised(z, child, prep))
        return field

    def eval_pi_renormalised(self, z: GridIndex, tau: DecoratedTree, prep: PreparationMap,
                             z_prime: GridIndex | None = None):
        """Pi^R_z tau = Pi^{R,x}_z(R tau), Pi^{R,x}_z multiplicative with integration against Pi^R_z."""
        z = tuple(z)
        self.grid.check_index(z)
        key = (id(prep), z, tau.key)
        if key not in self._renormalised:
            field = np.zeros(self.grid.shape)
            for tree, c in prep.apply(tau).items():
                field = field + float(c) * self._renormalised_product(prep, z, tree)
            self._renormalised[key] = field
        return self._at(self._renormalised[key], z_prime)

    def eval_pi_renormalised_product(self, z: GridIndex, tau: DecoratedTree, prep: PreparationMap,
                                     z_prime: GridIndex | None = None):
        return self._at(self._renormalised_product(prep, tuple(z), tau), z_prime)

    def decay_unit(self) -> float:
        """Smallest scaled length one grid step resolves: min_i h_i^(1/s_i)."""
        return min(scaled_distance([h], [s]) for h, s in zip(self.grid.spacing, self.spec.scaling))

    def ball_radii(self, lam: float) -> list[int]:
        """Grid steps per axis spanned by the scaled ball |z' - z|_s <= lam."""
        return [int(np.floor(lam ** float(s) / h + 1e-9)) for h, s in zip(self.grid.spacing, self.spec.scaling)]

    def resolved_scales(self, z: GridIndex, scales: Sequence[int] = DEFAULT_SCALES) -> list[int]:
        """Scales n whose ball of radius n * decay_unit lies inside the grid around z."""
        unit = self.decay_unit()
        out = []
        for n in scales:
            radii = self.ball_radii(n * unit)
            if all(j - r >= 0 and j + r < size for j, r, size in zip(z, radii, self.grid.shape)):
                out.append(n)
        return out

    def decay_profile(self, z: GridIndex, tau: DecoratedTree, scales: Sequence[int] = DEFAULT_SCALES
                      ) -> list[tuple[float, float]]:
        """(lam, sup over |z' - z|_s <= lam of |Pi_z tau(z')|) for every resolved scale with a nonzero sup."""
        z = tuple(z)
        field = self.eval_pi_recentred(z, tau)
        unit = self.decay_unit()
        out = []
        for n in self.resolved_scales(z, scales):
            lam = n * unit
            box = tuple(slice(j - r, j + r + 1) for j, r in zip(z, self.ball_radii(lam)))
            sup = float(np.max(np.abs(field[box])))
            if sup > 1e-300:
                out.append((lam, sup))
        return out

    def estimate_decay_exponent(self, z: GridIndex, tau: DecoratedTree, scales: Sequence[int] = DEFAULT_SCALES
                                ) -> float:
        """Least-squares slope of log sup_{|z' - z|_s <= lam} |Pi_z tau(z')| against log lam.

        lam runs over n * decay_unit for the scales n whose ball fits in the grid.
        """
        profile = self.decay_profile(z, tau, scales)
        if len(profile) < 2:
            raise DegenerateSamples(f"Pi_z {tau.key} vanishes or is unsampled at the requested scales")
        xs, ys = np.log([p[0] for p in profile]), np.log([p[1] for p in profile])
        slope, _ = np.polyfit(xs, ys, 1)
        self.log.debug("Decay exponent estimated", tree=tau.key, slope=float(slope), scales=len(profile))
        return float(slope)

    def check_multiplicativity(self, pairs: Iterable[tuple[DecoratedTree, DecoratedTree]], z: GridIndex,
                               prep: PreparationMap | None = None, tolerance: float = 1e-9) -> CheckReport:
        """Pi, Pi_z (and Pi^{R,x}_z when prep is given) turn tree products into pointwise products."""
        report = CheckReport("model_multiplicativity", details={"z": list(z), "tolerance": tolerance})
        maps = {
            "pi": lambda t: self.eval_pi(t),
            "pi_z": lambda t: self.eval_pi_recentred(z, t),
        }
        if prep is not None:
            maps["pi_R_product"] = lambda t: self.eval_pi_renormalised_product(z, t, prep)
        for sigma, tau in pairs:
            try:
                joint = tree_product(sigma, tau)
            except NoiseClash:
                continue
            for name, evaluate in maps.items():
                lhs = evaluate(joint)
                rhs = evaluate(sigma) * evaluate(tau)
                gap = float(np.max(np.abs(lhs - rhs)))
                scale = max(1.0, float(np.max(np.abs(rhs))))
                report.record(gap <= tolerance * scale, map=name, sigma=sigma.key, tau=tau.key, gap=gap)
        return report

    def check_polynomial_exactness(self, z: GridIndex, max_weight: Fraction | int = 2,
                                   tolerance: float = 1e-12) -> CheckReport:
        """On X^k every evaluator is exact: x^k, (x - z)^k, and the binomial expansion through f_z."""
        z = tuple(z)
        center = self.grid.point(z)
        report = CheckReport("polynomial_exactness", details={"z": list(z), "tolerance": tolerance})
        for k in mi.up_to_weight(self.spec.dim, self.spec.scaling, Fraction(max_weight)):
            tau = monomial(k)
            expected = self._power(k, center)
            scale = max(1.0, float(np.max(np.abs(expected))))
            plain_gap = float(np.max(np.abs(self.eval_pi(tau) - self._power(k))))
            recentred_gap = float(np.max(np.abs(self.eval_pi_recentred(z, tau) - expected)))
            factorized_gap = float(np.max(np.abs(self.eval_factorized(z, tau) - expected)))
            for form, gap in (("pi", plain_gap), ("pi_z", recentred_gap), ("factorized", factorized_gap)):
                report.record(gap <= tolerance * scale, tree=tau.key, form=form, gap=gap)
        return report
