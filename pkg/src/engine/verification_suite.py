"""
Runs the identity checks of every module on seeded random instances and
collects them into one report.
"""
import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Sequence

from src.algebra.identities import (
    check_degree_additivity,
    check_delta2_multiplicativity,
    check_duality,
    check_multi_pre_lie,
    check_noise_product,
    check_non_commutation,
    check_root_extraction,
    check_star2_associativity,
)
from src.algebra.coproducts import sufficient_cap
from src.algebra.renormalisation import (
    PreparationMap,
    check_adjoint,
    check_right_morphism,
    verify_cointeraction_decorated,
)
from src.bseries.characters import random_forest, random_minus, random_plus, sample
from src.bseries.composition import CoherentCharacter, check_composition, verify_coherence
from src.bseries.series import BSeriesMinus
from src.bseries.substitution import check_root_composition, check_root_substitution, check_substitution
from src.classical.characters import random_character, random_rational
from src.classical.trees import PlainTree, trees_up_to
from src.classical.series import (
    Y,
    parse_field,
    verify_classical_cointeraction,
    verify_classical_composition,
    verify_classical_substitution,
    verify_exact_flow,
)
from src.config.settings import ModelConfig
from src.engine.report_generator import VerificationReportGenerator
from src.model import build_model
from src.model.evaluator import DEFAULT_SCALES
from src.models.equation_spec import EquationSpec
from src.models.report import CheckReport
from src.symbolic.elementary import verify_star_morphism
from src.trees.decorated import noise_tree
from src.trees.degree import degree
from src.trees.enumeration import TreeEnumerator
from src.trees.sampling import random_edge, random_tree
from src.utils.errors import DegenerateSamples, StencilExceeded
from src.utils.logger import get_logger

GROUPS = ("classical", "grafting", "coalgebra", "cointeraction", "elementary", "bseries", "model")
DECAY_TOLERANCE = 0.2
DECAY_BUDGET = Fraction(2)


class VerificationSuite:
    def __init__(self, spec: EquationSpec, gamma: Fraction | int | str = 0, seed: int = 42,
                 full: bool = False, max_trees: int | None = None, timings: bool = False,
                 model_config: ModelConfig | None = None):
        self.spec = spec
        self.gamma = Fraction(gamma)
        self.seed = seed
        self.full = full
        self.enumerator = TreeEnumerator(spec, max_trees)
        self.model_config = model_config
        self.reporter = VerificationReportGenerator(timings=timings)
        self.log = get_logger("VerificationSuite")
        self._trees = None
        self._planted = None
        self._positive = None
        self._negative = None

    def _rng(self, group: str) -> random.Random:
        return random.Random(f"{self.seed}:{group}")

    def _size(self, desk: int, full: int) -> int:
        return full if self.full else desk

    @property
    def trees(self):
        if self._trees is None:
            self._trees = self.enumerator.enumerate(self.gamma, "T")
        return self._trees

    @property
    def plus_gamma(self) -> Fraction:
        """Budget the B_+ side needs so that every tree up to gamma sees all its increments."""
        lowest = min((degree(t, self.spec) for t in self.trees), default=Fraction(0))
        return self.gamma - min(lowest, Fraction(0))

    @property
    def planted(self):
        if self._planted is None:
            self._planted = self.enumerator.planted_generators(self.plus_gamma)
        return self._planted

    @property
    def negative(self):
        """Trees of negative degree, the support of the counterterm characters."""
        if self._negative is None:
            self._negative = [t for t in self.trees if degree(t, self.spec) < 0]
        return self._negative

    @property
    def positive(self):
        if self._positive is None:
            self._positive = self.enumerator.enumerate(self.plus_gamma, "T+")
        return self._positive

    def run(self, names: Sequence[str] = ("all",)) -> VerificationReportGenerator:
        selected = list(GROUPS) if "all" in names else [n for n in GROUPS if n in names]
        unknown = [n for n in names if n != "all" and n not in GROUPS]
        if unknown:
            raise ValueError(f"unknown verification groups: {unknown}")
        self.reporter.start_suite("verify", {"spec": self.spec.name, "gamma": str(self.gamma),
                                             "seed": self.seed, "full": self.full})
        self.log.info("Verification started", groups=selected, gamma=str(self.gamma), seed=self.seed)
        runners: dict[str, Callable[[], None]] = {
            "classical": self._classical,
            "grafting": self._grafting,
            "coalgebra": self._coalgebra,
            "cointeraction": self._cointeraction,
            "elementary": self._elementary,
            "bseries": self._bseries,
            "model": self._model,
        }
        for name in selected:
            self.reporter.start_check(name)
            runners[name]()
        self.reporter.end_suite()
        self.log.info("Verification finished", passed=self.reporter.passed)
        return self.reporter

    def _record(self, group: str, report: CheckReport):
        self.reporter.log_check(group, report)
        self.log.debug("Identity checked", group=group, identity=report.identity, checked=report.checked,
                       passed=report.passed)

    def _classical(self):
        rng = self._rng("classical")
        order = self._size(4, 5)
        density = CheckReport("classical_density")
        for tree in trees_up_to(6):
            orderings = _increasing_labellings(tree)
            density.record(orderings * tree.density == math.factorial(tree.order), tree=tree.key,
                           density=tree.density, orderings=orderings)
        self._record("classical", density)
        for text in ("y", "y**2"):
            self._record("classical", verify_exact_flow(parse_field(text), order))
        field = Y ** 2 + 1
        for _ in range(self._size(3, 20)):
            alpha, beta = random_character(rng, order), random_character(rng, order)
            self._record("classical", verify_classical_composition(alpha, beta, field, order))
            inner = random_character(rng, order, empty=0)
            self._record("classical", verify_classical_substitution(beta, inner, field, order))

    def _grafting(self):
        rng = self._rng("grafting")
        dim = 2
        count = self._size(20, 200)
        max_edges = self._size(2, 4)
        labels = ("t",)
        options = {"kernel_labels": labels, "noise_labels": ("0", "l")}
        pre_lie = CheckReport("multi_pre_lie", details={"instances": count})
        for _ in range(count):
            triple = tuple(random_tree(rng, dim, max_edges, **options) for _ in range(3))
            a, b = random_edge(rng, dim, labels), random_edge(rng, dim, labels)
            pre_lie.merge(_with_context(check_multi_pre_lie([triple], a, b), a=a.render(), b=b.render()))
        self._record("grafting", pre_lie)
        non_commutation = CheckReport("non_commutation", details={"instances": count})
        for _ in range(count):
            pair = tuple(random_tree(rng, dim, max_edges, **options) for _ in range(2))
            a, axis = random_edge(rng, dim, labels), rng.randrange(dim)
            non_commutation.merge(_with_context(check_non_commutation([pair], a, axis), a=a.render(), axis=axis))
        self._record("grafting", non_commutation)
        positive = sample(rng, self.positive, self._size(8, 40))
        associative = [tuple(rng.choice(positive) for _ in range(3)) for _ in range(self._size(20, 100))]
        self._record("grafting", check_star2_associativity(associative))
        trees = sample(rng, self.trees, self._size(8, 40))
        self._record("grafting", check_degree_additivity(positive, trees, self.spec))
        noises = [noise_tree(l, self.spec.dim) for l in sorted(self.spec.noise_labels) if l != "0"]
        self._record("grafting", check_noise_product(positive, noises))

    def _coalgebra(self):
        rng = self._rng("coalgebra")
        scaling = self.spec.scaling
        positive = sample(rng, self.positive, self._size(6, 30))
        trees = sample(rng, self.trees, self._size(8, 40))
        cap = sufficient_cap(positive + trees, scaling)
        self._record("coalgebra", check_duality(positive, trees, cap, scaling))
        pairs = [(rng.choice(positive), rng.choice(trees)) for _ in range(self._size(10, 50))]
        self._record("coalgebra", check_delta2_multiplicativity(pairs, cap, scaling))
        self._record("coalgebra", check_root_extraction(trees, cap, scaling))
        for _ in range(self._size(2, 10)):
            beta = random_forest(rng, sample(rng, self.negative, 3))
            self._record("coalgebra", check_adjoint(beta, sample(rng, trees, 6), scaling))

    def _cointeraction(self):
        rng = self._rng("cointeraction")
        order = self._size(4, 5)
        beta = random_character(rng, order, empty=0)
        a1, a2 = random_character(rng, order), random_character(rng, order)
        self._record("cointeraction", verify_classical_cointeraction(beta, a1, a2, order))
        scaling = self.spec.scaling
        positive = sample(rng, self.positive, self._size(6, 30))
        trees = sample(rng, self.trees, self._size(8, 40))
        for _ in range(self._size(2, 10)):
            beta = random_forest(rng, sample(rng, self.negative, 3))
            self._record("cointeraction", check_right_morphism(PreparationMap(beta, scaling), positive, trees))
            alpha1 = random_plus(rng, self.spec, self.planted)
            alpha2 = random_minus(rng, trees)
            self._record("cointeraction", verify_cointeraction_decorated(beta, positive, trees, alpha1, alpha2))

    def _elementary(self):
        rng = self._rng("elementary")
        positive = sample(rng, self.positive, self._size(6, 40))
        trees = sample(rng, self.trees, self._size(8, 40))
        self._record("elementary", verify_star_morphism(self.spec, positive, trees))

    def _bseries(self):
        rng = self._rng("bseries")
        for _ in range(self._size(2, 20)):
            support = sample(rng, self.trees, self._size(6, 40))
            minus = BSeriesMinus(random_minus(rng, support), self.spec)
            plus = random_plus(rng, self.spec, self.planted)
            _, report = check_composition(minus, plus, self.gamma)
            self._record("bseries", report)
            beta = random_forest(rng, sample(rng, self.negative, 3))
            _, report = check_substitution(minus, beta, with_delta1=True)
            self._record("bseries", report)
            _, report = check_root_substitution(minus, beta)
            self._record("bseries", report)
            self._record("bseries", check_root_composition(plus, beta, self.gamma, self.spec))
        for target in sorted(self.spec.kernel_labels):
            alpha = CoherentCharacter(
                {l: random_rational(rng) for l in sorted(self.spec.noise_labels) if l != "0"},
                [random_rational(rng) for _ in range(self.spec.dim)],
            )
            self._record("bseries", verify_coherence(alpha, target, self.gamma, self.spec, self.planted))

    def _model(self):
        rng = self._rng("model")
        config = self.model_config or ModelConfig.for_dimension(self.spec.dim, full=self.full)
        evaluator = build_model(self.spec, config, self.seed)
        z = evaluator.grid.center()
        self._record("model", evaluator.check_polynomial_exactness(z))
        small = [t for t in self.trees if t.edge_count - t.noise_count <= 2 and not t.is_unit]
        chosen = sample(rng, small, self._size(4, 12))
        factorization = CheckReport("model_factorization", details={"z": list(z)})
        try:
            for tau in chosen:
                outcome = evaluator.eval_f_z_factorization(z, tau)
                factorization.record(outcome["passed"], **outcome)
            self._record("model", factorization)
            pairs = [(rng.choice(chosen), rng.choice(chosen)) for _ in range(self._size(4, 12))] if chosen else []
            self._record("model", evaluator.check_multiplicativity(pairs, z))
        except StencilExceeded as e:
            self.reporter.log_skip("model", str(e))
        self._decay(evaluator, z)

    def _decay(self, evaluator, z):
        resolved = evaluator.resolved_scales(z)
        if len(resolved) < len(DEFAULT_SCALES):
            self.reporter.log_skip("model", f"grid resolves {len(resolved)} of {len(DEFAULT_SCALES)} decay scales")
            return
        for tau in self.enumerator.planted_generators(DECAY_BUDGET):
            try:
                slope = evaluator.estimate_decay_exponent(z, tau)
            except (DegenerateSamples, StencilExceeded) as e:
                self.log.debug("Decay tree passed over", tree=tau.key, reason=str(e))
                continue
            deg = degree(tau, self.spec)
            report = CheckReport("model_decay", details={"tree": tau.key, "degree": str(deg),
                                                         "tolerance": DECAY_TOLERANCE})
            report.record(slope >= float(deg) - DECAY_TOLERANCE, tree=tau.key, slope=round(slope, 6),
                          scales=resolved)
            self._record("model", report)
            return
        self.reporter.log_skip("model", f"no planted tree of degree <= {DECAY_BUDGET} could be measured")


def _with_context(report: CheckReport, **context) -> CheckReport:
    for witness in report.mismatches:
        witness.update(context)
    return report


def _increasing_labellings(tree: PlainTree) -> int:
    """Labellings of the nodes by 1..n increasing away from the root; there are n!/gamma of them."""
    parents: list[int] = []

    def visit(node: PlainTree, parent: int):
        index = len(parents)
        parents.append(parent)
        for child in node.children:
            visit(child, index)

    visit(tree, -1)
    return sum(
        all(p < 0 or labels[p] < labels[i] for i, p in enumerate(parents))
        for labels in itertools.permutations(range(len(parents)))
    )
