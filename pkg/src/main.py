"""
rs-bseries command line.

Every subcommand prints one result on stdout, as text or as sorted JSON;
logs go to stderr.
"""
import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from src.algebra.coproducts import delta1, delta2, delta_hat2, sufficient_cap
from src.algebra.grafting import deformed_graft, raise_decoration, star2
from src.algebra.renormalisation import M_hat_star, M_star, R_star, star1
from src.bseries.characters import (
    load_character,
    random_forest,
    random_minus,
    random_plus,
    sample,
    symbol_table,
    symbolic_like,
)
from src.bseries.composition import Sides, check_composition
from src.bseries.series import BSeriesMinus
from src.bseries.substitution import check_root_substitution, check_substitution
from src.classical import characters as classical_characters
from src.classical import coproducts as classical_coproducts
from src.classical import series as classical_series
from src.classical.trees import parse_plain, trees_up_to
from src.config.settings import ModelConfig, Settings, get_settings
from src.engine.verification_suite import GROUPS, VerificationSuite
from src.model import build_model, save_field
from src.models.equation_spec import EquationSpec, as_multi_index, load_spec, parse_rational
from src.trees.character import Character, CharacterMode
from src.trees.combination import LinearCombination
from src.trees.decorated import EdgeDecoration
from src.trees.degree import degree
from src.trees.enumeration import TreeEnumerator
from src.trees.grammar import parse_forest, parse_tree
from src.utils.errors import BSeriesError, TheoremMismatch
from src.utils.logger import get_logger, setup_logging

DEFAULT_SPEC = "phi4.yaml"


def _index(text: str) -> tuple[int, ...]:
    return as_multi_index(text.strip().strip("()").split(","))


def _edge(text: str, dim: int) -> EdgeDecoration:
    """`t` or `t,(m0,m1)`."""
    label, _, rest = text.partition(",")
    derivative = _index(rest) if rest.strip() else (0,) * dim
    if len(derivative) != dim:
        raise argparse.ArgumentTypeError(f"edge derivative {rest!r} needs {dim} entries")
    return EdgeDecoration(label.strip(), derivative)


class Runner:
    def __init__(self, args: argparse.Namespace, settings: Settings):
        self.args = args
        self.settings = settings
        self.spec: EquationSpec = load_spec(args.spec)
        self.log = get_logger("CLI")

    @property
    def gamma(self) -> Fraction:
        if self.settings.gamma is not None:
            return self.settings.gamma
        return self.spec.gamma if self.spec.gamma is not None else Fraction(0)

    def tree(self, text: str):
        return parse_tree(text, spec=self.spec)

    def cap_for(self, *trees) -> Fraction:
        if self.settings.cap is not None:
            return self.settings.cap
        return sufficient_cap(list(trees), self.spec.scaling)

    def emit(self, payload: dict[str, Any], text: str):
        if self.args.format == "json":
            print(json.dumps(payload, indent=2, sort_keys=True, default=str))
        else:
            print(text)

    def emit_combination(self, u: LinearCombination, **context):
        self.emit({**context, "terms": u.to_records()}, u.render())

    def enumerator(self) -> TreeEnumerator:
        return TreeEnumerator(self.spec, self.settings.max_trees)

    def cmd_enumerate(self):
        trees = self.enumerator().enumerate(self.gamma, self.args.space)
        records = [{"tree": t.key, "degree": str(degree(t, self.spec)), "symmetry": t.symmetry_factor} for t in trees]
        lines = [f"{r['degree']:>8}  {r['tree']}" for r in records]
        self.emit({"space": self.args.space, "gamma": str(self.gamma), "count": len(records), "trees": records},
                  "\n".join(lines) if lines else "(no trees)")

    def cmd_symmetry(self):
        tau = self.tree(self.args.tree)
        self.emit({"tree": tau.key, "symmetry": tau.symmetry_factor}, str(tau.symmetry_factor))

    def cmd_degree(self):
        tau = self.tree(self.args.tree)
        value = degree(tau, self.spec)
        self.emit({"tree": tau.key, "degree": str(value)}, str(value))

    def cmd_graft(self):
        a = _edge(self.args.edge, self.spec.dim)
        self.emit_combination(deformed_graft(self.tree(self.args.left), a, self.tree(self.args.right)),
                              edge=a.render())

    def cmd_raise(self):
        k = _index(self.args.k)
        self.emit_combination(raise_decoration(self.tree(self.args.tree), k), k=list(k))

    def cmd_star2(self):
        self.emit_combination(star2(self.tree(self.args.left), self.tree(self.args.right)))

    def cmd_star1(self):
        forest = parse_forest(self.args.forest, spec=self.spec)
        self.emit_combination(star1(forest, self.tree(self.args.tree)), forest=forest.key)

    def cmd_delta2(self):
        tau = self.tree(self.args.tree)
        cap = self.cap_for(tau)
        split = delta_hat2 if self.args.hat else delta2
        self.emit_combination(split(tau, cap, self.spec.scaling), cap=str(cap))

    def cmd_delta1(self):
        tau = self.tree(self.args.tree)
        cap = self.cap_for(tau)
        self.emit_combination(delta1(tau, cap, self.spec.scaling), cap=str(cap))

    def cmd_mstar(self):
        beta = load_character(self.args.beta, self.spec, CharacterMode.FOREST)
        maps = {"m": M_star, "hat": M_hat_star, "root": R_star}
        self.emit_combination(maps[self.args.map](beta, self.tree(self.args.tree)), map=self.args.map)

    def _bseries_characters(self) -> dict[str, Character]:
        """Characters from --minus/--plus/--beta files; missing ones are drawn from the seeded generator."""
        args = self.args
        rng = random.Random(f"{self.settings.seed}:bseries")
        enumerator = self.enumerator()
        trees = enumerator.enumerate(self.gamma, "T")
        out: dict[str, Character] = {}
        if args.minus:
            out["minus"] = load_character(args.minus, self.spec)
        else:
            out["minus"] = random_minus(rng, sample(rng, trees, 6))
        if args.action == "compose":
            if args.plus:
                out["plus"] = load_character(args.plus, self.spec, CharacterMode.TREE_PRODUCT)
            else:
                lowest = min((degree(t, self.spec) for t in trees), default=Fraction(0))
                planted = enumerator.planted_generators(self.gamma - min(lowest, Fraction(0)))
                out["plus"] = random_plus(rng, self.spec, planted)
        elif args.beta:
            out["beta"] = load_character(args.beta, self.spec, CharacterMode.FOREST)
        else:
            negative = [t for t in trees if degree(t, self.spec) < 0]
            out["beta"] = random_forest(rng, sample(rng, negative, 3))
        return out

    def cmd_bseries(self):
        args = self.args
        characters = self._bseries_characters()
        symbols: dict[str, str] = {}
        if args.symbolic:
            for name, prefix in (("minus", "a"), ("plus", "c"), ("beta", "b")):
                if name in characters:
                    characters[name] = symbolic_like(characters[name], prefix)
                    symbols.update(symbol_table(characters[name]))
        series = BSeriesMinus(characters["minus"], self.spec)
        sides: Sides = {}
        if args.action == "compose":
            result, report = check_composition(series, characters["plus"], self.gamma, sides=sides)
        elif args.action == "substitute":
            result, report = check_substitution(series, characters["beta"], sides=sides)
        else:
            result, report = check_root_substitution(series, characters["beta"], sides=sides)
        payload = {"action": args.action, "seed": self.settings.seed, "gamma": str(self.gamma),
                   **result.to_dict(), "sides": sides, "passed": report.passed, "check": report.to_dict()}
        if symbols:
            payload["symbols"] = symbols
        lines = [f"{t}: {e.render()}" for t, e in sorted(result.eval_all().items())]
        lines.append(f"{report.identity}: {'ok' if report.passed else 'FAILED'} ({report.checked} comparisons)")
        self.emit(payload, "\n".join(lines))
        if not report.passed:
            self.log.error("Identity failed", identity=report.identity, mismatches=len(report.mismatches))
        return 0 if report.passed else 1

    def cmd_classical(self):
        args = self.args
        order = args.order
        if args.action == "trees":
            trees = trees_up_to(order)
            records = [{"tree": t.key, "order": t.order, "symmetry": t.symmetry_factor, "density": t.density}
                       for t in trees]
            self.emit({"trees": records}, "\n".join(f"{t.order}  {t.key}" for t in trees))
            return
        if args.action in ("density", "gamma"):
            tree = parse_plain(args.tree)
            self.emit({"tree": tree.key, "density": tree.density, "symmetry": tree.symmetry_factor},
                      str(tree.density))
            return
        if args.action in ("bck", "ec"):
            tree = parse_plain(args.tree)
            split = classical_coproducts.bck_coproduct if args.action == "bck" else classical_coproducts.ec_coproduct
            terms = [{"left": left.key, "right": right.key, "coefficient": str(c)}
                     for (left, right), c in sorted(split(tree).items(), key=lambda kv: (kv[0][0].key, kv[0][1].key))]
            self.emit({"tree": tree.key, "coproduct": args.action, "terms": terms},
                      "\n".join(f"{t['coefficient']} ({t['left']}) (x) ({t['right']})" for t in terms))
            return
        if args.action.startswith("verify-"):
            rng = random.Random(f"{self.settings.seed}:classical")
            alpha = classical_characters.random_character(rng, order)
            beta = classical_characters.random_character(rng, order)
            if args.action == "verify-composition":
                report = classical_series.verify_classical_composition(
                    alpha, beta, classical_series.parse_field(args.field), order)
            elif args.action == "verify-substitution":
                inner = classical_characters.random_character(rng, order, empty=0)
                report = classical_series.verify_classical_substitution(
                    beta, inner, classical_series.parse_field(args.field), order)
            else:
                inner = classical_characters.random_character(rng, order, empty=0)
                report = classical_series.verify_classical_cointeraction(inner, alpha, beta, order)
            self.emit({"seed": self.settings.seed, "check": report.to_dict(), "passed": report.passed},
                      f"{report.identity}: {'ok' if report.passed else 'FAILED'} ({report.checked} comparisons)")
            return 0 if report.passed else 1
        if args.action == "flow":
            field = classical_series.parse_field(args.field)
            report = classical_series.verify_exact_flow(field, order)
            value = classical_series.exact_flow(field, order)
            self.emit({"series": str(value), "check": report.to_dict()}, str(value))
            return 0 if report.passed else 1
        flow = classical_characters.exact_flow_character(order)
        if args.action == "inverse":
            result = classical_characters.bck_inverse(flow, order)
        elif args.action == "modified":
            result = classical_characters.modified_field_character(flow, order)
        else:
            result = classical_characters.convolve(flow, flow, classical_characters.Coproduct.BCK, order)
        records = result.to_records()
        self.emit(records, "\n".join(f"{k}: {v}" for k, v in records["values"].items()))

    def model_config(self) -> ModelConfig:
        overrides = {}
        if self.args.points is not None:
            overrides["points"] = self.args.points
        if self.args.spacing is not None:
            overrides["spacing"] = self.args.spacing
        return ModelConfig.for_dimension(self.spec.dim, **overrides)

    def cmd_model(self):
        args = self.args
        evaluator = build_model(self.spec, self.model_config(), self.settings.seed)
        tau = self.tree(args.tree)
        z = _index(args.z) if args.z else evaluator.grid.center()
        if args.action == "fz-check":
            outcome = evaluator.eval_f_z_factorization(z, tau)
            self.emit(outcome, f"discrepancy {outcome['discrepancy']:.3e} ({'ok' if outcome['passed'] else 'FAILED'})")
            return 0 if outcome["passed"] else 1
        if args.action == "decay":
            slope = evaluator.estimate_decay_exponent(z, tau)
            expected = degree(tau, self.spec)
            self.emit({"tree": tau.key, "z": list(z), "slope": round(slope, 6), "degree": str(expected)},
                      f"slope {slope:.4f} (degree {expected})")
            return
        field = evaluator.eval_pi(tau) if args.action == "pi" else evaluator.eval_pi_recentred(z, tau)
        payload = {"tree": tau.key, "z": list(z), "shape": list(field.shape),
                   "value_at_z": float(field[tuple(z)]), "max_abs": float(abs(field).max())}
        if args.output:
            save_field(args.output, field, evaluator.grid)
            payload["output"] = args.output
        self.emit(payload, f"{payload['value_at_z']:.6e} at z={list(z)}")

    def cmd_verify(self):
        args = self.args
        names = args.groups or ["all"]
        suite = VerificationSuite(self.spec, self.gamma, self.settings.seed, full=args.full,
                                  max_trees=self.settings.max_trees, timings=args.timings)
        reporter = suite.run(names)
        report_dir = Path(args.report_dir) if args.report_dir else self.settings.report_dir
        stem = f"verify_{self.spec.name}_{'-'.join(names)}_seed{self.settings.seed}"
        reporter.generate_json_report(report_dir / f"{stem}.json")
        if args.html:
            reporter.generate_html_report(report_dir / f"{stem}.html")
        checks = reporter.checks()
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['group']:<11} {c['identity']:<24} {c['checked']}"
                 for c in checks]
        self.emit(reporter.to_dict(), "\n".join(lines))
        return 0 if reporter.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rs-bseries", description="B-series for regularity structures")
    parser.add_argument("--spec", default=DEFAULT_SPEC, help="Spec file, or the name of a bundled spec")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--gamma", type=parse_rational, help="Degree cutoff (default: RSB_GAMMA, then the spec, then 0)")
    parser.add_argument("--cap", type=parse_rational, help="Polynomial cap of the coproducts")
    parser.add_argument("--seed", type=int, help="Seed of every random draw")
    parser.add_argument("--max-trees", type=int, help="Enumeration bound")
    parser.add_argument("--debug", action="store_true", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="Trees up to the degree cutoff")
    p.add_argument("--space", choices=["T", "T+"], default="T")

    for name in ("symmetry", "degree"):
        sub.add_parser(name).add_argument("tree")

    p = sub.add_parser("graft", help="Deformed grafting left ^a right")
    p.add_argument("--left", required=True)
    p.add_argument("--edge", required=True, help="Edge type, e.g. t or t,(0,1)")
    p.add_argument("--right", required=True)

    p = sub.add_parser("raise", help="Raise node decorations by k")
    p.add_argument("tree")
    p.add_argument("--k", required=True, help="Multi-index, e.g. (1,0)")

    p = sub.add_parser("star2")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = sub.add_parser("star1")
    p.add_argument("--forest", required=True, help="{t1, t2} or a single tree")
    p.add_argument("--tree", required=True)

    p = sub.add_parser("delta2")
    p.add_argument("tree")
    p.add_argument("--hat", action="store_true", help="Add tau (x) 1 on a noisy root")

    sub.add_parser("delta1").add_argument("tree")

    p = sub.add_parser("mstar", help="Adjoint renormalisation maps of a forest character")
    p.add_argument("tree")
    p.add_argument("--beta", required=True, help="YAML or JSON character file")
    p.add_argument("--map", choices=["m", "hat", "root"], default="m")

    p = sub.add_parser("bseries")
    p.add_argument("action", choices=["compose", "substitute", "root-substitute"])
    p.add_argument("--minus", help="Character file of the B_- series (default: seeded random)")
    p.add_argument("--plus", help="Tree-product character file of the B_+ series (compose; default: seeded random)")
    p.add_argument("--beta", help="Forest character file (substitute, root-substitute; default: seeded random)")
    p.add_argument("--symbolic", action="store_true", help="Replace the given values by symbols")

    p = sub.add_parser("classical", help="Scalar Butcher series")
    p.add_argument("action", choices=["trees", "gamma", "density", "bck", "ec", "flow", "inverse", "modified", "double-step",
                                       "verify-composition", "verify-substitution", "verify-cointeraction"])
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--field", default="y**2")
    p.add_argument("--tree", default=".")

    p = sub.add_parser("model", help="Numerical model on a grid")
    p.add_argument("action", choices=["pi", "piz", "fz-check", "decay"])
    p.add_argument("--tree", required=True)
    p.add_argument("--z", help="Grid index of the base point (default: grid centre)")
    p.add_argument("--points", type=int)
    p.add_argument("--spacing", type=float)
    p.add_argument("--output", help="CSV file for the evaluated field")

    p = sub.add_parser("verify", help="Run the identity checks")
    p.add_argument("groups", nargs="*", metavar="group", help=f"all, or any of {', '.join(GROUPS)}")
    p.add_argument("--report-dir", help="Write the JSON report there")
    p.add_argument("--html", action="store_true")
    p.add_argument("--full", action="store_true", help="Acceptance-size sweeps")
    p.add_argument("--timings", action="store_true")
    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace):
    if args.command == "verify":
        unknown = [g for g in args.groups if g != "all" and g not in GROUPS]
        if unknown:
            parser.error(f"unknown verification group(s): {', '.join(unknown)}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    settings = get_settings().with_overrides(seed=args.seed, debug=args.debug, gamma=args.gamma, cap=args.cap,
                                             max_trees=args.max_trees)
    setup_logging(settings.debug, colors=False)
    log = get_logger("CLI")
    try:
        runner = Runner(args, settings)
        status = getattr(runner, "cmd_" + args.command.replace("-", "_"))()
    except TheoremMismatch as e:
        print(json.dumps({"identity": e.identity, "counterexample": e.counterexample}, indent=2, sort_keys=True,
                         default=str))
        log.error("Identity failed", identity=e.identity)
        return 1
    except BSeriesError as e:
        print(f"error: {e}", file=sys.stderr)
        log.debug("Command failed", error=type(e).__name__)
        return 1
    except (ValueError, argparse.ArgumentTypeError) as e:
        parser.error(str(e))
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
