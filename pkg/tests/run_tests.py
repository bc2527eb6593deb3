#!/usr/bin/env python3
"""
Test runner for the tree algebra, B-series and model tests.

Usage:
    # Quick suite
    python tests/run_tests.py

    # Include the acceptance-size sweeps
    python tests/run_tests.py --full

    # One module's tests
    python tests/run_tests.py --module coalgebra

    # Filter by name
    python tests/run_tests.py -k "duality"
"""
import argparse
import subprocess
import sys
from pathlib import Path


MODULES = [
    "tree_core",
    "grafting",
    "coalgebra",
    "elementary",
    "bseries",
    "classical",
    "model",
    "settings",
    "report",
    "cli",
]


def main():
    parser = argparse.ArgumentParser(description="Run the rs-bseries tests")
    parser.add_argument(
        "--full",
        action="store_true",
        help="Run the slow acceptance sweeps as well",
    )
    parser.add_argument(
        "--module",
        choices=MODULES + ["all"],
        default="all",
        help="Which test module to run",
    )
    parser.add_argument(
        "-k",
        "--filter",
        type=str,
        help="pytest -k filter expression",
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Verbose output",
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Hypothesis seed, for replaying a failure",
    )

    args = parser.parse_args()

    tests_dir = Path(__file__).parent
    target = tests_dir if args.module == "all" else tests_dir / f"test_{args.module}.py"
    cmd = [sys.executable, "-m", "pytest", str(target)]

    if args.full:
        cmd.append("--full")

    if args.verbose:
        cmd.append("-v")

    if args.filter:
        cmd.extend(["-k", args.filter])

    if args.seed is not None:
        cmd.append(f"--hypothesis-seed={args.seed}")

    cmd.append("--tb=short")

    print(f"Running: {' '.join(cmd)}")
    print("-" * 60)

    result = subprocess.run(cmd)
    sys.exit(result.returncode)


if __name__ == "__main__":
    main()
