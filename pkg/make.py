#!/usr/bin/env python3
"""
Developer tasks for the de Branges Spectral Laboratory.

Platform-independent counterpart of dev.sh:

    python make.py test          # full test suite, slow checks included
    python make.py test-fast     # -m "not slow"
    python make.py verify-all    # `main.py verify` on every shipped experiment
    python make.py run-example   # spectrum + verify for the free Dirichlet operator
    python make.py clean | lint | install
"""

import sys
import shutil
import subprocess
import argparse
from pathlib import Path

BASE_DIR = Path(__file__).parent.absolute()
EXPERIMENTS_DIR = BASE_DIR / "config" / "experiments"
OUTPUT_DIR = BASE_DIR / "output"
LOGS_DIR = BASE_DIR / "logs"
TESTS_DIR = BASE_DIR / "tests"
SOURCES = [BASE_DIR / "debranges_lab", BASE_DIR / "main.py", TESTS_DIR]

# Experiments that describe a pair of operators only make sense for `uniqueness`
PAIR_EXPERIMENTS = {"shifted_pair", "bessel_l0_vs_l1", "self_pair"}

RED, GREEN, YELLOW, BLUE, NC = "\033[0;31m", "\033[0;32m", "\033[0;33m", "\033[0;34m", "\033[0m"


def say(color: str, text: str) -> None:
    print(f"{color}{text}{NC}")


def run(*cmd) -> int:
    return subprocess.run([str(part) for part in cmd], cwd=BASE_DIR).returncode


def dblab(command: str, experiment: Path, *extra) -> int:
    out = OUTPUT_DIR / experiment.stem
    return run(sys.executable, "main.py", command, "--config", experiment, "--out", out, *extra)


def task_test(args) -> int:
    say(BLUE, "Running all tests (slow checks included)...")
    return run(sys.executable, "-m", "pytest", TESTS_DIR, "-v")


def task_test_fast(args) -> int:
    say(BLUE, "Running fast tests...")
    return run(sys.executable, "-m", "pytest", TESTS_DIR, "-v", "-m", "not slow")


def task_run_example(args) -> int:
    experiment = EXPERIMENTS_DIR / "free_dirichlet.json"
    for command, extra in (("spectrum", ("--lambda-max", "25")), ("verify", ("--verbose",))):
        code = dblab(command, experiment, *extra)
        if code != 0:
            say(RED, f"`{command}` exited with {code}; see {LOGS_DIR / 'dblab.log'}")
            return code
    say(GREEN, f"Free Dirichlet example written to {OUTPUT_DIR / 'free_dirichlet'}")
    return 0


def task_verify_all(args) -> int:
    """Exit code is the worst one seen; a corrupted measure is expected to fail."""
    worst = 0
    for experiment in sorted(EXPERIMENTS_DIR.glob("*.json")):
        if experiment.stem == "corrupted_free_measure":
            continue
        command = "uniqueness" if experiment.stem in PAIR_EXPERIMENTS else "verify"
        say(BLUE, f"{command} {experiment.name}")
        code = dblab(command, experiment)
        say(GREEN if code == 0 else YELLOW, f"  exit code {code}")
        worst = max(worst, code)
    return worst


def task_clean(args) -> int:
    say(BLUE, "Removing outputs, logs and caches...")
    shutil.rmtree(OUTPUT_DIR, ignore_errors=True)
    for log_file in LOGS_DIR.glob("*.log*"):
        log_file.unlink()
    for cache in [*BASE_DIR.glob("**/__pycache__"), *BASE_DIR.glob("**/.pytest_cache")]:
        if "examples" not in cache.parts:
            shutil.rmtree(cache, ignore_errors=True)
    return 0


def task_lint(args) -> int:
    code = run(sys.executable, "-m", "flake8", *SOURCES, "--max-line-length=120")
    say(GREEN if code == 0 else RED, "Linting passed" if code == 0 else "Linting failed")
    return code


def task_install(args) -> int:
    say(BLUE, "Installing the package with development extras...")
    return run(sys.executable, "-m", "pip", "install", "-e", ".[dev]")


TASKS = {
    "test": (task_test, "Run all tests"),
    "test-fast": (task_test_fast, "Run tests not marked slow"),
    "run-example": (task_run_example, "Spectrum and verification for the free Dirichlet operator"),
    "verify-all": (task_verify_all, "Run every shipped experiment through the CLI"),
    "clean": (task_clean, "Remove outputs, logs and caches"),
    "lint": (task_lint, "Run flake8"),
    "install": (task_install, "pip install -e .[dev]"),
}


def main() -> int:
    parser = argparse.ArgumentParser(description="de Branges Spectral Laboratory developer tasks")
    subparsers = parser.add_subparsers(dest="command")
    for name, (func, help_text) in TASKS.items():
        subparsers.add_parser(name, help=help_text).set_defaults(func=func)

    args = parser.parse_args()
    if not args.command:
        parser.print_help()
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
