#!/usr/bin/env python3
"""
de Branges Spectral Laboratory - Main Runner Script

Command-line interface for computing spectral measures, reproducing kernels
and generalized Fourier transforms of one-dimensional Schrodinger operators,
running the invariant verification suites and the uniqueness experiments.

Usage:
    python main.py spectrum --config config/experiments/free_dirichlet.json --lambda-max 25
    python main.py kernel --config config/experiments/bessel_l1.json --grid points
    python main.py transform --config config/experiments/free_dirichlet.json --probe parabola
    python main.py verify --config config/experiments/free_dirichlet.json
    python main.py uniqueness --config config/experiments/shifted_pair.json
    python main.py uniqueness --config config/experiments/free_dirichlet.json --kappa 1=2
    python main.py asymptotics --config config/experiments/bessel_l1.json

Exit codes: 0 pass, 1 verification failure, 2 configuration error, 3 numerical failure.
"""

import argparse
import math
import os
import sys
import time
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from debranges_lab.config_utils import get_config_value, load_config_or_fallback, validate_config
from debranges_lab.debranges_space import DeBrangesSpaceHandle, e_samples_table, kernel_table
from debranges_lab.entire_solution import check_asymptotics, check_bessel_bc
from debranges_lab.errors import ConfigError, PotentialError, SpectralLabError
from debranges_lab.experiment_config import ExperimentConfig, apply_overrides, build_operators, load_experiment
from debranges_lab.io_utils import read_measure, write_frame, write_json, write_measure_csv, write_measure_json
from debranges_lab.logging_utils import log_exception, log_result, log_system_info, setup_logger
from debranges_lab.operator_core import PotentialKind
from debranges_lab.spectral_measure import (
    GridFunction,
    bump_probe,
    compute_measure,
    density_profile,
    inverse_transform,
    parseval_check,
    transform,
)
from debranges_lab.uniqueness_lab import (
    bessel_uniqueness_experiment,
    counterexample_forward,
    uniqueness_experiment,
)
from debranges_lab.verification_suite import VerificationSuite

EXIT_PASS = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


def _error(exception: Exception) -> Dict[str, Any]:
    code = EXIT_CONFIG_ERROR if isinstance(exception, (ConfigError, PotentialError)) else EXIT_NUMERICAL_FAILURE
    return {"status": "error", "message": str(exception), "error_type": type(exception).__name__, "exit_code": code}


def parse_kappa(items: Optional[List[str]]) -> Dict[int, float]:
    """'1=2' '3=0.5' -> {1: 2.0, 3: 0.5}."""
    kappa: Dict[int, float] = {}
    for item in items or []:
        try:
            index, value = item.split("=", 1)
            kappa[int(index)] = float(value)
        except ValueError:
            raise ConfigError(f"--kappa entries must look like N=VALUE, got {item!r}")
    return kappa


class SpectralLabSystem:
    """Main orchestration class for the de Branges Spectral Laboratory"""

    def __init__(self, settings_path: Optional[str] = None, verbose: bool = False):
        """Load and validate the system settings and set up logging

        Args:
            settings_path: Optional path to a settings YAML file
            verbose: Whether to enable verbose logging

        Raises:
            ConfigError: If the settings file is invalid
        """
        self.verbose = verbose
        self.settings = load_config_or_fallback(settings_path)
        validate_config(self.settings)
        self.logger = setup_logger("DBLAB", self.settings, verbose)
        self.numerics = get_config_value(self.settings, "numerics", {})
        self.logger.info("Initializing de Branges Spectral Laboratory")
        if verbose:
            log_system_info(self.logger)

    def load(self, config_path: str, tol: Optional[float] = None, lambda_max: Optional[float] = None,
             out: Optional[str] = None, seed: Optional[int] = None) -> ExperimentConfig:
        experiment = load_experiment(config_path)
        return apply_overrides(experiment, tol=tol, lambda_max=lambda_max, out=out, seed=seed)

    def _output(self, experiment: ExperimentConfig, suffix: str) -> str:
        return os.path.join(experiment.output_dir, f"{experiment.name}_{suffix}")

    def compute_spectrum(self, experiment: ExperimentConfig) -> Dict[str, Any]:
        """Spectral measure of the first operator, written as JSON and CSV

        Args:
            experiment: Validated experiment configuration

        Returns:
            Dictionary with the measure and the output files
        """
        self.logger.info(f"Computing spectral measure for {experiment.name} up to {experiment.lambda_max}")
        start_time = time.time()
        try:
            sol = build_operators(experiment, self.numerics)[0]
            measure = compute_measure(sol, experiment.lambda_max, experiment.primary.right_angle)
            json_file = write_measure_json(self._output(experiment, "spectrum.json"), measure)
            csv_file = write_measure_csv(self._output(experiment, "spectrum.csv"), measure)
            self.logger.info(f"Found {len(measure)} atoms in {time.time() - start_time:.2f} seconds")
            return {"status": "success", "measure": measure, "output_files": [json_file, csv_file]}
        except Exception as e:
            log_exception(self.logger, "compute_spectrum", e)
            return _error(e)

    def kernel_grid(self, experiment: ExperimentConfig, grid: str, count: Optional[int]) -> Any:
        """(zetas, zs) for the kernel table: diagonal, seeded random pairs or the configured points."""
        radius = experiment.kernel.radius
        if grid == "diagonal":
            n = count or experiment.kernel.diagonal_points
            zs = np.linspace(-radius, radius, n) + 1j
            return zs, zs
        if grid == "random":
            n = count or experiment.kernel.pairs
            rng = np.random.default_rng(experiment.seed)

            def disk(size):
                return radius * np.sqrt(rng.uniform(size=size)) * np.exp(2j * math.pi * rng.uniform(size=size))
            return disk(n), disk(n)
        if not experiment.kernel.points:
            raise ConfigError("The points grid needs kernel.points in the experiment file")
        zs = np.array([complex(re, im) for re, im in experiment.kernel.points])
        return zs, zs

    def compute_kernel(self, experiment: ExperimentConfig, c: Optional[float] = None, grid: str = "diagonal",
                       count: Optional[int] = None) -> Dict[str, Any]:
        """Reproducing kernel K(zeta, z, c) by both formulas plus E samples, as CSV"""
        try:
            sol = build_operators(experiment, self.numerics)[0]
            c = c if c is not None else (experiment.kernel.c if experiment.kernel.c is not None else sol.potential.b)
            handle = DeBrangesSpaceHandle.for_solution(sol, c, float(self.numerics.get("kernel_limit_step", 1e-4)))
            zetas, zs = self.kernel_grid(experiment, grid, count)
            self.logger.info(f"Kernel table for {len(zs)} pairs at c={c:.6g}")
            table = kernel_table(handle, zetas, zs)
            kernel_file = write_frame(self._output(experiment, "kernel.csv"), table)
            samples_file = write_frame(self._output(experiment, "E.csv"), e_samples_table(handle, zs))
            return {
                "status": "success",
                "c": c,
                "max_discrepancy": float(table["discrepancy"].max()),
                "table": table,
                "output_files": [kernel_file, samples_file],
            }
        except Exception as e:
            log_exception(self.logger, "compute_kernel", e)
            return _error(e)

    def probe_function(self, experiment: ExperimentConfig, sol, probe: str) -> GridFunction:
        p = sol.potential
        if probe == "parabola":
            return GridFunction.from_function(lambda x: (x - p.a) * (p.b - x), p.a, p.b,
                                              panel_width=experiment.probes.panel_width)
        center = p.a + 0.5 * (p.b - p.a)
        return bump_probe(center, 0.45 * (p.b - p.a), panel_width=experiment.probes.panel_width)

    def compute_transform(self, experiment: ExperimentConfig, probe: str = "bump") -> Dict[str, Any]:
        """Transform of a probe at the atoms, its display interpolant, round trip and density profile, as CSV"""
        try:
            sol = build_operators(experiment, self.numerics)[0]
            measure = compute_measure(sol, experiment.lambda_max, experiment.primary.right_angle)
            f = self.probe_function(experiment, sol, probe)
            transformed = transform(sol, f, measure.lambdas)
            fhat = transformed.atom_values
            rebuilt = inverse_transform(measure, sol, fhat, f.grid)
            weights = f.quadrature_weights()
            roundtrip = math.sqrt(float(np.sum(weights * np.abs(f.values - rebuilt.values) ** 2)) / f.norm_squared())
            parseval = parseval_check(measure, sol, f)

            p = sol.potential
            c_values = p.a + (p.b - p.a) * np.linspace(0.25, 1.0, 4)
            profile = density_profile(measure, sol, f, c_values)

            atoms_file = write_frame(self._output(experiment, "transform.csv"), pd.DataFrame(
                {"lambda": measure.lambdas, "weight": measure.weights, "re": fhat.real, "im": fhat.imag}))
            grid_file = write_frame(self._output(experiment, "roundtrip.csv"), pd.DataFrame(
                {"x": f.grid, "f": np.real(f.values), "re": np.real(rebuilt.values), "im": np.imag(rebuilt.values)}))
            grid, display = transformed.display_samples()
            display_file = write_frame(self._output(experiment, "transform_display.csv"), pd.DataFrame(
                {"lambda": grid, "re": display.real, "im": display.imag}))
            profile_file = write_frame(self._output(experiment, "density.csv"),
                                       pd.DataFrame(profile, columns=["c", "relative_error"]))
            return {
                "status": "success",
                "parseval_error": parseval.relative_error,
                "roundtrip_error": roundtrip,
                "output_files": [atoms_file, grid_file, profile_file, display_file],
            }
        except Exception as e:
            log_exception(self.logger, "compute_transform", e)
            return _error(e)

    def run_verification(self, experiment: ExperimentConfig, suites: Optional[List[str]] = None) -> Dict[str, Any]:
        """Invariant suites for the first operator; a configured measure file replaces the computed measure"""
        try:
            sol = build_operators(experiment, self.numerics)[0]
            measure = read_measure(experiment.measure_file) if experiment.measure_file else None
            suite = VerificationSuite(self.settings, self.verbose)
            report = suite.run_all(experiment, sol, measure, suites)
            if report["status"] == "error":
                report["exit_code"] = EXIT_NUMERICAL_FAILURE
                return report

            output_files = []
            duality = report["suites"].get("kernel_duality", {})
            if "table" in duality:
                output_files.append(write_frame(self._output(experiment, "kernel_duality.csv"), duality.pop("table")))
            document = {key: value for key, value in report.items() if key != "processing_time"}
            output_files.append(write_json(self._output(experiment, "verify.json"), document))
            report["output_files"] = output_files
            report["rows"] = VerificationSuite.summary_rows(report)
            return report
        except Exception as e:
            log_exception(self.logger, "run_verification", e)
            return _error(e)

    def run_uniqueness(self, experiment: ExperimentConfig, kappa: Optional[Dict[int, float]] = None) -> Dict[str, Any]:
        """Uniqueness report for an operator pair, or the gauge counterexample when kappa is given"""
        try:
            if kappa:
                return self._run_counterexample(experiment, kappa)
            if len(experiment.operators) != 2:
                raise ConfigError("The uniqueness experiment needs exactly two operators")
            tolerances = experiment.tolerances.uniqueness()
            if all(spec.kind == "bessel" for spec in experiment.operators):
                p1, p2 = (spec.build_potential() for spec in experiment.operators)
                report = bessel_uniqueness_experiment(p1, p2, experiment.lambda_max, tolerances)
            else:
                sol1, sol2 = build_operators(experiment, self.numerics)
                report = uniqueness_experiment(sol1, sol2, experiment.lambda_max, tolerances=tolerances)
            document = {"experiment": experiment.name, "report": report.to_dict()}
            output_file = write_json(self._output(experiment, "uniqueness.json"), document)
            result = {"status": "success", "report": report, "verdict": report.verdict, "output_files": [output_file]}
            log_result(self.logger, "run_uniqueness", result)
            return result
        except Exception as e:
            log_exception(self.logger, "run_uniqueness", e)
            return _error(e)

    def _run_counterexample(self, experiment: ExperimentConfig, kappa: Dict[int, float]) -> Dict[str, Any]:
        sol = build_operators(experiment, self.numerics)[0]
        if sol.potential.kind is not PotentialKind.REGULAR:
            raise ConfigError("The counterexample is built on a regular operator")
        result = counterexample_forward(sol, kappa, experiment.lambda_max)
        document = {
            "experiment": experiment.name,
            "kappa": {str(k): v for k, v in sorted(kappa.items())},
            "measure_original": result.measure_original.to_dict(),
            "measure_rescaled": result.measure_rescaled.to_dict(),
            "measure_perturbed": result.measure_perturbed.to_dict(),
            "g_nodes": list(result.g_used.nodes or ()),
            "g_values": list(result.g_used.values or ()),
            "g_degree": result.g_used.degree,
            "g_order_estimate": result.g_order_estimate,
            "scale_factors": list(result.scale_factors),
            "verified": result.verified,
        }
        output_file = write_json(self._output(experiment, "counterexample.json"), document)
        status = "success" if result.verified else "fail"
        return {"status": status, "counterexample": result, "output_files": [output_file],
                "message": "gauge relation verified" if result.verified else "atomwise gauge relation failed"}

    def run_asymptotics(self, experiment: ExperimentConfig) -> Dict[str, Any]:
        """Large-|z| asymptotics of phi(iy, x)/phi(iy, x~) and, for Bessel kind, the boundary-condition ladder"""
        try:
            sol = build_operators(experiment, self.numerics)[0]
            p = sol.potential
            length = p.b - p.a
            x = experiment.asymptotics.x or p.a + 2.0 * length / math.pi
            x_tilde = experiment.asymptotics.x_tilde or p.a + length / math.pi
            check = check_asymptotics(sol, x, x_tilde, experiment.asymptotics.y_ladder)
            tol = experiment.tolerances.asymptotics
            passed = check.final_error <= tol and check.decreasing(max(0, len(check.errors) - 2))
            document: Dict[str, Any] = {
                "experiment": experiment.name,
                "x": x,
                "x_tilde": x_tilde,
                "y_ladder": list(check.y_ladder),
                "errors": list(check.errors),
                "tolerance": tol,
                "passed": passed,
            }
            if p.kind is PotentialKind.BESSEL:
                ladder = [p.b * 10.0 ** -k for k in range(2, 7)]
                bc = check_bessel_bc(sol, 1.0 + 1j, ladder)
                document["bessel_ladder"] = list(bc.ladder)
                document["bessel_residuals"] = list(bc.residuals)
                document["bessel_residual"] = bc.residual
            output_file = write_json(self._output(experiment, "asymptotics.json"), document)
            return {"status": "success" if passed else "fail", "errors": list(check.errors),
                    "output_files": [output_file],
                    "message": f"final error {check.final_error:.3e} (tolerance {tol:g})"}
        except Exception as e:
            log_exception(self.logger, "run_asymptotics", e)
            return _error(e)


def _exit_code(result: Dict[str, Any]) -> int:
    if result["status"] == "error":
        return result.get("exit_code", EXIT_NUMERICAL_FAILURE)
    if result["status"] == "fail":
        return EXIT_VERIFICATION_FAILURE
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Experiment configuration file (JSON or YAML)")
    common.add_argument("--settings", help="System settings YAML (default: config/config.yaml)")
    common.add_argument("--tol", type=float, help="Relative tolerance of the ODE integrations")
    common.add_argument("--lambda-max", type=float, help="Spectral cutoff")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Random seed for probes (default: 42)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        description="de Branges Spectral Laboratory - Command Line Interface",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py spectrum --config config/experiments/free_dirichlet.json --lambda-max 25
  python main.py kernel --config config/experiments/free_dirichlet.json --grid random
  python main.py verify --config config/experiments/bessel_l1.json
  python main.py uniqueness --config config/experiments/bessel_l0_vs_l1.json
        """
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    subparsers.add_parser("spectrum", parents=[common], help="Compute the spectral measure")

    kernel_parser = subparsers.add_parser("kernel", parents=[common], help="Reproducing kernel by both formulas")
    kernel_parser.add_argument("--c", type=float, help="Space parameter c (default: right endpoint)")
    kernel_parser.add_argument("--grid", choices=["diagonal", "random", "points"], default="diagonal",
                               help="Sample points (default: diagonal)")
    kernel_parser.add_argument("--count", type=int, help="Number of sample pairs")

    transform_parser = subparsers.add_parser("transform", parents=[common], help="Generalized Fourier transform")
    transform_parser.add_argument("--probe", choices=["bump", "parabola"], default="bump",
                                  help="Test function (default: bump)")

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Run the invariant suites")
    verify_parser.add_argument("--suites", nargs="+", help="Subset of suites to run")

    uniqueness_parser = subparsers.add_parser("uniqueness", parents=[common], help="Uniqueness experiments")
    uniqueness_parser.add_argument("--kappa", nargs="+", metavar="N=VALUE",
                                   help="Alter atom weights and run the gauge counterexample")

    subparsers.add_parser("asymptotics", parents=[common], help="Large-|z| asymptotics of phi")
    return parser


def main():
    """Main entry point for the command-line interface"""
    parser = build_parser()
    args = parser.parse_args()

    if args.command is None:
        parser.print_help()
        sys.exit(EXIT_CONFIG_ERROR)

    try:
        system = SpectralLabSystem(settings_path=args.settings, verbose=args.verbose)
        experiment = system.load(args.config, tol=args.tol, lambda_max=args.lambda_max, out=args.out, seed=args.seed)
        kappa = parse_kappa(getattr(args, "kappa", None))
    except SpectralLabError as e:
        print(f"Error: {e}")
        sys.exit(EXIT_CONFIG_ERROR if isinstance(e, ConfigError) else EXIT_NUMERICAL_FAILURE)

    if args.command == "spectrum":
        result = system.compute_spectrum(experiment)
        if result["status"] == "success":
            measure = result["measure"]
            print(f"{len(measure)} atoms up to lambda_max={measure.lambda_max:g}")
            for n, (lam, weight) in enumerate(measure.atoms, start=1):
                print(f"{n:4d}  {lam:22.15g}  {weight:22.15g}")

    elif args.command == "kernel":
        result = system.compute_kernel(experiment, c=args.c, grid=args.grid, count=args.count)
        if result["status"] == "success":
            print(f"Kernel table at c={result['c']:.6g}: max normalized discrepancy {result['max_discrepancy']:.3e}")

    elif args.command == "transform":
        result = system.compute_transform(experiment, probe=args.probe)
        if result["status"] == "success":
            print(f"Parseval relative error: {result['parseval_error']:.3e}")
            print(f"Round-trip relative L2 error: {result['roundtrip_error']:.3e}")

    elif args.command == "verify":
        result = system.run_verification(experiment, suites=args.suites)
        for row in result.get("rows", []):
            print(f"{row['suite']:16s} {row['status'].upper():5s} {row['message']}")

    elif args.command == "uniqueness":
        result = system.run_uniqueness(experiment, kappa=kappa)
        if "verdict" in result:
            print(f"Verdict: {result['verdict']}")
        elif "counterexample" in result:
            print(f"Scale factors: {list(result['counterexample'].scale_factors)}")

    elif args.command == "asymptotics":
        result = system.run_asymptotics(experiment)

    if result["status"] == "error":
        print(f"Error: {result.get('message', 'Unknown error')}")
    elif result.get("message"):
        print(result["message"])
    if result.get("output_files"):
        print(f"Output files saved to: {experiment.output_dir}")
    sys.exit(_exit_code(result))


if __name__ == "__main__":
    main()
