"""
Invariant suites for one operator.

The suite checks eigenvalue completeness, Parseval and unitarity on seeded
probes, the Hermite-Biehler property and kernel positivity, agreement of the
two kernel formulas, nesting of the de Branges spaces, large-|z| asymptotics,
the Bessel boundary condition, gauge covariance, the atom-sum form of the
reproducing property and monotonicity of the kernel diagonal in x. Each
check returns a status dictionary; run_all aggregates them into a pass/fail
report.
"""

import math
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from debranges_lab.config_utils import get_config_value, load_config_or_fallback
from debranges_lab.debranges_space import (
    FIRST_IN_SECOND,
    DeBrangesSpaceHandle,
    atom_reproducing_errors,
    hermite_biehler_violations,
    kernel_diagonal_profile,
    kernel_positivity_violations,
    kernel_table,
    real_zero_violations,
    verify_containment,
)
from debranges_lab.entire_solution import (
    RescalingFunction,
    check_asymptotics,
    check_bessel_bc,
    rescale_solution,
)
from debranges_lab.errors import SpectralLabError
from debranges_lab.experiment_config import ExperimentConfig
from debranges_lab.logging_utils import (
    log_exception,
    log_execution_time,
    log_method_call,
    log_result,
    log_test_step,
    setup_logger,
)
from debranges_lab.operator_core import PotentialKind
from debranges_lab.spectral_measure import (
    SpectralMeasure,
    atom_weights,
    bump_probe,
    compute_measure,
    eigenvalue_count,
    parseval_check,
    random_probes,
    rescale_measure,
    unitarity_check,
)

SUITES = (
    "eigenvalues",
    "parseval",
    "unitarity",
    "hermite_biehler",
    "kernel_duality",
    "nesting",
    "asymptotics",
    "bessel_boundary",
    "gauge",
    "reproducing",
    "monotone_kernel",
)

DEFAULT_TOLERANCES = {
    "parseval": 1e-5,
    "kernel_duality": 1e-7,
    "nesting": 1e-5,
    "asymptotics": 1e-2,
    "reproducing": 1e-5,
    "gauge": 1e-9,
}

# mu for the atom-sum reproducing check; none may sit on an atom
REPRODUCING_POINTS = (0.0, 2.5 + 1.0j, -4.0)
MONOTONE_POINTS = (0.0, 2.5 + 1.0j, 25.0, -4.0)
MONOTONE_LADDER_DEPTH = 20
KERNEL_LIMIT_FRACTION = 1e-5
# |E(z)| > |E(z*)| is sampled on a HB_GRID_SIZE x HB_GRID_SIZE grid over [-r, r] x (0, r]
HB_GRID_SIZE = 20


class VerificationSuite:
    """
    Runs the invariant suites against an entire solution and its spectral measure.

    Tolerances come from the `verification` section of the settings file;
    tolerances set explicitly in an experiment file take precedence.
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None, verbose: bool = False):
        """
        Initialize the verification suite.

        Args:
            config: Settings dictionary. If None, loads from the default path.
            verbose: Whether to enable verbose logging and progress bars.
        """
        self.config = config if config is not None else load_config_or_fallback()
        self.verbose = verbose
        self.logger = setup_logger("DBLAB", self.config, verbose, "VerificationSuite")

        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(get_config_value(self.config, 'verification', {}) or {})
        self.logger.debug(f"Verification tolerances: {self.tolerances}")

    def _tolerances_for(self, experiment: ExperimentConfig) -> Dict[str, float]:
        tolerances = dict(self.tolerances)
        explicit = experiment.tolerances.model_fields_set
        for key in explicit:
            tolerances[key] = getattr(experiment.tolerances, key)
        return tolerances

    @staticmethod
    def _probe_interval(sol) -> Sequence[float]:
        p = sol.potential
        return p.a, p.b

    def check_eigenvalues(self, sol, measure: SpectralMeasure, right_angle: float = 0.0) -> Dict[str, Any]:
        """Atom count against the Prufer count, and one eigenvalue per gap between atoms."""
        lams = measure.lambdas
        total = eigenvalue_count(sol, measure.lambda_max, right_angle)
        problems = []
        if total != len(measure):
            problems.append(f"Prufer count {total} but {len(measure)} atoms")
        for n, mid in enumerate(0.5 * (lams[1:] + lams[:-1]), start=1):
            count = eigenvalue_count(sol, float(mid), right_angle)
            if count != n:
                problems.append(f"count {count} between atoms {n} and {n + 1}")
        status = "pass" if not problems else "fail"
        return {"status": status, "atoms": len(measure), "prufer_count": total,
                "message": "; ".join(problems) if problems else "complete"}

    def check_parseval(self, sol, measure: SpectralMeasure, probes, tol: float) -> Dict[str, Any]:
        errors, inconclusive = [], 0
        for probe in probes:
            result = parseval_check(measure, sol, probe)
            errors.append(result.relative_error)
            inconclusive += not result.conclusive
        worst = float(max(errors)) if errors else 0.0
        status = "pass" if worst <= tol else "fail"
        return {"status": status, "max_relative_error": worst, "errors": errors,
                "inconclusive": inconclusive, "tolerance": tol,
                "message": f"max relative error {worst:.3e}"}

    def check_unitarity(self, sol, measure: SpectralMeasure, probes, tol: float) -> Dict[str, Any]:
        deviations = [unitarity_check(measure, sol, f, g) for f, g in zip(probes[::2], probes[1::2])]
        worst = float(max(deviations)) if deviations else 0.0
        status = "pass" if worst <= tol else "fail"
        return {"status": status, "max_deviation": worst, "deviations": deviations, "tolerance": tol,
                "message": f"max inner-product deviation {worst:.3e}"}

    def check_hermite_biehler(self, sol, radius: float) -> Dict[str, Any]:
        """Zero violations of |E(z)| > |E(z*)|, real zeros of E and K(zeta, zeta) > 0, for c at mid-interval and b."""
        p = sol.potential
        xs = np.linspace(-radius, radius, HB_GRID_SIZE)
        ys = np.linspace(radius / HB_GRID_SIZE, radius, HB_GRID_SIZE)
        lams = np.linspace(-radius, radius, 201)
        points = (np.linspace(-radius, radius, 11)[:, None] + 1j * np.array([-5.0, 0.0, 5.0])[None, :]).ravel()
        violations: Dict[str, int] = {}
        for c in (p.a + 0.5 * (p.b - p.a), p.b):
            handle = DeBrangesSpaceHandle.for_solution(sol, c)
            violations[f"hermite_biehler(c={c:.6g})"] = len(hermite_biehler_violations(handle, xs, ys))
            violations[f"real_zeros(c={c:.6g})"] = len(real_zero_violations(handle, lams))
            violations[f"kernel_positivity(c={c:.6g})"] = len(kernel_positivity_violations(handle, points))
        total = sum(violations.values())
        return {"status": "pass" if total == 0 else "fail", "violations": violations,
                "grid": [xs.size, ys.size], "heights": [float(ys[0]), float(ys[-1])],
                "message": f"{total} violations"}

    def check_kernel_duality(self, sol, rng: np.random.Generator, pairs: int, radius: float,
                             c: Optional[float], tol: float) -> Dict[str, Any]:
        """Formula against integral for seeded (zeta, z) in the disk of the given radius."""
        c = sol.potential.b if c is None else float(c)

        def disk(count):
            return radius * np.sqrt(rng.uniform(size=count)) * np.exp(2j * math.pi * rng.uniform(size=count))

        zetas, zs = disk(pairs), disk(pairs)
        table = kernel_table(DeBrangesSpaceHandle.for_solution(sol, c), zetas, zs)
        worst = float(table["discrepancy"].max())
        status = "pass" if worst <= tol else "fail"
        return {"status": status, "max_discrepancy": worst, "pairs": pairs, "c": c, "tolerance": tol,
                "table": table, "message": f"max normalized discrepancy {worst:.3e}"}

    def check_nesting(self, sol, inner_c: Optional[float], outer_c: Optional[float], tol: float) -> Dict[str, Any]:
        """A probe inside (a, c1) is isometric in both spaces; a probe in (c1, c2) only in B(c2)."""
        p = sol.potential
        length = p.b - p.a
        c1 = p.a + length / math.pi if inner_c is None else float(inner_c)
        c2 = p.a + 2.0 * length / math.pi if outer_c is None else float(outer_c)
        inside = bump_probe(0.5 * (p.a + c1), 0.45 * (c1 - p.a))
        between = bump_probe(0.5 * (c1 + c2), 0.45 * (c2 - c1))
        result = verify_containment(DeBrangesSpaceHandle.for_solution(sol, c1),
                                    DeBrangesSpaceHandle.for_solution(sol, c2),
                                    [inside, between], tol=tol)
        (inner_1, inner_2), (between_1, between_2) = result.representation_errors
        strict = between_1 > between_2
        status = "pass" if result.verdict == FIRST_IN_SECOND and strict else "fail"
        return {"status": status, "verdict": result.verdict, "c": [c1, c2],
                "representation_errors": [list(e) for e in result.representation_errors],
                "message": f"B({c1:.4g}) vs B({c2:.4g}): {result.verdict}"}

    def check_reproducing(self, sol, measure: SpectralMeasure, tol: float) -> Dict[str, Any]:
        """Atom sums of f^ against the kernel of B(b) reproduce f^ off the spectrum."""
        if not len(measure):
            return {"status": "skip", "message": "no atoms below lambda_max"}
        p = sol.potential
        f = bump_probe(p.a + 0.5 * (p.b - p.a), 0.45 * (p.b - p.a))
        errors = atom_reproducing_errors(measure, sol, f, p.b, REPRODUCING_POINTS)
        worst = float(np.max(errors))
        return {"status": "pass" if worst <= tol else "fail", "max_error": worst,
                "errors": [float(e) for e in errors], "tolerance": tol,
                "message": f"max normalized reproducing error {worst:.3e}"}

    def check_monotone_kernel(self, sol) -> Dict[str, Any]:
        """K(zeta, zeta, x) strictly increasing in x and vanishing along x = a + (b - a) 2^-k."""
        p = sol.potential
        length = p.b - p.a
        grid = p.a + length * np.linspace(0.0, 1.0, 41)[1:]
        ladder = p.a + length * 2.0 ** -np.arange(MONOTONE_LADDER_DEPTH, 0, -1)
        problems = []
        limits = []
        for zeta in MONOTONE_POINTS:
            profile = kernel_diagonal_profile(sol, zeta, grid)
            near_a = kernel_diagonal_profile(sol, zeta, ladder)
            limits.append(float(near_a[0] / profile[-1]))
            if not np.all(np.diff(profile) > 0):
                problems.append(f"not increasing at zeta={zeta}")
            if not np.all(np.diff(near_a) > 0):
                problems.append(f"ladder not monotone at zeta={zeta}")
            if not near_a[0] <= KERNEL_LIMIT_FRACTION * profile[-1]:
                problems.append(f"no limit at a for zeta={zeta}")
        return {"status": "pass" if not problems else "fail", "limit_ratios": limits,
                "message": "; ".join(problems) if problems else f"largest K(a+)/K(b) {max(limits):.3e}"}

    def check_asymptotics(self, sol, x: Optional[float], x_tilde: Optional[float], y_ladder: Sequence[float],
                          tol: float) -> Dict[str, Any]:
        p = sol.potential
        length = p.b - p.a
        x = p.a + 2.0 * length / math.pi if x is None else float(x)
        x_tilde = p.a + length / math.pi if x_tilde is None else float(x_tilde)
        result = check_asymptotics(sol, x, x_tilde, y_ladder)
        decreasing = result.decreasing(max(0, len(result.errors) - 2))
        status = "pass" if result.final_error <= tol and decreasing else "fail"
        return {"status": status, "errors": list(result.errors), "y_ladder": list(result.y_ladder),
                "final_error": result.final_error, "decreasing": decreasing, "tolerance": tol,
                "message": f"final error {result.final_error:.3e}"}

    def check_bessel_boundary(self, sol) -> Dict[str, Any]:
        if sol.potential.kind is not PotentialKind.BESSEL:
            return {"status": "skip", "message": "regular left endpoint"}
        ladder = [sol.potential.b * 10.0 ** -k for k in range(2, 7)]
        residuals = [check_bessel_bc(sol, z, ladder) for z in (0.0, 1.0 + 1j, 25.0)]
        finals = [r.final_residual for r in residuals]
        # rounding-level residuals need not keep decreasing
        decreasing = all(r.decreasing or r.final_residual <= 1e-12 for r in residuals)
        return {"status": "pass" if decreasing else "fail", "final_residuals": finals,
                "residuals": [r.residual for r in residuals],
                "message": f"largest final residual {max(finals):.3e}"}

    def check_gauge(self, sol, measure: SpectralMeasure, tol: float) -> Dict[str, Any]:
        """Weights of e^g phi equal e^(-2g) w atomwise."""
        if not len(measure):
            return {"status": "skip", "message": "no atoms below lambda_max"}
        g = RescalingFunction((0.3, 0.01))
        expected = rescale_measure(measure, g).weights
        direct = atom_weights(rescale_solution(sol, g), measure.lambdas)
        worst = float(np.max(np.abs(direct - expected) / expected))
        return {"status": "pass" if worst <= tol else "fail", "max_relative_error": worst, "tolerance": tol,
                "message": f"max atomwise deviation {worst:.3e}"}

    def run_all(self, experiment: ExperimentConfig, sol, measure: Optional[SpectralMeasure] = None,
                suites: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        """
        Run the requested suites (all by default).

        Args:
            experiment: Experiment configuration (probe, kernel and asymptotics sections).
            sol: Entire solution of the first operator in the experiment.
            measure: Spectral measure to test; computed from sol when None.
            suites: Names from SUITES.

        Returns:
            Dictionary with overall "status" ("pass", "fail" or "error") and per-suite results.
        """
        log_method_call(self.logger, "run_all", experiment=experiment.name, suites=suites)
        start_time = time.time()
        selected = list(suites) if suites else list(SUITES)
        unknown = [s for s in selected if s not in SUITES]
        if unknown:
            return {"status": "error", "message": f"Unknown suites: {', '.join(unknown)}"}

        tolerances = self._tolerances_for(experiment)
        right_angle = experiment.primary.right_angle
        results: Dict[str, Dict[str, Any]] = {}
        try:
            if measure is None:
                measure = compute_measure(sol, experiment.lambda_max, right_angle)
            rng = np.random.default_rng(experiment.seed)
            lower, upper = self._probe_interval(sol)
            probes = random_probes(rng, lower, upper, experiment.probes.count, experiment.probes.half_width_range)

            runners = {
                "eigenvalues": lambda: self.check_eigenvalues(sol, measure, right_angle),
                "parseval": lambda: self.check_parseval(sol, measure, probes, tolerances["parseval"]),
                "unitarity": lambda: self.check_unitarity(sol, measure, probes, tolerances["parseval"]),
                "hermite_biehler": lambda: self.check_hermite_biehler(sol, experiment.kernel.radius),
                "kernel_duality": lambda: self.check_kernel_duality(
                    sol, rng, experiment.kernel.pairs, experiment.kernel.radius, experiment.kernel.c,
                    tolerances["kernel_duality"]),
                "nesting": lambda: self.check_nesting(sol, experiment.probes.inner_c, experiment.probes.outer_c,
                                                      tolerances["nesting"]),
                "asymptotics": lambda: self.check_asymptotics(
                    sol, experiment.asymptotics.x, experiment.asymptotics.x_tilde,
                    experiment.asymptotics.y_ladder, tolerances["asymptotics"]),
                "bessel_boundary": lambda: self.check_bessel_boundary(sol),
                "gauge": lambda: self.check_gauge(sol, measure, tolerances["gauge"]),
                "reproducing": lambda: self.check_reproducing(sol, measure, tolerances["reproducing"]),
                "monotone_kernel": lambda: self.check_monotone_kernel(sol),
            }

            for name in tqdm(selected, desc="Verification suites", disable=not self.verbose):
                try:
                    outcome = runners[name]()
                except SpectralLabError as e:
                    log_exception(self.logger, name, e)
                    outcome = {"status": "fail", "message": f"{type(e).__name__}: {e}"}
                results[name] = outcome
                log_test_step(self.logger, name, outcome["status"].upper(),
                              None if outcome["status"] == "pass" else {"message": outcome.get("message")})

            failed = [name for name, outcome in results.items() if outcome["status"] == "fail"]
            report = {
                "status": "pass" if not failed else "fail",
                "message": "all suites passed" if not failed else f"failed: {', '.join(failed)}",
                "experiment": experiment.name,
                "failed": failed,
                "suites": results,
                "processing_time": log_execution_time(self.logger, start_time, "verification"),
            }
            log_result(self.logger, "run_all", report)
            return report

        except SpectralLabError as e:
            error_details = log_exception(self.logger, "run_all", e)
            return {"status": "error", "message": str(e), "error_type": error_details["exception_type"],
                    "suites": results}

    @staticmethod
    def summary_rows(report: Dict[str, Any]) -> List[Dict[str, Any]]:
        """One row per suite: name, status, message."""
        return [{"suite": name, "status": outcome["status"], "message": outcome.get("message", "")}
                for name, outcome in report.get("suites", {}).items()]
