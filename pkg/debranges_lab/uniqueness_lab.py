"""
Uniqueness experiments on pairs of operators.

Two operators with the same spectral measure have nested de Branges spaces
whose kernel diagonals match along a shift map eta. These routines detect
eta from kernel diagonals, test the identities it must satisfy, recover the
potential from phi, compare Bessel indices, and run the forward direction of
the gauge counterexample (a measure perturbed at finitely many atoms is
a gauge transform of the original).
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from debranges_lab.debranges_space import (
    DeBrangesSpaceHandle,
    EntireFunctionSamples,
    cartwright_diagnostics,
)
from debranges_lab.entire_solution import RescalingFunction, phi_bessel, phi_regular
from debranges_lab.errors import GaugeError, PotentialError
from debranges_lab.logging_utils import get_logger
from debranges_lab.operator_core import Potential, PotentialKind
from debranges_lab.spectral_measure import (
    GridFunction,
    SpectralMeasure,
    compare_measures,
    compute_measure,
    gauge_align,
    rescale_measure,
)

logger = get_logger("uniqueness_lab")

EQUAL_UP_TO_SHIFT = "equal up to shift"
DISTINCT = "distinct"
INCONCLUSIVE = "inconclusive"

LOG_DERIVATIVE_MARGIN = 1e-3
RECOVERY_MARGIN = 0.05
RECOVERY_STEP = 1e-2


@dataclass(frozen=True)
class ShiftMap:
    """Samples (x1, x2) with K2(zeta, zeta, x2) = K1(zeta, zeta, x1) and their affine fit."""
    samples: Tuple[Tuple[float, float], ...]
    slope: float
    intercept: float
    residual: float
    saturated: Tuple[float, ...] = ()

    @classmethod
    def from_samples(cls, x1: Sequence[float], x2: Sequence[float], saturated: Sequence[float] = ()) -> "ShiftMap":
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if x1.size >= 2:
            slope, intercept = np.polyfit(x1, x2, 1)
            residual = float(np.max(np.abs(x2 - (slope * x1 + intercept))))
        else:
            slope = intercept = residual = float("nan")
        samples = tuple((float(a), float(b)) for a, b in zip(x1, x2))
        return cls(samples, float(slope), float(intercept), residual, tuple(float(s) for s in saturated))

    @classmethod
    def identity(cls, grid: Sequence[float]) -> "ShiftMap":
        return cls.from_samples(grid, grid)

    def __call__(self, x1) -> np.ndarray:
        return self.slope * np.asarray(x1, dtype=float) + self.intercept

    def interpolate(self, x1) -> np.ndarray:
        """Piecewise-linear eta through the samples."""
        x1s, x2s = np.array(self.samples).T
        return np.interp(np.asarray(x1, dtype=float), x1s, x2s)

    @property
    def increasing(self) -> bool:
        if len(self.samples) < 2:
            return True
        x1s, x2s = np.array(self.samples).T
        return bool(np.all(np.diff(x1s) > 0) and np.all(np.diff(x2s) > 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "samples": [list(s) for s in self.samples],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "saturated": list(self.saturated),
        }


def _lower_edge(sol) -> float:
    p = sol.potential
    return p.a if p.kind is PotentialKind.REGULAR else p.b * 1e-12


def detect_shift(sol1, sol2, x1_grid: Sequence[float], zeta: complex = 1j) -> ShiftMap:
    """
    Solve K2(zeta, zeta, x2) = K1(zeta, zeta, x1) for x2 at every x1.

    The diagonal is strictly increasing in x, so each equation has at most
    one root; x1 whose diagonal exceeds K2(zeta, zeta, b2) are reported as
    saturated (operator or gauge mismatch).
    """
    x1s = np.asarray(x1_grid, dtype=float)
    targets = sol1.norm_profile(zeta, x1s)
    lo = _lower_edge(sol2)
    hi = sol2.potential.b
    top = float(sol2.norm_profile(zeta, [hi])[0])

    def gap(x2, target):
        return float(sol2.norm_profile(zeta, [x2])[0]) - target

    x1_found, x2_found, saturated = [], [], []
    for x1, target in zip(x1s, targets):
        if target >= top:
            saturated.append(float(x1))
            continue
        if target <= 0.0:
            saturated.append(float(x1))
            continue
        x2 = optimize.brentq(gap, lo, hi, args=(float(target),), xtol=1e-14, rtol=1e-14)
        x1_found.append(float(x1))
        x2_found.append(float(x2))
    if saturated:
        logger.warning(f"Shift detection saturated at {len(saturated)} grid points (gauge or operator mismatch)")
    return ShiftMap.from_samples(x1_found, x2_found, saturated)


@dataclass(frozen=True)
class IdentityCheck:
    max_error: float
    checked: int
    skipped: Tuple[float, ...] = ()


def _mapped(sol2, eta: ShiftMap, x1s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x2s = eta(x1s)
    p = sol2.potential
    inside = (x2s > (0.0 if p.kind is PotentialKind.BESSEL else p.a - 1e-12)) & (x2s <= p.b + 1e-12)
    return np.clip(x2s, p.a, p.b), inside


def check_density_identity(sol1, sol2, eta: ShiftMap, z: complex, x1_grid: Sequence[float]) -> IdentityCheck:
    """max | |phi1(z,x1)|^2 - eta' |phi2(z,eta(x1))|^2 | / |phi1(z,x1)|^2 with eta' the fitted slope."""
    x1s = np.asarray(x1_grid, dtype=float)
    x2s, inside = _mapped(sol2, eta, x1s)
    phi1, _ = sol1.evaluate(z, x1s[inside])
    phi2, _ = sol2.evaluate(z, x2s[inside])
    errors = np.abs(np.abs(phi1) ** 2 - eta.slope * np.abs(phi2) ** 2) / np.abs(phi1) ** 2
    skipped = tuple(float(x) for x in x1s[~inside])
    return IdentityCheck(float(np.max(errors)) if errors.size else float("nan"), int(errors.size), skipped)


def check_logderivative_identity(sol1, sol2, eta: ShiftMap, lam: float, x1_grid: Sequence[float],
                                 margin: float = LOG_DERIVATIVE_MARGIN) -> IdentityCheck:
    """
    max |phi1'/phi1 (lam, x1) - phi2'/phi2 (lam, eta(x1))|.

    Points where either solution is within margin * max|phi| of zero are skipped.
    """
    x1s = np.asarray(x1_grid, dtype=float)
    x2s, inside = _mapped(sol2, eta, x1s)
    phi1, dphi1 = sol1.evaluate(lam, x1s[inside])
    phi2, dphi2 = sol2.evaluate(lam, x2s[inside])
    keep = (np.abs(phi1) >= margin * np.max(np.abs(phi1))) & (np.abs(phi2) >= margin * np.max(np.abs(phi2)))
    errors = np.abs(dphi1[keep] / phi1[keep] - dphi2[keep] / phi2[keep])
    skipped = tuple(float(x) for x in x1s[~inside]) + tuple(float(x) for x in x1s[inside][~keep])
    if skipped:
        logger.debug(f"Log-derivative identity skipped {len(skipped)} points near zeros of phi")
    return IdentityCheck(float(np.max(errors)) if errors.size else float("nan"), int(errors.size), skipped)


def _recovered_values(sol, lam: float, xs: np.ndarray, h: float, margin: float) -> np.ndarray:
    """lam + phi''/phi at every x, NaN where the stencil or the margin rules the point out."""
    p = sol.potential
    left = xs / 4.0 if p.kind is PotentialKind.BESSEL else (xs - p.a) / 2.0
    steps = np.minimum(np.minimum(h, left), (p.b - xs) / 2.0)
    result = np.full(xs.shape, np.nan)
    usable = np.flatnonzero(steps > 0)
    if usable.size == 0:
        return result
    x_use, step_use = xs[usable], steps[usable]

    offsets = np.array([-2.0, -1.0, 1.0, 2.0])
    stencil = (x_use[:, None] + offsets[None, :] * step_use[:, None]).ravel()
    _, dphi = sol.evaluate(lam, stencil)
    dphi = np.real(dphi).reshape(x_use.size, 4)
    second = (dphi[:, 0] - 8.0 * dphi[:, 1] + 8.0 * dphi[:, 2] - dphi[:, 3]) / (12.0 * step_use)
    phi = np.real(sol.evaluate(lam, x_use)[0])

    keep = np.abs(phi) >= margin * np.max(np.abs(phi))
    result[usable[keep]] = lam + second[keep] / phi[keep]
    return result


def recover_potential(sol, lam: float, x_grid: Sequence[float], h: float = RECOVERY_STEP,
                      margin: float = RECOVERY_MARGIN) -> GridFunction:
    """
    q_eff(x) = lam + phi''(lam, x) / phi(lam, x) with phi'' from a five-point
    difference of the evaluated phi' (the differential equation is not used).

    Points near zeros of phi (|phi| < margin * max|phi|) or too close to the
    endpoints for the stencil are dropped from the returned grid.
    """
    xs = np.asarray(x_grid, dtype=float)
    values = _recovered_values(sol, lam, xs, h, margin)
    keep = np.isfinite(values)
    if not np.all(keep):
        logger.debug(f"Potential recovery skipped {np.count_nonzero(~keep)} points")
    grid = xs[keep]
    return GridFunction(grid, values[keep], float(grid[-1]) if grid.size else float(sol.potential.b))


def fit_bessel_index(sol, lam: float, x_grid: Sequence[float]) -> float:
    """Estimate l(l+1) as the x -> 0 intercept of x^2 * q_eff recovered from phi."""
    recovered = recover_potential(sol, lam, x_grid)
    x = recovered.grid
    return float(np.polyfit(x, x ** 2 * recovered.values, 2)[-1])


@dataclass
class UniquenessReport:
    measures_equal: bool
    measure_distance: float
    first_atom_distance: float
    eta: Optional[ShiftMap]
    slope_deviation: float
    potential_match: float
    density_error: float
    logderivative_error: float
    verdict: str
    index_fits: Tuple[float, ...] = ()
    # w1 / w2 at the lowest common atom, and the measure distance once m2 is scaled by it
    gauge_factor: float = 1.0
    aligned_distance: float = 0.0
    cartwright: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["eta"] = self.eta.to_dict() if self.eta is not None else None
        data["index_fits"] = list(self.index_fits)
        return data


DEFAULT_UNIQUENESS_TOLERANCES = {
    "measure": 1e-6,
    "slope": 1e-5,
    "density": 1e-5,
    "logderivative": 1e-5,
    "potential": 1e-4,
    "index": 1e-3,
}


def _interior_grid(sol, count: int = 19) -> np.ndarray:
    p = sol.potential
    return p.a + (p.b - p.a) * np.linspace(0.05, 0.95, count)


def cartwright_restriction(sol, radii: Sequence[float] = (10.0, 100.0, 1000.0)) -> Dict[str, Any]:
    """Growth diagnostics of E(., b) recorded with every report (heuristic)."""
    handle = DeBrangesSpaceHandle.for_solution(sol, sol.potential.b)
    diagnostics = cartwright_diagnostics(EntireFunctionSamples.for_debranges(handle), radii,
                                         np.linspace(-200.0, 200.0, 801))
    return {
        "order_estimate": diagnostics.order_estimate,
        "log_integral": diagnostics.log_integral,
        "log_integral_converged": diagnostics.log_integral_converged,
        "consistent": diagnostics.consistent,
        "note": diagnostics.note,
    }


def uniqueness_experiment(sol1, sol2, lambda_max: float = 400.0, right_bc_angle: float = 0.0,
                          x1_grid: Optional[Sequence[float]] = None, zeta: complex = 1j,
                          tolerances: Optional[Mapping[str, float]] = None,
                          measures: Optional[Tuple[SpectralMeasure, SpectralMeasure]] = None) -> UniquenessReport:
    """
    Compare two operators through their spectral measures and, when these
    agree, through the shift map and the identities it implies.
    """
    tol = dict(DEFAULT_UNIQUENESS_TOLERANCES)
    tol.update(tolerances or {})
    if measures is None:
        m1 = compute_measure(sol1, lambda_max, right_bc_angle)
        m2 = compute_measure(sol2, lambda_max, right_bc_angle)
    else:
        m1, m2 = measures
    comparison = compare_measures(m1, m2, weight_tol=tol["measure"])
    alignment = gauge_align(m1, m2)
    aligned = compare_measures(m1, alignment.measure, weight_tol=tol["measure"])
    gauge = {"gauge_factor": alignment.factor, "aligned_distance": aligned.distance}
    notes = ["bounded type is assumed from heuristic Cartwright diagnostics, not certified"]
    cartwright = cartwright_restriction(sol1)

    if not comparison.equal:
        if aligned.equal:
            notes.append(f"measures agree after scaling by {alignment.factor:.12g}; the normalizations differ")
        logger.info(f"Measures differ (distance {comparison.distance:.6g}); operators are distinct")
        nan = float("nan")
        return UniquenessReport(False, comparison.distance, comparison.first_atom_distance, None,
                                nan, nan, nan, nan, DISTINCT, cartwright=cartwright, tolerances=tol, notes=notes,
                                **gauge)

    grid = _interior_grid(sol1) if x1_grid is None else np.asarray(x1_grid, dtype=float)
    eta = detect_shift(sol1, sol2, grid, zeta)
    slope_deviation = abs(eta.slope - 1.0)
    density = check_density_identity(sol1, sol2, eta, zeta, [s[0] for s in eta.samples])

    # Below the ground state phi has no zeros
    lam_probe = float(m1.lambdas[0] - 1.0) if len(m1) else -1.0
    logderivative = check_logderivative_identity(sol1, sol2, eta, lam_probe, [s[0] for s in eta.samples])

    x1s = np.array([s[0] for s in eta.samples])
    x2s, inside = _mapped(sol2, eta, x1s)
    q1 = _recovered_values(sol1, lam_probe, x1s[inside], RECOVERY_STEP, RECOVERY_MARGIN)
    q2 = _recovered_values(sol2, lam_probe, x2s[inside], RECOVERY_STEP, RECOVERY_MARGIN)
    both = np.isfinite(q1) & np.isfinite(q2)
    potential_match = float(np.max(np.abs(q1[both] - q2[both]))) if np.any(both) else float("nan")
    potential_scale = 1.0 + float(np.max(np.abs(q1[both]))) if np.any(both) else 1.0

    passed = (
        not eta.saturated
        and eta.increasing
        and slope_deviation <= tol["slope"]
        and density.max_error <= tol["density"]
        and logderivative.max_error <= tol["logderivative"]
        and potential_match <= tol["potential"] * potential_scale
    )
    verdict = EQUAL_UP_TO_SHIFT if passed else INCONCLUSIVE
    logger.info(f"Uniqueness verdict: {verdict} (slope {eta.slope:.9f}, intercept {eta.intercept:.9f})")
    return UniquenessReport(True, comparison.distance, comparison.first_atom_distance, eta, slope_deviation,
                            potential_match, density.max_error, logderivative.max_error, verdict,
                            cartwright=cartwright, tolerances=tol, notes=notes, **gauge)


def bessel_uniqueness_experiment(p1: Potential, p2: Potential, lambda_max: float = 400.0,
                                 tolerances: Optional[Mapping[str, float]] = None) -> UniquenessReport:
    """
    Spectral comparison of two perturbed Bessel operators in the
    leading-coefficient gauge; when the measures agree, the indices are
    compared through the x -> 0 behaviour of the recovered potentials.
    """
    for p in (p1, p2):
        if p.kind is not PotentialKind.BESSEL:
            raise PotentialError("bessel_uniqueness_experiment needs two Bessel potentials")
    sol1, sol2 = phi_bessel(p1), phi_bessel(p2)
    m1 = compute_measure(sol1, lambda_max)
    m2 = compute_measure(sol2, lambda_max)
    report = uniqueness_experiment(sol1, sol2, lambda_max, tolerances=tolerances, measures=(m1, m2))
    if not report.measures_equal:
        return report

    lam_probe = float(m1.lambdas[0] - 1.0) if len(m1) else -1.0
    fits = []
    for sol in (sol1, sol2):
        xs = np.linspace(0.02, 0.2, 19) * min(1.0, sol.potential.b)
        fits.append(fit_bessel_index(sol, lam_probe, xs))
    report.index_fits = tuple(fits)
    if abs(fits[0] - fits[1]) > report.tolerances["index"] and report.verdict == EQUAL_UP_TO_SHIFT:
        report.verdict = INCONCLUSIVE
        report.notes.append("recovered Bessel indices disagree although the measures match")
    return report


@dataclass(frozen=True)
class CounterexampleResult:
    measure_original: SpectralMeasure
    measure_rescaled: SpectralMeasure
    measure_perturbed: SpectralMeasure
    g_used: RescalingFunction
    scale_factors: Tuple[float, ...]
    verified: bool
    g_order_estimate: float


def counterexample_forward(base, kappa: Mapping[int, float], lambda_max: float = 100.0,
                           max_degree: int = 64) -> CounterexampleResult:
    """
    Alter finitely many atom weights by kappa_n and exhibit the gauge g relating the measures.

    kappa maps 1-based atom indices to positive factors (indices absent keep
    factor 1). g interpolates ln(kappa_n)/2 at the altered atoms and 0 at all
    other atoms up to lambda_max, so exp(-2g) rho scales exactly the altered
    atoms by 1/kappa_n while rho_2 = kappa rho scales them by kappa_n.

    Raises:
        GaugeError: for non-positive kappa, unknown atom indices, or a
            polynomial degree beyond max_degree.
    """
    sol = phi_regular(base) if isinstance(base, Potential) else base
    rho = compute_measure(sol, lambda_max)
    n_atoms = len(rho)
    for index, factor in kappa.items():
        if not 1 <= index <= n_atoms:
            raise GaugeError(f"Atom index {index} outside 1..{n_atoms}")
        if not (factor > 0 and math.isfinite(factor)):
            raise GaugeError(f"kappa_{index} must be a positive real, got {factor}")

    factors = np.ones(n_atoms)
    for index, factor in kappa.items():
        factors[index - 1] = float(factor)

    if np.all(factors == 1.0):
        g = RescalingFunction.zero()
    else:
        g = RescalingFunction.interpolating(rho.lambdas, np.log(factors) / 2.0, max_degree=max_degree)

    rescaled = rescale_measure(rho, g)
    perturbed = SpectralMeasure.from_arrays(rho.lambdas, rho.weights * factors, rho.lambda_max,
                                            gauge=f"{rho.gauge} perturbed at {sorted(kappa)}")
    verified = bool(np.all(np.abs(rescaled.weights * factors - rho.weights) <= 1e-9 * rho.weights))

    exp_g = EntireFunctionSamples(lambda z: g.exp(z), "exp(g)", log_abs=lambda z: np.real(g(z)))
    order = cartwright_diagnostics(exp_g, (10.0, 100.0, 1000.0), np.linspace(-50.0, 50.0, 201)).order_estimate
    return CounterexampleResult(rho, rescaled, perturbed, g, tuple(factors.tolist()), verified, order)
