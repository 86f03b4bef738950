"""
Eigenvalues, spectral-measure atoms and the generalized Fourier transform.

For a bounded interval with a regular right endpoint the spectral measure of
the entire solution phi is purely atomic:

    rho = sum_n w_n delta_{lambda_n},   w_n = 1 / int_a^b |phi(lambda_n, x)|^2 dx,

and f -> f^(z) = int phi(z, x) f(x) dx is unitary onto L^2(rho). Eigenvalues
are bracketed by counting windings of the scaled Prufer angle and polished
by a vectorized Illinois iteration.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import BarycentricInterpolator

from debranges_lab.errors import BracketError, IntegrationError, QuadratureError
from debranges_lab.logging_utils import get_logger

logger = get_logger("spectral_measure")

PRUFER_RTOL = 1e-11
PRUFER_ATOL = 1e-12
POLISH_RTOL = 1e-13
MAX_POLISH_ITERATIONS = 80
MAX_BISECTION_DEPTH = 50
# Atom alignment tolerance is LAMBDA_MATCH_TOL * (1 + |lambda|)
LAMBDA_MATCH_TOL = 1e-6
# Slack for atoms polished slightly above lambda_max
LAMBDA_MAX_SLACK = 1e-8


@dataclass(frozen=True)
class SpectralMeasure:
    """Truncated atomic measure, atoms as (lambda, weight) pairs sorted by lambda."""
    atoms: Tuple[Tuple[float, float], ...]
    lambda_max: float
    gauge: str = "unspecified"

    def __post_init__(self):
        lams = [lam for lam, _ in self.atoms]
        weights = [w for _, w in self.atoms]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("Measure atoms must be strictly increasing in lambda")
        if lams and lams[-1] > self.lambda_max + LAMBDA_MAX_SLACK * (1.0 + abs(self.lambda_max)):
            raise ValueError(f"Atom {lams[-1]} exceeds lambda_max={self.lambda_max}")
        if not all(math.isfinite(w) and w > 0.0 for w in weights):
            raise ValueError("Measure weights must be finite and strictly positive")

    @classmethod
    def from_arrays(cls, lambdas: Sequence[float], weights: Sequence[float], lambda_max: float,
                    gauge: str = "unspecified") -> "SpectralMeasure":
        atoms = tuple((float(l), float(w)) for l, w in zip(lambdas, weights))
        return cls(atoms=atoms, lambda_max=float(lambda_max), gauge=gauge)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def __len__(self) -> int:
        return len(self.atoms)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gauge": self.gauge,
            "lambda_max": self.lambda_max,
            "atoms": [{"lambda": lam, "weight": w} for lam, w in self.atoms],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SpectralMeasure":
        atoms = tuple((float(a["lambda"]), float(a["weight"])) for a in data["atoms"])
        return cls(atoms=atoms, lambda_max=float(data["lambda_max"]), gauge=str(data.get("gauge", "unspecified")))


@dataclass(eq=False)
class GridFunction:
    """Samples of f on a quadrature grid in (a, c]."""
    grid: np.ndarray
    values: np.ndarray
    c: float
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("Grid and values must be one-dimensional arrays of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("Grid must be strictly increasing")
        if self.grid.size and self.grid[-1] > self.c:
            raise ValueError(f"Grid extends beyond its support edge c={self.c}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Grid function values must be finite")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], a: float, c: float,
                      panel_width: float = 0.05, order: int = 8,
                      breakpoints: Sequence[float] = ()) -> "GridFunction":
        """Sample func at the nodes of a composite Gauss-Legendre rule on (a, c)."""
        edges = sorted({float(a), float(c)} | {float(p) for p in breakpoints if a < p < c})
        t, w = np.polynomial.legendre.leggauss(order)
        nodes, weights = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            count = max(1, int(math.ceil((hi - lo) / panel_width)))
            panel_edges = np.linspace(lo, hi, count + 1)
            half = np.diff(panel_edges) / 2.0
            nodes.append((panel_edges[:-1, None] + (t[None, :] + 1.0) * half[:, None]).ravel())
            weights.append((w[None, :] * half[:, None]).ravel())
        grid = np.concatenate(nodes)
        return cls(grid=grid, values=np.asarray(func(grid)), c=float(c), weights=np.concatenate(weights))

    def quadrature_weights(self) -> np.ndarray:
        if self.weights is not None:
            return self.weights
        if self.grid.size < 2:
            return np.zeros(self.grid.shape)
        dx = np.diff(self.grid)
        w = np.zeros(self.grid.shape)
        w[:-1] += dx / 2.0
        w[1:] += dx / 2.0
        return w

    def inner(self, other: "GridFunction") -> complex:
        """<f, g> = int f conj(g), on a shared grid."""
        if other.grid.shape != self.grid.shape or not np.allclose(other.grid, self.grid):
            raise ValueError("Inner products need a shared grid")
        return complex(np.sum(self.quadrature_weights() * self.values * np.conj(other.values)))

    def norm_squared(self) -> float:
        return float(np.sum(self.quadrature_weights() * np.abs(self.values) ** 2))

    def truncated(self, c: float) -> "GridFunction":
        """f * 1_(a, c) on the same grid."""
        values = np.where(self.grid <= c, self.values, 0.0)
        return GridFunction(self.grid, values, max(float(c), float(self.grid[-1])), self.weights)

    def to_frame_columns(self) -> Dict[str, np.ndarray]:
        return {"x": self.grid, "re": np.real(self.values), "im": np.imag(self.values)}


@dataclass(eq=False)
class TransformedFunction:
    """
    f^ with exact values at the transform points (usually measure atoms).

    Off the points, f^ is evaluated by quadrature; `interpolant` is a
    barycentric interpolant through real points for display only.
    """
    points: np.ndarray
    atom_values: np.ndarray
    sol: Any = field(repr=False)
    f: GridFunction = field(repr=False)

    def __call__(self, z) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(z))
        result = np.empty(zs.shape, dtype=complex)
        lookup = {complex(p): v for p, v in zip(self.points, self.atom_values)}
        missing = []
        for i, value in enumerate(zs):
            hit = lookup.get(complex(value))
            if hit is None:
                missing.append(i)
            else:
                result[i] = hit
        if missing:
            result[missing] = transform_values(self.sol, self.f, zs[missing])
        return result

    def interpolant(self) -> BarycentricInterpolator:
        real = np.isreal(self.points)
        return BarycentricInterpolator(np.real(self.points[real]), self.atom_values[real])

    def display_samples(self, count: int = 200) -> Tuple[np.ndarray, np.ndarray]:
        """(lambda grid, interpolant values) spanning the real transform points."""
        real = np.real(self.points[np.isreal(self.points)])
        if real.size < 2:
            return real, self.atom_values[np.isreal(self.points)]
        grid = np.linspace(real.min(), real.max(), count)
        return grid, np.asarray(self.interpolant()(grid), dtype=complex)


def _prufer_end(sol, lams: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """Scaled Prufer angle theta(b) for each (lambda, k), integrated in one vectorized solve."""
    theta0 = sol.prufer_start(lams, ks)
    p = sol.potential

    def rhs(x, theta):
        s = np.sin(theta)
        c = np.cos(theta)
        return ks * c * c + (lams - float(p.effective(x))) / ks * s * s

    result = integrate.solve_ivp(rhs, (sol.x_start, p.b), theta0, method="DOP853",
                                 rtol=PRUFER_RTOL, atol=PRUFER_ATOL)
    if not result.success:
        raise IntegrationError(f"Prufer integration failed: {result.message}", x=float(result.t[-1]))
    return result.y[:, -1]


def _boundary_angle(ks: np.ndarray, angle: float) -> np.ndarray:
    return np.arctan2(ks * math.sin(angle), math.cos(angle))


def _count(sol, lams: np.ndarray, ks: np.ndarray, angle: float) -> np.ndarray:
    total = _prufer_end(sol, lams, ks) + _boundary_angle(ks, angle)
    return np.floor(total / math.pi).astype(int)


def _k_floor(sol) -> float:
    return math.pi / (2.0 * (sol.potential.b - sol.potential.a))


def _scale(lams: np.ndarray, k_floor: float) -> np.ndarray:
    return np.sqrt(np.maximum(lams, k_floor ** 2))


def eigenvalue_count(sol, lam: float, right_bc_angle: float = 0.0) -> int:
    """Number of eigenvalues <= lam from the Prufer winding at b."""
    lams = np.array([float(lam)])
    return int(_count(sol, lams, _scale(lams, _k_floor(sol)), right_bc_angle)[0])


def _lower_bound(sol, right_bc_angle: float) -> float:
    p = sol.potential
    xs = np.linspace(sol.x_start, p.b, 257)
    lam = min(-1.0, float(np.min(p.effective(xs))) - 1.0)
    for _ in range(60):
        if eigenvalue_count(sol, lam, right_bc_angle) == 0:
            return lam
        lam = 2.0 * lam - 1.0
    raise BracketError("No eigenvalue-free lower bound found", found=[])


def _scan_grid(sol, lam_low: float, lam_top: float) -> np.ndarray:
    dk = _k_floor(sol)
    if lam_top <= 0.0:
        return np.linspace(lam_low, lam_top, max(3, min(400, int(math.ceil((lam_top - lam_low) / dk ** 2)) + 2)))
    negative = np.linspace(lam_low, 0.0, max(3, min(400, int(math.ceil(-lam_low / dk ** 2)) + 2)))
    ks = np.arange(dk, math.sqrt(lam_top), dk)
    return np.unique(np.concatenate((negative, ks ** 2, [lam_top])))


def _polish(sol, lo: np.ndarray, hi: np.ndarray, index: np.ndarray, angle: float) -> np.ndarray:
    """Simultaneous Illinois iteration on theta(b) + beta_k - n*pi over all brackets."""
    ks = _scale(hi, _k_floor(sol))
    shift = _boundary_angle(ks, angle) - index * math.pi

    def residual(lams, mask):
        return _prufer_end(sol, lams, ks[mask]) + shift[mask]

    everything = np.ones(lo.shape, dtype=bool)
    f_lo = residual(lo, everything)
    f_hi = residual(hi, everything)
    root = hi.copy()
    active = everything.copy()
    side = np.zeros(lo.shape, dtype=int)

    for _ in range(MAX_POLISH_ITERATIONS):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        denom = f_hi[idx] - f_lo[idx]
        guess = hi[idx] - f_hi[idx] * (hi[idx] - lo[idx]) / np.where(denom == 0, 1.0, denom)
        bad = (denom == 0) | ~(guess > lo[idx]) | ~(guess < hi[idx])
        guess = np.where(bad, 0.5 * (lo[idx] + hi[idx]), guess)
        mask = np.zeros(lo.shape, dtype=bool)
        mask[idx] = True
        f_guess = residual(guess, mask)
        root[idx] = guess

        upper = f_guess >= 0
        for j, k in enumerate(idx):
            if upper[j]:
                hi[k], f_hi[k] = guess[j], f_guess[j]
                if side[k] == 1:
                    f_lo[k] *= 0.5
                side[k] = 1
            else:
                lo[k], f_lo[k] = guess[j], f_guess[j]
                if side[k] == -1:
                    f_hi[k] *= 0.5
                side[k] = -1
        width = hi[idx] - lo[idx]
        done = (width <= POLISH_RTOL * (1.0 + np.abs(guess))) | (np.abs(f_guess) <= 1e-14)
        active[idx[done]] = False
    return root


def eigenvalues(sol, right_bc_angle: float = 0.0, lambda_max: float = 400.0) -> List[float]:
    """
    All eigenvalues <= lambda_max of the operator with boundary condition
    cos(angle) phi(b) + sin(angle) phi'(b) = 0 at b.

    Raises:
        BracketError: if brackets cannot be separated or the number of roots
            disagrees with the oscillation count; `found` holds the prefix.
    """
    lam_top = lambda_max + 1e-7 * (1.0 + abs(lambda_max))
    cutoff = lambda_max + 1e-9 * (1.0 + abs(lambda_max))
    lam_low = _lower_bound(sol, right_bc_angle)
    if lam_top <= lam_low:
        return []

    grid = _scan_grid(sol, lam_low, lam_top)
    k_floor = _k_floor(sol)
    counts = _count(sol, grid, _scale(grid, k_floor), right_bc_angle)
    total = int(counts[-1])

    cells: List[Tuple[float, float, int]] = []
    pending = [(grid[i], grid[i + 1], int(counts[i]), int(counts[i + 1]))
               for i in range(grid.size - 1) if counts[i + 1] > counts[i]]
    depth = 0
    while pending:
        split = [cell for cell in pending if cell[3] - cell[2] > 1]
        cells.extend((lo, hi, n_hi) for lo, hi, n_lo, n_hi in pending if n_hi - n_lo == 1)
        if not split:
            break
        depth += 1
        if depth > MAX_BISECTION_DEPTH:
            found = sorted(hi for _, hi, _ in cells)
            raise BracketError("Could not separate clustered eigenvalues", found=found)
        mids = np.array([(lo + hi) / 2.0 for lo, hi, _, _ in split])
        mid_counts = _count(sol, mids, _scale(mids, k_floor), right_bc_angle)
        pending = []
        for (lo, hi, n_lo, n_hi), mid, n_mid in zip(split, mids, mid_counts):
            if n_mid > n_lo:
                pending.append((lo, mid, n_lo, int(n_mid)))
            if n_hi > n_mid:
                pending.append((mid, hi, int(n_mid), n_hi))

    if not cells:
        return []
    cells.sort()
    lo = np.array([c[0] for c in cells])
    hi = np.array([c[1] for c in cells])
    index = np.array([c[2] for c in cells], dtype=float)
    roots = np.sort(_polish(sol, lo, hi, index, right_bc_angle))

    if roots.size != total - int(counts[0]):
        raise BracketError(f"Found {roots.size} eigenvalues but the oscillation count is {total}",
                           found=roots.tolist())
    kept = [float(r) for r in roots if r <= cutoff]
    logger.debug(f"{len(kept)} eigenvalues below {lambda_max:g} for {sol.potential.description}")
    return kept


def atom_weights(sol, eigenvalue_list: Sequence[float], b: Optional[float] = None) -> np.ndarray:
    """w_n = 1 / int_a^b |phi(lambda_n, x)|^2 dx."""
    lams = np.asarray(eigenvalue_list, dtype=float)
    if lams.size == 0:
        return np.zeros(0)
    b = sol.potential.b if b is None else float(b)
    norms = np.asarray(sol.norm_squared_batch(lams, b), dtype=float)
    bad = ~np.isfinite(norms) | (norms <= 0.0)
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise QuadratureError(f"Norm integral failed for atom lambda={lams[first]:.10g}",
                              partial_value=float(norms[first]) if np.isfinite(norms[first]) else float("nan"),
                              error_estimate=float("inf"))
    return 1.0 / norms


def compute_measure(sol, lambda_max: float, right_bc_angle: float = 0.0) -> SpectralMeasure:
    """Eigenvalues and weights up to lambda_max, tagged with the solution's normalization."""
    lams = eigenvalues(sol, right_bc_angle, lambda_max)
    weights = atom_weights(sol, lams)
    return SpectralMeasure.from_arrays(lams, weights, lambda_max, gauge=sol.normalization)


def _check_support(sol, f: GridFunction) -> None:
    if f.grid.size and f.grid[0] <= sol.potential.a:
        raise ValueError("Grid function must be supported inside (a, c]")
    if f.c > sol.potential.b:
        raise ValueError("Grid function support exceeds the interval")


def transform_values(sol, f: GridFunction, zs) -> np.ndarray:
    """f^(z) = int phi(z, x) f(x) dx on f's quadrature grid."""
    zs = np.atleast_1d(np.asarray(zs))
    if zs.size == 0 or not np.any(f.values):
        return np.zeros(zs.shape, dtype=complex)
    phi, _ = sol.evaluate_batch(zs, f.grid)
    return phi @ (f.quadrature_weights() * f.values)


def transform(sol, f: GridFunction, z_set) -> TransformedFunction:
    """Transform of f with exact values stored at z_set."""
    _check_support(sol, f)
    points = np.atleast_1d(np.asarray(z_set))
    return TransformedFunction(points=points, atom_values=np.asarray(transform_values(sol, f, points), dtype=complex),
                               sol=sol, f=f)


@dataclass(frozen=True)
class ParsevalResult:
    relative_error: float
    atom_sum: float
    l2_norm_squared: float
    tail_ratio: float
    conclusive: bool


def _tail_ratio(contributions: np.ndarray) -> Tuple[float, float]:
    """(sum of the last quarter, ratio to the quarter before it)."""
    n = contributions.size
    if n < 8:
        return float(np.sum(contributions[-1:])), 0.0
    quarter = n // 4
    last = float(np.sum(contributions[-quarter:]))
    previous = float(np.sum(contributions[-2 * quarter:-quarter]))
    return last, (last / previous if previous > 0 else (0.0 if last == 0 else float("inf")))


def parseval_check(measure: SpectralMeasure, sol, f: GridFunction) -> ParsevalResult:
    """
    Compare sum |f^(lambda_n)|^2 w_n with int |f|^2.

    The verdict is inconclusive when the atom contributions do not decay
    over the last quarter of the truncated spectrum.
    """
    l2 = f.norm_squared()
    fhat = transform(sol, f, measure.lambdas).atom_values
    contributions = np.abs(fhat) ** 2 * measure.weights
    atom_sum = float(np.sum(contributions))
    last, ratio = _tail_ratio(contributions)
    relative_error = abs(atom_sum - l2) / l2 if l2 > 0 else abs(atom_sum)
    conclusive = ratio <= 1.0 or last <= 1e-12 * max(l2, 1e-300)
    return ParsevalResult(relative_error, atom_sum, l2, ratio, conclusive)


def unitarity_check(measure: SpectralMeasure, sol, f: GridFunction, g: GridFunction) -> float:
    """Relative deviation between <f, g> and sum f^ conj(g^) w_n."""
    direct = f.inner(g)
    fhat = transform(sol, f, measure.lambdas).atom_values
    ghat = transform(sol, g, measure.lambdas).atom_values
    spectral = complex(np.sum(fhat * np.conj(ghat) * measure.weights))
    scale = math.sqrt(f.norm_squared() * g.norm_squared())
    return abs(spectral - direct) / scale if scale > 0 else abs(spectral)


def inverse_transform(measure: SpectralMeasure, sol, fhat_atoms: Sequence[complex], grid) -> GridFunction:
    """f(x) = sum_n f^(lambda_n) phi(lambda_n, x) w_n on the grid."""
    xs = np.asarray(grid, dtype=float)
    coeffs = np.asarray(fhat_atoms) * measure.weights if len(measure) else np.zeros(0)
    if coeffs.size == 0 or not np.any(coeffs):
        return GridFunction(xs, np.zeros(xs.shape), float(xs[-1]))
    phi, _ = sol.evaluate_batch(measure.lambdas, xs)
    values = coeffs @ phi
    if np.all(np.imag(values) == 0):
        values = np.real(values)
    return GridFunction(xs, values, float(xs[-1]))


def rescale_measure(measure: SpectralMeasure, g) -> SpectralMeasure:
    """w_n -> exp(-2 g(lambda_n)) w_n; lambdas unchanged."""
    if g.is_zero:
        return measure
    factors = np.real(g.exp(measure.lambdas, sign=-2.0)) if len(measure) else np.zeros(0)
    return SpectralMeasure.from_arrays(measure.lambdas, measure.weights * factors, measure.lambda_max,
                                       gauge=f"{measure.gauge} * exp(-2g)")


@dataclass(frozen=True)
class MeasureComparison:
    matched: int
    unmatched_first: int
    unmatched_second: int
    first_atom_distance: float
    max_lambda_deviation: float
    max_weight_deviation: float
    gauge_factor: float
    distance: float
    equal: bool


def _align(m1: SpectralMeasure, m2: SpectralMeasure, tol: float) -> List[Tuple[int, int]]:
    pairs = []
    i = j = 0
    l1, l2 = m1.lambdas, m2.lambdas
    while i < l1.size and j < l2.size:
        if abs(l1[i] - l2[j]) <= tol * (1.0 + abs(l1[i])):
            pairs.append((i, j))
            i += 1
            j += 1
        elif l1[i] < l2[j]:
            i += 1
        else:
            j += 1
    return pairs


def measure_distance(m1: SpectralMeasure, m2: SpectralMeasure) -> float:
    """Largest index-aligned deviation, absolute in lambda and relative in weight."""
    n = min(len(m1), len(m2))
    if n == 0:
        return 0.0 if len(m1) == len(m2) else float("inf")
    dl = np.abs(m1.lambdas[:n] - m2.lambdas[:n])
    w1, w2 = m1.weights[:n], m2.weights[:n]
    dw = np.abs(w1 - w2) / np.maximum(w1, w2)
    return float(max(np.max(dl), np.max(dw)))


def compare_measures(m1: SpectralMeasure, m2: SpectralMeasure, lambda_tol: float = LAMBDA_MATCH_TOL,
                     weight_tol: float = 1e-6) -> MeasureComparison:
    """Align atoms and report eigenvalue and weight discrepancies; gauge is reported, not absorbed."""
    pairs = _align(m1, m2, lambda_tol)
    if pairs:
        i, j = np.array(pairs).T
        dl = float(np.max(np.abs(m1.lambdas[i] - m2.lambdas[j])))
        w1, w2 = m1.weights[i], m2.weights[j]
        dw = float(np.max(np.abs(w1 - w2) / np.maximum(w1, w2)))
        gauge = float(w2[0] / w1[0])
    else:
        dl = dw = float("nan")
        gauge = float("nan")
    first = abs(m1.atoms[0][0] - m2.atoms[0][0]) if len(m1) and len(m2) else float("inf")
    if not len(m1) and not len(m2):
        first = 0.0
    unmatched_1 = len(m1) - len(pairs)
    unmatched_2 = len(m2) - len(pairs)
    equal = unmatched_1 == 0 and unmatched_2 == 0 and (not pairs or dw <= weight_tol)
    return MeasureComparison(len(pairs), unmatched_1, unmatched_2, first, dl, dw, gauge,
                             measure_distance(m1, m2), equal)


@dataclass(frozen=True)
class GaugeAlignment:
    measure: SpectralMeasure
    factor: float


def gauge_align(reference: SpectralMeasure, other: SpectralMeasure,
                lambda_tol: float = LAMBDA_MATCH_TOL) -> GaugeAlignment:
    """Scale `other` by a constant so its lowest common atom matches `reference`; return the factor used."""
    pairs = _align(reference, other, lambda_tol)
    if not pairs:
        return GaugeAlignment(other, 1.0)
    i, j = pairs[0]
    factor = reference.weights[i] / other.weights[j]
    aligned = SpectralMeasure.from_arrays(other.lambdas, other.weights * factor, other.lambda_max,
                                          gauge=f"{other.gauge} aligned to {reference.gauge}")
    return GaugeAlignment(aligned, float(factor))


def density_profile(measure: SpectralMeasure, sol, f: GridFunction, c_values: Sequence[float]) -> List[Tuple[float, float]]:
    """Relative L^2 error of the round trip of f * 1_(a, c) against f, for each c."""
    norm = math.sqrt(f.norm_squared())
    weights = f.quadrature_weights()
    profile = []
    for c in c_values:
        truncated = f.truncated(float(c))
        fhat = transform_values(sol, truncated, measure.lambdas)
        rebuilt = inverse_transform(measure, sol, fhat, f.grid)
        error = math.sqrt(float(np.sum(weights * np.abs(f.values - rebuilt.values) ** 2))) / norm
        profile.append((float(c), error))
    return profile


def bump_probe(center: float, half_width: float, amplitude: float = 1.0, lower: Optional[float] = None,
               upper: Optional[float] = None, panel_width: float = 0.05) -> GridFunction:
    """amplitude * (1 - t^2)^6 with t = (x - center) / half_width, sampled on its support."""
    lo = center - half_width if lower is None else max(lower, center - half_width)
    hi = center + half_width if upper is None else min(upper, center + half_width)

    def bump(x):
        t = (x - center) / half_width
        return np.where(np.abs(t) < 1.0, amplitude * (1.0 - t * t) ** 6, 0.0)

    return GridFunction.from_function(bump, lo, hi, panel_width=panel_width)


def random_probes(rng: np.random.Generator, lower: float, upper: float, count: int,
                  half_width_range: Tuple[float, float] = (0.6, 1.2)) -> List[GridFunction]:
    """Seeded smooth compactly supported probes inside (lower, upper)."""
    probes = []
    max_half = 0.45 * (upper - lower)
    for _ in range(count):
        half = min(rng.uniform(*half_width_range), max_half)
        center = rng.uniform(lower + half, upper - half)
        amplitude = rng.uniform(0.5, 2.0)
        probes.append(bump_probe(center, half, amplitude))
    return probes
