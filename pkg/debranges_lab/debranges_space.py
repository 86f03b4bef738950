"""
de Branges functions, reproducing kernels and space diagnostics.

E(z, c) = phi(z, c) + i phi'(z, c) is a de Branges function for every c in
(a, b). Its space B(c) carries the norm

    ||F||^2 = (1/pi) int |F(lambda)|^2 / |E(lambda, c)|^2 d lambda

and the reproducing kernel has two independent representations: the
formula in E, and the integral int_a^c conj(phi(zeta, x)) phi(z, x) dx.
Growth diagnostics (mean type, order, logarithmic integral) are heuristic
and never certify bounded type.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

from debranges_lab.errors import QuadratureError, TailDivergenceError
from debranges_lab.logging_utils import get_logger
from debranges_lab.spectral_measure import GridFunction, transform_values

logger = get_logger("debranges_space")

KERNEL_LIMIT_RADIUS = 1e-6
DEFAULT_LIMIT_STEP = 1e-4
INNER_PRODUCT_REL_TOL = 1e-8
INNER_PRODUCT_MAX_K = 128.0
# Negative-axis cutoff s*c keeping e^(s c) representable
NEGATIVE_AXIS_EXPONENT = 600.0
GAUSS_ORDER = 10
# Negative-axis ladder t_j = (DIAGONAL_LADDER_START / L) 2^j used to order spaces of different operators
DIAGONAL_LADDER_START = 4.0
DIAGONAL_LADDER_RUNGS = 6

FIRST_IN_SECOND = "h1 in h2"
SECOND_IN_FIRST = "h2 in h1"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class EntireFunctionSamples:
    """An entire function given by a vectorized evaluator, optionally with an overflow-free log|F|."""
    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    label: str = "F"
    log_abs: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(z)))

    def log_modulus(self, z) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(z))
        if self.log_abs is not None:
            return np.asarray(self.log_abs(zs), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(zs)))

    @classmethod
    def from_transform(cls, sol, f: GridFunction, label: str = "f^") -> "EntireFunctionSamples":
        return cls(lambda z: transform_values(sol, f, np.atleast_1d(z)), label)

    @classmethod
    def kernel(cls, handle: "DeBrangesSpaceHandle", zeta: complex) -> "EntireFunctionSamples":
        """z -> K(zeta, z)."""
        return cls(lambda z: kernel_values(handle, np.full(np.shape(np.atleast_1d(z)), zeta), np.atleast_1d(z)),
                   f"K({zeta}, .)")

    @classmethod
    def for_debranges(cls, handle: "DeBrangesSpaceHandle") -> "EntireFunctionSamples":
        return cls(handle.E, f"E({handle.label})", handle.log_abs_E)


class DeBrangesSpaceHandle:
    """
    Space B(c) of a solution, or a synthetic space given by an explicit E.

    For solution-backed handles E(z) = phi(z, c) + i phi'(z, c).
    """

    def __init__(self, E: Callable[[np.ndarray], np.ndarray], label: str, solution=None,
                 c: Optional[float] = None, log_abs: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 limit_step: float = DEFAULT_LIMIT_STEP):
        self._E = E
        self.label = label
        self.solution = solution
        self.c = c
        self._log_abs = log_abs
        self.limit_step = limit_step

    @classmethod
    def for_solution(cls, sol, c: float, limit_step: float = DEFAULT_LIMIT_STEP) -> "DeBrangesSpaceHandle":
        if not sol.potential.contains(c, allow_endpoints=True) or c <= sol.potential.a:
            raise ValueError(f"c={c} must lie in ({sol.potential.a}, {sol.potential.b}]")

        def E(zs):
            phi, dphi = sol.evaluate_batch(np.atleast_1d(zs), [c])
            return phi[:, 0] + 1j * dphi[:, 0]

        return cls(E, f"B({c:g}) of {sol.potential.description}", solution=sol, c=float(c),
                   log_abs=lambda zs: sol.log_abs_E_batch(zs, c), limit_step=limit_step)

    @classmethod
    def synthetic(cls, E: Callable[[np.ndarray], np.ndarray], label: str) -> "DeBrangesSpaceHandle":
        return cls(E, label)

    def __repr__(self) -> str:
        return f"DeBrangesSpaceHandle({self.label!r})"

    def E(self, z) -> np.ndarray:
        return np.asarray(self._E(np.atleast_1d(np.asarray(z))), dtype=complex)

    def E_sharp(self, z) -> np.ndarray:
        return np.conj(self.E(np.conj(np.atleast_1d(z))))

    def log_abs_E(self, z) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(z))
        if self._log_abs is not None:
            return np.asarray(self._log_abs(zs), dtype=float)
        return np.log(np.abs(self.E(zs)))

    def kernel(self, zeta: complex, z: complex) -> complex:
        return kernel_formula(self, zeta, z)


def debranges_function(sol, c: float, z: complex) -> complex:
    """E(z, c) = phi(z, c) + i phi'(z, c)."""
    phi, dphi = sol.evaluate(z, [c])
    return complex(phi[0] + 1j * dphi[0])


def _derivative(handle: DeBrangesSpaceHandle, zs: np.ndarray) -> np.ndarray:
    """E'(z) by the five-point central difference with step limit_step * (1 + |z|)."""
    h = handle.limit_step * (1.0 + np.abs(zs))
    offsets = np.array([-2.0, -1.0, 1.0, 2.0])
    stencil = (zs[:, None] + offsets[None, :] * h[:, None]).ravel()
    values = handle.E(stencil).reshape(zs.size, 4)
    return (values[:, 0] - 8.0 * values[:, 1] + 8.0 * values[:, 2] - values[:, 3]) / (12.0 * h)


def kernel_values(handle: DeBrangesSpaceHandle, zetas, zs) -> np.ndarray:
    """
    Elementwise K(zeta, z) = (E(z) E#(zeta*) - E(zeta*) E#(z)) / (2i (zeta* - z)).

    Entries with |zeta* - z| below KERNEL_LIMIT_RADIUS use the diagonal limit
    (E(z) E#'(z) - E'(z) E#(z)) / (2i).
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    zetas, zs = np.broadcast_arrays(zetas, zs)
    w = np.conj(zetas)
    gap = w - zs
    limit = np.abs(gap) < KERNEL_LIMIT_RADIUS
    result = np.empty(zs.shape, dtype=complex)

    regular = ~limit
    if np.any(regular):
        z_r, zeta_r, w_r = zs[regular], zetas[regular], w[regular]
        points = np.concatenate((z_r, np.conj(z_r), zeta_r, w_r))
        values = handle.E(points)
        n = z_r.size
        E_z, E_zbar, E_zeta, E_w = values[:n], values[n:2 * n], values[2 * n:3 * n], values[3 * n:]
        numerator = E_z * np.conj(E_zeta) - E_w * np.conj(E_zbar)
        result[regular] = numerator / (2j * gap[regular])

    if np.any(limit):
        z_l = zs[limit]
        E_z = handle.E(z_l)
        E_zbar = handle.E(np.conj(z_l))
        dE_z = _derivative(handle, z_l)
        dE_zbar = _derivative(handle, np.conj(z_l))
        result[limit] = (E_z * np.conj(dE_zbar) - dE_z * np.conj(E_zbar)) / 2j
    return result


def kernel_formula(handle: DeBrangesSpaceHandle, zeta: complex, z: complex) -> complex:
    """Reproducing kernel K(zeta, z) from E, with the difference-quotient limit near zeta* = z."""
    return complex(kernel_values(handle, [zeta], [z])[0])


def kernel_integral(sol, c: float, zeta: complex, z: complex, epsrel: float = 1e-10) -> complex:
    """
    K(zeta, z, c) = int_a^c conj(phi(zeta, x)) phi(z, x) dx by adaptive quadrature.

    The near-field/far-field junction is passed as a breakpoint for Bessel kind.

    Raises:
        QuadratureError: with the partial value when the error estimate stays large.
    """
    a = sol.potential.a

    def integrand(x):
        phi_zeta, _ = sol.evaluate(zeta, [x])
        phi_z, _ = sol.evaluate(z, [x])
        value = np.conj(phi_zeta[0]) * phi_z[0]
        return np.array([value.real, value.imag])

    points = [sol.x_start] if a < sol.x_start < c else None
    value, error, info = integrate.quad_vec(integrand, a, c, epsabs=1e-14, epsrel=epsrel,
                                            points=points, full_output=True)
    result = complex(value[0], value[1])
    if not info.success and error > 1e3 * epsrel * max(abs(result), 1e-300):
        raise QuadratureError(f"Kernel quadrature did not converge: {info.message}", result, float(error))
    return result


def kernel_diagonal_profile(sol, zeta: complex, xs) -> np.ndarray:
    """x -> K(zeta, zeta, x), from the norm carried along with the solution."""
    return sol.norm_profile(zeta, xs)


@dataclass(frozen=True)
class InnerProductResult:
    value: complex
    octaves: Tuple[complex, ...]
    extrapolated_tail: complex
    converged: bool


def _segment(handle: DeBrangesSpaceHandle, F, G, lo: float, hi: float, side: int, width: float) -> complex:
    """Composite Gauss-Legendre piece of the inner product over k in [lo, hi], lambda = side * k^2."""
    count = max(1, int(math.ceil((hi - lo) / width)))
    t, w = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    edges = np.linspace(lo, hi, count + 1)
    half = np.diff(edges) / 2.0
    ks = (edges[:-1, None] + (t[None, :] + 1.0) * half[:, None]).ravel()
    weights = (w[None, :] * half[:, None]).ravel()
    lams = side * ks ** 2
    modulus = np.exp(handle.log_abs_E(lams))
    f_part = F(lams) / modulus
    g_part = G(lams) / modulus if G is not F else f_part
    integrand = f_part * np.conj(g_part) * 2.0 * ks
    return complex(np.sum(weights * integrand)) / math.pi


def bspace_inner_product_detailed(handle: DeBrangesSpaceHandle, F: EntireFunctionSamples, G: EntireFunctionSamples,
                                  rel_tol: float = INNER_PRODUCT_REL_TOL,
                                  max_k: float = INNER_PRODUCT_MAX_K) -> InnerProductResult:
    """
    (1/pi) int F conj(G) / |E|^2 over the real line.

    Integrated in k = sqrt(lambda) and s = sqrt(-lambda) octave by octave,
    with panels of width pi/(2c). Integration stops when the last octave is
    below rel_tol of the accumulated value; at the cutoff the remaining tail
    is extrapolated geometrically from the last two octaves.

    Raises:
        TailDivergenceError: if octave contributions do not decay.
    """
    c = handle.c if handle.c else 1.0
    width = math.pi / (2.0 * c)
    caps = {1: max_k, -1: min(max_k, NEGATIVE_AXIS_EXPONENT / c)}

    total = _segment(handle, F, G, 0.0, 1.0, 1, width) + _segment(handle, F, G, 0.0, min(1.0, caps[-1]), -1, width)
    octaves: List[complex] = []
    tail = 0.0j
    converged = True

    for side in (1, -1):
        history: List[complex] = []
        lo = 1.0
        while lo < caps[side]:
            hi = min(2.0 * lo, caps[side])
            piece = _segment(handle, F, G, lo, hi, side, width)
            history.append(piece)
            octaves.append(piece)
            total += piece
            scale = max(abs(total), 1e-300)
            if abs(piece) < rel_tol * scale:
                break
            if len(history) >= 3 and abs(history[-1]) > abs(history[-2]) > abs(history[-3]):
                raise TailDivergenceError(
                    f"Inner-product integrand does not decay on the {'positive' if side > 0 else 'negative'} axis",
                    contributions=[abs(v) for v in history],
                )
            lo = hi
        else:
            last = history[-1] if history else 0.0j
            if abs(last) >= rel_tol * max(abs(total), 1e-300):
                ratio = last / history[-2] if len(history) >= 2 and history[-2] != 0 else 1.0
                if abs(ratio) >= 1.0:
                    raise TailDivergenceError("Inner-product tail is not decaying at the cutoff",
                                              contributions=[abs(v) for v in history])
                tail += last * ratio / (1.0 - ratio)
                converged = False

    return InnerProductResult(total + tail, tuple(octaves), tail, converged)


def bspace_inner_product(handle: DeBrangesSpaceHandle, F: EntireFunctionSamples, G: EntireFunctionSamples,
                         rel_tol: float = INNER_PRODUCT_REL_TOL, max_k: float = INNER_PRODUCT_MAX_K) -> complex:
    """<F, G> in B(c); see bspace_inner_product_detailed."""
    return bspace_inner_product_detailed(handle, F, G, rel_tol, max_k).value


@dataclass(frozen=True)
class MeanTypeEstimate:
    estimate: float
    trend: float
    y_values: Tuple[float, ...]
    ratios: Tuple[float, ...]
    heuristic: bool = True


def mean_type_estimate(N: EntireFunctionSamples, y_ladder: Sequence[float]) -> MeanTypeEstimate:
    """
    Finite-ladder estimate of limsup ln|N(iy)|/y: the maximum over the top
    decade of the ladder. `trend` is the slope of the ratios against log10(y)
    over that decade.
    """
    ys = np.asarray(sorted(y_ladder), dtype=float)
    ratios = N.log_modulus(1j * ys) / ys
    top = ys >= ys[-1] / 10.0
    estimate = float(np.max(ratios[top]))
    trend = float(np.polyfit(np.log10(ys[top]), ratios[top], 1)[0]) if np.count_nonzero(top) >= 2 else 0.0
    return MeanTypeEstimate(estimate, trend, tuple(ys.tolist()), tuple(ratios.tolist()))


@dataclass(frozen=True)
class CartwrightDiagnostics:
    order_estimate: float
    log_integral: float
    log_integral_converged: bool
    consistent: bool
    note: str = "heuristic growth estimate; bounded type is not certified"


def _log_integral_partials(F: EntireFunctionSamples, grid: np.ndarray) -> Tuple[float, bool]:
    xs = np.sort(np.asarray(grid, dtype=float))
    density = np.maximum(F.log_modulus(xs.astype(complex)), 0.0) / (1.0 + xs ** 2)
    full = float(integrate.trapezoid(density, xs))
    extent = float(np.max(np.abs(xs)))
    partials = []
    for j in range(4):
        window = np.abs(xs) <= extent * 2.0 ** -j
        partials.append(float(integrate.trapezoid(density[window], xs[window])) if np.count_nonzero(window) > 1 else 0.0)
    increments = [partials[j] - partials[j + 1] for j in range(3)]
    small = increments[0] <= 1e-6 * max(abs(full), 1.0)
    decaying = increments[1] > 0 and increments[0] <= 0.75 * increments[1]
    return full, small or decaying


def cartwright_diagnostics(F: EntireFunctionSamples, radius_ladder: Sequence[float], real_grid: Sequence[float],
                           angles: int = 256) -> CartwrightDiagnostics:
    """
    Order estimate from ln ln max_{|z|=r} |F| against ln r, and the truncated
    logarithmic integral int ln+|F(x)| / (1 + x^2) dx with its tail trend.
    """
    radii = np.asarray(sorted(radius_ladder), dtype=float)
    theta = 2.0 * math.pi * np.arange(angles) / angles
    maxima = []
    for r in radii:
        maxima.append(float(np.max(F.log_modulus(r * np.exp(1j * theta)))))
    maxima = np.asarray(maxima)

    growing = maxima > 1e-9
    if np.count_nonzero(growing) < 2 or np.ptp(maxima) <= 1e-9 * max(1.0, float(np.max(np.abs(maxima)))):
        order = 0.0
    else:
        order = float(np.polyfit(np.log(radii[growing]), np.log(maxima[growing]), 1)[0])

    log_integral, converged = _log_integral_partials(F, np.asarray(real_grid))
    consistent = order < 0.95 or (abs(order - 1.0) <= 0.05 and converged)
    return CartwrightDiagnostics(order, log_integral, converged, consistent)


def hermite_biehler_violations(handle: DeBrangesSpaceHandle, xs: Sequence[float], ys: Sequence[float]) -> List[complex]:
    """Grid points z = x + iy (y > 0) where |E(z)| > |E(z*)| fails."""
    X, Y = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    zs = (X + 1j * Y).ravel()
    if np.any(zs.imag <= 0):
        raise ValueError("Hermite-Biehler grid must lie in the open upper half-plane")
    upper = handle.log_abs_E(zs)
    lower = handle.log_abs_E(np.conj(zs))
    return [complex(z) for z in zs[~(upper > lower)]]


def real_zero_violations(handle: DeBrangesSpaceHandle, lams: Sequence[float]) -> List[float]:
    """Real points where |E(lambda)|^2 vanishes numerically."""
    lams = np.asarray(lams, dtype=float)
    modulus = np.exp(handle.log_abs_E(lams))
    return [float(l) for l in lams[~(modulus > 0.0)]]


def kernel_positivity_violations(handle: DeBrangesSpaceHandle, points: Sequence[complex]) -> List[complex]:
    """Points zeta where K(zeta, zeta) > 0 fails."""
    pts = np.asarray(points, dtype=complex)
    diagonal = kernel_values(handle, pts, pts)
    return [complex(p) for p, k in zip(pts, diagonal) if not (k.real > 0.0)]


def kernel_table(handle: DeBrangesSpaceHandle, zetas: Sequence[complex], zs: Sequence[complex]) -> pd.DataFrame:
    """
    K(zeta, z, c) by the formula and by the integral for every pair.

    The discrepancy is normalized by sqrt(K(zeta, zeta) K(z, z)).
    """
    sol, c = handle.solution, handle.c
    zetas = np.asarray(zetas, dtype=complex)
    zs = np.asarray(zs, dtype=complex)
    formula = kernel_values(handle, zetas, zs)
    rows = []
    for zeta, z, k_formula in zip(zetas, zs, formula):
        k_integral = kernel_integral(sol, c, zeta, z)
        diag_zeta = kernel_integral(sol, c, zeta, zeta).real
        diag_z = kernel_integral(sol, c, z, z).real
        scale = math.sqrt(max(diag_zeta * diag_z, 1e-300))
        rows.append({
            "zeta_re": zeta.real, "zeta_im": zeta.imag,
            "z_re": z.real, "z_im": z.imag,
            "formula_re": k_formula.real, "formula_im": k_formula.imag,
            "integral_re": k_integral.real, "integral_im": k_integral.imag,
            "discrepancy": abs(k_formula - k_integral) / scale,
        })
    return pd.DataFrame(rows)


def atom_reproducing_errors(measure, sol, f: GridFunction, c: float, mus: Sequence[complex]) -> np.ndarray:
    """
    |sum_n f^(lambda_n) K(mu*, lambda_n, c) w_n - f^(mu)| / (sqrt(K(mu, mu, c)) ||f||) for each mu.

    f must be supported in (a, c]; the atom sum then reproduces f^ at mu
    through the kernel of B(c).
    """
    if f.c > c:
        raise ValueError("Grid function must be supported inside (a, c]")
    mus = np.atleast_1d(np.asarray(mus, dtype=complex))
    handle = DeBrangesSpaceHandle.for_solution(sol, c)
    fhat_atoms = transform_values(sol, f, measure.lambdas)
    direct = transform_values(sol, f, mus)
    scale = np.sqrt(np.real(sol.norm_squared_batch(mus, c)) * f.norm_squared())
    errors = np.empty(mus.shape)
    for i, mu in enumerate(mus):
        kernel = kernel_values(handle, np.full(len(measure), np.conj(mu)), measure.lambdas)
        atom_sum = np.sum(fhat_atoms * kernel * measure.weights)
        errors[i] = abs(atom_sum - direct[i]) / scale[i]
    return errors


def e_samples_table(handle: DeBrangesSpaceHandle, zs: Sequence[complex]) -> pd.DataFrame:
    zs = np.asarray(zs, dtype=complex)
    values = handle.E(zs)
    return pd.DataFrame({"z_re": zs.real, "z_im": zs.imag, "re": values.real, "im": values.imag})


@dataclass(frozen=True)
class ContainmentResult:
    verdict: str
    in_first: Tuple[bool, ...]
    in_second: Tuple[bool, ...]
    representation_errors: Tuple[Tuple[float, float], ...]
    # (t, log K2(-t^2, -t^2) - log K1(-t^2, -t^2)) when the handles come from different operators
    diagonal_log_ratios: Tuple[Tuple[float, float], ...] = ()


def _representation_error(handle: DeBrangesSpaceHandle, sol, probe: GridFunction, max_k: float) -> float:
    """| ||f^||_B^2 - ||f||^2 | / ||f||^2, infinite when the B-norm diverges."""
    F = EntireFunctionSamples.from_transform(sol, probe)
    try:
        norm = bspace_inner_product(handle, F, F, max_k=max_k).real
    except TailDivergenceError:
        return float("inf")
    target = probe.norm_squared()
    return abs(norm - target) / target


def diagonal_ladder(h1: DeBrangesSpaceHandle, h2: DeBrangesSpaceHandle,
                    rungs: int = DIAGONAL_LADDER_RUNGS) -> List[Tuple[float, float]]:
    """
    log K2(-t^2, -t^2) - log K1(-t^2, -t^2) on t = (4 / L) 2^j, L the longer interval length.

    Along the negative axis K(-t^2, -t^2, c) grows like e^(2 t (c - a)), so the
    log-ratio of a smaller space against a larger one increases without bound.
    """
    length = max(h1.c - h1.solution.potential.a, h2.c - h2.solution.potential.a)
    ts = DIAGONAL_LADDER_START / length * 2.0 ** np.arange(rungs)
    zs = -ts * ts
    k1 = h1.solution.norm_squared_batch(zs, h1.c)
    k2 = h2.solution.norm_squared_batch(zs, h2.c)
    return [(float(t), float(np.log(b) - np.log(a))) for t, a, b in zip(ts, k1, k2)]


def _diagonal_verdict(ratios: Sequence[Tuple[float, float]], tol: float) -> str:
    d = np.array([r for _, r in ratios])
    if np.all(np.abs(d) <= tol):
        return EQUAL
    tail = d[-3:]
    steps = np.diff(tail)
    if tail[-1] > 0 and np.all(steps > 0):
        return FIRST_IN_SECOND
    if tail[-1] < 0 and np.all(steps < 0):
        return SECOND_IN_FIRST
    return INCOMPARABLE


def verify_containment(h1: DeBrangesSpaceHandle, h2: DeBrangesSpaceHandle, probes: Sequence[GridFunction],
                       tol: float = 1e-5, max_k: float = INNER_PRODUCT_MAX_K) -> ContainmentResult:
    """
    Decide the ordering of two spaces.

    For handles sharing one spectral measure, a probe transform lies in a
    space when its B-norm equals the L^2 norm of the probe. Handles from
    different operators are ordered by their kernel diagonals on the negative
    axis: the log-ratio must grow (or fall) steadily over the top of the
    ladder. "incomparable" is reserved for contradictory evidence.
    """
    if h1.solution is None or h2.solution is None:
        raise ValueError("Containment needs solution-backed handles")
    if h1.solution is not h2.solution and (h1.solution.normalization != h2.solution.normalization
                                           or h1.solution.potential != h2.solution.potential):
        ratios = diagonal_ladder(h1, h2)
        verdict = _diagonal_verdict(ratios, tol)
        logger.debug(f"Containment {h1.label} vs {h2.label} by kernel diagonals: {verdict}")
        return ContainmentResult(verdict, (), (), (), tuple(ratios))

    sol = h1.solution
    errors = []
    for probe in probes:
        errors.append((_representation_error(h1, sol, probe, max_k), _representation_error(h2, sol, probe, max_k)))
    in_first = tuple(e1 <= tol for e1, _ in errors)
    in_second = tuple(e2 <= tol for _, e2 in errors)

    first_only = any(a and not b for a, b in zip(in_first, in_second))
    second_only = any(b and not a for a, b in zip(in_first, in_second))
    if (first_only and second_only) or not (any(in_first) or any(in_second)):
        verdict = INCOMPARABLE
    elif second_only:
        verdict = FIRST_IN_SECOND
    elif first_only:
        verdict = SECOND_IN_FIRST
    else:
        verdict = EQUAL
    logger.debug(f"Containment {h1.label} vs {h2.label}: {verdict}")
    return ContainmentResult(verdict, in_first, in_second, tuple(errors))
