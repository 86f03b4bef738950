"""
Real entire solutions phi(z, x) at the left endpoint.

Regular endpoints use unit initial data phi(a) = sin(alpha), phi'(a) = cos(alpha).
Perturbed Bessel endpoints are started from a near-field construction on
(0, x_match] normalized by the leading behaviour phi ~ x^(l+1):

- q == 0: the exact power series x^(l+1) * sum c_j x^(2j),
  c_j = -z c_(j-1) / (2j (2j + 2l + 1));
- q != 0: Picard iteration of the Volterra equation
  phi = x^(l+1) + int_0^x G(x, t) (q(t) - z) phi(t) dt on a dyadic panel mesh.

Beyond x_match the solution is propagated outward with operator_core.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev

from debranges_lab.errors import GaugeError, IntegrationError, PotentialError, SeriesConvergenceError
from debranges_lab.logging_utils import get_logger
from debranges_lab.operator_core import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    Potential,
    PotentialKind,
    ScaledTrajectory,
    SolutionState,
    integrate_scaled,
)

logger = get_logger("entire_solution")

SERIES_TERM_RATIO = 1e-16
PICARD_TOLERANCE = 1e-14
DEFAULT_MAX_TERMS = 200
DEFAULT_RETRIES = 8
# |z| up to which a Bessel near field is validated at construction
DEFAULT_Z_CAPACITY = 1e4
# Values of |Re g| beyond which e^g overflows double precision
GAUGE_OVERFLOW = 700.0
ASYMPTOTICS_NOISE_FLOOR = 1e-9

_PANELS = 40
_CHEB_ORDER = 20
_GAUSS_ORDER = 16


def _canonical(z: complex) -> Union[float, complex]:
    """Real parameters stay float so that real solutions stay real."""
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def _dtype_for(zs: np.ndarray) -> type:
    return float if (np.isrealobj(zs) or not np.any(np.imag(zs))) else complex


def _chebyshev_lobatto(n: int) -> np.ndarray:
    return -np.cos(np.pi * np.arange(n) / (n - 1))


@lru_cache(maxsize=None)
def _cardinal_integrals(n: int) -> np.ndarray:
    """Chebyshev coefficients of the integrals from -1 of the cardinal polynomials on n Lobatto nodes."""
    nodes = _chebyshev_lobatto(n)
    coeffs = np.linalg.inv(chebyshev.chebvander(nodes, n - 1))
    return chebyshev.chebint(coeffs, lbnd=-1, axis=0)


def _cumulative_rows(n: int, t: np.ndarray) -> np.ndarray:
    """Matrix taking node values to int_{-1}^{t} of their interpolant, one row per t."""
    return chebyshev.chebvander(np.atleast_1d(t), n) @ _cardinal_integrals(n)


def _dyadic_gauss(upper: float, levels: int = _PANELS, order: int = _GAUSS_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on the dyadic panels of (0, upper]."""
    t, w = np.polynomial.legendre.leggauss(order)
    edges = upper * 2.0 ** -np.arange(levels, -1, -1)
    lo, hi = edges[:-1], edges[1:]
    half = (hi - lo) / 2.0
    nodes = (lo[:, None] + (t[None, :] + 1.0) * half[:, None]).ravel()
    weights = (w[None, :] * half[:, None]).ravel()
    return nodes, weights


class PowerSeriesNearField:
    """Exact series for the unperturbed Bessel equation."""

    def __init__(self, l: float, x_match: float, max_terms: int = DEFAULT_MAX_TERMS):
        self.l = l
        self.x_match = x_match
        self.max_terms = max_terms

    def evaluate(self, zs: np.ndarray, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        zs = np.atleast_1d(zs)
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        dtype = _dtype_for(zs)
        l = self.l
        w = -(np.real(zs) if dtype is float else zs)[:, None] * xs[None, :] ** 2
        term = np.ones(w.shape, dtype=dtype)
        s0 = np.ones(w.shape, dtype=dtype)
        s1 = np.full(w.shape, l + 1.0, dtype=dtype)
        magnitude = np.ones(w.shape)
        peak = float(np.max(np.abs(w))) if w.size else 0.0

        for j in range(1, self.max_terms + 1):
            term = term * w / (2.0 * j * (2.0 * j + 2.0 * l + 1.0))
            s0 = s0 + term
            s1 = s1 + (2.0 * j + l + 1.0) * term
            abs_term = np.abs(term)
            magnitude = np.maximum(magnitude, np.maximum(abs_term, np.abs(s0)))
            if 4.0 * j * j > peak and np.all(abs_term <= SERIES_TERM_RATIO * magnitude):
                break
        else:
            raise SeriesConvergenceError(
                f"Power series did not converge in {self.max_terms} terms at x_match={self.x_match:g}",
                x_match=self.x_match, terms=self.max_terms,
            )

        power = xs ** l
        return power * xs * s0, power * s1


class VolterraNearField:
    """
    Picard iteration for the perturbed Bessel equation near zero.

    The Volterra kernel is G(x, t) = (x^(l+1) t^(-l) - t^(l+1) x^(-l)) / (2l + 1),
    or sqrt(x t) ln(x / t) for l = -1/2. Cumulative integrals are taken
    panel-wise by Chebyshev interpolation on dyadic panels of (0, x_match].
    """

    def __init__(self, l: float, q, x_match: float, max_terms: int = DEFAULT_MAX_TERMS,
                 panels: int = _PANELS, order: int = _CHEB_ORDER):
        self.l = l
        self.q = q
        self.x_match = x_match
        self.max_terms = max_terms
        self.order = order
        self.edges = x_match * 2.0 ** -np.arange(panels, -1, -1)
        self._lo = self.edges[:-1]
        self._half = (self.edges[1:] - self._lo) / 2.0
        self._t = _chebyshev_lobatto(order)
        self.nodes = self._lo[:, None] + (self._t[None, :] + 1.0) * self._half[:, None]
        self._cum = _cumulative_rows(order, self._t)
        self._qvals = q(self.nodes)
        self._weights = self._integral_weights(self.nodes)
        self._solve_single = lru_cache(maxsize=256)(self._solve_uncached)

    def _integral_weights(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.l == -0.5:
            root = np.sqrt(x)
            return root, root * np.log(x)
        return x ** -self.l, x ** (self.l + 1.0)

    def _combine(self, x: np.ndarray, A: np.ndarray, B: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        l = self.l
        if l == -0.5:
            root = np.sqrt(x)
            log_x = np.log(x)
            inner = 1.0 + log_x * A - B
            return root * inner, 0.5 * inner / root + A / root
        scale = 2.0 * l + 1.0
        phi = x ** (l + 1.0) + (x ** (l + 1.0) * A - x ** -l * B) / scale
        dphi = (l + 1.0) * x ** l + ((l + 1.0) * x ** l * A + l * x ** (-l - 1.0) * B) / scale
        return phi, dphi

    def _cumulative(self, integrand: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        local = np.einsum("...pj,ij->...pi", integrand, self._cum) * self._half[:, None]
        totals = local[..., -1]
        offsets = np.cumsum(totals, axis=-1) - totals
        return local + offsets[..., None], offsets

    def _solve(self, zs: np.ndarray):
        """Converged integrands and panel offsets for every z, shapes (Z, P, n) and (Z, P)."""
        dtype = _dtype_for(zs)
        z_vec = (np.real(zs) if dtype is float else zs).astype(dtype)
        lead = self.nodes ** (self.l + 1.0)
        phi = np.broadcast_to(lead, (z_vec.size,) + lead.shape).astype(dtype)
        wa, wb = self._weights

        for _ in range(self.max_terms):
            forcing = (self._qvals[None] - z_vec[:, None, None]) * phi
            A, offsets_a = self._cumulative(wa * forcing)
            B, offsets_b = self._cumulative(wb * forcing)
            updated, _ = self._combine(self.nodes, A, B)
            change = np.max(np.abs(updated - phi))
            phi = updated
            if change <= PICARD_TOLERANCE * np.max(np.abs(phi)):
                forcing = (self._qvals[None] - z_vec[:, None, None]) * phi
                _, offsets_a = self._cumulative(wa * forcing)
                _, offsets_b = self._cumulative(wb * forcing)
                return wa * forcing, wb * forcing, offsets_a, offsets_b
        raise SeriesConvergenceError(
            f"Volterra iteration did not converge in {self.max_terms} sweeps at x_match={self.x_match:g}",
            x_match=self.x_match, terms=self.max_terms,
        )

    def _solve_uncached(self, z: Union[float, complex]):
        return self._solve(np.array([z]))

    def evaluate(self, zs: np.ndarray, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        zs = np.atleast_1d(zs)
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if zs.size == 1:
            fa, fb, off_a, off_b = self._solve_single(_canonical(zs[0]))
        else:
            fa, fb, off_a, off_b = self._solve(zs)

        panel = np.clip(np.searchsorted(self.edges, xs, side="left") - 1, -1, self._lo.size - 1)
        inside = panel >= 0
        A = np.zeros((fa.shape[0], xs.size), dtype=fa.dtype)
        B = np.zeros_like(A)
        if np.any(inside):
            p = panel[inside]
            t = (xs[inside] - self._lo[p]) / self._half[p] - 1.0
            rows = _cumulative_rows(self.order, t) * self._half[p][:, None]
            A[:, inside] = off_a[:, p] + np.einsum("xj,zxj->zx", rows, fa[:, p, :])
            B[:, inside] = off_b[:, p] + np.einsum("xj,zxj->zx", rows, fb[:, p, :])
        return self._combine(xs[None, :], A, B)


NearField = Union[PowerSeriesNearField, VolterraNearField]


class EntireSolutionEvaluator:
    """
    Evaluates phi(z, x) and phi'(z, x) of a real entire solution.

    Per-z outward integrations are cached as dense trajectories carrying the
    accumulated norm int_{x_start}^x |phi|^2, so repeated evaluation at one z
    (quadrature, kernel profiles) integrates once.
    """

    def __init__(self, potential: Potential, normalization: str, x_start: float,
                 near_field: Optional[NearField] = None, boundary_angle: float = 0.0,
                 rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL, cache_size: int = 512):
        self.potential = potential
        self.normalization = normalization
        self.x_start = float(x_start)
        self.near_field = near_field
        self.boundary_angle = boundary_angle
        self.rtol = rtol
        self.atol = atol
        self._branch = lru_cache(maxsize=cache_size)(self._integrate_branch)

    @property
    def a(self) -> float:
        return self.potential.a

    @property
    def b(self) -> float:
        return self.potential.b

    def __repr__(self) -> str:
        return f"EntireSolutionEvaluator({self.potential.description!r}, {self.normalization!r})"

    def _check_domain(self, xs: np.ndarray) -> None:
        lower_ok = np.all(xs > 0.0) if self.potential.kind is PotentialKind.BESSEL else np.all(xs >= self.a)
        if not lower_ok or np.any(xs > self.b * (1.0 + 1e-14) + 1e-14):
            raise IntegrationError(f"Evaluation points outside the domain of {self.potential.description}")

    def initial_data(self, zs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(phi, phi') at x_start for every z."""
        zs = np.atleast_1d(zs)
        if self.near_field is not None:
            phi, dphi = self.near_field.evaluate(zs, np.array([self.x_start]))
            return phi[:, 0], dphi[:, 0]
        shape = zs.shape
        return np.full(shape, math.sin(self.boundary_angle)), np.full(shape, math.cos(self.boundary_angle))

    def start_state(self, z: complex) -> SolutionState:
        u0, du0 = self.initial_data(np.array([_canonical(z)]))
        return SolutionState(self.x_start, u0[0], du0[0])

    def _integrate_branch(self, z: Union[float, complex]) -> ScaledTrajectory:
        u0, du0 = self.initial_data(np.array([z]))
        return integrate_scaled(self.potential, np.array([z]), self.x_start, u0, du0, self.b,
                                dense_output=True, with_norm=True, rtol=self.rtol, atol=self.atol)

    def branch(self, z: complex) -> ScaledTrajectory:
        return self._branch(_canonical(z))

    def evaluate(self, z: complex, x) -> Tuple[np.ndarray, np.ndarray]:
        """phi(z, x), phi'(z, x) for an array of x."""
        z = _canonical(z)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(xs)
        dtype = float if isinstance(z, float) else complex
        phi = np.empty(xs.shape, dtype=dtype)
        dphi = np.empty(xs.shape, dtype=dtype)

        near = xs < self.x_start
        if np.any(near):
            values, derivs = self.near_field.evaluate(np.array([z]), xs[near])
            phi[near], dphi[near] = values[0], derivs[0]
        far = ~near
        if np.any(far):
            U, V, log_scale = self.branch(z).at(xs[far])
            scale = np.exp(log_scale[0])
            phi[far] = U[0] * scale
            dphi[far] = V[0] * scale
        return phi, dphi

    def evaluate_batch(self, zs, x) -> Tuple[np.ndarray, np.ndarray]:
        """phi and phi' for every (z, x) pair, arrays of shape (len(zs), len(x)), one vectorized integration."""
        zs = np.atleast_1d(np.asarray(zs))
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(xs)
        dtype = _dtype_for(zs)
        if dtype is float:
            zs = np.real(zs)
        phi = np.empty((zs.size, xs.size), dtype=dtype)
        dphi = np.empty_like(phi)

        near = xs < self.x_start
        if np.any(near):
            values, derivs = self.near_field.evaluate(zs, xs[near])
            phi[:, near], dphi[:, near] = values, derivs
        far = np.flatnonzero(~near)
        if far.size:
            order = far[np.argsort(xs[far])]
            targets = xs[order]
            u0, du0 = self.initial_data(zs)
            trajectory = integrate_scaled(self.potential, zs, self.x_start, u0, du0, float(targets[-1]),
                                          x_eval=targets, rtol=self.rtol, atol=self.atol)
            scale = np.exp(trajectory.log_scale(targets))
            phi[:, order] = trajectory.U * scale
            dphi[:, order] = trajectory.V * scale
        return phi, dphi

    def log_phi(self, z: complex, x) -> np.ndarray:
        """Complex logarithm of phi(z, x) without forming phi (overflow-free)."""
        z = _canonical(z)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(xs)
        result = np.empty(xs.shape, dtype=complex)
        near = xs < self.x_start
        if np.any(near):
            values, _ = self.near_field.evaluate(np.array([z]), xs[near])
            result[near] = np.log(values[0].astype(complex))
        far = ~near
        if np.any(far):
            U, _, log_scale = self.branch(z).at(xs[far])
            result[far] = np.log(U[0].astype(complex)) + log_scale[0]
        return result

    def log_abs_E(self, z: complex, c: float) -> float:
        """log |phi(z, c) + i phi'(z, c)|."""
        z = _canonical(z)
        xs = np.array([float(c)])
        if c < self.x_start:
            values, derivs = self.near_field.evaluate(np.array([z]), xs)
            return float(np.log(np.abs(values[0, 0] + 1j * derivs[0, 0])))
        U, V, log_scale = self.branch(z).at(xs)
        return float(np.log(np.abs(U[0, 0] + 1j * V[0, 0])) + np.real(log_scale[0, 0]))

    def log_abs_E_batch(self, zs, c: float) -> np.ndarray:
        """log |phi(z, c) + i phi'(z, c)| for every z, one vectorized integration."""
        zs = np.atleast_1d(np.asarray(zs))
        if _dtype_for(zs) is float:
            zs = np.real(zs)
        if c <= self.x_start and self.near_field is not None:
            values, derivs = self.near_field.evaluate(zs, np.array([float(c)]))
            return np.log(np.abs(values[:, 0] + 1j * derivs[:, 0]))
        u0, du0 = self.initial_data(zs)
        trajectory = integrate_scaled(self.potential, zs, self.x_start, u0, du0, float(c),
                                      x_eval=np.array([float(c)]), rtol=self.rtol, atol=self.atol)
        modulus = np.abs(trajectory.U[:, -1] + 1j * trajectory.V[:, -1])
        return np.log(modulus) + np.real(trajectory.log_scale(float(c))[:, 0])

    def _near_norm(self, zs: np.ndarray, upper: np.ndarray) -> np.ndarray:
        """int_0^upper |phi|^2 for every z (one upper bound per z or shared)."""
        upper = np.broadcast_to(np.asarray(upper, dtype=float), zs.shape)
        result = np.zeros(zs.shape)
        for value in np.unique(upper):
            mask = upper == value
            nodes, weights = _dyadic_gauss(float(value))
            phi, _ = self.near_field.evaluate(zs[mask], nodes)
            result[mask] = np.abs(phi) ** 2 @ weights
        return result

    def norm_profile(self, z: complex, x) -> np.ndarray:
        """x -> int_a^x |phi(z, t)|^2 dt, the reproducing-kernel diagonal K(z, z, x)."""
        z = _canonical(z)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(xs)
        result = np.zeros(xs.shape)
        near = xs < self.x_start
        if np.any(near):
            for i in np.flatnonzero(near):
                result[i] = self._near_norm(np.array([z]), np.array([xs[i]]))[0]
        far = ~near
        if np.any(far):
            base = 0.0
            if self.near_field is not None:
                base = float(self._near_norm(np.array([z]), np.array([self.x_start]))[0])
            result[far] = base + self.branch(z).norm_at(xs[far])[0]
        return result

    def norm_squared_batch(self, zs, c: float) -> np.ndarray:
        """int_a^c |phi(z, x)|^2 dx for every z in zs."""
        zs = np.atleast_1d(np.asarray(zs))
        if _dtype_for(zs) is float:
            zs = np.real(zs)
        if c <= self.x_start:
            if self.near_field is None:
                return np.zeros(zs.shape)
            return self._near_norm(zs, np.array([c]))
        u0, du0 = self.initial_data(zs)
        trajectory = integrate_scaled(self.potential, zs, self.x_start, u0, du0, float(c),
                                      x_eval=np.array([float(c)]), with_norm=True,
                                      rtol=self.rtol, atol=self.atol)
        total = trajectory.final_norm()
        if self.near_field is not None:
            total = total + self._near_norm(zs, np.array([self.x_start]))
        return total

    def prufer_start(self, lams: np.ndarray, ks: np.ndarray) -> np.ndarray:
        """Scaled Prufer angle atan2(k phi, phi') at x_start, continuous from the left endpoint."""
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        ks = np.broadcast_to(np.asarray(ks, dtype=float), lams.shape)
        if self.near_field is None:
            return np.arctan2(ks * math.sin(self.boundary_angle), math.cos(self.boundary_angle)) % math.pi
        xs = np.geomspace(self.x_start * 1e-6, self.x_start, 256)
        phi, dphi = self.near_field.evaluate(lams, xs)
        angles = np.unwrap(np.arctan2(ks[:, None] * phi, dphi), axis=1)
        return angles[:, -1]


def phi_regular(p: Potential, boundary_angle: float = 0.0,
                rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> EntireSolutionEvaluator:
    """
    Entire solution for a regular left endpoint.

    phi(z, a) = sin(boundary_angle), phi'(z, a) = cos(boundary_angle); angle 0
    is the Dirichlet convention.
    """
    if p.kind is not PotentialKind.REGULAR:
        raise PotentialError("phi_regular requires a regular potential")
    if not 0.0 <= boundary_angle < math.pi:
        raise PotentialError(f"Boundary angle must lie in [0, pi), got {boundary_angle}")
    tag = f"unit-initial-data(angle={boundary_angle:.12g})"
    return EntireSolutionEvaluator(p, tag, p.a, boundary_angle=boundary_angle, rtol=rtol, atol=atol)


def _build_near_field(p: Potential, x_match: float, max_terms: int) -> NearField:
    if p.q.is_zero:
        return PowerSeriesNearField(p.l, x_match, max_terms)
    return VolterraNearField(p.l, p.q, x_match, max_terms)


def phi_bessel(p: Potential, x_match: Optional[float] = None, max_terms: int = DEFAULT_MAX_TERMS,
               retries: int = DEFAULT_RETRIES, z_capacity: float = DEFAULT_Z_CAPACITY,
               rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> EntireSolutionEvaluator:
    """
    Entire solution for a perturbed Bessel endpoint, phi ~ x^(l+1) as x -> 0.

    The near field is validated at |z| = z_capacity along three rays; if it
    does not converge within max_terms, x_match is halved (at most `retries`
    times).

    Raises:
        SeriesConvergenceError: if every retry fails.
    """
    if p.kind is not PotentialKind.BESSEL:
        raise PotentialError("phi_bessel requires a Bessel potential")
    x_match = min(0.1, p.b / 10.0) if x_match is None else float(x_match)
    probes = np.array([1j * z_capacity, -z_capacity, z_capacity])

    last_error = None
    for attempt in range(retries + 1):
        near_field = _build_near_field(p, x_match, max_terms)
        try:
            near_field.evaluate(probes, np.array([x_match]))
        except SeriesConvergenceError as e:
            last_error = e
            logger.debug(f"Near field failed at x_match={x_match:g} (attempt {attempt + 1}); halving")
            x_match /= 2.0
            continue
        tag = f"leading-frobenius(l={p.l:g}, x_match={x_match:.6g})"
        return EntireSolutionEvaluator(p, tag, x_match, near_field=near_field, rtol=rtol, atol=atol)

    raise SeriesConvergenceError(
        f"Near-field construction failed after {retries} halvings: {last_error}",
        x_match=x_match, terms=max_terms,
    )


@dataclass(frozen=True)
class BesselBoundaryCheck:
    """
    Boundary-condition residuals along a ladder, largest x first.

    `residual` is the scalar result: the maximum over the ladder.
    `final_residual` is the value at the smallest x.
    """
    ladder: Tuple[float, ...]
    residuals: Tuple[float, ...]
    residual: float

    @property
    def final_residual(self) -> float:
        return self.residuals[-1]

    @property
    def decreasing(self) -> bool:
        return all(b <= a for a, b in zip(self.residuals, self.residuals[1:]))


def check_bessel_bc(sol, z: complex, ladder: Sequence[float], l: Optional[float] = None) -> BesselBoundaryCheck:
    """
    Residuals |x^l ((l+1) phi(z,x) - x phi'(z,x))| along a ladder x -> 0.

    l defaults to the Bessel index of the solution's potential; passing it
    explicitly allows checking an arbitrary solution against the condition.
    Callers wanting the scalar residual read `.residual`.
    """
    if l is None:
        if sol.potential.kind is not PotentialKind.BESSEL:
            raise PotentialError("Bessel index required for a regular potential")
        l = sol.potential.l
    xs = np.asarray(sorted(ladder, reverse=True), dtype=float)
    phi, dphi = sol.evaluate(z, xs)
    residuals = np.abs(xs ** l * ((l + 1.0) * phi - xs * dphi))
    return BesselBoundaryCheck(tuple(xs.tolist()), tuple(residuals.tolist()), float(np.max(residuals)))


@dataclass(frozen=True)
class AsymptoticsCheck:
    y_ladder: Tuple[float, ...]
    errors: Tuple[float, ...]
    noise_floor: float = ASYMPTOTICS_NOISE_FLOOR

    @property
    def final_error(self) -> float:
        return self.errors[-1]

    def decreasing(self, start: int = 0) -> bool:
        """Monotone decrease from ladder index `start`, values below the noise floor count as converged."""
        tail = [max(e, self.noise_floor) for e in self.errors[start:]]
        return all(b <= a for a, b in zip(tail, tail[1:]))


def check_asymptotics(sol, x: float, x_tilde: float, y_ladder: Sequence[float]) -> AsymptoticsCheck:
    """
    Errors |phi(iy,x)/phi(iy,x~) * exp(-(x-x~) sqrt(-iy)) - 1| for each y.

    Computed from log-ratios so that no value of phi is formed.
    """
    errors = []
    for y in y_ladder:
        if y <= 0:
            raise ValueError("y_ladder must be positive")
        z = 1j * float(y)
        log_ratio = sol.log_phi(z, [x, x_tilde])
        exponent = log_ratio[0] - log_ratio[1] - (x - x_tilde) * np.sqrt(-z)
        errors.append(float(abs(np.exp(exponent) - 1.0)))
    return AsymptoticsCheck(tuple(float(y) for y in y_ladder), tuple(errors))


@dataclass(frozen=True)
class RescalingFunction:
    """
    Real entire gauge g as a polynomial.

    Either power-basis coefficients (ascending) or Lagrange data (nodes,
    values); the Lagrange form reproduces zero values exactly at nodes.
    """
    coefficients: Tuple[float, ...] = (0.0,)
    nodes: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None
    max_degree: int = 64

    def __post_init__(self):
        data = self.coefficients if self.nodes is None else tuple(self.nodes) + tuple(self.values)
        if not all(not isinstance(c, complex) and math.isfinite(float(c)) for c in data):
            raise GaugeError("Rescaling coefficients must be real and finite")
        if self.nodes is not None:
            if len(self.nodes) != len(self.values):
                raise GaugeError("Interpolation nodes and values differ in length")
            if len(set(self.nodes)) != len(self.nodes):
                raise GaugeError("Interpolation nodes must be distinct")
        if self.degree > self.max_degree:
            raise GaugeError(f"Polynomial degree {self.degree} exceeds the cap {self.max_degree}")

    @classmethod
    def zero(cls) -> "RescalingFunction":
        return cls((0.0,))

    @classmethod
    def constant(cls, value: float) -> "RescalingFunction":
        return cls((float(value),))

    @classmethod
    def interpolating(cls, nodes: Sequence[float], values: Sequence[float], max_degree: int = 64) -> "RescalingFunction":
        return cls(coefficients=(0.0,), nodes=tuple(float(n) for n in nodes),
                   values=tuple(float(v) for v in values), max_degree=max_degree)

    @property
    def degree(self) -> int:
        if self.nodes is not None:
            return max(len(self.nodes) - 1, 0)
        nonzero = [i for i, c in enumerate(self.coefficients) if c != 0.0]
        return nonzero[-1] if nonzero else 0

    @property
    def is_zero(self) -> bool:
        if self.nodes is not None:
            return not any(self.values)
        return not any(self.coefficients)

    def __call__(self, z) -> np.ndarray:
        zs = np.asarray(z)
        if self.nodes is None:
            return np.polynomial.polynomial.polyval(zs, np.asarray(self.coefficients, dtype=float))
        nodes = np.asarray(self.nodes)
        result = np.zeros(zs.shape, dtype=np.result_type(zs, float))
        for i, value in enumerate(self.values):
            if value == 0.0:
                continue
            others = np.delete(nodes, i)
            result = result + value * np.prod((zs[..., None] - others) / (nodes[i] - others), axis=-1)
        return result

    def exp(self, z, sign: float = 1.0) -> np.ndarray:
        """exp(sign * g(z)), raising GaugeError where it would overflow."""
        g = sign * self(z)
        real = np.real(g)
        if np.any(real > GAUGE_OVERFLOW):
            bad = np.atleast_1d(z)[np.atleast_1d(real > GAUGE_OVERFLOW)][0]
            raise GaugeError(f"exp(g) overflows at z={bad}", z=complex(bad))
        return np.exp(g)


class RescaledSolution:
    """phi~(z, x) = exp(g(z)) phi(z, x); exposes the EntireSolutionEvaluator interface."""

    def __init__(self, base, g: RescalingFunction):
        self.base = base
        self.g = g
        self.potential = base.potential
        self.x_start = base.x_start
        self.near_field = base.near_field
        self.normalization = f"{base.normalization} * exp(g)"

    def __repr__(self) -> str:
        return f"RescaledSolution({self.base!r}, degree={self.g.degree})"

    @property
    def a(self) -> float:
        return self.base.a

    @property
    def b(self) -> float:
        return self.base.b

    def evaluate(self, z, x):
        factor = self.g.exp(z)
        phi, dphi = self.base.evaluate(z, x)
        if np.isrealobj(phi):
            factor = np.real(factor)
        return factor * phi, factor * dphi

    def evaluate_batch(self, zs, x):
        zs = np.atleast_1d(np.asarray(zs))
        factor = self.g.exp(zs)[:, None]
        phi, dphi = self.base.evaluate_batch(zs, x)
        if np.isrealobj(phi):
            factor = np.real(factor)
        return factor * phi, factor * dphi

    def log_phi(self, z, x):
        return self.base.log_phi(z, x) + self.g(z)

    def log_abs_E(self, z, c):
        return self.base.log_abs_E(z, c) + float(np.real(self.g(z)))

    def log_abs_E_batch(self, zs, c):
        zs = np.atleast_1d(np.asarray(zs))
        return self.base.log_abs_E_batch(zs, c) + np.real(self.g(zs))

    def norm_profile(self, z, x):
        return np.abs(self.g.exp(z)) ** 2 * self.base.norm_profile(z, x)

    def norm_squared_batch(self, zs, c):
        zs = np.atleast_1d(np.asarray(zs))
        return np.abs(self.g.exp(zs)) ** 2 * self.base.norm_squared_batch(zs, c)

    def prufer_start(self, lams, ks):
        # e^g is positive on the real axis, so Prufer angles are unchanged
        return self.base.prufer_start(lams, ks)


def rescale_solution(sol, g: RescalingFunction):
    """Return the evaluator of exp(g(z)) phi(z, x)."""
    if g.is_zero:
        return sol
    return RescaledSolution(sol, g)


def solution_residual(sol, z: complex, xs: Sequence[float], h: float = 1e-3) -> np.ndarray:
    """
    Relative residual of -phi'' + (q_eff - z) phi, with phi'' by central differences of phi'.

    Normalized by the local magnitude |phi| + |phi'|.
    """
    xs = np.asarray(xs, dtype=float)
    offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    stencil = (xs[:, None] + offsets[None, :]).ravel()
    _, dphi = sol.evaluate(z, stencil)
    dphi = dphi.reshape(xs.size, 4)
    second = (dphi[:, 0] - 8.0 * dphi[:, 1] + 8.0 * dphi[:, 2] - dphi[:, 3]) / (12.0 * h)
    phi, dphi0 = sol.evaluate(z, xs)
    residual = -second + (sol.potential.effective(xs) - z) * phi
    return np.abs(residual) / (np.abs(phi) + np.abs(dphi0))


def norm_ladder(sol, z: complex, ladder: Sequence[float]) -> List[float]:
    """int_a^{a+eps} |phi(z,x)|^2 dx along a ladder of eps."""
    return sol.norm_profile(z, sol.a + np.asarray(ladder, dtype=float)).tolist()
