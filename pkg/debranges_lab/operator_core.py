"""
Potentials and integration of the Schrodinger equation.

Integrates -u'' + q_eff(x) u = z u at complex spectral parameter z from
arbitrary interior initial data. Solutions are propagated in growth-scaled
variables

    u(x) = exp(s*kappa*(x - x0)) U(x),   u'(x) = exp(s*kappa*(x - x0)) V(x),

with kappa = Re sqrt(-z) and s the direction of integration, so that large
|z| off the positive axis does not overflow. The scale is carried in
SolutionState.log_scale.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from debranges_lab.errors import IntegrationError, PotentialError
from debranges_lab.logging_utils import get_logger

logger = get_logger("operator_core")

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

# Lower end of the dyadic ladder used by the q-bar probe
QBAR_PROBE_FLOOR = 1e-8
# Fraction of the probed integral allowed in the last few dyadic pieces
QBAR_TAIL_FRACTION = 0.05
QBAR_TAIL_PIECES = 4

ArrayLike = Union[float, complex, Sequence[float], np.ndarray]


class PotentialKind(str, Enum):
    REGULAR = "regular"
    BESSEL = "bessel"


@dataclass(frozen=True)
class PotentialFunction:
    """Real-valued potential q, evaluable on arrays, with family bookkeeping."""
    label: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    is_zero: bool = False
    table: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None

    def __call__(self, x: ArrayLike) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        values = np.asarray(self.func(x_arr), dtype=float)
        if values.shape != x_arr.shape:
            values = np.broadcast_to(values, x_arr.shape).astype(float)
        return values


def zero_potential() -> PotentialFunction:
    return PotentialFunction("zero", lambda x: np.zeros_like(x), is_zero=True)


def constant_potential(value: float) -> PotentialFunction:
    if value == 0.0:
        return zero_potential()
    return PotentialFunction(f"constant({value:g})", lambda x: np.full_like(x, float(value)))


def polynomial_potential(coefficients: Sequence[float]) -> PotentialFunction:
    """Polynomial q(x) = sum c_k x^k, coefficients in ascending order."""
    coeffs = np.asarray(coefficients, dtype=float)
    if not np.any(coeffs):
        return zero_potential()
    poly = np.polynomial.Polynomial(coeffs)
    return PotentialFunction(f"polynomial{tuple(coeffs.tolist())}", lambda x: poly(x))


def cosine_potential(amplitude: float = 1.0, frequency: float = 1.0, phase: float = 0.0) -> PotentialFunction:
    return PotentialFunction(
        f"cosine(A={amplitude:g},w={frequency:g},p={phase:g})",
        lambda x: amplitude * np.cos(frequency * x + phase),
    )


def power_potential(coefficient: float, exponent: float) -> PotentialFunction:
    """q(x) = coefficient * x**exponent (singular at 0 for negative exponents)."""
    return PotentialFunction(
        f"power({coefficient:g}*x^{exponent:g})",
        lambda x: coefficient * np.power(x, exponent),
    )


def tabulated_potential(x: Sequence[float], q: Sequence[float]) -> PotentialFunction:
    """Piecewise-linear potential through the samples (x strictly increasing)."""
    xs = np.asarray(x, dtype=float)
    qs = np.asarray(q, dtype=float)
    if xs.ndim != 1 or xs.shape != qs.shape or xs.size < 2:
        raise PotentialError("Tabulated potential needs two equal-length columns with at least two rows")
    if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(qs)):
        raise PotentialError("Tabulated potential contains non-finite values")
    if np.any(np.diff(xs) <= 0):
        raise PotentialError("Tabulated potential: x must be strictly increasing")
    return PotentialFunction(
        f"tabulated[{xs.size}]",
        lambda t: np.interp(t, xs, qs),
        table=(tuple(xs.tolist()), tuple(qs.tolist())),
    )


def shifted_potential_function(q: PotentialFunction, shift: float) -> PotentialFunction:
    """Return x -> q(x - shift)."""
    if q.is_zero:
        return q
    return PotentialFunction(f"{q.label}(x-{shift:g})", lambda x: q(x - shift))


def as_potential_function(q: Union[PotentialFunction, Callable], label: str = "custom") -> PotentialFunction:
    if isinstance(q, PotentialFunction):
        return q
    if not callable(q):
        raise PotentialError("Potential q must be callable")
    return PotentialFunction(label, lambda x: np.vectorize(q, otypes=[float])(x))


@dataclass(frozen=True)
class Potential:
    """Interval (a, b) together with the coefficient data of tau = -d^2/dx^2 + q_eff."""
    a: float
    b: float
    kind: PotentialKind
    q: PotentialFunction
    l: Optional[float] = None
    description: str = ""

    @property
    def centrifugal(self) -> float:
        """l(l+1) for Bessel potentials, zero otherwise."""
        if self.kind is PotentialKind.BESSEL:
            return self.l * (self.l + 1.0)
        return 0.0

    @property
    def length(self) -> float:
        return self.b - self.a

    def effective(self, x: ArrayLike) -> np.ndarray:
        """Full potential l(l+1)/x^2 + q(x) (just q for regular kind)."""
        x_arr = np.asarray(x, dtype=float)
        values = self.q(x_arr)
        if self.kind is PotentialKind.BESSEL and self.centrifugal != 0.0:
            values = values + self.centrifugal / x_arr ** 2
        return values

    def contains(self, x: float, allow_endpoints: bool = True) -> bool:
        """Whether x is a legal integration point (x = 0 is never legal for Bessel kind)."""
        if self.kind is PotentialKind.BESSEL:
            return 0.0 < x <= self.b if allow_endpoints else 0.0 < x < self.b
        if allow_endpoints:
            return self.a <= x <= self.b
        return self.a < x < self.b


@dataclass(frozen=True)
class QbarProbe:
    """Dyadic-ladder quadrature of q-bar near zero."""
    pieces: Tuple[float, ...]
    total: float
    tail: float
    integrable: bool


@dataclass(frozen=True)
class SolutionState:
    """Value and derivative of a solution at x; true values are exp(log_scale)*(u, du)."""
    x: float
    u: complex
    du: complex
    log_scale: complex = 0.0

    def unscaled(self) -> "SolutionState":
        if self.log_scale == 0:
            return self
        factor = np.exp(self.log_scale)
        return SolutionState(self.x, self.u * factor, self.du * factor, 0.0)

    def is_trivial(self) -> bool:
        return self.u == 0 and self.du == 0


def _check_interval(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise PotentialError(f"Interval endpoints must be finite, got ({a}, {b})")
    if a >= b:
        raise PotentialError(f"Left endpoint must be smaller than right endpoint, got ({a}, {b})")


def _abs_integral(q: PotentialFunction, lo: float, hi: float) -> float:
    """Quadrature of |q| over [lo, hi]; trapezoidal on the table for tabulated input."""
    if q.is_zero:
        return 0.0
    if q.table is not None:
        xs = np.asarray(q.table[0])
        inside = xs[(xs > lo) & (xs < hi)]
        grid = np.concatenate(([lo], inside, [hi]))
        return float(integrate.trapezoid(np.abs(q(grid)), grid))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(lambda t: abs(float(q(t))), lo, hi, limit=200)
    return float(value)


def probe_local_integrability(q: PotentialFunction, lo: float, hi: float) -> float:
    """Return the quadrature of |q| over [lo, hi], raising PotentialError if it is not finite."""
    samples = q(np.linspace(lo, hi, 65)[1:-1])
    if not np.all(np.isfinite(samples)):
        raise PotentialError(f"Potential {q.label} is not finite inside [{lo}, {hi}]")
    value = _abs_integral(q, lo, hi)
    if not math.isfinite(value):
        raise PotentialError(f"Potential {q.label} is not integrable on [{lo}, {hi}]")
    return value


def qbar_probe(q: PotentialFunction, l: float, upper: float, floor: float = QBAR_PROBE_FLOOR) -> QbarProbe:
    """
    Probe integrability of q-bar near zero on the dyadic ladder upper*2^-k down to floor.

    q-bar(x) = x|q(x)| for l > -1/2 and x(1 - ln x)|q(x)| for l = -1/2. The
    integral is judged convergent when the last few dyadic pieces carry a
    small fraction of the total.
    """
    if l == -0.5:
        weight = lambda t: t * (1.0 - math.log(t))
    else:
        weight = lambda t: t

    if q.is_zero:
        return QbarProbe(pieces=(), total=0.0, tail=0.0, integrable=True)

    pieces = []
    hi = upper
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        while hi / 2.0 >= floor:
            lo = hi / 2.0
            value, _ = integrate.quad(lambda t: weight(t) * abs(float(q(t))), lo, hi, limit=100)
            pieces.append(float(value))
            hi = lo

    total = float(np.sum(pieces))
    tail = float(np.sum(pieces[-QBAR_TAIL_PIECES:]))
    finite = all(math.isfinite(v) for v in pieces)
    integrable = finite and (total <= 1e-14 or tail <= QBAR_TAIL_FRACTION * total)
    return QbarProbe(pieces=tuple(pieces), total=total, tail=tail, integrable=integrable)


def make_regular_potential(a: float, b: float, q: Union[PotentialFunction, Callable],
                           description: Optional[str] = None) -> Potential:
    """
    Build a potential with regular endpoints a and b.

    Raises:
        PotentialError: on non-finite or reversed endpoints, or if |q| has no
            finite quadrature over the interval.
    """
    _check_interval(a, b)
    q_func = as_potential_function(q)
    probe_local_integrability(q_func, a, b)
    label = description or f"regular {q_func.label} on ({a:g}, {b:g})"
    logger.debug(f"Created regular potential: {label}")
    return Potential(a=float(a), b=float(b), kind=PotentialKind.REGULAR, q=q_func, description=label)


def make_bessel_potential(l: float, b: float, q: Union[PotentialFunction, Callable],
                          description: Optional[str] = None) -> Potential:
    """
    Build the perturbed Bessel potential l(l+1)/x^2 + q(x) on (0, b).

    Raises:
        PotentialError: for l < -1/2, a bad right endpoint, or a perturbation
            whose q-bar fails the integrability probe near zero.
    """
    if l < -0.5:
        raise PotentialError(f"Bessel index must satisfy l >= -1/2, got {l}")
    _check_interval(0.0, b)
    q_func = as_potential_function(q)
    upper = min(0.5, b / 2.0)
    probe = qbar_probe(q_func, l, upper)
    if not probe.integrable:
        raise PotentialError(
            f"q-bar of {q_func.label} is not integrable near 0 for l={l:g} "
            f"(last dyadic pieces {probe.tail:.3g} of {probe.total:.3g}); strongly singular perturbation"
        )
    probe_local_integrability(q_func, upper, b)
    label = description or f"bessel l={l:g} + {q_func.label} on (0, {b:g})"
    logger.debug(f"Created Bessel potential: {label}")
    return Potential(a=0.0, b=float(b), kind=PotentialKind.BESSEL, q=q_func, l=float(l), description=label)


def shifted_potential(p: Potential, shift: float) -> Potential:
    """Translate a regular potential: (a+s, b+s) with q(x - s)."""
    if p.kind is not PotentialKind.REGULAR:
        raise PotentialError("Only regular potentials can be translated")
    return make_regular_potential(p.a + shift, p.b + shift, shifted_potential_function(p.q, shift),
                                  description=f"{p.description} shifted by {shift:g}")


def growth_rate(z: ArrayLike) -> np.ndarray:
    """kappa = Re sqrt(-z) (principal branch), the exponential growth rate of solutions."""
    zs = np.asarray(z, dtype=complex)
    return np.maximum(np.sqrt(-zs).real, 0.0)


@dataclass
class ScaledTrajectory:
    """Result of a batch integration in growth-scaled variables."""
    zs: np.ndarray
    kappa: np.ndarray
    direction: float
    x0: float
    x: np.ndarray
    U: np.ndarray
    V: np.ndarray
    norm: Optional[np.ndarray] = None
    dense: Optional[Callable[[float], np.ndarray]] = None

    def log_scale(self, x: ArrayLike) -> np.ndarray:
        """Log of the scale factor, shape (len(zs), len(x))."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        return self.direction * self.kappa[:, None] * (xs[None, :] - self.x0)

    def at(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense-output evaluation (U, V, log_scale), each of shape (len(zs), len(x))."""
        if self.dense is None:
            raise IntegrationError("Trajectory was integrated without dense output")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        m = self.zs.size
        y = np.asarray(self.dense(xs))
        return y[:m, :], y[m:2 * m, :], self.log_scale(xs)

    def norm_at(self, x: ArrayLike) -> np.ndarray:
        """Accumulated norm int |u|^2 from x0, shape (len(zs), len(x))."""
        if self.dense is None:
            raise IntegrationError("Trajectory was integrated without dense output")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        m = self.zs.size
        scaled = np.asarray(self.dense(xs))[2 * m:3 * m, :].real
        return scaled * np.exp(2.0 * self.log_scale(xs))

    def final_norm(self) -> np.ndarray:
        """Accumulated norm at the last output point, one value per z."""
        if self.norm is None:
            raise IntegrationError("Trajectory was integrated without the norm")
        return self.norm[:, -1] * np.exp(2.0 * self.log_scale(self.x[-1])[:, 0])


def integrate_scaled(
    p: Potential,
    zs: ArrayLike,
    x0: float,
    u0: ArrayLike,
    du0: ArrayLike,
    x_end: float,
    x_eval: Optional[ArrayLike] = None,
    dense_output: bool = False,
    with_norm: bool = False,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> ScaledTrajectory:
    """
    Integrate -u'' + (q_eff - z)u = 0 from x0 to x_end for every z in zs at once.

    The state is [U, V] (plus the accumulated norm int |u|^2 when with_norm),
    vectorized over zs; real spectral parameters with real data stay real.

    Raises:
        IntegrationError: if the solver fails (step-size underflow near an
            interior singularity of q signals an unsupported potential).
    """
    z_arr = np.atleast_1d(np.asarray(zs))
    u_arr = np.broadcast_to(np.asarray(u0), z_arr.shape)
    du_arr = np.broadcast_to(np.asarray(du0), z_arr.shape)
    is_real = (np.isrealobj(z_arr) or not np.any(np.imag(z_arr))) and \
        not np.any(np.imag(u_arr)) and not np.any(np.imag(du_arr))
    dtype = float if is_real else complex
    z_vec = (np.real(z_arr) if is_real else z_arr).astype(dtype)
    m = z_vec.size

    direction = 1.0 if x_end >= x0 else -1.0
    kappa = growth_rate(z_arr)
    sk = direction * kappa

    y0 = [np.real(u_arr) if is_real else u_arr, np.real(du_arr) if is_real else du_arr]
    if with_norm:
        y0.append(np.zeros(m))
    y0 = np.concatenate([np.asarray(v, dtype=dtype) for v in y0])

    def rhs(x, y):
        U = y[:m]
        V = y[m:2 * m]
        coeff = float(p.effective(x)) - z_vec
        dU = V - sk * U
        dV = coeff * U - sk * V
        if not with_norm:
            return np.concatenate((dU, dV))
        # N is carried as exp(-2 s kappa (x - x0)) int |u|^2
        N = y[2 * m:3 * m].real
        dN = (np.abs(U) ** 2 - 2.0 * sk * N).astype(dtype)
        return np.concatenate((dU, dV, dN))

    t_eval = None
    if x_eval is not None:
        t_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))

    if x_end == x0:
        xs = np.array([x0]) if t_eval is None else t_eval
        ys = np.repeat(y0[:, None], xs.size, axis=1)
        dense = (lambda t: np.repeat(y0[:, None], np.atleast_1d(t).size, axis=1)) if dense_output else None
        return ScaledTrajectory(z_arr, kappa, direction, x0, xs, ys[:m], ys[m:2 * m],
                                ys[2 * m:].real if with_norm else None, dense)

    result = integrate.solve_ivp(
        rhs, (x0, x_end), y0, method="DOP853", t_eval=t_eval,
        dense_output=dense_output, rtol=rtol, atol=atol,
    )
    if not result.success:
        x_fail = float(result.t[-1]) if result.t.size else x0
        message = result.message
        if "step size" in message.lower():
            message = (f"step-size underflow near x={x_fail:.6g}: potential outside the supported class "
                       f"(interior singularity of q?)")
        raise IntegrationError(message, x=x_fail, z=complex(z_arr.flat[0]))

    ys = result.y
    return ScaledTrajectory(
        zs=z_arr, kappa=kappa, direction=direction, x0=x0, x=result.t,
        U=ys[:m], V=ys[m:2 * m], norm=ys[2 * m:].real if with_norm else None,
        dense=result.sol if dense_output else None,
    )


def _check_point(p: Potential, x: float, name: str) -> None:
    if not p.contains(x):
        raise IntegrationError(f"{name}={x} lies outside the integration domain of {p.description}", x=x)


def propagate(
    p: Potential,
    z: complex,
    start: SolutionState,
    to_x: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    keep_scale: bool = False,
) -> SolutionState:
    """
    Propagate a solution of tau u = z u from start.x to to_x.

    Args:
        p: Potential
        z: Spectral parameter
        start: Initial data (value, derivative) at start.x
        to_x: Target point
        rtol, atol: Integration tolerances
        keep_scale: Return growth-scaled values with log_scale instead of raw values

    Returns:
        SolutionState at to_x
    """
    _check_point(p, start.x, "from.x")
    _check_point(p, to_x, "to_x")
    trajectory = integrate_scaled(p, np.array([z]), start.x, start.u, start.du, to_x,
                                  x_eval=np.array([to_x]), rtol=rtol, atol=atol)
    log_scale = complex(trajectory.log_scale(to_x)[0, 0]) + start.log_scale
    u_val = trajectory.U[0, -1]
    du_val = trajectory.V[0, -1]
    if not np.iscomplexobj(trajectory.U):
        u_val, du_val = float(u_val), float(du_val)
        log_scale = log_scale.real
    state = SolutionState(float(to_x), u_val, du_val, log_scale)
    return state if keep_scale else state.unscaled()


class SolutionEvaluator:
    """A single solution of tau u = z u at fixed z, given by its data at an anchor point."""

    def __init__(self, potential: Potential, z: complex, anchor: SolutionState,
                 rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
        _check_point(potential, anchor.x, "anchor")
        self.potential = potential
        self.z = z
        self.anchor = anchor
        self.rtol = rtol
        self.atol = atol

    def __call__(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Return (u(x), u'(x)) for an array of points."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        for value in (xs.min(), xs.max()):
            _check_point(self.potential, float(value), "x")
        u = np.zeros(xs.shape, dtype=complex)
        du = np.zeros(xs.shape, dtype=complex)
        x0 = self.anchor.x
        for side in (xs >= x0, xs < x0):
            if not np.any(side):
                continue
            targets = xs[side]
            order = np.argsort(targets) if targets[0] >= x0 else np.argsort(-targets)
            ordered = targets[order]
            trajectory = integrate_scaled(self.potential, np.array([self.z]), x0, self.anchor.u,
                                          self.anchor.du, float(ordered[-1]), x_eval=ordered,
                                          rtol=self.rtol, atol=self.atol)
            scale = np.exp(trajectory.log_scale(ordered)[0] + self.anchor.log_scale)
            values = np.empty(targets.shape, dtype=complex)
            derivs = np.empty(targets.shape, dtype=complex)
            values[order] = trajectory.U[0] * scale
            derivs[order] = trajectory.V[0] * scale
            u[side] = values
            du[side] = derivs
        if np.isreal(self.z) and np.isrealobj(np.asarray(self.anchor.u)) and np.isrealobj(np.asarray(self.anchor.du)):
            return u.real, du.real
        return u, du


def fundamental_system(p: Potential, z: complex, anchor: float,
                       rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL
                       ) -> Tuple[SolutionEvaluator, SolutionEvaluator]:
    """
    Solutions c, s with c(anchor)=s'(anchor)=1 and c'(anchor)=s(anchor)=0.

    Their Wronskian c s' - c' s equals one identically.
    """
    c = SolutionEvaluator(p, z, SolutionState(float(anchor), 1.0, 0.0), rtol, atol)
    s = SolutionEvaluator(p, z, SolutionState(float(anchor), 0.0, 1.0), rtol, atol)
    return c, s


def wronskian(first: SolutionEvaluator, second: SolutionEvaluator, x: ArrayLike) -> np.ndarray:
    """W(u1, u2)(x) = u1 u2' - u1' u2."""
    u1, du1 = first(x)
    u2, du2 = second(x)
    return u1 * du2 - du1 * u2
