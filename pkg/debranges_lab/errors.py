"""
Exception hierarchy for the de Branges Spectral Laboratory.

Library modules raise these; the command-line layer turns them into
status dictionaries and exit codes.
"""

from typing import Any, List, Optional


class SpectralLabError(Exception):
    """Base class for all laboratory errors."""


class PotentialError(SpectralLabError, ValueError):
    """Invalid interval, failed integrability probe or malformed tabulated input."""


class IntegrationError(SpectralLabError):
    """ODE integration failed (step-size underflow signals an unsupported potential)."""

    def __init__(self, message: str, x: Optional[float] = None, z: Optional[complex] = None):
        super().__init__(message)
        self.x = x
        self.z = z


class SeriesConvergenceError(SpectralLabError):
    """Frobenius series did not converge within the term budget after all retries."""

    def __init__(self, message: str, x_match: float, terms: int):
        super().__init__(message)
        self.x_match = x_match
        self.terms = terms


class QuadratureError(SpectralLabError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, partial_value: complex, error_estimate: float):
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate


class TailDivergenceError(SpectralLabError):
    """The inner-product integrand does not decay on the real line."""

    def __init__(self, message: str, contributions: List[float]):
        super().__init__(message)
        self.contributions = contributions


class BracketError(SpectralLabError):
    """Eigenvalue bracketing was exhausted; `found` holds the completed prefix."""

    def __init__(self, message: str, found: List[float]):
        super().__init__(message)
        self.found = found


class GaugeError(SpectralLabError):
    """Degree cap exceeded or overflow of e^g at the offending point."""

    def __init__(self, message: str, z: Any = None):
        super().__init__(message)
        self.z = z


class ConfigError(SpectralLabError):
    """Experiment or system configuration is invalid."""
