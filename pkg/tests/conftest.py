"""
Test configuration for pytest.
"""

import copy
import math
import os
import sys

import pytest

# Add project root to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from debranges_lab.config_utils import FALLBACK_CONFIG
from debranges_lab.entire_solution import phi_bessel, phi_regular
from debranges_lab.operator_core import make_bessel_potential, make_regular_potential, zero_potential
from debranges_lab.spectral_measure import compute_measure


# Session scope: solutions cache their per-z integrations
@pytest.fixture(scope="session")
def free_potential():
    """Free operator on (0, pi)."""
    return make_regular_potential(0.0, math.pi, zero_potential())


@pytest.fixture(scope="session")
def free_solution(free_potential):
    """Dirichlet entire solution sin(kx)/k of the free operator."""
    return phi_regular(free_potential)


@pytest.fixture(scope="session")
def free_measure(free_solution):
    """Spectral measure of the free Dirichlet operator up to lambda_max = 400."""
    return compute_measure(free_solution, 400.0)


@pytest.fixture(scope="session")
def bessel1_potential():
    """Pure Bessel operator with l = 1 on (0, pi)."""
    return make_bessel_potential(1.0, math.pi, zero_potential())


@pytest.fixture(scope="session")
def bessel1_solution(bessel1_potential):
    return phi_bessel(bessel1_potential)


@pytest.fixture(scope="session")
def bessel1_measure(bessel1_solution):
    return compute_measure(bessel1_solution, 400.0)


@pytest.fixture
def quiet_settings():
    """Fallback settings with console and file logging switched off."""
    settings = copy.deepcopy(FALLBACK_CONFIG)
    settings['logging']['console'] = False
    settings['logging']['file'] = False
    return settings


@pytest.fixture
def experiments_dir():
    """Return path to the shipped experiment configurations."""
    return os.path.join(os.path.dirname(__file__), '..', 'config', 'experiments')


@pytest.fixture
def temp_output_dir(tmpdir):
    """Create a temporary directory for test outputs."""
    output_dir = tmpdir.mkdir("test_output")
    return str(output_dir)
