#!/usr/bin/env python3
"""
de Branges Spectral Laboratory (DBLAB) - Package Initialization

Numerical construction of entire solutions of one-dimensional Schrodinger
operators, their de Branges spaces, reproducing kernels and spectral measures.
"""

__version__ = "1.0.0"
__author__ = "DBLAB Team"
__license__ = "MIT"
