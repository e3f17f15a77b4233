"""Numerical laboratory for boundary layers of the 1-D compressible Navier-Stokes outflow problem."""

__version__ = "0.1.0"
