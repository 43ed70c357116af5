"""Continuum model of rod networks: order tensors, energies, equilibria and phase diagrams."""

__version__ = "0.1.0"
