"""Ehrhart h*-data, generic Artinian reductions and Lefschetz certificates for lattice polytopes."""

__version__ = "0.1.0"
