"""Exact pullbacks, degree drops and dynamical degrees of rational maps of projective space."""

__version__ = "0.1.0"
