"""Symbolic solver for Euclidean geometry: deduction rules plus exact
linear algebra over angles and log-lengths, saturated to a fixpoint."""

__version__ = "0.1.0"
