"""Simulation and analysis of the feedback-coupled dual-cell nonlinear Bloch system."""

__version__ = "0.1.0"
