"""Exact Riemann solutions and finite-volume solvers for a conservative
barotropic two-phase flow model, with Baer-Nunziato and pressure/velocity
relaxation (Kapila limit) companions."""

__version__ = "0.1.0"
