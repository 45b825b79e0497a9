"""Hybrid active/backscatter relay: analytic success probability, Monte Carlo
simulation and bandit mode selection."""

__version__ = "0.1.0"
