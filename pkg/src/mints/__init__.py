"""Profile-likelihood posterior sampling for stochastic optimization."""

__version__ = "0.1.0"
