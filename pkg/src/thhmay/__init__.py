"""Algebraic models of topological Hochschild homology computations at odd primes."""

__version__ = "0.1.0"
