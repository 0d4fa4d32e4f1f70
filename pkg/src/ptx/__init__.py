"""Poisson structures on trivial extension algebras, computed exactly over the rationals."""
