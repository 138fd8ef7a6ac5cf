"""Cutting sequences on the square torus, leaf approximations in the flat
model, hyperbolic radius formulas and the support-plane radius recursion."""

__version__ = "0.1.0"
