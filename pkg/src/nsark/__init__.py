"""Solution-dependent additive Runge-Kutta methods and their order conditions."""

__version__ = "0.1.0"
