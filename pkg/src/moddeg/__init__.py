"""Modular degrees of rational elliptic curves and Watkins-conjecture audits."""

__version__ = "0.1.0"
