"""Intersection-lattice combinatorics of special fibers of genus >= 2 fibrations."""

__version__ = "0.1.0"
