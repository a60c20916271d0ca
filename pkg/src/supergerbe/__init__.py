"""Exact Cech-Deligne calculus for bundle gerbes on supermanifolds.

The package represents gerbes with connection as Deligne 2-cocycle data over
combinatorial good covers, with every coefficient an exact Gaussian rational.
"""

from .scalars import GaussianRational, Ring, Scalar

__version__ = "0.1.0"

__all__ = ["GaussianRational", "Ring", "Scalar", "__version__"]
