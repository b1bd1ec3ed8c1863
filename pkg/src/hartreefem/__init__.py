"""Conservative Crank-Nicolson Galerkin solver for the nonlocal Hartree equation.

Bilinear Lagrange elements on a uniform square grid with homogeneous
Dirichlet boundary conditions; two fully discrete time integrators (mass-
conserving midpoint-density scheme and mass/energy-conserving averaged-
density scheme) solved per step by Banach fixed-point iteration.
"""

from .kernels import BACKEND, HAVE_COMPILED
from .mesh import Mesh
from .steppers import FixedPointConfig, NonContractionError, Operators, SchemeKind, TimeGrid, evolve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "Mesh",
    "FixedPointConfig",
    "NonContractionError",
    "Operators",
    "SchemeKind",
    "TimeGrid",
    "evolve",
    "__version__",
]
