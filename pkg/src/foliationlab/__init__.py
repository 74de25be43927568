"""foliationlab: numerical certification for vector-field foliations.

Flows of holomorphic / real-linear / antiholomorphic / gradient fields,
interval-domain and half-space certification along orbits, holomorphicity
obstructions and rectification, boundary-singularity ellipsoid batteries,
and disc-chaining analytic continuation with monodromy detection.
"""

__version__ = "0.1.0"

from .calculus import DiffConfig, ScalarField  # noqa: F401
from .forms import QuadraticForm               # noqa: F401
