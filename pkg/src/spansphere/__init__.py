"""Minimum-cost spanning spheres in complete simplicial complexes with
i.i.d. uniform random costs."""

from .constructions import build_cone_sphere, s_star, sphere_from_cycle, tight_path_sphere
from .costs import QueryLog, Seed, WeightOracle, complex_cost, derive_seed, simplex_cost
from .errors import SpanSphereError
from .simplex import Outcome, PureComplex, SphereVerdict, verify

__version__ = "0.1.0"

__all__ = [
    "Outcome",
    "PureComplex",
    "QueryLog",
    "Seed",
    "SpanSphereError",
    "SphereVerdict",
    "WeightOracle",
    "build_cone_sphere",
    "complex_cost",
    "derive_seed",
    "s_star",
    "simplex_cost",
    "sphere_from_cycle",
    "tight_path_sphere",
    "verify",
]
