"""Logarithmic-coordinate dynamics of exponential-type entire maps.

Library layout:

- models: the map catalog, log lifts, normalization, JSON descriptors
- tracts: tract addresses, inverse branches, continuous path lifting
- hypmetric: half-plane hyperbolic geometry and certified density bounds
- orbits: iteration, membership certificates, external addresses,
  backward-orbit point construction
- conjugacy: the pullback conjugacy near infinity with all its checks
- semiconj: the hyperbolic-map semiconjugacy by curve lifting
- gridkernel: escape-time grid classification (compiled core with a
  NumPy fallback) and image output
- cli: the `tractlab` command-line entry point
"""

from .errors import TractlabError
from .gridkernel import BACKEND as GRID_BACKEND
from .models import (
    EntireMapSpec,
    KappaFamilyMember,
    LogLiftModel,
    domain_contains,
    eval_dF,
    eval_F,
    model_from_json,
    model_to_json,
    normalize,
)
from .orbits import ExternalAddress, OrbitRecord, iterate, point_with_address
from .tracts import TractAddress, inverse_branch, lift_path, tract_of

__version__ = "0.1.0"

__all__ = [
    "TractlabError",
    "GRID_BACKEND",
    "EntireMapSpec",
    "KappaFamilyMember",
    "LogLiftModel",
    "domain_contains",
    "eval_dF",
    "eval_F",
    "model_from_json",
    "model_to_json",
    "normalize",
    "ExternalAddress",
    "OrbitRecord",
    "iterate",
    "point_with_address",
    "TractAddress",
    "inverse_branch",
    "lift_path",
    "tract_of",
    "__version__",
]
