"""hetda: persistent-homology boundary-matrix reduction, exact and approximate.

The exact GF(2) column reduction lives in :mod:`hetda.exact`; the
branch-free approximate version, built from iterative comparison and
max-index circuits over depth-tracked scalars, lives in
:mod:`hetda.circuits` and :mod:`hetda.reduction`.  Parameter selection
and depth/cost estimation are in :mod:`hetda.params`; filtrations,
boundary matrices and diagrams in :mod:`hetda.simplicial`; batch
experiments in :mod:`hetda.harness`.

The hot kernels run from a compiled extension when available; set
``HETDA_BACKEND=pure`` to force the pure-Python fallback.
"""

from . import _backend
from .exact import low_exact, reduce_exact
from .params import (
    CompParams,
    LowParams,
    ParameterInfeasible,
    depth_estimate,
    low_params,
    lowcomp_params,
    params_for_budget,
    phi_optimal,
)
from .reduction import ApproxMatrix, he_reduce, he_reduce_optimized, round_and_verify
from .simplicial import (
    BoundaryMatrix,
    Filtration,
    Simplex,
    build_boundary_matrix,
    extract_diagrams,
    validate_filtration,
)
from .tracking import OpCounter, TrackedValue

__version__ = "0.1.0"

backend_name = _backend.name

__all__ = [
    "ApproxMatrix",
    "BoundaryMatrix",
    "CompParams",
    "Filtration",
    "LowParams",
    "OpCounter",
    "ParameterInfeasible",
    "Simplex",
    "TrackedValue",
    "backend_name",
    "build_boundary_matrix",
    "depth_estimate",
    "extract_diagrams",
    "he_reduce",
    "he_reduce_optimized",
    "low_exact",
    "low_params",
    "lowcomp_params",
    "params_for_budget",
    "phi_optimal",
    "reduce_exact",
    "round_and_verify",
    "validate_filtration",
]
