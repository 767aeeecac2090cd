"""Bayesian qutrit state assignment from average-value measurement data.

The package assigns a 3x3 density matrix to the joint knowledge "the
average of repeated diag(1, 0, -1) measurements is/lies in ..." plus a
prior, by posterior-mean Monte Carlo integration over the 8-dimensional
body of physical Bloch vectors, and compares the result against the
closed-form maximum-entropy assignment for the same constraint.
"""

from .assign import (
    METHOD_DELTA,
    METHOD_FINITE,
    METHOD_REGION,
    AssignmentResult,
    FiniteNLedger,
    assign_finite_n,
    assign_large_n,
    assign_large_n_region,
    enumerate_phi,
    mirror_assignment,
    prior_is_flip_invariant,
)
from .backend import available_backends, get_backend, set_backend
from .bloch import (
    LAMBDA,
    SQRT3,
    X8_MAX,
    X8_MIN,
    bloch_determinant,
    bloch_to_density,
    density_to_bloch,
    det3,
    diagonal_entries,
    expectation_lambda3,
    gell_mann_matrices,
    is_physical,
    pure_state_bloch,
    purity,
    symmetry_map,
    von_neumann_entropy,
)
from .errors import (
    DegenerateSliceError,
    IncompatibleDataError,
    SymmetryViolationError,
    WeightUnderflowError,
)
from .integrate import (
    IntegratorConfig,
    SliceIntegralEstimate,
    integrate_body,
    integrate_region,
    integrate_slice,
    thread_count,
)
from .maxent import MaxEntResult, maxent_mu, maxent_state
from .priors import PriorSpec, eval_prior
from .regions import as_region
from .validate import CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "AssignmentResult",
    "CheckResult",
    "DegenerateSliceError",
    "FiniteNLedger",
    "IncompatibleDataError",
    "IntegratorConfig",
    "LAMBDA",
    "METHOD_DELTA",
    "METHOD_FINITE",
    "METHOD_REGION",
    "MaxEntResult",
    "PriorSpec",
    "SQRT3",
    "SliceIntegralEstimate",
    "SymmetryViolationError",
    "WeightUnderflowError",
    "X8_MAX",
    "X8_MIN",
    "as_region",
    "assign_finite_n",
    "assign_large_n",
    "assign_large_n_region",
    "available_backends",
    "bloch_determinant",
    "bloch_to_density",
    "density_to_bloch",
    "det3",
    "diagonal_entries",
    "enumerate_phi",
    "eval_prior",
    "expectation_lambda3",
    "gell_mann_matrices",
    "get_backend",
    "integrate_body",
    "integrate_region",
    "integrate_slice",
    "is_physical",
    "maxent_mu",
    "maxent_state",
    "mirror_assignment",
    "prior_is_flip_invariant",
    "pure_state_bloch",
    "purity",
    "run_checks",
    "set_backend",
    "symmetry_map",
    "thread_count",
    "von_neumann_entropy",
    "__version__",
]
