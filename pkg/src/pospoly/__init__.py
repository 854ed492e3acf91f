"""Least-squares polynomial approximation under pointwise non-negativity
or bound constraints, solved through the Fenchel dual with first-order
splitting methods (restarted FISTA and friends)."""

from .basis import (
    MultiIndexSet,
    basis_eval,
    legendre_eval_1d,
    subspace_dim,
    total_degree_indices,
    vandermonde,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateProblemError,
    DivergenceError,
    PospolyError,
)
from .functions import (
    SampleSet,
    TestFunction,
    chebyshev_nodes,
    equidistant,
    make_test_function,
    tensor_grid,
    uniform_random,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import (
    EvaluationReport,
    convergence_distance,
    l2_error_estimate,
    negative_fraction,
)
from .problem import (
    ApproximationProblem,
    ConstraintSet,
    DualModel,
    PolynomialModel,
    assemble_dual,
    bound_constraints,
    nonneg_constraints,
    primal_objective,
    prox_hstar,
)
from .solvers import (
    METHODS,
    SolverConfig,
    SolverResult,
    SolverTrace,
    solve,
    solve_douglas_rachford,
    solve_fista,
    solve_fista_fixed_restart,
    solve_pdhg_accel,
    solve_projected_gradient,
    solve_rfista,
    solve_vfista,
)

__version__ = "0.1.0"
