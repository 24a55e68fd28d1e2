"""Exact toolkit for load balancing games on identical machines.

Computes optimal makespans, the full set of potential-minimizing
allocations and the worst makespan among them (the IRSE ratio), generates
the parametric family of high-ratio instances, simulates noisy
best-response dynamics with an exact stationary oracle, and sweeps
instance spaces to verify the 4/3 ceiling on the ratio.
"""

from .core import (
    INT64_MAX,
    Allocation,
    BundleSplit,
    CapacityError,
    Instance,
    InvalidAllocationError,
    LoadProfile,
    NoOpMoveError,
    Ratio,
    canonicalize,
    is_nash,
    loads,
    machine_loads,
    makespan,
    move_delta,
    potential,
    scaled,
    swap_delta,
)
from .dynamics import (
    DynamicsConfig,
    NeighborhoodSpec,
    TraceStats,
    exact_stationary,
    gibbs_distribution,
    local_search,
    logit_step,
    logit_transition_matrix,
    profile_distribution,
    simulate,
)
from .generators import (
    FamilyInstance,
    FamilyParams,
    FamilyWitnesses,
    family_witnesses,
    lower_bound_family,
    random_instance,
)
from .search import (
    InvariantViolationError,
    SearchRecord,
    SearchResult,
    SearchSpace,
    enumerate_canonical,
    run_search,
)
from .solvers import (
    OracleTooLargeError,
    ResourceExhaustedError,
    SolveReport,
    brute_force,
    irse,
    lpt,
    minimum_potential,
    optimal_makespan,
    potential_optimum,
)

__version__ = "0.1.0"
