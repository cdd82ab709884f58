"""Feasibility solver kit for the pair of problems

    find x in L intersected with the nonnegative orthant, and
    find x_hat in L-perp intersected with the nonnegative orthant,

for a linear subspace L = ker(A), via projection and rescaling."""

from .basic import (
    BpConfig,
    BpOutcome,
    INTERIOR_FOUND,
    ITER_LIMIT,
    PERCEPTRON,
    RESCALE_READY,
    SMOOTH_PERCEPTRON,
    VON_NEUMANN,
    VON_NEUMANN_AWAY,
    away_vertex,
    min_vertex,
    project_simplex,
    run_perceptron,
    run_scheme,
    run_smooth,
    run_von_neumann,
    run_vna,
    simplex_prox,
    stop_check,
    uniform_simplex,
)
from .bench import ExperimentManifest, ResultRow, emit_histogram, run_experiment
from .epra import (
    ALL_DIRECTIONS,
    EpraConfig,
    EpraResult,
    PARTITION_FOUND,
    ROUND_LIMIT,
    SINGLE_DIRECTION,
    STALLED,
    TRIVIAL_DUAL,
    TRIVIAL_PRIMAL,
    identify_partition,
    rescale_update,
    solve,
)
from .instances import (
    GenSpec,
    gen_controlled,
    gen_naive,
    gen_partitioned,
    generate,
    nullspace_basis,
)
from .oracle import (
    VerificationReport,
    condition_measure_1d,
    condition_measure_search,
    monte_carlo_feasible_rate,
    verify_membership,
    verify_relint_pair,
    wendel_probability,
)
from .subspace import (
    Instance,
    InstanceMeta,
    ProjectorPair,
    apply_projector,
    load_instance,
    projector_from_kernel,
    rescaled_projectors,
    save_instance,
)

__version__ = "0.1.0"
