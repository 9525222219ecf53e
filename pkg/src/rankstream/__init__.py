"""Rank aggregation over drifting ranking streams with fading Borda."""

from .aggregation import (
    PairwiseMatrices,
    UBordaState,
    WeightedVote,
    borda,
    copeland,
    fading_votes,
    kemeny_exact,
    pairwise_matrices,
    uborda_ranking,
    uborda_update,
)
from .mallows import (
    MallowsModel,
    calibrate_theta,
    expected_distance,
    expected_rank_vector,
    log_psi,
    pmf,
    sample,
    sample_many,
)
from .permutation import (
    Permutation,
    adjacent_swap,
    compose,
    enumerate_permutations,
    identity,
    inverse,
    kendall_distance,
    reverse,
)
from .theory import (
    DriftBoundInputs,
    delta_ij,
    epsilon,
    expected_recovery_bound,
    f_objective,
    hp_recovery_bound,
    optimal_rho,
)

__version__ = "0.1.0"
