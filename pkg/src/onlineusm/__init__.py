"""Online unconstrained submodular maximization at desk scale.

A library for playing the online game where an adversary reveals a
bounded submodular function each round and the algorithm must commit to
a subset first: the per-element double-greedy framework, the balance
subproblem it reduces to, a pacing subroutine with a closed-form
potential analysis, a two-experts multiplicative-weights subroutine,
offline baselines, adversary generators, and a seeded experiment
harness with CSV/JSON emission.
"""

from .adversaries import (
    AdaptiveBalanceAdversary,
    AdaptiveCutAdversary,
    BUILTIN_COVARIANCE_RULES,
    CycleFunctionAdversary,
    FixedFunctionAdversary,
    ObliviousBalanceAdversary,
    RandomObliviousAdversary,
    adaptive_balance_step,
    covariance_estimate,
    extremal_pattern_sequence,
)
from .balance import (
    BalancePoint,
    Balancer,
    ConvexWeights,
    Decision,
    DoublingHorizon,
    LEFT,
    Ledger,
    RIGHT,
    TwoExperts,
    UP,
    always_no,
    always_yes,
    balance_alpha_regret,
    balancer_step,
    decompose,
    default_learning_rate,
    expected_ledger_deltas,
    horizon_doubling_wrapper,
    ledger_update,
    mw_step,
    potentials,
    step_invariant_deltas,
    uniform_coin,
)
from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    InvalidInstanceError,
    InvalidPointError,
    InvalidSubsetError,
    SizeError,
    UsmError,
)
from .framework import (
    RoundTranscript,
    UsmRunResult,
    default_checkpoints,
    fit_growth_exponent,
    marginal_pair,
    opt_drop_margin,
    opt_tracking_check,
    run_round,
    run_usm_game,
    usm_alpha_regret,
    value_identity_residual,
)
from .harness import (
    BalanceRunResult,
    ExperimentConfig,
    RESULT_HEADER,
    build_balance_adversary,
    build_subroutine,
    build_usm_adversary,
    coin_stream,
    instance_rng,
    run_balance_game,
    run_experiment,
    write_results,
)
from .offline import (
    OfflineResult,
    brute_force_opt,
    det_double_greedy,
    rand_double_greedy,
    rand_double_greedy_stats,
    uniform_random_value,
)
from .submodular import (
    CycleFamily,
    DirectedGraph,
    GroundSet,
    MixtureFamily,
    RandomCutFamily,
    SubmodularOracle,
    directed_cut_value,
    elements_of,
    full_mask,
    mask_of,
    normalize,
    oracle_from_table,
    random_digraph,
    read_digraph,
    synth_sequence,
    tabulate,
    value_table,
    verify_submodularity,
    write_digraph,
)

__version__ = "0.1.0"
