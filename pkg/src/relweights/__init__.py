"""Consensus edge-weight optimization and cooperative bandit simulation.

Build a communication graph, choose consensus weights (closed-form
heuristics or the FMMC/FDLA optimizers), then run Coop-UCB2 teams on it::

    from relweights import gen_clustered, solve_fmmc, kappa_weights

    g = gen_clustered(3)
    print(kappa_weights(g).rho, solve_fmmc(g).best_objective)
"""

from .bandit import Bandit, agent_rngs, pull, regret_weights, rng_stream, sample_bandit
from .coopucb2 import (
    AlgoParams,
    StepLog,
    TeamState,
    consensus_update,
    init_team,
    q_value,
    run_episode,
    select_arms,
    step,
)
from .graph import (
    Graph,
    GraphFormatError,
    build_graph,
    gen_clustered,
    gen_complete,
    gen_star,
    incidence,
    laplacian,
    load_graph,
    save_graph,
)
from .metrics import AggregateCurve, ErrorCurve, aggregate, group_regret, settling_time, team_error
from .optimizer import (
    SolveOptions,
    SolveResult,
    objective_and_subgradient,
    project_feasible,
    solve_fdla,
    solve_fmmc,
)
from .spectral import Spectrum, convergence_factor, convergence_time, sym_eigs
from .weights import (
    WeightMatrix,
    best_constant_weights,
    kappa_weights,
    load_weights,
    local_degree_weights,
    max_degree_weights,
    save_weights,
    validate,
)

__version__ = "0.1.0"
