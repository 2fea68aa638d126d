"""Coop-UCB2: cooperative UCB over a running distributed-averaging consensus.

Each agent ``k`` keeps consensus estimates ``s_hat[k, i]`` (reward mass) and
``n_hat[k, i]`` (pull mass) for every arm ``i``. After all agents pull, the
per-arm agent vectors are mixed with the consensus matrix::

    n_hat[:, i] <- P (n_hat[:, i] + xi[:, i])
    s_hat[:, i] <- P (s_hat[:, i] + r[:, i])

Time is counted so that the initial round (every agent pulls every arm
once) occupies steps ``1..N``; the first decision happens at ``t = N + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bandit import Bandit, pull, regret_weights
from .metrics import team_error

__all__ = [
    "AlgoParams",
    "TeamState",
    "StepLog",
    "init_team",
    "q_value",
    "q_values",
    "select_arms",
    "consensus_update",
    "step",
    "run_episode",
]


def _sqrt_log(t):
    return math.sqrt(math.log(t)) if t >= 1 else 0.0


def _zero(t):
    return 0.0


SUBLOG_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sqrt_log": _sqrt_log,
    "zero": _zero,
}


@dataclass(frozen=True)
class AlgoParams:
    sigma_g: float = 1.0
    gamma: float = 1.1
    eta: float = 2.0
    f: str = "sqrt_log"

    def __post_init__(self):
        if not self.sigma_g > 0:
            raise ValueError("sigma_g must be positive")
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if not 0 < self.eta < 4:
            raise ValueError("eta must lie in (0, 4)")
        if self.f not in SUBLOG_FUNCTIONS:
            raise ValueError(f"unknown f {self.f!r}; choose from {sorted(SUBLOG_FUNCTIONS)}")

    @property
    def g_eta(self) -> float:
        return 1.0 - self.eta**2 / 16.0

    def f_value(self, t) -> float:
        return SUBLOG_FUNCTIONS[self.f](t)


@dataclass
class TeamState:
    s_hat: np.ndarray
    n_hat: np.ndarray
    t: int
    p: np.ndarray
    pulls: np.ndarray
    regret: float = 0.0

    @property
    def m(self) -> int:
        return self.s_hat.shape[0]

    @property
    def n_arms(self) -> int:
        return self.s_hat.shape[1]


@dataclass(frozen=True)
class StepLog:
    t: int
    actions: np.ndarray
    rewards: np.ndarray
    delta: float
    regret: float = field(default=0.0)


def _matrix(p):
    return np.asarray(getattr(p, "p", p), dtype=float)


def init_team(g, p, b: Bandit, params: AlgoParams, rngs) -> TeamState:
    """Every agent pulls every arm once; no mixing happens yet."""
    p = _matrix(p)
    if p.shape != (g.m, g.m):
        raise ValueError(f"weight matrix shape {p.shape} does not match {g.m} agents")
    if len(rngs) != g.m:
        raise ValueError("need one random stream per agent")
    n = b.n_arms
    s_hat = np.array([[pull(b, i, rngs[k]) for i in range(n)] for k in range(g.m)])
    return TeamState(
        s_hat=s_hat,
        n_hat=np.ones((g.m, n)),
        t=n,
        p=p,
        pulls=np.ones((g.m, n), dtype=np.int64),
    )


def q_value(s_hat, n_hat, t, m, params: AlgoParams):
    """Upper-confidence index of one (agent, arm) pair at time ``t``."""
    if n_hat <= 0:
        raise ValueError("n_hat must be positive")
    if t < 2:
        raise ValueError("t must be at least 2")
    bonus = (
        (2.0 * params.gamma / params.g_eta)
        * ((n_hat + params.f_value(t - 1)) / (m * n_hat))
        * (math.log(t - 1) / n_hat)
    )
    return s_hat / n_hat + params.sigma_g * math.sqrt(bonus)


def q_values(state: TeamState, params: AlgoParams) -> np.ndarray:
    """:func:`q_value` for all agents and arms at time ``state.t``."""
    t, m = state.t, state.m
    if t < 2:
        raise ValueError("t must be at least 2")
    # signed (FDLA) mixing can push a pull estimate to zero or below; such
    # an arm is treated like an unexplored one and gets an infinite index
    undefined = state.n_hat <= 0
    n_hat = np.where(undefined, 1.0, state.n_hat)
    bonus = (
        (2.0 * params.gamma / params.g_eta)
        * ((n_hat + params.f_value(t - 1)) / (m * n_hat))
        * (math.log(t - 1) / n_hat)
    )
    q = state.s_hat / n_hat + params.sigma_g * np.sqrt(bonus)
    q[undefined] = np.inf
    return q


def select_arms(state: TeamState, params: AlgoParams) -> np.ndarray:
    """Greedy arm per agent on the UCB index; ties go to the lowest arm."""
    return np.argmax(q_values(state, params), axis=1)


def consensus_update(state: TeamState, xi, r) -> TeamState:
    """Add this round's indicators and rewards, then mix every arm column with ``P``."""
    xi = np.asarray(xi, dtype=float)
    r = np.asarray(r, dtype=float)
    if xi.shape != state.n_hat.shape or r.shape != state.s_hat.shape:
        raise ValueError("indicator and reward matrices must be M x N")
    state.n_hat = state.p @ (state.n_hat + xi)
    state.s_hat = state.p @ (state.s_hat + r)
    return state


def step(state: TeamState, b: Bandit, rngs, params: AlgoParams, gaps=None):
    """Advance one round. Returns the (mutated) state and its log entry."""
    state.t += 1
    actions = select_arms(state, params)
    m, n = state.m, state.n_arms
    rewards = np.array([pull(b, a, rngs[k]) for k, a in enumerate(actions)])
    rows = np.arange(m)
    xi = np.zeros((m, n))
    xi[rows, actions] = 1.0
    r = np.zeros((m, n))
    r[rows, actions] = rewards
    state.pulls[rows, actions] += 1
    consensus_update(state, xi, r)
    if gaps is None:
        gaps = regret_weights(b)
    state.regret += float(gaps[actions].sum())
    try:
        delta = team_error(state, b.mu_star, b.best_arm)
    except ValueError:
        delta = float("nan")
    return state, StepLog(state.t, actions, rewards, delta, state.regret)


def run_episode(g, p, b: Bandit, params: AlgoParams, horizon, rngs) -> list[StepLog]:
    """Initialize, then play until ``t == horizon`` (``horizon - N`` logged steps)."""
    if horizon <= b.n_arms:
        raise ValueError(f"horizon {horizon} leaves no room after {b.n_arms} initial pulls")
    state = init_team(g, p, b, params, rngs)
    gaps = regret_weights(b)
    logs = []
    while state.t < horizon:
        state, entry = step(state, b, rngs, params, gaps)
        logs.append(entry)
    return logs
