"""Gaussian multi-armed bandit environment and seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Bandit", "rng_stream", "agent_rngs", "sample_bandit", "pull", "regret_weights"]


@dataclass(frozen=True)
class Bandit:
    """``N`` arms with Gaussian rewards ``N(means[a], sigma**2)``."""

    means: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        means = np.array(self.means, dtype=float)
        if means.ndim != 1 or means.size < 2:
            raise ValueError("a bandit needs at least two arms")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        means.flags.writeable = False
        object.__setattr__(self, "means", means)

    @property
    def n_arms(self) -> int:
        return self.means.size

    @property
    def best_arm(self) -> int:
        # np.argmax returns the lowest index on ties
        return int(np.argmax(self.means))

    @property
    def mu_star(self) -> float:
        return float(self.means[self.best_arm])


def rng_stream(seed, *key) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``, e.g. ``(seed, run, agent)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


BANDIT_STREAM = 0


def agent_rngs(seed, run, m) -> list[np.random.Generator]:
    """One reward stream per agent for a given run (stream 0 is kept for the bandit)."""
    return [rng_stream(seed, run, 1 + k) for k in range(m)]


def sample_bandit(n_arms, rng: np.random.Generator, sigma=1.0) -> Bandit:
    """Arm means drawn i.i.d. from the standard normal."""
    if n_arms < 2:
        raise ValueError("a bandit needs at least two arms")
    return Bandit(rng.standard_normal(n_arms), sigma)


def pull(b: Bandit, arm, rng: np.random.Generator) -> float:
    if not 0 <= arm < b.n_arms:
        raise IndexError(f"arm {arm} out of range for {b.n_arms} arms")
    if b.sigma == 0:
        return float(b.means[arm])
    return float(rng.normal(b.means[arm], b.sigma))


def regret_weights(b: Bandit) -> np.ndarray:
    """Suboptimality gaps ``mu_star - mu_a``."""
    return b.mu_star - b.means
