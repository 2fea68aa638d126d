"""Team error, group regret, settling time and Monte-Carlo aggregation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ErrorCurve",
    "AggregateCurve",
    "team_error",
    "group_regret",
    "settling_threshold",
    "settling_time",
    "aggregate",
]


@dataclass(frozen=True)
class ErrorCurve:
    delta: np.ndarray
    run: int = 0
    method: str = ""
    network: str = ""


@dataclass(frozen=True)
class AggregateCurve:
    mean: np.ndarray
    stderr: np.ndarray
    runs: int
    method: str = ""
    network: str = ""

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("an aggregate needs at least one run")


def team_error(state, mu_star, best_arm) -> float:
    """Signed team average of ``s_hat / n_hat - mu_star`` on the best arm."""
    n = state.n_hat[:, best_arm]
    if np.any(n <= 0):
        raise ValueError("best-arm pull estimate must be positive for every agent")
    return float(np.mean(state.s_hat[:, best_arm] / n - mu_star))


def group_regret(logs, bandit) -> np.ndarray:
    """Cumulative sum over steps and agents of the gap of each chosen arm."""
    gaps = bandit.mu_star - bandit.means
    per_step = np.array([gaps[np.asarray(e.actions)].sum() for e in logs], dtype=float)
    return np.cumsum(per_step)


def settling_threshold(curves, fraction=0.05, reference="peak") -> float:
    """``fraction`` of the largest error among the compared curves.

    ``reference="peak"`` takes the largest ``|mean error|`` any curve
    reaches; ``reference="final"`` takes the largest last-step value.
    """
    if reference == "peak":
        return fraction * max(float(np.max(np.abs(c.mean))) for c in curves.values())
    if reference == "final":
        return fraction * max(abs(float(c.mean[-1])) for c in curves.values())
    raise ValueError(f"unknown settling reference {reference!r}")


def settling_time(curves, fraction=0.05, reference="peak") -> dict[str, int | None]:
    """Index from which ``|mean error|`` stays at or below the reference threshold.

    The curve has to remain below the threshold through the last step, not
    just touch it. ``None`` means the curve never settles. With
    ``reference="final"`` the worst curve can never settle, and at desk-scale
    run counts the threshold usually sits below the Monte-Carlo noise.
    """
    if not curves:
        raise ValueError("no curves to compare")
    lengths = {len(c.mean) for c in curves.values()}
    if len(lengths) != 1:
        raise ValueError("curves have different lengths")
    threshold = settling_threshold(curves, fraction, reference)
    out = {}
    for name, c in curves.items():
        above = np.flatnonzero(np.abs(c.mean) > threshold)
        if above.size == 0:
            out[name] = 0
        elif above[-1] == len(c.mean) - 1:
            out[name] = None
        else:
            out[name] = int(above[-1] + 1)
    return out


def aggregate(runs) -> AggregateCurve:
    """Pointwise mean and standard error (sample std / sqrt(runs)), reduced in run order."""
    runs = list(runs)
    if not runs:
        raise ValueError("no runs to aggregate")
    lengths = {len(r.delta) for r in runs}
    if len(lengths) != 1:
        raise ValueError("runs have inconsistent lengths")
    data = np.stack([np.asarray(r.delta, dtype=float) for r in runs])
    # NaN marks a step whose error was undefined in that run
    if np.isnan(data).any():
        count = np.sum(~np.isnan(data), axis=0)
        mean = np.nanmean(data, axis=0)
        spread = np.zeros_like(mean)
        if len(runs) > 1:
            with np.errstate(invalid="ignore", divide="ignore"), warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                spread = np.nanstd(data, axis=0, ddof=1)
        stderr = np.where(count > 1, spread, 0.0) / np.sqrt(np.maximum(count, 1))
    elif len(runs) > 1:
        mean = data.mean(axis=0)
        stderr = data.std(axis=0, ddof=1) / np.sqrt(len(runs))
    else:
        mean = data.mean(axis=0)
        stderr = np.zeros_like(mean)
    return AggregateCurve(mean, stderr, len(runs), runs[0].method, runs[0].network)
