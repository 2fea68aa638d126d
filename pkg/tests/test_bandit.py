import numpy as np
import pytest

from relweights.bandit import Bandit, agent_rngs, pull, regret_weights, rng_stream, sample_bandit


def test_tie_rule():
    b = Bandit([0.1, 0.9, 0.9])
    assert b.best_arm == 1
    assert b.mu_star == 0.9


def test_sample_deterministic():
    a = sample_bandit(100, rng_stream(42, 0, 0))
    b = sample_bandit(100, rng_stream(42, 0, 0))
    assert np.array_equal(a.means, b.means)
    c = sample_bandit(100, rng_stream(42, 1, 0))
    assert not np.array_equal(a.means, c.means)


def test_sample_moments():
    b = sample_bandit(100, rng_stream(0, 0, 0))
    assert b.n_arms == 100
    assert abs(b.means.mean()) <= 0.4


def test_sample_rejects_one_arm():
    with pytest.raises(ValueError):
        sample_bandit(1, rng_stream(0))


def test_bandit_validation():
    with pytest.raises(ValueError):
        Bandit([1.0])
    with pytest.raises(ValueError):
        Bandit([0.0, 1.0], sigma=-1)


def test_pull_noiseless():
    b = Bandit([0.25, -1.5], sigma=0.0)
    rng = rng_stream(3)
    assert pull(b, 1, rng) == -1.5
    assert pull(b, 0, rng) == 0.25


def test_pull_clt():
    b = Bandit([0.3, -0.7], sigma=1.0)
    rng = rng_stream(11, 0, 1)
    n = 100_000
    xs = np.array([pull(b, 1, rng) for _ in range(n)])
    assert abs(xs.mean() - (-0.7)) <= 4 / np.sqrt(n)
    # variance moment: SE of the sample variance of a normal is sigma^2 sqrt(2/(n-1))
    assert abs(xs.var(ddof=1) - 1.0) <= 4 * np.sqrt(2 / (n - 1))


def test_pull_out_of_range():
    b = Bandit([0.0, 1.0])
    with pytest.raises(IndexError):
        pull(b, 2, rng_stream(0))
    with pytest.raises(IndexError):
        pull(b, -1, rng_stream(0))


@pytest.mark.parametrize(
    "means, gaps",
    [([0, 1], [1, 0]), ([0.5, 0.5, 0.5], [0, 0, 0]), ([0.2, -0.3, 0.9], [0.7, 1.2, 0.0])],
)
def test_regret_weights(means, gaps):
    assert np.allclose(regret_weights(Bandit(means)), gaps, atol=1e-15)


def test_streams_independent_per_agent():
    rngs = agent_rngs(5, 0, 3)
    draws = [r.standard_normal(4) for r in rngs]
    assert not np.array_equal(draws[0], draws[1])
    again = [r.standard_normal(4) for r in agent_rngs(5, 0, 3)]
    assert all(np.array_equal(a, b) for a, b in zip(draws, again))
    # the bandit stream (0) never coincides with an agent stream
    assert not np.array_equal(rng_stream(5, 0, 0).standard_normal(4), draws[0])
