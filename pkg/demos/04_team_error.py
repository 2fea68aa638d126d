# coding: utf-8

# # Cooperative bandits on a constrained network
#
# Each agent runs a UCB rule on running-consensus estimates of every arm's
# reward sum and pull count. Better mixing weights should make the team agree
# on the best arm's mean sooner. This runs a small Monte-Carlo comparison on a
# three-cluster network (a few minutes at 100 runs).

# In[1]:

import numpy as np

from relweights.bandit import agent_rngs, rng_stream, sample_bandit
from relweights.coopucb2 import AlgoParams, run_episode
from relweights.harness import config_from_dict, simulate
from relweights.metrics import group_regret
from relweights.weights import kappa_weights
from relweights.graph import gen_clustered


# One episode first. delta is the team's average error on the best arm.

# In[2]:

g = gen_clustered(3, 5)
b = sample_bandit(100, rng_stream(0, 0, 0))
logs = run_episode(g, kappa_weights(g), b, AlgoParams(), 1000, agent_rngs(0, 0, g.m))
print(len(logs), logs[0].t, logs[-1].t)
print("delta at t=101, 500, 1000:", logs[0].delta, logs[399].delta, logs[-1].delta)
print("group regret:", group_regret(logs, b)[-1])


# Now the comparison: same bandits and reward noise for every method.

# In[3]:

cfg = config_from_dict({
    "network": "cluster3x5",
    "methods": ["kappa", "fmmc", "fdla"],
    "runs": 100,
    "seed": 0,
    "out": "team_error_results",
})
res = simulate(cfg)


# In[4]:

t0 = cfg.n_arms + 1
for label, curve in res.curves.items():
    s = res.settling[label]
    peak = np.argmax(np.abs(curve.mean))
    print(f"{label:>10}: rho={res.weights[label].rho:.4f} peak |delta| {abs(curve.mean[peak]):.3f} "
          f"at t={t0 + peak}, settles at t={None if s is None else t0 + s}, "
          f"regret {res.final_regret[label]:.0f}")
print("CSV files in", cfg.out)
