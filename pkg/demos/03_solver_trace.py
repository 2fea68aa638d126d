# coding: utf-8

# # Optimizing the weights
#
# The objective is the spectral norm of P(w) - J with P(w) = I - B diag(w) B^T.
# It is convex but not smooth. A projected subgradient phase gets close, then
# an ellipsoid phase closes the gap and certifies it with a lower bound.

# In[1]:

import numpy as np

from relweights.graph import gen_clustered
from relweights.optimizer import SolveOptions, objective_and_subgradient, project_feasible, solve_fdla, solve_fmmc
from relweights.weights import max_degree_weights


# In[2]:

g = gen_clustered(2, 5)
w0 = max_degree_weights(g).edge_weights
value, grad = objective_and_subgradient(w0, g)
print("max-degree start:", value)
print("largest subgradient entries:", np.sort(np.abs(grad))[-3:])


# Projection onto the FMMC set: nonnegative weights, and the weights on the
# edges at each vertex may not sum to more than 1.

# In[3]:

w = np.full(g.n_edges, 0.4)
wp = project_feasible(w, g)
sums = np.zeros(g.m)
for k, (i, j) in enumerate(g.edges):
    sums[i] += wp[k]
    sums[j] += wp[k]
print("max vertex load after projection:", sums.max())


# In[4]:

opts = SolveOptions(record_trace=True)
fm = solve_fmmc(g, opts)
fd = solve_fdla(g, opts)
for name, res in (("fmmc", fm), ("fdla", fd)):
    print(f"{name}: rho={res.best_objective:.6f} lower bound={res.lower_bound:.6f} "
          f"iterations={res.iterations_used} converged={res.converged}")


# The best-so-far objective never increases. A few samples from the FMMC trace:

# In[5]:

trace = np.array([v for _, v in fm.objective_trace])
for t in (1, 10, 100, 1000, 10000, len(trace)):
    print(t, trace[t - 1])


# FDLA's optimum loads some vertices past 1: their incident weights sum to
# more than one, which leaves a negative self-weight on the diagonal of P.

# In[6]:

print(np.round(fd.weights.edge_weights, 3))
print(np.round(np.diag(fd.weights.p), 3))
