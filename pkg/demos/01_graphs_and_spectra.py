# coding: utf-8

# # Graphs, Laplacians and convergence factors
#
# A consensus network is an undirected graph. Every weight design below is a
# symmetric matrix P that agents use to mix their neighbours' estimates, and how
# quickly repeated mixing reaches the global average is governed by the
# spectrum of P - (1/M)11^T.

# In[1]:

import numpy as np

from relweights.graph import gen_clustered, gen_complete, gen_star, incidence, laplacian
from relweights.spectral import convergence_factor, convergence_time, sym_eigs


# The two small networks: all-to-all and a star with vertex 0 as the hub.

# In[2]:

k5 = gen_complete(5)
star = gen_star(5)
print(laplacian(star))


# The incidence matrix has one column per edge, so B B^T rebuilds the Laplacian.

# In[3]:

b = incidence(star)
print(b)
print(np.array_equal(b @ b.T, laplacian(star)))


# The eigenvalues of the K5 Laplacian are 5 (four times) and 0. They come
# from a small Jacobi solver in the package.

# In[4]:

print(sym_eigs(laplacian(k5)).eigenvalues)


# A clustered network joins k complete clusters through one gateway each to a
# single parent vertex. Dropping the parent splits the graph.

# In[5]:

g = gen_clustered(3, 5)
print(g.m, g.n_edges, g.degrees[-1])
print(g.connected, g.without_vertex(g.m - 1).connected)


# rho is the spectral radius of P - J, and tau = 1/ln(1/rho) is the number of
# mixing steps per e-fold reduction of the disagreement.

# In[6]:

p = np.eye(5) - laplacian(star) / 4
rho = convergence_factor(p)
print(rho, convergence_time(rho))

# a disagreement vector shrinks by about rho per step
x = np.array([1.0, -2.0, 0.5, 0.0, 0.5])
for t in range(6):
    print(t, np.abs(x - x.mean()).max())
    x = p @ x
