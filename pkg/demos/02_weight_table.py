# coding: utf-8

# # Comparing weight designs
#
# Four closed-form designs (a small constant step kappa, the best constant
# edge weight, max-degree and local-degree weights) next to the two optimized
# ones. FMMC keeps P nonnegative (a Markov chain); FDLA lets weights go
# negative and can therefore mix faster.

# In[1]:

from relweights.harness import convergence_table, resolve_network, write_table
from relweights.weights import best_constant_weights, validate


# In[2]:

networks = ["complete5", "star5", "cluster2"]
table = convergence_table(networks)

print(f"{'method':>14}" + "".join(f"{n:>22}" for n in networks))
for label, row in table.items():
    cells = ""
    for rho, tau in row.values():
        cells += f"{rho:>11.4g}{tau:>11.4g}"
    print(f"{label:>14}{cells}")


# The optimal constant step often pushes some diagonal entries below zero, so
# it is a signed design even though it comes from a closed form.

# In[3]:

w = best_constant_weights(resolve_network("star5"))
print(w.p.round(3))
print("nonneg:", validate(w, "nonneg").passed, " signed:", validate(w, "signed").passed)


# The same table as CSV, ready for a spreadsheet.

# In[4]:

write_table(table, "weight_table.csv")
print(open("weight_table.csv").read())
