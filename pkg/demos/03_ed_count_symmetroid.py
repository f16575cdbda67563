# coding: utf-8

# # Counting ED-critical points numerically
#
# For n = 3 the variety is the hypersurface det X = 0 in the six-dimensional
# space of symmetric matrices.  Critical points of the squared distance
# q(x - u) satisfy det X = 0 and q (x - u) = lambda grad det X: seven cubics
# in seven unknowns, solved here by a total-degree homotopy with 3^7 = 2187
# paths.  Each run takes a few seconds per thousand paths.

# In[1]:

import numpy as np

from vedkit.edlagrange import build_system, bw_metric, random_metric, random_target
from vedkit.pathtrack import ed_count


# A generic scalar product reaches the virtual ED degree.

# In[2]:

metric, u = random_metric(0), random_target(1)
generic = ed_count(metric, u, seed=2)
print(generic.count, generic.statusCounts)


# In[3]:

system = build_system(metric, u)
print(max(np.max(np.abs(system.evaluate(z))) for z in generic.solutions))


# The Bombieri-Weyl product is special: it is invariant under orthogonal
# changes of coordinates, and only a few critical points survive.

# In[4]:

bw = ed_count(bw_metric(), u, seed=2)
print(bw.count)


# Those are the rank-two truncations of the spectral decomposition of U, so the
# X parts should have rank 2 and commute with U.

# In[5]:

from vedkit.edlagrange import to_matrix

U = to_matrix(u.u)
for z in bw.solutions:
    X = to_matrix(z[:6])
    print(np.round(np.linalg.svd(X, compute_uv=False), 6), np.abs(X @ U - U @ X).max() < 1e-8)
