# coding: utf-8

# # Reusing solutions with a parameter homotopy
#
# Once one generic instance is solved, any other instance of the same family is
# reached by tracking only its 13 solutions instead of 2187 start paths.

# In[1]:

import time

from vedkit.edlagrange import build_system, bw_metric, diag_family_metric, random_metric, random_target
from vedkit.pathtrack import ed_count, parameter_homotopy


# In[2]:

metric, u = random_metric(5), random_target(6)
base = build_system(metric, u)
t0 = time.perf_counter()
sols = ed_count(metric, u, seed=7)
print(sols.count, f"{time.perf_counter() - t0:.1f}s")


# In[3]:

for name, m in [("generic", random_metric(8)), ("bombieri-weyl", bw_metric()),
                ("diag 1..6", diag_family_metric([1, 2, 3, 4, 5, 6]))]:
    t0 = time.perf_counter()
    out = parameter_homotopy(base, sols, m, random_target(9), seed=10)
    print(name, out.count, out.statusCounts, f"{time.perf_counter() - t0:.2f}s")
