# coding: utf-8

# # Virtual ED degree of rank-two symmetric matrices
#
# The variety of symmetric n x n matrices of rank at most 2 is the secant
# variety of the Veronese embedding of P^{n-1}.  Its virtual ED degree is an
# alternating weighted sum of Chern-Mather degrees, and those degrees come out
# of torus localization on the Kempf resolution over Gr(2, n).

# In[1]:

from vedkit import grassloc
from vedkit.grassloc import ProblemSize, WeightVector


# The smallest case, 3 x 3 matrices.  The last entry of the degree vector is
# the degree of the cubic determinant hypersurface.

# In[2]:

res = grassloc.ved(3)
print(res.ved, res.degs)


# There are two independent ways to get each degree: push the integrand down to
# the Grassmannian, or localize directly on the resolution.  They have to agree
# term by term.

# In[3]:

size = ProblemSize(5)
print([int(d) for d in grassloc.cm_degrees_routeA(size)])
print([int(d) for d in grassloc.cm_degrees_routeB(size)])


# The torus weights are an auxiliary choice.  Any distinct integers give the
# same rational sum.

# In[4]:

for w in [(1, 2, 3, 4, 5), (7, -3, 11, 0, 2), (100, 1, 50, 9, 4)]:
    print(w, grassloc.ved(5, WeightVector(w)).ved)


# In[5]:

for n in range(3, 11):
    print(n, grassloc.ved(n).ved)
