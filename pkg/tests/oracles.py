"""Independent reference computations used to freeze expected values.

None of these share code paths with the package under test.
"""
from fractions import Fraction
from itertools import combinations
from math import comb, prod

import numpy as np


def elem_sym_bruteforce(roots, a):
    return sum((prod(c) for c in combinations(roots, a)), Fraction(0))


def newton_identity_check(roots):
    """e_k from power sums via Newton's identities: k e_k = sum (-1)^{i-1} e_{k-i} p_i."""
    p = [sum(Fraction(r) ** i for r in roots) for i in range(len(roots) + 1)]
    e = [Fraction(1)]
    for k in range(1, len(roots) + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)) / k)
    return e


def symmetric_rank_degree(n, r):
    """Harris-Tu: degree of symmetric n x n matrices of rank <= r."""
    d = Fraction(1)
    for a in range(n - r):
        d *= Fraction(comb(n + a, n - r - a), comb(2 * a + 1, a))
    return d


def veronese_surface_ved():
    """vED of v_2(P^2) from its smooth tangent bundle: c(T P^2) = (1+h)^3, H = 2h.

    The dual of v_2(P^2) is the 3 x 3 symmetroid, and polar degrees are
    symmetric under projective duality, so this equals vED of the symmetroid.
    """
    m = 2
    c = [comb(3, k) for k in range(3)]  # c_k(T) = binom(3, k) h^k
    # deg(c_j^Ma . H^j) = deg(c_{m-j}(T) . (2h)^j) on P^2
    degs = [c[m - j] * 2**j for j in range(m + 1)]
    return sum((-1) ** (m + j) * (2 ** (j + 1) - 1) * d for j, d in enumerate(degs))


def central_difference_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=complex)
    g = np.zeros(len(x), dtype=complex)
    for k in range(len(x)):
        e = np.zeros(len(x))
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def det_via_numpy(x):
    x = np.asarray(x)
    X = np.array([[x[0], x[1], x[2]], [x[1], x[3], x[4]], [x[2], x[4], x[5]]])
    return np.linalg.det(X)
