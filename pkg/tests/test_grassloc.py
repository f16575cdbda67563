import random
from math import comb

import pytest

from oracles import symmetric_rank_degree, veronese_surface_ved
from vedkit import grassloc
from vedkit.grassloc import (
    GFixedPoint,
    ProblemSize,
    WeightVector,
    aluffi_sum,
    cm_degree_routeA,
    cm_degree_routeB,
    cm_degrees_routeA,
    cm_degrees_routeB,
    euler_G,
    euler_Z,
    fixed_points,
    roots_at,
    ved,
    weight_independence_check,
    z_fixed_points,
)


def polar_degrees(degs, m):
    return [sum((-1) ** (m + j) * comb(j + 1, k + 1) * degs[j] for j in range(k, m + 1))
            for k in range(m + 1)]


def test_problem_size():
    s = ProblemSize(5)
    assert (s.m, s.N, s.dimG, s.dimZ) == (8, 14, 6, 8)
    assert s.m == s.dimZ == s.dimG + 2 and s.N >= s.m + 1
    with pytest.raises(ValueError):
        ProblemSize(2)


def test_fixed_points():
    assert [(p.i, p.j) for p in fixed_points(3)] == [(1, 2), (1, 3), (2, 3)]
    assert len(fixed_points(4)) == 6
    assert len(fixed_points(10)) == 45
    with pytest.raises(ValueError, match="n too small"):
        fixed_points(2)


def test_roots_at():
    w = WeightVector((1, 2, 3))
    r = roots_at(GFixedPoint(1, 2), w, sigma=-1)
    assert r.rootsUdual == (-1, -2)
    assert r.rootsQdual == (-3,)
    assert r.rootsSym2Udual == (-2, -3, -4)
    assert r.rootsUQdual == (-4, -5)
    assert roots_at(GFixedPoint(1, 3), w, sigma=-1).rootsSym2Udual == (-2, -4, -6)
    flipped = roots_at(GFixedPoint(1, 2), w, sigma=+1)
    assert flipped.rootsUdual == (1, 2) and flipped.rootsSym2Udual == (2, 3, 4)
    assert flipped.rootsUQdual == (4, 5)


def test_roots_ranks():
    r = roots_at(GFixedPoint(2, 4), WeightVector.default(6))
    assert list(map(len, (r.rootsUdual, r.rootsQdual, r.rootsSym2Udual, r.rootsUQdual))) == [2, 4, 3, 8]


@pytest.mark.parametrize(
    "p, w, expected",
    [((1, 2), (1, 2, 3), 2), ((2, 3), (1, 2, 3), 2), ((1, 2), (1, 2, 3, 4), 12)],
)
def test_euler_G(p, w, expected):
    assert euler_G(GFixedPoint(*p), WeightVector(w)) == expected


def test_z_fixed_points_and_euler():
    w = WeightVector((1, 2, 3))
    zs = z_fixed_points(GFixedPoint(1, 2), w)
    assert [z.xiValue for z in zs] == [2, 3, 4]
    # base Euler 2 times (w' - w) over the other two lines, w = -2: (-3+2)(-4+2) = 2
    assert euler_Z(zs[0], w) == 4


def test_duplicate_weights_rejected():
    with pytest.raises(ValueError):
        WeightVector((1, 1, 2))


def test_n3_anchor():
    res = ved(3)
    assert res.ved == 13
    assert res.degs[4] == 3
    assert res.degs == [3, 6, 10, 9, 3]


def test_n3_matches_dual_veronese_oracle():
    assert ved(3).ved == veronese_surface_ved()


@pytest.mark.parametrize("n", range(3, 11))
def test_fundamental_class_is_harris_tu_degree(n):
    assert ved(n).degs[-1] == symmetric_rank_degree(n, 2)


@pytest.mark.parametrize("n", range(3, 9))
def test_first_polar_degree_is_dual_degree(n):
    # the dual of rank <= 2 is rank <= n - 2; its degree is the lowest nonzero polar degree
    deltas = [d for d in polar_degrees(ved(n).degs, 2 * n - 2) if d]
    assert deltas[0] == symmetric_rank_degree(n, n - 2)
    assert deltas[-1] == symmetric_rank_degree(n, 2)


def test_n4_self_dual_polar_degrees_palindromic():
    deltas = [d for d in polar_degrees(ved(4).degs, 6) if d]
    assert deltas == deltas[::-1]


@pytest.mark.parametrize("n", range(3, 9))
def test_routes_agree(n):
    size = ProblemSize(n)
    a, b = cm_degrees_routeA(size), cm_degrees_routeB(size)
    assert a == b
    assert all(x.denominator == 1 and x >= 0 for x in a)


def test_single_degree_entry_points():
    size = ProblemSize(3)
    assert cm_degree_routeA(size, 4) == 3
    assert cm_degree_routeB(size, 4) == 3
    size5 = ProblemSize(5)
    assert cm_degree_routeA(size5, 0) == cm_degree_routeB(size5, 0)
    with pytest.raises(ValueError):
        cm_degree_routeA(size, 5)


def test_sign_convention_is_immaterial():
    for n in (3, 4, 5):
        size = ProblemSize(n)
        assert cm_degrees_routeA(size, sigma=-1) == cm_degrees_routeA(size, sigma=+1)


def test_grading_identity():
    for n in range(3, 9):
        size = ProblemSize(n)
        for j in range(size.m + 1):
            for _, i in grassloc._gr_integrand_terms(size, j):
                assert i + (size.m - i - 2) == size.dimG


def test_aluffi_weights():
    assert aluffi_sum([3, 6, 10, 9, 3], 4) == 3 - 3 * 6 + 7 * 10 - 15 * 9 + 31 * 3 == 13


def test_ved_verify_mode():
    res = ved(5, verify=True)
    assert res.verified and res.ved == 1042


def test_route_mismatch_is_reported(monkeypatch):
    def broken(size, w=None, sigma=grassloc.SIGMA):
        out = cm_degrees_routeA(size, w, sigma)
        out[2] += 1
        return out

    monkeypatch.setattr(grassloc, "cm_degrees_routeB", broken)
    with pytest.raises(grassloc.RouteMismatch) as exc:
        ved(3, verify=True)
    assert exc.value.j == 2


def test_weight_independence():
    assert weight_independence_check(3, 3, seed=1)
    assert weight_independence_check(5, 2, seed=2)
    with pytest.raises(ValueError):
        weight_independence_check(3, 1, seed=0)


def test_weight_independence_duplicate_weights_error():
    with pytest.raises(ValueError):
        weight_independence_check(3, 2, 0, weights=[WeightVector((1, 2, 3)), WeightVector((4, 4, 5))])


def test_random_weights_same_degrees():
    rng = random.Random(7)
    for n in (3, 4, 6):
        base = ved(n).degs
        for _ in range(2):
            w = WeightVector.random(n, rng)
            assert ved(n, w).degs == base
            assert cm_degrees_routeB(ProblemSize(n), w) == [grassloc.Rat(d) for d in base]


@pytest.mark.parametrize("n", range(3, 13))
def test_ved_dominates_degree_of_variety(n):
    # all polar degrees are non-negative and the last one is deg M
    res = ved(n)
    assert all(d >= 0 for d in polar_degrees(res.degs, 2 * n - 2))
    assert res.ved >= comb(2 * n - 2, n - 1) // 2 == res.degs[-1]
