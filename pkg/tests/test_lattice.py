import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdir import lattice as lm
from latdir.contfrac import biased_number, constant_cf
from latdir.lattice import (CandidateBudgetExceeded, DegenerateRational,
                            Lattice, RegionSpec, UnboundedRegion,
                            count_approximates, count_region, enumerate_in_box,
                            g_flow, lattice_from_x, region_contains,
                            region_volume, shell_count, thinning_contains)
from latdir.sphere import Cap, Hemisphere, SignSet, full_sphere

Z2 = Lattice(np.eye(2))
Z3 = Lattice(np.eye(3))
MINUS = SignSet(frozenset({-1}))


def random_unimodular(rng, n, shears=8):
    B = np.eye(n)
    for _ in range(shears):
        i, j = rng.choice(n, 2, replace=False)
        S = np.eye(n)
        S[i, j] = rng.integers(-2, 3)
        B = B @ S
    return Lattice(B)


# -- lattices and the flow ----------------------------------------------------

def test_lattice_from_x_examples():
    assert np.allclose(lattice_from_x(0.0).basis, np.eye(2))
    pts = enumerate_in_box(lattice_from_x(0.5), [-0.6, 0.5], [0.6, 1.5])
    assert sorted(map(tuple, pts)) == [(-0.5, 1.0), (0.5, 1.0)]
    lat = lattice_from_x((0.3, 0.7))
    pts = enumerate_in_box(lat, [0.25, 0.65, 0.9], [0.35, 0.75, 1.1])
    assert sorted(map(tuple, np.round(pts, 12))) == [(0.3, 0.7, 1.0)]


def test_lattice_validation():
    with pytest.raises(ValueError):
        Lattice(2 * np.eye(2))
    with pytest.raises(ValueError):
        Lattice(np.ones((2, 3)))
    Lattice(2 * np.eye(2), check=False)  # explicit bypass allowed


def test_g_flow():
    assert np.allclose(g_flow(0.0, 2), np.eye(3))
    assert np.allclose(np.diag(g_flow(math.log(2), 1)), [2.0, 0.5])
    for d in (1, 2, 3):
        assert np.linalg.det(g_flow(1.3, d)) == pytest.approx(1.0, abs=1e-12)


def test_g_flow_maps_shells():
    # v in Q_{i+1} iff g_s v in Q_i for s = log2/d
    rng = np.random.default_rng(3)
    for d in (1, 2):
        s = math.log(2) / d
        g = g_flow(s, d)
        spec_lo = RegionSpec("Q", d, T=float(2**3), c=1.0, norm="sup")
        spec_hi = RegionSpec("Q", d, T=float(2**4), c=1.0, norm="sup")
        for _ in range(200):
            v = np.concatenate([rng.uniform(-1.2, 1.2, d), rng.uniform(7.0, 17.0, 1)])
            assert (region_contains(spec_hi, v) == "in") == (region_contains(spec_lo, g @ v) == "in")


# -- regions -------------------------------------------------------------------

def test_region_contains_examples():
    assert region_contains(RegionSpec("P", 1, T=50, c=1, norm="sup"), [0.01, 40]) == "in"
    assert region_contains(RegionSpec("P", 1, T=50, c=1, norm="sup"), [0.1, 40]) == "out"
    spec = RegionSpec("R", 1, T=10, c=1, eps=0.5, norm="sup", A=MINUS)
    assert region_contains(spec, [0.0, 7]) == "degenerate"


def test_region_validation():
    with pytest.raises(ValueError):
        RegionSpec("X", 1, T=10)
    with pytest.raises(ValueError):
        RegionSpec("R", 1, T=10, eps=1.5)
    with pytest.raises(UnboundedRegion):
        count_region(Z2, RegionSpec("R", 1, T=10, eps=0.0))
    with pytest.raises(UnboundedRegion):
        region_volume(RegionSpec("R", 1, T=10, eps=0.0))


def test_region_volumes():
    assert region_volume(RegionSpec("P", 1, T=2, c=1)) == pytest.approx(2 * math.log(2))
    spec = RegionSpec("R", 1, T=123.0, c=1, eps=1 / math.e, A=MINUS)
    assert region_volume(spec) == pytest.approx(1.0)
    # scale invariance in T for kind R
    a = region_volume(RegionSpec("R", 2, T=5.0, c=0.7, eps=0.2))
    b = region_volume(RegionSpec("R", 2, T=700.0, c=0.7, eps=0.2))
    assert a == b
    # restricting to A scales by vol(A)
    p_all = region_volume(RegionSpec("P", 2, T=2.0, c=1.0))
    p_hemi = region_volume(RegionSpec("P", 2, T=2.0, c=1.0, A=Hemisphere((1.0, 0.0))))
    assert p_hemi / p_all == pytest.approx(0.5)


def test_region_volume_monte_carlo_oracle():
    # hit-or-miss volume over the bounding box
    spec = RegionSpec("R", 2, T=1.0, c=1.0, eps=0.25)
    lo, hi = spec.bounding_box()
    rng = np.random.default_rng(42)
    M = 200_000
    pts = rng.uniform(lo, hi, size=(M, 3))
    v1 = pts[:, :2]
    hits = (np.sum(v1 * v1, axis=1) * pts[:, 2] <= spec.c) & (pts[:, 2] >= spec.eps)
    box_vol = float(np.prod(hi - lo))
    est = hits.mean() * box_vol
    se = box_vol * math.sqrt(hits.mean() * (1 - hits.mean()) / M)
    assert abs(est - region_volume(spec)) <= 4 * se


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 3))
@settings(deadline=None)
def test_thinning_cone_negation_symmetric(a, b, c):
    v = [a, b]
    assert thinning_contains(v, 1, c) == thinning_contains([-a, -b], 1, c)


# -- enumeration ---------------------------------------------------------------

def test_enumerate_examples():
    assert len(enumerate_in_box(Z2, [-1.5, -1.5], [1.5, 1.5])) == 8
    assert len(enumerate_in_box(Z2, [0.2, 0.2], [0.8, 0.8])) == 0


def test_enumerate_budget():
    with pytest.raises(CandidateBudgetExceeded):
        enumerate_in_box(Z2, [-500.0, -500.0], [500.0, 500.0], budget=100)


def test_enumerate_rejects_bad_box():
    with pytest.raises(ValueError):
        enumerate_in_box(Z2, [0.0, 0.0], [-1.0, 1.0])
    with pytest.raises(ValueError):
        enumerate_in_box(Z2, [0.0], [1.0])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_enumerate_exhaustive_vs_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    lat = random_unimodular(rng, n)
    lo = rng.uniform(-4, 0, n)
    hi = lo + rng.uniform(0.5, 5, n)
    got = sorted(map(tuple, np.round(enumerate_in_box(lat, lo, hi), 9)))
    # brute-force radius from the preimage of the box corners
    inv = np.linalg.inv(lat.basis)
    rad = int(np.ceil(np.max(np.abs(inv) @ np.maximum(np.abs(lo), np.abs(hi))))) + 1
    if rad > 70:  # keep the integer grid affordable; the skew cases are still covered
        rad = 0
    if rad:
        axes = [np.arange(-rad, rad + 1)] * n
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        w = grid @ lat.basis.T
        mask = np.all(w >= lo, axis=1) & np.all(w <= hi, axis=1) & np.any(grid != 0, axis=1)
        want = sorted(map(tuple, np.round(w[mask], 9)))
        assert got == want


def test_enumerate_skewed_needle_preimage():
    # a g_t-distorted basis produces needle preimages; counts must still match
    # the g_t equivariance identity
    x = 0.375
    lat = lattice_from_x(x)
    spec_T = RegionSpec("R", 1, T=16.0, c=1.0, eps=0.25, norm="sup")
    direct = count_region(lat, spec_T)
    g = np.diag([16.0, 1.0 / 16.0])  # e^t = T for d = 1, exactly representable
    moved = Lattice(g @ lat.basis, check=False)
    spec_1 = RegionSpec("R", 1, T=1.0, c=1.0, eps=0.25, norm="sup")
    assert count_region(moved, spec_1).total == direct.total


# -- counting -------------------------------------------------------------------

def test_count_region_examples():
    spec = RegionSpec("P", 1, T=10, c=1, norm="sup")
    assert count_region(Z2, spec).total == 9
    res = count_region(Z2, RegionSpec("P", 1, T=10, c=1, norm="sup", A=MINUS))
    assert (res.total, res.in_A, res.degenerate) == (9, 0, 9)


def test_count_region_euclidean_boundary_z3():
    # boundary points (+-1, 0, 1), (0, +-1, 1) satisfy ||v1||^2 v2 = 1 <= c
    res = count_region(Z3, RegionSpec("R", 2, T=1.0, c=1.0, eps=0.9), want_witnesses=True)
    assert res.total == 5
    assert sorted(res.witnesses) == [(-1.0, 0.0, 1.0), (0.0, -1.0, 1.0),
                                     (0.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 0.0, 1.0)]


def test_count_region_generic_matches_horospherical():
    # same lattice through both code paths
    x = 0.37
    horo = lattice_from_x(x)
    generic = Lattice(horo.basis.copy())  # plain tag: box enumeration path
    for spec in (RegionSpec("P", 1, T=40, c=1, norm="sup"),
                 RegionSpec("R", 1, T=60, c=1, eps=0.3, norm="sup"),
                 RegionSpec("P", 1, T=25, c=0.8, norm="euclidean", A=MINUS)):
        a = count_region(horo, spec)
        b = count_region(generic, spec)
        assert (a.total, a.in_A, a.degenerate) == (b.total, b.in_A, b.degenerate)


def test_count_approximates_biased_convergents_all_counted():
    b = biased_number()
    res = count_approximates(b, 72, C=1, A=SignSet(frozenset({-1, 1})), want_witnesses=True)
    hit_qs = {q for q, _ in res.witnesses}
    for n in (1, 2, 3):
        assert b.convergent(n).q in hit_qs
    assert res.in_A == res.total and res.degenerate == 0


def test_count_approximates_golden_t1():
    res = count_approximates(constant_cf(1), 1, C=1)
    assert res.total == 2  # q = 1 with p = 0 and p = 1


def test_count_approximates_constant_four_convergents():
    cf = constant_cf(4)
    res = count_approximates(cf, 72, C=1, want_witnesses=True)
    hit_qs = {q for q, _ in res.witnesses}
    assert {4, 17, 72} <= hit_qs  # q_1..q_3 all counted


def test_rational_x_near_points_sit_on_the_line():
    # for x = 1/2 the only gaps of q x to the integers are 0 and 1/2, so any
    # point with |v_1| < 1/2 lies exactly on the line through (x, 1)
    res = count_approximates(0.5, 100, C=0.499, want_witnesses=True)
    assert res.total == res.degenerate > 0
    for _, v1, unit in res.witnesses:
        assert v1[0] == 0.0 and unit is None


def test_count_approximates_full_sphere_ratio_one():
    res = count_approximates(0.7317381, 500, A=full_sphere(1))
    assert res.in_A == res.total and res.degenerate == 0


def test_exact_and_float_paths_agree():
    b = biased_number()
    exact = count_approximates(b, 3000, C=1, A=MINUS)
    floaty = count_approximates(float(b), 3000, C=1, A=MINUS)
    assert (exact.total, exact.in_A) == (floaty.total, floaty.in_A)


def test_approximates_vs_region_count_differ_by_q1():
    b = biased_number()
    n_approx = count_approximates(b, 72, C=1).total
    n_region = count_region(lattice_from_x(float(b)), RegionSpec("P", 1, T=72, c=1, norm="sup")).total
    q1_solutions = count_approximates(b, 1, C=1).total
    assert n_approx - n_region == q1_solutions == 2


def test_degenerate_rational_direction_raises():
    with pytest.raises(DegenerateRational):
        count_approximates(0.5, 10, A=MINUS)
    res = count_approximates(0.5, 10)
    assert res.degenerate > 0


def test_count_approximates_d2():
    res = count_approximates(np.array([0.3137515, 0.7390812]), 2000, norm="euclidean",
                             C=1.0, A=Hemisphere((1.0, 0.0)))
    comp = count_approximates(np.array([0.3137515, 0.7390812]), 2000, norm="euclidean",
                              C=1.0, A=Hemisphere((-1.0, 0.0)))
    assert res.total == comp.total
    assert res.in_A + comp.in_A == res.total  # partition up to the seam (measure zero)


# -- shells ---------------------------------------------------------------------

def test_shell_examples():
    assert shell_count(Z2, 2, c=1, norm="sup").total == 2  # (0, 3), (0, 4)
    total = sum(shell_count(Z2, i, c=1, norm="sup").total for i in (1, 2, 3))
    assert total == count_region(Z2, RegionSpec("P", 1, T=8, c=1, norm="sup")).total == 7


def test_shell_additivity_random_lattice():
    rng = np.random.default_rng(10)
    lat = lattice_from_x(float(rng.random()))
    N = 9
    total = sum(shell_count(lat, i, c=1, norm="sup").total for i in range(1, N + 1))
    assert total == count_region(lat, RegionSpec("P", 1, T=float(2**N), c=1, norm="sup")).total


def test_count_result_json():
    res = count_region(Z2, RegionSpec("P", 1, T=10, c=1, norm="sup", A=MINUS))
    obj = res.to_obj()
    assert obj == {"total": 9, "in_A": 0, "degenerate": 9}
