import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdir import siegel as sg
from latdir.lattice import Lattice, RegionSpec, lattice_from_x, region_volume
from latdir.siegel import (BoxIndicator, MCEstimate, RadialIndicator,
                           RegionIndicator, ScaledSum, ZeroDenominator,
                           haar_rotation, siegel_transform, spherical_average,
                           thm3_ratio)
from latdir.sphere import Complement, Hemisphere, SignSet, full_sphere

Z2 = Lattice(np.eye(2))
Z3 = Lattice(np.eye(3))


# -- test functions -----------------------------------------------------------

def test_box_indicator_transform():
    assert siegel_transform(BoxIndicator((-1.5, -1.5), (1.5, 1.5)), Z2) == 8
    assert siegel_transform(BoxIndicator((-2.5, -2.5), (2.5, 2.5)), Z2) == 24


def test_primitive_only():
    f = BoxIndicator((-1.5, -1.5), (1.5, 1.5))
    assert siegel_transform(f, Z2, primitive_only=True) == 8
    g = BoxIndicator((-2.5, -2.5), (2.5, 2.5))
    # drops (+-2, 0), (0, +-2), (+-2, +-2): gcd 2
    assert siegel_transform(g, Z2, primitive_only=True) == 16


def test_region_indicator_integral_matches_volume():
    spec = RegionSpec("R", 2, T=1.0, c=1.0, eps=0.1, A=Hemisphere((1.0, 0.0)))
    ind = RegionIndicator(spec)
    assert ind.integral() == region_volume(spec)
    with pytest.raises(ValueError):
        RegionIndicator(RegionSpec("P", 1, T=2.0))
    with pytest.raises(ValueError):
        RegionIndicator(RegionSpec("R", 1, T=2.0, eps=0.5))


def test_radial_indicator():
    f = RadialIndicator(0.5, 1.5, 2)
    assert f.integral() == pytest.approx(math.pi * (1.5**2 - 0.5**2))
    assert siegel_transform(f, Z2) == 8  # 4 at radius 1, 4 at sqrt(2)
    assert siegel_transform(RadialIndicator(0.5, 1.2, 2), Z2) == 4
    with pytest.raises(ValueError):
        RadialIndicator(2.0, 1.0, 2)


def test_scaled_sum_additivity_exact():
    f1 = BoxIndicator((-1.5, -1.5), (1.5, 1.5))
    f2 = RadialIndicator(0.5, 1.2, 2)
    s = ScaledSum(((2.0, f1), (-3.0, f2)))
    assert s.integral() == pytest.approx(2 * f1.integral() - 3 * f2.integral())
    val = siegel_transform(s, Z2)
    assert val == 2 * siegel_transform(f1, Z2) - 3 * siegel_transform(f2, Z2)


def test_monotone_in_f():
    small = BoxIndicator((-1.2, -1.2), (1.2, 1.2))
    big = BoxIndicator((-2.2, -2.2), (2.2, 2.2))
    rng = np.random.default_rng(0)
    for i in range(10):
        k = haar_rotation(2, np.random.default_rng([9, i]))
        lat = Lattice(k @ Z2.basis, check=False)
        assert siegel_transform(small, lat) <= siegel_transform(big, lat)


def test_radial_rotation_invariance():
    f = RadialIndicator(0.4, 2.3, 3)
    base = siegel_transform(f, Z3)
    for i in range(10):
        k = haar_rotation(3, np.random.default_rng([31, i]))
        assert siegel_transform(f, Lattice(k @ np.eye(3), check=False)) == base


# -- Haar sampler ---------------------------------------------------------------

def test_haar_rotation_orthogonality_and_det():
    for n in (2, 3, 4):
        for i in range(50):
            K = haar_rotation(n, np.random.default_rng([4, n, i]))
            assert np.max(np.abs(K.T @ K - np.eye(n))) <= 1e-10
            assert abs(np.linalg.det(K) - 1.0) <= 1e-10
    with pytest.raises(ValueError):
        haar_rotation(1, np.random.default_rng(0))


def test_haar_first_column_statistics():
    M = 3000
    n = 3
    cols = np.array([haar_rotation(n, np.random.default_rng([8, i]))[:, 0] for i in range(M)])
    assert np.all(np.abs(cols.mean(axis=0)) <= 4 / math.sqrt(M))
    # invariance: K @ u for fixed u matches the first-column distribution
    u = np.array([0.6, 0.0, 0.8])
    rotated = np.array([haar_rotation(n, np.random.default_rng([9, i])) @ u for i in range(M)])
    for series in (cols[:, 0], rotated[:, 0]):
        assert abs(series.mean()) <= 4 / math.sqrt(M)
        assert abs((series**2).mean() - 1.0 / n) <= 4 / math.sqrt(M)


# -- spherical averages -----------------------------------------------------------

def test_spherical_average_t0_radial_zero_variance():
    est = spherical_average(RadialIndicator(0.5, 1.5, 2), Z2, t=0.0, M=12, seed=5)
    assert est.mean == 8.0 and est.stderr == 0.0
    assert est.integral_reference == pytest.approx(math.pi * 2.0)


def test_spherical_average_seed_determinism():
    f = BoxIndicator((-1.1, -1.1, -1.1), (1.1, 1.1, 1.1))
    a = spherical_average(f, Z3, t=0.7, M=40, seed=11, keep_trace=True)
    b = spherical_average(f, Z3, t=0.7, M=40, seed=11, keep_trace=True)
    assert a.values == b.values and a.mean == b.mean and a.stderr == b.stderr
    c = spherical_average(f, Z3, t=0.7, M=40, seed=12)
    assert c.mean != a.mean  # different stream


def test_spherical_average_threads_match_serial():
    f = BoxIndicator((-1.4, -1.4), (1.4, 1.4))
    a = spherical_average(f, Z2, t=1.1, M=30, seed=2, keep_trace=True)
    b = spherical_average(f, Z2, t=1.1, M=30, seed=2, keep_trace=True, threads=4)
    assert a.values == b.values


def test_spherical_average_converges_to_integral_d1():
    f = BoxIndicator((-0.8, 0.2), (0.8, 1.0))
    est = spherical_average(f, Z2, t=5.0, M=600, seed=13)
    assert abs(est.mean - f.integral()) <= 3 * est.stderr + 0.05 * f.integral()


def test_mc_estimate_validation():
    with pytest.raises(ValueError):
        spherical_average(RadialIndicator(0.1, 0.5, 2), Z2, t=0.0, M=1, seed=0)


# -- paired ratio -----------------------------------------------------------------

def test_ratio_full_sphere_is_one():
    r = thm3_ratio(Z3, full_sphere(2), eps=0.2, t=2.0, M=40, seed=1)
    assert r.ratio == 1.0 and r.stderr == 0.0


def test_ratio_complement_partition_exact():
    A = Hemisphere((0.0, 1.0))
    ra = thm3_ratio(Z3, A, eps=0.15, t=3.0, M=60, seed=21, keep_trace=True)
    rc = thm3_ratio(Z3, Complement(A), eps=0.15, t=3.0, M=60, seed=21, keep_trace=True)
    # same rotation samples: per-sample counts partition the denominator
    # up to directions exactly on the seam (probability zero)
    num_sum = np.array(ra.numerator.values) + np.array(rc.numerator.values)
    assert np.array_equal(num_sum, np.array(ra.denominator.values))
    assert ra.ratio + rc.ratio == pytest.approx(1.0, abs=1e-12)


def test_ratio_d1_sign_sets():
    r = thm3_ratio(Z2, SignSet(frozenset({-1})), eps=0.1, t=5.0, M=400, seed=6)
    assert abs(r.ratio - 0.5) <= 4 * max(r.stderr, 1e-3)
    assert r.vol_reference == 0.5


def test_ratio_zero_denominator():
    with pytest.raises(ZeroDenominator):
        thm3_ratio(Z2, SignSet(frozenset({-1})), eps=0.97, t=0.05, M=4, seed=0)
    with pytest.raises(ValueError):
        thm3_ratio(Z2, SignSet(frozenset({-1})), eps=0.0, t=1.0, M=4, seed=0)


def test_mc_estimate_json():
    est = MCEstimate(1.0, 0.1, 10, 2.0, 7, integral_reference=0.9)
    obj = est.to_obj()
    assert obj["mean"] == 1.0 and obj["seed"] == 7 and "values" not in obj
