"""Siegel transforms, Haar rotations, and spherical averages.

The estimator of interest is the rotation average of a Siegel transform,
(1/M) sum_i f^(g_t k_i Lambda) over Haar-random k_i in SO(d+1); as t grows
it converges to the plain Lebesgue integral of f.  Sampling uses one RNG
stream per sample index so results are independent of execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import (GRAZE_TOL, Lattice, RegionSpec, enumerate_in_box,
                      g_flow, region_volume)
from .sphere import DirectionSet

ORTHO_TOL = 1e-10


class ZeroDenominator(RuntimeError):
    """The denominator estimate vanished (t or M too small for the region)."""


# ---------------------------------------------------------------------------
# test functions: bounded indicators of Jordan-measurable sets

class TestFunction:
    dim: int

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def integral(self) -> float:
        raise NotImplementedError

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class BoxIndicator(TestFunction):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("bad box")

    @property
    def dim(self):
        return len(self.lo)

    def support_box(self):
        return np.array(self.lo), np.array(self.hi)

    def integral(self) -> float:
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))

    def evaluate(self, points):
        lo, hi = self.support_box()
        ok = np.all(points >= lo[None, :], axis=1) & np.all(points <= hi[None, :], axis=1)
        return ok.astype(float)


@dataclass(frozen=True)
class RadialIndicator(TestFunction):
    """Indicator of the closed euclidean annulus r_min <= ||v|| <= r_max."""

    r_min: float
    r_max: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.r_min <= self.r_max:
            raise ValueError("need 0 <= r_min <= r_max")

    def support_box(self):
        r = self.r_max
        return np.full(self.dim, -r), np.full(self.dim, r)

    def integral(self) -> float:
        from .sphere import ball_volume
        return ball_volume(self.dim, self.r_max) - ball_volume(self.dim, self.r_min)

    def evaluate(self, points):
        r = np.sqrt(np.sum(points * points, axis=1))
        return ((r >= self.r_min) & (r <= self.r_max)).astype(float)


@dataclass(frozen=True)
class RegionIndicator(TestFunction):
    """Indicator of a bounded thinning-region slice R_{A,eps} (kind R, T = 1)."""

    spec: RegionSpec

    def __post_init__(self):
        if self.spec.kind != "R" or self.spec.eps <= 0.0 or self.spec.T != 1.0:
            raise ValueError("RegionIndicator requires kind R, T = 1, eps > 0")

    @property
    def dim(self):
        return self.spec.d + 1

    def support_box(self):
        return self.spec.bounding_box()

    def integral(self) -> float:
        return region_volume(self.spec)

    def evaluate(self, points):
        spec = self.spec
        d = spec.d
        v1 = points[:, :d]
        v2 = points[:, d]
        norms = np.sqrt(np.sum(v1 * v1, axis=1)) if spec.norm == "euclidean" else np.max(np.abs(v1), axis=1)
        slack = spec.c - norms**d * np.abs(v2)
        ok = (slack >= 0.0) & (v2 >= spec.eps) & (v2 <= 1.0)

        graze = np.abs(slack) < GRAZE_TOL * max(spec.c, 1.0)
        if np.any(graze):  # re-decide grazers with extended precision
            idx = np.flatnonzero(graze)
            p = points[idx].astype(np.longdouble)
            n2 = np.sum(p[:, :d] ** 2, axis=1) if spec.norm == "euclidean" else np.max(np.abs(p[:, :d]), axis=1) ** 2
            lhs = n2**d * p[:, d] ** 2
            ok[idx] = (lhs <= np.longdouble(spec.c) ** 2) & (p[:, d] >= spec.eps) & (p[:, d] <= 1.0)

        if spec.A is not None:
            live = ok & (norms > 0.0)
            hit = np.zeros(len(points), dtype=bool)
            if np.any(live):
                hit[live] = spec.A.contains_many(v1[live] / norms[live, None])
            ok = hit
        return ok.astype(float)


@dataclass(frozen=True)
class ScaledSum(TestFunction):
    """sum_i coefficient_i * f_i with a common ambient dimension."""

    terms: tuple  # of (float, TestFunction)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("empty sum")
        dims = {tf.dim for _, tf in self.terms}
        if len(dims) != 1:
            raise ValueError("terms must share a dimension")

    @property
    def dim(self):
        return self.terms[0][1].dim

    def support_box(self):
        los, his = zip(*(tf.support_box() for _, tf in self.terms))
        return np.min(np.stack(los), axis=0), np.max(np.stack(his), axis=0)

    def integral(self) -> float:
        return float(sum(c * tf.integral() for c, tf in self.terms))

    def evaluate(self, points):
        out = np.zeros(len(points))
        for c, tf in self.terms:
            out += c * tf.evaluate(points)
        return out


# ---------------------------------------------------------------------------
# transforms and sampling

def siegel_transform(f: TestFunction, lat: Lattice, primitive_only: bool = False,
                     *, budget: int | None = None) -> float:
    """Sum of f over the nonzero lattice points (optionally primitive only)."""
    lo, hi = f.support_box()
    pad = 1e-9 * (np.abs(lo) + np.abs(hi) + 1.0)
    pts, ns = enumerate_in_box(lat, lo - pad, hi + pad, budget=budget, return_coords=True)
    if primitive_only and len(ns):
        g = np.gcd.reduce(np.abs(ns), axis=1)
        pts = pts[g == 1]
    if not len(pts):
        return 0.0
    return float(np.sum(f.evaluate(pts)))


def haar_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation in SO(n).

    QR of a standard normal matrix with the R-diagonal sign convention gives
    Haar measure on O(n); negating the last column on the det = -1 coset maps
    it measure-preservingly onto SO(n).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    G = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    s = np.sign(np.diag(R))
    s[s == 0.0] = 1.0
    Q = Q * s[None, :]
    if np.linalg.det(Q) < 0:
        Q[:, -1] = -Q[:, -1]
    return Q


@dataclass
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    t: float
    seed: int
    integral_reference: float | None = None
    values: list | None = None

    def to_obj(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples,
                "t": self.t, "seed": self.seed, "integral_reference": self.integral_reference}


def _sample_rotation(seed: int, index: int, n: int) -> np.ndarray:
    # per-sample stream: identical results for any execution order / sharding
    rng = np.random.default_rng([seed, index])
    return haar_rotation(n, rng)


def _map_samples(fn, M: int, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, range(M)))
    return [fn(i) for i in range(M)]


def spherical_average(f: TestFunction, lat: Lattice, t: float, M: int, seed: int,
                      *, budget: int | None = None, keep_trace: bool = False,
                      threads: int = 1) -> MCEstimate:
    """Monte Carlo estimate of the K-average of f^(g_t k Lambda).

    Enumeration cost grows like e^{dt}; under the default candidate budget,
    t up to about 8 stays feasible for d <= 2. Larger t raises
    CandidateBudgetExceeded instead of silently truncating.
    """
    if M < 2:
        raise ValueError("need at least 2 samples")
    n = lat.dim
    g = g_flow(t, n - 1)

    def one(i: int) -> float:
        k = _sample_rotation(seed, i, n)
        moved = Lattice(g @ k @ lat.basis, check=False)
        return siegel_transform(f, moved, budget=budget)

    vals = np.array(_map_samples(one, M, threads))
    est = MCEstimate(mean=float(vals.mean()), stderr=float(vals.std(ddof=1) / math.sqrt(M)),
                     samples=M, t=t, seed=seed, integral_reference=f.integral())
    if keep_trace:
        est.values = vals.tolist()
    return est


@dataclass
class RatioEstimate:
    ratio: float
    stderr: float
    numerator: MCEstimate
    denominator: MCEstimate
    vol_reference: float

    def to_obj(self) -> dict:
        return {"ratio": self.ratio, "stderr": self.stderr,
                "numerator": self.numerator.to_obj(), "denominator": self.denominator.to_obj(),
                "vol_reference": self.vol_reference}


def thm3_ratio(lat: Lattice, A: DirectionSet, eps: float, t: float, M: int, seed: int,
               *, c: float = 0.0, norm: str = "euclidean", budget: int | None = None,
               keep_trace: bool = False, threads: int = 1) -> RatioEstimate:
    """Paired estimate of the direction-restricted count fraction.

    Numerator and denominator share every rotation sample (the counts come
    from one enumeration pass), which kills most of the variance of the
    ratio; the error bar is the delta-method expansion.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    d = lat.dim - 1
    spec_num = RegionSpec("R", d, T=1.0, c=c, eps=eps, norm=norm, A=A)
    ind_num = RegionIndicator(spec_num)
    ind_den = RegionIndicator(RegionSpec("R", d, T=1.0, c=spec_num.c, eps=eps, norm=norm))
    g = g_flow(t, d)
    lo, hi = ind_den.support_box()
    pad = 1e-9 * (np.abs(lo) + np.abs(hi) + 1.0)

    def one(i: int) -> tuple[float, float]:
        k = _sample_rotation(seed, i, lat.dim)
        moved = Lattice(g @ k @ lat.basis, check=False)
        pts = enumerate_in_box(moved, lo - pad, hi + pad, budget=budget)
        if not len(pts):
            return 0.0, 0.0
        return float(np.sum(ind_num.evaluate(pts))), float(np.sum(ind_den.evaluate(pts)))

    pairs = np.array(_map_samples(one, M, threads))
    xs, ys = pairs[:, 0], pairs[:, 1]
    mean_y = float(ys.mean())
    if mean_y == 0.0:
        raise ZeroDenominator("no lattice points hit the region; increase t or M")
    mean_x = float(xs.mean())
    ratio = mean_x / mean_y
    cov = np.cov(xs, ys, ddof=1) if M > 1 else np.zeros((2, 2))
    var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio**2 * cov[1, 1]) / M / mean_y**2
    stderr = math.sqrt(max(var, 0.0))

    num = MCEstimate(mean_x, float(xs.std(ddof=1) / math.sqrt(M)), M, t, seed,
                     integral_reference=ind_num.integral())
    den = MCEstimate(mean_y, float(ys.std(ddof=1) / math.sqrt(M)), M, t, seed,
                     integral_reference=ind_den.integral())
    if keep_trace:
        num.values = xs.tolist()
        den.values = ys.tolist()
    return RatioEstimate(ratio, stderr, num, den, A.measure())
