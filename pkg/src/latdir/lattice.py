"""Unimodular lattices in R^{d+1}, thinning regions, and point counting.

The regions of interest pinch around the last coordinate axis:

    scalar constraint   ||v_1||^d |v_2| <= c
    window "P"          1 < v_2 <= T
    window "R"          eps*T <= v_2 <= T

Counting is exact-by-construction: candidates are generated by an exhaustive
enumerator and then filtered by the region predicate, with an exact-rational
recheck for points that graze a constraint boundary in floating point.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import sphere
from .contfrac import CFNumber, PREFIX_CAP, PrefixCapExceeded, RotationScan
from .sphere import DirectionSet

GRAZE_TOL = 1e-9


class CandidateBudgetExceeded(RuntimeError):
    """Candidate enumeration would exceed the configured budget (t too large?)."""


class UnboundedRegion(ValueError):
    """Counting or volume requested for an unbounded region (kind R, eps = 0)."""


class DegenerateRational(RuntimeError):
    """qx - p = 0 was hit while directions were requested (rational input)."""


def default_budget() -> int:
    return int(os.environ.get("LATDIR_BUDGET", 10**8))


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True, eq=False)
class Lattice:
    """Unimodular lattice basis (columns of `basis` generate the lattice).

    `check=False` skips the determinant gate; composed bases like g_t k B are
    unimodular by construction but their float determinant drifts with the
    condition number e^{(d+1)t}.
    """

    basis: np.ndarray
    tag: str = "generic"
    x: tuple = ()  # horospherical parameter, empty for generic lattices
    check: bool = True

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", B)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis must be a square matrix")
        if self.check:
            det = abs(float(np.linalg.det(B)))
            if abs(det - 1.0) > 1e-9:
                raise ValueError(f"basis is not unimodular: |det| = {det}")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def is_horospherical(self) -> bool:
        return self.tag == "horospherical"

    def transformed(self, mat: np.ndarray) -> "Lattice":
        return Lattice(np.asarray(mat, dtype=float) @ self.basis)

    def exact_rows(self) -> list[list[Fraction]]:
        """The stored float basis as exact rationals (floats are exact binary)."""
        return [[Fraction(v) for v in row] for row in self.basis.tolist()]


def lattice_from_x(x) -> Lattice:
    """Horospherical lattice h_x Z^{d+1} = {(q x - p, q)}."""
    if isinstance(x, CFNumber):
        x = float(x)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    d = xv.shape[0]
    B = np.eye(d + 1)
    B[:d, d] = xv
    return Lattice(B, tag="horospherical", x=tuple(xv.tolist()))


def g_flow(t: float, d: int) -> np.ndarray:
    """diag(e^t, ..., e^t, e^{-dt}): expands directions, contracts height."""
    return np.diag([math.exp(t)] * d + [math.exp(-d * t)])


# ---------------------------------------------------------------------------
# regions

def _default_c(norm: str) -> float:
    # sup norm: the Dirichlet constant can be taken to be 1; euclidean: only
    # existence of the constant matters, 1 is the working default.
    return 1.0


@dataclass(frozen=True)
class RegionSpec:
    """A truncation of the thinning region.

    kind "P": 1 < v_2 <= T; kind "R": eps*T <= v_2 <= T; kind "Q": the dyadic
    shell T/2 < v_2 <= T (so P_T is the disjoint union of the Q shells).
    """

    kind: str
    d: int
    T: float
    c: float = 0.0
    eps: float = 0.0
    norm: str = "euclidean"
    A: DirectionSet | None = None

    def __post_init__(self):
        if self.kind not in ("P", "R", "Q"):
            raise ValueError("kind must be 'P', 'R', or 'Q'")
        if self.norm not in ("euclidean", "sup"):
            raise ValueError("norm must be 'euclidean' or 'sup'")
        if self.c <= 0.0:
            object.__setattr__(self, "c", _default_c(self.norm))
        if self.T <= 0.0:
            raise ValueError("T must be positive")
        if self.kind == "R" and not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")
        if self.A is not None and self.A.dim != self.d:
            raise ValueError("direction set dimension mismatch")

    @property
    def bounded(self) -> bool:
        return self.kind != "R" or self.eps > 0.0

    def require_bounded(self):
        if not self.bounded:
            raise UnboundedRegion("kind R with eps = 0 is unbounded (the whole plane v_2 = 0 qualifies)")

    def v2_window(self) -> tuple[float, float, bool]:
        """(lo, hi, lo_strict) for the v_2 constraint."""
        if self.kind == "P":
            return 1.0, self.T, True
        if self.kind == "Q":
            return self.T / 2.0, self.T, True
        return self.eps * self.T, self.T, False

    def v1_radius(self) -> float:
        lo, _, _ = self.v2_window()
        v2_min = max(lo, 1.0) if self.kind in ("P", "Q") else lo
        return (self.c / v2_min) ** (1.0 / self.d)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        self.require_bounded()
        r = self.v1_radius()
        lo_v2, hi_v2, _ = self.v2_window()
        lo = np.array([-r] * self.d + [lo_v2])
        hi = np.array([r] * self.d + [hi_v2])
        return lo, hi


def _v1_norms(v1: np.ndarray, norm: str) -> np.ndarray:
    if norm == "sup":
        return np.max(np.abs(v1), axis=1)
    return np.sqrt(np.sum(v1 * v1, axis=1))


def _classify(points: np.ndarray, spec: RegionSpec, exact_src=None):
    """Masks (scalar+window ok, degenerate v1, in A) for an (N, d+1) array.

    `exact_src` optionally supplies (integer coords, exact basis rows) so that
    boundary-grazing points can be resolved in exact rational arithmetic.
    """
    d = spec.d
    v1 = points[:, :d]
    v2 = points[:, d]
    norms = _v1_norms(v1, spec.norm)
    slack = spec.c - norms**d * np.abs(v2)
    ok = slack >= 0.0
    lo, hi, lo_strict = spec.v2_window()
    ok &= (v2 > lo) if lo_strict else (v2 >= lo)
    ok &= v2 <= hi

    graze = np.abs(slack) < GRAZE_TOL * max(spec.c, 1.0)
    if exact_src is not None and np.any(graze):
        ns, rows = exact_src
        c2 = Fraction(spec.c) ** 2
        for i in np.flatnonzero(graze):
            n = [int(v) for v in ns[i]]
            coords = [sum(r[j] * n[j] for j in range(len(n))) for r in rows]
            ev2 = coords[d]
            if spec.norm == "sup":
                scalar_ok = max(abs(cc) for cc in coords[:d]) ** (2 * d) * ev2**2 <= c2
            else:
                scalar_ok = sum(cc * cc for cc in coords[:d]) ** d * ev2**2 <= c2
            wlo, whi, strict = (Fraction(lo), Fraction(hi), lo_strict)
            window_ok = (ev2 > wlo if strict else ev2 >= wlo) and ev2 <= whi
            ok[i] = bool(scalar_ok and window_ok)

    degenerate = ok & (norms == 0.0)
    in_A = None
    if spec.A is not None:
        in_A = np.zeros(len(points), dtype=bool)
        live = ok & ~degenerate
        if np.any(live):
            units = v1[live] / norms[live, None]
            in_A[live] = spec.A.contains_many(units)
    return ok, degenerate, in_A


def thinning_contains(v, d: int, c: float = 1.0, norm: str = "euclidean") -> bool:
    """Membership in the unbounded cone ||v_1||^d |v_2| <= c (no v_2 window);
    symmetric under v -> -v by construction."""
    pts = np.asarray(v, dtype=float).reshape(1, -1)
    n = _v1_norms(pts[:, :d], norm)[0]
    return bool(n**d * abs(pts[0, d]) <= c)


def region_contains(spec: RegionSpec, v) -> str:
    """'in', 'out', or 'degenerate' (scalar constraints pass but v_1 = 0
    while a direction set is attached)."""
    pts = np.asarray(v, dtype=float).reshape(1, -1)
    ok, degenerate, _ = _classify(pts, spec)
    if not ok[0]:
        return "out"
    if spec.A is not None and degenerate[0]:
        return "degenerate"
    return "in"


def region_volume(spec: RegionSpec) -> float:
    """Lebesgue volume of the region (times vol(A) when a set is attached).

    Integrating the v_1 ball of radius (c/v_2)^{1/d} over the window gives
    omega * c * log(T) for kind P and omega * c * log(1/eps) for kind R,
    independent of T.
    """
    omega = sphere.ball_volume(spec.d, 1.0, spec.norm)
    frac = spec.A.measure() if spec.A is not None else 1.0
    if spec.kind == "P":
        if spec.T <= 1.0:
            return 0.0
        return frac * omega * spec.c * math.log(spec.T)
    if spec.kind == "Q":
        return frac * omega * spec.c * math.log(2.0)
    if spec.eps <= 0.0:
        raise UnboundedRegion("volume of kind R requires eps > 0")
    return frac * omega * spec.c * math.log(1.0 / spec.eps)


# ---------------------------------------------------------------------------
# exhaustive enumeration

def _fm_eliminate(A: np.ndarray, b: np.ndarray, var: int):
    """Exact Fourier-Motzkin projection eliminating one variable."""
    scale = np.max(np.abs(A), axis=1) + np.abs(b)
    col = A[:, var]
    tol = 1e-12 * (scale + 1.0)
    pos = col > tol
    neg = col < -tol
    keep = ~pos & ~neg

    parts_A, parts_b = [], []
    if np.any(keep):
        parts_A.append(A[keep])
        parts_b.append(b[keep])
    if np.any(pos) and np.any(neg):
        Au = A[pos] / col[pos, None]
        bu = b[pos] / col[pos]
        Al = A[neg] / col[neg, None]
        bl = b[neg] / col[neg]
        newA = (Au[:, None, :] - Al[None, :, :]).reshape(-1, A.shape[1])
        newb = (bu[:, None] - bl[None, :]).reshape(-1)
        parts_A.append(newA)
        parts_b.append(newb)
    if not parts_A:
        return np.zeros((0, A.shape[1])), np.zeros(0), True
    A2 = np.vstack(parts_A)
    b2 = np.concatenate(parts_b)
    # renormalize and drop trivial rows; a trivial row with b < 0 is infeasible
    mag = np.max(np.abs(A2), axis=1)
    trivial = mag < 1e-12
    if np.any(trivial & (b2 < -1e-9 * (np.abs(b2) + 1.0))):
        return None, None, False
    A2, b2 = A2[~trivial], b2[~trivial]
    mag = mag[~trivial]
    if len(b2):
        A2 = A2 / mag[:, None]
        b2 = b2 / mag
        uniq = np.unique(np.round(np.column_stack([A2, b2]), 12), axis=0)
        A2, b2 = uniq[:, :-1], uniq[:, -1]
    return A2, b2, True


def _int_bounds(lo: np.ndarray, hi: np.ndarray):
    pad_lo = 1e-9 * (np.abs(lo) + 1.0)
    pad_hi = 1e-9 * (np.abs(hi) + 1.0)
    return np.ceil(lo - pad_lo).astype(np.int64), np.floor(hi + pad_hi).astype(np.int64)


def _fm_candidates(M: np.ndarray, lo: np.ndarray, hi: np.ndarray, budget: int) -> np.ndarray:
    """Integer vectors n whose image M n can lie in [lo, hi], exhaustively.

    Works by exact projection (Fourier-Motzkin) of the preimage parallelepiped,
    so needle-shaped preimages cost O(needle length) candidates instead of the
    full integer bounding box.
    """
    dim = M.shape[0]
    A = np.vstack([M, -M]).astype(float)
    b = np.concatenate([hi, -lo]).astype(float)

    Minv = np.linalg.inv(M)
    half = (hi - lo) / 2.0
    extent = np.abs(Minv) @ half
    order = np.argsort(extent, kind="stable")

    systems: list = [None] * dim
    systems[dim - 1] = (A, b)
    for k in range(dim - 1, 0, -1):
        Ak, bk = systems[k]
        A2, b2, feasible = _fm_eliminate(Ak, bk, int(order[k]))
        if not feasible:
            return np.zeros((0, dim), dtype=np.int64)
        systems[k - 1] = (A2, b2)

    partial = None
    for k in range(dim):
        Ak, bk = systems[k]
        j = int(order[k])
        col = Ak[:, j]
        tol = 1e-12
        pos = col > tol
        neg = col < -tol
        if not np.any(pos) or not np.any(neg):
            raise CandidateBudgetExceeded("unbounded projection: box/basis pair is degenerate")
        if k == 0:
            ub = np.min(bk[pos] / col[pos])
            lb = np.max(bk[neg] / col[neg])
            lbs, ubs = _int_bounds(np.array([lb]), np.array([ub]))
            counts = np.maximum(ubs - lbs + 1, 0)
            if counts[0] > budget:
                raise CandidateBudgetExceeded(f"{counts[0]} candidates at level 0 exceeds budget {budget}")
            vals = np.arange(lbs[0], lbs[0] + counts[0], dtype=np.int64)
            partial = vals[:, None]
            continue
        prev_vars = [int(v) for v in order[:k]]
        rhs = bk[None, :] - partial[:, :].astype(float) @ Ak[:, prev_vars].T
        ub = np.full(len(partial), np.inf)
        lb = np.full(len(partial), -np.inf)
        if np.any(pos):
            ub = np.min(rhs[:, pos] / col[pos][None, :], axis=1)
        if np.any(neg):
            lb = np.max(rhs[:, neg] / col[neg][None, :], axis=1)
        lbs, ubs = _int_bounds(lb, ub)
        counts = np.maximum(ubs - lbs + 1, 0)
        total = int(counts.sum())
        if total > budget:
            raise CandidateBudgetExceeded(f"{total} candidates at level {k} exceeds budget {budget}")
        if total == 0:
            return np.zeros((0, dim), dtype=np.int64)
        nz = counts > 0
        P, L, C = partial[nz], lbs[nz], counts[nz]
        idx = np.repeat(np.arange(len(C)), C)
        starts = np.concatenate([[0], np.cumsum(C)[:-1]])
        offs = np.arange(total, dtype=np.int64) - np.repeat(starts, C)
        vals = L[idx] + offs
        partial = np.column_stack([P[idx], vals])

    ns = np.zeros((len(partial), dim), dtype=np.int64)
    for k in range(dim):
        ns[:, int(order[k])] = partial[:, k]
    return ns


def enumerate_in_box(lat: Lattice, box_lo, box_hi, *, budget: int | None = None,
                     return_coords: bool = False):
    """All nonzero lattice points in the closed axis-aligned box, exhaustively.

    Raises CandidateBudgetExceeded when the candidate count would pass the
    budget (default 10^8, env LATDIR_BUDGET) -- the signature of an
    ill-conditioned basis/box pair, e.g. a flow time that is too large.
    """
    lo = np.asarray(box_lo, dtype=float)
    hi = np.asarray(box_hi, dtype=float)
    if lo.shape != (lat.dim,) or hi.shape != (lat.dim,):
        raise ValueError("box endpoints must match the lattice dimension")
    if np.any(hi < lo):
        raise ValueError("box endpoints out of order")
    ns = _fm_candidates(lat.basis, lo, hi, budget if budget is not None else default_budget())
    if len(ns):
        ns = ns[np.any(ns != 0, axis=1)]
    pts = ns.astype(float) @ lat.basis.T
    inside = np.all(pts >= lo[None, :], axis=1) & np.all(pts <= hi[None, :], axis=1)
    pts, ns = pts[inside], ns[inside]
    if return_coords:
        return pts, ns
    return pts


# ---------------------------------------------------------------------------
# counting

@dataclass
class CountResult:
    """total ignores the direction set; in_A counts direction hits; degenerate
    counts in-region points with v_1 = 0 (never in in_A)."""

    total: int
    in_A: int | None = None
    degenerate: int = 0
    witnesses: list | None = None

    def to_obj(self) -> dict:
        obj = {"total": self.total, "in_A": self.in_A, "degenerate": self.degenerate}
        if self.witnesses is not None:
            obj["witnesses"] = self.witnesses
        return obj


def _count_from_points(points, spec, exact_src=None, want_witnesses=False) -> CountResult:
    ok, degenerate, in_A = _classify(points, spec, exact_src=exact_src)
    total = int(np.count_nonzero(ok))
    res = CountResult(total=total, degenerate=int(np.count_nonzero(degenerate)))
    if spec.A is not None:
        res.in_A = int(np.count_nonzero(in_A))
    if want_witnesses:
        res.witnesses = [tuple(p) for p in points[ok]]
    return res


def _horo_windows(x: np.ndarray, qs: np.ndarray, spec: RegionSpec):
    """Integer p-window per coordinate for each q: p in [ceil(qx - rho), floor(qx + rho)]."""
    rho = (spec.c / qs.astype(float)) ** (1.0 / spec.d)
    centers = qs[:, None].astype(float) * x[None, :]
    los = np.ceil(centers - rho[:, None] - 1e-12).astype(np.int64)
    his = np.floor(centers + rho[:, None] + 1e-12).astype(np.int64)
    return los, his


def _count_horospherical(lat: Lattice, spec: RegionSpec, want_witnesses: bool) -> CountResult:
    x = np.asarray(lat.x, dtype=float)
    lo, hi, lo_strict = spec.v2_window()
    q_lo = math.floor(lo) + 1 if lo_strict else math.ceil(lo)
    q_hi = math.floor(hi)
    if q_lo > q_hi:
        return CountResult(0, 0 if spec.A is not None else None)
    qs = np.arange(q_lo, q_hi + 1, dtype=np.int64)
    los, his = _horo_windows(x, qs, spec)
    widths = np.maximum(his - los + 1, 0)
    per_q = np.prod(widths, axis=1)
    live = per_q > 0
    if not np.any(live):
        return CountResult(0, 0 if spec.A is not None else None)

    # expand candidate (p, q) pairs, then filter with the authoritative predicate
    points = []
    coords = []
    for qi in np.flatnonzero(live):
        q = int(qs[qi])
        ranges = [np.arange(los[qi, j], his[qi, j] + 1) for j in range(spec.d)]
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, spec.d)
        v1 = q * x[None, :] - grid
        pts = np.column_stack([v1, np.full(len(grid), float(q))])
        points.append(pts)
        coords.append(np.column_stack([-grid, np.full(len(grid), q, dtype=np.int64)]))
    points = np.vstack(points)
    coords = np.vstack(coords)
    exact_src = (coords, lat.exact_rows())
    return _count_from_points(points, spec, exact_src=exact_src, want_witnesses=want_witnesses)


def count_region(lat: Lattice, spec: RegionSpec, *, budget: int | None = None,
                 want_witnesses: bool = False) -> CountResult:
    """#(lattice points in the region), split into total / in_A / degenerate."""
    spec.require_bounded()
    if lat.dim != spec.d + 1:
        raise ValueError("lattice / region dimension mismatch")
    if lat.is_horospherical:
        return _count_horospherical(lat, spec, want_witnesses)
    box_lo, box_hi = spec.bounding_box()
    pad = 1e-9 * (np.abs(box_lo) + np.abs(box_hi) + 1.0)
    pts, ns = enumerate_in_box(lat, box_lo - pad, box_hi + pad, budget=budget, return_coords=True)
    return _count_from_points(pts, spec, exact_src=(ns, lat.exact_rows()),
                              want_witnesses=want_witnesses)


def shell_count(lat: Lattice, i: int, c: float = 0.0, d: int | None = None,
                A: DirectionSet | None = None, norm: str = "euclidean",
                budget: int | None = None) -> CountResult:
    """Count in the dyadic shell: scalar constraint plus 2^{i-1} < v_2 <= 2^i.

    Counted directly (not by subtracting two P counts), so the additivity
    identity sum of shells = #P_{2^N} is a real consistency check.
    """
    if i < 1:
        raise ValueError("shell index must be >= 1")
    d = lat.dim - 1 if d is None else d
    spec = RegionSpec("Q", d, T=float(2**i), c=c, norm=norm, A=A)
    return count_region(lat, spec, budget=budget)


def count_approximates(x, T: float, norm: str = "sup", C: float | None = None,
                       A: DirectionSet | None = None, *, want_witnesses: bool = False) -> CountResult:
    """Count Dirichlet approximates (p, q), 0 < q <= T, ||q x - p|| < C q^{-1/d}.

    For a CFNumber input (d = 1) every check is exact; float inputs use a
    vectorized binary-float path.  The inequality is strict, unlike regions.
    """
    if C is None:
        C = 1.0
    if T < 1:
        raise ValueError("T must be >= 1")
    if isinstance(x, CFNumber):
        return _count_approx_exact(x, int(math.floor(T)), Fraction(C), A, want_witnesses)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    return _count_approx_float(xv, int(math.floor(T)), float(C), A, norm, want_witnesses)


def _count_approx_exact(cf: CFNumber, T: int, C: Fraction, A, want_witnesses) -> CountResult:
    scan = RotationScan(cf, T)
    total = 0
    in_A = 0 if A is not None else None
    wits = [] if want_witnesses else None
    for q in range(1, T + 1):
        signs = []
        # nearest p: hit iff the circle representative lands in the thinning set
        if scan.in_thinning(q, C):
            signs.append(scan.sign(q))
        # farther p are possible only while C/q > 1/2
        if 2 * C > q:
            signs.extend(_extra_p_signs(cf, q, C))
        total += len(signs)
        if A is not None:
            in_A += sum(1 for s in signs if A.contains_sign(s))
        if wits is not None:
            wits.extend((q, s) for s in signs)
    return CountResult(total, in_A, 0, wits)


def _extra_p_signs(cf: CFNumber, q: int, C: Fraction) -> list[int]:
    """Error signs of the non-nearest integers p with |qx - p| < C/q, exactly.

    With r the nearest integer and rep = qx - r, the integer r + k errs by
    rep - k (sign -1) and r - k by rep + k (sign +1), k = 1, 2, ...
    """
    bound = C / q
    k_max = math.floor(bound + Fraction(1, 2))
    m = 8
    while True:
        iv = cf.enclosure_at(m)
        lo, hi = q * iv.lo, q * iv.hi
        r = math.floor(lo + Fraction(1, 2))
        if math.floor(hi + Fraction(1, 2)) == r:
            rep_lo, rep_hi = lo - r, hi - r  # rep strictly inside
            signs: list[int] = []
            decided = True
            for k in range(1, k_max + 1):
                for err_lo, err_hi, s in (
                    (k - rep_hi, k - rep_lo, -1),
                    (k + rep_lo, k + rep_hi, 1),
                ):
                    if err_hi <= bound:
                        signs.append(s)
                    elif err_lo >= bound:
                        pass
                    else:
                        decided = False
                if not decided:
                    break
            if decided:
                return signs
        if m >= PREFIX_CAP:
            raise PrefixCapExceeded("extra-approximate scan undecided")
        m *= 2


def _count_approx_float(x: np.ndarray, T: int, C: float, A, norm: str, want_witnesses) -> CountResult:
    d = x.shape[0]
    qs = np.arange(1, T + 1, dtype=np.int64)
    rho = C * qs.astype(float) ** (-1.0 / d)

    total = 0
    in_A = 0 if A is not None else None
    degenerate = 0
    wits = [] if want_witnesses else None

    # bulk of q's admit only p in {floor(qx), floor(qx)+1} per coordinate
    small = rho >= 1.0
    for q in qs[small]:
        q = int(q)
        r = C * q ** (-1.0 / d)
        ranges = [np.arange(math.floor(q * xj - r), math.floor(q * xj + r) + 2) for xj in x]
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
        v1 = q * x[None, :] - grid
        total, in_A, degenerate = _accumulate_approx(v1, q, r, norm, A, total, in_A, degenerate, wits)

    big_qs = qs[~small]
    if len(big_qs):
        centers = big_qs[:, None] * x[None, :]
        base = np.floor(centers).astype(np.int64)
        n_off = 2**d
        offs = np.stack(np.meshgrid(*([np.arange(2)] * d), indexing="ij"), axis=-1).reshape(-1, d)
        v1 = centers[:, None, :] - (base[:, None, :] + offs[None, :, :])  # (Q, 2^d, d)
        nrm = np.max(np.abs(v1), axis=2) if norm == "sup" else np.sqrt(np.sum(v1 * v1, axis=2))
        hit = nrm < rho[~small][:, None]
        qi, oi = np.nonzero(hit)
        flat_v1 = v1[qi, oi]
        flat_q = big_qs[qi]
        flat_nrm = nrm[qi, oi]
        total += len(qi)
        deg = flat_nrm == 0.0
        if np.any(deg):
            if A is not None:
                raise DegenerateRational(f"q x - p = 0 at q = {flat_q[deg][0]} with a direction set attached")
            degenerate += int(np.count_nonzero(deg))
        if A is not None and len(qi):
            live = ~deg
            units = flat_v1[live] / flat_nrm[live, None]
            in_A += int(np.count_nonzero(A.contains_many(units)))
        if wits is not None:
            for qq, vv, nn in zip(flat_q, flat_v1, flat_nrm):
                wits.append((int(qq), tuple(vv.tolist()), tuple((vv / nn).tolist()) if nn else None))
    return CountResult(total, in_A, degenerate, wits)


def _accumulate_approx(v1, q, rho, norm, A, total, in_A, degenerate, wits):
    nrm = np.max(np.abs(v1), axis=1) if norm == "sup" else np.sqrt(np.sum(v1 * v1, axis=1))
    hit = nrm < rho
    total += int(np.count_nonzero(hit))
    deg = hit & (nrm == 0.0)
    if np.any(deg):
        if A is not None:
            raise DegenerateRational(f"q x - p = 0 at q = {q} with a direction set attached")
        degenerate += int(np.count_nonzero(deg))
    if A is not None:
        live = hit & (nrm > 0.0)
        if np.any(live):
            units = v1[live] / nrm[live, None]
            in_A += int(np.count_nonzero(A.contains_many(units)))
    if wits is not None:
        for vv, nn in zip(v1[hit], nrm[hit]):
            wits.append((int(q), tuple(vv.tolist()), tuple((vv / nn).tolist()) if nn else None))
    return total, in_A, degenerate
