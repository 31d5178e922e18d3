"""Exact continued-fraction arithmetic for irrationals in (0, 1).

A number x = [0; a_1, a_2, ...] is represented by its element sequence,
indexed from 1 and materialized lazily from a rule.  Everything here is
arbitrary-precision integer / rational arithmetic: the denominators of
interest grow like n^n and leave machine range around n = 8, so floats
are never used for decisions in this module.

Conventions: q_{-1} = 0, p_{-1} = 1, p_0 = 0, q_0 = 1, and
q_n = a_n q_{n-1} + q_{n-2} (same recurrence for p).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

#: Hard cap on how many elements a refinement loop may materialize.  A sign
#: query on an irrational terminates long before this; hitting the cap
#: signals misuse (an effectively rational input or an exhausted prefix).
PREFIX_CAP = 10_000

HALF = Fraction(1, 2)


class PrefixCapExceeded(RuntimeError):
    """Enclosure refinement needed more than PREFIX_CAP elements."""


class ElementsExhausted(RuntimeError):
    """A finite element prefix ran out and no tail rule was supplied."""


@dataclass(frozen=True)
class Convergent:
    """The n-th convergent p/q of a continued fraction (n >= -1)."""

    n: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints.

    Used as a guaranteed enclosure of a real quantity; callers shrink it by
    extending the underlying continued-fraction prefix.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_inside(self, lo, hi) -> bool:
        """True if this enclosure lies in the open interval (lo, hi)."""
        return lo < self.lo and self.hi < hi

    def abs(self) -> "RationalInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return RationalInterval(-self.hi, -self.lo)
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def scaled(self, k) -> "RationalInterval":
        k = Fraction(k)
        if k >= 0:
            return RationalInterval(self.lo * k, self.hi * k)
        return RationalInterval(self.hi * k, self.lo * k)

    def shifted(self, c) -> "RationalInterval":
        c = Fraction(c)
        return RationalInterval(self.lo + c, self.hi + c)

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


class CFNumber:
    """An irrational x = [0; a_1, a_2, ...] with a lazily grown prefix.

    ``rule(n)`` must return the n-th element (n >= 1) as a positive integer.
    The materialized prefix only grows; extension is idempotent and guarded
    by a lock, so concurrent readers always see a consistent prefix.
    """

    def __init__(self, rule: Callable[[int], int] | None, *, elements: Sequence[int] = (), name: str = ""):
        self._rule = rule
        self.name = name
        self._lock = threading.Lock()
        # index i of these lists holds data for n = i - 1 (so list[0] is n = -1)
        self._a: list[int] = [0, 0]  # placeholders for n = -1, 0 (no elements there)
        self._p: list[int] = [1, 0]
        self._q: list[int] = [0, 1]
        for k, a in enumerate(elements, start=1):
            self._append(k, int(a))

    def _append(self, n: int, a: int) -> None:
        if a < 1:
            raise ValueError(f"continued fraction element a_{n} = {a} must be >= 1")
        self._a.append(a)
        self._p.append(a * self._p[-1] + self._p[-2])
        self._q.append(a * self._q[-1] + self._q[-2])

    def _ensure(self, n: int) -> None:
        """Materialize elements 1..n (and convergents up to index n)."""
        if len(self._a) - 2 >= n:
            return
        with self._lock:
            while len(self._a) - 2 < n:
                k = len(self._a) - 1
                if self._rule is None:
                    raise ElementsExhausted(f"element a_{k} requested but only a finite prefix was given")
                self._append(k, int(self._rule(k)))

    def element(self, n: int) -> int:
        if n < 1:
            raise ValueError("elements are indexed from 1")
        self._ensure(n)
        return self._a[n + 1]

    def elements(self, n: int) -> list[int]:
        self._ensure(n)
        return self._a[2:n + 2]

    def convergent(self, n: int) -> Convergent:
        if n < -1:
            raise ValueError("convergent index must be >= -1")
        self._ensure(max(n, 0))
        return Convergent(n, self._p[n + 1], self._q[n + 1])

    def convergents(self, n_max: int) -> list[Convergent]:
        """Convergents 0..n_max (use convergent(-1) for the seed value)."""
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self._ensure(n_max)
        return [Convergent(n, self._p[n + 1], self._q[n + 1]) for n in range(n_max + 1)]

    def enclosure_at(self, m: int) -> RationalInterval:
        """The enclosure of x by consecutive convergents m, m+1 (width 1/(q_m q_{m+1}))."""
        self._ensure(m + 1)
        a = Fraction(self._p[m + 1], self._q[m + 1])
        b = Fraction(self._p[m + 2], self._q[m + 2])
        return RationalInterval(min(a, b), max(a, b))

    def enclose(self, width_bound) -> RationalInterval:
        """Smallest convergent-pair enclosure with width <= width_bound."""
        bound = Fraction(width_bound)
        if bound <= 0:
            raise ValueError("width_bound must be positive")
        m = 0
        while True:
            self._ensure(m + 1)
            if self._q[m + 1] * self._q[m + 2] * bound >= 1:
                return self.enclosure_at(m)
            m += 1
            if m > PREFIX_CAP:
                raise PrefixCapExceeded("enclose() exceeded the element prefix cap")

    def __float__(self) -> float:
        return float(self.enclose(Fraction(1, 10**20)).midpoint)

    def elements_as_strings(self, n: int) -> list[str]:
        """JSON-friendly serialization: decimal strings (elements exceed 64 bits)."""
        return [str(a) for a in self.elements(n)]

    @classmethod
    def from_elements(cls, elements: Sequence[int | str], rule: Callable[[int], int] | None = None) -> "CFNumber":
        return cls(rule, elements=[int(e) for e in elements])

    def __repr__(self) -> str:
        known = len(self._a) - 2
        head = ",".join(str(a) for a in self._a[2:min(known, 6) + 2])
        label = self.name or "CFNumber"
        return f"{label}[0;{head},...]"


# -- the element sequences used throughout ----------------------------------

def biased_elements(n: int) -> int:
    """Element rule 4 (n odd) / n^n (n even): odd-indexed elements stay small
    while even-indexed ones explode, which is what skews the error signs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 4 if n % 2 == 1 else n**n


def biased_number() -> CFNumber:
    return CFNumber(biased_elements, name="biased")


def constant_cf(a: int, name: str = "") -> CFNumber:
    """[0; a, a, a, ...]; a = 1 gives the golden-type number."""
    if a < 1:
        raise ValueError("a must be >= 1")
    return CFNumber(lambda n: a, name=name or f"[0;{a}bar]")


def cf_product(x1: CFNumber, x2: CFNumber) -> CFNumber:
    """Parity-selective interleave of two element sequences.

    The result takes its odd-indexed elements from x1 and its even-indexed
    elements from x2, each at its original index, so
    constant_cf(4) # (a_n = n^n) reproduces biased_number().
    """
    return CFNumber(lambda n: x1.element(n) if n % 2 == 1 else x2.element(n))


# -- module-level operation wrappers ----------------------------------------

def convergents(cf: CFNumber, n_max: int) -> list[Convergent]:
    return cf.convergents(n_max)


def enclose(cf: CFNumber, width_bound) -> RationalInterval:
    return cf.enclose(width_bound)


def _refine(cf: CFNumber, decide: Callable[[RationalInterval], object], *, max_terms: int = PREFIX_CAP):
    """Run `decide` on successively tighter enclosures until it returns non-None."""
    m = 8
    while True:
        out = decide(cf.enclosure_at(min(m, max_terms)))
        if out is not None:
            return out
        if m >= max_terms:
            raise PrefixCapExceeded(f"undecided after {max_terms} elements (effectively rational input?)")
        m *= 2


def linear_form_interval(cf: CFNumber, q: int, p: int, m: int) -> RationalInterval:
    """Exact enclosure of q*x - p from the prefix-m convergent pair."""
    return cf.enclosure_at(m).scaled(q).shifted(-p)


def rotation_value(cf: CFNumber, q: int, *, max_terms: int = PREFIX_CAP) -> tuple[int, RationalInterval]:
    """Exact sign and enclosure of q.x, the representative of q*x in (-1/2, 1/2).

    The enclosure is refined until the nearest integer to q*x is pinned down
    and the representative's sign is determined; both always happen for an
    irrational x.
    """
    if q < 1:
        raise ValueError("q must be >= 1")

    def decide(iv: RationalInterval):
        lo, hi = q * iv.lo, q * iv.hi
        r = math.floor(lo + HALF)
        if math.floor(hi + HALF) != r:
            return None
        rep = RationalInterval(lo - r, hi - r)
        if rep.lo > 0:
            return (1, rep)
        if rep.hi < 0:
            return (-1, rep)
        return None

    return _refine(cf, decide, max_terms=max_terms)


def convergent_rotation(cf: CFNumber, n: int, *, rel_width: Fraction = Fraction(1, 10**9),
                        max_terms: int = PREFIX_CAP) -> tuple[int, RationalInterval]:
    """Sign and enclosure of the signed convergent error q_n*x - p_n.

    For n >= 1 this equals the circle representative of q_n*x; for n = 0 it
    is x itself (which may exceed 1/2, where the representative differs).
    """
    c = cf.convergent(n)

    def decide(iv: RationalInterval):
        err = iv.scaled(c.q).shifted(-c.p)
        if err.lo > 0 or err.hi < 0:
            sign = 1 if err.lo > 0 else -1
            if err.width <= err.abs().lo * rel_width:
                return (sign, err)
        return None

    return _refine(cf, decide, max_terms=max_terms)


def error_ratio_bounds(cf: CFNumber, n: int, *, max_terms: int = PREFIX_CAP) -> RationalInterval:
    """Exact enclosure of |q_{n-1}.x| / |q_n.x|.

    The true ratio sits strictly between a_{n+1}/2 and a_{n+1} + 2; the
    enclosure is shrunk far enough for callers to verify that containment.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cn1, cn = cf.convergent(n - 1), cf.convergent(n)

    def decide(iv: RationalInterval):
        num = iv.scaled(cn1.q).shifted(-cn1.p).abs()
        den = iv.scaled(cn.q).shifted(-cn.p).abs()
        if num.lo <= 0 or den.lo <= 0:
            return None
        ratio = RationalInterval(num.lo / den.hi, num.hi / den.lo)
        if ratio.width * 10**9 <= ratio.lo:
            return ratio
        return None

    return _refine(cf, decide, max_terms=max_terms)


def compare_abs_rotations(cf: CFNumber, q1: int, q2: int, *, max_terms: int = PREFIX_CAP) -> int:
    """Exact comparison of |q1.x| vs |q2.x|: -1, 0 (only if q1 == q2), or +1."""
    if q1 == q2:
        return 0

    def decide(iv: RationalInterval):
        a = _abs_rep(iv, q1)
        b = _abs_rep(iv, q2)
        if a is None or b is None:
            return None
        if a.hi < b.lo:
            return -1
        if b.hi < a.lo:
            return 1
        return None

    return _refine(cf, decide, max_terms=max_terms)


def _abs_rep(iv: RationalInterval, q: int) -> RationalInterval | None:
    lo, hi = q * iv.lo, q * iv.hi
    r = math.floor(lo + HALF)
    if math.floor(hi + HALF) != r:
        return None
    return RationalInterval(lo - r, hi - r).abs()


class _Ambiguous(Exception):
    """Internal: the current enclosure is too wide to decide a comparison."""


class RotationScan:
    """Exact circle-rotation data q.x for every q = 1..q_max at once.

    Works over a single shared enclosure x in (L/D, (L+1)/D) built from a
    consecutive convergent pair (so the enclosure width is exactly 1/D), and
    answers sign / thinning-membership / best-approximation queries with pure
    integer arithmetic.  Queries that the current enclosure cannot decide
    trigger a transparent rebuild with a doubled prefix.
    """

    def __init__(self, cf: CFNumber, q_max: int, *, start_terms: int = 16, max_terms: int = PREFIX_CAP):
        self.cf = cf
        self.q_max = int(q_max)
        self._max_terms = max_terms
        self._m = start_terms
        self._build()

    def _build(self) -> None:
        while True:
            iv = self.cf.enclosure_at(self._m)
            L = iv.lo
            self._D = L.denominator * iv.hi.denominator
            self._L = L.numerator * iv.hi.denominator
            # consecutive convergents: the cross difference is exactly 1
            assert iv.hi.numerator * L.denominator - self._L == 1
            try:
                self._records = [self._record(q) for q in range(1, self.q_max + 1)]
            except _Ambiguous:
                self._widen()
                continue
            return

    def _widen(self) -> None:
        if self._m >= self._max_terms:
            raise PrefixCapExceeded(f"scan undecided after {self._m} elements")
        self._m = min(self._m * 2, self._max_terms)

    def _record(self, q: int) -> tuple[int, int, int]:
        D, L = self._D, self._L
        r = (2 * q * L + D) // (2 * D)
        if (2 * q * (L + 1) + D) // (2 * D) != r:
            raise _Ambiguous
        nlo = q * L - r * D
        nhi = nlo + q
        # the representative is strictly inside (nlo/D, nhi/D)
        if nlo >= 0:
            return (1, nlo, nhi)
        if nhi <= 0:
            return (-1, -nhi, -nlo)
        raise _Ambiguous

    def _retry(self, fn):
        while True:
            try:
                return fn()
            except _Ambiguous:
                self._widen()
                self._build()

    def sign(self, q: int) -> int:
        """Exact sign of q.x (the representative of q*x in (-1/2, 1/2))."""
        return self._records[q - 1][0]

    def in_thinning(self, q: int, c=1) -> bool:
        """Whether |q.x| * q <= c; equality is impossible for an irrational x,
        so strict and non-strict versions coincide."""
        c = Fraction(c)

        def run():
            _, alo, ahi = self._records[q - 1]
            if q * ahi * c.denominator <= c.numerator * self._D:
                return True
            if q * alo * c.denominator >= c.numerator * self._D:
                return False
            raise _Ambiguous

        return self._retry(run)

    def abs_less(self, q1: int, q2: int) -> bool:
        """Exact |q1.x| < |q2.x| (q1 != q2)."""
        if q1 == q2:
            return False

        def run():
            _, a1, b1 = self._records[q1 - 1]
            _, a2, b2 = self._records[q2 - 1]
            if b1 <= a2:
                return True
            if b2 <= a1:
                return False
            raise _Ambiguous

        return self._retry(run)

