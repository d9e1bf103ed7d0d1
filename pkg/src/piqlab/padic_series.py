"""Truncated power series with p-adic coefficients on polydiscs.

A :class:`PolydiscSeries` models an element of the algebra of convergent
power series on a product of closed discs of radii p**(-m_i).  It stores

* exactly-known coefficients up to a truncation degree,
* certified upper bounds for coefficients that cancelled below working
  precision (so ring operations never fabricate valuations), and
* an affine tail certificate: every omitted coefficient of total degree
  t >= start satisfies v(a_I) >= alpha + beta*t.

Norm and order computations only ever report values whose attainment
strictly dominates every bound; otherwise they raise
:class:`~piqlab.errors.TailDominates`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotDivisible, TailDominates
from .numeric import INF, GaussianRational, PadicNumber, padic_from_rational

_builtin_ord = ord


@dataclass(frozen=True)
class Radius:
    """Polydisc radii p**(-m_i), one exact nonnegative exponent per variable."""

    exponents: tuple

    def __post_init__(self):
        exps = tuple(Fraction(m) for m in self.exponents)
        if any(m < 0 for m in exps):
            raise ValueError("radii must be <= 1 (exponents >= 0)")
        object.__setattr__(self, "exponents", exps)

    @staticmethod
    def of(*exponents) -> "Radius":
        return Radius(tuple(exponents))

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    def dot(self, index) -> Fraction:
        return sum((m * i for m, i in zip(self.exponents, index)), Fraction(0))

    def min_exponent(self) -> Fraction:
        return min(self.exponents)


@dataclass(frozen=True)
class TailBound:
    """All omitted coefficients of total degree t >= start have v >= alpha + beta*t."""

    start: int
    alpha: Fraction
    beta: Fraction

    def norm_floor(self, radius: Radius):
        """Exponent floor for the tail at the given radius: the tail's norm is
        <= p**(-floor).  Returns None when the tail cannot be dominated."""
        slope = self.beta + radius.min_exponent()
        if slope < 0:
            return None
        return self.alpha + self.start * slope

    def floor_at_slope(self, b: Fraction) -> Fraction:
        """A with v(a_I) >= A + b*|I| on the tail, for any slope b <= beta."""
        if b > self.beta:
            raise ValueError("slope must not exceed the tail's own slope")
        return self.alpha + (self.beta - b) * self.start


def _sum_padic_terms(p: int, terms):
    """Sum PadicNumbers soundly.

    Returns ("exact", PadicNumber) when the result has a certified valuation,
    ("bounded", floor) when it cancelled below the joint precision (certified
    |sum| <= p**(-floor)), or ("zero", None) for an empty/exactly-zero sum.
    """
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return "zero", None
    known = min(t.abs_known for t in terms)
    v0 = min(t.valuation for t in terms)
    digits = known - v0
    if digits <= 0:
        return "bounded", known
    modulus = p ** int(digits)
    s = sum(t.unit * p ** (t.valuation - v0) for t in terms) % modulus
    if s == 0:
        return "bounded", known
    shift = 0
    while s % p == 0:
        s //= p
        shift += 1
    return "exact", PadicNumber(p, v0 + shift, s, digits - shift)


class PolydiscSeries:
    """Truncated multivariate series with p-adic coefficients.

    ``coeffs`` maps multi-indices to exactly-known nonzero coefficients;
    ``bounds`` maps multi-indices to certified exponent floors for
    coefficients only known to be small; ``tail`` certifies everything of
    degree beyond the truncation (None means the series is a polynomial and
    nothing was omitted).
    """

    __slots__ = ("p", "nvars", "trunc", "coeffs", "bounds", "tail")

    def __init__(self, p, nvars, trunc, coeffs, bounds=None, tail=None):
        self.p = p
        self.nvars = nvars
        self.trunc = trunc
        self.coeffs = {}
        for idx, c in coeffs.items():
            if len(idx) != nvars:
                raise ValueError("index arity mismatch")
            if sum(idx) > trunc:
                raise ValueError("stored coefficient beyond truncation degree")
            if not c.is_zero():
                self.coeffs[tuple(idx)] = c
        self.bounds = {tuple(k): Fraction(v) for k, v in (bounds or {}).items()}
        self.tail = tail

    # -- constructors -----------------------------------------------------------

    @staticmethod
    def from_rational_coeffs(mapping, p, prec, trunc=None, tail=None, nvars=None):
        items = {tuple(k): v for k, v in mapping.items()}
        if nvars is None:
            if not items:
                raise ValueError("cannot infer arity from an empty mapping")
            nvars = len(next(iter(items)))
        if trunc is None:
            trunc = max((sum(k) for k in items), default=0)
        coeffs = {k: padic_from_rational(Fraction(v), p, prec) for k, v in items.items()}
        return PolydiscSeries(p, nvars, trunc, coeffs, tail=tail)

    @staticmethod
    def one_variable(coeff_list, p, prec, trunc=None, tail=None):
        """Series from a low-to-high coefficient list (rationals or PadicNumbers)."""
        if trunc is None:
            trunc = len(coeff_list) - 1
        coeffs = {}
        for k, c in enumerate(coeff_list):
            if not isinstance(c, PadicNumber):
                c = padic_from_rational(Fraction(c), p, prec)
            if not c.is_zero():
                coeffs[(k,)] = c
        return PolydiscSeries(p, 1, trunc, coeffs, tail=tail)

    # -- structural helpers -------------------------------------------------------

    def coefficient(self, idx):
        return self.coeffs.get(tuple(idx))

    def is_polynomial(self) -> bool:
        return self.tail is None

    def _tail_slope(self) -> Fraction:
        return self.tail.beta if self.tail is not None else Fraction(0)

    def affine_floor(self, slope: Fraction):
        """A with v(c_I) >= A + slope*|I| over stored, bounded and tail parts.

        Requires slope <= tail slope; returns None for the zero polynomial."""
        floors = []
        for idx, c in self.coeffs.items():
            floors.append(Fraction(c.valuation) - slope * sum(idx))
        for idx, a in self.bounds.items():
            floors.append(a - slope * sum(idx))
        if self.tail is not None:
            floors.append(self.tail.floor_at_slope(slope))
        return min(floors) if floors else None

    # -- ring operations ------------------------------------------------------------

    def _combine_tail(self, other, trunc):
        if self.tail is None and other.tail is None:
            return None
        slope = min(self._tail_slope(), other._tail_slope())
        parts = []
        for s in (self, other):
            if s.tail is not None:
                parts.append(s.tail.floor_at_slope(slope))
        return TailBound(trunc + 1, min(parts), slope)

    def __add__(self, other):
        other = self._coerce(other)
        trunc = min(self.trunc, other.trunc)
        tail = self._combine_tail(other, trunc)
        coeffs = {}
        bounds = {}
        keys = set(self.coeffs) | set(other.coeffs)
        for idx in keys:
            if sum(idx) > trunc:
                tail = _fold_dropped(tail, self, other, idx, trunc)
                continue
            terms = [
                s.coeffs[idx] for s in (self, other) if idx in s.coeffs
            ]
            kind, val = _sum_padic_terms(self.p, terms)
            if kind == "exact":
                coeffs[idx] = val
            elif kind == "bounded":
                bounds[idx] = val
        for idx in set(self.bounds) | set(other.bounds):
            if sum(idx) > trunc:
                tail = _fold_dropped(tail, self, other, idx, trunc)
                continue
            floor = min(s.bounds[idx] for s in (self, other) if idx in s.bounds)
            bounds[idx] = min(bounds[idx], floor) if idx in bounds else floor
            if idx in coeffs:
                # exact plus bounded: the valuation survives only below the
                # floor, and the known digits shrink to floor - valuation
                c = coeffs.pop(idx)
                digits = math.floor(bounds[idx] - c.valuation)
                if digits > 0:
                    coeffs[idx] = PadicNumber(
                        self.p, c.valuation, c.unit, min(c.prec, digits)
                    )
                    del bounds[idx]
        return PolydiscSeries(self.p, self.nvars, trunc, coeffs, bounds, tail)

    def __neg__(self):
        return PolydiscSeries(
            self.p,
            self.nvars,
            self.trunc,
            {k: -c for k, c in self.coeffs.items()},
            dict(self.bounds),
            self.tail,
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicNumber, GaussianRational)):
            return self._scale(other)
        other = self._coerce(other)
        trunc = min(self.trunc, other.trunc)
        p = self.p
        acc = {}
        bound_acc = {}

        def add_bound(idx, floor):
            bound_acc[idx] = min(bound_acc.get(idx, floor), floor)

        # tail-by-anything products only produce degrees beyond the truncation
        # (tails start past each factor's own truncation), so inside the
        # truncation only stored/bounded parts interact.
        for i1, c1 in self.coeffs.items():
            for i2, c2 in other.coeffs.items():
                idx = tuple(a + b for a, b in zip(i1, i2))
                if sum(idx) <= trunc:
                    acc.setdefault(idx, []).append(c1 * c2)
            for i2, a2 in other.bounds.items():
                idx = tuple(a + b for a, b in zip(i1, i2))
                if sum(idx) <= trunc:
                    add_bound(idx, Fraction(c1.valuation) + a2)
        for i1, a1 in self.bounds.items():
            for i2, c2 in other.coeffs.items():
                idx = tuple(a + b for a, b in zip(i1, i2))
                if sum(idx) <= trunc:
                    add_bound(idx, a1 + Fraction(c2.valuation))
            for i2, a2 in other.bounds.items():
                idx = tuple(a + b for a, b in zip(i1, i2))
                if sum(idx) <= trunc:
                    add_bound(idx, a1 + a2)
        slope = min(self._tail_slope(), other._tail_slope())
        af, bf = self.affine_floor(slope), other.affine_floor(slope)
        if af is None or bf is None:
            tail = None  # one factor is the exact zero polynomial
        elif self.tail is None and other.tail is None and self._maxdeg() + other._maxdeg() <= trunc:
            tail = None  # genuinely no dropped products
        else:
            tail = TailBound(trunc + 1, af + bf, slope)
        coeffs = {}
        for idx, terms in acc.items():
            kind, val = _sum_padic_terms(p, terms)
            if kind == "exact":
                if idx in bound_acc:
                    digits = math.floor(bound_acc[idx] - val.valuation)
                    if digits <= 0:
                        continue  # indistinguishable from the recorded bound
                    val = PadicNumber(p, val.valuation, val.unit, min(val.prec, digits))
                    del bound_acc[idx]
                coeffs[idx] = val
            elif kind == "bounded":
                add_bound(idx, val)
        return PolydiscSeries(self.p, self.nvars, trunc, coeffs, bound_acc, tail)

    def _maxdeg(self) -> int:
        degs = [sum(k) for k in self.coeffs] + [sum(k) for k in self.bounds]
        return max(degs, default=0)

    def _scale(self, c):
        if not isinstance(c, PadicNumber):
            c = padic_from_rational(Fraction(c), self.p, _default_prec(self))
        if c.is_zero():
            return PolydiscSeries(self.p, self.nvars, self.trunc, {}, {}, None)
        v = Fraction(c.valuation)
        tail = self.tail
        if tail is not None:
            tail = TailBound(tail.start, tail.alpha + v, tail.beta)
        return PolydiscSeries(
            self.p,
            self.nvars,
            self.trunc,
            {k: val * c for k, val in self.coeffs.items()},
            {k: a + v for k, a in self.bounds.items()},
            tail,
        )

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, PolydiscSeries):
            if other.p != self.p or other.nvars != self.nvars:
                raise ValueError("incompatible series")
            return other
        raise TypeError("expected a PolydiscSeries")

    # -- single-variable substitution helpers (used by uniformization) -------------

    def scale_variable(self, factor: PadicNumber) -> "PolydiscSeries":
        """phi(z) -> phi(factor * z), one variable."""
        self._require_univariate()
        v = Fraction(factor.valuation)
        coeffs = {k: c * factor ** k[0] for k, c in self.coeffs.items()}
        bounds = {k: a + v * k[0] for k, a in self.bounds.items()}
        tail = self.tail
        if tail is not None:
            tail = TailBound(tail.start, tail.alpha, tail.beta + v)
        return PolydiscSeries(self.p, 1, self.trunc, coeffs, bounds, tail)

    def substitute_power(self, d: int) -> "PolydiscSeries":
        """phi(z) -> phi(z**d), one variable, truncated at the same degree."""
        self._require_univariate()
        coeffs = {}
        bounds = {}
        for (k,), c in self.coeffs.items():
            if k * d <= self.trunc:
                coeffs[(k * d,)] = c
        for (k,), a in self.bounds.items():
            if k * d <= self.trunc:
                bounds[(k * d,)] = a
        tail = self.tail
        dropped = [
            Fraction(c.valuation) for (k,), c in self.coeffs.items() if k * d > self.trunc
        ] + [a for (k,), a in self.bounds.items() if k * d > self.trunc]
        if tail is not None:
            beta = tail.beta if tail.beta <= 0 else tail.beta / d
            alpha = tail.alpha
            if dropped:
                alpha = min(alpha, min(dropped) - beta * (self.trunc + 1))
            tail = TailBound(self.trunc + 1, alpha, beta)
        elif dropped:
            tail = TailBound(self.trunc + 1, min(dropped), Fraction(0))
        return PolydiscSeries(self.p, 1, self.trunc, coeffs, bounds, tail)

    def compose(self, inner: "PolydiscSeries") -> "PolydiscSeries":
        """self(inner(z)) for univariate series with inner(0) = 0.

        The result is truncated at the inner truncation degree: because the
        inner series vanishes at 0, coefficients of the composite up to that
        degree only involve known inner coefficients."""
        self._require_univariate()
        inner._require_univariate()
        if (0,) in inner.coeffs:
            raise ValueError("inner series must vanish at the origin")
        trunc = inner.trunc
        acc = PolydiscSeries(self.p, 1, trunc, {}, {}, None)
        for k in range(self.trunc, -1, -1):
            acc = acc * inner if (acc.coeffs or acc.bounds or acc.tail) else acc
            c = self.coeffs.get((k,))
            if c is not None:
                acc = acc + PolydiscSeries(self.p, 1, trunc, {(0,): c}, {}, None)
            elif (k,) in self.bounds:
                acc = acc + PolydiscSeries(
                    self.p, 1, trunc, {}, {(0,): self.bounds[(k,)]}, None
                )
        if self.tail is not None:
            # omitted outer terms contribute sum_{k >= start} a_k inner**k;
            # a degree-m coefficient of inner**k has v >= k*A + B*m for the
            # inner affine floor A at slope B, giving an affine certificate.
            slope = min(inner._tail_slope(), Fraction(0))
            inner_floor = inner.affine_floor(slope)
            if inner_floor is None:
                extra = None  # inner is exactly zero; the outer tail collapses
            elif self.tail.beta + inner_floor >= 0:
                extra = TailBound(
                    self.tail.start,
                    self.tail.alpha + (self.tail.beta + inner_floor) * self.tail.start,
                    slope,
                )
            else:
                raise TailDominates(
                    "cannot certify composition tail: inner floor too low"
                )
            if extra is not None:
                acc = PolydiscSeries(
                    acc.p,
                    1,
                    acc.trunc,
                    acc.coeffs,
                    acc.bounds,
                    extra if acc.tail is None else _tail_min(acc.tail, extra),
                )
        return acc

    def _require_univariate(self):
        if self.nvars != 1:
            raise ValueError("one-variable series required")

    # -- norms ------------------------------------------------------------------------

    def stored_norm_exponent(self, radius: Radius):
        """min over stored exact terms of v(a_I) + <m, I>; None if no terms."""
        if radius.nvars != self.nvars:
            raise ValueError("radius arity mismatch")
        best = None
        for idx, c in self.coeffs.items():
            e = Fraction(c.valuation) + radius.dot(idx)
            if best is None or e < best:
                best = e
        return best

    def certified_norm_exponent(self, radius: Radius):
        """e with norm = p**(-e), certified against bounds and tail."""
        best = self.stored_norm_exponent(radius)
        if best is None:
            if self.tail is None and not self.bounds:
                return INF  # exact zero: norm 0
            raise TailDominates("no stored terms to attain the norm")
        for idx, a in self.bounds.items():
            if a + radius.dot(idx) <= best:
                raise TailDominates(
                    f"bounded coefficient at {idx} may dominate; raise precision"
                )
        if self.tail is not None:
            floor = self.tail.norm_floor(radius)
            if floor is None or floor <= best:
                raise TailDominates(
                    "truncation tail may dominate; raise the truncation degree"
                )
        return best

    def norm_upper_exponent(self, radius: Radius):
        """Exponent floor E with norm <= p**(-E) (no attainment claim)."""
        floors = []
        s = self.stored_norm_exponent(radius)
        if s is not None:
            floors.append(s)
        for idx, a in self.bounds.items():
            floors.append(a + radius.dot(idx))
        if self.tail is not None:
            f = self.tail.norm_floor(radius)
            if f is None:
                raise TailDominates("tail unbounded at this radius")
            floors.append(f)
        return min(floors) if floors else INF

    def __str__(self):
        terms = ", ".join(
            f"{idx}: {c}" for idx, c in sorted(self.coeffs.items())
        )
        return f"PolydiscSeries(p={self.p}, D={self.trunc}, {{{terms}}})"

    __repr__ = __str__


def _tail_min(t1: TailBound, t2: TailBound) -> TailBound:
    slope = min(t1.beta, t2.beta)
    start = min(t1.start, t2.start)
    alpha = min(
        t1.alpha + (t1.beta - slope) * t1.start,
        t2.alpha + (t2.beta - slope) * t2.start,
    )
    return TailBound(start, alpha, slope)


def _fold_dropped(tail, s1, s2, idx, trunc):
    """Fold a stored term that fell beyond the result truncation into the tail."""
    floors = []
    for s in (s1, s2):
        if idx in s.coeffs:
            floors.append(Fraction(s.coeffs[idx].valuation))
        if idx in s.bounds:
            floors.append(s.bounds[idx])
    add = TailBound(trunc + 1, min(floors), Fraction(0))
    return add if tail is None else _tail_min(tail, add)


def _default_prec(series: PolydiscSeries) -> int:
    for c in series.coeffs.values():
        return max(int(c.prec), 1)
    return 32


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------


def gauss_norm(f: PolydiscSeries, r: Radius):
    """The Gauss norm max |a_I| r^I as an exact exponent E with norm = p**E.

    Raises TailDominates when the stored maximum does not strictly dominate
    the truncation tail (the caller must raise the truncation degree)."""
    e = f.certified_norm_exponent(r)
    return -e if e != INF else -INF


def ord(f: PolydiscSeries, r: Radius) -> int:  # noqa: A001 - the domain name
    """The largest total degree attaining the Gauss norm."""
    e = f.certified_norm_exponent(r)
    if e == INF:
        raise ValueError("ord of the zero series is +infinity")
    return max(
        sum(idx)
        for idx, c in f.coeffs.items()
        if Fraction(c.valuation) + r.dot(idx) == e
    )


def staircase_set(f: PolydiscSeries, r: Radius, grid_depth: int):
    """Multi-indices attaining the Gauss norm at some grid radius.

    The grid carries exponent vectors in {0..M}**n plus r itself; the result
    is superset-monotone in M and finite (the staircase of the Newton
    polytope)."""
    radii = [r] + [
        Radius(exps)
        for exps in itertools.product(range(grid_depth + 1), repeat=f.nvars)
    ]
    attained = set()
    for s in radii:
        e = f.certified_norm_exponent(s)
        if e == INF:
            continue
        for idx, c in f.coeffs.items():
            if Fraction(c.valuation) + s.dot(idx) == e:
                attained.add(idx)
    return attained


def prime_factor_bound(f: PolydiscSeries, r: Radius) -> int:
    """Upper bound for the number of non-unit factors of f in any
    factorization over any finite extension at any admissible smaller
    radius: the order of f (ord is additive and detects units)."""
    return ord(f, r)


@dataclass
class DescentResult:
    quotient: dict
    in_base_field: bool
    witness: tuple | None  # (index, coefficient) exhibiting a non-rational entry


def divisibility_descent_check(f, h, trunc: int, nvars: int | None = None):
    """Divide h by f as formal power series to total degree ``trunc`` and
    report whether every quotient coefficient lies in the rational subfield.

    Inputs are mappings multi-index -> Fraction/GaussianRational; f must have
    a nonzero constant term (NotDivisible otherwise).  The quotient g is
    exact and satisfies f*g = h up to the truncation degree.
    """
    f = {tuple(k): _exact(v) for k, v in f.items() if _exact(v) != 0}
    h = {tuple(k): _exact(v) for k, v in h.items() if _exact(v) != 0}
    if nvars is None:
        probe = next(iter(f), None) or next(iter(h), None)
        if probe is None:
            raise ValueError("cannot infer arity")
        nvars = len(probe)
    zero_idx = (0,) * nvars
    f0 = f.get(zero_idx, Fraction(0))
    if f0 == 0:
        raise NotDivisible("divisor has no unit constant term")
    quotient = {}
    for idx in _graded_indices(nvars, trunc):
        acc = h.get(idx, Fraction(0))
        for fidx, fc in f.items():
            if fidx == zero_idx:
                continue
            rest = tuple(i - j for i, j in zip(idx, fidx))
            if any(k < 0 for k in rest):
                continue
            g = quotient.get(rest)
            if g is not None:
                acc = acc - fc * g
        q = acc / f0
        if q != 0:
            quotient[idx] = q
    witness = None
    for idx, c in sorted(quotient.items()):
        if isinstance(c, GaussianRational) and c.im != 0:
            witness = (idx, c)
            break
    return DescentResult(quotient, witness is None, witness)


def _exact(v):
    if isinstance(v, GaussianRational):
        return v
    return Fraction(v)


def _graded_indices(nvars: int, trunc: int):
    for total in range(trunc + 1):
        for idx in _compositions(total, nvars):
            yield idx


def _compositions(total: int, nvars: int):
    if nvars == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, nvars - 1):
            yield (first,) + rest
