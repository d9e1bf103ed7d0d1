"""Experiment engine for iterated preimages on P1 x P1.

The central objects are a product system f x g acting on pairs of points,
a subscheme Y of the product (the diagonal, a single product point, or a
curve cut by a bihomogeneous polynomial), and the sets

    tail(s) = points entering Y for the first time at step s + 1.

Membership in an iterated preimage is always decided by forward iteration
and exact evaluation: pullback ideals would have bidegree growing like
d**s, while forward orbits stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadReduction, InvarianceViolated
from .poly import BiHomPoly, bihom_divides
from .dynamics_p1 import (
    FiniteMap,
    ProjPoint,
    RationalMap,
    enumerate_gaussian_points,
    enumerate_points,
    reduce_mod_p,
)
from .uniformize import classify_local_case
from . import dynamics_p1


@dataclass(frozen=True)
class ProductSystem:
    """The morphism f x g of P1 x P1, acting as (P, Q) -> (f(P), g(Q))."""

    f: RationalMap
    g: RationalMap

    def apply(self, pair):
        p, q = pair
        return (self.f.evaluate(p), self.g.evaluate(q))

    def is_gaussian(self) -> bool:
        return self.f.is_gaussian() or self.g.is_gaussian()


class Subscheme:
    """Closed subscheme of P1 x P1: diagonal, product point, or curve."""

    KIND_DIAGONAL = "diagonal"
    KIND_POINT = "point"
    KIND_CURVE = "curve"

    def __init__(self, kind, point_pair=None, curve=None):
        self.kind = kind
        self.point_pair = point_pair
        self.curve = curve.normalized() if curve is not None else None
        if kind == self.KIND_CURVE and (curve is None or curve.is_zero()):
            raise ValueError("curve subscheme needs a nonzero polynomial")

    @staticmethod
    def diagonal() -> "Subscheme":
        return Subscheme(Subscheme.KIND_DIAGONAL)

    @staticmethod
    def product_point(p: ProjPoint, q: ProjPoint) -> "Subscheme":
        return Subscheme(Subscheme.KIND_POINT, point_pair=(p, q))

    @staticmethod
    def curve(phi: BiHomPoly) -> "Subscheme":
        return Subscheme(Subscheme.KIND_CURVE, curve=phi)

    @staticmethod
    def infinity_lines() -> "Subscheme":
        """({inf} x P1) + (P1 x {inf}): invariant under every polynomial pair."""
        return Subscheme.curve(BiHomPoly.infinity_lines())

    def contains(self, pair) -> bool:
        p, q = pair
        if self.kind == self.KIND_DIAGONAL:
            return p == q
        if self.kind == self.KIND_POINT:
            return (p, q) == self.point_pair
        val = self.curve.evaluate((p.a, p.b), (q.a, q.b))
        return val == 0

    def contains_raw(self, p_raw, q_raw) -> bool:
        """Membership on unnormalized coordinate pairs (scaling-invariant)."""
        (a1, b1), (a2, b2) = p_raw, q_raw
        if self.kind == self.KIND_DIAGONAL:
            return a1 * b2 == a2 * b1
        if self.kind == self.KIND_POINT:
            p0, q0 = self.point_pair
            return a1 * p0.b == p0.a * b1 and a2 * q0.b == q0.a * b2
        return self.curve.evaluate((a1, b1), (a2, b2)) == 0

    def describe(self) -> str:
        if self.kind == self.KIND_DIAGONAL:
            return "diagonal"
        if self.kind == self.KIND_POINT:
            return f"point ({self.point_pair[0]}, {self.point_pair[1]})"
        return f"curve {self.curve}"


def check_invariant(system: ProductSystem, sub: Subscheme) -> bool:
    """Whether (f x g)(Y) lands inside Y, decided exactly.

    Diagonal: f = g as normalized maps.  Point: the pair is fixed.  Curve
    cut by Phi: Phi divides its pullback Phi(F0, F1; G0, G1).
    """
    if sub.kind == Subscheme.KIND_DIAGONAL:
        return system.f == system.g
    if sub.kind == Subscheme.KIND_POINT:
        return system.apply(sub.point_pair) == sub.point_pair
    pulled = sub.curve.compose_with_pair(
        (system.f.f0.coeffs, system.f.f1.coeffs),
        (system.g.f0.coeffs, system.g.f1.coeffs),
    )
    ok, _ = bihom_divides(sub.curve, pulled)
    return ok


def first_entry_time(system: ProductSystem, sub: Subscheme, pair, s_max: int):
    """Least s <= s_max with (f x g)**s (pair) in Y, or None ("never").

    The forward orbit is kept unnormalized (membership is invariant under
    coordinate scaling), which avoids gcd extraction on huge iterates."""
    p, q = pair
    p_raw, q_raw = (p.a, p.b), (q.a, q.b)
    for s in range(s_max + 1):
        if sub.contains_raw(p_raw, q_raw):
            return s
        p_raw = system.f.evaluate_raw(*p_raw)
        q_raw = system.g.evaluate_raw(*q_raw)
    return None


# 61-bit prime = 1 mod 4 for modular ratio hashing, with a root of -1
# (so ratios over Q(i) embed as well); collisions are confirmed exactly.
_HASH_PRIME = 2305843009213693973
_HASH_ROOT = 1035093963448091331
assert (_HASH_ROOT * _HASH_ROOT + 1) % _HASH_PRIME == 0


class _OrbitTable:
    """Forward orbits of all enumerated points, iterated on raw coordinates.

    Normalization (gcd extraction) is skipped entirely; projective equality
    is decided by bucketing on the coordinate ratio modulo a 61-bit prime
    and confirming every candidate collision by exact cross-multiplication.
    For equality-decided subschemes (diagonal, product point, split curves)
    this reads off all first entry times without iterating every pair.
    """

    def __init__(self, system: ProductSystem, height: int, steps: int):
        self.system = system
        self.steps = steps
        self.gaussian = system.is_gaussian()
        if self.gaussian:
            self.points = enumerate_gaussian_points(height)
            seeds = [
                (
                    p.a.re.numerator,
                    p.a.im.numerator,
                    p.b.re.numerator,
                    p.b.im.numerator,
                )
                for p in self.points
            ]
        else:
            self.points = enumerate_points(height)
            seeds = [(p.a, p.b) for p in self.points]
        self.orbit_f = [self._orbit(system.f, raw) for raw in seeds]
        self.orbit_g = [self._orbit(system.g, raw) for raw in seeds]

    def _orbit(self, fmap, raw):
        fast = fmap._fast_coeffs()
        if fast is None:
            raise ValueError("orbit scans need integral map coefficients")
        d = fmap.degree
        out = [raw]
        if self.gaussian:
            from .dynamics_p1 import _horner_gaussian

            for _ in range(self.steps):
                ar, ai, br, bi = out[-1]
                xr, xi = _horner_gaussian(fast[0], ar, ai, br, bi, d)
                yr, yi = _horner_gaussian(fast[1], ar, ai, br, bi, d)
                if xr == xi == yr == yi == 0:
                    raise ArithmeticError("raw orbit degenerated to (0:0)")
                out.append((xr, xi, yr, yi))
        else:
            from .dynamics_p1 import _horner_int

            c0 = [cr for cr, _ in fast[0]]
            c1 = [cr for cr, _ in fast[1]]
            for _ in range(self.steps):
                a, b = out[-1]
                out.append((_horner_int(c0, a, b, d), _horner_int(c1, a, b, d)))
        return out

    # -- raw coordinate helpers -------------------------------------------------

    def _ratio_key(self, raw):
        """Hash of a/b modulo the bucket prime; None marks b = 0 mod prime."""
        M = _HASH_PRIME
        if self.gaussian:
            ar, ai, br, bi = raw
            a = (ar + ai * _HASH_ROOT) % M
            b = (br + bi * _HASH_ROOT) % M
        else:
            a, b = raw[0] % M, raw[1] % M
        if b == 0:
            return None
        return (a * pow(b, M - 2, M)) % M

    def _raw_equal(self, raw1, raw2) -> bool:
        if self.gaussian:
            a1r, a1i, b1r, b1i = raw1
            a2r, a2i, b2r, b2i = raw2
            # a1*b2 == a2*b1 in Z[i]
            lhs = (a1r * b2r - a1i * b2i, a1r * b2i + a1i * b2r)
            rhs = (a2r * b1r - a2i * b1i, a2r * b1i + a2i * b1r)
            return lhs == rhs
        return raw1[0] * raw2[1] == raw2[0] * raw1[1]

    def _form_value(self, form, raw):
        from .dynamics_p1 import _horner_gaussian, _horner_int

        d = form.degree
        if self.gaussian:
            pairs = []
            for c in form.coeffs:
                from .numeric import GaussianRational as GR

                c = GR.coerce(c)
                pairs.append((c.re, c.im))
            xr, xi = _horner_gaussian(pairs, *raw, d)
            return xr == 0 and xi == 0
        return _horner_int([Fraction(c) for c in form.coeffs], raw[0], raw[1], d) == 0

    def entry_times_diagonal(self):
        """entry[(i, j)] = first s with f^s(P_i) = g^s(Q_j), via buckets."""
        n = len(self.points)
        entry = {}
        for s in range(self.steps + 1):
            buckets = {}
            for i in range(n):
                buckets.setdefault(self._ratio_key(self.orbit_f[i][s]), []).append(i)
            for j in range(n):
                key = self._ratio_key(self.orbit_g[j][s])
                for i in buckets.get(key, ()):
                    if (i, j) not in entry and self._raw_equal(
                        self.orbit_f[i][s], self.orbit_g[j][s]
                    ):
                        entry[(i, j)] = s
        return entry

    def entry_times_point(self, target_pair):
        """Membership needs both components to hit their targets at once."""
        p0, q0 = target_pair
        raw_p0 = self._point_raw(p0)
        raw_q0 = self._point_raw(q0)
        n = len(self.points)
        f_hits = {}
        g_hits = {}
        for i in range(n):
            for s in range(self.steps + 1):
                if self._raw_equal(self.orbit_f[i][s], raw_p0):
                    f_hits.setdefault(i, set()).add(s)
                if self._raw_equal(self.orbit_g[i][s], raw_q0):
                    g_hits.setdefault(i, set()).add(s)
        entry = {}
        for i, ss in f_hits.items():
            for j, tt in g_hits.items():
                common = ss & tt
                if common:
                    entry[(i, j)] = min(common)
        return entry

    def _point_raw(self, pt: ProjPoint):
        if self.gaussian:
            return (
                pt.a.re.numerator,
                pt.a.im.numerator,
                pt.b.re.numerator,
                pt.b.im.numerator,
            )
        return (pt.a, pt.b)

    def entry_times_split_curve(self, xform, yform):
        """Curve phi(x) * psi(y): membership is per-factor vanishing, so the
        pair's entry time is the earlier of the two first hits."""
        n = len(self.points)

        def first_hits(orbits, form):
            out = {}
            for i in range(n):
                for s in range(self.steps + 1):
                    if self._form_value(form, orbits[i][s]):
                        out[i] = s
                        break
            return out

        fx = first_hits(self.orbit_f, xform)
        gy = first_hits(self.orbit_g, yform)
        entry = {}
        for i, si in fx.items():
            for j in range(n):
                sj = gy.get(j)
                entry[(i, j)] = si if sj is None else min(si, sj)
        for j, sj in gy.items():
            for i in range(n):
                if (i, j) not in entry:
                    entry[(i, j)] = sj
        return entry

    def entry_times_general(self, sub: Subscheme):
        n = len(self.points)
        entry = {}
        for i in range(n):
            of = self.orbit_f[i]
            for j in range(n):
                og = self.orbit_g[j]
                for s in range(self.steps + 1):
                    if self._contains_raw_pair(sub, of[s], og[s]):
                        entry[(i, j)] = s
                        break
        return entry

    def _contains_raw_pair(self, sub: Subscheme, raw_f, raw_g) -> bool:
        if self.gaussian:
            from .numeric import GaussianRational as GR

            p = (GR(raw_f[0], raw_f[1]), GR(raw_f[2], raw_f[3]))
            q = (GR(raw_g[0], raw_g[1]), GR(raw_g[2], raw_g[3]))
        else:
            p, q = raw_f, raw_g
        return sub.contains_raw(p, q)

    def entry_times(self, sub: Subscheme):
        if sub.kind == Subscheme.KIND_DIAGONAL:
            return self.entry_times_diagonal()
        if sub.kind == Subscheme.KIND_POINT:
            return self.entry_times_point(sub.point_pair)
        split = sub.curve.product_split()
        if split is not None:
            from .dynamics_p1 import BinForm

            a, b = sub.curve.bidegree
            # the split lists are indexed exactly like BinForm coefficients
            # (k-th entry multiplies x0**(deg-k) x1**k)
            xform = BinForm(a, split[0])
            yform = BinForm(b, split[1])
            return self.entry_times_split_curve(xform, yform)
        return self.entry_times_general(sub)

    def pair(self, key):
        i, j = key
        return (self.points[i], self.points[j])


def tail_set(system: ProductSystem, sub: Subscheme, s: int, height: int):
    """Rational pairs of height <= H in f^-(s+1)(Y) but not f^-s(Y).

    Requires Y invariant, so membership in the tail is exactly "first entry
    at s + 1"; raises InvarianceViolated otherwise.
    """
    if not check_invariant(system, sub):
        raise InvarianceViolated(f"{sub.describe()} is not invariant")
    table = _OrbitTable(system, height, s + 1)
    entry = table.entry_times(sub)
    return [table.pair(k) for k, t in sorted(entry.items()) if t == s + 1]


def generalized_tail_set(system: ProductSystem, sub: Subscheme, s: int, height: int):
    """Pairs of height <= H entering Y for the first time at step s + 1;
    Y need not be invariant (earlier preimages are subtracted as a union)."""
    table = _OrbitTable(system, height, s + 1)
    entry = table.entry_times(sub)
    return [table.pair(k) for k, t in sorted(entry.items()) if t == s + 1]


def empirical_s0(system: ProductSystem, sub: Subscheme, height: int, s_max: int):
    """Least s0 <= s_max with empty tails for every s in [s0, s_max] at the
    given height bound, or None when the tail at s_max is still nonempty.

    The reported value is evidence at (H, s_max), not a proof; callers pin
    it as a regression datum together with both bounds.
    """
    if not check_invariant(system, sub):
        raise InvarianceViolated(f"{sub.describe()} is not invariant")
    table = _OrbitTable(system, height, s_max + 1)
    entry = table.entry_times(sub)
    latest = max((t for t in entry.values()), default=0)
    if latest > s_max:
        return None
    return latest


# ---------------------------------------------------------------------------
# finite dynamical systems (reductions mod p)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteDynSystem:
    """A self-map table on {0..n-1} with a marked invariant subset."""

    table: tuple
    invariant: frozenset

    def __post_init__(self):
        n = len(self.table)
        if any(not (0 <= t < n) for t in self.table):
            raise ValueError("table entries out of range")
        if any(not (0 <= y < n) for y in self.invariant):
            raise ValueError("subset out of range")

    @property
    def size(self) -> int:
        return len(self.table)

    def check_invariant(self) -> bool:
        return all(self.table[y] in self.invariant for y in self.invariant)


def finite_stabilization(system: FiniteDynSystem) -> int:
    """Exact least s0 with preimage^(s0+1)(Y) = preimage^(s0)(Y).

    Reverse breadth-first traversal of the functional graph: the preimage
    sets form an increasing chain in a finite set, so s0 <= |ground - Y|.
    """
    if not system.check_invariant():
        raise InvarianceViolated("subset is not mapped into itself")
    n = system.size
    preimages = [[] for _ in range(n)]
    for x, y in enumerate(system.table):
        preimages[y].append(x)
    current = set(system.invariant)
    frontier = set(system.invariant)
    s0 = 0
    step = 0
    while True:
        new = set()
        for y in frontier:
            for x in preimages[y]:
                if x not in current:
                    new.add(x)
        if not new:
            return s0
        step += 1
        s0 = step
        current |= new
        frontier = new


def modp_piq_report(system: ProductSystem, sub: Subscheme, p: int) -> dict:
    """Reduce the system and Y mod p and stabilize the finite graph exactly.

    The report lists the fixed points of the idempotent iterates of the two
    reduced maps (the residue-disc decomposition), the local case of each
    fixed pair, and the exact stabilization index of the reduced system.
    """
    fbar = reduce_mod_p(system.f, p)
    gbar = reduce_mod_p(system.g, p)
    n = p + 1
    # the finite system on P1(F_p) x P1(F_p), flattened
    table = []
    for i in range(n):
        for j in range(n):
            table.append(fbar.table[i] * n + gbar.table[j])
    y_set = _reduce_subscheme(sub, p, n)
    fds = FiniteDynSystem(tuple(table), frozenset(y_set))
    if not fds.check_invariant():
        raise InvarianceViolated("reduced subscheme is not invariant mod p")
    s0 = finite_stabilization(fds)
    # iterate so the reduction is idempotent, then read off fixed points
    m_f = fbar.idempotent_power()
    m_g = gbar.idempotent_power()
    m = _lcm(m_f, m_g)
    f_idem = fbar.iterate(m)
    g_idem = gbar.iterate(m)
    fix_f = f_idem.fixed_points()
    fix_g = g_idem.fixed_points()
    return {
        "p": p,
        "s0": s0,
        "y_size": len(y_set),
        "idempotent_exponent": m,
        "fixed_points_f": fix_f,
        "fixed_points_g": fix_g,
        "fixed_pairs": [[i, j] for i in fix_f for j in fix_g],
    }


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _reduce_subscheme(sub: Subscheme, p: int, n: int):
    if sub.kind == Subscheme.KIND_DIAGONAL:
        return {i * n + i for i in range(n)}
    if sub.kind == Subscheme.KIND_POINT:
        pi = _reduce_point(sub.point_pair[0], p)
        qi = _reduce_point(sub.point_pair[1], p)
        return {pi * n + qi}
    out = set()
    a, b = sub.curve.bidegree
    coeffs = {}
    for key, c in sub.curve.coeffs.items():
        c = Fraction(c)
        if c.denominator % p == 0:
            raise BadReduction("curve coefficient has p in its denominator")
        coeffs[key] = (c.numerator * pow(c.denominator, -1, p)) % p
    if all(v % p == 0 for v in coeffs.values()):
        raise BadReduction("curve vanishes identically mod p")
    reps = [(x, 1) for x in range(p)] + [(1, 0)]
    for i, (x0, x1) in enumerate(reps):
        for j, (y0, y1) in enumerate(reps):
            val = 0
            for (ii, jj), c in coeffs.items():
                val += (
                    c
                    * pow(x0, a - ii, p)
                    * pow(x1, ii, p)
                    * pow(y0, b - jj, p)
                    * pow(y1, jj, p)
                )
            if val % p == 0:
                out.add(i * n + j)
    return out


def _reduce_point(pt: ProjPoint, p: int) -> int:
    a, b = int(pt.a), int(pt.b)
    if b % p != 0:
        return (a * pow(b, -1, p)) % p
    if a % p != 0:
        return p  # infinity
    raise BadReduction("point does not reduce")


def local_case_table(system: ProductSystem, p: int, trunc: int, prec: int) -> list:
    """Classify the local case at every fixed pair of the idempotent
    reductions: the residue-disc decomposition behind the mod-p engine."""
    from .dynamics_p1 import local_germ

    fbar = reduce_mod_p(system.f, p)
    gbar = reduce_mod_p(system.g, p)
    m = _lcm(fbar.idempotent_power(), gbar.idempotent_power())
    f_it = system.f.iterate_map(m)
    g_it = system.g.iterate_map(m)
    out = []
    for xi in fbar.iterate(m).fixed_points():
        for eta in gbar.iterate(m).fixed_points():
            F = local_germ(f_it, xi, p, trunc, prec)
            G = local_germ(g_it, eta, p, trunc, prec)
            out.append(
                {
                    "xi": xi,
                    "eta": eta,
                    "case": classify_local_case(F, G).value,
                }
            )
    return out
