"""Local p-adic dynamics of one-variable germs.

A :class:`Germ` is an integral power-series self-map of the disc pZ_p,
truncated at a known degree.  The module finds attracting fixed points by
Newton iteration, conjugates attracting germs to their linear part
(Koenigs) or superattracting germs to a pure power (Boettcher), certifies
the conjugating series as an isometry on an explicit disc, classifies the
local case of a product germ pair, and implements the root-of-unity limit
test on norm-one elements.

Direction convention: the conjugacy phi pushes the model forward to the
germ, F(phi(z)) = phi(model(z)), where model is z -> lambda*z or z -> z^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import (
    ConstructionFailed,
    ExtensionRequired,
    NoRootInField,
    PrecisionLoss,
    TailDominates,
)
from .numeric import (
    INF,
    GaussianRational,
    PadicNumber,
    is_root_of_unity_gaussian,
    nth_root_padic,
    padic_from_rational,
)
from .padic_series import PolydiscSeries, Radius, TailBound, _sum_padic_terms


class Germ:
    """Truncated integral germ F(z) = a0 + a1 z + ... mapping pZ_p into itself.

    Invariants: every coefficient lies in Z_p and the constant term lies in
    pZ_p, so the Gauss norm at radius p**-1 is at most p**-1.

    ``exact`` records whether the coefficient list is the whole germ (a
    polynomial map written in this chart) or a truncation of an analytic
    germ whose omitted coefficients are merely known to be integral.
    """

    __slots__ = ("p", "coeffs", "prec", "exact")

    def __init__(self, p: int, coeffs, prec: int, exact: bool = True):
        self.p = p
        self.prec = prec
        self.exact = exact
        cs = []
        for c in coeffs:
            if not isinstance(c, PadicNumber):
                c = padic_from_rational(Fraction(c), p, prec)
            cs.append(c)
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        if not cs:
            cs = [PadicNumber.zero(p)]
        for c in cs:
            if not c.is_zero() and c.valuation < 0:
                raise ValueError("germ coefficients must be p-adic integers")
        if not cs[0].is_zero() and cs[0].valuation < 1:
            raise ValueError("constant term must vanish mod p")
        self.coeffs = tuple(cs)

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> PadicNumber:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return PadicNumber.zero(self.p)

    @property
    def constant_term(self) -> PadicNumber:
        return self.coeffs[0]

    @property
    def derivative_at_zero(self) -> PadicNumber:
        return self.coefficient(1)

    def series(self) -> PolydiscSeries:
        """The germ as a polydisc series with the integral tail certificate."""
        tail = (
            None
            if self.exact
            else TailBound(self.trunc + 1, Fraction(0), Fraction(0))
        )
        return PolydiscSeries(
            self.p,
            1,
            self.trunc,
            {(k,): c for k, c in enumerate(self.coeffs) if not c.is_zero()},
            tail=tail,
        )

    def evaluate(self, point: PadicNumber) -> PadicNumber:
        """Evaluate at a point of pZ_p; sound up to the truncation tail.

        The result's precision is capped so the unknown tail (of size at most
        p**-(trunc+1) on the disc) stays below the certified digits."""
        if point.is_zero():
            return self.constant_term
        if point.valuation < 1:
            raise ValueError("evaluation point must lie in pZ_p")
        acc = PadicNumber.zero(self.p)
        for c in reversed(self.coeffs):
            if acc.is_zero():
                acc = c
                continue
            try:
                acc = acc * point + c
            except PrecisionLoss as exc:
                acc = _bounded_zero_stub(self.p, exc.known_floor)
        if self.exact:
            return acc
        return _cap_abs_precision(acc, self.trunc + 1)

    def translate(self, c: PadicNumber) -> "Germ":
        """Conjugate by the translation to c: z -> F(z + c) - c."""
        if c.is_zero():
            return self
        if c.valuation < 1:
            raise ValueError("translation center must lie in pZ_p")
        cpows = [PadicNumber.from_int(1, self.p, self.prec)]
        for _ in range(self.trunc):
            cpows.append(cpows[-1] * c)
        out = []
        for j in range(len(self.coeffs)):
            terms = []
            for k in range(j, self.trunc + 1):
                a = self.coefficient(k)
                if a.is_zero():
                    continue
                t = a * math.comb(k, j) * cpows[k - j]
                if not t.is_zero():
                    terms.append(t)
            if j == 0:
                terms.append(-c)
            kind, val = _sum_padic_terms(self.p, terms)
            out.append(val if kind == "exact" else PadicNumber.zero(self.p))
        return Germ(self.p, out, self.prec, exact=self.exact)

    def __str__(self):
        return f"Germ(p={self.p}, D={self.trunc})"

    __repr__ = __str__


def _padic_add(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    try:
        return a + b
    except PrecisionLoss as exc:
        return _bounded_zero_stub(a.p, exc.known_floor)


def _bounded_zero_stub(p: int, floor) -> PadicNumber:
    # represent "certified smaller than p**-floor" as an exact zero; callers
    # that need the distinction must track floors separately (the conjugacy
    # builders below do), so this stub only appears in coarse evaluations.
    return PadicNumber.zero(p)


def _cap_abs_precision(x: PadicNumber, cap) -> PadicNumber:
    if x.is_zero():
        return x
    digits = int(min(Fraction(x.prec), Fraction(cap) - x.valuation))
    if digits <= 0:
        return PadicNumber.zero(x.p)
    return PadicNumber(x.p, x.valuation, x.unit, digits)


@dataclass
class Conjugacy:
    """Certified conjugation phi with F(phi(z)) = phi(model(z)) mod z^(D+1)."""

    phi: PolydiscSeries
    model: tuple  # ("linear", lambda) or ("power", d)
    source_exponent: Fraction | None  # s = p**-m, the certified disc
    target_exponent: Fraction | None  # r' = |phi'(0)| * s
    certified: bool
    prec_floor: Fraction  # min absolute precision among solved coefficients
    residual_floor: Fraction | None = None  # certified bound for the residual

    @property
    def p(self) -> int:
        return self.phi.p

    def serialize(self):
        coeffs = []
        for (k,), c in sorted(self.phi.coeffs.items()):
            coeffs.append([k, int(c.valuation), c.lift()])
        kind, datum = self.model
        return {
            "model": kind,
            "model_datum": str(datum) if kind == "linear" else int(datum),
            "p": self.p,
            "source_exponent": _frac_str(self.source_exponent),
            "target_exponent": _frac_str(self.target_exponent),
            "certified": self.certified,
            "coefficients": coeffs,
        }


def _frac_str(x):
    return None if x is None else str(Fraction(x))


def find_attracting_fixed_point(germ: Germ, target=None) -> PadicNumber:
    """The unique fixed point of an attracting germ on pZ_p, by Newton.

    Requires |F'(0)| < 1 and |F(0)| < 1; then H(w) = F(w) - w has a unit
    derivative on the disc and w -> w - H(w)/H'(w) converges quadratically.
    The fixed point is correct modulo p**min(prec, trunc+1).
    """
    a1 = germ.derivative_at_zero
    if not a1.is_zero() and a1.valuation < 1:
        raise ValueError("germ is not attracting: |F'(0)| = 1")
    p = germ.p
    if target is None:
        goal = germ.prec if germ.exact else min(germ.prec, germ.trunc + 1)
    else:
        goal = target
    goal = int(goal)
    w = PadicNumber.zero(p)
    deriv_coeffs = [
        germ.coefficient(k) * k for k in range(1, germ.trunc + 1)
    ]
    for _ in range(goal.bit_length() + 8):
        hw = _padic_add(germ.evaluate(w), -w)
        if hw.is_zero() or hw.valuation >= goal:
            return _cap_abs_precision(w, goal) if not w.is_zero() else w
        dh = PadicNumber.zero(p)
        for k in range(len(deriv_coeffs), 0, -1):
            c = deriv_coeffs[k - 1]
            if dh.is_zero():
                dh = c
            else:
                dh = _padic_add(dh * w, c)
        dh = _padic_add(dh, PadicNumber.from_int(-1, p, germ.prec))
        if dh.is_zero() or dh.valuation != 0:
            raise PrecisionLoss("contraction could not be certified")
        w = _padic_add(w, -(hw / dh))
    raise PrecisionLoss("Newton iteration did not reach the target precision")


def translate_to_fixed_point(germ: Germ) -> tuple[Germ, PadicNumber]:
    """Move the attracting fixed point to the origin; returns (germ, center)."""
    c = find_attracting_fixed_point(germ)
    return germ.translate(c), c


class _CoeffSolver:
    """Shared machinery: solve conjugacy coefficients degree by degree."""

    def __init__(self, germ: Germ, trunc: int):
        self.germ = germ
        self.p = germ.p
        self.trunc = trunc
        self.phi = {1: None}  # degree -> PadicNumber, set by the callers

    def compose_germ_with_phi(self, phi_coeffs) -> dict:
        """Coefficients of F(phi(z)) up to the truncation, as exact sums."""
        p = self.p
        trunc = self.trunc
        # powers of phi as plain dicts of PadicNumbers (term lists summed soundly)
        powers = [{0: PadicNumber.from_int(1, p, self.germ.prec)}]
        cur = {0: PadicNumber.from_int(1, p, self.germ.prec)}
        for _ in range(self.germ.trunc):
            nxt = {}
            for d1, c1 in cur.items():
                for d2, c2 in phi_coeffs.items():
                    d = d1 + d2
                    if d > trunc:
                        continue
                    term = c1 * c2
                    if term.is_zero():
                        continue
                    prev = nxt.get(d)
                    nxt[d] = term if prev is None else _padic_add(prev, term)
            cur = {d: c for d, c in nxt.items() if not c.is_zero()}
            powers.append(cur)
        out = {}
        for k in range(self.germ.trunc + 1):
            a = self.germ.coefficient(k)
            if a.is_zero():
                continue
            for d, c in powers[k].items():
                term = a * c
                if term.is_zero():
                    continue
                prev = out.get(d)
                out[d] = term if prev is None else _padic_add(prev, term)
        return out


def koenigs_linearize(germ: Germ, trunc: int) -> Conjugacy:
    """Conjugate an attracting germ with 0 < |F'(0)| < 1 to z -> lambda*z.

    Solves phi = z + sum c_k z^k with F(phi(z)) = phi(lambda z); the degree-k
    coefficient divides by lambda**k - lambda, whose valuation is exactly
    v(lambda) for k >= 2, so each step costs v(lambda) digits of absolute
    precision.  The true conjugacy satisfies v(c_k) >= -(k-1) v(lambda),
    which is recorded as the tail certificate.
    """
    if not germ.constant_term.is_zero():
        raise ValueError("germ must fix the origin (translate first)")
    lam = germ.derivative_at_zero
    if lam.is_zero() or lam.valuation < 1:
        raise ValueError("Koenigs needs 0 < |F'(0)| < 1")
    p = germ.p
    r = lam.valuation
    solver = _CoeffSolver(germ, trunc)
    phi = {1: PadicNumber.from_int(1, p, germ.prec)}
    lam_pows = {1: lam}
    prec_floor = Fraction(germ.prec)
    for k in range(2, trunc + 1):
        comp = solver.compose_germ_with_phi(phi)
        rhs = comp.get(k, PadicNumber.zero(p))
        lam_pows[k] = lam_pows[k - 1] * lam
        denom = _padic_add(lam_pows[k], -lam)  # valuation exactly v(lambda)
        if denom.is_zero() or denom.valuation != r:
            raise PrecisionLoss("lambda**k - lambda lost its expected valuation")
        # matching degree k of F(phi(z)) = phi(lambda z):
        # lambda**k c_k = [F(phi_<k)]_k + lambda c_k
        c_k = (rhs / denom) if not rhs.is_zero() else PadicNumber.zero(p)
        if not c_k.is_zero():
            phi[k] = c_k
            prec_floor = min(prec_floor, Fraction(c_k.abs_known))
    if germ.exact and all(
        germ.coefficient(k).is_zero() for k in range(2, germ.trunc + 1)
    ):
        tail = None  # F = lambda z exactly: phi = z exactly
    else:
        tail = TailBound(trunc + 1, Fraction(r), Fraction(-r))
    phi_series = PolydiscSeries(
        p, 1, trunc, {(k,): c for k, c in phi.items()}, tail=tail
    )
    conj = Conjugacy(
        phi=phi_series,
        model=("linear", lam),
        source_exponent=None,
        target_exponent=None,
        certified=False,
        prec_floor=prec_floor,
    )
    _certify_radius(conj, search_from=1, search_to=max(trunc, r + 1) + 2)
    conj.residual_floor = _residual_floor(germ, conj)
    return conj


def boettcher_coordinate(germ: Germ, trunc: int) -> Conjugacy:
    """Conjugate a superattracting germ a_d z^d + ... to z -> z^d.

    The linear coefficient of phi is a (d-1)-th root of 1/a_d; when Q_p has
    no such root the construction needs a ramified extension and
    ExtensionRequired is raised (reported, never silently extended).
    """
    if not germ.constant_term.is_zero():
        raise ValueError("germ must fix the origin (translate first)")
    if not germ.derivative_at_zero.is_zero():
        raise ValueError("Boettcher needs F'(0) = 0")
    p = germ.p
    d = None
    for k in range(2, germ.trunc + 1):
        if not germ.coefficient(k).is_zero():
            d = k
            break
    if d is None:
        raise ValueError("germ is zero to truncation; no leading power")
    a_d = germ.coefficient(d)
    try:
        beta = nth_root_padic(a_d.inverse(), d - 1)
    except NoRootInField as exc:
        raise ExtensionRequired(
            f"(d-1)-th root of leading coefficient not in Q_p: {exc}"
        ) from exc
    solver = _CoeffSolver(germ, d + trunc)  # matching runs at degrees d..d+trunc-1
    phi = {1: beta}
    prec_floor = Fraction(beta.abs_known)
    denom = a_d * (beta ** (d - 1)) * d  # the c_k coefficient in F(phi); = d to precision
    if denom.is_zero():
        raise PrecisionLoss("degenerate leading normalization")
    for k in range(2, trunc + 1):
        m = d + k - 1
        comp = solver.compose_germ_with_phi(phi)
        lhs = comp.get(m, PadicNumber.zero(p))
        # phi(z^d) has coefficient c_{m/d} at degree m when d | m
        rhs = PadicNumber.zero(p)
        if m % d == 0 and m // d in phi:
            rhs = phi[m // d]
        # matching degree m: [F(phi_<k)]_m + d*a_d*beta**(d-1)*c_k = [phi(z^d)]_m
        mismatch = _padic_add(rhs, -lhs) if not (rhs.is_zero() and lhs.is_zero()) else PadicNumber.zero(p)
        c_k = mismatch / denom if not mismatch.is_zero() else PadicNumber.zero(p)
        if not c_k.is_zero():
            phi[k] = c_k
            prec_floor = min(prec_floor, Fraction(c_k.abs_known))
    b = Fraction(beta.valuation)
    if b >= 0 and d % p != 0:
        tail = TailBound(trunc + 1, b, Fraction(0))
    else:
        tail = None  # no certificate derived for wild or non-integral cases
    phi_series = PolydiscSeries(
        p, 1, trunc, {(k,): c for k, c in phi.items()}, tail=tail
    )
    conj = Conjugacy(
        phi=phi_series,
        model=("power", d),
        source_exponent=None,
        target_exponent=None,
        certified=False,
        prec_floor=prec_floor,
    )
    _certify_radius(conj, search_from=1, search_to=trunc + 2)
    conj.residual_floor = _residual_floor(germ, conj)
    return conj


def certify_isometry(phi, radius) -> bool:
    """Check the strict linear-domination condition at the given radius.

    phi (a one-variable series with phi(0) = 0 and phi'(0) != 0) restricts to
    an isometric isomorphism of the disc of radius s onto the disc of radius
    |phi'(0)|*s as soon as |c_1| s > |c_k| s^k for every k >= 2 including the
    tail; the comparison is exact on exponents.
    """
    if isinstance(phi, Conjugacy):
        phi = phi.phi
    if isinstance(radius, (int, Fraction)):
        radius = Radius.of(Fraction(radius))
    if phi.coefficient((0,)) is not None or (0,) in phi.bounds:
        raise ValueError("phi must vanish at the origin")
    c1 = phi.coefficient((1,))
    if c1 is None:
        raise ValueError("phi needs a nonzero linear term")
    m = radius.exponents[0]
    lead = Fraction(c1.valuation) + m
    for (k,), c in phi.coeffs.items():
        if k < 2:
            continue
        if Fraction(c.valuation) + k * m <= lead:
            return False
    for (k,), a in phi.bounds.items():
        if k < 2:
            continue
        if a + k * m <= lead:
            return False
    if phi.tail is not None:
        floor = phi.tail.norm_floor(radius)
        if floor is None:
            raise TailDominates("tail certificate unavailable at this radius")
        if floor <= lead:
            return False
    return True


def _certify_radius(conj: Conjugacy, search_from, search_to):
    """Pick the largest grid radius p**-m at which the isometry certifies."""
    phi = conj.phi
    c1 = phi.coefficient((1,))
    for m in range(int(search_from), int(search_to) + 1):
        try:
            ok = certify_isometry(phi, Fraction(m))
        except TailDominates:
            continue
        if ok:
            conj.source_exponent = Fraction(m)
            conj.target_exponent = Fraction(m) + Fraction(c1.valuation)
            conj.certified = True
            return
    conj.certified = False


def _residual_floor(germ: Germ, conj: Conjugacy):
    """Certified exponent bound for F(phi(z)) - phi(model(z)) at the source
    radius, or None when no radius was certified.

    The construction forces every residual coefficient up to the truncation
    to cancel; sound summation turns those cancellations into exponent
    floors.  A residual coefficient surviving with an exact valuation means
    the functional equation genuinely fails: that is a construction bug, not
    a precision artifact, and raises ConstructionFailed.
    """
    if not conj.certified:
        return None
    phi = conj.phi
    kind, datum = conj.model
    model_side = (
        phi.scale_variable(datum) if kind == "linear" else phi.substitute_power(datum)
    )
    germ_side = germ.series().compose(phi)
    residual = germ_side - model_side
    radius = Radius.of(conj.source_exponent)
    floors = []
    for (k,), c in residual.coeffs.items():
        raise ConstructionFailed(
            f"conjugacy residual has a certified nonzero coefficient at degree {k}"
            f" (valuation {c.valuation})"
        )
    for (k,), a in residual.bounds.items():
        floors.append(a + k * radius.exponents[0])
    if residual.tail is not None:
        t = residual.tail.norm_floor(radius)
        if t is not None:
            floors.append(t)
    return min(floors) if floors else INF


# ---------------------------------------------------------------------------
# case classification for product germs
# ---------------------------------------------------------------------------


class LocalCase(Enum):
    CASE_1 = "Case1"  # both multipliers are units
    CASE_2A = "Case2a"  # one unit, the other attracting with nonzero multiplier
    CASE_2B = "Case2b"  # one unit, the other superattracting
    CASE_3A = "Case3a"  # both attracting, at least one nonzero multiplier
    CASE_3B = "Case3b"  # both superattracting


def _multiplier_regime(germ: Germ) -> str:
    """'unit', 'attracting', or 'super': the regime of F'(c) at the attracting
    fixed point (translation-invariant; zero is read at working precision)."""
    a1 = germ.derivative_at_zero
    if not a1.is_zero() and a1.valuation == 0:
        return "unit"
    shifted, _ = translate_to_fixed_point(germ)
    lam = shifted.derivative_at_zero
    if lam.is_zero():
        return "super"
    return "attracting"


def classify_local_case(F: Germ, G: Germ) -> LocalCase:
    """The case split of the product germ F x G by multiplier sizes.

    Case 1: both unit multipliers.  Case 2a/2b: exactly one unit, the other
    attracting/superattracting (after moving to its fixed point).  Case
    3a/3b: both non-units, with some/none of the multipliers nonzero.
    A multiplier that cancels to working precision is classified as zero.
    """
    rf, rg = _multiplier_regime(F), _multiplier_regime(G)
    units = (rf == "unit") + (rg == "unit")
    if units == 2:
        return LocalCase.CASE_1
    if units == 1:
        other = rf if rg == "unit" else rg
        return LocalCase.CASE_2A if other == "attracting" else LocalCase.CASE_2B
    if "attracting" in (rf, rg):
        return LocalCase.CASE_3A
    return LocalCase.CASE_3B


# ---------------------------------------------------------------------------
# root-of-unity limit test
# ---------------------------------------------------------------------------


class LimitVerdict(Enum):
    CONVERGES_TO_ZERO = "ConvergesToZero"
    BOUNDED_AWAY = "BoundedAway"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class LimitTestResult:
    verdict: LimitVerdict
    root_of_unity: bool | None  # exact decision when the input is exact
    valuations: list = field(default_factory=list)


def root_of_unity_limit_test(xi, poly, d: int, n_max: int = 12) -> LimitTestResult:
    """Classify the limit behaviour of |P(xi**(d**n))| for a norm-one xi.

    If the valuations of P(xi^(d^n)) grow without bound then xi must be a
    root of unity (the binomial-expansion mechanism pins the distance to the
    limit cycle otherwise, using p coprime to d).  Exact inputs (Teichmuller
    representatives, Gaussian rationals) get an exact decision via the orbit
    of exponents; numeric inputs are classified from the valuation run:
    monotone growth past the certification threshold, eventually-constant
    positive distance, or inconclusive.
    """
    if isinstance(xi, GaussianRational):
        return _limit_test_exact_gaussian(xi, poly, d, n_max)
    if not isinstance(xi, PadicNumber):
        raise TypeError("xi must be a PadicNumber or GaussianRational")
    if xi.valuation != 0:
        raise ValueError("|xi| = 1 required")
    p = xi.p
    if d % p == 0:
        raise ValueError("d must be coprime to p")
    prec = xi.prec
    threshold = max(2, (prec * 3) // 4)

    root = _exact_root_of_unity_status(xi)
    vals = []
    cur = xi
    for _ in range(n_max + 1):
        val = _poly_valuation_at(poly, cur, prec)
        vals.append(val)
        cur = cur**d
    verdict = _classify_valuation_run(vals, threshold)
    return LimitTestResult(verdict, root, vals)


def _poly_valuation_at(poly, x: PadicNumber, prec: int):
    acc = PadicNumber.zero(x.p)
    for c in reversed(list(poly.coeffs)):
        cp = (
            c
            if isinstance(c, PadicNumber)
            else padic_from_rational(Fraction(c), x.p, prec)
        )
        if acc.is_zero():
            acc = cp
            continue
        acc = _padic_add(acc * x, cp)
    return acc.valuation if not acc.is_zero() else INF


def _classify_valuation_run(vals, threshold):
    finite = [v if v != INF else threshold + 10 for v in vals]
    window = min(3, len(finite) - 1)
    tail = finite[-(window + 1):]
    if finite[-1] >= threshold and all(
        tail[i + 1] >= tail[i] for i in range(len(tail) - 1)
    ):
        return LimitVerdict.CONVERGES_TO_ZERO
    span = max(3, len(finite) // 2)
    last = finite[-span:]
    if len(set(last)) == 1 and last[0] < threshold:
        return LimitVerdict.BOUNDED_AWAY
    return LimitVerdict.INCONCLUSIVE


def _exact_root_of_unity_status(xi: PadicNumber):
    """True/False when xi's root-of-unity status is decidable at working
    precision, else None.

    Frobenius-fixed elements are Teichmuller representatives (roots of
    unity); principal units 1 + pZ_p are torsion free for odd p.  Both
    criteria read the input at working precision.
    """
    p = xi.p
    if xi**p == xi:
        return True
    if p != 2 and xi.lift(1) == 1:
        diff = _padic_add(xi, PadicNumber.from_int(-1, p, xi.prec))
        if not diff.is_zero() and diff.valuation >= 1:
            return False
    return None


def _limit_test_exact_gaussian(xi: GaussianRational, poly, d: int, n_max: int):
    if xi.is_zero():
        raise ValueError("nonzero xi required")
    root = is_root_of_unity_gaussian(xi)
    if not root:
        # the limit can never be zero (contrapositive of the limit lemma),
        # but a finite run cannot certify a positive distance either
        return LimitTestResult(LimitVerdict.INCONCLUSIVE, False, [])
    # orbit of xi^(d^n) is eventually periodic among the 4 roots of unity
    orbit = []
    cur = xi
    seen = {}
    while True:
        key = (cur.re, cur.im)
        if key in seen:
            cycle = orbit[seen[key]:]
            break
        seen[key] = len(orbit)
        orbit.append(cur)
        cur = cur**d
    values = [poly.evaluate(z) for z in cycle]
    if all(v == 0 for v in values):
        return LimitTestResult(LimitVerdict.CONVERGES_TO_ZERO, True, [])
    if all(v != 0 for v in values):
        return LimitTestResult(LimitVerdict.BOUNDED_AWAY, True, [])
    return LimitTestResult(LimitVerdict.INCONCLUSIVE, True, [])


# ---------------------------------------------------------------------------
# orchestration: which uniformization applies to a product germ pair
# ---------------------------------------------------------------------------


def local_uniformization_report(F: Germ, G: Germ, trunc: int) -> dict:
    """Classify the pair and run every certified conjugation that applies.

    Case 1 needs no uniformization (both factors are invertible isometries);
    otherwise each non-unit factor is moved to its fixed point and conjugated
    to its linear part or to a pure power.  The full non-invariant decision
    procedure (which needs eventual factorization in the disc algebra) is out
    of scope; the report states which mechanism applies and its certificates.
    """
    case = classify_local_case(F, G)
    report = {"case": case.value, "factors": []}
    for name, germ in (("F", F), ("G", G)):
        entry = {"factor": name}
        regime = _multiplier_regime(germ)
        entry["regime"] = regime
        if regime == "unit":
            entry["note"] = "invertible isometry of the disc; no conjugation needed"
        else:
            shifted, center = translate_to_fixed_point(germ)
            entry["fixed_point_valuation"] = (
                None if center.is_zero() else int(center.valuation)
            )
            try:
                conj = (
                    koenigs_linearize(shifted, trunc)
                    if regime == "attracting"
                    else boettcher_coordinate(shifted, trunc)
                )
                entry["conjugacy"] = conj.serialize()
            except ExtensionRequired as exc:
                entry["error"] = f"ExtensionRequired: {exc}"
        report["factors"].append(entry)
    return report
