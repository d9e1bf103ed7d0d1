"""Exact self-maps of the projective line over Q and Q(i).

Points are coprime integer (or Gaussian-integer) pairs (a : b) with a pinned
representative; the affine coordinate is z = a/b and infinity is (1 : 0).
Maps are pairs of degree-d binary forms with nonvanishing resultant,
content-normalized so equality of maps is equality of representations.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import BadReduction, DenominatorNotUnit, SearchExhausted
from .numeric import (
    GaussianRational,
    first_quadrant_unit,
    gaussian_gcd,
    gaussian_int_gcd,
)
from .poly import UniPoly, squarefree_decomposition, _binary_power_table
from .uniformize import Germ


def _is_gaussian(x) -> bool:
    return isinstance(x, GaussianRational)


# ---------------------------------------------------------------------------
# binary forms: coeffs[k] is the coefficient of x0**(d-k) * x1**k
# ---------------------------------------------------------------------------


class BinForm:
    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs):
        coeffs = tuple(
            c if _is_gaussian(c) else Fraction(c) for c in coeffs
        )
        if len(coeffs) != degree + 1:
            raise ValueError("coefficient count must be degree + 1")
        self.degree = degree
        self.coeffs = coeffs

    @staticmethod
    def from_unipoly(p: UniPoly, degree: int) -> "BinForm":
        """Homogenize an affine polynomial in z = x0/x1 to the given degree."""
        if p.degree > degree:
            raise ValueError("degree too small to homogenize")
        return BinForm(degree, tuple(p[degree - k] for k in range(degree + 1)))

    def to_unipoly(self) -> UniPoly:
        """Dehomogenize: the affine polynomial form(z, 1)."""
        return UniPoly(tuple(reversed(self.coeffs)))

    def evaluate(self, a, b):
        d = self.degree
        total = None
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = c * _pow(a, d - k) * _pow(b, k)
            total = term if total is None else total + term
        if total is None:
            return Fraction(0) if not self.coeffs or not _is_gaussian(self.coeffs[0]) else GaussianRational(0)
        return total

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def x0_multiplicity(self) -> int:
        """Order of vanishing at (0 : 1)."""
        p = self.to_unipoly()
        if p.is_zero():
            raise ValueError("zero form")
        for k, c in enumerate(p.coeffs):
            if c != 0:
                return k
        raise AssertionError

    def x1_multiplicity(self) -> int:
        """Order of vanishing at (1 : 0)."""
        return self.degree - self.to_unipoly().degree

    def divides(self, other: "BinForm") -> bool:
        if self.is_zero():
            return other.is_zero()
        if other.is_zero():
            return True
        if self.x1_multiplicity() > other.x1_multiplicity():
            return False
        return self.to_unipoly().divides(other.to_unipoly())

    def __mul__(self, other: "BinForm") -> "BinForm":
        d = self.degree + other.degree
        out = [Fraction(0)] * (d + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return BinForm(d, out)

    def __eq__(self, other):
        return (
            isinstance(other, BinForm)
            and self.degree == other.degree
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def conjugate(self) -> "BinForm":
        return BinForm(
            self.degree,
            tuple(c.conjugate() if _is_gaussian(c) else c for c in self.coeffs),
        )

    def __str__(self):
        return str(self.coeffs)

    __repr__ = __str__


def _pow(x, n):
    if n == 0:
        return 1
    return x**n


def _horner_int(coeffs, a, b, d):
    """sum coeffs[k] * a**(d-k) * b**k over integers."""
    apow = [1] * (d + 1)
    for k in range(1, d + 1):
        apow[k] = apow[k - 1] * a
    total = 0
    bk = 1
    for k, c in enumerate(coeffs):
        if c:
            total += c * apow[d - k] * bk
        bk *= b
    return total


def _horner_gaussian(coeffs, ar, ai, br, bi, d):
    """sum coeffs[k] * A**(d-k) * B**k over Z[i] as raw integer pairs."""
    apow = [(1, 0)] * (d + 1)
    for k in range(1, d + 1):
        pr, pi = apow[k - 1]
        apow[k] = (pr * ar - pi * ai, pr * ai + pi * ar)
    tr = ti = 0
    bkr, bki = 1, 0
    for k, (cr, ci) in enumerate(coeffs):
        if cr or ci:
            pr, pi = apow[d - k]
            # c * a^(d-k)
            mr = cr * pr - ci * pi
            mi = cr * pi + ci * pr
            # * b^k
            tr += mr * bkr - mi * bki
            ti += mr * bki + mi * bkr
        bkr, bki = bkr * br - bki * bi, bkr * bi + bki * br
    return tr, ti


def sylvester_resultant(f: BinForm, g: BinForm):
    """Resultant of two binary forms of formal degrees deg f, deg g."""
    m, n = f.degree, g.degree
    if m == 0 and n == 0:
        return Fraction(1)
    size = m + n
    # rows built from z-coefficients, highest degree first
    fc = list(f.coeffs)  # index k = coeff of z**(m-k) after dehomogenizing
    gc = list(g.coeffs)
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + fc + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + gc + [Fraction(0)] * (size - n - 1 - i))
    return _det(rows)


def _det(rows):
    n = len(rows)
    rows = [list(r) for r in rows]
    sign = 1
    acc = None
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            sign = -sign
        pv = rows[col][col]
        acc = pv if acc is None else acc * pv
        for r in range(col + 1, n):
            factor = rows[r][col] / pv
            if factor == 0:
                continue
            rows[r] = [
                rows[r][k] - factor * rows[col][k] for k in range(n)
            ]
    return acc * sign


# ---------------------------------------------------------------------------
# projective points
# ---------------------------------------------------------------------------


class ProjPoint:
    """Point (a : b) of P1 in lowest terms with a pinned representative.

    Over Q: integers with gcd 1 and b > 0, or b = 0 and a = 1.
    Over Q(i): Gaussian integers, gcd 1, with the second coordinate (or the
    first, at infinity) scaled into the half-open first quadrant.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        if _is_gaussian(a) or _is_gaussian(b):
            a = GaussianRational.coerce(a)
            b = GaussianRational.coerce(b)
            if a.is_zero() and b.is_zero():
                raise ValueError("(0 : 0) is not a point")
            den = 1
            for q in (a.re, a.im, b.re, b.im):
                den = den * q.denominator // math.gcd(den, q.denominator)
            a, b = a * den, b * den
            g = gaussian_gcd(a, b) if not (a.is_zero() or b.is_zero()) else (
                b if a.is_zero() else a
            )
            a, b = a / g, b / g
            u = first_quadrant_unit(b if not b.is_zero() else a)
            self.a, self.b = a * u, b * u
            return
        a, b = Fraction(a), Fraction(b)
        if a == 0 and b == 0:
            raise ValueError("(0 : 0) is not a point")
        den = (a.denominator * b.denominator) // math.gcd(
            a.denominator, b.denominator
        )
        ai, bi = int(a * den), int(b * den)
        g = math.gcd(ai, bi)
        ai, bi = ai // g, bi // g
        if bi < 0 or (bi == 0 and ai < 0):
            ai, bi = -ai, -bi
        self.a, self.b = ai, bi

    @staticmethod
    def infinity(gaussian: bool = False) -> "ProjPoint":
        return ProjPoint(GaussianRational(1), GaussianRational(0)) if gaussian else ProjPoint(1, 0)

    @staticmethod
    def _from_ints(a: int, b: int) -> "ProjPoint":
        """Fast constructor from raw integers."""
        if a == 0 and b == 0:
            raise ValueError("(0 : 0) is not a point")
        g = math.gcd(a, b)
        a, b = a // g, b // g
        if b < 0 or (b == 0 and a < 0):
            a, b = -a, -b
        out = object.__new__(ProjPoint)
        out.a = a
        out.b = b
        return out

    @staticmethod
    def _from_gaussian_ints(ar: int, ai: int, br: int, bi: int) -> "ProjPoint":
        """Fast constructor from raw Gaussian-integer parts."""
        if ar == ai == br == bi == 0:
            raise ValueError("(0 : 0) is not a point")
        gr, gi = gaussian_int_gcd(ar, ai, br, bi)
        n = gr * gr + gi * gi
        # divide by the gcd: (x + yi)/(gr + gi i) = ((x gr + y gi) + (y gr - x gi) i)/n
        ar, ai = (ar * gr + ai * gi) // n, (ai * gr - ar * gi) // n
        br, bi = (br * gr + bi * gi) // n, (bi * gr - br * gi) // n
        # unit normalization: pivot coordinate into the first quadrant
        pr, pi = (br, bi) if (br or bi) else (ar, ai)
        for _ in range(4):
            if pr > 0 and pi >= 0:
                break
            ar, ai = -ai, ar  # multiply everything by i
            br, bi = -bi, br
            pr, pi = -pi, pr
        out = object.__new__(ProjPoint)
        out.a = GaussianRational(ar, ai)
        out.b = GaussianRational(br, bi)
        return out

    @staticmethod
    def from_affine(z) -> "ProjPoint":
        if _is_gaussian(z):
            return ProjPoint(z, GaussianRational(1))
        z = Fraction(z)
        return ProjPoint(z.numerator, z.denominator)

    def is_infinity(self) -> bool:
        return self.b == 0 if not _is_gaussian(self.b) else self.b.is_zero()

    def is_gaussian(self) -> bool:
        return _is_gaussian(self.a)

    def height(self):
        """max(|a|, |b|) over Q; max(N(a), N(b)) over Q(i)."""
        if self.is_gaussian():
            return max(self.a.norm(), self.b.norm())
        return max(abs(self.a), abs(self.b))

    def key(self):
        if self.is_gaussian():
            return (self.a.re, self.a.im, self.b.re, self.b.im)
        return (self.a, self.b)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        if self.is_infinity():
            return "inf"
        if self.is_gaussian():
            return f"({self.a})/({self.b})" if self.b != GaussianRational(1) else str(self.a)
        return str(Fraction(self.a, self.b))

    __repr__ = __str__


def enumerate_points(height_bound: int):
    """All points of P1(Q) with max(|a|, |b|) <= H, each exactly once."""
    if height_bound < 1:
        raise ValueError("height bound must be >= 1")
    points = [ProjPoint(1, 0)]
    for b in range(1, height_bound + 1):
        for a in range(-height_bound, height_bound + 1):
            if math.gcd(a, b) == 1:
                points.append(ProjPoint(a, b))
    return points


def enumerate_gaussian_points(height_bound: int):
    """All points of P1(Q(i)) with max(N(a), N(b)) <= H, each exactly once."""
    if height_bound < 1:
        raise ValueError("height bound must be >= 1")
    ints = []
    r = math.isqrt(height_bound)
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            if x * x + y * y <= height_bound:
                ints.append(GaussianRational(x, y))
    seen = set()
    out = []
    for a in ints:
        for b in ints:
            if a.is_zero() and b.is_zero():
                continue
            pt = ProjPoint(a, b)
            if pt.key() not in seen:
                seen.add(pt.key())
                out.append(pt)
    return out


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------


class RationalMap:
    """Morphism of P1 given by coprime degree-d forms (F0 : F1)."""

    __slots__ = ("f0", "f1", "degree", "_fast")

    def __init__(self, f0: BinForm, f1: BinForm, check: bool = True):
        if f0.degree != f1.degree:
            raise ValueError("forms must share the same degree")
        self.degree = f0.degree
        self.f0, self.f1 = _normalize_pair(f0, f1)
        self._fast = None
        if check:
            res = sylvester_resultant(self.f0, self.f1)
            if res == 0:
                raise ValueError("resultant vanishes: not a morphism")

    def _fast_coeffs(self):
        """Cached (re, im) integer pairs of the normalized coefficients."""
        if self._fast is None:
            pairs = []
            for form in (self.f0, self.f1):
                row = []
                for c in form.coeffs:
                    if _is_gaussian(c):
                        if not c.is_integral():
                            return None
                        row.append((c.re.numerator, c.im.numerator))
                    else:
                        if c.denominator != 1:
                            return None
                        row.append((c.numerator, 0))
                pairs.append(row)
            self._fast = tuple(pairs)
        return self._fast

    @staticmethod
    def from_affine(num: UniPoly, den: UniPoly) -> "RationalMap":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if g.degree > 0:
            num, den = num // g, den // g
        d = max(num.degree, den.degree)
        return RationalMap(BinForm.from_unipoly(num, d), BinForm.from_unipoly(den, d))

    @staticmethod
    def affine_polynomial(p: UniPoly) -> "RationalMap":
        return RationalMap.from_affine(p, UniPoly.one())

    def is_gaussian(self) -> bool:
        return any(_is_gaussian(c) for c in self.f0.coeffs + self.f1.coeffs)

    def numerator_poly(self) -> UniPoly:
        return self.f0.to_unipoly()

    def denominator_poly(self) -> UniPoly:
        return self.f1.to_unipoly()

    def evaluate_raw(self, a, b):
        return self.f0.evaluate(a, b), self.f1.evaluate(a, b)

    def evaluate(self, point: ProjPoint) -> ProjPoint:
        fast = self._fast_coeffs()
        if fast is not None:
            d = self.degree
            if point.is_gaussian():
                pa, pb = point.a, point.b
                if pa.is_integral() and pb.is_integral():
                    ar, ai = pa.re.numerator, pa.im.numerator
                    br, bi = pb.re.numerator, pb.im.numerator
                    xr, xi = _horner_gaussian(fast[0], ar, ai, br, bi, d)
                    yr, yi = _horner_gaussian(fast[1], ar, ai, br, bi, d)
                    return ProjPoint._from_gaussian_ints(xr, xi, yr, yi)
            elif isinstance(point.a, int):
                if all(ci == 0 for _, ci in fast[0] + fast[1]):
                    a, b = point.a, point.b
                    x = _horner_int([cr for cr, _ in fast[0]], a, b, d)
                    y = _horner_int([cr for cr, _ in fast[1]], a, b, d)
                    return ProjPoint._from_ints(x, y)
        x, y = self.evaluate_raw(point.a, point.b)
        return ProjPoint(x, y)

    def iterate_point(self, point: ProjPoint, n: int) -> ProjPoint:
        for _ in range(n):
            point = self.evaluate(point)
        return point

    def orbit(self, point: ProjPoint, n: int):
        out = [point]
        for _ in range(n):
            out.append(self.evaluate(out[-1]))
        return out

    def compose(self, other: "RationalMap") -> "RationalMap":
        """self after other; deg(self o other) = deg self * deg other."""
        d = self.degree
        table = _binary_power_table(other.f0.coeffs, other.f1.coeffs, d)
        deg = self.degree * other.degree

        def subst(form: BinForm) -> BinForm:
            out = [Fraction(0)] * (deg + 1)
            for k, c in enumerate(form.coeffs):
                if c == 0:
                    continue
                for j, t in enumerate(table[k]):
                    if t != 0:
                        out[j] = out[j] + c * t
            return BinForm(deg, out)

        # composition of morphisms is a morphism; skip the resultant recheck
        return RationalMap(subst(self.f0), subst(self.f1), check=False)

    def iterate_map(self, n: int) -> "RationalMap":
        result = RationalMap(BinForm(1, (1, 0)), BinForm(1, (0, 1)), check=False)
        base = self
        while n:
            if n & 1:
                result = result.compose(base)
            base = base.compose(base)
            n >>= 1
        return result

    def swap_chart(self) -> "RationalMap":
        """Conjugate by x0 <-> x1 (the involution z -> 1/z)."""
        rev0 = BinForm(self.degree, tuple(reversed(self.f1.coeffs)))
        rev1 = BinForm(self.degree, tuple(reversed(self.f0.coeffs)))
        return RationalMap(rev0, rev1, check=False)

    def conjugate_coefficients(self) -> "RationalMap":
        return RationalMap(self.f0.conjugate(), self.f1.conjugate(), check=False)

    def is_polynomial(self) -> bool:
        """True when the map sends infinity to infinity totally, i.e. the
        denominator form is a scalar multiple of x1**d."""
        return all(c == 0 for c in self.f1.coeffs[:-1])

    def __eq__(self, other):
        return (
            isinstance(other, RationalMap)
            and self.degree == other.degree
            and self.f0 == other.f0
            and self.f1 == other.f1
        )

    def __hash__(self):
        return hash((self.f0, self.f1))

    def __str__(self):
        return f"({self.f0.to_unipoly()}) / ({self.f1.to_unipoly()})"

    __repr__ = __str__


def _normalize_pair(f0: BinForm, f1: BinForm):
    coeffs = list(f0.coeffs) + list(f1.coeffs)
    gaussian = any(_is_gaussian(c) and c.im != 0 for c in coeffs)
    if gaussian:
        vals = [GaussianRational.coerce(c) for c in coeffs]
        den = 1
        for z in vals:
            for q in (z.re, z.im):
                den = den * q.denominator // math.gcd(den, q.denominator)
        vals = [z * den for z in vals]
        g = None
        for z in vals:
            if z.is_zero():
                continue
            g = z if g is None else gaussian_gcd(g, z)
        vals = [z / g for z in vals]
        lead = next(z for z in vals if not z.is_zero())
        u = first_quadrant_unit(lead)
        vals = [z * u for z in vals]
        k = f0.degree + 1
        return BinForm(f0.degree, vals[:k]), BinForm(f1.degree, vals[k:])
    vals = [Fraction(c) if not _is_gaussian(c) else c.re for c in coeffs]
    den = 1
    for q in vals:
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = [int(q * den) for q in vals]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    k = f0.degree + 1
    return BinForm(f0.degree, ints[:k]), BinForm(f1.degree, ints[k:])


# ---------------------------------------------------------------------------
# affine expression parser: "z^2 - 1", "(z^2+i)/(2z)", ...
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, gaussian: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.gaussian = gaussian

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        num, den = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at token {self.peek()}")
        return num, den

    def expr(self):
        left = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            right = self.term()
            left = _frac_add(left, right) if op == "+" else _frac_add(
                left, _frac_neg(right)
            )
        return left

    def term(self):
        left = self.factor()
        while True:
            tok = self.peek()
            if tok in ("*", "/"):
                self.take()
                right = self.factor()
                left = _frac_mul(left, right) if tok == "*" else _frac_div(left, right)
            elif tok is not None and (tok == "(" or tok == "z" or tok == "i" or _is_number(tok)):
                right = self.factor()  # implicit multiplication: 2z, 3i
                left = _frac_mul(left, right)
            else:
                return left

    def factor(self):
        tok = self.peek()
        if tok == "-":
            self.take()
            return _frac_neg(self.factor())
        if tok == "+":
            self.take()
            return self.factor()
        base = self.atom()
        while self.peek() == "^":
            self.take()
            expo = self.take()
            if not _is_number(expo) or "/" in expo:
                raise ValueError("integer exponent required")
            base = _frac_pow(base, int(expo))
        return base

    def atom(self):
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                raise ValueError("unbalanced parentheses")
            return inner
        if tok == "z":
            return UniPoly.x(), UniPoly.one()
        if tok == "i":
            return UniPoly([GaussianRational(0, 1)]), UniPoly.one()
        if tok is not None and _is_number(tok):
            return UniPoly([Fraction(tok)]), UniPoly.one()
        raise ValueError(f"unexpected token {tok!r}")


def _tokenize(text: str):
    out = []
    k = 0
    while k < len(text):
        ch = text[k]
        if ch.isspace():
            k += 1
            continue
        if ch in "+-*/^()":
            out.append(ch)
            k += 1
            continue
        if ch in "zi":
            out.append(ch)
            k += 1
            continue
        if ch.isdigit():
            j = k
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(text[k:j])
            k = j
            continue
        raise ValueError(f"bad character {ch!r} in map expression")
    return out


def _is_number(tok) -> bool:
    return tok is not None and tok[0].isdigit()


def _frac_add(x, y):
    return x[0] * y[1] + y[0] * x[1], x[1] * y[1]


def _frac_neg(x):
    return -x[0], x[1]


def _frac_mul(x, y):
    return x[0] * y[0], x[1] * y[1]


def _frac_div(x, y):
    if y[0].is_zero():
        raise ZeroDivisionError("division by zero expression")
    return x[0] * y[1], x[1] * y[0]


def _frac_pow(x, n: int):
    if n < 0:
        return x[1] ** (-n), x[0] ** (-n)
    return x[0] ** n, x[1] ** n


def parse_affine_map(text: str) -> RationalMap:
    """Parse an affine expression in z (and i) into a projective morphism."""
    gaussian = "i" in text
    num, den = _Parser(text, gaussian).parse()
    return RationalMap.from_affine(num, den)


# ---------------------------------------------------------------------------
# ramification and good primes
# ---------------------------------------------------------------------------


def ramification_multiset(f: RationalMap):
    """Ramification indices e >= 2 over the algebraic closure (with
    multiplicity: an irreducible factor of the Wronskian contributes one
    index per root).  Satisfies sum(e - 1) = 2 deg - 2."""
    out = []
    p, q = f.numerator_poly(), f.denominator_poly()
    wronskian = p.derivative() * q - p * q.derivative()
    if not wronskian.is_zero() and wronskian.degree > 0:
        _, factors = squarefree_decomposition(wronskian)
        for factor, mult in factors:
            out.extend([mult + 1] * factor.degree)
    # the point at infinity, in the swapped chart x0 <-> x1
    sw = f.swap_chart()
    ps, qs = sw.numerator_poly(), sw.denominator_poly()
    wsw = ps.derivative() * qs - ps * qs.derivative()
    if not wsw.is_zero():
        mult = 0
        while wsw[mult] == 0 and mult <= wsw.degree:
            mult += 1
        if mult >= 1:
            out.append(mult + 1)
    return sorted(out)


def choose_good_prime(maps, p_min: int = 3, p_max: int = 10000) -> int:
    """Smallest odd prime >= p_min of good reduction for every map that also
    divides no ramification index of any map."""
    rams = set()
    resultants = []
    for f in maps:
        if f.is_gaussian():
            raise ValueError("good-prime search is implemented over Q")
        rams.update(ramification_multiset(f))
        res = sylvester_resultant(f.f0, f.f1)
        resultants.append(Fraction(res))
    p = max(3, p_min)
    while p <= p_max:
        if _is_prime(p) and p % 2 == 1:
            ok = all(res.numerator % p != 0 for res in resultants)
            ok = ok and all(e % p != 0 for e in rams)
            if ok:
                return p
        p += 1
    raise SearchExhausted(f"no good prime in [{p_min}, {p_max}]")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# reduction mod p and finite maps
# ---------------------------------------------------------------------------


class FiniteMap:
    """Self-map of a finite set {0..n-1}; for P1(F_p) the convention is
    index x < p for the affine point x and index p for infinity."""

    __slots__ = ("table",)

    def __init__(self, table):
        table = tuple(table)
        n = len(table)
        if any(not (0 <= t < n) for t in table):
            raise ValueError("table entries out of range")
        self.table = table

    @property
    def size(self) -> int:
        return len(self.table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def compose(self, other: "FiniteMap") -> "FiniteMap":
        return FiniteMap(tuple(self.table[other.table[x]] for x in range(self.size)))

    def iterate(self, n: int) -> "FiniteMap":
        result = FiniteMap(tuple(range(self.size)))
        base = self
        while n:
            if n & 1:
                result = result.compose(base)
            base = base.compose(base)
            n >>= 1
        return result

    def fixed_points(self):
        return [x for x in range(self.size) if self.table[x] == x]

    def cycle_structure(self):
        """(lcm of cycle lengths, max tail length) of the functional graph."""
        n = self.size
        on_cycle = [False] * n
        seen_global = [False] * n
        lcm = 1
        for start in range(n):
            if seen_global[start]:
                continue
            path = []
            pos = {}
            x = start
            while x not in pos and not seen_global[x]:
                pos[x] = len(path)
                path.append(x)
                x = self.table[x]
            if x in pos:
                cyc = len(path) - pos[x]
                lcm = lcm * cyc // math.gcd(lcm, cyc)
                for y in path[pos[x]:]:
                    on_cycle[y] = True
            for y in path:
                seen_global[y] = True
        # max tail: distance to the cycle
        def tail_len(x):
            t = 0
            while not on_cycle[x]:
                x = self.table[x]
                t += 1
            return t

        max_tail = max((tail_len(x) for x in range(n)), default=0)
        return lcm, max_tail

    def idempotent_power(self) -> int:
        """The least m >= 1 with self**m = self**(2m): the smallest multiple
        of the cycle-length lcm that is >= every tail length."""
        lcm, max_tail = self.cycle_structure()
        m = lcm
        while m < max_tail:
            m += lcm
        return m

    def __eq__(self, other):
        return isinstance(other, FiniteMap) and self.table == other.table

    def __hash__(self):
        return hash(self.table)


def reduce_mod_p(f: RationalMap, p: int) -> FiniteMap:
    """The induced self-map of P1(F_p) for a prime of good reduction."""
    if f.is_gaussian():
        raise ValueError("reduction implemented over Q")
    res = Fraction(sylvester_resultant(f.f0, f.f1))
    if res.numerator % p == 0:
        raise BadReduction(f"resultant vanishes mod {p}")
    d = f.degree
    c0 = [int(c) % p for c in f.f0.coeffs]
    c1 = [int(c) % p for c in f.f1.coeffs]

    def image(a: int, b: int) -> int:
        x = sum(c0[k] * pow(a, d - k, p) * pow(b, k, p) for k in range(d + 1)) % p
        y = sum(c1[k] * pow(a, d - k, p) * pow(b, k, p) for k in range(d + 1)) % p
        if y == 0:
            if x == 0:
                raise BadReduction(f"common root mod {p}")
            return p  # infinity
        return (x * pow(y, -1, p)) % p

    table = [image(x, 1) for x in range(p)] + [image(1, 0)]
    return FiniteMap(table)


def local_germ(f: RationalMap, xi: int, p: int, trunc: int, prec: int) -> Germ:
    """Power-series expansion of f in the residue-disc coordinate at a fixed
    point xi of the reduction mod p (xi = p encodes infinity; chart swapped).

    The disc pZ_p around the integer lift c of xi maps into itself; the
    expansion of f(c + z) - c has p-integral coefficients because the
    denominator is a unit on the disc, and the constant term f(c) - c
    vanishes mod p.  The result is a truncation: its tail certificate
    records integrality only.
    """
    if f.is_gaussian():
        raise ValueError("local germs implemented over Q")
    fbar = reduce_mod_p(f, p)
    if fbar(xi) != xi:
        raise ValueError(f"{xi} is not a fixed point of the reduction mod {p}")
    if xi == p:
        return local_germ(f.swap_chart(), 0, p, trunc, prec)
    c = Fraction(xi)
    num = f.numerator_poly().shift(c)  # P(c + z)
    den = f.denominator_poly().shift(c)
    q0 = den[0]
    if q0 == 0 or q0.numerator % p == 0 or q0.denominator % p == 0:
        raise DenominatorNotUnit(f"denominator not a unit at {xi} mod {p}")
    # 1/den = (1/q0) * sum_k (-(den/q0 - 1))**k, truncated
    u = UniPoly([cf / q0 for cf in den.coeffs]) - UniPoly.one()
    inv = UniPoly.one()
    upow = UniPoly.one()
    for _ in range(trunc):
        upow = _trunc_poly(upow * (-u), trunc)
        if upow.is_zero():
            break
        inv = inv + upow
    series = _trunc_poly(num * inv, trunc)
    coeffs = [series[k] / q0 for k in range(trunc + 1)]
    coeffs[0] -= c
    return Germ(p, coeffs, prec, exact=False)


def _trunc_poly(pp: UniPoly, trunc: int) -> UniPoly:
    return UniPoly(pp.coeffs[: trunc + 1])


# ---------------------------------------------------------------------------
# quadratic points and symmetric-square descent
# ---------------------------------------------------------------------------


class QuadraticNumber:
    """Element a + b*sqrt(disc) of a real or imaginary quadratic field."""

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b, disc):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.disc = Fraction(disc)

    def _check(self, other):
        if isinstance(other, QuadraticNumber):
            if other.disc != self.disc:
                raise ValueError("mixed quadratic fields")
            return other
        return QuadraticNumber(other, 0, self.disc)

    def __add__(self, other):
        o = self._check(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        o = self._check(other)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * self.disc,
            self.a * o.b + self.b * o.a,
            self.disc,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticNumber(self.a, -self.b, self.disc)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.disc

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("norm-zero quadratic number")
        return QuadraticNumber(self.a / n, -self.b / n, self.disc)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        out = QuadraticNumber(1, 0, self.disc)
        base = self
        for _ in range(n):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        o = self._check(other)
        return self.a == o.a and self.b == o.b

    def __str__(self):
        return f"{self.a}+{self.b}*sqrt({self.disc})"

    __repr__ = __str__


class P2Point:
    """Point (u : v : w) of P2(Q), normalized to coprime integers with a
    positive leading coordinate."""

    __slots__ = ("coords",)

    def __init__(self, u, v, w):
        vals = [Fraction(u), Fraction(v), Fraction(w)]
        if all(q == 0 for q in vals):
            raise ValueError("(0:0:0) is not a point")
        den = 1
        for q in vals:
            den = den * q.denominator // math.gcd(den, q.denominator)
        ints = [int(q * den) for q in vals]
        g = 0
        for v_ in ints:
            g = math.gcd(g, v_)
        ints = [v_ // g for v_ in ints]
        lead = next(v_ for v_ in ints if v_ != 0)
        if lead < 0:
            ints = [-v_ for v_ in ints]
        self.coords = tuple(ints)

    def __eq__(self, other):
        return isinstance(other, P2Point) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __str__(self):
        return f"({self.coords[0]} : {self.coords[1]} : {self.coords[2]})"

    __repr__ = __str__


class _TriPoly:
    """Homogeneous polynomial in (u, t, w); keys (i, j, k) are exponents."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        for key, c in (coeffs or {}).items():
            c = Fraction(c)
            if c != 0:
                self.coeffs[key] = c

    @staticmethod
    def constant(c):
        return _TriPoly({(0, 0, 0): c})

    @staticmethod
    def monomial(i, j, k, c=1):
        return _TriPoly({(i, j, k): c})

    def __add__(self, other):
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, Fraction(0)) + c
        return _TriPoly(out)

    def __sub__(self, other):
        return self + other * Fraction(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return _TriPoly({k: c * other for k, c in self.coeffs.items()})
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                key = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return _TriPoly(out)

    __rmul__ = __mul__

    def substitute_t_minus_v(self) -> "_TriPoly":
        """Replace t by -v (flip the sign of odd t-degree terms)."""
        return _TriPoly(
            {k: (-c if k[1] % 2 else c) for k, c in self.coeffs.items()}
        )

    def evaluate(self, u, v, w):
        total = Fraction(0)
        for (i, j, k), c in self.coeffs.items():
            total += c * u**i * v**j * w**k
        return total


class Sym2Map:
    """The self-map of P2 = Sym^2 P1 induced by a self-map of P1.

    A binary quadratic u x0^2 + v x0 x1 + w x1^2 with root pair {P1, P2}
    maps to the quadratic whose roots are {f(P1), f(P2)}; the coefficient
    forms have degree d in (u, v, w).
    """

    def __init__(self, forms):
        self.forms = forms  # (A, B, C) as _TriPoly in (u, v, w)

    def apply(self, point: P2Point) -> P2Point:
        u, v, w = point.coords
        vals = [form.evaluate(u, v, w) for form in self.forms]
        return P2Point(*vals)

    def apply_coeffs(self, u, v, w):
        return tuple(form.evaluate(u, v, w) for form in self.forms)


def symmetric_square_descent(f: RationalMap) -> Sym2Map:
    """Construct the induced map on Sym^2 P1 = P2 by symmetrizing.

    For the quadratic with projective roots P1, P2, the image quadratic is
    (F1(P1) y0 - F0(P1) y1)(F1(P2) y0 - F0(P2) y1); its three coefficients
    are symmetric in the roots and rewrite as polynomials in u = b1 b2,
    t = a1 b2 + a2 b1 and w = a1 a2 via Newton power sums of (a1 b2, a2 b1).
    """
    if f.is_gaussian():
        raise ValueError("descent implemented over Q")
    d = f.degree
    # power sums s_m = (a1 b2)^m + (a2 b1)^m in terms of t and u*w
    t = _TriPoly.monomial(0, 1, 0)
    uw = _TriPoly.monomial(1, 0, 1)
    s = [_TriPoly.constant(2), t]
    for _ in range(2, d + 1):
        s.append(t * s[-1] - uw * s[-2])

    def pair_product(cs, ds):
        # sum over k, l of cs[k] ds[l] * (a1^(d-k) b1^k a2^(d-l) b2^l),
        # symmetrized; contributes w^(d-max) u^min s_{|k-l|} (k != l) and
        # w^(d-k) u^k (k = l, counted per orientation)
        out = _TriPoly()
        for k in range(d + 1):
            for l in range(d + 1):
                c = cs[k] * ds[l]
                if c == 0:
                    continue
                lo, hi = min(k, l), max(k, l)
                base = _TriPoly.monomial(lo, 0, d - hi, c)
                if k == l:
                    out = out + base
                else:
                    # half of the symmetrized sum s_{hi-lo}
                    out = out + base * s[hi - lo] * Fraction(1, 2)
        return out

    c1 = [Fraction(c) for c in f.f1.coeffs]
    c0 = [Fraction(c) for c in f.f0.coeffs]
    A = pair_product(c1, c1)
    B = (pair_product(c1, c0) + pair_product(c0, c1)) * Fraction(-1)
    C = pair_product(c0, c0)
    forms = tuple(form.substitute_t_minus_v() for form in (A, B, C))
    return Sym2Map(forms)


def descend_projective_pair(alpha, beta) -> P2Point:
    """The Q-point of P2 packaging the conjugate pair {(alpha:beta),
    (conj alpha : conj beta)} of a quadratic point of P1."""
    if isinstance(alpha, QuadraticNumber) or isinstance(beta, QuadraticNumber):
        disc = alpha.disc if isinstance(alpha, QuadraticNumber) else beta.disc
        alpha = alpha if isinstance(alpha, QuadraticNumber) else QuadraticNumber(alpha, 0, disc)
        beta = beta if isinstance(beta, QuadraticNumber) else QuadraticNumber(beta, 0, disc)
        u = beta * beta.conjugate()
        v = -(alpha * beta.conjugate() + alpha.conjugate() * beta)
        w = alpha * alpha.conjugate()
        assert u.is_rational() and v.is_rational() and w.is_rational()
        return P2Point(u.a, v.a, w.a)
    u, v, w = Fraction(beta) ** 2, -2 * Fraction(alpha) * Fraction(beta), Fraction(alpha) ** 2
    return P2Point(u, v, w)


def descend_quadratic_point(x: QuadraticNumber) -> P2Point:
    """Descent of an affine quadratic point x: the coefficients of its
    minimal binary quadratic (x0 - x*x1)(x0 - conj(x)*x1)."""
    return descend_projective_pair(x, QuadraticNumber(1, 0, x.disc))
