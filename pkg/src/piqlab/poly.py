"""Exact polynomial arithmetic over Q and Q(i).

Two shapes are provided: dense univariate polynomials (``UniPoly``) and
bihomogeneous polynomials on P1 x P1 (``BiHomPoly``).  Coefficients are
``Fraction`` or :class:`~piqlab.numeric.GaussianRational`; everything is
exact, and divisions either succeed exactly or report failure.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .numeric import GaussianRational, first_quadrant_unit, gaussian_gcd


def _is_gaussian(c) -> bool:
    return isinstance(c, GaussianRational)


def _zero_like(c):
    return GaussianRational(0) if _is_gaussian(c) else Fraction(0)


def _coerce_coeff(c):
    if isinstance(c, (Fraction, GaussianRational)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


# ---------------------------------------------------------------------------
# univariate polynomials, lowest degree first
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial; coefficient list starts at degree 0."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [_coerce_coeff(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- construction ----------------------------------------------------------

    @staticmethod
    def zero() -> "UniPoly":
        return UniPoly([])

    @staticmethod
    def one() -> "UniPoly":
        return UniPoly([1])

    @staticmethod
    def x() -> "UniPoly":
        return UniPoly([0, 1])

    @staticmethod
    def constant(c) -> "UniPoly":
        return UniPoly([c])

    @staticmethod
    def x_power(k: int) -> "UniPoly":
        return UniPoly([0] * k + [1])

    # -- queries ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def leading(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def is_monic(self) -> bool:
        return not self.is_zero() and self.leading() == 1

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    # -- arithmetic ----------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)])

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return UniPoly([c * other for c in self.coeffs])
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UniPoly.zero()
        out = [_zero_like(self.coeffs[0]) + _zero_like(other.coeffs[0])] * (
            len(self.coeffs) + len(other.coeffs) - 1
        )
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = UniPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other])

    def divmod(self, other: "UniPoly"):
        """Exact field division with remainder."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = UniPoly.zero()
        r = self
        dlead = other.leading()
        while not r.is_zero() and r.degree >= other.degree:
            shift = r.degree - other.degree
            c = r.leading() / dlead
            t = UniPoly([0] * shift + [c])
            q = q + t
            r = r - t * other
        return q, r

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def divides(self, other: "UniPoly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead = self.leading()
        return UniPoly([c / lead for c in self.coeffs])

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "UniPoly":
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x):
        acc = _zero_like(self.coeffs[0]) if self.coeffs else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other: "UniPoly") -> "UniPoly":
        acc = UniPoly.zero()
        for c in reversed(self.coeffs):
            acc = acc * other + UniPoly([c])
        return acc

    def shift(self, c) -> "UniPoly":
        """P(x + c)."""
        return self.compose(UniPoly([c, 1]))

    def conjugate(self) -> "UniPoly":
        """Coefficientwise complex conjugation (identity on rational input)."""
        return UniPoly(
            [c.conjugate() if _is_gaussian(c) else c for c in self.coeffs]
        )

    def has_gaussian_coeff(self) -> bool:
        return any(_is_gaussian(c) and c.im != 0 for c in self.coeffs)

    def resultant(self, other: "UniPoly"):
        """res(self, other) via the Euclidean recursion, exact over the field."""
        a, b = self, other
        if a.is_zero() or b.is_zero():
            return Fraction(0)
        acc = Fraction(1)
        while True:
            if b.degree == 0:
                return acc * b.leading() ** a.degree
            r = a % b
            if r.is_zero():
                return _zero_like(a.coeffs[0])
            sign = -1 if (a.degree * b.degree) % 2 else 1
            acc = acc * sign * b.leading() ** (a.degree - r.degree)
            a, b = b, r

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            cs = f"({c})" if _is_gaussian(c) and c.im != 0 else str(c)
            parts.append(cs if k == 0 else (f"{cs}*t^{k}" if k > 1 else f"{cs}*t"))
        return " + ".join(parts)

    __repr__ = __str__


def _yun(poly: UniPoly):
    lead = poly.leading()
    p = poly.monic()
    if p.degree == 0:
        return lead, []
    dp = p.derivative()
    g = p.gcd(dp)
    b = p // g
    c = dp // g
    d = c - b.derivative()
    out = []
    k = 1
    while b.degree > 0:
        a = b.gcd(d)
        if a.degree > 0:
            out.append((a, k))
        b = b // a
        c = d // a
        d = c - b.derivative()
        k += 1
    return lead, out


def squarefree_decomposition(poly: UniPoly):
    """Yun's algorithm: P = lc * prod factor_k**exponent_k, factors monic,
    squarefree and pairwise coprime; reconstruction is exact.

    Returns (leading_coefficient, [(factor, exponent), ...])."""
    if poly.is_zero():
        raise ValueError("nonzero polynomial required")
    return _yun(poly)


def reconstruct_squarefree(lead, factors) -> UniPoly:
    p = UniPoly([lead])
    for f, e in factors:
        p = p * f**e
    return p


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("positive integer required")
    result = n
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            result -= result // d
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        result -= result // m
    return result


def phi_bounded_orders(limit: int):
    """All n >= 1 with euler_phi(n) <= limit; finite since phi(n) <= limit
    forces n <= limit**2 + limit."""
    return [n for n in range(1, limit * limit + limit + 1) if euler_phi(n) <= limit]


def cyclotomic_part(poly: UniPoly):
    """Split a monic polynomial as C * Q where C collects every cyclotomic
    factor and Q has none.

    The sweep runs over all n with phi(n) <= deg P and repeatedly divides out
    gcd(P, t^n - 1); afterwards Q shares no root with any t^n - 1 in range.
    """
    if poly.is_zero() or not poly.is_monic():
        raise ValueError("monic polynomial required")
    deg = poly.degree
    cyclo = UniPoly.one()
    rest = poly
    if deg == 0:
        return cyclo, rest
    for n in phi_bounded_orders(deg):
        tn1 = UniPoly.x_power(n) - UniPoly.one()
        while True:
            g = rest.gcd(tn1)
            if g.degree <= 0:
                break
            cyclo = cyclo * g
            rest = rest // g
    return cyclo, rest


# ---------------------------------------------------------------------------
# division polynomials for y^2 = x^3 + a x + b
# ---------------------------------------------------------------------------


def _division_poly_table(a, b, n_max: int):
    """x-only division polynomials P_n: psi_n = P_n for n odd, y*P_n for n even."""
    a = _coerce_coeff(a)
    b = _coerce_coeff(b)
    f = UniPoly([b, a, 0, 1])
    P = {
        0: UniPoly.zero(),
        1: UniPoly.one(),
        2: UniPoly([2]),
        3: UniPoly([-(a * a), 12 * b, 6 * a, 0, 3]),
        4: UniPoly(
            [
                -(4 * (8 * b * b + a * a * a)),
                -(16 * a * b),
                -(20 * a * a),
                80 * b,
                20 * a,
                0,
                4,
            ]
        ),
    }

    def get(n: int) -> UniPoly:
        if n in P:
            return P[n]
        if n % 2 == 1:
            m = (n - 1) // 2
            if m % 2 == 0:
                val = f**2 * get(m + 2) * get(m) ** 3 - get(m - 1) * get(m + 1) ** 3
            else:
                val = get(m + 2) * get(m) ** 3 - f**2 * get(m - 1) * get(m + 1) ** 3
        else:
            m = n // 2
            val = (
                get(m)
                * (get(m + 2) * get(m - 1) ** 2 - get(m - 2) * get(m + 1) ** 2)
                * Fraction(1, 2)
            )
        P[n] = val
        return val

    for k in range(n_max + 1):
        get(k)
    return P, f


def division_polynomial(a, b, n: int) -> UniPoly:
    """The n-th division polynomial of y^2 = x^3 + a x + b, x-only form.

    For odd n this is psi_n itself; for even n the full psi_n equals y times
    the returned polynomial (so the returned P_2 is the constant 2).
    The curve must be nonsingular: 4a^3 + 27b^2 != 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = _coerce_coeff(a)
    b = _coerce_coeff(b)
    if 4 * a**3 + 27 * b**2 == 0:
        raise ValueError("singular curve")
    table, _ = _division_poly_table(a, b, n)
    return table[n]


def multiplication_x_map(a, b, n: int):
    """Numerator and denominator of x([n]P) as coprime polynomials in x.

    Built from x * psi_n**2 - psi_{n-1} psi_{n+1} over psi_n**2 with y**2
    eliminated via the curve equation; degrees are n**2 and n**2 - 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = _coerce_coeff(a)
    b = _coerce_coeff(b)
    if 4 * a**3 + 27 * b**2 == 0:
        raise ValueError("singular curve")
    if n == 1:
        return UniPoly.x(), UniPoly.one()
    table, f = _division_poly_table(a, b, n + 1)
    Pn, Pm, Pp = table[n], table[n - 1], table[n + 1]
    if n % 2 == 1:
        den = Pn * Pn
        num = UniPoly.x() * den - f * Pm * Pp
    else:
        den = f * Pn * Pn
        num = UniPoly.x() * den - Pm * Pp
    g = num.gcd(den)
    if g.degree > 0:
        num, den = num // g, den // g
    return num, den


# ---------------------------------------------------------------------------
# bihomogeneous polynomials on P1 x P1
# ---------------------------------------------------------------------------


class BiHomPoly:
    """Bihomogeneous polynomial of bidegree (a, b) in (x0, x1; y0, y1).

    The coefficient map sends (i, j) to the coefficient of
    x0**(a-i) * x1**i * y0**(b-j) * y1**j.
    """

    __slots__ = ("bidegree", "coeffs")

    def __init__(self, bidegree, coeffs, normalize: bool = False):
        a, b = bidegree
        if a < 0 or b < 0:
            raise ValueError("bidegree components must be nonnegative")
        clean = {}
        for (i, j), c in coeffs.items():
            c = _coerce_coeff(c)
            if c == 0:
                continue
            if not (0 <= i <= a and 0 <= j <= b):
                raise ValueError(f"monomial ({i},{j}) outside bidegree {bidegree}")
            clean[(i, j)] = c
        self.bidegree = (a, b)
        self.coeffs = clean
        if normalize:
            self._normalize_content()

    @staticmethod
    def diagonal() -> "BiHomPoly":
        """x0*y1 - x1*y0, cutting the diagonal of P1 x P1."""
        return BiHomPoly((1, 1), {(0, 1): 1, (1, 0): -1})

    @staticmethod
    def infinity_lines() -> "BiHomPoly":
        """x1*y1, cutting ({inf} x P1) + (P1 x {inf}) for inf = (1:0)."""
        return BiHomPoly((1, 1), {(1, 1): 1})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, BiHomPoly):
            return NotImplemented
        return self.bidegree == other.bidegree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.bidegree, tuple(sorted(self.coeffs.items()))))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return BiHomPoly(
                self.bidegree, {k: c * other for k, c in self.coeffs.items()}
            )
        a = (self.bidegree[0] + other.bidegree[0], self.bidegree[1] + other.bidegree[1])
        out = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, _zero_like(c1)) + c1 * c2
        return BiHomPoly(a, out)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.bidegree != other.bidegree:
            raise ValueError("bidegree mismatch in addition")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, _zero_like(c)) + c
        return BiHomPoly(self.bidegree, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def evaluate(self, x_pair, y_pair):
        """Evaluate at x = (x0, x1), y = (y0, y1)."""
        a, b = self.bidegree
        x0, x1 = x_pair
        y0, y1 = y_pair
        total = None
        for (i, j), c in self.coeffs.items():
            term = c * x0 ** (a - i) * x1**i * y0 ** (b - j) * y1**j
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        return total

    # -- division ---------------------------------------------------------------

    def _leading_key(self):
        return min(self.coeffs)  # lex order on (i, j): a genuine monomial order

    def divide_exact(self, numerator: "BiHomPoly"):
        """If numerator == self * theta for bihomogeneous theta, return theta;
        otherwise return None.  Long division by the lex-leading term; for a
        single divisor the remainder vanishes iff divisibility holds."""
        if self.is_zero():
            raise ValueError("division by the zero polynomial")
        a0, b0 = self.bidegree
        a1, b1 = numerator.bidegree
        if a1 < a0 or b1 < b0:
            return None
        lead = self._leading_key()
        lead_c = self.coeffs[lead]
        qdeg = (a1 - a0, b1 - b0)
        quot = {}
        rem = dict(numerator.coeffs)
        while rem:
            key = min(rem)
            i, j = key[0] - lead[0], key[1] - lead[1]
            if not (0 <= i <= qdeg[0] and 0 <= j <= qdeg[1]):
                return None
            c = rem[key] / lead_c
            quot[(i, j)] = quot.get((i, j), _zero_like(c)) + c
            for (si, sj), sc in self.coeffs.items():
                tkey = (si + i, sj + j)
                new = rem.get(tkey, _zero_like(sc)) - c * sc
                if new == 0:
                    rem.pop(tkey, None)
                else:
                    rem[tkey] = new
        return BiHomPoly(qdeg, quot)

    def compose_with_pair(self, f_forms, g_forms) -> "BiHomPoly":
        """Substitute (x0, x1) -> (F0, F1) and (y0, y1) -> (G0, G1).

        The F's and G's are binary forms given as coefficient tuples in the
        same convention as :class:`BiHomPoly` rows: form = sum c_k u0**(d-k) u1**k.
        Result has bidegree (a*deg F, b*deg G).
        """
        a, b = self.bidegree
        F0, F1 = f_forms
        G0, G1 = g_forms
        df = len(F0) - 1
        dg = len(G0) - 1
        fx = _binary_power_table(F0, F1, a)
        gy = _binary_power_table(G0, G1, b)
        out = {}
        for (i, j), c in self.coeffs.items():
            xpart = fx[i]  # F0**(a-i) * F1**i, a binary form of degree a*df
            ypart = gy[j]
            for ik, xc in enumerate(xpart):
                if xc == 0:
                    continue
                for jk, yc in enumerate(ypart):
                    if yc == 0:
                        continue
                    key = (ik, jk)
                    out[key] = out.get(key, _zero_like(c)) + c * xc * yc
        return BiHomPoly((a * df, b * dg), out)

    def product_split(self):
        """If self = phi(x) * psi(y), return the two binary-form factors
        (as coefficient tuples); otherwise None.  Exact rank-1 test on the
        coefficient matrix."""
        a, b = self.bidegree
        if self.is_zero():
            return None
        rows = [[self.coeffs.get((i, j), Fraction(0)) for j in range(b + 1)] for i in range(a + 1)]
        pivot = None
        for i in range(a + 1):
            for j in range(b + 1):
                if rows[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        pi, pj = pivot
        pc = rows[pi][pj]
        xform = [rows[i][pj] / pc for i in range(a + 1)]
        yform = [rows[pi][j] for j in range(b + 1)]
        for i in range(a + 1):
            for j in range(b + 1):
                if rows[i][j] != xform[i] * yform[j]:
                    return None
        return tuple(xform), tuple(yform)

    def _normalize_content(self):
        pass  # normalization is performed by normalized() to keep __init__ cheap

    def normalized(self) -> "BiHomPoly":
        """Primitive representative with a pinned leading unit: integer (or
        Gaussian-integer) coefficients with content 1, lex-leading coefficient
        positive (first-quadrant over Q(i))."""
        if self.is_zero():
            return self
        gaussian = any(_is_gaussian(c) and c.im != 0 for c in self.coeffs.values())
        if gaussian:
            vals = [GaussianRational.coerce(c) for c in self.coeffs.values()]
            den = 1
            for z in vals:
                den = den * (z.re.denominator * z.im.denominator) // math.gcd(
                    den, z.re.denominator * z.im.denominator
                )
            scaled = {k: GaussianRational.coerce(c) * den for k, c in self.coeffs.items()}
            g = None
            for z in scaled.values():
                g = z if g is None else gaussian_gcd(g, z)
            out = {k: z / g for k, z in scaled.items()}
            lead = out[min(out)]
            u = first_quadrant_unit(lead)
            return BiHomPoly(self.bidegree, {k: z * u for k, z in out.items()})
        den = 1
        num_g = 0
        for c in self.coeffs.values():
            c = Fraction(c) if not _is_gaussian(c) else c.re
            den = den * c.denominator // math.gcd(den, c.denominator)
        scaled = {}
        for k, c in self.coeffs.items():
            c = Fraction(c) if not _is_gaussian(c) else c.re
            scaled[k] = c * den
            num_g = math.gcd(num_g, scaled[k].numerator)
        out = {k: v / num_g for k, v in scaled.items()}
        if out[min(out)] < 0:
            out = {k: -v for k, v in out.items()}
        return BiHomPoly(self.bidegree, out)

    def map_coefficients(self, fn) -> "BiHomPoly":
        return BiHomPoly(self.bidegree, {k: fn(c) for k, c in self.coeffs.items()})

    def __str__(self):
        if self.is_zero():
            return "0"
        a, b = self.bidegree
        parts = []
        for (i, j), c in sorted(self.coeffs.items()):
            mono = []
            if a - i:
                mono.append(f"x0^{a - i}" if a - i > 1 else "x0")
            if i:
                mono.append(f"x1^{i}" if i > 1 else "x1")
            if b - j:
                mono.append(f"y0^{b - j}" if b - j > 1 else "y0")
            if j:
                mono.append(f"y1^{j}" if j > 1 else "y1")
            parts.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _binary_power_table(f0, f1, top: int):
    """table[i] = f0**(top-i) * f1**i as coefficient tuples (degree top*deg)."""
    def bmul(u, v):
        out = [_zero_like(_coerce_coeff(u[0])) ] * (len(u) + len(v) - 1)
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                out[i + j] = out[i + j] + _coerce_coeff(a) * _coerce_coeff(b)
        return tuple(out)

    pow0 = [(_coerce_coeff(1),)]
    pow1 = [(_coerce_coeff(1),)]
    for _ in range(top):
        pow0.append(bmul(pow0[-1], tuple(_coerce_coeff(c) for c in f0)))
        pow1.append(bmul(pow1[-1], tuple(_coerce_coeff(c) for c in f1)))
    return [bmul(pow0[top - i], pow1[i]) for i in range(top + 1)]


def bihom_divides(phi: BiHomPoly, psi: BiHomPoly):
    """Whether phi divides psi in the bigraded ring; returns (flag, cofactor).

    The cofactor is exact and satisfies psi == phi * cofactor when flag is
    True; otherwise the cofactor slot is None.
    """
    if phi.is_zero():
        raise ValueError("divisor must be nonzero")
    if psi.is_zero():
        return True, BiHomPoly((0, 0), {})
    theta = phi.divide_exact(psi)
    if theta is None:
        return False, None
    return True, theta
