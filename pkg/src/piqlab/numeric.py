"""Exact scalar arithmetic: rationals, Gaussian rationals, fixed-precision p-adics.

Conventions
-----------
* Rationals are ``fractions.Fraction`` (arbitrary precision, always reduced).
* ``GaussianRational`` is ``re + im*i`` with exact rational parts.
* ``PadicNumber`` keeps the valuation exact and the unit part to a fixed
  number of relative digits.  Absolute values are never floats: ``|x| =
  p**(-valuation)`` is carried around as the exact exponent.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import NoRootInField, PrecisionLoss

Rational = Fraction

INF = math.inf


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


class GaussianRational:
    """Element re + im*i of Q(i), with exact rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, *args):
        raise AttributeError("GaussianRational is immutable")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(_as_fraction(x))

    @staticmethod
    def i() -> "GaussianRational":
        return GaussianRational(0, 1)

    # -- ring/field operations ----------------------------------------------

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Field norm N(z) = z * conj(z) = re**2 + im**2, an exact rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- predicates & hashing -------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_rational(self) -> bool:
        return self.im == 0

    def is_integral(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    # -- text form: "a+bi" with a, b in lowest terms --------------------------

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    @staticmethod
    def parse(text: str) -> "GaussianRational":
        """Inverse of ``str``: accepts "a", "bi", "a+bi", "a-bi"."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational literal")
        if not s.endswith("i"):
            return GaussianRational(Fraction(s))
        body = s[:-1]
        # split at the last top-level +/- that separates the parts
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                re_part, im_part = body[:k], body[k:]
                if im_part in ("+", "-"):
                    im_part += "1"
                return GaussianRational(Fraction(re_part), Fraction(im_part))
        if body in ("", "+", "-"):
            body += "1"
        return GaussianRational(0, Fraction(body))


ONE_I = GaussianRational(0, 1)


def is_root_of_unity_gaussian(z: GaussianRational) -> bool:
    """Decide whether a nonzero Gaussian rational is a root of unity.

    The unit group of the ring of integers of Q(i) is generated by i, and a
    Gaussian rational of infinite multiplicative order can never return to 1,
    so the roots of unity in Q(i) are exactly {1, -1, i, -i}.
    """
    z = GaussianRational.coerce(z)
    if z.is_zero():
        raise ValueError("zero is not allowed")
    if z.im == 0:
        return z.re == 1 or z.re == -1
    if z.re == 0:
        return z.im == 1 or z.im == -1
    return False


# ---------------------------------------------------------------------------
# Gaussian integers: gcd and unit normalization
# ---------------------------------------------------------------------------


def gaussian_int_gcd(ar: int, ai: int, br: int, bi: int):
    """Euclidean gcd in Z[i] on raw integer parts (no Fraction overhead)."""
    while br or bi:
        n = br * br + bi * bi
        tr = ar * br + ai * bi
        ti = ai * br - ar * bi
        # round to nearest so the remainder has norm <= n/2
        qr = (2 * tr + n) // (2 * n)
        qi = (2 * ti + n) // (2 * n)
        rr = ar - (qr * br - qi * bi)
        ri = ai - (qr * bi + qi * br)
        ar, ai, br, bi = br, bi, rr, ri
    return ar, ai


def gaussian_divmod(a: GaussianRational, b: GaussianRational):
    """Rounded division in Z[i]: a = q*b + r with N(r) <= N(b)/2."""
    q = a / b
    qre = (2 * q.re.numerator + q.re.denominator) // (2 * q.re.denominator)
    qim = (2 * q.im.numerator + q.im.denominator) // (2 * q.im.denominator)
    qq = GaussianRational(qre, qim)
    return qq, a - qq * b


def gaussian_gcd(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    """A gcd of Gaussian integers (unique up to units)."""
    if not (a.is_integral() and b.is_integral()):
        raise ValueError("gaussian_gcd expects Gaussian integers")
    gr, gi = gaussian_int_gcd(
        a.re.numerator, a.im.numerator, b.re.numerator, b.im.numerator
    )
    return GaussianRational(gr, gi)


def first_quadrant_unit(g: GaussianRational) -> GaussianRational:
    """The unit u in {1, i, -1, -i} with u*g in the half-open first quadrant.

    For nonzero g exactly one unit multiple satisfies re > 0, im >= 0; this
    pins a canonical associate for hashing and content normalization.
    """
    if g.is_zero():
        raise ValueError("zero has no canonical associate")
    u = GaussianRational(1)
    z = g
    for _ in range(4):
        if z.re > 0 and z.im >= 0:
            return u
        z = z * ONE_I
        u = u * ONE_I
    raise AssertionError("unreachable: some unit multiple lies in the quadrant")


def gaussian_sqrt(z: GaussianRational):
    """Exact square root of z in Q(i), or None when no such root exists."""
    z = GaussianRational.coerce(z)
    if z.is_zero():
        return GaussianRational(0)
    if z.im == 0:
        r = _fraction_sqrt(z.re if z.re > 0 else -z.re)
        if r is None:
            return None
        return GaussianRational(r) if z.re > 0 else GaussianRational(0, r)
    # (c + d i)^2 = z needs c^2 + d^2 = sqrt(N(z)) rational
    t = _fraction_sqrt(z.norm())
    if t is None:
        return None
    c2 = (z.re + t) / 2
    c = _fraction_sqrt(c2)
    if c is None or c == 0:
        return None
    d = z.im / (2 * c)
    root = GaussianRational(c, d)
    return root if root * root == z else None


def _fraction_sqrt(q: Fraction):
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        return None
    return Fraction(rn, rd)


# ---------------------------------------------------------------------------
# p-adic numbers with exact valuation and capped relative precision
# ---------------------------------------------------------------------------


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicNumber:
    """p-adic number  unit * p**valuation  known modulo p**(valuation+prec).

    ``prec`` is the number of known unit digits (relative precision).  The
    valuation is exact; multiplicative operations preserve relative
    precision, and additive cancellation reduces it.  Full cancellation
    raises :class:`PrecisionLoss` rather than inventing a valuation.
    """

    __slots__ = ("p", "valuation", "unit", "prec")

    def __init__(self, p: int, valuation, unit: int, prec: int):
        if p < 2:
            raise ValueError("prime must be >= 2")
        self.p = p
        if valuation == INF:
            self.valuation = INF
            self.unit = 0
            self.prec = INF
            return
        if prec <= 0:
            raise PrecisionLoss(f"no unit digits left (prec={prec})")
        modulus = p**prec
        unit %= modulus
        if unit % p == 0:
            raise ValueError("unit part divisible by p")
        self.valuation = int(valuation)
        self.unit = unit
        self.prec = int(prec)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(p: int) -> "PadicNumber":
        return PadicNumber(p, INF, 0, 1)

    @staticmethod
    def from_int(n: int, p: int, prec: int) -> "PadicNumber":
        if n == 0:
            return PadicNumber.zero(p)
        v = _vp(n, p)
        return PadicNumber(p, v, n // p**v, prec)

    # -- basic queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def abs_exponent(self):
        """e with |x| = p**(-e); INF for zero."""
        return self.valuation

    @property
    def abs_known(self):
        """x is certified modulo p**abs_known."""
        return self.valuation + self.prec

    def is_unit(self) -> bool:
        return self.valuation == 0

    def residue(self) -> int:
        """Image in Z/p of a p-adic integer."""
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise ValueError("not a p-adic integer")
        if self.valuation > 0:
            return 0
        return self.unit % self.p

    def lift(self, digits=None) -> int:
        """Integer representative of x / p**valuation modulo p**digits."""
        if self.is_zero():
            return 0
        d = self.prec if digits is None else min(digits, self.prec)
        return self.unit % self.p**d

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: "PadicNumber"):
        if self.p != other.p:
            raise ValueError("mixed primes")

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.valuation, -self.unit, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        p = self.p
        v0 = min(self.valuation, other.valuation)
        known = min(self.abs_known, other.abs_known)
        digits = known - v0
        if digits <= 0:
            raise PrecisionLoss("operands known to disjoint precision", known_floor=known)
        modulus = p**digits
        s = (
            self.unit * p ** (self.valuation - v0)
            + other.unit * p ** (other.valuation - v0)
        ) % modulus
        if s == 0:
            raise PrecisionLoss(
                f"full cancellation: |result| <= {p}^{-known}", known_floor=known
            )
        shift = _vp(s, p)
        if shift >= digits:
            raise PrecisionLoss("cancellation to working precision", known_floor=known)
        return PadicNumber(p, v0 + shift, s // p**shift, digits - shift)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return PadicNumber.zero(self.p)
        prec = min(self.prec, other.prec)
        return PadicNumber(
            self.p, self.valuation + other.valuation, self.unit * other.unit, prec
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise ZeroDivisionError("p-adic inverse of zero")
        inv = pow(self.unit, -1, self.p**self.prec)
        return PadicNumber(self.p, -self.valuation, inv, self.prec)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if self.is_zero():
            if n <= 0:
                raise ZeroDivisionError("0**nonpositive")
            return self
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicNumber(self.p, 0, 1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            return other
        if isinstance(other, int):
            return PadicNumber.from_int(other, self.p, self.prec if self.prec != INF else 64)
        if isinstance(other, Fraction):
            return padic_from_rational(other, self.p, self.prec if self.prec != INF else 64)
        raise TypeError(f"cannot coerce {type(other).__name__} to PadicNumber")

    # -- comparisons: equality to the shared working precision -------------------

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.valuation != other.valuation:
            return False
        d = min(self.prec, other.prec)
        return (self.unit - other.unit) % self.p**d == 0

    def __hash__(self):
        raise TypeError("PadicNumber is approximate beyond its precision; not hashable")

    def __str__(self):
        if self.is_zero():
            return "0"
        return f"{self.unit}*{self.p}^{self.valuation} + O({self.p}^{self.abs_known})"

    __repr__ = __str__


def padic_from_rational(q, p: int, prec: int) -> PadicNumber:
    """Exact valuation and unit digits of a rational number in Q_p.

    The denominator may be divisible by p (negative valuation is fine); zero
    maps to the exact zero with valuation +infinity.
    """
    q = _as_fraction(q)
    if q == 0:
        return PadicNumber.zero(p)
    vn = _vp(q.numerator, p)
    vd = _vp(q.denominator, p)
    num = q.numerator // p**vn
    den = q.denominator // p**vd
    unit = num * pow(den, -1, p**prec)
    return PadicNumber(p, vn - vd, unit, prec)


def teichmuller_lift(a: int, p: int, prec: int) -> PadicNumber:
    """The Teichmuller representative of a nonzero residue: the unique
    (p-1)-th root of unity in Z_p congruent to a mod p."""
    if a % p == 0:
        raise ValueError("residue must be nonzero mod p")
    modulus = p**prec
    x = a % modulus
    while True:
        y = pow(x, p, modulus)
        if y == x:
            break
        x = y
    return PadicNumber(p, 0, x, prec)


def nth_root_padic(x: PadicNumber, n: int) -> PadicNumber:
    """Some y in Q_p with y**n = x to working precision.

    Strategy: the valuation must be divisible by n, and the unit part must
    have an n-th root.  Any root reduces mod p**(2*w+1), w = v_p(n), to a
    residue a with a**n = unit there; since the derivative n*y**(n-1) has
    constant valuation w on units, such a residue satisfies the strong Hensel
    criterion and Newton iteration converges.  Exhausting the finitely many
    residues therefore *certifies* NoRootInField.
    """
    if n < 1:
        raise ValueError("root index must be >= 1")
    if x.is_zero():
        raise ValueError("nonzero input required")
    if n == 1:
        return x
    p, prec = x.p, x.prec
    if x.valuation % n != 0:
        raise NoRootInField(f"valuation {x.valuation} not divisible by {n}")
    w = _vp(n, p) if n % p == 0 else 0
    depth = 2 * w + 1
    if p**depth > 10**7:
        raise ValueError("search modulus too large; lower n or p")
    target = prec + w
    modulus = p**target
    u = x.unit % modulus
    seed = None
    m0 = p**depth
    for a in range(1, m0):
        if a % p != 0 and (pow(a, n, m0) - u) % m0 == 0:
            seed = a
            break
    if seed is None:
        raise NoRootInField(f"unit part has no {n}-th root mod {p}^{depth}")
    y = seed
    # Newton: y <- y - f(y)/f'(y), division exact after peeling p**w
    for _ in range(target.bit_length() + 4):
        f = (pow(y, n, modulus * p**w) - u) % (modulus * p**w)
        if f % modulus == 0:
            break
        fp = (n * pow(y, n - 1, modulus * p**w)) % (modulus * p**w)
        fp_unit = fp // p**w
        step = (f // p**w) * pow(fp_unit, -1, modulus)
        y = (y - step) % modulus
    else:
        raise PrecisionLoss("Newton iteration failed to settle")
    root = PadicNumber(p, x.valuation // n, y % p**prec, prec)
    return root
