import math
import random
from fractions import Fraction

import pytest

from piqlab.errors import NoRootInField, PrecisionLoss
from piqlab.numeric import (
    INF,
    GaussianRational,
    PadicNumber,
    first_quadrant_unit,
    gaussian_gcd,
    gaussian_sqrt,
    is_root_of_unity_gaussian,
    nth_root_padic,
    padic_from_rational,
    teichmuller_lift,
)

GR = GaussianRational
I = GR(0, 1)


class TestPadicFromRational:
    def test_pure_power_of_p(self):
        x = padic_from_rational(Fraction(25), 5, 4)
        assert x.valuation == 2
        assert x.unit == 1

    def test_one_third_mod_25(self):
        # oracle: 3 * 17 = 51 = 2*25 + 1, so 1/3 = 17 mod 25
        assert pow(3, -1, 25) == 17
        x = padic_from_rational(Fraction(1, 3), 5, 2)
        assert x.valuation == 0
        assert x.lift() == 17

    def test_zero(self):
        assert padic_from_rational(Fraction(0), 5, 4).valuation == INF

    def test_negative_valuation(self):
        x = padic_from_rational(Fraction(7, 50), 5, 3)
        assert x.valuation == -2


class TestPadicArithmetic:
    def test_norm_multiplicative_and_ultrametric(self):
        rng = random.Random(501)
        p = 5
        for _ in range(500):
            a = Fraction(rng.randint(-400, 400) or 1, rng.randint(1, 60))
            b = Fraction(rng.randint(-400, 400) or 1, rng.randint(1, 60))
            x = padic_from_rational(a, p, 12)
            y = padic_from_rational(b, p, 12)
            assert (x * y).abs_exponent == x.abs_exponent + y.abs_exponent
            try:
                s = x + y
            except PrecisionLoss:
                continue
            assert s.abs_exponent >= min(x.abs_exponent, y.abs_exponent)
            # exactness cross-check against Fraction arithmetic
            assert s == padic_from_rational(a + b, p, 12)

    def test_full_cancellation_raises(self):
        x = padic_from_rational(Fraction(7), 5, 3)
        with pytest.raises(PrecisionLoss):
            _ = x - x

    def test_division_round_trip(self):
        x = padic_from_rational(Fraction(10, 3), 7, 8)
        y = padic_from_rational(Fraction(-49, 11), 7, 8)
        assert (x / y) * y == x

    def test_rational_field_identities(self):
        rng = random.Random(77)
        for _ in range(200):
            a = Fraction(rng.randint(-99, 99), rng.randint(1, 40))
            b = Fraction(rng.randint(-99, 99), rng.randint(1, 40))
            c = Fraction(rng.randint(-99, 99), rng.randint(1, 40))
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            if b != 0:
                assert (a / b) * b == a


class TestGaussianRational:
    def test_norm_and_inverse(self):
        z = GR(Fraction(3), Fraction(4))
        assert z.norm() == 25
        assert z * z.inverse() == GR(1)

    def test_str_parse_round_trip(self):
        rng = random.Random(3)
        for _ in range(50):
            z = GR(
                Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
                Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
            )
            assert GR.parse(str(z)) == z
        assert GR.parse("i") == I
        assert GR.parse("-i") == -I
        assert GR.parse("1/2-3/4i") == GR(Fraction(1, 2), Fraction(-3, 4))

    def test_root_of_unity_documented_cases(self):
        ratio = (GR(1) + 2 * I) / (GR(1) - 2 * I)
        assert ratio.norm() == 1
        assert not is_root_of_unity_gaussian(ratio)
        assert is_root_of_unity_gaussian(I)
        assert not is_root_of_unity_gaussian(GR(Fraction(3, 5), Fraction(4, 5)))

    def test_root_of_unity_brute_force_powers(self):
        # (3+4i)/5 has norm 1 but no power up to 12 returns to 1
        z = GR(Fraction(3, 5), Fraction(4, 5))
        w = GR(1)
        for _ in range(12):
            w = w * z
            assert w != GR(1)

    def test_root_of_unity_matches_brute_force_random(self):
        rng = random.Random(11)
        count = 0
        while count < 100:
            w = GR(rng.randint(-9, 9), rng.randint(-9, 9))
            if w.is_zero():
                continue
            z = w / w.conjugate()
            assert z.norm() == 1
            brute = False
            acc = GR(1)
            for _ in range(24):
                acc = acc * z
                if acc == GR(1):
                    brute = True
                    break
            assert is_root_of_unity_gaussian(z) == brute
            count += 1

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            is_root_of_unity_gaussian(GR(0))


class TestGaussianIntegers:
    def test_gcd_divides(self):
        rng = random.Random(19)
        for _ in range(60):
            g = GR(rng.randint(-9, 9), rng.randint(-9, 9))
            if g.is_zero():
                continue
            a = g * GR(rng.randint(-5, 5), rng.randint(-5, 5))
            b = g * GR(rng.randint(-5, 5), rng.randint(-5, 5))
            if a.is_zero() or b.is_zero():
                continue
            d = gaussian_gcd(a, b)
            assert (a / d).is_integral() and (b / d).is_integral()
            assert (d / g).is_integral()  # g divides every common divisor's lcm-side

    def test_first_quadrant_unit_unique(self):
        for re in range(-3, 4):
            for im in range(-3, 4):
                g = GR(re, im)
                if g.is_zero():
                    continue
                u = first_quadrant_unit(g)
                z = u * g
                assert z.re > 0 and z.im >= 0

    def test_gaussian_sqrt(self):
        assert gaussian_sqrt(GR(-7, -24)) in (GR(3, -4), GR(-3, 4))
        assert gaussian_sqrt(GR(-1)) in (I, -I)
        assert gaussian_sqrt(GR(2, 0)) is None
        r = gaussian_sqrt(GR(0, 2))
        assert r is not None and r * r == GR(0, 2)


class TestNthRoot:
    def test_square_root_of_4_mod_7(self):
        x = PadicNumber.from_int(4, 7, 10)
        y = nth_root_padic(x, 2)
        assert y**2 == x
        assert y.residue() == 2  # Hensel branch lifted from residue root 2

    def test_trivial_first_root(self):
        x = padic_from_rational(Fraction(11, 3), 5, 6)
        assert nth_root_padic(x, 1) == x

    def test_root_of_one(self):
        one = PadicNumber.from_int(1, 7, 8)
        for n in (2, 3, 5):
            assert nth_root_padic(one, n) ** n == one

    def test_odd_valuation_rejected(self):
        x = PadicNumber.from_int(5, 5, 6)
        with pytest.raises(NoRootInField):
            nth_root_padic(x, 2)

    def test_nonresidue_rejected(self):
        # 3 is not a square mod 5
        x = PadicNumber.from_int(3, 5, 6)
        with pytest.raises(NoRootInField):
            nth_root_padic(x, 2)

    def test_wild_case_p_divides_n(self):
        # square roots in Z_2: 17 is a square (17 = 1 mod 16), 3 is not
        x = PadicNumber.from_int(17, 2, 10)
        y = nth_root_padic(x, 2)
        assert y * y == x
        with pytest.raises(NoRootInField):
            nth_root_padic(PadicNumber.from_int(3, 2, 10), 2)

    def test_random_perfect_powers(self):
        rng = random.Random(23)
        for _ in range(40):
            p = rng.choice([3, 5, 7, 11])
            n = rng.choice([2, 3, 4])
            base = padic_from_rational(
                Fraction(rng.randint(1, 50), rng.randint(1, 50)), p, 10
            )
            if base.is_zero():
                continue
            x = base**n
            y = nth_root_padic(x, n)
            assert y**n == x


class TestTeichmuller:
    def test_orders(self):
        w = teichmuller_lift(2, 5, 10)
        assert w**4 == PadicNumber.from_int(1, 5, 10)
        assert w**2 != PadicNumber.from_int(1, 5, 10)
        assert w.residue() == 2

    def test_fixed_by_frobenius(self):
        w = teichmuller_lift(3, 7, 8)
        assert w**7 == w
