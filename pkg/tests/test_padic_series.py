import random
from fractions import Fraction

import pytest

from piqlab.errors import NotDivisible, TailDominates
from piqlab.numeric import INF, GaussianRational, PadicNumber
from piqlab.padic_series import (
    PolydiscSeries,
    Radius,
    TailBound,
    divisibility_descent_check,
    gauss_norm,
    prime_factor_bound,
    staircase_set,
)
from piqlab.padic_series import ord as series_ord

PREC = 30


def uni(coeffs, p, trunc=None, tail=None):
    return PolydiscSeries.one_variable(coeffs, p, PREC, trunc=trunc, tail=tail)


def multi(mapping, p, nvars=2, trunc=None):
    return PolydiscSeries.from_rational_coeffs(
        mapping, p, PREC, trunc=trunc, nvars=nvars
    )


class TestGaussNorm:
    def test_both_terms_attain(self):
        f = uni([0, 5, 1], 5)
        # |5| * 5^-1 = 5^-2 and |1| * 5^-2 = 5^-2: the norm is 5^-2
        assert gauss_norm(f, Radius.of(1)) == -2

    def test_unit_constant(self):
        f = uni([7], 5)
        assert gauss_norm(f, Radius.of(1)) == 0

    def test_constant_term_attains(self):
        f = uni([25, 5, 0, 1], 5)
        # at radius 5^-2: exponents 2, 1+2=3, 0+6=6 -> min 2
        assert gauss_norm(f, Radius.of(2)) == -2

    def test_multiplicative(self):
        rng = random.Random(71)
        for _ in range(100):
            p = rng.choice([3, 5, 7])
            f = uni([rng.randint(-20, 20) for _ in range(4)], p, trunc=12)
            g = uni([rng.randint(-20, 20) for _ in range(4)], p, trunc=12)
            r = Radius.of(Fraction(rng.randint(0, 3)))
            try:
                nf, ng = gauss_norm(f, r), gauss_norm(g, r)
            except TailDominates:
                continue
            if nf == -INF or ng == -INF:
                continue
            assert gauss_norm(f * g, r) == nf + ng

    def test_tail_dominates_raised(self):
        tail = TailBound(start=3, alpha=Fraction(0), beta=Fraction(0))
        f = uni([0, 5], 5, trunc=2, tail=tail)
        # stored exponent at radius 1 is 1; omitted terms may reach 5^0
        with pytest.raises(TailDominates):
            gauss_norm(f, Radius.of(0))
        # at radius 5^-2 the tail is capped at exponent 6 > stored 3
        assert gauss_norm(f, Radius.of(2)) == -3


class TestOrd:
    def test_documented_examples(self):
        f = uni([0, 5, 1], 5)
        assert series_ord(f, Radius.of(1)) == 2
        assert series_ord(f, Radius.of(2)) == 1
        assert series_ord(uni([3], 5), Radius.of(1)) == 0

    def test_additivity_on_random_certified_pairs(self):
        rng = random.Random(72)
        checked = 0
        while checked < 200:
            p = rng.choice([3, 5, 7])
            f = uni([rng.randint(-30, 30) for _ in range(rng.randint(1, 5))], p, trunc=16)
            g = uni([rng.randint(-30, 30) for _ in range(rng.randint(1, 5))], p, trunc=16)
            r = Radius.of(Fraction(rng.randint(0, 2)))
            try:
                of, og = series_ord(f, r), series_ord(g, r)
                ofg = series_ord(f * g, r)
            except (TailDominates, ValueError):
                continue
            assert ofg == of + og
            checked += 1

    def test_unit_iff_ord_zero(self):
        rng = random.Random(73)
        cases = 0
        while cases < 100:
            p = rng.choice([3, 5, 7])
            r = Radius.of(1)
            make_unit = cases % 2 == 0
            if make_unit:
                coeffs = [rng.randint(1, p - 1)] + [
                    rng.randint(-9, 9) for _ in range(3)
                ]
            else:
                coeffs = [p * rng.randint(1, 3)] + [rng.randint(1, 9) for _ in range(2)]
            f = uni(coeffs, p, trunc=10)
            try:
                o = series_ord(f, r)
            except (TailDominates, ValueError):
                continue
            # formal inverse over Q to the truncation degree; f is a unit of
            # the disc algebra iff the inverse has reciprocal norm AND its
            # coefficients decay (the truncated inverse is itself ord 0 --
            # otherwise the formal inverse never converges on the closed disc)
            inv = _formal_inverse([Fraction(c) for c in coeffs], 10)
            g = uni(inv, p, trunc=10)
            invertible = (
                gauss_norm(g, r) == -gauss_norm(f, r) and series_ord(g, r) == 0
            )
            assert (o == 0) == invertible
            cases += 1


def _formal_inverse(coeffs, trunc):
    c0 = coeffs[0]
    out = [Fraction(1) / c0]
    for k in range(1, trunc + 1):
        s = Fraction(0)
        for j in range(1, min(k, len(coeffs) - 1) + 1):
            s += coeffs[j] * out[k - j]
        out.append(-s / c0)
    return out


class TestStaircase:
    def test_one_variable(self):
        f = uni([0, 5, 1], 5)
        assert staircase_set(f, Radius.of(1), 4) == {(1,), (2,)}

    def test_unit_constant(self):
        assert staircase_set(uni([3], 5), Radius.of(1), 3) == {(0,)}

    def test_two_variables(self):
        f = multi({(1, 1): 1, (2, 0): 5}, 5)
        got = staircase_set(f, Radius.of(0, 0), 3)
        assert got == {(1, 1), (2, 0)}

    def test_monotone_and_stabilizes(self):
        rng = random.Random(74)
        for _ in range(50):
            p = rng.choice([3, 5])
            deg = rng.randint(1, 4)
            f = multi(
                {
                    (i, j): rng.randint(-20, 20)
                    for i in range(deg + 1)
                    for j in range(deg + 1 - i)
                },
                p,
            )
            if not f.coeffs:
                continue
            r = Radius.of(0, 0)
            sizes = []
            prev = set()
            for m in range(0, 4 * deg + 1):
                cur = staircase_set(f, r, m)
                assert prev <= cur
                sizes.append(len(cur))
                prev = cur
            assert sizes[-1] == sizes[4 * deg - 1]  # stabilized before depth 4D


class TestPrimeFactorBound:
    def test_two_visible_factors(self):
        f = uni([0, 5, 1], 5)  # z(z + 5)
        assert prime_factor_bound(f, Radius.of(0)) == 2

    def test_unit(self):
        assert prime_factor_bound(uni([7], 5), Radius.of(0)) == 0

    def test_three_linear_factors(self):
        # (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6, p = 7, radius 1
        f = uni([-6, 11, -6, 1], 7)
        assert prime_factor_bound(f, Radius.of(0)) == 3

    def test_constructed_products(self):
        rng = random.Random(75)
        for _ in range(50):
            p = rng.choice([3, 5, 7])
            k = rng.randint(1, 5)
            prod = uni([1], p, trunc=14)
            for _ in range(k):
                prod = prod * uni([p * rng.randint(1, 2), rng.choice([1, 2])], p, trunc=14)
            assert prime_factor_bound(prod, Radius.of(0)) >= k


class TestDescent:
    def test_trivial_divisor(self):
        h = {(0,): Fraction(3), (2,): Fraction(-1, 2)}
        res = divisibility_descent_check({(0,): 1}, h, 4)
        assert res.in_base_field
        assert res.quotient == h

    def test_exact_division(self):
        f = {(0,): 1, (1,): 1}
        h = {(0,): 1, (2,): -1}
        res = divisibility_descent_check(f, h, 6)
        assert res.quotient == {(0,): Fraction(1), (1,): Fraction(-1)}
        assert res.in_base_field

    def test_imaginary_quotient_detected(self):
        i = GaussianRational(0, 1)
        f = {(0,): 1, (1,): 1}
        # h = (1+T)(1+iT) = 1 + (1+i)T + i T^2
        h = {(0,): GaussianRational(1), (1,): GaussianRational(1, 1), (2,): i}
        res = divisibility_descent_check(f, h, 6)
        assert not res.in_base_field
        assert res.witness is not None
        idx, coeff = res.witness
        assert coeff == i and idx == (1,)

    def test_no_unit_constant_term(self):
        with pytest.raises(NotDivisible):
            divisibility_descent_check({(1,): 1}, {(0,): 1}, 3)

    def test_multivariate_round_trip(self):
        rng = random.Random(76)
        for _ in range(30):
            f = {
                (0, 0): Fraction(rng.randint(1, 5)),
                (1, 0): Fraction(rng.randint(-3, 3)),
                (0, 1): Fraction(rng.randint(-3, 3)),
            }
            g = {
                (0, 0): Fraction(rng.randint(-4, 4)),
                (1, 1): Fraction(rng.randint(-4, 4)),
            }
            h = {}
            for i1, c1 in f.items():
                for i2, c2 in g.items():
                    k = (i1[0] + i2[0], i1[1] + i2[1])
                    h[k] = h.get(k, Fraction(0)) + c1 * c2
            res = divisibility_descent_check(f, h, 6)
            assert res.in_base_field
            got = {k: v for k, v in res.quotient.items() if sum(k) <= 2}
            want = {k: v for k, v in g.items() if v != 0}
            assert got == want


class TestSeriesArithmeticSoundness:
    def test_exact_cancellation_becomes_bound(self):
        p = 5
        f = uni([1, 1], p, trunc=4)
        g = uni([1, -1], p, trunc=4)
        prod = f * g  # 1 - z^2 with an exactly-cancelled z coefficient
        assert prod.coefficient((0,)) is not None
        assert prod.coefficient((2,)) is not None
        assert prod.coefficient((1,)) is None
        assert (1,) in prod.bounds and prod.bounds[(1,)] >= PREC
        # the bound does not spoil norm certification
        assert gauss_norm(prod, Radius.of(1)) == 0

    def test_scale_variable_and_substitute(self):
        p = 5
        phi = uni([0, 1, 2], p, trunc=6)
        lam = PadicNumber.from_int(5, p, PREC)
        scaled = phi.scale_variable(lam)
        assert scaled.coefficient((1,)).valuation == 1
        assert scaled.coefficient((2,)).valuation == 2
        powed = phi.substitute_power(2)
        assert powed.coefficient((2,)) is not None
        assert powed.coefficient((4,)) is not None

    def test_compose_linear(self):
        p = 5
        outer = uni([0, 5, 1], p, trunc=6)  # F(z) = 5z + z^2
        inner = uni([0, 1, 1], p, trunc=6)  # z + z^2
        comp = outer.compose(inner)
        # F(z + z^2) = 5z + 5z^2 + (z + z^2)^2 = 5z + 6z^2 + 2z^3 + z^4
        assert comp.coefficient((1,)) == PadicNumber.from_int(5, p, PREC)
        assert comp.coefficient((2,)) == PadicNumber.from_int(6, p, PREC)
        assert comp.coefficient((3,)) == PadicNumber.from_int(2, p, PREC)
        assert comp.coefficient((4,)) == PadicNumber.from_int(1, p, PREC)
