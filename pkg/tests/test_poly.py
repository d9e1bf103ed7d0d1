import random
from fractions import Fraction

import pytest

from piqlab.numeric import GaussianRational
from piqlab.poly import (
    BiHomPoly,
    UniPoly,
    bihom_divides,
    cyclotomic_part,
    division_polynomial,
    euler_phi,
    multiplication_x_map,
    phi_bounded_orders,
    reconstruct_squarefree,
    squarefree_decomposition,
)

I = GaussianRational(0, 1)
x = UniPoly.x()
one = UniPoly.one()


def rand_poly(rng, deg, lo=-5, hi=5):
    cs = [rng.randint(lo, hi) for _ in range(deg)] + [rng.randint(1, hi)]
    return UniPoly(cs)


class TestUniPolyBasics:
    def test_divmod_exact(self):
        rng = random.Random(5)
        for _ in range(50):
            a = rand_poly(rng, rng.randint(0, 6))
            b = rand_poly(rng, rng.randint(0, 4))
            q, r = a.divmod(b)
            assert q * b + r == a
            assert r.is_zero() or r.degree < b.degree

    def test_gcd_of_shared_factor(self):
        g = UniPoly([1, 2, 1])  # (t+1)^2
        a = g * UniPoly([3, 1])
        b = g * UniPoly([-2, 0, 1])
        assert a.gcd(b) == g.monic()

    def test_resultant_matches_root_product(self):
        # res(f, g) = lc(f)^deg g * prod g(root of f)
        f = UniPoly([-2, 0, 1])  # t^2 - 2
        g = UniPoly([-1, 1])  # t - 1
        # res = lc(g)^2 * f(1) = -1 ... use the symmetric formula instead:
        # res(f, g) = lc(f)^deg g * g(sqrt2) * g(-sqrt2) = (1)(sqrt2-1)(-sqrt2-1) = -1
        assert f.resultant(g) == -1

    def test_resultant_zero_iff_common_root(self):
        f = UniPoly([-1, 0, 1])
        g = UniPoly([-1, 1]) * UniPoly([5, 1])
        assert f.resultant(g) == 0

    def test_gaussian_coefficients(self):
        p = UniPoly([I, 1]) * UniPoly([-I, 1])
        assert p == UniPoly([1, 0, 1])


class TestSquarefree:
    def test_documented_examples(self):
        p = UniPoly([-1, 1]) ** 2 * UniPoly([2, 1])
        lc, factors = squarefree_decomposition(p)
        assert lc == 1
        assert sorted((f.coeffs, e) for f, e in factors) == sorted(
            [(UniPoly([2, 1]).coeffs, 1), (UniPoly([-1, 1]).coeffs, 2)]
        )

        lc, factors = squarefree_decomposition(x)
        assert factors == [(x, 1)]

        p = UniPoly([1, 0, 1]) ** 3
        lc, factors = squarefree_decomposition(p)
        assert factors == [(UniPoly([1, 0, 1]), 3)]

    def test_random_reconstruction(self):
        rng = random.Random(42)
        for _ in range(200):
            p = one
            for _ in range(rng.randint(1, 3)):
                p = p * rand_poly(rng, rng.randint(1, 3)) ** rng.randint(1, 3)
            lc, factors = squarefree_decomposition(p)
            assert reconstruct_squarefree(lc, factors) == p
            for i in range(len(factors)):
                f = factors[i][0]
                assert f.gcd(f.derivative()).degree == 0  # squarefree
                for j in range(i + 1, len(factors)):
                    assert f.gcd(factors[j][0]).degree == 0  # pairwise coprime


class TestCyclotomicPart:
    def test_third_cyclotomic(self):
        c, q = cyclotomic_part(UniPoly([1, 1, 1]))
        assert c == UniPoly([1, 1, 1]) and q == one

    def test_mixed(self):
        p = UniPoly([-2, 0, 1]) * UniPoly([-1, 1])
        c, q = cyclotomic_part(p)
        assert c == UniPoly([-1, 1])
        assert q == UniPoly([-2, 0, 1])

    def test_t4_minus_1(self):
        c, q = cyclotomic_part(UniPoly([-1, 0, 0, 0, 1]))
        assert c == UniPoly([-1, 0, 0, 0, 1]) and q == one

    def test_non_monic_rejected(self):
        with pytest.raises(ValueError):
            cyclotomic_part(UniPoly([1, 2]))

    def test_property_reconstruction_and_no_cyclotomic_left(self):
        rng = random.Random(9)
        for _ in range(40):
            p = one
            for _ in range(rng.randint(1, 2)):
                n = rng.choice([1, 2, 3, 4, 5, 6])
                p = p * (UniPoly.x_power(n) - one)
            p = p * rand_poly(rng, rng.randint(0, 2)).monic()
            c, q = cyclotomic_part(p.monic())
            assert c * q == p.monic()
            for n in phi_bounded_orders(max(q.degree, 1)):
                assert q.gcd(UniPoly.x_power(n) - one).degree == 0


class TestEulerPhi:
    def test_small_values(self):
        assert [euler_phi(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]

    def test_sweep_bound(self):
        assert phi_bounded_orders(1) == [1, 2]
        assert set(phi_bounded_orders(4)) == {1, 2, 3, 4, 5, 6, 8, 10, 12}


class TestDivisionPolynomials:
    def test_psi_1(self):
        assert division_polynomial(1, 0, 1) == one

    def test_psi_2_squared_is_4f(self):
        # psi_2 = 2y, so the x-only part is the constant 2 and
        # psi_2^2 = 4y^2 = 4(x^3 + x) on y^2 = x^3 + x
        p2 = division_polynomial(1, 0, 2)
        assert p2 == UniPoly([2])
        f = UniPoly([0, 1, 0, 1])
        assert p2 * p2 * f == 4 * f

    def test_psi_5_degree(self):
        p5 = division_polynomial(1, 0, 5)
        assert p5.degree == 12  # (25 - 1) / 2

    def test_singular_curve_rejected(self):
        with pytest.raises(ValueError):
            division_polynomial(0, 0, 3)

    def test_doubling_map_explicit(self):
        num, den = multiplication_x_map(1, 0, 2)
        assert num == UniPoly([1, 0, -2, 0, 1])
        assert den == UniPoly([0, 4, 0, 4])

    def test_two_two_composition_equals_four(self):
        # x-map of [2] composed with itself equals the x-map of [4], exactly
        n2, d2 = multiplication_x_map(1, 0, 2)
        n4, d4 = multiplication_x_map(1, 0, 4)
        twice_num = sum(
            (n2[k] * n2**k * d2 ** (4 - k) for k in range(5)), UniPoly.zero()
        )
        twice_den = sum(
            (d2[k] * n2**k * d2 ** (4 - k) for k in range(5)), UniPoly.zero()
        )
        assert twice_num * d4 == twice_den * n4

    def test_degree_of_multiplication_maps(self):
        for n in (2, 3, 5):
            num, den = multiplication_x_map(1, 0, n)
            assert num.degree == n * n
            assert den.degree <= n * n - 1
            assert num.gcd(den).degree == 0


class TestBiHom:
    def test_diagonal_division_examples(self):
        diag = BiHomPoly.diagonal()
        prod = diag * BiHomPoly((1, 1), {(0, 0): 1})  # diagonal * x0*y0
        ok, cof = bihom_divides(diag, prod)
        assert ok and cof == BiHomPoly((1, 1), {(0, 0): 1})

        # x0^2 y1^2 - x1^2 y0^2 = diagonal * (x0 y1 + x1 y0)
        psi = BiHomPoly((2, 2), {(0, 2): 1, (2, 0): -1})
        ok, cof = bihom_divides(diag, psi)
        assert ok and cof == BiHomPoly((1, 1), {(0, 1): 1, (1, 0): 1})

        ok, cof = bihom_divides(diag, BiHomPoly((1, 1), {(0, 0): 1}))
        assert not ok and cof is None

    def test_random_products_recover_cofactor(self):
        rng = random.Random(31)
        for _ in range(60):
            a1, b1 = rng.randint(0, 3), rng.randint(0, 3)
            a2, b2 = rng.randint(0, 3), rng.randint(0, 3)
            phi = BiHomPoly(
                (a1, b1),
                {
                    (rng.randint(0, a1), rng.randint(0, b1)): rng.randint(-4, 4)
                    for _ in range(4)
                },
            )
            theta = BiHomPoly(
                (a2, b2),
                {
                    (rng.randint(0, a2), rng.randint(0, b2)): rng.randint(-4, 4)
                    for _ in range(4)
                },
            )
            if phi.is_zero() or theta.is_zero():
                continue
            ok, cof = bihom_divides(phi, phi * theta)
            assert ok and cof == theta

    def test_product_split(self):
        phi = BiHomPoly((1, 0), {(0, 0): 2, (1, 0): -3})
        psi = BiHomPoly((0, 2), {(0, 0): 1, (0, 2): 5})
        both = phi * psi
        split = both.product_split()
        assert split is not None
        xf, yf = split
        rebuilt = BiHomPoly((1, 0), dict(((i, 0), c) for i, c in enumerate(xf) if c != 0))
        rebuilt = rebuilt * BiHomPoly(
            (0, 2), dict(((0, j), c) for j, c in enumerate(yf) if c != 0)
        )
        assert rebuilt == both
        assert BiHomPoly.diagonal().product_split() is None

    def test_compose_with_pair(self):
        # diagonal pulled back along (z^2, z^3) is x0^2 y1^3 - x1^2 y0^3
        diag = BiHomPoly.diagonal()
        f = ((0, 0, 1), (1, 0, 0))  # z^2 as forms: F0 = x0^2? coefficient rows
        # forms use coefficients c_k of u0^(d-k) u1^k: z^2 -> F0 = u0^2 means (1,0,0)
        F = ((1, 0, 0), (0, 0, 1))
        G = ((1, 0, 0, 0), (0, 0, 0, 1))
        pulled = diag.compose_with_pair(F, G)
        assert pulled == BiHomPoly((2, 3), {(0, 3): 1, (2, 0): -1})

    def test_normalized(self):
        p = BiHomPoly((1, 1), {(0, 0): Fraction(2, 3), (1, 1): Fraction(-4, 3)})
        n = p.normalized()
        assert n.coeffs == {(0, 0): Fraction(1), (1, 1): Fraction(-2)}
        g = BiHomPoly((1, 0), {(0, 0): GaussianRational(0, 2), (1, 0): GaussianRational(2)})
        ng = g.normalized()
        lead = ng.coeffs[min(ng.coeffs)]
        assert lead.re > 0 and lead.im >= 0
