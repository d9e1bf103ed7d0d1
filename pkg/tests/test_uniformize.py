import random
from fractions import Fraction

import pytest

from piqlab.errors import ExtensionRequired
from piqlab.numeric import (
    INF,
    GaussianRational,
    PadicNumber,
    padic_from_rational,
    teichmuller_lift,
)
from piqlab.padic_series import Radius
from piqlab.poly import UniPoly
from piqlab.uniformize import (
    Conjugacy,
    Germ,
    LimitVerdict,
    LocalCase,
    boettcher_coordinate,
    certify_isometry,
    classify_local_case,
    find_attracting_fixed_point,
    koenigs_linearize,
    local_uniformization_report,
    root_of_unity_limit_test,
    translate_to_fixed_point,
)

PREC = 24


def germ(coeffs, p, prec=PREC):
    return Germ(p, [Fraction(c) for c in coeffs], prec)


class TestFixedPoint:
    def test_origin_already_fixed(self):
        g = germ([0, 0, 1], 5)  # w^2
        c = find_attracting_fixed_point(g)
        assert c.is_zero()

    def test_affine_equation(self):
        # G(w) = 5 + 5w has fixed point -5/4
        g = germ([5, 5], 5)
        c = find_attracting_fixed_point(g)
        want = padic_from_rational(Fraction(-5, 4), 5, PREC)
        assert c.valuation == 1
        assert c == want

    def test_hensel_quadratic(self):
        # G(w) = 5 + w^2: fixed point satisfies c^2 - c + 5 = 0, c = 5 mod 25
        from piqlab.errors import PrecisionLoss

        g = germ([5, 0, 1], 5)
        c = find_attracting_fixed_point(g)
        assert (c.lift() * 5) % 25 == 5  # c = 5 * unit, c = 5 mod 25
        # the defining equation cancels to full working precision
        try:
            resid = c * c - c + 5
            assert resid.is_zero() or resid.valuation >= PREC - 2
        except PrecisionLoss as exc:
            assert exc.known_floor >= PREC - 2

    def test_uniqueness_against_scan(self):
        # brute scan of the residue disc mod p^3 finds a single fixed residue
        g = germ([5, 10, 1], 5)
        c = find_attracting_fixed_point(g)
        hits = [
            w
            for w in range(0, 125, 5)
            if (5 + 10 * w + w * w - w) % 125 == 0
        ]
        assert len(hits) == 1
        assert c.lift(2) * 5 % 125 == hits[0] % 125 or c.lift(3) % 125 == hits[0]


class TestKoenigs:
    def test_linear_germ_gives_identity(self):
        g = germ([0, 5], 5)
        conj = koenigs_linearize(g, 8)
        assert conj.phi.coefficient((1,)) == PadicNumber.from_int(1, 5, PREC)
        assert all(k == (1,) for k in conj.phi.coeffs)
        assert conj.certified

    def test_quadratic_example_coefficient(self):
        # F = 5z + z^2: c_2 = 1/(lambda^2 - lambda) = 1/20
        g = germ([0, 5, 1], 5)
        conj = koenigs_linearize(g, 8)
        c2 = conj.phi.coefficient((2,))
        assert c2 == padic_from_rational(Fraction(1, 20), 5, PREC)
        assert conj.certified
        assert conj.residual_floor is not None

    def test_random_residuals_certified(self):
        rng = random.Random(83)
        for _ in range(10):
            coeffs = [0, 5 * rng.randint(1, 4)] + [
                rng.randint(-6, 6) for _ in range(rng.randint(1, 4))
            ]
            g = germ(coeffs, 5)
            conj = koenigs_linearize(g, 12)
            assert conj.certified
            # residual certified below the tracked coefficient precision
            assert conj.residual_floor is not None
            assert conj.residual_floor >= conj.prec_floor - 12

    def test_isometry_distance_preservation(self):
        g = germ([0, 5, 3, 1], 5)
        conj = koenigs_linearize(g, 10)
        assert conj.certified
        m = conj.source_exponent
        rng = random.Random(84)
        for _ in range(50):
            a = padic_from_rational(
                Fraction(rng.randint(1, 500) * 5 ** int(m)), 5, PREC
            )
            b = padic_from_rational(
                Fraction(rng.randint(1, 500) * 5 ** int(m)), 5, PREC
            )
            if a == b:
                continue
            fa = _eval_series(conj.phi, a)
            fb = _eval_series(conj.phi, b)
            diff1 = fa - fb
            diff2 = a - b
            assert diff1.valuation == diff2.valuation


def _eval_series(series, point):
    acc = PadicNumber.zero(series.p)
    top = max(k for (k,) in series.coeffs)
    for k in range(top, -1, -1):
        c = series.coefficient((k,))
        acc = acc * point
        if c is not None:
            acc = acc + c if not acc.is_zero() else c
    return acc


class TestBoettcher:
    def test_pure_power(self):
        g = germ([0, 0, 0, 1], 7)  # z^3
        conj = boettcher_coordinate(g, 8)
        assert conj.model == ("power", 3)
        assert conj.phi.coefficient((1,)) == PadicNumber.from_int(1, 7, PREC)
        assert len(conj.phi.coeffs) == 1
        assert conj.certified

    def test_scaled_square(self):
        # F = a z^2 conjugates via phi(z) = z/a: F(phi(z)) = z^2/a = phi(z^2)
        g = germ([0, 0, 3], 7)
        conj = boettcher_coordinate(g, 8)
        assert conj.phi.coefficient((1,)) == padic_from_rational(
            Fraction(1, 3), 7, PREC
        )
        assert len(conj.phi.coeffs) == 1

    def test_cubic_perturbation_residual(self):
        g = germ([0, 0, 1, 1], 7)  # z^2 + z^3
        conj = boettcher_coordinate(g, 10)
        assert conj.certified
        assert conj.residual_floor is not None
        assert conj.residual_floor > 5

    def test_extension_required(self):
        # leading coefficient 3 is not a square mod 5: (d-1)=2-th root missing
        g = germ([0, 0, 0, 3], 5)  # 3 z^3, needs sqrt(1/3) in Z_5
        with pytest.raises(ExtensionRequired):
            boettcher_coordinate(g, 6)


class TestCertifyIsometry:
    def test_identity(self):
        g = germ([0, 5], 5)
        conj = koenigs_linearize(g, 6)
        assert certify_isometry(conj.phi, Fraction(1))

    def test_tie_not_strict(self):
        from piqlab.padic_series import PolydiscSeries

        phi = PolydiscSeries.one_variable([0, 1, 1], 5, PREC)
        assert certify_isometry(phi, Fraction(1))  # |1|5^-2 < |1|5^-1
        assert not certify_isometry(phi, Fraction(0))  # tie at radius 1


class TestClassify:
    def test_case1(self):
        f = germ([0, 2, 1], 5)
        g = germ([0, 3], 5)
        assert classify_local_case(f, g) is LocalCase.CASE_1

    def test_case2a(self):
        f = germ([0, 2, 1], 5)
        g = germ([0, 5, 1], 5)
        assert classify_local_case(f, g) is LocalCase.CASE_2A

    def test_case3b(self):
        f = germ([0, 0, 1], 5)
        g = germ([0, 0, 0, 1], 5)
        assert classify_local_case(f, g) is LocalCase.CASE_3B

    def test_translation_invariance(self):
        # G = 5 + w^2 has multiplier 2c != 0 at its fixed point: Case 3a vs z^2
        f = germ([0, 0, 1], 5)
        g = germ([5, 0, 1], 5)
        assert classify_local_case(f, g) is LocalCase.CASE_3A
        shifted, c = translate_to_fixed_point(g)
        assert classify_local_case(f, shifted) is LocalCase.CASE_3A
        # and conjugating the superattracting factor changes nothing
        f_shift = f.translate(padic_from_rational(Fraction(5), 5, PREC))
        assert classify_local_case(f_shift, g) is LocalCase.CASE_3A


class TestRootOfUnityLimit:
    def test_teichmuller_order_four(self):
        xi = teichmuller_lift(2, 5, PREC)
        res = root_of_unity_limit_test(xi, UniPoly([-1, 1]), 2, n_max=10)
        assert res.verdict is LimitVerdict.CONVERGES_TO_ZERO
        assert res.root_of_unity is True

    def test_xi_one(self):
        xi = PadicNumber.from_int(1, 5, PREC)
        res = root_of_unity_limit_test(xi, UniPoly([-1, 1]), 2)
        assert res.verdict is LimitVerdict.CONVERGES_TO_ZERO
        assert res.root_of_unity is True

    def test_principal_unit_six(self):
        xi = PadicNumber.from_int(6, 5, PREC)
        res = root_of_unity_limit_test(xi, UniPoly([-1, 1]), 2, n_max=12)
        assert res.verdict is LimitVerdict.BOUNDED_AWAY
        assert res.root_of_unity is False
        assert all(v == 1 for v in res.valuations)

    def test_gaussian_exact(self):
        i = GaussianRational(0, 1)
        res = root_of_unity_limit_test(i, UniPoly([-1, 1]), 2, n_max=6)
        # i^(2^n) cycles through -1, 1, 1, ... and X - 1 vanishes on the cycle?
        # orbit of i under squaring: i -> -1 -> 1 -> 1 (cycle {1}); P(1) = 0
        assert res.verdict is LimitVerdict.CONVERGES_TO_ZERO
        assert res.root_of_unity is True

    def test_gaussian_nonroot(self):
        z = GaussianRational(Fraction(3, 5), Fraction(4, 5))
        res = root_of_unity_limit_test(z, UniPoly([-1, 1]), 2)
        assert res.root_of_unity is False
        assert res.verdict is not LimitVerdict.CONVERGES_TO_ZERO

    def test_p_divides_d_rejected(self):
        xi = PadicNumber.from_int(6, 5, PREC)
        with pytest.raises(ValueError):
            root_of_unity_limit_test(xi, UniPoly([-1, 1]), 5)

    def test_consistency_random(self):
        rng = random.Random(85)
        for _ in range(30):
            p = rng.choice([5, 7, 13])
            d = rng.choice([2, 3, 4, 6])
            if d % p == 0:
                continue
            if rng.random() < 0.5:
                xi = teichmuller_lift(rng.randint(2, p - 1), p, PREC)
                expected_root = True
            else:
                xi = PadicNumber.from_int(1 + p * rng.randint(1, p - 1), p, PREC)
                expected_root = False
            res = root_of_unity_limit_test(xi, UniPoly([-1, 1]), d, n_max=10)
            assert res.root_of_unity is expected_root
            # soundness: a certified zero limit forces a root of unity
            if res.verdict is LimitVerdict.CONVERGES_TO_ZERO:
                assert res.root_of_unity


class TestReport:
    def test_case2_report_runs_koenigs(self):
        f = germ([0, 2, 1], 5)
        g = germ([0, 5, 1], 5)
        rep = local_uniformization_report(f, g, 8)
        assert rep["case"] == "Case2a"
        factor_g = rep["factors"][1]
        assert factor_g["regime"] == "attracting"
        assert factor_g["conjugacy"]["certified"]
