import random
from fractions import Fraction

import pytest

from piqlab.errors import InvarianceViolated
from piqlab.poly import BiHomPoly
from piqlab.dynamics_p1 import FiniteMap, ProjPoint, parse_affine_map, reduce_mod_p
from piqlab.piq_engine import (
    FiniteDynSystem,
    ProductSystem,
    Subscheme,
    check_invariant,
    empirical_s0,
    finite_stabilization,
    first_entry_time,
    generalized_tail_set,
    modp_piq_report,
    tail_set,
)

Z2 = parse_affine_map("z^2")
Z3 = parse_affine_map("z^3")
SQUARES = ProductSystem(Z2, Z2)
DIAG = Subscheme.diagonal()


class TestInvariance:
    def test_diagonal_equal_maps(self):
        assert check_invariant(SQUARES, DIAG)

    def test_diagonal_unequal_maps_with_witness(self):
        sys23 = ProductSystem(Z2, Z3)
        assert not check_invariant(sys23, DIAG)
        # witness: (2, 2) maps to (4, 8), which exits the diagonal
        pair = (ProjPoint(2, 1), ProjPoint(2, 1))
        image = sys23.apply(pair)
        assert DIAG.contains(pair) and not DIAG.contains(image)

    def test_infinity_lines_invariant_under_polynomials(self):
        for f, g in [(Z2, Z3), (parse_affine_map("z^2 - 1"), Z2)]:
            assert check_invariant(ProductSystem(f, g), Subscheme.infinity_lines())

    def test_infinity_lines_not_invariant_for_nonpolynomial(self):
        inv = parse_affine_map("1/z")
        assert not check_invariant(ProductSystem(inv, Z2), Subscheme.infinity_lines())

    def test_point_invariance(self):
        one = ProjPoint(1, 1)
        assert check_invariant(SQUARES, Subscheme.product_point(one, one))
        two = ProjPoint(2, 1)
        assert not check_invariant(SQUARES, Subscheme.product_point(two, two))

    def test_general_curve_invariance(self):
        # x0 y1 - x1 y0 as an explicit curve equals the diagonal criterion
        curve = Subscheme.curve(BiHomPoly.diagonal())
        assert check_invariant(SQUARES, curve)
        assert not check_invariant(ProductSystem(Z2, Z3), curve)


class TestFirstEntry:
    def test_already_inside(self):
        pair = (ProjPoint(3, 1), ProjPoint(3, 1))
        assert first_entry_time(SQUARES, DIAG, pair, 5) == 0

    def test_enters_at_one(self):
        pair = (ProjPoint(2, 1), ProjPoint(-2, 1))
        assert first_entry_time(SQUARES, DIAG, pair, 5) == 1

    def test_never(self):
        pair = (ProjPoint(2, 1), ProjPoint(3, 1))
        assert first_entry_time(SQUARES, DIAG, pair, 8) is None

    def test_orbit_shift_consistency(self):
        rng = random.Random(101)
        f = parse_affine_map("z^2 - 1")
        system = ProductSystem(f, f)
        pts = [ProjPoint(a, b) for a in range(-3, 4) for b in range(1, 4)]
        for _ in range(40):
            pair = (rng.choice(pts), rng.choice(pts))
            t = first_entry_time(system, DIAG, pair, 6)
            if t is not None and t >= 1:
                shifted = system.apply(pair)
                assert first_entry_time(system, DIAG, shifted, 6) == t - 1


class TestTails:
    def test_tail_zero_nonempty(self):
        pairs = tail_set(SQUARES, DIAG, 0, 3)
        keys = {(str(p), str(q)) for p, q in pairs}
        assert ("1", "-1") in keys
        assert ("2", "-2") in keys
        assert ("1/2", "-1/2") in keys

    def test_tail_one_empty_even_at_height_50(self):
        assert tail_set(SQUARES, DIAG, 1, 50) == []

    def test_tail_requires_invariance(self):
        with pytest.raises(InvarianceViolated):
            tail_set(ProductSystem(Z2, Z3), DIAG, 0, 3)

    def test_generalized_matches_tail_for_invariant(self):
        for s in (0, 1, 2):
            a = tail_set(SQUARES, DIAG, s, 8)
            b = generalized_tail_set(SQUARES, DIAG, s, 8)
            assert a == b

    def test_generalized_no_invariance_needed(self):
        sys23 = ProductSystem(Z2, Z3)
        out = generalized_tail_set(sys23, DIAG, 0, 4)
        for p, q in out:
            assert not DIAG.contains((p, q))
            assert DIAG.contains(sys23.apply((p, q)))


class TestEmpiricalS0:
    def test_squares_headline_value(self):
        assert empirical_s0(SQUARES, DIAG, 50, 12) == 1

    def test_identity_pair(self):
        ident = parse_affine_map("z")
        assert empirical_s0(ProductSystem(ident, ident), DIAG, 10, 5) == 0

    def test_carries_height_and_horizon(self):
        # the value is defined per (H, S_max); same system, small horizon
        assert empirical_s0(SQUARES, DIAG, 10, 3) == 1


class TestFiniteStabilization:
    def brute_force(self, system: FiniteDynSystem) -> int:
        current = set(system.invariant)
        s = 0
        while True:
            nxt = {x for x in range(system.size) if system.table[x] in current}
            nxt |= current
            if nxt == current:
                return s
            current = nxt
            s += 1

    def test_squares_mod_7(self):
        fm = reduce_mod_p(Z2, 7)
        sys7 = FiniteDynSystem(fm.table, frozenset({1}))
        assert finite_stabilization(sys7) == 1  # preimages {1, 6}; 6 is a non-residue

    def test_squares_mod_5(self):
        fm = reduce_mod_p(Z2, 5)
        sys5 = FiniteDynSystem(fm.table, frozenset({1}))
        assert finite_stabilization(sys5) == 2  # {1,4} then {1,2,3,4} then stable

    def test_identity(self):
        sys_id = FiniteDynSystem((0, 1, 2), frozenset({1}))
        assert finite_stabilization(sys_id) == 0

    def test_invariance_checked(self):
        with pytest.raises(InvarianceViolated):
            finite_stabilization(FiniteDynSystem((1, 2, 0), frozenset({0})))

    def test_matches_brute_force_on_monomial_and_affine(self):
        for p in (3, 5, 7, 11, 13):
            tables = []
            for k in (2, 3, 4):
                tables.append(reduce_mod_p(parse_affine_map(f"z^{k}"), p).table)
            for a in (1, 2):
                for b in range(p):
                    tables.append(
                        reduce_mod_p(parse_affine_map(f"{a}z + {b}"), p).table
                    )
            for table in tables:
                fm = FiniteMap(table)
                # invariant subset: forward closure of {0}
                closure = {0}
                x = 0
                while fm(x) not in closure:
                    x = fm(x)
                    closure.add(x)
                system = FiniteDynSystem(table, frozenset(closure))
                assert finite_stabilization(system) == self.brute_force(system)

    def test_matches_brute_force_random_tables(self):
        rng = random.Random(102)
        for _ in range(50):
            n = rng.randint(2, 200)
            table = tuple(rng.randrange(n) for _ in range(n))
            fm = FiniteMap(table)
            seed = rng.randrange(n)
            closure = {seed}
            x = seed
            while fm(x) not in closure:
                x = fm(x)
                closure.add(x)
            extra = {rng.randrange(n) for _ in range(rng.randint(0, 3))}
            for e in list(extra):
                x = e
                while x not in closure:
                    closure.add(x)
                    x = fm(x)
            system = FiniteDynSystem(table, frozenset(closure))
            assert finite_stabilization(system) == self.brute_force(system)

    def test_chain_monotone_and_stable(self):
        rng = random.Random(103)
        n = 60
        table = tuple(rng.randrange(n) for _ in range(n))
        fm = FiniteMap(table)
        closure = {0}
        x = 0
        while fm(x) not in closure:
            x = fm(x)
            closure.add(x)
        system = FiniteDynSystem(table, frozenset(closure))
        s0 = finite_stabilization(system)
        assert s0 <= n - len(closure)
        chain = [set(closure)]
        for _ in range(s0 + 3):
            chain.append(
                {x for x in range(n) if table[x] in chain[-1]} | chain[-1]
            )
        for a, b in zip(chain, chain[1:]):
            assert a <= b
        assert chain[s0] == chain[s0 + 1]


class TestModpReport:
    def test_squares_mod_7(self):
        rep = modp_piq_report(SQUARES, DIAG, 7)
        assert rep["p"] == 7
        assert rep["y_size"] == 8
        assert rep["s0"] >= 0
        # independent exhaustive scan of the 64-point product graph
        fm = reduce_mod_p(Z2, 7)
        n = 8
        table = [fm.table[i] * n + fm.table[j] for i in range(n) for j in range(n)]
        diag = frozenset(i * n + i for i in range(n))
        brute = TestFiniteStabilization().brute_force(
            FiniteDynSystem(tuple(table), diag)
        )
        assert rep["s0"] == brute

    def test_identity_system(self):
        ident = parse_affine_map("z")
        rep = modp_piq_report(ProductSystem(ident, ident), DIAG, 5)
        assert rep["s0"] == 0
        assert rep["idempotent_exponent"] == 1

    def test_chebyshev_mod_5(self):
        f = parse_affine_map("z^3 - 3z")
        rep = modp_piq_report(ProductSystem(f, f), DIAG, 5)
        fm = reduce_mod_p(f, 5)
        n = 6
        table = [fm.table[i] * n + fm.table[j] for i in range(n) for j in range(n)]
        diag = frozenset(i * n + i for i in range(n))
        brute = TestFiniteStabilization().brute_force(
            FiniteDynSystem(tuple(table), diag)
        )
        assert rep["s0"] == brute
        assert set(rep["fixed_points_f"]) == set(
            fm.iterate(rep["idempotent_exponent"]).fixed_points()
        )
