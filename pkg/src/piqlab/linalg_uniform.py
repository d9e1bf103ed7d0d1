"""Exact linear algebra behind the uniform period bounds.

Periods of periodic rational subspaces under an invertible matrix are
bounded by a constant depending only on the ambient dimension: exterior
powers reduce arbitrary subspaces to lines, and the eigenvalue ratios of a
line's minimal orbit are roots of unity of degree at most (dim)^2.  The
explicit bound implemented here is 2 * lcm{ m : phi(m) <= n**2 }, whose
factor 2 absorbs the sign normalization step of the argument.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import SearchExhausted
from .poly import UniPoly, cyclotomic_part, euler_phi, phi_bounded_orders


class RationalMatrix:
    """Dense square matrix over Q."""

    __slots__ = ("rows", "n")

    def __init__(self, rows):
        rows = [[Fraction(x) for x in row] for row in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("square matrix required")
        self.rows = rows
        self.n = n

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def companion(poly: UniPoly) -> "RationalMatrix":
        """Companion matrix of a monic polynomial."""
        if not poly.is_monic() or poly.degree < 1:
            raise ValueError("monic polynomial of positive degree required")
        n = poly.degree
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = Fraction(1)
        for i in range(n):
            rows[i][n - 1] = -Fraction(poly[i])
        return RationalMatrix(rows)

    @staticmethod
    def block_diagonal(blocks) -> "RationalMatrix":
        n = sum(b.n for b in blocks)
        rows = [[Fraction(0)] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                for j in range(b.n):
                    rows[off + i][off + j] = b.rows[i][j]
            off += b.n
        return RationalMatrix(rows)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalMatrix(
                [[x * other for x in row] for row in self.rows]
            )
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        return RationalMatrix(
            [
                [
                    sum(self.rows[i][k] * other.rows[k][j] for k in range(n))
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = RationalMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def apply(self, vec):
        return [
            sum(self.rows[i][k] * vec[k] for k in range(self.n))
            for i in range(self.n)
        ]

    def determinant(self) -> Fraction:
        rows = [row[:] for row in self.rows]
        n = self.n
        det = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                rows[col], rows[pivot] = rows[pivot], rows[col]
                det = -det
            det *= rows[col][col]
            inv = 1 / rows[col][col]
            for r in range(col + 1, n):
                factor = rows[r][col] * inv
                if factor:
                    rows[r] = [rows[r][j] - factor * rows[col][j] for j in range(n)]
        return det

    def is_invertible(self) -> bool:
        return self.determinant() != 0

    def inverse(self) -> "RationalMatrix":
        n = self.n
        aug = [
            row[:] + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
            for i, row in enumerate(self.rows)
        ]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [aug[r][j] - factor * aug[col][j] for j in range(2 * n)]
        return RationalMatrix([row[n:] for row in aug])

    def minor(self, row_idx, col_idx) -> Fraction:
        sub = RationalMatrix(
            [[self.rows[i][j] for j in col_idx] for i in row_idx]
        )
        return sub.determinant()

    def minimal_polynomial(self) -> UniPoly:
        """Monic minimal polynomial over Q via Krylov-style elimination on
        the flattened powers I, M, M^2, ..."""
        n = self.n
        powers = [RationalMatrix.identity(n)]
        basis = []  # reduced echelon rows over the n^2 coordinates, with combs

        def flatten(m):
            return [m.rows[i][j] for i in range(n) for j in range(n)]

        combos = []
        while True:
            vec = flatten(powers[-1])
            comb = [Fraction(0)] * len(powers)
            comb[-1] = Fraction(1)
            # reduce vec against the basis
            for bvec, bcomb in zip(basis, combos):
                lead = next(k for k, x in enumerate(bvec) if x != 0)
                if vec[lead] != 0:
                    factor = vec[lead] / bvec[lead]
                    vec = [x - factor * y for x, y in zip(vec, bvec)]
                    comb = [
                        x - factor * (y if i < len(bcomb) else 0)
                        for i, (x, y) in enumerate(
                            zip(comb, bcomb + [Fraction(0)] * (len(comb) - len(bcomb)))
                        )
                    ]
            if all(x == 0 for x in vec):
                return UniPoly(comb).monic()
            basis.append(vec)
            combos.append(comb)
            powers.append(powers[-1] * self)


class SubspaceBasis:
    """A list of independent rational column vectors."""

    __slots__ = ("vectors", "dim")

    def __init__(self, vectors):
        vectors = [[Fraction(x) for x in v] for v in vectors]
        if not vectors:
            raise ValueError("empty basis")
        self.vectors = vectors
        self.dim = len(vectors)
        if _rank(vectors) != self.dim:
            raise ValueError("vectors are dependent")

    def ambient(self) -> int:
        return len(self.vectors[0])


def _rank(vectors) -> int:
    rows = [v[:] for v in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
    return rank


def _same_column_space(vs, ws) -> bool:
    rv, rw = _rank(vs), _rank(ws)
    return rv == rw == _rank(vs + ws)


def exterior_power(m: RationalMatrix, k: int) -> RationalMatrix:
    """The induced matrix on the k-th exterior power, in the lexicographic
    basis of k-subsets; entries are k x k minors.  Functorial:
    ext(AB) = ext(A) ext(B)."""
    if not (1 <= k <= m.n):
        raise ValueError("1 <= k <= n required")
    subsets = list(itertools.combinations(range(m.n), k))
    return RationalMatrix(
        [[m.minor(rows, cols) for cols in subsets] for rows in subsets]
    )


def subspace_period(m: RationalMatrix, basis: SubspaceBasis, n_max: int):
    """Least n >= 1 with M^n W = W as column spaces, or None up to n_max."""
    if not m.is_invertible():
        raise ValueError("matrix must be invertible")
    target = basis.vectors
    current = target
    for n in range(1, n_max + 1):
        current = [m.apply(v) for v in current]
        if _same_column_space(current, target):
            return n
    return None


def period_bound(n: int) -> int:
    """A period bound depending only on the ambient dimension:
    n0 = 2 * lcm{ m >= 1 : phi(m) <= n**2 }.

    On a minimal periodic line's orbit span the eigenvalue ratios become
    roots of unity of degree at most (orbit dimension)**2 <= n**2 after the
    sign-normalizing squaring step (which the factor 2 absorbs); higher
    subspace dimensions reduce to lines through exterior powers.  The
    formula is one valid instantiation of the existential bound; the
    property suite checks sufficiency, not minimality.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    orders = phi_bounded_orders(n * n)
    out = 1
    for m in orders:
        out = out * m // math.gcd(out, m)
    return 2 * out


def minpoly_cyclotomic_split(m: RationalMatrix, candidates=None):
    """Find n0 with min-poly(M^n0) = (t-1)^mult * Q, Q cyclotomic-free.

    The search runs over the divisors of period_bound(n) in increasing
    order; the first exponent whose minimal polynomial has cyclotomic part
    a pure power of t-1 is returned along with the exact split.
    """
    if candidates is None:
        candidates = sorted(_divisors(period_bound(m.n)))
    for n0 in candidates:
        p = (m**n0).minimal_polynomial()
        cyclo, rest = cyclotomic_part(p)
        if _is_power_of_t_minus_one(cyclo):
            mult = cyclo.degree
            return n0, mult, rest
    raise SearchExhausted("no candidate exponent produced a clean split")


def _is_power_of_t_minus_one(p: UniPoly) -> bool:
    if p.degree == 0:
        return p == UniPoly.one()
    t_minus_1 = UniPoly([-1, 1])
    while p.degree > 0:
        q, r = p.divmod(t_minus_1)
        if not r.is_zero():
            return False
        p = q
    return p == UniPoly.one()


def _divisors(n: int):
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return out
