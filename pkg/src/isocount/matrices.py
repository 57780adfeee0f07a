"""Exact integer/rational matrix primitives.

Smith normal form with a deterministic pivot rule, determinantal divisors,
denominators, 2x2 minor sets and the quadratic-residue goodness test for
primes.  No floating point anywhere; entries are Python ints and Fractions.
"""

import itertools
import math
from fractions import Fraction

from .arith import kronecker, lcm_many
from .errors import DomainError

DEFAULT_MAX_DIM = 8


class IntegerMatrix:
    """Immutable square integer matrix of dimension n (2 <= n <= 8 by default)."""

    __slots__ = ("n", "rows")

    def __init__(self, rows, max_dim=DEFAULT_MAX_DIM):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        if n < 1 or n > max_dim:
            raise DomainError("dimension %d outside supported range 1..%d" % (n, max_dim))
        if any(len(r) != n for r in rows):
            raise DomainError("matrix is not square")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):
        raise AttributeError("IntegerMatrix is immutable")

    def __reduce__(self):
        return (IntegerMatrix, (self.rows, self.n))

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag):
        n = len(diag)
        return cls([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols):
        n = len(cols)
        return cls([[cols[j][i] for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "IntegerMatrix(%r)" % (self.rows,)

    def column(self, j):
        return tuple(self.rows[i][j] for i in range(self.n))

    def columns(self):
        return tuple(self.column(j) for j in range(self.n))

    def transpose(self):
        return IntegerMatrix(
            [[self.rows[j][i] for j in range(self.n)] for i in range(self.n)],
            max_dim=self.n,
        )

    def matmul(self, other):
        n = self.n
        a, b = self.rows, other.rows
        return IntegerMatrix(
            [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)],
            max_dim=n,
        )

    def det(self):
        return _int_det(self.rows)

    def flat(self):
        return tuple(x for row in self.rows for x in row)

    def entry_gcd(self):
        g = 0
        for x in self.flat():
            g = math.gcd(g, abs(x))
        return g

    def max_abs(self):
        return max(abs(x) for x in self.flat())


def _int_det(rows):
    # Bareiss fraction-free elimination; exact for integer input
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _frac_det(rows):
    n = len(rows)
    m = [[Fraction(x) for x in r] for r in rows]
    sign = 1
    det = Fraction(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if m[i][k] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return sign * det


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(gamma):
    """(U, D, V) unimodular/diagonal/unimodular with gamma = U * D * V.

    D has d_1 | d_2 | ... | d_n >= 0.  Pivot rule: smallest absolute value
    among nonzero entries of the working submatrix, ties broken by
    row-major position, so the factor triple is reproducible.
    """
    n = gamma.n
    w = [list(r) for r in gamma.rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    # invariant: gamma = U * W * V throughout
    def row_op(i, k, q):  # W[i] -= q*W[k]  =>  U[:,k] += q*U[:,i]
        for j in range(n):
            w[i][j] -= q * w[k][j]
        for r in range(n):
            u[r][k] += q * u[r][i]

    def col_op(j, k, q):  # W[:,j] -= q*W[:,k]  =>  V[k] += q*V[j]
        for r in range(n):
            w[r][j] -= q * w[r][k]
        for c in range(n):
            v[k][c] += q * v[j][c]

    def swap_rows(i, k):
        w[i], w[k] = w[k], w[i]
        for r in range(n):
            u[r][i], u[r][k] = u[r][k], u[r][i]

    def swap_cols(j, k):
        for r in range(n):
            w[r][j], w[r][k] = w[r][k], w[r][j]
        v[j], v[k] = v[k], v[j]

    def negate_row(i):
        for j in range(n):
            w[i][j] = -w[i][j]
        for r in range(n):
            u[r][i] = -u[r][i]

    for k in range(n):
        while True:
            piv = None
            for i in range(k, n):
                for j in range(k, n):
                    x = w[i][j]
                    if x != 0 and (piv is None or abs(x) < abs(w[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break  # remaining block is zero
            if piv != (k, k):
                if piv[0] != k:
                    swap_rows(k, piv[0])
                if piv[1] != k:
                    swap_cols(k, piv[1])
            if w[k][k] < 0:
                negate_row(k)
            dirty = False
            for i in range(k + 1, n):
                if w[i][k] % w[k][k] != 0:
                    row_op(i, k, w[i][k] // w[k][k])
                    dirty = True
                elif w[i][k] != 0:
                    row_op(i, k, w[i][k] // w[k][k])
            for j in range(k + 1, n):
                if w[k][j] % w[k][k] != 0:
                    col_op(j, k, w[k][j] // w[k][k])
                    dirty = True
                elif w[k][j] != 0:
                    col_op(j, k, w[k][j] // w[k][k])
            if dirty:
                continue
            if any(w[i][k] for i in range(k + 1, n)) or any(
                w[k][j] for j in range(k + 1, n)
            ):
                continue
            # divisibility: d_k must divide the rest of the block
            offender = None
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    if w[i][j] % w[k][k] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(k, offender, -1)  # fold offending row into row k, redo

    U = IntegerMatrix(u, max_dim=n)
    D = IntegerMatrix(w, max_dim=n)
    V = IntegerMatrix(v, max_dim=n)
    return U, D, V


def determinantal_divisor(gamma, j):
    """Delta_j(gamma): gcd of all j-by-j minors, via the Smith form."""
    if not 1 <= j <= gamma.n:
        raise DomainError("index %d outside 1..%d" % (j, gamma.n))
    _, d, _ = smith_normal_form(gamma)
    out = 1
    for i in range(j):
        out *= d[i, i]
    return abs(out)


def determinantal_divisors(gamma):
    """(Delta_1, ..., Delta_n) in one Smith form pass."""
    _, d, _ = smith_normal_form(gamma)
    out = []
    acc = 1
    for i in range(gamma.n):
        acc *= abs(d[i, i])
        out.append(acc)
    return tuple(out)


def determinantal_divisor_oracle(rows, j):
    """Independent gcd-over-all-minors computation (no Smith form).

    Used by post-hoc solution verification and by tests as the oracle side
    of the dual-route check.
    """
    n = len(rows)
    if not 1 <= j <= n:
        raise DomainError("index %d outside 1..%d" % (j, n))
    g = 0
    for rsel in itertools.combinations(range(n), j):
        for csel in itertools.combinations(range(n), j):
            minor = _int_det([[rows[r][c] for c in csel] for r in rsel])
            g = math.gcd(g, abs(minor))
    return g


# ---------------------------------------------------------------------------
# Rational symmetric positive definite matrices


class RationalSymMatrix:
    """Symmetric positive definite matrix with exact rational entries.

    Caches den(Q), the integralization den(Q)*Q, and the principal 2x2
    minor set of the integralization.
    """

    __slots__ = ("n", "entries", "_den", "_tilde", "_minors")

    def __init__(self, entries, max_dim=DEFAULT_MAX_DIM):
        rows = tuple(tuple(Fraction(x) for x in r) for r in entries)
        n = len(rows)
        if n < 1 or n > max_dim:
            raise DomainError("dimension %d outside supported range 1..%d" % (n, max_dim))
        if any(len(r) != n for r in rows):
            raise DomainError("matrix is not square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise DomainError("matrix is not symmetric")
        for k in range(1, n + 1):
            if _frac_det([r[:k] for r in rows[:k]]) <= 0:
                raise DomainError("matrix is not positive definite")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_den", None)
        object.__setattr__(self, "_tilde", None)
        object.__setattr__(self, "_minors", None)

    def __setattr__(self, *a):
        raise AttributeError("RationalSymMatrix is immutable")

    def __reduce__(self):
        return (RationalSymMatrix, (self.entries, self.n))

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, RationalSymMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "RationalSymMatrix(%r)" % ([[str(x) for x in r] for r in self.entries],)

    @property
    def den(self):
        if self._den is None:
            object.__setattr__(self, "_den", denominator(self.entries))
        return self._den

    @property
    def tilde(self):
        """den(Q) * Q as an IntegerMatrix."""
        if self._tilde is None:
            d = self.den
            object.__setattr__(
                self,
                "_tilde",
                IntegerMatrix(
                    [[int(x * d) for x in r] for r in self.entries], max_dim=self.n
                ),
            )
        return self._tilde

    def minor_set(self, all_pairs=False):
        if not all_pairs and self._minors is not None:
            return self._minors
        out = minor_set(self, all_pairs=all_pairs)
        if not all_pairs:
            object.__setattr__(self, "_minors", out)
        return out

    def quadratic_value(self, y):
        """y^T Q y as a Fraction."""
        n = self.n
        e = self.entries
        acc = Fraction(0)
        for i in range(n):
            yi = y[i]
            if yi:
                row = e[i]
                acc += yi * sum(row[j] * y[j] for j in range(n))
        return acc

    def bilinear_value(self, x, y):
        n = self.n
        e = self.entries
        acc = Fraction(0)
        for i in range(n):
            xi = x[i]
            if xi:
                row = e[i]
                acc += xi * sum(row[j] * y[j] for j in range(n))
        return acc

    def congruence_by(self, gamma):
        """gamma^T Q gamma as a list-of-lists of Fractions."""
        n = self.n
        g = gamma.rows
        qg = [[sum(self.entries[i][k] * g[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return [
            [sum(g[k][i] * qg[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]

    def ldl(self):
        """Exact Q = U^T diag(d) U with U unit upper triangular.

        Returns (d, u) where d is a list of positive Fractions and u is an
        upper triangular list-of-lists with unit diagonal; used by the
        lattice enumeration to complete squares.
        """
        n = self.n
        a = [[Fraction(x) for x in r] for r in self.entries]
        d = [Fraction(0)] * n
        u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for k in range(n):
            d[k] = a[k][k]
            if d[k] <= 0:
                raise DomainError("not positive definite")
            for j in range(k + 1, n):
                u[k][j] = a[k][j] / d[k]
            for i in range(k + 1, n):
                for j in range(i, n):
                    a[i][j] -= d[k] * u[k][i] * u[k][j]
                    a[j][i] = a[i][j]
        return d, u

    def lambda_min_lower_bound(self):
        """Certified rational lower bound on the smallest eigenvalue.

        det(Q) / trace(Q)^(n-1) works because lambda_max <= trace for a PD
        matrix; crude but rational and safe.
        """
        det = _frac_det([list(r) for r in self.entries])
        tr = sum(self.entries[i][i] for i in range(self.n))
        return det / tr ** (self.n - 1)


def denominator(entries):
    """den(Q): least positive r such that r*Q is integral."""
    dens = []
    for row in entries:
        for x in row:
            dens.append(Fraction(x).denominator)
    return lcm_many(dens)


def minor_set(q, all_pairs=False):
    """The 2x2-determinant set of the integralization of Q.

    Principal minors (rows = columns = {i, j}) by default; all_pairs=True
    widens to every nonnegative 2x2 determinant of the integralization.
    """
    t = q.tilde
    n = q.n
    out = set()
    if not all_pairs:
        for i in range(n):
            for j in range(i + 1, n):
                out.add(t[i, i] * t[j, j] - t[i, j] * t[j, i])
    else:
        for r1, r2 in itertools.combinations(range(n), 2):
            for c1, c2 in itertools.combinations(range(n), 2):
                d = t[r1, c1] * t[r2, c2] - t[r1, c2] * t[r2, c1]
                if d >= 0:
                    out.add(d)
    return frozenset(out)


def is_q_good(p, q, all_pairs=False):
    """True iff p avoids the diagonal of the integralization and -d is a
    nonresidue mod p for every d in the minor set.

    For p = 2 the symbol is the Kronecker symbol (-d | 2).
    """
    t = q.tilde
    for i in range(q.n):
        if t[i, i] % p == 0:
            return False
    for d in q.minor_set(all_pairs=all_pairs):
        if kronecker(-d, p) != -1:
            return False
    return True


class Region:
    """A nested pair of entrywise boxes inside the positive definite cone.

    The outer box describes the working region, the inner box (shrunk by
    `margin` of each side's width) the region from which reference matrices
    are drawn; the inner closure must sit strictly inside the outer box.
    """

    __slots__ = ("n", "lower", "upper", "margin")

    def __init__(self, lower, upper, margin=Fraction(1, 16)):
        self.n = len(lower)
        self.lower = tuple(tuple(Fraction(x) for x in r) for r in lower)
        self.upper = tuple(tuple(Fraction(x) for x in r) for r in upper)
        self.margin = Fraction(margin)
        if not 0 < self.margin < Fraction(1, 2):
            raise DomainError("margin must lie strictly between 0 and 1/2")
        for i in range(self.n):
            for j in range(self.n):
                if self.lower[i][j] >= self.upper[i][j]:
                    raise DomainError("box side [%d][%d] has no positive width" % (i, j))

    @classmethod
    def box_around(cls, q, radius, margin=Fraction(1, 16)):
        r = Fraction(radius)
        lower = [[x - r for x in row] for row in q.entries]
        upper = [[x + r for x in row] for row in q.entries]
        return cls(lower, upper, margin=margin)

    def inner_bounds(self, i, j):
        w = (self.upper[i][j] - self.lower[i][j]) * self.margin
        return self.lower[i][j] + w, self.upper[i][j] - w

    def _in_box(self, entries, inner):
        for i in range(self.n):
            for j in range(self.n):
                if inner:
                    lo, hi = self.inner_bounds(i, j)
                else:
                    lo, hi = self.lower[i][j], self.upper[i][j]
                if not lo <= entries[i][j] <= hi:
                    return False
        return True

    def contains(self, q):
        """Exact membership of a RationalSymMatrix in the outer region."""
        return self._in_box(q.entries, inner=False)

    def contains_inner(self, q):
        return self._in_box(q.entries, inner=True)

    def box_contains_entries(self, entries, inner=False):
        """Box test only (no PD test); entries indexable [i][j]."""
        return self._in_box(entries, inner=inner)
