"""The transfer operator on symmetric matrices, kernel intersections, the
generator selection that assembles the replacement field, and the bounded
replacement matrix.

The operator attached to an integer matrix gamma and a positive integer m
sends Q to gamma^T Q gamma - m^(1/n) Q on the n(n+1)/2-dimensional space of
symmetric matrices.  Gathering kernels over all enumerated gamma for a set
of prime-power pairs produces the subspace in which the reference matrix
can be exchanged for one with controlled arithmetic and no error term; the
containment that justifies the exchange is re-verified here by direct
membership of every enumerated matrix.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .enumeration import (
    CountingInstance,
    SymbolicSymMatrix,
    enum_S,
    verify_membership,
)
from .errors import (
    DomainError,
    InternalConsistencyError,
    NoPointFound,
    PreconditionFailed,
    ZeroKernel,
)
from .matrices import IntegerMatrix, RationalSymMatrix, Region
from .radicals import (
    FieldElement,
    RadicalFieldSpec,
    gram_schmidt,
    kernel_basis_bounded,
    vec_dot,
)
from .arith import factorize, primes_in_range


def sym_index_pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_to_vec(entries, n):
    return tuple(entries[i][j] for (i, j) in sym_index_pairs(n))


def vec_to_sym(vec, n):
    pairs = sym_index_pairs(n)
    out = [[None] * n for _ in range(n)]
    for (i, j), v in zip(pairs, vec):
        out[i][j] = v
        out[j][i] = v
    return out


def scalar_root_is_rational(m, n):
    """m^(1/n) rational <=> every prime exponent of m is divisible by n."""
    return all(e % n == 0 for e in factorize(m).values())


@dataclass(frozen=True)
class TransferOperator:
    """Matrix of Q -> gamma^T Q gamma - m^(1/n) Q on the symmetric basis."""

    gamma: IntegerMatrix
    m: int
    spec: RadicalFieldSpec
    scalar: FieldElement
    rows: tuple

    @property
    def n(self):
        return self.gamma.n

    def apply(self, sym_entries):
        """Image of a symmetric matrix, computed through the stored rows."""
        n = self.n
        vec = sym_to_vec(sym_entries, n)
        vec = [x if isinstance(x, FieldElement) else self.spec.from_rational(x) for x in vec]
        out = [vec_dot(row, vec) for row in self.rows]
        return vec_to_sym(out, n)

    def apply_direct(self, sym_entries):
        """gamma^T Q gamma - m^(1/n) Q evaluated entrywise (spot-check path)."""
        n = self.n
        g = self.gamma.rows
        q = [
            [
                x if isinstance(x, FieldElement) else self.spec.from_rational(x)
                for x in row
            ]
            for row in sym_entries
        ]
        qg = [[_dotcol(q[i], g, j, n) for j in range(n)] for i in range(n)]
        conj = [
            [_dotrow(g, qg, i, j, n) for j in range(n)]
            for i in range(n)
        ]
        return [
            [conj[i][j] - self.scalar * q[i][j] for j in range(n)]
            for i in range(n)
        ]


def _dotcol(qrow, g, j, n):
    acc = None
    for k in range(n):
        if g[k][j]:
            t = qrow[k] * g[k][j]
            acc = t if acc is None else acc + t
    return acc if acc is not None else qrow[0] * 0


def _dotrow(g, qg, i, j, n):
    acc = None
    for k in range(n):
        if g[k][i]:
            t = qg[k][j] * g[k][i]
            acc = t if acc is None else acc + t
    return acc if acc is not None else qg[0][j] * 0


def transfer_operator(gamma, m, spec=None):
    """Exact operator matrix; the scalar m^(1/n) collapses to a rational when
    m is a perfect n-th power."""
    if m < 1:
        raise DomainError("m must be >= 1")
    n = gamma.n
    if spec is None:
        if scalar_root_is_rational(m, n):
            spec = RadicalFieldSpec(n, ())
        else:
            spec = RadicalFieldSpec(n, [m])
    scalar = spec.power_root(m, 1)
    pairs = sym_index_pairs(n)
    g = gamma.rows
    rows = [[None] * len(pairs) for _ in pairs]
    for col, (k, l) in enumerate(pairs):
        # image of the basis matrix B_kl (E_kl + E_lk off-diagonal, E_kk diagonal)
        for rix, (i, j) in enumerate(pairs):
            if k == l:
                val = g[k][i] * g[k][j]
            else:
                val = g[k][i] * g[l][j] + g[l][i] * g[k][j]
            rows[rix][col] = spec.from_rational(val)
    for d, (i, j) in enumerate(pairs):
        rows[d][d] = rows[d][d] - scalar
    rows = tuple(tuple(r) for r in rows)
    return TransferOperator(gamma=gamma, m=m, spec=spec, scalar=scalar, rows=rows)


@dataclass
class SymSubspace:
    """A subspace of the symmetric matrices given by orthogonal-complement
    generator rows (a minimal independent set) and a bounded integral basis."""

    n: int
    spec: RadicalFieldSpec
    generator_rows: tuple  # tuples of FieldElement
    provenance: tuple  # one label per generator row
    basis: tuple  # integral basis vectors of the kernel

    @property
    def dim(self):
        return len(self.basis)

    @property
    def sym_dim(self):
        return self.n * (self.n + 1) // 2

    def annihilates(self, vec):
        vec = [
            x if isinstance(x, FieldElement) else self.spec.from_rational(x)
            for x in vec
        ]
        return all(vec_dot(row, vec).is_zero() for row in self.generator_rows)

    def contains_subspace(self, other):
        """Exact: every basis vector of `other` killed by my generators."""
        return all(self.annihilates(v) for v in other.basis)

    def basis_matrices(self):
        return [vec_to_sym(v, self.n) for v in self.basis]


def full_sym_subspace(n):
    spec = RadicalFieldSpec(1, ())
    dim = n * (n + 1) // 2
    basis = []
    for i in range(dim):
        v = [spec.zero()] * dim
        v[i] = spec.one()
        basis.append(tuple(v))
    return SymSubspace(n=n, spec=spec, generator_rows=(), provenance=(), basis=tuple(basis))


def select_generators(rows_with_labels, n, spec):
    """Greedy minimal independent row set, in the order given.

    rows_with_labels: iterable of (row, label); returns (selected rows,
    labels, pair set).  The greedy scan order (pairs sorted, matrices in
    lexicographic order, row index) makes the selection deterministic.
    """
    sym_dim = n * (n + 1) // 2
    echelon = []  # normalized reduced rows
    selected = []
    labels = []
    seen = set()
    for row, label in rows_with_labels:
        key = tuple(tuple(sorted(x.coeffs.items())) for x in row)
        if key in seen:
            continue
        seen.add(key)
        acc = list(row)
        for erow in echelon:
            piv = next(i for i, x in enumerate(erow) if not x.is_zero())
            if not acc[piv].is_zero():
                f = acc[piv]
                acc = [a - f * b for a, b in zip(acc, erow)]
        if all(x.is_zero() for x in acc):
            continue
        piv = next(i for i, x in enumerate(acc) if not x.is_zero())
        inv = acc[piv].inverse()
        echelon.append(tuple(x * inv for x in acc))
        selected.append(tuple(row))
        labels.append(label)
        if len(selected) == sym_dim:
            break
    return selected, labels


def _rational_operator_rows(gamma, m, n):
    """Rows of the operator as plain rationals, for the common case of a
    rational scale (m a perfect n-th power)."""
    from .arith import iroot

    root, exact = iroot(m, n)
    if not exact:
        raise DomainError("scale is not a perfect power")
    pairs = sym_index_pairs(n)
    g = gamma.rows
    rows = []
    for rix, (i, j) in enumerate(pairs):
        row = []
        for col, (k, l) in enumerate(pairs):
            if k == l:
                val = g[k][i] * g[k][j]
            else:
                val = g[k][i] * g[l][j] + g[l][i] * g[k][j]
            if col == rix:
                val -= root
            row.append(val)
        rows.append(tuple(row))
    return rows


def _select_generators_rational(rows_with_labels, n):
    """Greedy minimal independent row set over plain rationals."""
    sym_dim = n * (n + 1) // 2
    echelon = []
    selected = []
    labels = []
    seen = set()
    for row, label in rows_with_labels:
        if row in seen:
            continue
        seen.add(row)
        acc = list(Fraction(x) for x in row)
        for erow, piv in echelon:
            if acc[piv]:
                f = acc[piv]
                acc = [a - f * b for a, b in zip(acc, erow)]
        if not any(acc):
            continue
        piv = next(i for i, x in enumerate(acc) if x)
        inv = 1 / acc[piv]
        echelon.append(([x * inv for x in acc], piv))
        selected.append(tuple(row))
        labels.append(label)
        if len(selected) == sym_dim:
            break
    return selected, labels


def intersect_kernels(contributions, n, spec=None):
    """Kernel intersection of the operators attached to (gamma, m) pairs.

    contributions: iterable of (gamma, m, label); empty input returns the
    full symmetric space.  Operators are stacked row by row and a minimal
    generating set is kept; the kernel basis is integral and each basis
    vector is re-verified against every selected generator.
    """
    contributions = list(contributions)
    if not contributions:
        return full_sym_subspace(n)
    if spec is None:
        rad = []
        for gamma, m, label in contributions:
            if not scalar_root_is_rational(m, n):
                rad.append(m)
        spec = RadicalFieldSpec(n, rad)

    if spec.is_rational:
        def rational_stream():
            for gamma, m, label in contributions:
                for ridx, row in enumerate(_rational_operator_rows(gamma, m, n)):
                    yield row, (label, gamma, ridx)

        raw_selected, labels = _select_generators_rational(rational_stream(), n)
        selected = [
            tuple(spec.from_rational(x) for x in row) for row in raw_selected
        ]
    else:
        def row_stream():
            for gamma, m, label in contributions:
                op = transfer_operator(gamma, m, spec=spec)
                for ridx, row in enumerate(op.rows):
                    yield row, (label, gamma, ridx)

        selected, labels = select_generators(row_stream(), n, spec)
    if not selected:
        return full_sym_subspace(n)
    sym_dim = n * (n + 1) // 2
    if len(selected) == sym_dim:
        raise ZeroKernel("kernel intersection is the zero subspace")
    basis = kernel_basis_bounded([list(r) for r in selected], spec=spec)
    sub = SymSubspace(
        n=n,
        spec=spec,
        generator_rows=tuple(selected),
        provenance=tuple(labels),
        basis=tuple(basis),
    )
    for v in sub.basis:
        if not sub.annihilates(v):
            raise InternalConsistencyError("kernel basis vector not annihilated")
    if sub.dim + len(selected) != sym_dim:
        raise InternalConsistencyError("rank-nullity mismatch in kernel intersection")
    return sub


def replacement_field(subspace):
    """The field attached to the selected generators, per the pair scalars."""
    n = subspace.n
    rad = []
    for label in subspace.provenance:
        pair = label[0]
        m = pair_scalar_m(pair, n)
        if not scalar_root_is_rational(m, n):
            rad.append(m)
    return RadicalFieldSpec(n, rad)


def pair_scalar_m(pair, n):
    """(p, q, nu) -> m = q^(2 nu) p^(2 nu (n-1)), the operator scale."""
    p, q, nu = pair
    return q ** (2 * nu) * p ** (2 * nu * (n - 1))


# ---------------------------------------------------------------------------
# the replacement matrix


@dataclass
class ReplacementMatrix:
    entries: tuple  # Fractions when rational, FieldElements otherwise
    rational: bool
    den: int | None
    rounding_log2: int | None

    def as_rational_matrix(self):
        if not self.rational:
            raise DomainError("replacement matrix is not rational")
        return RationalSymMatrix(self.entries)

    def as_symbolic(self, spec):
        ents = [
            [
                e if isinstance(e, FieldElement) else spec.from_rational(e)
                for e in row
            ]
            for row in self.entries
        ]
        return SymbolicSymMatrix(ents, spec)


def find_q_prime(subspace, region, reference_q, den_bound_log2=40):
    """A matrix in (subspace cap region) with entries in the subspace field.

    Rational subspace: project the reference exactly, then round the basis
    coefficients through the denominator schedule 2^0, 2^1, ..., keeping the
    first rounding that stays in the subspace (by construction) and passes
    the exact region test (box + positive definiteness).  Irrational
    subspace: return the exact projection, verified certified-positively.
    """
    n = subspace.n
    spec = subspace.spec
    ref_vec = sym_to_vec(reference_q.entries, n)
    basis = [list(v) for v in subspace.basis]
    if spec.is_rational:
        bas = [[x.rational_value() for x in v] for v in basis]
        coeffs = _project_coefficients(bas, [Fraction(x) for x in ref_vec])
        for k in range(den_bound_log2 + 1):
            bound = 2 ** k
            rounded = [c.limit_denominator(bound) for c in coeffs]
            vec = [
                sum(rounded[i] * bas[i][j] for i in range(len(bas)))
                for j in range(len(ref_vec))
            ]
            entries = vec_to_sym(vec, n)
            if not region.box_contains_entries(entries):
                continue
            try:
                qp = RationalSymMatrix(entries)
            except DomainError:
                continue
            return ReplacementMatrix(
                entries=tuple(tuple(r) for r in qp.entries),
                rational=True,
                den=qp.den,
                rounding_log2=k,
            )
        raise NoPointFound(
            "no rational point of the subspace inside the region at denominators up to 2^%d"
            % den_bound_log2
        )
    # irrational field: exact projection
    ortho = gram_schmidt(basis, spec=spec)
    proj = [spec.zero()] * len(ref_vec)
    refv = [spec.from_rational(x) for x in ref_vec]
    for w in ortho:
        c = vec_dot(refv, w) / vec_dot(w, w)
        proj = [a + c * b for a, b in zip(proj, w)]
    entries = vec_to_sym(proj, n)
    if not _region_contains_symbolic(region, entries):
        raise NoPointFound("exact projection leaves the region")
    if not _symbolic_positive_definite(entries, n):
        raise NoPointFound("exact projection is not positive definite")
    return ReplacementMatrix(
        entries=tuple(tuple(r) for r in entries),
        rational=False,
        den=None,
        rounding_log2=None,
    )


def _project_coefficients(basis_vectors, target):
    """Exact least-squares coefficients of the projection onto span(basis)."""
    k = len(basis_vectors)
    gram = [
        [sum(a * b for a, b in zip(basis_vectors[i], basis_vectors[j])) for j in range(k)]
        for i in range(k)
    ]
    rhs = [sum(a * b for a, b in zip(basis_vectors[i], target)) for i in range(k)]
    from .radicals import _solve_rational

    sol = _solve_rational([row[:] for row in gram], rhs)
    if sol is None:
        raise InternalConsistencyError("gram matrix of a basis is singular")
    return sol


def _region_contains_symbolic(region, entries):
    n = region.n
    for i in range(n):
        for j in range(n):
            e = entries[i][j]
            lo, hi = region.lower[i][j], region.upper[i][j]
            if isinstance(e, FieldElement):
                if (e - lo).sign() < 0 or (e - hi).sign() > 0:
                    return False
            else:
                if not lo <= e <= hi:
                    return False
    return True


def _symbolic_positive_definite(entries, n):
    from .radicals import _find_spec

    spec = _find_spec(entries)
    for k in range(1, n + 1):
        minor = _field_det(
            [[_as_el(spec, entries[i][j]) for j in range(k)] for i in range(k)], spec
        )
        if minor.sign() <= 0:
            return False
    return True


def _as_el(spec, x):
    return x if isinstance(x, FieldElement) else spec.from_rational(x)


def _field_det(rows, spec):
    n = len(rows)
    m = [row[:] for row in rows]
    det = spec.one()
    sign = 1
    for k in range(n):
        piv = None
        for i in range(k, n):
            if not m[i][k].is_zero():
                piv = i
                break
        if piv is None:
            return spec.zero()
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        det = det * m[k][k]
        inv = m[k][k].inverse()
        for i in range(k + 1, n):
            if not m[i][k].is_zero():
                f = m[i][k] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return det if sign > 0 else -det


# ---------------------------------------------------------------------------
# the full exchange step


@dataclass
class ExchangeReport:
    subspace: SymSubspace
    pair_set: tuple  # all pairs fed in
    selected_pairs: tuple  # the minimal contributing pair set
    field_spec: RadicalFieldSpec
    q_prime: ReplacementMatrix
    solutions: dict  # pair -> SolutionSet
    verified: int
    violations: int

    def to_json(self):
        from .serialize import fraction_to_str

        return {
            "schema": 1,
            "dim_h": self.subspace.dim,
            "pairs": [list(p) for p in self.pair_set],
            "selected_pairs": [list(p) for p in self.selected_pairs],
            "field": {
                "degree": self.field_spec.degree,
                "radicands": [fraction_to_str(r) for r in self.field_spec.radicands],
                "rational": self.field_spec.is_rational,
            },
            "q_prime_rational": self.q_prime.rational,
            "q_prime": [
                [
                    fraction_to_str(e) if self.q_prime.rational else e.to_json()
                    for e in row
                ]
                for row in self.q_prime.entries
            ],
            "den_q_prime": self.q_prime.den,
            "solution_counts": {
                "%d,%d,%d" % p: s.count for p, s in sorted(self.solutions.items())
            },
            "verified_memberships": self.verified,
            "violations": self.violations,
        }


def default_pairs(low, high, n, nu_values=None):
    """All ordered prime pairs from [low, high] with the given nu range."""
    primes = primes_in_range(low, high)
    nus = list(nu_values) if nu_values else list(range(1, n + 1))
    return [(p, q, nu) for p in primes for q in primes for nu in nus]


def interval_bounds(l_param, d_param):
    """[L, 2 L^D] rounded to integers, exact for rational L and integer D."""
    l_fr = Fraction(l_param)
    if l_fr <= 2:
        raise DomainError("L must exceed 2")
    hi = 2 * l_fr ** int(d_param)
    return math.ceil(l_fr), math.floor(hi)


def exchange_step(
    q,
    l_param,
    d_param,
    big_m=None,
    pairs=None,
    region=None,
    nu_values=None,
    budget=10 ** 8,
    workers=1,
    den_bound_log2=40,
):
    """Run the exchange end to end for one interval of primes.

    Enumerates the solution sets for every pair, intersects the operator
    kernels, selects generators, produces the replacement matrix, and then
    verifies the containment by direct membership of every enumerated
    matrix in the exact-equation set of the replacement.  A containment
    violation is an internal-consistency failure, never a soft result.
    """
    n = q.n
    if region is None:
        region = Region.box_around(q, Fraction(1, 4))
    if not region.contains_inner(q):
        raise PreconditionFailed("reference matrix lies outside the inner region")
    if pairs is None:
        low, high = interval_bounds(l_param, d_param)
        pairs = default_pairs(low, high, n, nu_values)
    pairs = sorted(set(pairs))

    solutions = {}
    contributions = []
    for pair in pairs:
        p, qq, nu = pair
        inst = CountingInstance(q, a=qq ** nu, b=p ** nu, big_m=big_m)
        ss = enum_S(inst, budget=budget, workers=workers)
        solutions[pair] = ss
        m = pair_scalar_m(pair, n)
        for gamma in ss.matrices:
            contributions.append((gamma, m, pair))

    sub = intersect_kernels(contributions, n)
    selected_pairs = tuple(sorted({lab[0] for lab in sub.provenance}))
    kspec = replacement_field(sub)
    qp = find_q_prime(sub, region, q, den_bound_log2=den_bound_log2)

    verified = 0
    violations = 0
    for pair, ss in sorted(solutions.items()):
        p, qq, nu = pair
        if qp.rational:
            q_prime_mat = qp.as_rational_matrix()
        else:
            q_prime_mat = qp.as_symbolic(sub.spec)
        inst_prime = CountingInstance(q_prime_mat, a=qq ** nu, b=p ** nu, big_m=None)
        for gamma in ss.matrices:
            if verify_membership(inst_prime, gamma):
                verified += 1
            else:
                violations += 1
    if violations:
        raise InternalConsistencyError(
            "%d enumerated matrices escape the exchanged set" % violations
        )
    return ExchangeReport(
        subspace=sub,
        pair_set=tuple(pairs),
        selected_pairs=selected_pairs,
        field_spec=kspec,
        q_prime=qp,
        solutions=solutions,
        verified=verified,
        violations=violations,
    )
