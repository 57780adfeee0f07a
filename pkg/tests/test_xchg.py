import random
from fractions import Fraction

import pytest

from isocount.enumeration import CountingInstance, count_S
from isocount.errors import (
    DomainError,
    NoPointFound,
    PreconditionFailed,
    ZeroKernel,
)
from isocount.matrices import IntegerMatrix, RationalSymMatrix, Region
from isocount.xchg import (
    default_pairs,
    exchange_step,
    find_q_prime,
    full_sym_subspace,
    intersect_kernels,
    interval_bounds,
    pair_scalar_m,
    sym_to_vec,
    transfer_operator,
    vec_to_sym,
)

I2 = RationalSymMatrix.identity(2)
I3 = RationalSymMatrix.identity(3)


def test_sym_coordinates_roundtrip():
    n = 3
    entries = [[Fraction(i * 3 + j + (j * 3 + i)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            entries[j][i] = entries[i][j]
    v = sym_to_vec(entries, n)
    assert len(v) == 6
    back = vec_to_sym(v, n)
    assert back == entries


def test_zero_operator_identity():
    op = transfer_operator(IntegerMatrix.identity(2), 1)
    assert all(x.is_zero() for row in op.rows for x in row)


def test_zero_operator_scalar_case():
    # gamma = p I with m = p^(2n): conjugation scales by p^2 = m^(1/n)
    op = transfer_operator(IntegerMatrix.diagonal([3, 3]), 3 ** 4)
    assert all(x.is_zero() for row in op.rows for x in row)


def test_diag_kernel_example():
    sub = intersect_kernels([(IntegerMatrix.diagonal([1, 2]), 16, ("pair",))], 2)
    assert sub.dim == 1
    mat = sub.basis_matrices()[0]
    vals = [[x.rational_value() for x in row] for row in mat]
    assert vals[0][0] == 0 and vals[0][1] == 0 and vals[1][1] != 0


def test_operator_apply_consistency():
    rng = random.Random(5)
    for m in (2, 3, 8):
        g = IntegerMatrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
        op = transfer_operator(g, m)
        s = [[Fraction(rng.randint(-4, 4)) for _ in range(2)] for _ in range(2)]
        s[1][0] = s[0][1]
        via_matrix = op.apply(s)
        direct = op.apply_direct(s)
        for i in range(2):
            for j in range(2):
                assert (via_matrix[i][j] - direct[i][j]).is_zero()


def test_empty_intersection_is_full_space():
    sub = intersect_kernels([], 3)
    assert sub.dim == 6
    assert not sub.generator_rows


def test_kernel_monotone_under_more_pairs():
    ops = [
        (IntegerMatrix.diagonal([1, 2]), 16, ("a",)),
        (IntegerMatrix.diagonal([1, 3]), 81, ("b",)),  # same kernel ray
    ]
    d1 = intersect_kernels(ops[:1], 2).dim
    d12 = intersect_kernels(ops, 2).dim
    assert d12 <= d1
    full = full_sym_subspace(2).dim
    assert d1 <= full


def test_kernel_zero_detected():
    # two incompatible scalings annihilate everything
    ops = [
        (IntegerMatrix.identity(2), 1, ("a",)),  # zero operator, no constraint
        (IntegerMatrix.diagonal([2, 2]), 1, ("b",)),  # Q -> 4Q - Q: only zero
    ]
    with pytest.raises(ZeroKernel):
        intersect_kernels(ops, 2)


def test_irrational_scalar_kernel():
    # gamma = diag(1,2), m = 2: rows live in Q(sqrt 2); kernel is trivial to
    # state: gamma^T Q gamma = sqrt(2) Q has no nonzero symmetric solution
    with pytest.raises(ZeroKernel):
        intersect_kernels([(IntegerMatrix.diagonal([1, 2]), 2, ("irr",))], 2)


def test_selected_pair_bookkeeping():
    rep = exchange_step(I3, 3, 1)
    assert rep.subspace.dim == 1
    assert rep.selected_pairs == ((3, 3, 1),)
    assert rep.field_spec.is_rational
    assert len(rep.subspace.generator_rows) == 5
    assert rep.verified > 0 and rep.violations == 0


def test_pair_scalar():
    assert pair_scalar_m((3, 5, 1), 3) == 25 * 3 ** 4
    assert pair_scalar_m((3, 3, 2), 2) == 3 ** 4 * 3 ** 4


def test_interval_bounds():
    assert interval_bounds(3, 1) == (3, 6)
    assert interval_bounds(3, 2) == (3, 18)
    with pytest.raises(DomainError):
        interval_bounds(2, 1)


def test_find_q_prime_full_space_prefers_reference():
    q = RationalSymMatrix([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
    reg = Region.box_around(q, Fraction(1, 8))
    qp = find_q_prime(full_sym_subspace(2), reg, q)
    assert qp.rational and qp.entries == q.entries
    assert qp.den == 2


def test_find_q_prime_scalar_ray():
    # the rotation fixes exactly the multiples of I among symmetric matrices
    sub = intersect_kernels([(IntegerMatrix([[0, -1], [1, 0]]), 1, ("rot",))], 2)
    assert sub.dim == 1
    q = RationalSymMatrix([[Fraction(33, 32), 0], [0, Fraction(33, 32)]])
    reg = Region.box_around(q, Fraction(1, 4))
    qp = find_q_prime(sub, reg, q)
    m = qp.entries
    assert m[0][1] == 0 and m[0][0] == m[1][1]
    assert qp.den is not None and qp.den <= 32


def test_find_q_prime_rank_deficient_ray_fails():
    sub = intersect_kernels([(IntegerMatrix.diagonal([1, 2]), 16, ("p",))], 2)
    # kernel = span(E22), never positive definite
    q = RationalSymMatrix.identity(2)
    reg = Region.box_around(q, Fraction(1, 4))
    with pytest.raises(NoPointFound):
        find_q_prime(sub, reg, q)


def test_exchange_requires_inner_region():
    q = RationalSymMatrix.identity(2)
    reg = Region.box_around(RationalSymMatrix([[5, 0], [0, 5]]), Fraction(1, 4))
    with pytest.raises(PreconditionFailed):
        exchange_step(q, 3, 1, region=reg)


def test_exchange_n2_all_empty():
    rep = exchange_step(I2, 3, 1)
    assert rep.subspace.dim == 3
    assert all(s.count == 0 for s in rep.solutions.values())
    assert rep.q_prime.rational
    assert rep.field_spec.is_rational


def test_exchange_containment_verified_n3():
    rep = exchange_step(I3, 3, 1)
    counts = {p: s.count for p, s in rep.solutions.items()}
    assert counts[(3, 3, 1)] == 192 and counts[(5, 5, 3)] == 7200
    assert counts[(3, 5, 1)] == 0  # irrational target
    assert rep.verified == sum(counts.values())
    # every enumerated matrix is exactly isometric for the replacement
    qp = rep.q_prime.as_rational_matrix()
    inst = CountingInstance(qp, 125, 125, big_m=None)
    assert count_S(inst) >= counts[(5, 5, 3)]


def test_exchange_report_json_deterministic():
    a = exchange_step(I2, 3, 1).to_json()
    b = exchange_step(I2, 3, 1).to_json()
    assert a == b


def test_default_pairs():
    pairs = default_pairs(3, 6, 2)
    assert (3, 5, 1) in pairs and (5, 3, 2) in pairs
    assert all(nu in (1, 2) for (_, _, nu) in pairs)
    only1 = default_pairs(3, 6, 3, nu_values=[1])
    assert all(nu == 1 for (_, _, nu) in only1)


def test_find_q_prime_irrational_field_branch():
    # a genuinely irrational subspace: kernel of the single coordinate row
    # (th, -1, 0) inside 2x2 symmetric space, th = 2^(1/3)
    from isocount.radicals import RadicalFieldSpec, kernel_basis_bounded
    from isocount.xchg import SymSubspace

    spec = RadicalFieldSpec(3, [2])
    th = spec.root_of(2)
    row = (th, spec.from_rational(-1), spec.zero())
    basis = kernel_basis_bounded([row], spec=spec)
    sub = SymSubspace(
        n=2, spec=spec, generator_rows=(row,), provenance=((("x", "x", 1), None, 0),),
        basis=tuple(basis),
    )
    q = RationalSymMatrix.identity(2)
    with pytest.raises(NoPointFound):
        find_q_prime(sub, Region.box_around(q, Fraction(1, 4)), q)
    qp = find_q_prime(sub, Region.box_around(q, Fraction(1)), q)
    assert not qp.rational and qp.den is None
    # the point satisfies the defining relation th * Q11 = Q12 exactly
    e = qp.entries
    assert (th * e[0][0] - e[0][1]).is_zero()
    assert e[0][1] == e[1][0]
    # report serialization carries coefficient vectors for the entries
    assert "coefficients" in e[0][0].to_json()


def test_operator_annihilates_exchange_basis():
    # B(Q') = 0 exactly for every contributing (gamma, m), not only for the
    # selected generator rows
    from isocount.xchg import pair_scalar_m, sym_to_vec

    rep = exchange_step(I3, 3, 1, nu_values=[1])
    basis_mats = rep.subspace.basis_matrices()
    checked = 0
    for pair, ss in sorted(rep.solutions.items()):
        m = pair_scalar_m(pair, 3)
        for gamma in ss.matrices[:10]:
            op = transfer_operator(gamma, m)
            for bm in basis_mats:
                vals = [[x.rational_value() for x in row] for row in bm]
                image = op.apply_direct(vals)
                assert all(x.is_zero() for row in image for x in row)
                checked += 1
    assert checked > 0


def test_generator_count_bounds():
    rep = exchange_step(I3, 3, 1)
    sym_dim = 3 * 4 // 2
    assert len(rep.subspace.generator_rows) <= sym_dim
    assert len(rep.selected_pairs) <= sym_dim
    assert rep.subspace.dim + len(rep.subspace.generator_rows) == sym_dim


def test_membership_against_lifted_rational_symbolic_q():
    # a symbolic matrix with rational entries must agree with the rational path
    from isocount.enumeration import CountingInstance, SymbolicSymMatrix, verify_membership
    from isocount.radicals import RadicalFieldSpec

    spec = RadicalFieldSpec(3, [2])
    sym = SymbolicSymMatrix(
        [[spec.from_rational(1), spec.zero(), spec.zero()],
         [spec.zero(), spec.from_rational(1), spec.zero()],
         [spec.zero(), spec.zero(), spec.from_rational(1)]],
        spec,
    )
    rat_inst = CountingInstance(I3, 5, 5)
    sym_inst = CountingInstance(sym, 5, 5)
    from isocount.enumeration import enum_S

    sols = enum_S(rat_inst).matrices
    for g in sols[:8]:
        assert verify_membership(sym_inst, g)
    bad = IntegerMatrix.identity(3)
    assert not verify_membership(sym_inst, bad)
