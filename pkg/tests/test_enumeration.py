from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocount.enumeration import (
    CountingInstance,
    TargetScalar,
    count_S,
    enum_S,
    enum_norm_vectors,
    first_column_bound,
    verify_membership,
)
from isocount.errors import DomainError, ResourceBudgetError
from isocount.matrices import IntegerMatrix, RationalSymMatrix

from oracles import box_norm_vectors, enum_S_oracle, solution_set_flat

I2 = RationalSymMatrix.identity(2)
I3 = RationalSymMatrix.identity(3)
Q21 = RationalSymMatrix([[2, 1], [1, 3]])


def test_target_scalar():
    t = TargetScalar.build(5 * 25, 3)  # (5 * 5^2)^(2/3) = 25
    assert t.rational == 25
    t = TargetScalar.build(3 * 25, 3)
    assert t.rational is None
    assert not t.equals_fraction(Fraction(18))
    assert t.cmp_fraction(17) == -1 and t.cmp_fraction(18) == 1  # 75^(2/3) ~ 17.78


def test_norm_vectors_examples():
    assert len(enum_norm_vectors(I2, 25, 0)) == 12
    assert enum_norm_vectors(I2, 1, 0) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert enum_norm_vectors(I2, 3, 0) == []
    assert len(enum_norm_vectors(I3, 25, 0)) == 30


def test_norm_vectors_box_oracle_small():
    for t in range(0, 60):
        got = enum_norm_vectors(Q21, t, 0)
        assert got == box_norm_vectors(Q21, t, t, 15), t


def test_norm_vectors_window():
    got = enum_norm_vectors(Q21, 50, 3)
    assert got == box_norm_vectors(Q21, 47, 53, 15)
    got = enum_norm_vectors(Q21, Fraction(49, 2), Fraction(1, 2))
    assert got == box_norm_vectors(Q21, 24, 25, 15)


@given(st.integers(0, 200))
@settings(max_examples=40, deadline=None)
def test_norm_vectors_sum_of_two_squares_hypothesis(t):
    got = enum_norm_vectors(I2, t, 0)
    count = 0
    import math

    b = math.isqrt(t)
    for x in range(-b, b + 1):
        for y in range(-b, b + 1):
            if x * x + y * y == t:
                count += 1
    assert len(got) == count
    assert got == sorted(got)
    for y in got:
        assert y[0] ** 2 + y[1] ** 2 == t


def test_norm_vectors_resource_error():
    with pytest.raises(ResourceBudgetError):
        enum_norm_vectors(I2, 10 ** 16, 0, max_entry=10 ** 6)


def test_first_column_bound():
    fb = first_column_bound(I3, 5, Fraction(1, 2))
    assert fb.count == 30
    assert fb.holds_exactly(3)
    fb = first_column_bound(I2, 1, Fraction(1, 2))
    assert fb.count == 4


def test_enum_S_signed_permutations():
    ss = enum_S(CountingInstance(I2, 1, 1))
    assert ss.count == 8
    flats = solution_set_flat(ss)
    assert (0, 1, 1, 0) in flats and (1, 0, 0, 1) in flats
    # all signed permutation matrices
    for g in ss.matrices:
        assert abs(g.det()) == 1


def test_enum_S_distinct_primes_n2_empty():
    # n = 2 forces Delta_2 = |det| = q p != p
    assert count_S(CountingInstance(I2, 3, 5)) == 0
    assert count_S(CountingInstance(I2, 7, 5)) == 0


def test_enum_S_irrational_short_circuit():
    inst = CountingInstance(I3, 3, 5)
    ss = enum_S(inst)
    assert ss.count == 0 and ss.stats["short_circuit"] == "irrational_target"
    forced = enum_S(inst, force_search=True)
    assert forced.count == 0 and forced.stats["short_circuit"] is None
    assert forced.stats["nodes"] > 0


def test_enum_S_oracle_equivalence_I3():
    inst = CountingInstance(I3, 5, 5)
    ss = enum_S(inst)
    assert solution_set_flat(ss) == enum_S_oracle(I3, 5, 5)
    assert ss.count == 288


def test_enum_S_oracle_equivalence_skew():
    q = RationalSymMatrix([[1, Fraction(1, 2), 0], [Fraction(1, 2), 1, 0], [0, 0, 1]])
    for p in (3, 5):
        ss = enum_S(CountingInstance(q, p, p))
        assert solution_set_flat(ss) == enum_S_oracle(q, p, p), p


def test_enum_S_oracle_equivalence_n2_window():
    # small skew form, several instances
    for (a, b) in ((1, 1), (2, 1), (4, 1), (9, 1)):
        ss = enum_S(CountingInstance(Q21, a, b))
        assert solution_set_flat(ss) == enum_S_oracle(Q21, a, b), (a, b)


def test_enum_S_pruning_soundness():
    for inst in (CountingInstance(I3, 3, 3), CountingInstance(I2, 1, 1)):
        with_prune = enum_S(inst, prune=True)
        without = enum_S(inst, prune=False)
        assert with_prune.matrices == without.matrices
        assert with_prune.count == without.count


def test_enum_S_determinism_and_sorting():
    a = enum_S(CountingInstance(I3, 3, 3))
    b = enum_S(CountingInstance(I3, 3, 3))
    assert [g.rows for g in a.matrices] == [g.rows for g in b.matrices]
    flats = [g.flat() for g in a.matrices]
    assert flats == sorted(flats)


def test_enum_S_parallel_equivalence():
    seq = enum_S(CountingInstance(I3, 5, 5), workers=1)
    par = enum_S(CountingInstance(I3, 5, 5), workers=3)
    assert seq.matrices == par.matrices


def test_enum_S_budget_error():
    with pytest.raises(ResourceBudgetError):
        enum_S(CountingInstance(I3, 27, 27), budget=50)


def test_enum_S_finite_error_window():
    # with a generous error window the exact solutions remain included
    exact = enum_S(CountingInstance(I3, 3, 3))
    fuzzy = enum_S(CountingInstance(I3, 3, 3, big_m=Fraction(2)))
    assert set(g.rows for g in exact.matrices) <= set(g.rows for g in fuzzy.matrices)
    # huge M behaves like the exact instance
    tight = enum_S(CountingInstance(I3, 3, 3, big_m=Fraction(1000)))
    assert tight.matrices == exact.matrices


def test_verify_membership_posthoc():
    inst = CountingInstance(I3, 5, 5)
    ss = enum_S(inst)
    for g in ss.matrices[:20]:
        assert verify_membership(inst, g)
    bad = IntegerMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert not verify_membership(inst, bad)


def test_criterion6_witness_matrix():
    # columns (3,4,0), (-4,3,0), (0,0,5) survive all filters at p = 5
    inst = CountingInstance(I3, 5, 5)
    witness = IntegerMatrix.from_columns([(3, 4, 0), (-4, 3, 0), (0, 0, 5)])
    assert verify_membership(inst, witness)
    ss = enum_S(inst)
    assert witness in ss.matrices


def test_instance_validation():
    with pytest.raises(DomainError):
        CountingInstance(I2, 0, 1)
    with pytest.raises(DomainError):
        CountingInstance(I2, 1, 1, big_m=Fraction(-1))
    with pytest.raises(DomainError):
        CountingInstance(I2, 1, 1, error_constant=0)


def test_stats_shape():
    ss = enum_S(CountingInstance(I3, 3, 3))
    assert set(ss.stats) >= {"count", "nodes", "prunes", "candidates_per_column"}
    assert ss.stats["candidates_per_column"] == [30, 30, 30]
