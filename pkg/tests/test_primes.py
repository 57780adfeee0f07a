import math
import random
from fractions import Fraction

import pytest

from isocount.errors import DomainError
from isocount.matrices import RationalSymMatrix, is_q_good
from isocount.primes import (
    good_prime_set,
    linnik_report,
    prime_powers_in_window,
    residue_system,
    sample_cross_check,
    vonmangoldt_ap_sum,
)
from isocount.arith import primes_in_range


def seeded_matrices(count, max_den=12, seed=20):
    rng = random.Random(seed)
    mats = [
        RationalSymMatrix.identity(2),
        RationalSymMatrix.identity(3),
        RationalSymMatrix([[2, 1], [1, 3]]),
        RationalSymMatrix([[1, Fraction(1, 2), 0], [Fraction(1, 2), 1, 0], [0, 0, 1]]),
    ]
    while len(mats) < count:
        n = rng.choice([2, 3])
        den = rng.choice([2, 3, 4, 6, 12])
        if den > max_den:
            continue
        diag = [Fraction(rng.randint(den, 3 * den), den) for _ in range(n)]
        e = [[diag[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        e[0][1] = e[1][0] = Fraction(rng.randint(-den // 2, den // 2), den)
        try:
            mats.append(RationalSymMatrix(e))
        except DomainError:
            continue
    return mats


def test_identity_system():
    rs = residue_system(RationalSymMatrix.identity(2))
    assert rs.modulus == 4
    assert rs.allowed == frozenset({3})
    primes = good_prime_set(rs, 2, 100)
    assert primes == [p for p in primes_in_range(3, 100) if p % 4 == 3]


def test_window_examples():
    rs = residue_system(RationalSymMatrix.identity(2))
    assert good_prime_set(rs, 10, 20) == [11, 19]
    assert good_prime_set(rs, 10, 20, coprime_to=11 * 19) == []


def test_system_cross_check_20_seeded():
    for q in seeded_matrices(20):
        rs = residue_system(q)
        assert sample_cross_check(rs, q, 10 ** 4) == []


def test_system_matches_direct_legendre():
    q = RationalSymMatrix([[2, 1], [1, 3]])  # minor set {5}
    rs = residue_system(q)
    for p in primes_in_range(5, 10 ** 4):
        if rs.modulus % p == 0:
            continue
        direct = is_q_good(p, q)
        assert rs.admits(p) == direct, p


def test_square_minor_reduces_to_minus_one():
    # minor set containing a perfect square: the condition collapses to
    # (-1 | p) = -1 away from the square's support
    q = RationalSymMatrix([[2, 0], [0, 2]])  # tilde = 2I, minor {4}
    rs = residue_system(q)
    for p in primes_in_range(3, 2000):
        assert rs.admits(p) == (p % 4 == 3), p


def test_vonmangoldt_examples():
    v = vonmangoldt_ap_sum(10, 2, 1)
    assert abs(v - math.log(11 * 13 * 17 * 19)) < 1e-9
    assert vonmangoldt_ap_sum(100, 4, 3) >= 100 / 4 ** 1.5
    with pytest.raises(DomainError):
        vonmangoldt_ap_sum(10, 2, 2)
    with pytest.raises(DomainError):
        vonmangoldt_ap_sum(1, 2, 1)


def test_prime_powers_window():
    assert prime_powers_in_window(10, 20) == [
        (11, 11),
        (13, 13),
        (16, 2),
        (17, 17),
        (19, 19),
    ]
    assert (27, 3) in prime_powers_in_window(25, 30)


def test_vonmangoldt_determinism():
    a = vonmangoldt_ap_sum(5000, 7, 3)
    b = vonmangoldt_ap_sum(5000, 7, 3)
    assert a == b


def test_linnik_report_small():
    rows = linnik_report(max_modulus=10)
    assert rows and all(r["passes"] for r in rows)
    # classes with gcd > 1 are skipped
    assert all(math.gcd(r["a"], r["m"]) == 1 for r in rows)
