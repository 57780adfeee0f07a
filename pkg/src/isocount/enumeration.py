"""Enumeration of lattice vectors of prescribed norm and of the matrix sets
cut out by the near-isometry equation plus determinantal-divisor conditions.

The vector enumerator is an exact Fincke-Pohst walk on the rational square
completion of Q: complete (no misses) and wholly rational.  The matrix
enumerator extends column by column, ordering columns by candidate count,
and prunes partial assignments with the pairwise bilinear condition, the
mod-b minor congruence, and the search box.  Every emitted matrix is
re-verified post hoc through an independent code path (gcd-of-minors
determinantal divisors and direct bilinear evaluation).

A numpy filtering fast path accelerates candidate reduction when all values
provably fit in int64; survivors are always re-checked exactly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import iroot
from .errors import DomainError, InternalConsistencyError, ResourceBudgetError
from .intervals import (
    fraction_lower_bound,
    fraction_upper_bound,
    iv_fraction,
    precision,
)
from .matrices import (
    IntegerMatrix,
    RationalSymMatrix,
    determinantal_divisor_oracle,
    determinantal_divisors,
)
from .radicals import FieldElement, RadicalFieldSpec

DEFAULT_BUDGET = 10 ** 8
DEFAULT_MAX_ENTRY = 10 ** 7


@dataclass(frozen=True)
class TargetScalar:
    """(a b^(n-1))^(2/n) held exactly: integer when s^2 is a perfect n-th
    power (s = a b^(n-1)), else a symbolic positive real with exact
    comparison against rationals."""

    s: int
    n: int
    rational: Fraction | None

    @classmethod
    def build(cls, s, n):
        root, exact = iroot(s * s, n)
        if exact:
            return cls(s=s, n=n, rational=Fraction(root))
        return cls(s=s, n=n, rational=None)

    @property
    def is_rational(self):
        return self.rational is not None

    def equals_fraction(self, fr):
        fr = Fraction(fr)
        if self.rational is not None:
            return fr == self.rational
        if fr <= 0:
            return False
        return fr ** self.n == self.s * self.s

    def cmp_fraction(self, fr):
        """sign(fr - t), exact."""
        fr = Fraction(fr)
        if self.rational is not None:
            d = fr - self.rational
            return (d > 0) - (d < 0)
        if fr <= 0:
            return -1
        d = fr ** self.n - self.s * self.s
        return (d > 0) - (d < 0)

    def interval(self):
        if self.rational is not None:
            return iv_fraction(self.rational)
        from mpmath import iv

        return iv.exp(iv.log(iv_fraction(self.s * self.s)) / self.n)

    def as_field_element(self, spec):
        if self.rational is not None:
            return spec.from_rational(self.rational)
        return spec.power_root(self.s, 2 * (spec.degree // self.n))


class SymbolicSymMatrix:
    """Symmetric matrix with radical-field entries; membership testing only."""

    __slots__ = ("n", "entries", "spec")

    def __init__(self, entries, spec):
        self.entries = tuple(tuple(e for e in row) for row in entries)
        self.n = len(self.entries)
        self.spec = spec

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def is_rational(self):
        return all(e.is_rational() for row in self.entries for e in row)

    def to_rational(self):
        return RationalSymMatrix(
            [[e.rational_value() for e in row] for row in self.entries]
        )


@dataclass(frozen=True)
class CountingInstance:
    """The tuple (Q, a, b, M) with an explicit error constant.

    M = None encodes the exact (no error term) regime.  The target scalar
    t = (a b^(n-1))^(2/n) is carried exactly, as is the error threshold
    error_constant * (a b^(n-1))^((2-M)/n) when M is finite.
    """

    q: object  # RationalSymMatrix or SymbolicSymMatrix
    a: int
    b: int
    big_m: Fraction | None = None
    error_constant: Fraction = Fraction(1)

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise DomainError("need a, b >= 1")
        if self.big_m is not None:
            object.__setattr__(self, "big_m", Fraction(self.big_m))
            if self.big_m <= 0:
                raise DomainError("M must be positive or None (= infinity)")
        object.__setattr__(self, "error_constant", Fraction(self.error_constant))
        if self.error_constant <= 0:
            raise DomainError("error_constant must be positive")

    @property
    def n(self):
        return self.q.n

    @property
    def s(self):
        return self.a * self.b ** (self.n - 1)

    @property
    def exact(self):
        return self.big_m is None

    @property
    def target(self):
        return TargetScalar.build(self.s, self.n)

    def describe(self):
        return {
            "a": self.a,
            "b": self.b,
            "m": "inf" if self.exact else str(self.big_m),
            "error_constant": str(self.error_constant),
            "n": self.n,
        }


@dataclass
class SolutionSet:
    instance: CountingInstance
    matrices: tuple
    stats: dict

    @property
    def count(self):
        return self.stats["count"]


# ---------------------------------------------------------------------------
# norm-vector enumeration (exact Fincke-Pohst)


def enum_norm_vectors(q, t, tol=0, max_entry=DEFAULT_MAX_ENTRY, budget=DEFAULT_BUDGET):
    """All y in Z^n with |y^T Q y - t| <= tol, sorted lexicographically.

    Complete by construction: the search walks the exact square completion
    of Q, so every coordinate range is certified, with the overall box also
    bounded through the rational lower bound on the smallest eigenvalue.
    """
    t = Fraction(t)
    tol = Fraction(tol)
    if tol < 0:
        raise DomainError("tolerance must be nonnegative")
    return _enum_window(q, t - tol, t + tol, max_entry, budget, None)


def _exact_range(c, d, room, approx_lo, approx_hi):
    """Integers y with d * (y + c)^2 <= room, starting from float guesses.

    The predicate is kept in product form so integral inputs stay on pure
    integer arithmetic.
    """
    y_lo, y_hi = approx_lo, approx_hi
    while d * (y_lo + c) * (y_lo + c) > room:
        y_lo += 1
        if y_lo > y_hi:
            return 1, 0
    while d * (y_lo - 1 + c) * (y_lo - 1 + c) <= room:
        y_lo -= 1
    while d * (y_hi + c) * (y_hi + c) > room:
        y_hi -= 1
    while d * (y_hi + 1 + c) * (y_hi + 1 + c) <= room:
        y_hi += 1
    return y_lo, y_hi


def _band_solutions(c, d, room_lo, room_hi):
    """Integers y with room_lo <= d * (y + c)^2 <= room_hi.

    Walks the two symmetric bands only, so an exact equation costs O(1)
    instead of a scan across the whole admissible segment.
    """
    if room_hi < 0:
        return []
    hi_r = math.sqrt(float(room_hi) / float(d)) if room_hi > 0 else 0.0
    cf = float(c)
    if room_lo <= 0:
        y_lo, y_hi = _exact_range(
            c, d, room_hi, math.floor(-cf - hi_r) - 1, math.ceil(-cf + hi_r) + 1
        )
        return list(range(y_lo, y_hi + 1))
    out = []
    lo_r = math.sqrt(float(room_lo) / float(d))
    # positive band: y + c in [lo_r, hi_r]
    for y in range(math.floor(-cf + lo_r) - 1, math.ceil(-cf + hi_r) + 2):
        v = d * (y + c) * (y + c)
        if room_lo <= v <= room_hi and (y + c) > 0:
            out.append(y)
    # negative band: y + c in [-hi_r, -lo_r]
    for y in range(math.floor(-cf - hi_r) - 1, math.ceil(-cf - lo_r) + 2):
        v = d * (y + c) * (y + c)
        if room_lo <= v <= room_hi and (y + c) < 0:
            out.append(y)
    return sorted(out)


def _enum_window(q, lo, hi, max_entry, budget, counter):
    if hi < 0:
        return []
    lam = q.lambda_min_lower_bound()
    box = math.isqrt(int(hi / lam)) + 1
    if box > max_entry:
        raise ResourceBudgetError(
            "search box %d exceeds the configured entry bound %d" % (box, max_entry)
        )
    n = q.n
    d, u = q.ldl()
    off_diag = any(u[i][j] for i in range(n) for j in range(i + 1, n))
    if (
        all(x.denominator == 1 for x in d)
        and not off_diag
        and Fraction(lo).denominator == 1
        and Fraction(hi).denominator == 1
    ):
        # diagonal integral form: run the walk on plain ints
        d = [int(x) for x in d]
        u = [[0] * n for _ in range(n)]
        lo, hi = int(lo), int(hi)
        zero = 0
    else:
        zero = Fraction(0)
    out = []
    nodes = [0]

    def descend(i, suffix, partial):
        # suffix holds y_{i+1..n-1}; partial = sum_{k>i} d_k (y_k + c_k)^2
        c = zero
        for j in range(i + 1, n):
            uij = u[i][j]
            if uij:
                c += uij * suffix[j - i - 1]
        room = hi - partial
        if room < 0:
            return
        if i == 0:
            # last coordinate: solve the band exactly instead of scanning
            for y in _band_solutions(c, d[0], lo - partial, room):
                nodes[0] += 1
                out.append((y,) + suffix)
            if nodes[0] > budget:
                raise ResourceBudgetError("norm-vector enumeration budget exhausted")
            return
        di = d[i]
        approx = math.sqrt(float(room) / float(di)) if room > 0 else 0.0
        cf = float(c)
        y_lo, y_hi = _exact_range(
            c, di, room, math.floor(-cf - approx) - 1, math.ceil(-cf + approx) + 1
        )
        for y in range(y_lo, y_hi + 1):
            nodes[0] += 1
            if nodes[0] > budget:
                raise ResourceBudgetError("norm-vector enumeration budget exhausted")
            step = c + y
            descend(i - 1, (y,) + suffix, partial + di * step * step)

    descend(n - 1, (), zero)
    if counter is not None:
        counter[0] += nodes[0]
    return sorted(out)


@dataclass
class FirstColumnBound:
    count: int
    envelope: float
    constant: Fraction
    m: int
    eps: Fraction

    def holds_exactly(self, n):
        """count <= C * m^(n-2+eps), decided in exact integer arithmetic."""
        v = self.eps.denominator
        lhs = Fraction(self.count) ** v
        rhs = self.constant ** v * Fraction(self.m) ** ((n - 2) * v + self.eps.numerator)
        return lhs <= rhs


def first_column_bound(q, m, eps, constant=Fraction(100)):
    """Actual count of y with y^T Q y = m^2 next to the envelope C m^(n-2+eps)."""
    if m < 1:
        raise DomainError("m must be >= 1")
    eps = Fraction(eps)
    count = len(enum_norm_vectors(q, Fraction(m * m), 0))
    envelope = float(constant) * float(m) ** (q.n - 2 + float(eps))
    return FirstColumnBound(count=count, envelope=envelope, constant=Fraction(constant), m=m, eps=eps)


# ---------------------------------------------------------------------------
# membership logic


class _Membership:
    """Exact condition checks for one instance, rational or radical."""

    def __init__(self, instance):
        self.inst = instance
        self.t = instance.target
        self.is_sym = isinstance(instance.q, SymbolicSymMatrix)
        self.spec = None
        self.t_el = None
        self.thr_el = None
        if self.is_sym or not instance.exact:
            self.spec = self._build_spec()
            self.t_el = self.t.as_field_element(self.spec)
            if not instance.exact:
                num = 2 - instance.big_m
                expo = Fraction(num, instance.n)
                power = expo * self.spec.degree
                assert power.denominator == 1
                self.thr_el = self.spec.power_root(self.inst.s, int(power)) * instance.error_constant

    def _build_spec(self):
        n = self.inst.n
        degree = n
        if not self.inst.exact:
            degree = lcm(degree, Fraction(2 - self.inst.big_m, n).denominator)
        if self.is_sym:
            degree = lcm(degree, self.inst.q.spec.degree)
            rads = self.inst.q.spec.radicands + (Fraction(max(self.inst.s, 1)),)
            return RadicalFieldSpec(degree, rads)
        return RadicalFieldSpec(degree, [Fraction(max(self.inst.s, 1))])

    # entry (i, j) of gamma^T Q gamma must be within threshold of t * Q_ij
    def entry_ok(self, value, i, j):
        inst = self.inst
        if not self.is_sym and inst.exact:
            qij = inst.q[i, j]
            if self.t.is_rational:
                return Fraction(value) == self.t.rational * qij
            if qij == 0:
                return Fraction(value) == 0
            return self.t.equals_fraction(Fraction(value) / qij)
        qij = self._q_el(i, j)
        diff = self._coerce(value) - self.t_el * qij
        if inst.exact:
            return diff.is_zero()
        return diff.abs_le(self.thr_el)

    def _q_el(self, i, j):
        if self.is_sym:
            el = self.inst.q[i, j]
            if el.spec != self.spec:
                return _lift(el, self.spec)
            return el
        return self.spec.from_rational(self.inst.q[i, j])

    def _coerce(self, value):
        if isinstance(value, FieldElement):
            return _lift(value, self.spec) if value.spec != self.spec else value
        return self.spec.from_rational(value)

    def column_window(self, j):
        """Outward rational window for y^T Q y of column j (candidate search)."""
        inst = self.inst
        if not self.is_sym and inst.exact and self.t.is_rational:
            c = self.t.rational * inst.q[j, j]
            return c, c
        with precision(128):
            if self.is_sym:
                center = (self.t_el * self._q_el(j, j)).real_interval()
            else:
                center = self.t.interval() * iv_fraction(inst.q[j, j])
            if inst.exact:
                lo, hi = center, center
            else:
                thr = self.thr_el.real_interval()
                lo, hi = center - thr, center + thr
            return fraction_lower_bound(lo), fraction_upper_bound(hi)


def _lift(el, spec):
    out = spec.zero()
    src = el.spec
    ratio = spec.degree // src.degree
    if spec.degree % src.degree:
        raise DomainError("incompatible field specs")
    for e, c in el.coeffs.items():
        term = spec.from_rational(c)
        for p, k in zip(src.primes, e):
            if k:
                term = term * spec.power_root(p, k * ratio)
        out = out + term
    return out


def lcm(a, b):
    return a * b // math.gcd(a, b)


def verify_membership(instance, gamma):
    """Full definition check through paths independent of the enumerator:
    gcd-of-minors determinantal divisors and direct bilinear evaluation."""
    n = instance.n
    if gamma.n != n:
        return False
    if determinantal_divisor_oracle(gamma.rows, 1) != 1:
        return False
    if determinantal_divisor_oracle(gamma.rows, 2) != instance.b:
        return False
    mem = _Membership(instance)
    cols = gamma.columns()
    for i in range(n):
        for j in range(i, n):
            val = _bilinear(instance.q, cols[i], cols[j])
            if not mem.entry_ok(val, i, j):
                return False
    return True


def _bilinear(q, x, y):
    n = q.n
    if isinstance(q, SymbolicSymMatrix):
        acc = None
        for i in range(n):
            if x[i]:
                for j in range(n):
                    if y[j]:
                        term = q[i, j] * (x[i] * y[j])
                        acc = term if acc is None else acc + term
        return acc if acc is not None else q.spec.zero()
    return q.bilinear_value(x, y)


# ---------------------------------------------------------------------------
# the matrix set enumerator


def enum_S(
    instance,
    budget=DEFAULT_BUDGET,
    prune=True,
    collect=True,
    workers=1,
    max_entry=DEFAULT_MAX_ENTRY,
    force_search=False,
):
    """Enumerate the full solution set; see count_S for the count-only door.

    With prune=False the candidate product is walked with leaf-only checks
    (used by the pruning-soundness property test); the output set is
    identical, only statistics differ.
    """
    stats = {
        "count": 0,
        "nodes": 0,
        "short_circuit": None,
        "prunes": {"pairwise": 0, "minor": 0, "delta": 0, "window": 0},
        "candidates_per_column": [],
    }
    t = instance.target
    n = instance.n

    if (
        not t.is_rational
        and instance.exact
        and not isinstance(instance.q, SymbolicSymMatrix)
        and not force_search
    ):
        # exact equation with irrational scale against a rational Q: the
        # diagonal entries alone force emptiness; certified symbolically
        stats["short_circuit"] = "irrational_target"
        return SolutionSet(instance=instance, matrices=(), stats=stats)

    if isinstance(instance.q, SymbolicSymMatrix):
        raise DomainError("enumeration needs a rational Q; symbolic Q supports membership only")

    mem = _Membership(instance)
    counter = [0]
    cand = []
    for j in range(n):
        lo, hi = mem.column_window(j)
        vecs = _enum_window(instance.q, lo, hi, max_entry, budget, counter)
        if not (instance.exact and t.is_rational):
            vecs = [y for y in vecs if mem.entry_ok(instance.q.quadratic_value(y), j, j)]
        cand.append(vecs)
    stats["nodes"] += counter[0]
    stats["candidates_per_column"] = [len(c) for c in cand]

    order = sorted(range(n), key=lambda j: (len(cand[j]), j))
    solutions = []

    if (
        workers > 1
        and prune
        and instance.exact
        and t.is_rational
        and len(cand[order[0]]) >= 4 * workers
    ):
        solutions = _parallel_enum(instance, order, cand, budget, prune, workers, stats)
    else:
        ctx = _SearchContext(instance, mem, stats, budget, prune)
        ctx.dfs(order, 0, {}, [cand[j] for j in order], solutions)

    solutions.sort(key=lambda m: m.flat())
    for g in solutions:
        if not verify_membership(instance, g):
            raise InternalConsistencyError(
                "emitted matrix fails independent re-verification: %r" % (g,)
            )
    stats["count"] = len(solutions)
    return SolutionSet(
        instance=instance,
        matrices=tuple(solutions) if collect else (),
        stats=stats,
    )


def count_S(instance, **kwargs):
    """|S(Q, a, b, M)| without materializing the matrices."""
    kwargs.setdefault("collect", False)
    return enum_S(instance, **kwargs).count


def _split_chunks(items, k):
    k = max(1, min(k, len(items)))
    size = (len(items) + k - 1) // k
    return [items[i : i + size] for i in range(0, len(items), size)]


def _chunk_worker(args):
    instance, order, chunk, other_cands, budget, prune = args
    stats = {
        "count": 0,
        "nodes": 0,
        "short_circuit": None,
        "prunes": {"pairwise": 0, "minor": 0, "delta": 0, "window": 0},
        "candidates_per_column": [],
    }
    mem = _Membership(instance)
    ctx = _SearchContext(instance, mem, stats, budget, prune)
    sols = []
    ctx.dfs(order, 0, {}, [chunk] + other_cands, sols)
    return [g.rows for g in sols], stats


def _parallel_enum(instance, order, cand, budget, prune, workers, stats):
    """Partition the first enumerated column across processes; the merge is
    re-sorted by the caller, so the outcome is independent of worker count.
    Each worker receives the full node budget."""
    from concurrent.futures import ProcessPoolExecutor

    chunks = _split_chunks(cand[order[0]], workers)
    other = [cand[j] for j in order[1:]]
    jobs = [(instance, order, chunk, other, budget, prune) for chunk in chunks]
    solutions = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for rows_list, wstats in ex.map(_chunk_worker, jobs):
            solutions.extend(IntegerMatrix(rows) for rows in rows_list)
            stats["nodes"] += wstats["nodes"]
            for k in stats["prunes"]:
                stats["prunes"][k] += wstats["prunes"][k]
    return solutions


class _SearchContext:
    def __init__(self, instance, mem, stats, budget, prune):
        self.inst = instance
        self.mem = mem
        self.stats = stats
        self.budget = budget
        self.prune = prune
        self.rational_fast = instance.exact and instance.target.is_rational
        q = instance.q
        self.qt = q.tilde
        self.qden = q.den
        if self.rational_fast:
            # x^T Qt y == t * den * Q_ij  <=>  x^T Q y == t Q_ij
            tval = instance.target.rational
            self.dot_targets = [
                [int(tval * self.qden * q[i, j]) for j in range(q.n)] for i in range(q.n)
            ]
        self.np_qt = np.array(self.qt.rows, dtype=np.int64)
        self.minor_pairs = [(i, k) for i in range(q.n) for k in range(i + 1, q.n)]

    def dfs(self, order, depth, placed, cands, out):
        n = self.inst.n
        if depth == n:
            self._leaf(placed, out)
            return
        j = order[depth]
        mylist = cands[depth]
        for y in mylist:
            self.stats["nodes"] += 1
            if self.stats["nodes"] > self.budget:
                raise ResourceBudgetError("matrix enumeration budget exhausted")
            if not self.prune:
                new_placed = dict(placed)
                new_placed[j] = y
                self.dfs(order, depth + 1, new_placed, cands, out)
                continue
            ok = True
            for i, x in placed.items():
                if not self._pair_ok(i, x, j, y):
                    ok = False
                    break
            if not ok:
                continue
            new_placed = dict(placed)
            new_placed[j] = y
            new_cands = list(cands)
            for d2 in range(depth + 1, n):
                col = order[d2]
                filtered = self._filter(col, j, y, new_cands[d2])
                new_cands[d2] = filtered
                if not filtered:
                    break
            else:
                self.dfs(order, depth + 1, new_placed, new_cands, out)
                continue
            self.stats["prunes"]["window"] += 1

    def _pair_ok(self, i, x, j, y):
        if self.rational_fast:
            dot = _int_bilinear(self.qt.rows, x, y)
            if dot != self.dot_targets[i][j]:
                self.stats["prunes"]["pairwise"] += 1
                return False
        else:
            val = self.inst.q.bilinear_value(x, y)
            if not self.mem.entry_ok(val, min(i, j), max(i, j)):
                self.stats["prunes"]["pairwise"] += 1
                return False
        b = self.inst.b
        if b > 1:
            for r, s in self.minor_pairs:
                if (x[r] * y[s] - x[s] * y[r]) % b:
                    self.stats["prunes"]["minor"] += 1
                    return False
        return True

    def _filter(self, col, j, y, candidates):
        """Keep candidates for `col` compatible with the newly placed y at j."""
        if not candidates:
            return candidates
        if self.rational_fast and _int64_safe(candidates, y, self.np_qt):
            arr = np.asarray(candidates, dtype=np.int64)
            qy = self.np_qt @ np.asarray(y, dtype=np.int64)
            keep = (arr @ qy) == self.dot_targets[min(col, j)][max(col, j)]
            n_pair = int(len(candidates) - keep.sum())
            b = self.inst.b
            if b > 1:
                for r, s in self.minor_pairs:
                    keep &= (y[r] * arr[:, s] - y[s] * arr[:, r]) % b == 0
            kept = [candidates[i] for i in np.nonzero(keep)[0]]
            self.stats["prunes"]["pairwise"] += n_pair
            self.stats["prunes"]["minor"] += len(candidates) - n_pair - len(kept)
            return kept
        return [c for c in candidates if self._pair_ok(j, y, col, c)]

    def _leaf(self, placed, out):
        inst = self.inst
        n = inst.n
        cols = [placed[j] for j in range(n)]
        gamma = IntegerMatrix.from_columns(cols)
        if not self.prune:
            for i in range(n):
                for j in range(i, n):
                    val = inst.q.bilinear_value(cols[i], cols[j])
                    if not self.mem.entry_ok(val, i, j):
                        self.stats["prunes"]["pairwise"] += 1
                        return
        if gamma.entry_gcd() != 1:
            self.stats["prunes"]["delta"] += 1
            return
        deltas = determinantal_divisors(gamma)
        if deltas[0] != 1 or deltas[1] != inst.b:
            self.stats["prunes"]["delta"] += 1
            return
        if not inst.exact:
            for i in range(n):
                for j in range(i, n):
                    val = inst.q.bilinear_value(cols[i], cols[j])
                    if not self.mem.entry_ok(val, i, j):
                        self.stats["prunes"]["window"] += 1
                        return
        out.append(gamma)


def _int_bilinear(qt_rows, x, y):
    n = len(x)
    acc = 0
    for i in range(n):
        xi = x[i]
        if xi:
            row = qt_rows[i]
            acc += xi * sum(row[j] * y[j] for j in range(n))
    return acc


def _int64_safe(candidates, y, np_qt):
    bx = max(max(abs(v) for v in c) for c in candidates) if candidates else 0
    bx = max(bx, max(abs(v) for v in y))
    qmax = int(np.abs(np_qt).max())
    n = np_qt.shape[0]
    return n * qmax * bx * bx < 2 ** 60
