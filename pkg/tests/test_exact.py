from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cftk.exact import (
    ExactScalar, GradedBasis, GradedVector, NotPositiveSemidefinite, QSeries, bareiss_rank,
    enumerate_partitions, fmt_fraction, graded_inner, ldl, nullspace, parse_fraction,
    partition_count, qseries_of_graded_dims,
)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(ExactScalar, fracs, fracs)


def test_parse_and_format_roundtrip():
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction("-2") == -2
    assert fmt_fraction(Fraction(6, 4)) == "3/2"
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_fraction("1/0")


@given(scalars, scalars, scalars)
def test_scalar_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if a:
        assert a * a.inverse() == ExactScalar(1)


@given(scalars)
def test_scalar_conjugation_and_json(a):
    assert (a * a.conjugate()).im == 0
    assert ExactScalar.from_json(a.to_json()) == a


def test_roots_of_unity():
    assert ExactScalar.root_of_unity8(2) == ExactScalar(0, 1)
    assert ExactScalar.root_of_unity8(4) == ExactScalar(-1)
    assert ExactScalar.root_of_unity8(2) ** 4 == ExactScalar(1)


def test_partition_examples():
    assert enumerate_partitions(0) == [()]
    assert enumerate_partitions(0, "half_odd", strict=True) == [()]
    assert len(enumerate_partitions(4)) == 5
    assert enumerate_partitions(2, "half_odd", strict=True) == [(Fraction(3, 2), Fraction(1, 2))]
    assert enumerate_partitions(1, "half_odd", strict=True) == []


def _pentagonal(n):
    p = [1] + [0] * n
    for m in range(1, n + 1):
        k, s = 1, 0
        while True:
            g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            s += sign * p[m - g1]
            if g2 <= m:
                s += sign * p[m - g2]
            k += 1
        p[m] = s
    return p


def test_partitions_follow_pentagonal_recurrence():
    oracle = _pentagonal(30)
    assert oracle[30] == 5604
    for n in range(31):
        assert partition_count(n) == oracle[n]
    for n in range(16):
        assert len(enumerate_partitions(n)) == oracle[n]


def _fermion_like_basis():
    return GradedBasis("toy", lambda w: [f"e{k}" for k in range(int(w) + 1)])


def test_graded_inner_examples():
    B = _fermion_like_basis()
    vac = GradedVector.from_terms(B, {(Fraction(0), "e0"): 1})
    gram = {Fraction(0): [[1]], Fraction(1): [[2, 0], [0, 1]], Fraction(2): [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
    assert graded_inner(vac, vac, gram) == ExactScalar(1)
    u = GradedVector.from_terms(B, {(Fraction(1), "e0"): 1})
    v = GradedVector.from_terms(B, {(Fraction(2), "e1"): 1})
    assert graded_inner(u, v, gram) == ExactScalar(0)


hermitian2 = st.tuples(fracs.filter(lambda x: x > 0), fracs, fracs, fracs.filter(lambda x: x > 0))


@given(hermitian2, st.lists(scalars, min_size=2, max_size=2), st.lists(scalars, min_size=2, max_size=2))
def test_graded_inner_hermitian_symmetry(h, x, y):
    a, br, bi, d = h
    b = ExactScalar(br, bi)
    gram = {Fraction(1): [[ExactScalar(a), b], [b.conjugate(), ExactScalar(d)]]}
    B = _fermion_like_basis()
    u = GradedVector.from_terms(B, {(Fraction(1), f"e{k}"): x[k] for k in range(2)})
    v = GradedVector.from_terms(B, {(Fraction(1), f"e{k}"): y[k] for k in range(2)})
    assert graded_inner(u, v, gram) == graded_inner(v, u, gram).conjugate()


@given(st.dictionaries(st.integers(0, 3), st.lists(fracs, min_size=4, max_size=4), max_size=3))
def test_graded_vector_json_roundtrip(data):
    B = _fermion_like_basis()
    terms = {(Fraction(w), f"e{k}"): c for w, cs in data.items() for k, c in enumerate(cs[: w + 1])}
    v = GradedVector.from_terms(B, terms)
    assert GradedVector.from_json(B, v.to_json()) == v
    assert GradedVector.from_json(B, v.dumps()) == v


@given(st.dictionaries(st.integers(0, 20).map(lambda k: Fraction(k, 2)), st.integers(0, 50)))
def test_qseries_roundtrip(dims):
    q = qseries_of_graded_dims(dims, 10)
    assert QSeries.from_json(q.to_json()) == q
    assert QSeries.from_json(q.dumps()) == q


def test_qseries_examples():
    assert qseries_of_graded_dims({0: 1}, 5).terms == ((0, 1),)
    h = Fraction(1, 16)
    q = qseries_of_graded_dims({h + n: partition_count(n) for n in range(4)}, h + 3)
    assert [c for _, c in q.terms] == [1, 1, 2, 3]


def test_exact_linear_algebra():
    m = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    rank, _ = bareiss_rank(m)
    assert rank == 2
    ns = nullspace(m)
    assert len(ns) == 1
    assert all(sum(Fraction(r[j]) * ns[0][j] for j in range(3)) == 0 for r in m)


def test_ldl_selects_nondegenerate_directions():
    g = [[Fraction(1, 4), 0], [0, 0]]
    sel, L, D = ldl(g)
    assert sel == [0] and D == [Fraction(1, 4)]
    with pytest.raises(NotPositiveSemidefinite):
        ldl([[1, 2], [2, 1]])
