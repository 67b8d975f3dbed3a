from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from firmfrob.errors import UsageError
from firmfrob.exactla import (Echelon, LinMap, Vec, identity, inverse, kernel, quotient_by_span, rank, solve,
                              swap, tensor)
from firmfrob.fields import GF, QQ, FieldSpec


def small_rationals():
    return st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def maps(draw, field=QQ, rows=None, cols=None):
    r = rows if rows is not None else draw(st.integers(1, 4))
    c = cols if cols is not None else draw(st.integers(1, 4))
    if field.p is None:
        elem = small_rationals()
    else:
        elem = st.integers(0, field.p - 1)
    m = draw(st.lists(st.lists(elem, min_size=c, max_size=c), min_size=r, max_size=r))
    return LinMap.from_dense(field, m)


def to_sympy(A: LinMap):
    return sympy.Matrix(A.to_dense())


# -- fields --------------------------------------------------------------------


def test_field_parse_and_scalar_format():
    assert FieldSpec.parse("q") == QQ
    assert FieldSpec.parse("GF(7)") == GF(7)
    assert FieldSpec.parse("5") == GF(5)
    assert QQ.format_scalar(Fraction(-6, 4)) == "-3/2"
    assert QQ.format_scalar(Fraction(3)) == "3/1"
    assert GF(5).format_scalar(-1) == "4"


@pytest.mark.parametrize("bad", ["1/0", "x", "1.5", ""])
def test_rational_scalar_rejects_malformed(bad):
    with pytest.raises(Exception):
        QQ.parse_scalar(bad)


@pytest.mark.parametrize("p", [1, 4, 9, 2 ** 31 + 11])
def test_prime_field_rejects_non_primes_and_large(p):
    with pytest.raises(UsageError):
        GF(p)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_rational_canonical_form(n, d):
    x = QQ.coerce(Fraction(n, d))
    assert x.denominator > 0
    s = QQ.format_scalar(x)
    assert QQ.parse_scalar(s) == x


@given(st.integers(-1000, 1000))
def test_prime_field_entries_in_range(n):
    F = GF(7)
    x = F.coerce(n)
    assert 0 <= x < 7
    if x:
        assert F.mul(x, F.inv(x)) == 1


# -- solve / kernel ------------------------------------------------------------


def test_solve_identity_returns_rhs():
    b = Vec(QQ, [1, Fraction(2, 3), -5])
    assert solve(identity(QQ, 3), b) == b


def test_solve_zero_map_inconsistent():
    assert solve(LinMap.zero(QQ, 3, 2), Vec(QQ, [1, 0])) is None


def test_solve_flattened_grouplike_multiplication(g2q):
    mu = g2q.algebra.mul_map
    assert rank(mu) == 2
    p0 = Vec.basis(QQ, 2, 0)
    x = solve(mu, p0)
    assert x is not None
    assert mu.apply(x) == p0
    # lowest-index pivots: p0 (x) p0 is the canonical preimage
    assert x == Vec.basis(QQ, 4, 0)


def test_solve_field_mismatch():
    with pytest.raises(UsageError):
        solve(identity(QQ, 2), Vec(GF(3), [1, 1]))


def test_kernel_identity_and_zero():
    assert kernel(identity(QQ, 4)) == []
    K = kernel(LinMap.zero(QQ, 3, 2))
    assert len(K) == 3


def test_kernel_of_nil_left_annihilator(nil):
    from firmfrob.algcore import annihilator_maps
    left, _ = annihilator_maps(nil.algebra)
    K = kernel(left)
    assert K == [Vec(QQ, [1])]


def test_rank_against_sympy_fixed():
    A = LinMap.from_dense(QQ, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(A) == 2
    assert rank(A) == to_sympy(A).rank()


def test_inverse():
    A = LinMap.from_dense(QQ, [[2, 1], [1, 1]])
    assert inverse(A) @ A == identity(QQ, 2)
    assert inverse(A) == LinMap.from_dense(QQ, [[1, -1], [-1, 2]])


@settings(max_examples=60, deadline=None)
@given(maps())
def test_rank_matches_sympy(A):
    assert rank(A) == to_sympy(A).rank()


@settings(max_examples=60, deadline=None)
@given(maps())
def test_kernel_exact_and_complete(A):
    K = kernel(A)
    for v in K:
        assert A.apply(v).is_zero()
    assert len(K) == A.domain_dim - rank(A)


@settings(max_examples=60, deadline=None)
@given(maps(field=GF(5)))
def test_kernel_exact_over_gf5(A):
    K = kernel(A)
    for v in K:
        assert A.apply(v).is_zero()
        assert all(0 <= x < 5 for x in v.entries)
    assert len(K) == A.domain_dim - rank(A)


@settings(max_examples=60, deadline=None)
@given(maps(), st.data())
def test_solve_exact_or_inconsistent(A, data):
    b = Vec(QQ, data.draw(st.lists(small_rationals(), min_size=A.codomain_dim, max_size=A.codomain_dim)))
    x = solve(A, b)
    M = to_sympy(A)
    consistent = M.rank() == M.row_join(sympy.Matrix(list(b.entries))).rank()
    if x is None:
        assert not consistent
    else:
        assert A.apply(x) == b


def test_solve_deterministic():
    A = LinMap.from_dense(QQ, [[1, 1, 1]])
    b = Vec(QQ, [3])
    assert solve(A, b) == solve(A, b) == Vec(QQ, [3, 0, 0])


def test_echelon_lowest_pivot_and_nullspace():
    E = Echelon(QQ, 3)
    E.add({1: 1, 2: 1})
    E.add({0: 1, 1: 1})
    assert E.rank == 2
    E.fully_reduce()
    assert sorted(E.pivots) == [0, 1]
    ns = E.nullspace()
    assert ns == [{0: 1, 1: -1, 2: 1}] or ns == [{2: 1, 1: -1, 0: 1}]


# -- tensor --------------------------------------------------------------------


def test_tensor_identities():
    assert tensor(identity(QQ, 2), identity(QQ, 3)) == identity(QQ, 6)
    f = LinMap.from_dense(QQ, [[1, 2], [3, 4]])
    assert tensor(f, LinMap.zero(QQ, 3, 2)).is_zero()


def test_tensor_index_convention(g2q):
    delta = g2q.coalgebra.comul_map
    T = tensor(delta, identity(QQ, 2))
    x = Vec.basis(QQ, 4, 0 * 2 + 1)  # p0 (x) p1
    expected = Vec.basis(QQ, 8, (0 * 2 + 0) * 2 + 1)  # p0 (x) p0 (x) p1
    assert T.apply(x) == expected


def test_swap():
    S = swap(QQ, 2, 3)
    for i in range(2):
        for j in range(3):
            assert S.apply(Vec.basis(QQ, 6, i * 3 + j)) == Vec.basis(QQ, 6, j * 2 + i)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_tensor_functorial(data):
    a, b, c = (data.draw(st.integers(1, 3)) for _ in range(3))
    x, y, z = (data.draw(st.integers(1, 3)) for _ in range(3))
    f2 = data.draw(maps(rows=b, cols=a))
    f1 = data.draw(maps(rows=c, cols=b))
    g2 = data.draw(maps(rows=y, cols=x))
    g1 = data.draw(maps(rows=z, cols=y))
    assert tensor(f1 @ f2, g1 @ g2) == tensor(f1, g1) @ tensor(f2, g2)


@settings(max_examples=40, deadline=None)
@given(maps(), maps())
def test_tensor_pure_tensors(f, g):
    F = QQ
    for i in range(f.domain_dim):
        for j in range(g.domain_dim):
            lhs = tensor(f, g).apply(Vec.basis(F, f.domain_dim * g.domain_dim, i * g.domain_dim + j))
            fi, gj = f.column_vec(i), g.column_vec(j)
            rhs = [a * b for a in fi.entries for b in gj.entries]
            assert lhs == Vec(F, rhs)


def test_linmap_rejects_bad_entries():
    with pytest.raises(UsageError):
        LinMap(QQ, 2, 2, [(0, 2, 1)])
    with pytest.raises(UsageError):
        LinMap(QQ, 2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(UsageError):
        identity(QQ, 2) @ identity(QQ, 3)


# -- quotients -----------------------------------------------------------------


def test_quotient_no_relations():
    Q = quotient_by_span(3, [], QQ)
    assert Q.quotient_dim == 3
    assert Q.projection == identity(QQ, 3)


def test_quotient_everything():
    Q = quotient_by_span(2, [Vec(QQ, [1, 1]), Vec(QQ, [1, -1])])
    assert Q.quotient_dim == 0


def test_quotient_for_nil_tensor_square(nil):
    from firmfrob.algcore import check_firm_algebra
    rep, Q = check_firm_algebra(nil.algebra)
    assert Q.quotient_dim == 1
    assert not rep.ok


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.data())
def test_quotient_invariants(n, data):
    k = data.draw(st.integers(0, 4))
    rels = [Vec(QQ, data.draw(st.lists(small_rationals(), min_size=n, max_size=n))) for _ in range(k)]
    Q = quotient_by_span(n, rels, QQ)
    assert Q.projection @ Q.section == identity(QQ, Q.quotient_dim)
    for v in rels:
        assert Q.projection.apply(v).is_zero()
    r = rank(LinMap.from_columns(QQ, k, n, {i: v.to_dict() for i, v in enumerate(rels)})) if k else 0
    assert Q.quotient_dim == n - r == rank(Q.projection)
