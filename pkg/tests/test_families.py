import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from firmfrob.algcore import (LocalUnitFamily, check_associativity, check_firm_algebra, find_unit,
                              verify_local_units)
from firmfrob.coalgcore import check_coalgebra
from firmfrob.errors import Refused, UsageError
from firmfrob.exactla import LinMap, Vec
from firmfrob.families import (FiniteGroup, GradedAlgebraData, GradedModuleData, LocallyFiniteBundle,
                               check_graded_module, cyclic_group, gen_comatrix, gen_graded_smash, gen_grouplike,
                               gen_trunc_poly, graded_roundtrip, group_algebra, integers_grouplike,
                               random_graded_module, rigidity_check, window_check)
from firmfrob.fields import GF, QQ
from firmfrob.frobcore import check_frobenius, cosep_solve
from firmfrob.modcomod import ComoduleData, ModuleData, direct_sum_comodule, verify_roundtrips
from firmfrob.report import WINDOW

KLEIN = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


def s3_table():
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    idx = {p: i for i, p in enumerate(perms)}
    return tuple(tuple(idx[tuple(p[q[x]] for x in range(3))] for q in perms) for p in perms)


# -- groups --------------------------------------------------------------------


def test_group_tables():
    G = FiniteGroup(KLEIN)
    assert G.order == 4 and G.identity == 0
    assert all(G.mul(g, G.inv(g)) == 0 for g in range(4))
    H = FiniteGroup(s3_table())
    assert H.order == 6
    assert any(H.mul(g, h) != H.mul(h, g) for g, h in product(range(6), repeat=2))


@pytest.mark.parametrize("table", [
    (),
    ((0, 1), (1, 1)),
    ((1, 0), (0, 0)),
    ((0, 1, 2), (1, 2, 0), (2, 1, 0)),
    ((0, 2), (1, 0)),
])
def test_group_tables_rejected(table):
    with pytest.raises(UsageError):
        FiniteGroup(table)


def test_group_order_limit():
    with pytest.raises(UsageError):
        cyclic_group(65)


# -- finite generators ---------------------------------------------------------


def test_grouplike_trivial_group_is_base_field():
    B = gen_grouplike(1, QQ)
    assert B.dim == 1
    assert B.algebra.mul == ((0, 0, 0, 1),)
    assert B.coalgebra.comul == ((0, 0, 0, 1),) and B.coalgebra.counit == (1,)


def test_grouplike_g2q_structure(g2q):
    assert g2q.labels == ("p0", "p1")
    assert g2q.algebra.products == {(0, 0): {0: 1}, (1, 1): {1: 1}}
    assert g2q.coalgebra.coproducts == {0: {(0, 0): 1}, 1: {(1, 1): 1}}
    assert g2q.coalgebra.counit == (1, 1)


def test_grouplike_from_table_and_bad_index():
    B = gen_grouplike(FiniteGroup(KLEIN), GF(3))
    assert B.dim == 4 and check_frobenius(B).ok
    with pytest.raises(UsageError):
        gen_grouplike("rationals", QQ)
    with pytest.raises(UsageError):
        gen_grouplike(0, QQ)


def test_comatrix_generator():
    C = gen_comatrix(1, QQ)
    assert C.comul == ((0, 0, 0, 1),) and C.counit == (1,)
    C = gen_comatrix(2, QQ)
    assert C.labels == ("e00", "e01", "e10", "e11")
    assert check_coalgebra(C).ok
    assert cosep_solve(C) is not None
    with pytest.raises(UsageError):
        gen_comatrix(0, QQ)


def test_trunc_poly(dual2):
    assert check_frobenius(dual2).ok
    # (eps (x) id) Delta(1) = eps(1) x + eps(x) 1 = 1
    R, C = dual2.algebra, dual2.coalgebra
    left = {}
    for (a, b), c in C.coproducts[0].items():
        left[b] = left.get(b, 0) + C.counit[a] * c
    assert {k: v for k, v in left.items() if v} == {0: 1}
    assert cosep_solve(C) is None
    assert find_unit(R) is not None


# -- locally-finite backend ----------------------------------------------------


@pytest.fixture(scope="module")
def integers():
    return integers_grouplike(GF(5))


def test_integers_windows_nested(integers):
    for w in range(5):
        assert set(integers.window(w)) < set(integers.window(w + 1))
        assert integers.closure_escape(w) is None


def test_integers_restriction(integers):
    B = integers.restrict(2)
    assert B.labels == ("p-2", "p-1", "p0", "p1", "p2")
    assert len(B.local_units.elements) == 3
    assert verify_local_units(B.algebra, B.local_units).ok


def test_integers_window_suite(integers):
    rep = window_check(integers, 3, "full")
    assert rep.verdict == WINDOW
    assert rep.detail == "window-verified, w = 3"
    assert rep.provenance["window"] == 3


def test_window_not_closed():
    shift = LocallyFiniteBundle(QQ, "integers", "shift",
                                mul_rule=lambda i, j: {i + j: 1},
                                comul_rule=lambda i: {(i, i): 1},
                                counit_rule=lambda i: 1,
                                window=lambda w: range(-w, w + 1))
    assert shift.closure_escape(1) == ("mul", (-1, -1), -2)
    with pytest.raises(Refused):
        shift.restrict(1)
    rep = window_check(shift, 1, "algebra")
    assert not rep.ok
    assert "window not closed; enlarge" in rep.witness.message


def test_rigidity(integers):
    for w in range(1, 4):
        rep = rigidity_check(integers, w)
        assert rep.ok
        assert f"in window {w + 1}" in rep.detail


def test_comodule_on_three_labels_roundtrips(integers):
    B = integers.restrict(1)
    lines = [ComoduleData(B.field, 1, LinMap(B.field, 1, B.dim, [(g, 0, 1)])) for g in range(3)]
    N = direct_sum_comodule(direct_sum_comodule(lines[0], lines[1], 3), lines[2], 3)
    assert verify_roundtrips(B, [N, *lines]).ok


def test_memo_is_thread_safe(integers):
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(8) as ex:
        out = list(ex.map(lambda g: integers.mul(g, g), [g % 7 for g in range(200)]))
    assert out == [{g % 7: 1} for g in range(200)]


# -- graded algebras and the smash product -------------------------------------


def test_grading_validated():
    A = group_algebra(cyclic_group(2), QQ).algebra
    with pytest.raises(Refused):
        GradedAlgebraData(A, cyclic_group(2), (1, 0))
    # everything in degree 0 is the trivial grading
    assert GradedAlgebraData(A, cyclic_group(2), (0, 0))
    with pytest.raises(UsageError):
        GradedAlgebraData(A, cyclic_group(2), (0,))


def smash_oracle(A: GradedAlgebraData):
    """``(a_i # p_g)(a_j # p_h) = a_i (a_j)_{g^-1 h} # p_h`` from the formula, basis by basis."""
    R, G = A.algebra, A.group
    n = G.order
    out = {}
    for i, g, j, h in product(range(R.dim), range(n), range(R.dim), range(n)):
        if A.grading[j] != G.mul(G.inv(g), h):
            continue
        for k, c in R.products.get((i, j), {}).items():
            out.setdefault((i * n + g, j * n + h), {})[k * n + h] = c
    return out


@pytest.mark.parametrize("table", [cyclic_group(2).table, cyclic_group(3).table, KLEIN, s3_table()])
def test_smash_matches_formula(table):
    A = group_algebra(FiniteGroup(table), QQ)
    sm = gen_graded_smash(A)
    assert sm.algebra.products == smash_oracle(A)
    assert check_associativity(sm.algebra).ok


def test_smash_z2_fixture():
    sm = gen_graded_smash(group_algebra(cyclic_group(2), QQ))
    S = sm.algebra
    assert S.dim == 4
    assert check_associativity(S).ok
    assert check_firm_algebra(S)[0].ok
    total = sm.idempotent(0).to_dict() | sm.idempotent(1).to_dict()
    E = LocalUnitFamily((Vec.from_dict(QQ, 4, total),), 2)
    assert verify_local_units(S, E).ok
    assert verify_local_units(S, sm.local_units).ok


def test_smash_trivial_group_is_a(dual2):
    A = GradedAlgebraData(dual2.algebra, cyclic_group(1), (0, 0))
    sm = gen_graded_smash(A)
    assert sm.algebra.mul == dual2.algebra.mul
    assert find_unit(sm.algebra) is not None


def test_smash_regular_converter():
    A = group_algebra(cyclic_group(2), QQ)
    sm = gen_graded_smash(A)
    M = GradedModuleData(ModuleData(QQ, 2, A.algebra.mul_map), A.grading)
    assert check_graded_module(A, M).ok
    assert graded_roundtrip(sm, M).ok


def test_graded_module_violations():
    A = group_algebra(cyclic_group(2), QQ)
    M = GradedModuleData(ModuleData(QQ, 2, A.algebra.mul_map), (0, 0))
    assert not check_graded_module(A, M).ok
    Z = GradedModuleData(ModuleData(QQ, 1, LinMap.zero(QQ, 2, 1)), (0,))
    assert not check_graded_module(A, Z).ok


def test_smash_to_graded_refuses_non_firm():
    A = group_algebra(cyclic_group(2), QQ)
    sm = gen_graded_smash(A)
    with pytest.raises(Refused):
        sm.smash_to_graded(ModuleData(QQ, 1, LinMap.zero(QQ, 4, 1)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2, 3]), st.sampled_from([QQ, GF(5)]))
def test_graded_converters_bijective(seed, n, F):
    A = group_algebra(cyclic_group(n), F)
    sm = gen_graded_smash(A)
    M = random_graded_module(A, random.Random(seed))
    assert M.dim <= 6
    assert graded_roundtrip(sm, M).ok


def test_random_graded_module_limits():
    A = group_algebra(FiniteGroup(s3_table()), QQ)
    M = random_graded_module(A, random.Random(0), max_dim=6)
    assert M.dim == 6
    with pytest.raises(UsageError):
        random_graded_module(group_algebra(cyclic_group(7), QQ), random.Random(0))


def test_non_group_algebra_grading():
    # k[x]/(x^2) graded by Z/2 with deg x = 1
    R = gen_trunc_poly(QQ).algebra
    A = GradedAlgebraData(R, cyclic_group(2), (0, 1))
    sm = gen_graded_smash(A)
    assert check_associativity(sm.algebra).ok
    assert check_firm_algebra(sm.algebra)[0].ok
    M = GradedModuleData(ModuleData(QQ, 2, R.mul_map), (0, 1))
    assert graded_roundtrip(sm, M).ok
