"""Acceptance criteria 1-8, each at exact (bit-level) tolerance.

Each test prints one ``criterion N: PASS|FAIL`` line (visible with ``-s``); the
terminal summary repeats the per-criterion verdicts.
"""

import random
import time

import pytest

from firmfrob.algcore import (LocalUnitFamily, check_associativity, check_firm_algebra, check_nondegenerate,
                              verify_local_units)
from firmfrob.coalgcore import check_anti_multiplicative, check_coalgebra, cofrobenius_maps
from firmfrob.errors import Refused
from firmfrob.exactla import LinMap, Vec, identity, tensor
from firmfrob.families import (GradedAlgebraData, cyclic_group, gen_comatrix, gen_graded_smash, gen_grouplike,
                               gen_nil, gen_trunc_poly, graded_roundtrip, group_algebra, integers_grouplike,
                               random_graded_module, rigidity_check, window_check)
from firmfrob.fields import GF, QQ
from firmfrob.frobcore import (LEFT, RIGHT, FrobeniusBundle, build_from_cosep, casimir_from_delta,
                               check_frobenius, check_multiplier_law, cosep_solve, delta_from_casimir,
                               multiplier_to_element, retraction_report)
from firmfrob.modcomod import (ComoduleData, ModuleData, default_samples, induced_coaction, lemma_aux_check,
                               verify_roundtrips)
from firmfrob.report import WINDOW
from firmfrob.suite import run_suite

from mutations import mutate

FIELDS = [QQ, GF(2), GF(3), GF(5)]
ORDERS = [1, 2, 3, 4, 5]


def report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
    assert ok, detail


def grouplike_bundles():
    return [(f"Z/{n} over {F}", gen_grouplike(n, F)) for F in FIELDS for n in ORDERS]


@pytest.fixture(scope="module")
def mc2():
    C = gen_comatrix(2, QQ)
    return build_from_cosep(C, cosep_solve(C))


@pytest.fixture(scope="module")
def criterion2_bundles(mc2):
    return grouplike_bundles() + [("DUAL2", gen_trunc_poly(QQ)), ("MC2", mc2)]


# -- 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_criterion_1_axiom_suite():
    t0 = time.perf_counter()
    failures = []
    for name, B in grouplike_bundles():
        R = B.algebra
        checks = [
            check_associativity(R),
            check_coalgebra(B.coalgebra),
            check_frobenius(B),
            check_nondegenerate(R),
            check_firm_algebra(R)[0],
            verify_local_units(R, LocalUnitFamily(B.local_units.elements, 2)),
        ]
        failures += [f"{name}: {c}" for c in checks if not c.ok]
    elapsed = time.perf_counter() - t0
    report(1, not failures and elapsed < 5.0, f"20 bundles, {elapsed:.2f} s" + "; ".join(failures))


# -- 2 -------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_criterion_2_roundtrip_isomorphism(criterion2_bundles):
    bad = []
    for name, B in criterion2_bundles:
        samples = default_samples(B, seed=0, count=20, max_dim=6)
        assert sum(1 for X in samples if X.dim > 6) == 0
        rt = verify_roundtrips(B, samples)
        if not rt.ok:
            bad.append(f"{name}: {rt}")
        rep = run_suite(B, "roundtrip", seed=0, samples=20, morphisms=20)
        mt = next(c for c in rep.children[0].children if c.name == "morphism_transport")
        if not mt.ok or len(mt.children) != 20:
            bad.append(f"{name}: {mt}")
    report(2, not bad, f"{len(criterion2_bundles)} bundles; " + "; ".join(bad))


# -- 3 -------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_criterion_3_casimir_pipeline():
    bad = []
    for name, B in (("G2Q", gen_grouplike(2, QQ)), ("DUAL2", gen_trunc_poly(QQ))):
        d, F = B.dim, B.field
        m = casimir_from_delta(B)
        if not check_multiplier_law(B.algebra, m).ok:
            bad.append(f"{name}: multiplier law")
        C2, rep = delta_from_casimir(B.algebra, m, B.coalgebra.counit_vec)
        if not rep.ok or C2.comul != B.coalgebra.comul:
            bad.append(f"{name}: Delta -> e -> Delta'")
        elif casimir_from_delta(FrobeniusBundle(B.algebra, C2)) != m:
            bad.append(f"{name}: e -> Delta -> e'")
        eps = B.coalgebra.counit_map
        for r in range(d):
            b = Vec.basis(F, d, r)
            left = multiplier_to_element(B, m, r, LEFT)
            right = multiplier_to_element(B, m, r, RIGHT)
            if tensor(eps, identity(F, d)).apply(left) != b or tensor(identity(F, d), eps).apply(right) != b:
                bad.append(f"{name}: counit law at r = {r}")
    report(3, not bad, "; ".join(bad))


# -- 4 -------------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_criterion_4_coseparability():
    bad = []
    timings = {}
    for n in (2, 3):
        t0 = time.perf_counter()
        C = gen_comatrix(n, QQ)
        nu = cosep_solve(C)
        if nu is None or not retraction_report(C, nu).ok:
            bad.append(f"MC{n}: no retraction")
            continue
        rep = run_suite(build_from_cosep(C, nu), "all")
        timings[n] = time.perf_counter() - t0
        if not rep.ok:
            bad.append(f"MC{n}: {rep}")
    if timings.get(3, 99.0) >= 10.0:
        bad.append(f"MC3 took {timings.get(3)}")
    for name, B in grouplike_bundles():
        nu = cosep_solve(B.coalgebra)
        if nu is None:
            bad.append(f"{name}: no retraction")
            continue
        rep = run_suite(build_from_cosep(B.coalgebra, nu), "all")
        if not rep.ok:
            bad.append(f"{name}: {rep}")
    if cosep_solve(gen_trunc_poly(QQ).coalgebra) is not None:
        bad.append("DUAL2 coalgebra is not coseparable but a retraction was returned")
    report(4, not bad, f"MC3 pipeline {timings.get(3, float('nan')):.2f} s; " + "; ".join(bad))


# -- 5 -------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_criterion_5_lemma_aux_and_mutations(criterion2_bundles, mc2):
    bad = []
    checked = 0
    for name, B in criterion2_bundles:
        for N in default_samples(B, seed=0, count=20, max_dim=6):
            if isinstance(N, ComoduleData):
                checked += 1
                rep = lemma_aux_check(B, N)
                if not rep.ok:
                    bad.append(f"{name}: {rep}")
    fixtures = [("G2Q", gen_grouplike(2, QQ)), ("DUAL2", gen_trunc_poly(QQ)), ("MC2", mc2)]
    detected = total = 0
    for name, B in fixtures:
        assert run_suite(B, "full").ok
        for s in range(50):
            M, where = mutate(B, random.Random(s))
            rep = run_suite(M, "full", seed=s)
            total += 1
            failure = rep.first_failure()
            if not rep.ok and failure is not None and failure.witness is not None:
                detected += 1
            else:
                bad.append(f"{name}: mutation {where} undetected")
    report(5, not bad and detected == total == 150,
           f"lemma identities on {checked} comodules; {detected}/{total} mutations detected; " + "; ".join(bad))


# -- 6 -------------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_criterion_6_non_unital_regime():
    bad = []
    LF = integers_grouplike(GF(5))
    for w in range(1, 6):
        rep = window_check(LF, w, "full")
        if rep.verdict != WINDOW:
            bad.append(f"w = {w}: {rep}")
        lu = next(c for c in rep.children[0].children if c.name == "local_units")
        if not lu.ok:
            bad.append(f"w = {w}: local units")
        if not rigidity_check(LF, w).ok:
            bad.append(f"w = {w}: rigidity")
    rng = random.Random(0)
    algebras = [group_algebra(cyclic_group(2), QQ), group_algebra(cyclic_group(3), GF(5)),
                GradedAlgebraData(gen_trunc_poly(QQ).algebra, cyclic_group(2), (0, 1))]
    smashes = [gen_graded_smash(A) for A in algebras]
    for i in range(10):
        sm = smashes[i % len(smashes)]
        M = random_graded_module(sm.graded, rng, max_dim=6)
        rep = graded_roundtrip(sm, M)
        if M.dim > 6 or not rep.ok:
            bad.append(f"graded module {i}: {rep}")
    report(6, not bad, "windows 1..5 over GF(5), rigidity, 10 graded modules; " + "; ".join(bad))


# -- 7 -------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_criterion_7_cofrobenius(criterion2_bundles):
    bad = []
    bundles = list(criterion2_bundles)
    C3 = gen_comatrix(3, QQ)
    bundles.append(("MC3", build_from_cosep(C3, cosep_solve(C3))))
    for name, B in grouplike_bundles():
        bundles.append((f"cosep {name}", build_from_cosep(B.coalgebra, cosep_solve(B.coalgebra))))
    counted = 0
    for name, B in bundles:
        if not check_nondegenerate(B.algebra).ok:
            continue
        counted += 1
        _, _, rep = cofrobenius_maps(B)
        if not rep.ok:
            bad.append(f"{name}: {rep}")
    if not check_anti_multiplicative(gen_grouplike(2, QQ)).ok:
        bad.append("G2Q anti-multiplicativity")
    report(7, not bad and counted == len(bundles), f"{counted} bundles; " + "; ".join(bad))


# -- 8 -------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_criterion_8_negative_controls(tmp_path, capsys):
    from firmfrob import formats
    from firmfrob.cli import main

    bad = []
    nil = gen_nil(QQ)
    nd = check_nondegenerate(nil.algebra)
    fm = check_firm_algebra(nil.algebra)[0]
    if nd.ok or nd.witness is None:
        bad.append("NIL non-degeneracy")
    if fm.ok or fm.witness is None:
        bad.append("NIL firmness")
    g2q = gen_grouplike(2, QQ)
    zero = ModuleData(QQ, 2, LinMap.zero(QQ, 4, 2))
    try:
        induced_coaction(g2q, zero)
        bad.append("zero-action module accepted")
    except Refused as exc:
        if exc.report is None or exc.report.witness is None:
            bad.append("zero-action refusal has no witness")

    nil_path = str(tmp_path / "nil.json")
    formats.write_document(nil_path, formats.bundle_to_doc(nil))
    g_path = str(tmp_path / "g2q.json")
    formats.write_document(g_path, formats.bundle_to_doc(g2q))
    m_path = str(tmp_path / "zero.json")
    formats.write_document(m_path, formats.module_to_doc(zero, 2))
    for argv in (["check", nil_path, "--suite", "algebra"], ["check", nil_path, "--suite", "firmness"],
                 ["convert", "mod2comod", m_path, g_path, str(tmp_path / "o.json")],
                 ["casimir", nil_path, str(tmp_path / "e.json")]):
        code = main(argv)
        out = capsys.readouterr().out
        if code != 1 or "witness:" not in out:
            bad.append(f"{' '.join(argv[:2])}: exit {code}")
    with capsys.disabled():
        pass
    report(8, not bad, "; ".join(bad))
