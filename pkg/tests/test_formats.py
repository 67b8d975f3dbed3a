import hashlib
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from firmfrob import formats
from firmfrob.errors import ParseError
from firmfrob.families import (cyclic_group, gen_comatrix, gen_graded_smash, gen_grouplike, gen_nil, gen_trunc_poly,
                               group_algebra)
from firmfrob.fields import GF, QQ
from firmfrob.frobcore import casimir_from_delta, change_basis, casimir_roundtrip_report, multiplier_to_element
from firmfrob.modcomod import default_samples, random_invertible, regular_comodule, regular_module
from firmfrob.suite import run_suite


def write(tmp_path, name, doc):
    p = tmp_path / name
    formats.write_document(str(p), doc)
    return str(p)


BUNDLES = [lambda: gen_grouplike(2, QQ), lambda: gen_grouplike(3, GF(5)), lambda: gen_trunc_poly(QQ),
           lambda: gen_nil(GF(2))]


@pytest.mark.parametrize("make", BUNDLES)
def test_bundle_roundtrip_byte_identical(make, tmp_path):
    B = make()
    path = write(tmp_path, "b.json", formats.bundle_to_doc(B))
    kind, (B2, mods, comods), sha = formats.load(path)
    assert kind == "bundle" and B2 == B and not mods and not comods
    path2 = write(tmp_path, "b2.json", formats.bundle_to_doc(B2))
    assert open(path, "rb").read() == open(path2, "rb").read()


def test_bundle_with_attachments(tmp_path, g2q):
    doc = formats.bundle_to_doc(g2q, [regular_module(g2q)], [regular_comodule(g2q)])
    path = write(tmp_path, "b.json", doc)
    _, (B, mods, comods), _ = formats.load(path)
    assert mods[0].action == g2q.algebra.mul_map
    assert comods[0].coaction == g2q.coalgebra.comul_map


def test_scalars_are_strings(tmp_path):
    doc = formats.bundle_to_doc(gen_trunc_poly(QQ))
    text = formats.canonical_json(doc)
    assert doc["format"] == "firmfrob/1"
    assert all(isinstance(t[-1], str) for t in doc["mul"])
    assert '"1/1"' in text


def test_module_and_comodule_docs(tmp_path):
    B = gen_grouplike(2, QQ)
    for X in default_samples(B, seed=2, count=4):
        if hasattr(X, "action"):
            path = write(tmp_path, "m.json", formats.module_to_doc(X, B.dim))
            kind, Y, _ = formats.load(path)
            assert kind == "module" and Y.action == X.action
        else:
            path = write(tmp_path, "c.json", formats.comodule_to_doc(X, B.dim))
            kind, Y, _ = formats.load(path)
            assert kind == "comodule" and Y.coaction == X.coaction


def test_algebra_doc_keeps_local_units(tmp_path):
    sm = gen_graded_smash(group_algebra(cyclic_group(2), QQ))
    path = write(tmp_path, "a.json", formats.algebra_to_doc(sm.algebra, sm.local_units))
    kind, (R, E), _ = formats.load(path)
    assert kind == "algebra" and R == sm.algebra
    assert E.elements == sm.local_units.elements


def test_coalgebra_doc(tmp_path):
    C = gen_comatrix(2, GF(3))
    path = write(tmp_path, "c.json", formats.coalgebra_to_doc(C))
    assert formats.load(path)[1] == C


def test_locally_finite_doc(tmp_path):
    path = write(tmp_path, "z.json", formats.locally_finite_to_doc("grouplike-integers", GF(5)))
    kind, LF, _ = formats.load(path)
    assert kind == "locally-finite" and LF.name == "grouplike-integers" and LF.field == GF(5)


def test_casimir_doc(tmp_path, g2q):
    m = casimir_from_delta(g2q)
    els = [multiplier_to_element(g2q, m, r, "left") for r in range(2)]
    doc = formats.casimir_to_doc(g2q, m, els, casimir_roundtrip_report(g2q))
    path = write(tmp_path, "e.json", doc)
    kind, m2, _ = formats.load(path)
    assert kind == "casimir" and m2 == m
    assert doc["elements"] == [["1/1", "0/1", "0/1", "0/1"], ["0/1", "0/1", "0/1", "1/1"]]


def test_report_doc_deterministic(g2q):
    a = formats.report_to_doc(run_suite(g2q, "algebra,coalgebra", seed=1), "abc", 1, 5)
    b = formats.report_to_doc(run_suite(g2q, "algebra,coalgebra", seed=1), "abc", 1, 5)
    assert formats.canonical_json(a) == formats.canonical_json(b)
    assert a["report"]["provenance"]["input_sha256"] == "abc"
    assert "timing" not in json.dumps(a)


def test_sha_matches_bytes(tmp_path, g2q):
    path = write(tmp_path, "b.json", formats.bundle_to_doc(g2q))
    _, _, sha = formats.load(path)
    assert sha == hashlib.sha256(open(path, "rb").read()).hexdigest()


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d["mul"][0].__setitem__(3, "1/0"), "$.mul[0][3]"),
    (lambda d: d["mul"][0].__setitem__(0, 7), "$.mul[0][0]"),
    (lambda d: d["comul"].append([0, 0]), "$.comul[2]"),
    (lambda d: d.__setitem__("counit", ["1/1"]), "$.counit"),
    (lambda d: d.__setitem__("field", {"kind": "prime", "p": 4}), "$.field"),
    (lambda d: d.pop("dim"), "$"),
])
def test_parse_errors_have_locations(tmp_path, g2q, mutate, where):
    doc = formats.bundle_to_doc(g2q)
    mutate(doc)
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ParseError) as exc:
        formats.load(str(p))
    assert exc.value.location == f"{p}:{where}"


@pytest.mark.parametrize("text", ["{", "[]", '{"format": "other", "kind": "bundle"}',
                                  '{"format": "firmfrob/1", "kind": "spaceship"}'])
def test_parse_rejects_bad_documents(text):
    with pytest.raises(ParseError):
        formats.parse_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        formats.load(str(tmp_path / "absent.json"))


def test_atomic_write_leaves_no_temp(tmp_path, g2q):
    write(tmp_path, "b.json", formats.bundle_to_doc(g2q))
    assert [p.name for p in tmp_path.iterdir()] == ["b.json"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_bundle_docs_roundtrip(seed):
    rng = random.Random(seed)
    F = rng.choice([QQ, GF(2), GF(7)])
    B = gen_grouplike(rng.randint(1, 4), F)
    B = change_basis(B, random_invertible(F, B.dim, rng))
    doc = formats.bundle_to_doc(B)
    text = formats.canonical_json(doc)
    back, _, _ = formats.bundle_from_doc(formats.parse_text(text))
    assert back == B
    assert formats.canonical_json(formats.bundle_to_doc(back)) == text
