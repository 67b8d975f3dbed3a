"""JSON documents for bundles, (co)algebras, (co)modules, reports and multipliers.

Every document carries ``"format": "firmfrob/1"``, a ``kind`` and, where
scalars appear, a field descriptor.  Scalars are always strings.  Output is
canonical (sorted keys, sorted triples, two-space indent), so parsing and
re-serializing a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Any

from .algcore import AlgebraData, LocalUnitFamily
from .coalgcore import CoalgebraData
from .errors import ParseError
from .exactla import LinMap, Vec
from .fields import FieldSpec
from .frobcore import FrobeniusBundle, MultiplierPair
from .modcomod import ComoduleData, ModuleData
from .report import CheckReport

FORMAT = "firmfrob/1"
KINDS = ("bundle", "algebra", "coalgebra", "module", "comodule", "locally-finite", "report", "casimir")


# -- text ----------------------------------------------------------------------


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_document(path: str, doc: dict) -> None:
    write_atomic(path, canonical_json(doc))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_text(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", source)
    if doc.get("format") != FORMAT:
        raise ParseError(f"missing or unsupported format tag (expected {FORMAT!r})", f"{source}:format")
    if doc.get("kind") not in KINDS:
        raise ParseError(f"unknown kind {doc.get('kind')!r}", f"{source}:kind")
    return doc


def read_document(path: str) -> tuple[dict, str]:
    """Parse a file; returns the document and the sha256 of its bytes."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(str(exc.strerror or exc), path) from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 ({exc.reason})", path) from None
    return parse_text(text, path), hashlib.sha256(raw).hexdigest()


# -- field pieces --------------------------------------------------------------


def _get(doc: dict, key: str, loc: str):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", loc)
    if key not in doc:
        raise ParseError(f"missing key {key!r}", loc)
    return doc[key]


def _int(x: Any, loc: str, lo: int = 0, hi: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", loc)
    if x < lo or (hi is not None and x >= hi):
        raise ParseError(f"index {x} out of range", loc)
    return x


def _field(doc: dict, loc: str) -> FieldSpec:
    try:
        return FieldSpec.from_dict(_get(doc, "field", loc))
    except ParseError as exc:
        raise ParseError(exc.message, f"{loc}.field") from None


def _scalar(F: FieldSpec, x: Any, loc: str):
    try:
        return F.parse_scalar(x)
    except ParseError as exc:
        raise ParseError(exc.message, loc) from None


def _scalars(F: FieldSpec, arr: Any, n: int, loc: str) -> list:
    if not isinstance(arr, list) or len(arr) != n:
        raise ParseError(f"expected a list of {n} scalars", loc)
    return [_scalar(F, x, f"{loc}[{i}]") for i, x in enumerate(arr)]


def _triples(F: FieldSpec, arr: Any, bounds: tuple, loc: str) -> list[tuple]:
    if not isinstance(arr, list):
        raise ParseError("expected a list of entries", loc)
    out = []
    for t, item in enumerate(arr):
        here = f"{loc}[{t}]"
        if not isinstance(item, list) or len(item) != len(bounds) + 1:
            raise ParseError(f"entry must have {len(bounds)} indices and a scalar", here)
        idx = tuple(_int(x, f"{here}[{i}]", 0, b) for i, (x, b) in enumerate(zip(item, bounds)))
        out.append(idx + (_scalar(F, item[-1], f"{here}[{len(bounds)}]"),))
    return out


def _fmt_triples(F: FieldSpec, triples) -> list:
    return [list(t[:-1]) + [F.format_scalar(t[-1])] for t in sorted(triples)]


def _labels(doc: dict, dim: int, loc: str) -> tuple:
    labels = doc.get("labels")
    if labels is None:
        return tuple(f"b{i}" for i in range(dim))
    if not isinstance(labels, list) or len(labels) != dim or not all(isinstance(x, str) for x in labels):
        raise ParseError(f"labels must be {dim} strings", f"{loc}.labels")
    return tuple(labels)


def _header(kind: str, F: FieldSpec) -> dict:
    return {"format": FORMAT, "kind": kind, "field": F.to_dict()}


# -- algebras, coalgebras, bundles --------------------------------------------


def algebra_to_doc(R: AlgebraData, local_units: LocalUnitFamily | None = None) -> dict:
    doc = _header("algebra", R.field)
    doc.update(dim=R.dim, labels=list(R.labels), mul=_fmt_triples(R.field, R.mul))
    if local_units is not None:
        doc["local_units"] = _lu_doc(R.field, local_units)
    return doc


def coalgebra_to_doc(C: CoalgebraData) -> dict:
    doc = _header("coalgebra", C.field)
    doc.update(dim=C.dim, labels=list(C.labels), comul=_fmt_triples(C.field, C.comul),
               counit=[C.field.format_scalar(x) for x in C.counit])
    return doc


def _lu_doc(F: FieldSpec, E: LocalUnitFamily) -> dict:
    return {"max_subset": E.max_subset_size, "elements": [e.format() for e in E.elements]}


def bundle_to_doc(B: FrobeniusBundle, modules=(), comodules=()) -> dict:
    F = B.field
    doc = _header("bundle", F)
    doc.update(dim=B.dim, labels=list(B.labels), mul=_fmt_triples(F, B.algebra.mul),
               comul=_fmt_triples(F, B.coalgebra.comul), counit=[F.format_scalar(x) for x in B.coalgebra.counit])
    if B.local_units is not None:
        doc["local_units"] = _lu_doc(F, B.local_units)
    if modules:
        doc["modules"] = [_module_body(M, B.dim) for M in modules]
    if comodules:
        doc["comodules"] = [_comodule_body(N, B.dim) for N in comodules]
    return doc


def _dim(doc: dict, loc: str) -> int:
    return _int(_get(doc, "dim", loc), f"{loc}.dim", 0)


def _algebra_from(doc: dict, F: FieldSpec, loc: str) -> AlgebraData:
    d = _dim(doc, loc)
    return AlgebraData(F, d, _labels(doc, d, loc), tuple(_triples(F, _get(doc, "mul", loc), (d, d, d), f"{loc}.mul")))


def _coalgebra_from(doc: dict, F: FieldSpec, loc: str) -> CoalgebraData:
    d = _dim(doc, loc)
    return CoalgebraData(F, d, _labels(doc, d, loc),
                         tuple(_triples(F, _get(doc, "comul", loc), (d, d, d), f"{loc}.comul")),
                         tuple(_scalars(F, _get(doc, "counit", loc), d, f"{loc}.counit")))


def _lu_from(doc: dict, F: FieldSpec, d: int, loc: str) -> LocalUnitFamily | None:
    lu = doc.get("local_units")
    if lu is None:
        return None
    if not isinstance(lu, dict):
        raise ParseError("local_units must be an object", f"{loc}.local_units")
    k = _int(lu.get("max_subset", 2), f"{loc}.local_units.max_subset", 1)
    elems = lu.get("elements", [])
    if not isinstance(elems, list):
        raise ParseError("elements must be a list", f"{loc}.local_units.elements")
    return LocalUnitFamily(tuple(Vec(F, _scalars(F, e, d, f"{loc}.local_units.elements[{i}]"))
                                 for i, e in enumerate(elems)), k)


def algebra_from_doc(doc: dict, loc: str = "$") -> tuple[AlgebraData, LocalUnitFamily | None]:
    F = _field(doc, loc)
    R = _algebra_from(doc, F, loc)
    return R, _lu_from(doc, F, R.dim, loc)


def coalgebra_from_doc(doc: dict, loc: str = "$") -> CoalgebraData:
    return _coalgebra_from(doc, _field(doc, loc), loc)


def bundle_from_doc(doc: dict, loc: str = "$") -> tuple[FrobeniusBundle, list, list]:
    F = _field(doc, loc)
    R = _algebra_from(doc, F, loc)
    C = _coalgebra_from(doc, F, loc)
    B = FrobeniusBundle(R, C, _lu_from(doc, F, R.dim, loc))
    mods = [_module_from(m, F, R.dim, f"{loc}.modules[{i}]") for i, m in enumerate(doc.get("modules", []))]
    comods = [_comodule_from(m, F, R.dim, f"{loc}.comodules[{i}]") for i, m in enumerate(doc.get("comodules", []))]
    return B, mods, comods


# -- modules -------------------------------------------------------------------


def _module_body(M: ModuleData, rdim: int) -> dict:
    return {"dim": M.dim, "rdim": rdim, "action": _fmt_triples(M.field, M.triples(rdim))}


def _comodule_body(N: ComoduleData, cdim: int) -> dict:
    return {"dim": N.dim, "cdim": cdim, "coaction": _fmt_triples(N.field, N.triples(cdim))}


def module_to_doc(M: ModuleData, rdim: int) -> dict:
    doc = _header("module", M.field)
    doc.update(_module_body(M, rdim))
    return doc


def comodule_to_doc(N: ComoduleData, cdim: int) -> dict:
    doc = _header("comodule", N.field)
    doc.update(_comodule_body(N, cdim))
    return doc


def _module_from(doc: dict, F: FieldSpec, rdim: int | None, loc: str) -> ModuleData:
    m = _dim(doc, loc)
    r = _int(_get(doc, "rdim", loc), f"{loc}.rdim", 0)
    if rdim is not None and r != rdim:
        raise ParseError(f"module is over a {r}-dim algebra, expected {rdim}", f"{loc}.rdim")
    return ModuleData.from_triples(F, m, r, _triples(F, _get(doc, "action", loc), (m, r, m), f"{loc}.action"))


def _comodule_from(doc: dict, F: FieldSpec, cdim: int | None, loc: str) -> ComoduleData:
    n = _dim(doc, loc)
    c = _int(_get(doc, "cdim", loc), f"{loc}.cdim", 0)
    if cdim is not None and c != cdim:
        raise ParseError(f"comodule is over a {c}-dim coalgebra, expected {cdim}", f"{loc}.cdim")
    return ComoduleData.from_triples(F, n, c, _triples(F, _get(doc, "coaction", loc), (n, n, c), f"{loc}.coaction"))


def module_from_doc(doc: dict, rdim: int | None = None, loc: str = "$") -> ModuleData:
    return _module_from(doc, _field(doc, loc), rdim, loc)


def comodule_from_doc(doc: dict, cdim: int | None = None, loc: str = "$") -> ComoduleData:
    return _comodule_from(doc, _field(doc, loc), cdim, loc)


# -- locally-finite, reports, multipliers --------------------------------------


def locally_finite_to_doc(family: str, F: FieldSpec) -> dict:
    doc = _header("locally-finite", F)
    doc["family"] = family
    return doc


def locally_finite_from_doc(doc: dict, loc: str = "$"):
    from .families import integers_grouplike

    F = _field(doc, loc)
    family = doc.get("family")
    if family != "grouplike-integers":
        raise ParseError(f"unknown locally-finite family {family!r}", f"{loc}.family")
    return integers_grouplike(F)


def report_to_doc(rep: CheckReport, input_sha256: str | None = None, seed: int | None = None,
                  window: int | None = None, extra: dict | None = None) -> dict:
    prov = dict(rep.provenance)
    if input_sha256 is not None:
        prov["input_sha256"] = input_sha256
    if seed is not None:
        prov["seed"] = seed
    if window is not None:
        prov["window"] = window
    if extra:
        prov.update(extra)
    body = rep.to_dict()
    body["provenance"] = prov
    return {"format": FORMAT, "kind": "report", "ok": rep.ok, "report": _strip_timing(body)}


def _strip_timing(d: dict) -> dict:
    # timings are the only non-deterministic field; keep them out of report files
    d = {k: v for k, v in d.items() if k != "timing"}
    if "children" in d:
        d["children"] = [_strip_timing(c) for c in d["children"]]
    return d


def _map_entries(F: FieldSpec, m: LinMap) -> list:
    return [[r, c, F.format_scalar(v)] for r, c, v in m.entries()]


def casimir_to_doc(B: FrobeniusBundle, m: MultiplierPair, elements: list[Vec], rep: CheckReport) -> dict:
    F = B.field
    doc = _header("casimir", F)
    d = B.dim
    doc.update(
        dim=d,
        labels=list(B.labels),
        **{"lambda": {"dim": d * d, "entries": _map_entries(F, m.lam)},
           "rho": {"dim": d * d, "entries": _map_entries(F, m.rho)}},
        elements=[v.format() for v in elements],
        reconstruction=report_to_doc(rep)["report"],
    )
    return doc


def casimir_from_doc(doc: dict, loc: str = "$") -> MultiplierPair:
    F = _field(doc, loc)
    d = _dim(doc, loc)
    maps = []
    for key in ("lambda", "rho"):
        body = _get(doc, key, loc)
        n = d * d
        ent = _triples(F, _get(body, "entries", f"{loc}.{key}"), (n, n), f"{loc}.{key}.entries")
        maps.append(LinMap(F, n, n, ent))
    return MultiplierPair(*maps)


def load(path: str):
    """Read any document; returns ``(kind, object, sha256)``."""
    doc, sha = read_document(path)
    kind = doc["kind"]
    try:
        if kind == "bundle":
            obj = bundle_from_doc(doc)
        elif kind == "algebra":
            obj = algebra_from_doc(doc)
        elif kind == "coalgebra":
            obj = coalgebra_from_doc(doc)
        elif kind == "module":
            obj = module_from_doc(doc)
        elif kind == "comodule":
            obj = comodule_from_doc(doc)
        elif kind == "locally-finite":
            obj = locally_finite_from_doc(doc)
        elif kind == "casimir":
            obj = casimir_from_doc(doc)
        else:
            obj = doc
    except ParseError as exc:
        if exc.location and not exc.location.startswith(path):
            raise ParseError(exc.message, f"{path}:{exc.location}") from None
        raise
    return kind, obj, sha
