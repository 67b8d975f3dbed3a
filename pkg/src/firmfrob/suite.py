"""Named check suites over a Frobenius bundle."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from .algcore import (LocalUnitFamily, check_associativity, check_firm_algebra, check_nondegenerate,
                      find_unit, verify_local_units)
from .coalgcore import check_anti_multiplicative, check_coalgebra, cofrobenius_maps
from .errors import Refused, UsageError
from .frobcore import FrobeniusBundle, casimir_roundtrip_report, check_frobenius, section_check
from .modcomod import (ComoduleData, ModuleData, default_samples, induced_coaction, lemma_aux_check,
                       morphism_transport_check,
                       random_morphisms, verify_roundtrips)
from .report import CheckReport, aggregate

FULL = ("algebra", "coalgebra", "firmness", "local_units", "frobenius", "cofrobenius", "roundtrip")
ALL = FULL + ("section",)


def _algebra(B, opts) -> CheckReport:
    return aggregate("algebra", [check_associativity(B.algebra), check_nondegenerate(B.algebra)])


def _coalgebra(B, opts) -> CheckReport:
    return check_coalgebra(B.coalgebra)


def _firmness(B, opts) -> CheckReport:
    return check_firm_algebra(B.algebra)[0]


def _local_units(B, opts) -> CheckReport:
    k = opts["max_subset"]
    E = B.local_units
    if E is None:
        u = find_unit(B.algebra)
        if u is None:
            return CheckReport.refused("local_units", "no local-unit family supplied and no unit found")
        E = LocalUnitFamily((u,), k)
    else:
        E = LocalUnitFamily(E.elements, k)
    return verify_local_units(B.algebra, E)


def _frobenius(B, opts) -> CheckReport:
    return aggregate("frobenius", [check_frobenius(B), casimir_roundtrip_report(B)])


def _cofrobenius(B, opts) -> CheckReport:
    try:
        rep = cofrobenius_maps(B)[2]
    except Refused as exc:
        return CheckReport.refused("cofrobenius", exc.reason)
    return aggregate("cofrobenius", [rep, check_anti_multiplicative(B)])


def _roundtrip(B, opts) -> CheckReport:
    seed = opts["seed"]
    samples = default_samples(B, seed=seed, count=opts["samples"], max_dim=6)
    parts = [verify_roundtrips(B, samples, parallel=opts["parallel"])]
    parts += [lemma_aux_check(B, N) for N in samples if isinstance(N, ComoduleData)]
    modules = [M for M in samples if isinstance(M, ModuleData)]
    coactions = {}
    rng = random.Random(seed)
    transports = []
    while modules and len(transports) < opts["morphisms"]:
        i, j = rng.randrange(len(modules)), rng.randrange(len(modules))
        for k in (i, j):
            if k not in coactions:
                coactions[k] = induced_coaction(B, modules[k])
        for f in random_morphisms(B, modules[i], modules[j], rng, count=2):
            transports.append(morphism_transport_check(B, f, modules[i], modules[j],
                                                       (coactions[i], coactions[j])))
    parts.append(aggregate("morphism_transport", transports[:opts["morphisms"]],
                           f"{min(len(transports), opts['morphisms'])} morphisms"))
    return aggregate("roundtrip", parts, f"verified on sample set of {len(samples)}")


def _section(B, opts) -> CheckReport:
    return section_check(B, B.coalgebra.comul_map)


SUITES: dict[str, Callable] = {
    "algebra": _algebra,
    "coalgebra": _coalgebra,
    "firmness": _firmness,
    "local_units": _local_units,
    "frobenius": _frobenius,
    "cofrobenius": _cofrobenius,
    "roundtrip": _roundtrip,
    "section": _section,
}


def _guarded(name: str, B, opts) -> CheckReport:
    # a refused precondition deep inside a suite becomes that suite's verdict
    try:
        return SUITES[name](B, opts)
    except Refused as exc:
        w = exc.report.first_failure().witness if exc.report is not None and not exc.report.ok else None
        if w is None:
            return CheckReport.refused(name, exc.reason)
        return CheckReport.failed(name, w, exc.reason)


def expand(names: str | Sequence[str]) -> list[str]:
    if isinstance(names, str):
        names = [n for n in names.split(",") if n]
    out: list[str] = []
    for n in names:
        group = {"full": FULL, "all": ALL}.get(n, (n,))
        for g in group:
            if g not in SUITES:
                raise UsageError(f"unknown suite {g!r}; choose from {', '.join(sorted(SUITES))}, full, all")
            if g not in out:
                out.append(g)
    return out


def run_suite(B: FrobeniusBundle, names: str | Sequence[str] = "full", seed: int = 0, max_subset: int = 2,
              parallel: bool = True, samples: int = 20, morphisms: int = 20) -> CheckReport:
    """Run the named checks; verdicts do not depend on ``parallel``."""
    opts = {"seed": seed, "max_subset": max_subset, "parallel": parallel, "samples": samples,
            "morphisms": morphisms}
    todo = expand(names)
    if parallel and len(todo) > 1:
        with ThreadPoolExecutor() as ex:
            parts = list(ex.map(lambda n: _guarded(n, B, opts), todo))
    else:
        parts = [_guarded(n, B, opts) for n in todo]
    rep = aggregate("suite", parts, ", ".join(todo))
    rep.provenance = {"seed": seed, "max_subset": max_subset}
    return rep
