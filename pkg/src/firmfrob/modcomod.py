"""Right modules over the algebra, right comodules over the coalgebra, and the
two functors between them.

A comodule ``(N, rho)`` becomes a module through
``n . r = n_0 eps(n_1 r)``; a firm module ``(M, alpha)`` becomes a comodule through
``rho = (alpha (x) id)(id (x) Delta) sigma`` for any linear section ``sigma`` of the
induced bijection ``M (x)_R R -> M``.  The result is certified by re-checking
``rho alpha = (alpha (x) id)(id (x) Delta)``, which also makes it independent of
the section chosen.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algcore import AlgebraData, characters, firm_data, firmness_report
from .coalgcore import grouplike_elements
from .errors import Refused, UsageError
from .exactla import Echelon, LinMap, Vec, identity, inverse, solve, span_basis, tensor
from .frobcore import FrobeniusBundle
from .report import CheckReport, aggregate, compare_maps, timed


@dataclass(frozen=True)
class ModuleData:
    """``action`` is ``alpha: A (x) R -> A``; column ``a*dim_R + r`` holds ``a . b_r``."""

    field: object
    dim: int
    action: LinMap

    def __post_init__(self):
        if self.action.codomain_dim != self.dim:
            raise UsageError(f"action shape {self.action.shape} does not fit a {self.dim}-dim module")

    @classmethod
    def from_triples(cls, field, dim: int, rdim: int, triples: Iterable) -> ModuleData:
        """``(a, r, a2, c)``: ``v_a . b_r`` has coefficient ``c`` at ``v_a2``."""
        return cls(field, dim, LinMap(field, dim * rdim, dim, [(a2, a * rdim + r, c) for a, r, a2, c in triples]))

    def triples(self, rdim: int) -> list[tuple]:
        return [(c // rdim, c % rdim, r, v) for r, c, v in self.action.entries()]


@dataclass(frozen=True)
class ComoduleData:
    """``coaction`` is ``rho: N -> N (x) C``; column ``n`` holds ``rho(v_n)``."""

    field: object
    dim: int
    coaction: LinMap

    def __post_init__(self):
        if self.coaction.domain_dim != self.dim:
            raise UsageError(f"coaction shape {self.coaction.shape} does not fit a {self.dim}-dim comodule")

    @classmethod
    def from_triples(cls, field, dim: int, cdim: int, triples: Iterable) -> ComoduleData:
        """``(n, n2, r, c)``: ``rho(v_n)`` has coefficient ``c`` at ``v_n2 (x) b_r``."""
        return cls(field, dim, LinMap(field, dim, dim * cdim, [(n2 * cdim + r, n, c) for n, n2, r, c in triples]))

    def triples(self, cdim: int) -> list[tuple]:
        return [(n, r // cdim, r % cdim, v) for r, n, v in self.coaction.entries()]


def _algebra(B) -> AlgebraData:
    return B.algebra if isinstance(B, FrobeniusBundle) else B


def _check_module_shape(B, M: ModuleData) -> None:
    if M.field != B.field or M.action.shape != (M.dim, M.dim * B.dim):
        raise UsageError(f"module action {M.action.shape} does not match a {M.dim}-dim module over dim {B.dim}")


def _check_comodule_shape(B: FrobeniusBundle, N: ComoduleData) -> None:
    if N.field != B.field or N.coaction.shape != (N.dim * B.dim, N.dim):
        raise UsageError(f"coaction {N.coaction.shape} does not match a {N.dim}-dim comodule over dim {B.dim}")


# -- structure checks ----------------------------------------------------------


@timed
def check_module(B: FrobeniusBundle | AlgebraData, M: ModuleData) -> CheckReport:
    _check_module_shape(B, M)
    F, d, m = B.field, B.dim, M.dim
    a = M.action
    return compare_maps("module", a @ tensor(a, identity(F, d)), a @ tensor(identity(F, m), _algebra(B).mul_map),
                        (m, d, d), "(v r) s != v (r s)")


@timed
def check_firm_module(B: FrobeniusBundle | AlgebraData, M: ModuleData) -> CheckReport:
    pre = check_module(B, M)
    if not pre.ok:
        return aggregate("firm_module", [pre])
    return firmness_report("firm_module", _algebra(B), M.dim, M.action)[0]


@timed
def check_comodule(B: FrobeniusBundle, N: ComoduleData) -> CheckReport:
    _check_comodule_shape(B, N)
    F, d, n = B.field, B.dim, N.dim
    rho = N.coaction
    C = B.coalgebra
    return aggregate("comodule", [
        compare_maps("coassociative_coaction", tensor(rho, identity(F, d)) @ rho,
                     tensor(identity(F, n), C.comul_map) @ rho, (n,), "(rho (x) id) rho != (id (x) Delta) rho"),
        compare_maps("counital_coaction", tensor(identity(F, n), C.counit_map) @ rho, identity(F, n), (n,),
                     "(id (x) eps) rho != id"),
    ])


# -- functors ------------------------------------------------------------------


def _alphabar(B: FrobeniusBundle, N: ComoduleData) -> LinMap:
    """``(id (x) eps)(id (x) mu)(rho (x) id): N (x) R -> N``, without any checks."""
    _check_comodule_shape(B, N)
    F, d, n = B.field, B.dim, N.dim
    one_n = identity(F, n)
    return (tensor(one_n, B.coalgebra.counit_map) @ tensor(one_n, B.algebra.mul_map)
            @ tensor(N.coaction, identity(F, d)))


def induced_action(B: FrobeniusBundle, N: ComoduleData) -> ModuleData:
    rep = check_comodule(B, N)
    if not rep.ok:
        raise Refused("not a comodule", rep)
    M = ModuleData(B.field, N.dim, _alphabar(B, N))
    rep = check_module(B, M)
    if not rep.ok:
        raise Refused("induced action is not associative", rep)
    return M


def module_section(B: FrobeniusBundle, M: ModuleData) -> LinMap:
    """A linear section ``M -> M (x) R`` of a firm module's action."""
    rep, _, section = firm_data("firm_module", B.algebra, M.dim, M.action)
    if section is None:
        raise Refused("module is not firm", rep)
    return section


def induced_coaction(B: FrobeniusBundle, M: ModuleData, section: LinMap | None = None) -> ComoduleData:
    pre = check_module(B, M)
    if not pre.ok:
        raise Refused("module is not firm", aggregate("firm_module", [pre]))
    firm, _, own = firm_data("firm_module", B.algebra, M.dim, M.action)
    if not firm.ok:
        raise Refused("module is not firm", firm)
    F, d, m = B.field, B.dim, M.dim
    alpha = M.action
    if section is None:
        section = own
    else:
        rep = compare_maps("section", alpha @ section, identity(F, m), (m,), "alpha sigma != id")
        if not rep.ok:
            raise Refused("supplied map is not a section of the action", rep)
    lift = tensor(alpha, identity(F, d)) @ tensor(identity(F, m), B.coalgebra.comul_map)
    rho = lift @ section
    N = ComoduleData(F, m, rho)
    rep = aggregate("induced_coaction", [
        compare_maps("defining_identity", rho @ alpha, lift, (m, d),
                     "rho alpha != (alpha (x) id)(id (x) Delta)"),
        check_comodule(B, N),
    ])
    if not rep.ok:
        raise Refused("not induced-coactionable", rep)
    return N


# -- verification --------------------------------------------------------------


def _roundtrip_one(B: FrobeniusBundle, X, i: int) -> CheckReport:
    name = f"sample {i}"
    try:
        if isinstance(X, ComoduleData):
            back = induced_coaction(B, induced_action(B, X))
            return compare_maps(f"{name}: comodule -> module -> comodule", back.coaction, X.coaction,
                                (X.dim,), "coaction changed")
        back = induced_action(B, induced_coaction(B, X))
        return compare_maps(f"{name}: module -> comodule -> module", back.action, X.action,
                            (X.dim, B.dim), "action changed")
    except Refused as exc:
        w = exc.report.witness if exc.report is not None else None
        if w is None:
            return CheckReport.refused(name, exc.reason)
        return CheckReport.failed(name, w, exc.reason)


@timed
def verify_roundtrips(B: FrobeniusBundle, samples: Sequence, parallel: bool = False) -> CheckReport:
    """Both round trips must reproduce each sample exactly."""
    samples = list(samples)
    if parallel and len(samples) > 1:
        with ThreadPoolExecutor() as ex:
            parts = list(ex.map(lambda t: _roundtrip_one(B, t[1], t[0]), enumerate(samples)))
    else:
        parts = [_roundtrip_one(B, X, i) for i, X in enumerate(samples)]
    return aggregate("roundtrips", parts, f"verified on sample set of {len(samples)}")


@timed
def lemma_aux_check(B: FrobeniusBundle, N: ComoduleData) -> CheckReport:
    """``(id (x) mu)(rho (x) id) = rho abar`` and ``rho abar = (abar (x) id)(id (x) Delta)``."""
    pre = check_comodule(B, N)
    if not pre.ok:
        return aggregate("lemma_aux", [pre])
    F, d, n = B.field, B.dim, N.dim
    rho = N.coaction
    ab = _alphabar(B, N)
    mid = rho @ ab
    return aggregate("lemma_aux", [
        compare_maps("coaction_through_action", tensor(identity(F, n), B.algebra.mul_map)
                     @ tensor(rho, identity(F, d)), mid, (n, d), "(id (x) mu)(rho (x) id) != rho abar"),
        compare_maps("action_colinear", mid, tensor(ab, identity(F, d)) @ tensor(identity(F, n),
                     B.coalgebra.comul_map), (n, d), "rho abar != (abar (x) id)(id (x) Delta)"),
    ])


def _is_module_map(B, f: LinMap, src: ModuleData, dst: ModuleData) -> CheckReport:
    return compare_maps("module_morphism", f @ src.action, dst.action @ tensor(f, identity(B.field, B.dim)),
                        (src.dim, B.dim), "f(v r) != f(v) r")


def _is_comodule_map(B, f: LinMap, src: ComoduleData, dst: ComoduleData) -> CheckReport:
    return compare_maps("comodule_morphism", tensor(f, identity(B.field, B.dim)) @ src.coaction,
                        dst.coaction @ f, (src.dim,), "(f (x) id) rho != rho f")


@timed
def morphism_transport_check(B: FrobeniusBundle, f: LinMap, src, dst, transported: tuple | None = None) -> CheckReport:
    """``f`` is a module map iff it is a comodule map between the transported structures.

    ``transported`` may carry the already computed images of ``(src, dst)``.
    """
    if f.shape != (dst.dim, src.dim):
        raise UsageError(f"morphism shape {f.shape} does not fit {src.dim} -> {dst.dim}")
    if isinstance(src, ModuleData):
        tsrc, tdst = transported or (induced_coaction(B, src), induced_coaction(B, dst))
        mod = _is_module_map(B, f, src, dst)
        com = _is_comodule_map(B, f, tsrc, tdst)
    else:
        tsrc, tdst = transported or (induced_action(B, src), induced_action(B, dst))
        com = _is_comodule_map(B, f, src, dst)
        mod = _is_module_map(B, f, tsrc, tdst)
    prov = {"module_morphism": mod.ok, "comodule_morphism": com.ok}
    if mod.ok == com.ok:
        word = "both hold" if mod.ok else "both fail"
        return CheckReport.passed("morphism_transport", word, provenance=prov, children=[mod, com])
    bad = com if mod.ok else mod
    return CheckReport.failed("morphism_transport", bad.witness,
                              "module and comodule morphism conditions disagree",
                              provenance=prov, children=[mod, com])


# -- sample constructions ------------------------------------------------------


def regular_module(B: FrobeniusBundle) -> ModuleData:
    return ModuleData(B.field, B.dim, B.algebra.mul_map)


def regular_comodule(B: FrobeniusBundle) -> ComoduleData:
    return ComoduleData(B.field, B.dim, B.coalgebra.comul_map)


def one_dim_modules(B: FrobeniusBundle, firm_only: bool = True) -> list[ModuleData]:
    """``v . b_r = chi(b_r) v`` for every character ``chi``."""
    out = []
    for chi in characters(B.algebra):
        M = ModuleData(B.field, 1, LinMap(B.field, B.dim, 1, [(0, r, c) for r, c in chi.to_dict().items()]))
        if not firm_only or check_firm_module(B, M).ok:
            out.append(M)
    return out


def one_dim_comodules(B: FrobeniusBundle) -> list[ComoduleData]:
    """``rho(v) = v (x) g`` for every grouplike ``g``."""
    return [ComoduleData(B.field, 1, LinMap(B.field, 1, B.dim, [(r, 0, c) for r, c in g.to_dict().items()]))
            for g in grouplike_elements(B.coalgebra)]


def direct_sum_module(M1: ModuleData, M2: ModuleData, rdim: int) -> ModuleData:
    m1 = M1.dim
    ent = [(r, c, v) for r, c, v in M1.action.entries()]
    ent += [(m1 + r, (m1 + c // rdim) * rdim + c % rdim, v) for r, c, v in M2.action.entries()]
    return ModuleData(M1.field, m1 + M2.dim, LinMap(M1.field, (m1 + M2.dim) * rdim, m1 + M2.dim, ent))


def direct_sum_comodule(N1: ComoduleData, N2: ComoduleData, cdim: int) -> ComoduleData:
    n1 = N1.dim
    ent = [(r, c, v) for r, c, v in N1.coaction.entries()]
    ent += [((n1 + r // cdim) * cdim + r % cdim, n1 + c, v) for r, c, v in N2.coaction.entries()]
    return ComoduleData(N1.field, n1 + N2.dim, LinMap(N1.field, n1 + N2.dim, (n1 + N2.dim) * cdim, ent))


def conjugate_module(M: ModuleData, P: LinMap, rdim: int) -> ModuleData:
    """The same module in the basis given by the columns of ``P``."""
    return ModuleData(M.field, M.dim, inverse(P) @ M.action @ tensor(P, identity(M.field, rdim)))


def conjugate_comodule(N: ComoduleData, P: LinMap, cdim: int) -> ComoduleData:
    return ComoduleData(N.field, N.dim, tensor(inverse(P), identity(N.field, cdim)) @ N.coaction @ P)


def submodule(B: FrobeniusBundle, M: ModuleData, gens: Sequence[Vec]) -> ModuleData:
    """The submodule generated by ``gens`` (the span closed under the action), in
    a basis chosen by elimination."""
    F, d = B.field, B.dim
    basis = span_basis(F, M.dim, gens)
    while True:
        grown = span_basis(F, M.dim, basis + [M.action.apply(_tensor_vec(v, Vec.basis(F, d, r)))
                                              for v in basis for r in range(d)])
        if len(grown) == len(basis):
            break
        basis = grown
    return _sub_structure(B, M.dim, basis, lambda v, r: M.action.apply(_tensor_vec(v, Vec.basis(F, d, r))),
                          module=True)


def subcomodule(B: FrobeniusBundle, N: ComoduleData, gens: Sequence[Vec]) -> ComoduleData:
    """The subcomodule generated by ``gens``: the span of all coefficient vectors of their coactions."""
    F, d = B.field, B.dim
    rho = N.coaction
    vecs = []
    for g in gens:
        img = rho.apply(g)
        for r in range(d):
            vecs.append(Vec(F, [img[n * d + r] for n in range(N.dim)]))
    basis = span_basis(F, N.dim, vecs)
    return _sub_structure(B, N.dim, basis, None, module=False, N=N)


def _tensor_vec(u: Vec, v: Vec) -> Vec:
    return tensor(LinMap.from_vec_column(u), LinMap.from_vec_column(v)).column_vec(0)


def _sub_structure(B, ambient: int, basis: list[Vec], act, module: bool, N: ComoduleData | None = None):
    F, d = B.field, B.dim
    k = len(basis)
    if k == 0:
        return ModuleData(F, 0, LinMap.zero(F, 0, 0)) if module else ComoduleData(F, 0, LinMap.zero(F, 0, 0))
    S = LinMap.from_columns(F, k, ambient, {i: v.to_dict() for i, v in enumerate(basis)})
    if module:
        cols = {}
        for i, v in enumerate(basis):
            for r in range(d):
                x = solve(S, act(v, r))
                if x is None:
                    raise AssertionError("span is not closed under the action")
                cols[i * d + r] = x.to_dict()
        return ModuleData(F, k, LinMap.from_columns(F, k * d, k, cols))
    # (S (x) id) rho' = rho S, solved column by column
    SS = tensor(S, identity(F, d))
    cols = {}
    for i, v in enumerate(basis):
        x = solve(SS, N.coaction.apply(v))
        if x is None:
            raise AssertionError("span is not a subcomodule")
        cols[i] = x.to_dict()
    return ComoduleData(F, k, LinMap.from_columns(F, k, k * d, cols))


def random_invertible(F, n: int, rng: random.Random) -> LinMap:
    """A product of random elementary integer matrices: determinant 1, integral inverse."""
    rows = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = F.coerce(rng.choice((-1, 1)))
        rows[i] = [F.add(a, F.mul(c, b)) for a, b in zip(rows[i], rows[j])]
    return LinMap.from_dense(F, rows)


def _random_vec(F, n: int, rng: random.Random) -> Vec:
    while True:
        v = Vec(F, [F.random_element(rng, bound=3) for _ in range(n)])
        if not v.is_zero():
            return v


def module_pieces(B: FrobeniusBundle, rng: random.Random, max_dim: int = 6, extra: int = 3) -> list[ModuleData]:
    """Firm building blocks: 1-dim modules and cyclic submodules of the regular module
    generated by basis vectors and ``extra`` random vectors."""
    F, d = B.field, B.dim
    reg = regular_module(B)
    out = list(one_dim_modules(B))
    gens = [Vec.basis(F, d, i) for i in range(d)] + [_random_vec(F, d, rng) for _ in range(extra)]
    seen = set()
    for v in gens:
        S = submodule(B, reg, [v])
        key = tuple(S.action.entries())
        if 0 < S.dim <= max_dim and key not in seen and check_firm_module(B, S).ok:
            seen.add(key)
            out.append(S)
    return out


def comodule_pieces(B: FrobeniusBundle, rng: random.Random, max_dim: int = 6, extra: int = 3) -> list[ComoduleData]:
    F, d = B.field, B.dim
    reg = regular_comodule(B)
    out = list(one_dim_comodules(B))
    gens = [Vec.basis(F, d, i) for i in range(d)] + [_random_vec(F, d, rng) for _ in range(extra)]
    seen = set()
    for v in gens:
        S = subcomodule(B, reg, [v])
        key = tuple(S.coaction.entries())
        if 0 < S.dim <= max_dim and key not in seen:
            seen.add(key)
            out.append(S)
    return out


def random_module(B: FrobeniusBundle, rng: random.Random, max_dim: int = 6,
                  pieces: Sequence[ModuleData] | None = None) -> ModuleData | None:
    """A firm module of dimension <= max_dim: a direct sum of random pieces in a
    random basis; None if no piece fits."""
    d = B.dim
    if pieces is None:
        pieces = module_pieces(B, rng, max_dim)
    M = _random_sum(pieces, rng, max_dim, lambda X, Y: direct_sum_module(X, Y, d))
    return None if M is None else conjugate_module(M, random_invertible(B.field, M.dim, rng), d)


def random_comodule(B: FrobeniusBundle, rng: random.Random, max_dim: int = 6,
                    pieces: Sequence[ComoduleData] | None = None) -> ComoduleData | None:
    d = B.dim
    if pieces is None:
        pieces = comodule_pieces(B, rng, max_dim)
    N = _random_sum(pieces, rng, max_dim, lambda X, Y: direct_sum_comodule(X, Y, d))
    return None if N is None else conjugate_comodule(N, random_invertible(B.field, N.dim, rng), d)


def _random_sum(pieces, rng: random.Random, max_dim: int, plus):
    if not pieces:
        return None
    X = None
    for _ in range(rng.randint(1, 3)):
        Y = rng.choice(pieces)
        if X is None:
            X = Y
        elif X.dim + Y.dim <= max_dim:
            X = plus(X, Y)
    return X


def default_samples(B: FrobeniusBundle, seed: int = 0, count: int = 20, max_dim: int = 6) -> list:
    """Regular (co)module, all 1-dim (co)modules, then ``count`` seeded random ones
    (alternating modules and comodules)."""
    out: list = []
    reg = regular_module(B)
    if check_firm_module(B, reg).ok:
        out.append(reg)
    out.append(regular_comodule(B))
    out += one_dim_modules(B)
    out += one_dim_comodules(B)
    rng = random.Random(seed)
    mods = module_pieces(B, rng, max_dim)
    comods = comodule_pieces(B, rng, max_dim)
    made = 0
    for t in range(4 * count):
        if made == count:
            break
        X = random_module(B, rng, max_dim, mods) if t % 2 == 0 else random_comodule(B, rng, max_dim, comods)
        if X is not None:
            out.append(X)
            made += 1
    return out


def module_hom_basis(B: FrobeniusBundle, src: ModuleData, dst: ModuleData) -> list[LinMap]:
    """A basis of the module maps ``src -> dst``."""
    F, d = B.field, B.dim
    m, n = src.dim, dst.dim
    # unknown f[y, x] at index y*m + x; equation f(v_a b_r) = f(v_a) b_r at (output y, a, r)
    E = Echelon(F, n * m)
    sa, da = src.action, dst.action
    for a in range(m):
        for r in range(d):
            col = sa.column(a * d + r)
            for y in range(n):
                row: dict = {}
                for x, c in col.items():
                    row[y * m + x] = row.get(y * m + x, 0) + c
                for y2 in range(n):
                    c = da.get(y, y2 * d + r)
                    if c:
                        row[y2 * m + a] = row.get(y2 * m + a, 0) - c
                E.add(row)
    return [LinMap(F, m, n, [(k // m, k % m, v) for k, v in sol.items()]) for sol in E.nullspace()]


def random_morphisms(B: FrobeniusBundle, src: ModuleData, dst: ModuleData, rng: random.Random,
                     count: int = 4) -> list[LinMap]:
    """Random elements of the Hom space mixed with arbitrary random linear maps."""
    F = B.field
    hom = module_hom_basis(B, src, dst)
    out = []
    for t in range(count):
        if t % 2 == 0 and hom:
            f = LinMap.zero(F, src.dim, dst.dim)
            for h in hom:
                f = f + h.scale(F.random_element(rng, bound=3))
        else:
            f = LinMap.from_dense(F, [[F.random_element(rng, bound=2) for _ in range(src.dim)]
                                      for _ in range(dst.dim)])
        out.append(f)
    return out
