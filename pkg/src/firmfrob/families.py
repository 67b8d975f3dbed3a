"""Example generators: grouplike bundles (finite and over the integers),
comatrix coalgebras, truncated polynomials, the nilpotent line, and graded
smash products with their module converters."""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Sequence

from .algcore import AlgebraData, LocalUnitFamily, find_unit, verify_local_units
from .coalgcore import CoalgebraData
from .errors import Refused, UsageError
from .exactla import LinMap, Vec, identity, inverse, kernel, rank, tensor
from .fields import FieldSpec
from .frobcore import FrobeniusBundle
from .modcomod import ModuleData, check_firm_module, check_module, direct_sum_module
from .report import WINDOW, CheckReport, Witness, aggregate

MAX_GROUP_ORDER = 64
# smash local units use every subset of G up to this order, nested prefixes beyond
SMASH_ALL_SUBSETS = 10


# -- groups --------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    """A group given by its multiplication table on ``0 .. n-1``."""

    table: tuple

    def __post_init__(self):
        t = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", t)
        n = len(t)
        if not 1 <= n <= MAX_GROUP_ORDER:
            raise UsageError(f"group order must be in 1..{MAX_GROUP_ORDER}, got {n}")
        for g, row in enumerate(t):
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise UsageError(f"row {g} of the group table is malformed")
            if len(set(row)) != n:
                raise UsageError(f"row {g} of the group table is not a permutation")
        e = self.identity
        if e is None:
            raise UsageError("group table has no identity")
        for g in range(n):
            for h in range(n):
                for k in range(n):
                    if t[t[g][h]][k] != t[g][t[h][k]]:
                        raise UsageError(f"group table is not associative at ({g}, {h}, {k})")

    @property
    def order(self) -> int:
        return len(self.table)

    @cached_property
    def identity(self) -> int | None:
        n = self.order
        for e in range(n):
            if all(self.table[e][g] == g and self.table[g][e] == g for g in range(n)):
                return e
        return None

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inv(self, g: int) -> int:
        return self.table[g].index(self.identity)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((g + h) % n for h in range(n)) for g in range(n)))


# -- finite bundles ------------------------------------------------------------


def _grouplike_parts(F: FieldSpec, labels: Sequence[str]) -> tuple[AlgebraData, CoalgebraData]:
    d = len(labels)
    diag = tuple((i, i, i, 1) for i in range(d))
    return (AlgebraData(F, d, tuple(labels), diag),
            CoalgebraData(F, d, tuple(labels), diag, tuple([1] * d)))


def _prefix_units(F: FieldSpec, d: int, order: Sequence[int], max_subset: int) -> LocalUnitFamily:
    """Nested idempotents ``p_{o0}, p_{o0} + p_{o1}, ...``."""
    elems = []
    acc = [0] * d
    for i in order:
        acc[i] = 1
        elems.append(Vec(F, acc))
    return LocalUnitFamily(tuple(elems), max_subset)


def gen_grouplike(index, field: FieldSpec, max_subset: int = 2):
    """``p_g p_h = delta_gh p_g``, ``Delta(p_g) = p_g (x) p_g``, ``eps(p_g) = 1``.

    ``index`` is a group order, a :class:`FiniteGroup`, or ``"integers"`` for the
    locally-finite bundle over the integers.
    """
    if index == "integers":
        return integers_grouplike(field, max_subset)
    if isinstance(index, int):
        if index < 1:
            raise UsageError("group order must be positive")
        index = cyclic_group(index)
    if not isinstance(index, FiniteGroup):
        raise UsageError(f"unsupported index set {index!r}")
    n = index.order
    R, C = _grouplike_parts(field, [f"p{g}" for g in range(n)])
    return FrobeniusBundle(R, C, _prefix_units(field, n, range(n), max_subset))


def gen_comatrix(n: int, field: FieldSpec) -> CoalgebraData:
    """``Delta(e_ij) = sum_k e_ik (x) e_kj``, ``eps(e_ij) = delta_ij``."""
    if n < 1:
        raise UsageError("comatrix size must be positive")
    sep = "" if n <= 10 else ","
    labels = tuple(f"e{i}{sep}{j}" for i in range(n) for j in range(n))
    comul = tuple((i * n + j, i * n + k, k * n + j, 1) for i in range(n) for j in range(n) for k in range(n))
    counit = tuple(1 if i == j else 0 for i in range(n) for j in range(n))
    return CoalgebraData(field, n * n, labels, comul, counit)


def gen_trunc_poly(field: FieldSpec, max_subset: int = 2) -> FrobeniusBundle:
    """``k[x]/(x^2)`` with ``eps(x) = 1``, ``Delta(1) = 1 (x) x + x (x) 1``, ``Delta(x) = x (x) x``."""
    labels = ("1", "x")
    R = AlgebraData(field, 2, labels, ((0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)))
    C = CoalgebraData(field, 2, labels, ((0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 1, 1)), (0, 1))
    return FrobeniusBundle(R, C, LocalUnitFamily((Vec(field, [1, 0]),), max_subset))


def gen_nil(field: FieldSpec) -> FrobeniusBundle:
    """One-dimensional ``x^2 = 0`` with ``Delta(x) = x (x) x``: degenerate, not firm."""
    labels = ("x",)
    return FrobeniusBundle(AlgebraData(field, 1, labels, ()),
                           CoalgebraData(field, 1, labels, ((0, 0, 0, 1),), (1,)),
                           LocalUnitFamily((), 2))


# -- locally-finite bundles ----------------------------------------------------


@dataclass(frozen=True)
class LocallyFiniteBundle:
    """A bundle on a countable basis given by finitely supported rules.

    ``mul_rule(i, j)`` returns ``{k: c}``, ``comul_rule(i)`` returns
    ``{(j, k): c}``, ``counit_rule(i)`` a scalar; ``window(w)`` lists the
    labels of the ``w``-th window (nested in ``w``).
    """

    field: FieldSpec
    label_kind: str
    name: str
    mul_rule: Callable
    comul_rule: Callable
    counit_rule: Callable
    window: Callable
    local_units: Callable | None = None
    _memo: dict = dc_field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, repr=False, compare=False)

    def _cached(self, key, fn):
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        val = fn()
        with self._lock:
            self._memo.setdefault(key, val)
        return val

    def mul(self, i, j) -> dict:
        return self._cached(("mul", i, j), lambda: dict(self.mul_rule(i, j)))

    def comul(self, i) -> dict:
        return self._cached(("comul", i), lambda: dict(self.comul_rule(i)))

    def counit(self, i):
        return self._cached(("counit", i), lambda: self.field.coerce(self.counit_rule(i)))

    def closure_escape(self, w: int) -> tuple | None:
        """The first rule output leaving window ``w``, as ``(rule, inputs, label)``."""
        labels = list(self.window(w))
        inside = set(labels)
        for i in labels:
            for j in labels:
                for k in self.mul(i, j):
                    if k not in inside:
                        return ("mul", (i, j), k)
            for j, k in self.comul(i):
                for x in (j, k):
                    if x not in inside:
                        return ("comul", (i,), x)
        return None

    def restrict(self, w: int, max_subset: int = 2) -> FrobeniusBundle:
        esc = self.closure_escape(w)
        if esc is not None:
            raise Refused(f"window not closed; enlarge (w = {w}: {esc[0]}{esc[1]} reaches {esc[2]})")
        labels = list(self.window(w))
        pos = {g: i for i, g in enumerate(labels)}
        F = self.field
        names = tuple(f"p{g}" for g in labels)
        mul = [(pos[i], pos[j], pos[k], c) for i in labels for j in labels for k, c in self.mul(i, j).items()]
        comul = [(pos[i], pos[j], pos[k], c) for i in labels for (j, k), c in self.comul(i).items()]
        counit = [self.counit(i) for i in labels]
        E = None
        if self.local_units is not None:
            E = LocalUnitFamily(tuple(Vec.from_dict(F, len(labels), {pos[g]: c for g, c in u.items()})
                                      for u in self.local_units(w)), max_subset)
        return FrobeniusBundle(AlgebraData(F, len(labels), names, tuple(mul)),
                               CoalgebraData(F, len(labels), names, tuple(comul), tuple(counit)), E)


def integers_grouplike(field: FieldSpec, max_subset: int = 2) -> LocallyFiniteBundle:
    """``R = sum_{g in Z} k p_g``: local units ``sum_{|g| <= v} p_g``, no unit."""

    def units(w: int) -> list[dict]:
        return [{g: 1 for g in range(-v, v + 1)} for v in range(w + 1)]

    return LocallyFiniteBundle(
        field, "integers", "grouplike-integers",
        mul_rule=lambda i, j: {i: 1} if i == j else {},
        comul_rule=lambda i: {(i, i): 1},
        counit_rule=lambda i: 1,
        window=lambda w: range(-w, w + 1),
        local_units=units,
    )


def window_check(LF: LocallyFiniteBundle, w: int, suite: str | Sequence[str] = "full", seed: int = 0,
                 max_subset: int = 2, parallel: bool = False) -> CheckReport:
    """Run a suite on window ``w``; passing verdicts are tagged window-verified."""
    from .suite import run_suite

    name = f"window w = {w}"
    try:
        B = LF.restrict(w, max_subset)
    except Refused as exc:
        esc = LF.closure_escape(w)
        return CheckReport.failed(name, Witness(esc[1], None, None, exc.reason), exc.reason)
    rep = run_suite(B, suite, seed=seed, max_subset=max_subset, parallel=parallel)
    rep = aggregate(name, [rep])
    if rep.ok:
        rep.verdict = WINDOW
        rep.detail = f"window-verified, w = {w}"
    rep.provenance = {"window": w, "seed": seed, "family": LF.name}
    return rep


def rigidity_check(LF: LocallyFiniteBundle, w: int) -> CheckReport:
    """At finite dimension, local units at subset size ``dim`` force a unit; that unit
    must then fail to fix some label of the next window, so no window
    certificate yields a unit of the whole bundle."""
    name = f"rigidity w = {w}"
    B = LF.restrict(w)
    R = B.algebra
    E = LocalUnitFamily(B.local_units.elements if B.local_units else (), R.dim)
    lu = verify_local_units(R, E)
    u = find_unit(R)
    if not lu.ok:
        return aggregate(name, [lu])
    if u is None:
        return CheckReport.failed(name, Witness((), None, None, "local units at full subset size but no unit"))
    big = LF.restrict(w + 1)
    labels = list(LF.window(w))
    pos = {g: i for i, g in enumerate(LF.window(w + 1))}
    ext = Vec.from_dict(R.field, big.dim, {pos[g]: c for g, c in zip(labels, u.entries) if c})
    for i in range(big.dim):
        b = big.algebra.basis_vec(i)
        if big.algebra.mul_vec(ext, b) != b:
            return CheckReport.passed(name, f"window unit does not fix {big.labels[i]} in window {w + 1}",
                                      children=[lu])
    return CheckReport.failed(name, Witness((), ext, None, "window unit extends to the next window"))


# -- graded algebras and smash products ----------------------------------------


@dataclass(frozen=True)
class GradedAlgebraData:
    """A unital algebra with each basis element homogeneous of degree ``grading[i]``."""

    algebra: AlgebraData
    group: FiniteGroup
    grading: tuple

    def __post_init__(self):
        A, G = self.algebra, self.group
        grading = tuple(int(g) for g in self.grading)
        object.__setattr__(self, "grading", grading)
        if len(grading) != A.dim or any(not 0 <= g < G.order for g in grading):
            raise UsageError("grading must assign a group element to every basis element")
        for i, j, k, _c in A.mul:
            if grading[k] != G.mul(grading[i], grading[j]):
                raise Refused(f"grading violated: b_{i} b_{j} has a component b_{k} of the wrong degree")
        u = find_unit(A)
        if u is None:
            raise Refused("graded algebra must be unital")
        if any(grading[i] != G.identity for i in u.support()):
            raise Refused("unit is not in the neutral degree")

    @cached_property
    def unit(self) -> Vec:
        return find_unit(self.algebra)


def group_algebra(G: FiniteGroup, field: FieldSpec) -> GradedAlgebraData:
    """``k G`` graded by ``G`` itself."""
    n = G.order
    A = AlgebraData(field, n, tuple(f"a{g}" for g in range(n)),
                    tuple((g, h, G.mul(g, h), 1) for g in range(n) for h in range(n)))
    return GradedAlgebraData(A, G, tuple(range(n)))


@dataclass(frozen=True)
class GradedModuleData:
    """A unital right module over a graded algebra with a homogeneous basis."""

    module: ModuleData
    grading: tuple

    @property
    def dim(self) -> int:
        return self.module.dim


def check_graded_module(A: GradedAlgebraData, M: GradedModuleData) -> CheckReport:
    R, G = A.algebra, A.group
    d = R.dim
    parts = [check_module(R, M.module)]
    unit_map = M.module.action @ tensor_vec_right(R.field, M.dim, A.unit)
    one = identity(R.field, M.dim)
    diff = unit_map.first_difference(one)
    if diff is not None:
        parts.append(CheckReport.failed("unital", Witness((diff,), one.column_vec(diff), unit_map.column_vec(diff),
                                                          "v 1 != v")))
    for r, c, _v in M.module.action.entries():
        x, i = divmod(c, d)
        if M.grading[r] != G.mul(M.grading[x], A.grading[i]):
            parts.append(CheckReport.failed("graded", Witness((x, i, r), None, None,
                                                              "v_x a_i leaves degree deg(x) deg(i)")))
            break
    return aggregate("graded_module", parts)


def tensor_vec_right(F: FieldSpec, m: int, u: Vec) -> LinMap:
    """``v -> v (x) u`` as a map ``k^m -> k^m (x) k^d``."""
    d = u.dim
    return LinMap(F, m, m * d, [(x * d + i, x, c) for x in range(m) for i, c in u.to_dict().items()])


@dataclass(frozen=True)
class SmashProduct:
    """The smash algebra on basis ``a_i # p_g`` (index ``i*|G| + g``) with its
    local-unit family and the graded-module converters."""

    graded: GradedAlgebraData
    algebra: AlgebraData
    local_units: LocalUnitFamily

    def idempotent(self, g: int) -> Vec:
        """``1 # p_g``."""
        n = self.graded.group.order
        return Vec.from_dict(self.algebra.field, self.algebra.dim,
                             {i * n + g: c for i, c in self.graded.unit.to_dict().items()})

    def graded_to_smash(self, M: GradedModuleData) -> ModuleData:
        """``v . (a # p_h)`` is the degree-``h`` component of ``v a``."""
        A = self.graded
        F, d, n = A.algebra.field, A.algebra.dim, A.group.order
        ent = []
        for r, c, v in M.module.action.entries():
            x, i = divmod(c, d)
            h = M.grading[r]
            ent.append((r, x * (d * n) + i * n + h, v))
        return ModuleData(F, M.dim, LinMap(F, M.dim * d * n, M.dim, ent))

    def smash_to_graded(self, S: ModuleData) -> tuple[GradedModuleData, LinMap]:
        """Degree-``g`` part is the image of ``1 # p_g``; ``v . a = sum_h v . (a # p_h)``.

        Returns the graded module and the basis change ``P`` (columns are the
        new basis in old coordinates).  When every basis vector is already
        homogeneous ``P`` is the identity.
        """
        A = self.graded
        F, d, n = A.algebra.field, A.algebra.dim, A.group.order
        m = S.dim
        D = self.algebra.dim
        projections = [S.action @ tensor_vec_right(F, m, self.idempotent(g)) for g in range(n)]
        one = identity(F, m)
        degrees = []
        for x in range(m):
            e = Vec.basis(F, m, x)
            deg = next((g for g, P in enumerate(projections) if P.apply(e) == e), None)
            degrees.append(deg)
        if all(g is not None for g in degrees):
            P = one
            grading = tuple(degrees)
        else:
            basis, grading_l = [], []
            for g, Pg in enumerate(projections):
                for v in kernel(one - Pg):
                    basis.append(v)
                    grading_l.append(g)
            if len(basis) != m:
                raise Refused("homogeneous components do not span the module (module not firm)")
            order = sorted(range(m), key=lambda t: (basis[t].support()[0], t))
            basis = [basis[t] for t in order]
            grading = tuple(grading_l[t] for t in order)
            P = LinMap.from_columns(F, m, m, {t: v.to_dict() for t, v in enumerate(basis)})
        # plain action: v . a_i = sum_h v . (a_i # p_h)
        sum_h = LinMap(F, d, D, [(i * n + h, i, 1) for i in range(d) for h in range(n)])
        act = S.action @ tensor(identity(F, m), sum_h)
        if P is not one:
            act = inverse(P) @ act @ tensor(P, identity(F, d))
        return GradedModuleData(ModuleData(F, m, act), grading), P


def gen_graded_smash(A: GradedAlgebraData, max_subset: int = 2) -> SmashProduct:
    """``(a # p_g)(b # p_h) = a b_{g^-1 h} # p_h``, where ``b_x`` is the degree-``x`` part of ``b``."""
    R, G = A.algebra, A.group
    d, n = R.dim, G.order
    F = R.field
    triples = []
    for (i, j), out in R.products.items():
        for g in range(n):
            h = G.mul(g, A.grading[j])
            for k, c in out.items():
                triples.append((i * n + g, j * n + h, k * n + h, c))
    labels = tuple(f"{a}#p{g}" for a in R.labels for g in range(n))
    S = AlgebraData(F, d * n, labels, tuple(triples))
    u = A.unit.to_dict()

    def unit_on(gs) -> Vec:
        return Vec.from_dict(F, d * n, {i * n + g: c for g in gs for i, c in u.items()})

    if n <= SMASH_ALL_SUBSETS:
        subsets = [[g for g in range(n) if mask >> g & 1] for mask in range(1, 2 ** n)]
    else:
        subsets = [list(range(k + 1)) for k in range(n)]
    return SmashProduct(A, S, LocalUnitFamily(tuple(unit_on(gs) for gs in subsets), max_subset))


def _shifted_regular(A: GradedAlgebraData, s: int) -> GradedModuleData:
    """``A`` as a right module over itself, degrees shifted on the left by ``s``."""
    return GradedModuleData(ModuleData(A.algebra.field, A.algebra.dim, A.algebra.mul_map),
                            tuple(A.group.mul(s, g) for g in A.grading))


def _homogeneous_conjugation(M: GradedModuleData, rng: random.Random, d: int) -> GradedModuleData:
    """Random degree-preserving change of basis."""
    F = M.module.field
    m = M.dim
    while True:
        ent = []
        for x in range(m):
            for y in range(m):
                if M.grading[x] == M.grading[y]:
                    c = F.random_element(rng, bound=2)
                    if c:
                        ent.append((x, y, c))
        P = LinMap(F, m, m, ent)
        if rank(P) == m:
            break
    act = inverse(P) @ M.module.action @ tensor(P, identity(F, d))
    return GradedModuleData(ModuleData(F, m, act), M.grading)


def random_graded_module(A: GradedAlgebraData, rng: random.Random, max_dim: int = 6) -> GradedModuleData:
    """Direct sums of shifted copies of ``A``, in a random homogeneous basis."""
    d = A.algebra.dim
    if d > max_dim:
        raise UsageError(f"algebra of dim {d} exceeds max_dim {max_dim}")
    copies = rng.randint(1, max_dim // d)
    M = None
    for _ in range(copies):
        X = _shifted_regular(A, rng.randrange(A.group.order))
        if M is None:
            M = X
        else:
            M = GradedModuleData(direct_sum_module(M.module, X.module, d), M.grading + X.grading)
    return _homogeneous_conjugation(M, rng, d)


def graded_roundtrip(sm: SmashProduct, M: GradedModuleData) -> CheckReport:
    """graded -> smash -> graded is the identity, and the smash module is firm."""
    name = "graded_roundtrip"
    S = sm.graded_to_smash(M)
    parts = [check_graded_module(sm.graded, M), check_firm_module(sm.algebra, S)]
    back, P = sm.smash_to_graded(S)
    if back.grading != M.grading or back.module.action != M.module.action:
        c = back.module.action.first_difference(M.module.action)
        parts.append(CheckReport.failed(name, Witness((c,), None, None, "graded module changed in round trip")))
    else:
        parts.append(CheckReport.passed(name))
    again = sm.graded_to_smash(back)
    if again.action != S.action:
        parts.append(CheckReport.failed("smash_roundtrip", Witness((), None, None, "smash module changed")))
    return aggregate(name, parts)
