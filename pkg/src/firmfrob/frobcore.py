"""Frobenius bundles: one space carrying a multiplication and a comultiplication.

Besides the compatibility check this module solves for bicomodule
retractions of a comultiplication (which then serve as a multiplication),
and converts between a bimodule comultiplication and its Casimir multiplier
on ``R (x) R``.  Multipliers are kept extensionally as a pair ``(lam, rho)``
of endomorphisms of ``R (x) R``, acting as ``e x = lam(x)`` and ``x e = rho(x)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .algcore import (AlgebraData, LocalUnitFamily, check_associativity,
                      check_firm_algebra, check_nondegenerate)
from .coalgcore import CoalgebraData, check_coalgebra
from .errors import DegeneracyLeak, Refused, UsageError
from .exactla import Echelon, LinMap, Vec, identity, inverse, tensor
from .report import CheckReport, Witness, aggregate, compare_maps, decode_index, timed

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class FrobeniusBundle:
    algebra: AlgebraData
    coalgebra: CoalgebraData
    local_units: LocalUnitFamily | None = None

    def __post_init__(self):
        R, C = self.algebra, self.coalgebra
        if R.field != C.field:
            raise UsageError(f"field mismatch: {R.field} vs {C.field}")
        if R.dim != C.dim or R.labels != C.labels:
            raise UsageError("algebra and coalgebra must share dimension and basis labels")

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def labels(self) -> tuple:
        return self.algebra.labels


@dataclass(frozen=True)
class MultiplierPair:
    """A multiplier of ``R (x) R``: ``lam`` is left action, ``rho`` right action."""

    lam: LinMap
    rho: LinMap


def algebra_from_map(field, labels: Sequence[str], mu: LinMap) -> AlgebraData:
    d = len(labels)
    return AlgebraData(field, d, tuple(labels), tuple((c // d, c % d, k, v) for k, c, v in mu.entries()))


def coalgebra_from_maps(field, labels: Sequence[str], delta: LinMap, counit: Sequence) -> CoalgebraData:
    d = len(labels)
    return CoalgebraData(field, d, tuple(labels), tuple((i, r // d, r % d, v) for r, i, v in delta.entries()),
                         tuple(counit))


# -- compatibility -------------------------------------------------------------


@timed
def check_frobenius(B: FrobeniusBundle) -> CheckReport:
    """``(mu (x) id)(id (x) Delta) = Delta mu = (id (x) mu)(Delta (x) id)`` on ``R (x) R``."""
    F, d = B.field, B.dim
    mu, delta = B.algebra.mul_map, B.coalgebra.comul_map
    one = identity(F, d)
    via_right = tensor(mu, one) @ tensor(one, delta)
    middle = delta @ mu
    via_left = tensor(one, mu) @ tensor(delta, one)
    c1 = via_right.first_difference(middle)
    c2 = middle.first_difference(via_left)
    cands = [c for c in (c1, c2) if c is not None]
    if not cands:
        return CheckReport.passed("frobenius")
    c = min(cands)
    other = via_right if c == c1 else via_left
    which = "(mu (x) id)(id (x) Delta)" if c == c1 else "(id (x) mu)(Delta (x) id)"
    return CheckReport.failed("frobenius", Witness(decode_index(c, (d, d)), middle.column_vec(c),
                                                   other.column_vec(c), f"Delta mu != {which}"))


def bundle_prerequisites(B: FrobeniusBundle) -> CheckReport:
    return aggregate("prerequisites", [check_associativity(B.algebra), check_coalgebra(B.coalgebra),
                                       check_frobenius(B)])


def change_basis(B: FrobeniusBundle, P: LinMap) -> FrobeniusBundle:
    """Re-express the bundle in the basis given by the columns of invertible ``P``."""
    Pi = inverse(P)
    R, C = B.algebra, B.coalgebra
    mu = Pi @ R.mul_map @ tensor(P, P)
    delta = tensor(Pi, Pi) @ C.comul_map @ P
    eps = C.counit_map @ P
    counit = [eps.get(0, i) for i in range(B.dim)]
    return FrobeniusBundle(algebra_from_map(B.field, B.labels, mu),
                           coalgebra_from_maps(B.field, B.labels, delta, counit))


# -- coseparability ------------------------------------------------------------


def retraction_report(C: CoalgebraData, nu: LinMap) -> CheckReport:
    F, d = C.field, C.dim
    if nu.shape != (d, d * d):
        raise UsageError(f"retraction must be {d}x{d * d}, got {nu.shape}")
    delta = C.comul_map
    one = identity(F, d)
    target = delta @ nu
    return aggregate("retraction", [
        compare_maps("retraction_of_comultiplication", nu @ delta, one, (d,), "nu Delta != id"),
        compare_maps("left_colinear", tensor(one, nu) @ tensor(delta, one), target, (d, d),
                     "(id (x) nu)(Delta (x) id) != Delta nu"),
        compare_maps("right_colinear", tensor(nu, one) @ tensor(one, delta), target, (d, d),
                     "(nu (x) id)(id (x) Delta) != Delta nu"),
    ])


def cosep_solve(C: CoalgebraData, prefer_nondegenerate: bool = True, seed: int = 0,
                attempts: int = 16) -> LinMap | None:
    """A bicomodule retraction ``nu: C (x) C -> C`` of the comultiplication, or None.

    Unknowns are the entries ``nu[z, a*d + b]`` (index ``z*d*d + a*d + b``).
    The starting point is the solution with every free unknown set to zero.
    When that multiplication is degenerate and ``prefer_nondegenerate`` is set,
    it is moved along the solution space (all-ones offset first, then seeded
    random integer offsets) until a non-degenerate one turns up; if none does, the
    zero-free-variable solution is returned.
    """
    rep = check_coalgebra(C)
    if not rep.ok:
        raise Refused("not a coalgebra", rep)
    F, d = C.field, C.dim
    dd = d * d
    n = d * dd
    cop = C.coproducts
    into: dict = {}
    for z, out in cop.items():
        for (x, y), c in out.items():
            into.setdefault((x, y), []).append((z, c))
    E = Echelon(F, n, 1)

    def add(row: dict, rhs=0):
        if rhs:
            row[n] = rhs
        E.add(row)

    # nu(Delta(b_a)) = b_a
    for a in range(d):
        for z in range(d):
            row: dict = {}
            for (x, y), c in cop.get(a, {}).items():
                v = z * dd + x * d + y
                row[v] = row.get(v, 0) + c
            add(row, F.one if z == a else 0)
    for a in range(d):
        for b in range(d):
            for x in range(d):
                for y in range(d):
                    # component (x, y) of Delta(nu(a (x) b))
                    base: dict = {}
                    for z, c in into.get((x, y), ()):
                        v = z * dd + a * d + b
                        base[v] = base.get(v, 0) - c
                    left = dict(base)
                    for (a1, a2), c in cop.get(a, {}).items():
                        if a1 == x:
                            v = y * dd + a2 * d + b
                            left[v] = left.get(v, 0) + c
                    add(left)
                    right = base
                    for (b1, b2), c in cop.get(b, {}).items():
                        if b2 == y:
                            v = x * dd + a * d + b1
                            right[v] = right.get(v, 0) + c
                    add(right)
    x = E.solution(0)
    if x is None:
        return None
    nu = _as_retraction(C, x)
    if not prefer_nondegenerate or check_nondegenerate(algebra_from_map(F, C.labels, nu)).ok:
        return nu
    null = E.nullspace()
    if not null:
        return nu
    rng = random.Random(seed)
    for t in range(attempts):
        coeffs = [F.one] * len(null) if t == 0 else [F.coerce(rng.randint(-2, 2)) for _ in null]
        y = dict(x)
        for c, vec in zip(coeffs, null):
            for k, v in vec.items():
                y[k] = F.add(y.get(k, F.zero), F.mul(c, v))
        cand = _as_retraction(C, y)
        if check_nondegenerate(algebra_from_map(F, C.labels, cand)).ok:
            return cand
    return nu


def _as_retraction(C: CoalgebraData, x: dict) -> LinMap:
    d = C.dim
    dd = d * d
    nu = LinMap.from_rows(C.field, dd, d, _rows_of(x, dd))
    check = retraction_report(C, nu)
    if not check.ok:
        raise AssertionError(f"solver returned an invalid retraction: {check}")
    return nu


def _rows_of(x: dict, dd: int) -> dict:
    rows: dict = {}
    for v, c in x.items():
        rows.setdefault(v // dd, {})[v % dd] = c
    return rows


def build_from_cosep(C: CoalgebraData, nu: LinMap) -> FrobeniusBundle:
    """The bundle whose multiplication is the retraction ``nu``."""
    rep = retraction_report(C, nu)
    if not rep.ok:
        raise Refused("nu is not a bicomodule retraction of Delta", rep)
    return FrobeniusBundle(algebra_from_map(C.field, C.labels, nu), C)


# -- Casimir multiplier --------------------------------------------------------


class _TensorOps:
    """One-sided multiplications on ``R (x) R`` built from those on ``R``."""

    def __init__(self, R: AlgebraData):
        self.R = R
        F, d = R.field, R.dim
        self.id = identity(F, d)
        self.left = [R.left_mult_map({i: F.one}) for i in range(d)]
        self.right = [R.right_mult_map({i: F.one}) for i in range(d)]
        self._rcache: dict = {}
        self._lcache: dict = {}

    def right_by_basis(self, y: int) -> LinMap:
        """``x -> x (b_y1 (x) b_y2)``."""
        m = self._rcache.get(y)
        if m is None:
            d = self.R.dim
            m = self._rcache[y] = tensor(self.right[y // d], self.right[y % d])
        return m

    def left_by_basis(self, y: int) -> LinMap:
        m = self._lcache.get(y)
        if m is None:
            d = self.R.dim
            m = self._lcache[y] = tensor(self.left[y // d], self.left[y % d])
        return m

    def right_by(self, v: dict) -> LinMap:
        F = self.R.field
        dd = self.R.dim ** 2
        acc = LinMap.zero(F, dd, dd)
        for y, c in sorted(v.items()):
            acc = acc + self.right_by_basis(y).scale(c)
        return acc

    def r_tensor_one(self, r: int) -> LinMap:
        """``a (x) b -> r a (x) b``."""
        return tensor(self.left[r], self.id)

    def one_tensor_r(self, r: int) -> LinMap:
        """``a (x) b -> a (x) b r``."""
        return tensor(self.id, self.right[r])


def check_multiplier_law(R: AlgebraData, m: MultiplierPair) -> CheckReport:
    """``rho(x) y = x lam(y)`` for all basis ``x, y`` of ``R (x) R``."""
    d = R.dim
    dd = d * d
    ops = _TensorOps(R)
    for y in range(dd):
        lhs = ops.right_by_basis(y) @ m.rho
        rhs = ops.right_by(m.lam.column(y))
        c = lhs.first_difference(rhs)
        if c is not None:
            where = decode_index(c, (d, d)) + decode_index(y, (d, d))
            return CheckReport.failed("multiplier_law", Witness(where, lhs.column_vec(c), rhs.column_vec(c),
                                                                "rho(x) y != x lam(y)"))
    return CheckReport.passed("multiplier_law", f"checked {dd * dd} basis pairs")


def casimir_from_delta(B: FrobeniusBundle) -> MultiplierPair:
    """The multiplier ``e`` with ``e (s (x) r) = Delta(r)(s (x) 1)`` and
    ``(s (x) r) e = (1 (x) r) Delta(s)``."""
    pre = aggregate("casimir_prerequisites", [bundle_prerequisites(B), check_nondegenerate(B.algebra)])
    if not pre.ok:
        raise Refused("casimir needs a Frobenius bundle with non-degenerate multiplication", pre)
    R, C = B.algebra, B.coalgebra
    F, d = R.field, R.dim
    dd = d * d
    prods = R.products
    lam: dict = {}
    rho: dict = {}
    for s in range(d):
        for r in range(d):
            col = s * d + r
            lc: dict = {}
            for (r1, r2), c in C.coproducts.get(r, {}).items():
                for k, v in prods.get((r1, s), {}).items():
                    lc[k * d + r2] = lc.get(k * d + r2, 0) + c * v
            rc: dict = {}
            for (s1, s2), c in C.coproducts.get(s, {}).items():
                for k, v in prods.get((r, s2), {}).items():
                    rc[s1 * d + k] = rc.get(s1 * d + k, 0) + c * v
            lam[col] = lc
            rho[col] = rc
    m = MultiplierPair(LinMap.from_columns(F, dd, dd, lam), LinMap.from_columns(F, dd, dd, rho))
    law = check_multiplier_law(R, m)
    if not law.ok:
        raise Refused("constructed pair violates the multiplier law", law)
    return m


def _membership_solve(R: AlgebraData, m: MultiplierPair, side: str, rs: Sequence[int]) -> list[Vec | None]:
    F, d = R.field, R.dim
    dd = d * d
    ops = _TensorOps(R)
    targets = []
    for r in rs:
        if side == LEFT:
            targets.append(ops.r_tensor_one(r) @ m.lam)     # x -> (r (x) 1) lam(x)
        elif side == RIGHT:
            targets.append(ops.one_tensor_r(r) @ m.rho)     # x -> rho(x) (1 (x) r)
        else:
            raise UsageError(f"side must be {LEFT!r} or {RIGHT!r}")
    E = Echelon(F, dd, len(rs))
    for x in range(dd):
        # t x  (left side) or  x t  (right side), as a map of the unknown t
        op = ops.right_by_basis(x) if side == LEFT else ops.left_by_basis(x)
        cols = [t.column(x) for t in targets]
        keys = set(op.rows())
        for col in cols:
            keys.update(col)
        for o in sorted(keys):
            row = dict(op.row(o))
            for j, col in enumerate(cols):
                if o in col:
                    row[dd + j] = col[o]
            E.add(row)
    if E.rank < dd:
        raise DegeneracyLeak(f"membership system has rank {E.rank} < {dd}: multiplication is degenerate")
    out = []
    for j in range(len(rs)):
        x = E.solution(j)
        out.append(None if x is None else Vec.from_dict(F, dd, x))
    return out


def multiplier_to_element(B: FrobeniusBundle | AlgebraData, m: MultiplierPair, r: int, side: str) -> Vec | None:
    """The element ``(b_r (x) 1) e`` (side=left) or ``e (1 (x) b_r)`` (side=right) of
    ``R (x) R``, or None when it does not lie in ``R (x) R``."""
    R = B.algebra if isinstance(B, FrobeniusBundle) else B
    return _membership_solve(R, m, side, [r])[0]


def delta_from_casimir(R: AlgebraData, m: MultiplierPair, eps: Vec) -> tuple[CoalgebraData | None, CheckReport]:
    """Rebuild ``Delta(r) = (r (x) 1) e`` and verify it against ``e (1 (x) r)``,
    both counit laws, bimodule compatibility and coassociativity."""
    name = "delta_from_casimir"
    F, d = R.field, R.dim
    pre = aggregate("prerequisites", [check_nondegenerate(R), check_firm_algebra(R)[0]])
    if not pre.ok:
        return None, CheckReport.refused(name, f"algebra must be firm and non-degenerate ({pre.detail})",
                                         pre.witness)
    rs = list(range(d))
    lefts = _membership_solve(R, m, LEFT, rs)
    rights = _membership_solve(R, m, RIGHT, rs)
    for i in rs:
        if lefts[i] is None or rights[i] is None:
            return None, CheckReport.failed(name, Witness((i,), None, None,
                                                          f"e not in the ideal R⊗R at r = b_{i}"))
        if lefts[i] != rights[i]:
            return None, CheckReport.failed(name, Witness((i,), lefts[i], rights[i], "(r (x) 1) e != e (1 (x) r)"))
    triples = [(i, x // d, x % d, c) for i in rs for x, c in lefts[i].to_dict().items()]
    C = CoalgebraData(F, d, R.labels, tuple(triples), tuple(eps.entries))
    eps_map = LinMap.functional(eps)
    one = identity(F, d)
    parts = []
    for i in rs:
        b = Vec.basis(F, d, i)
        left_counit = tensor(eps_map, one).apply(lefts[i])
        right_counit = tensor(one, eps_map).apply(rights[i])
        if left_counit != b:
            parts.append(CheckReport.failed("counit_left", Witness((i,), b, left_counit,
                                                                   "(eps (x) id)((r (x) 1) e) != r")))
            break
        if right_counit != b:
            parts.append(CheckReport.failed("counit_right", Witness((i,), b, right_counit,
                                                                    "(id (x) eps)(e (1 (x) r)) != r")))
            break
    else:
        parts.append(CheckReport.passed("counit_laws"))
    parts.append(check_frobenius(FrobeniusBundle(R, C)))
    parts.append(check_coalgebra(C))
    return C, aggregate(name, parts)


def casimir_roundtrip_report(B: FrobeniusBundle) -> CheckReport:
    """``Delta -> e -> Delta'`` and ``e -> Delta -> e'`` must both be identities."""
    name = "casimir_roundtrip"
    try:
        m = casimir_from_delta(B)
    except Refused as exc:
        return CheckReport.refused(name, exc.reason, exc.report.witness if exc.report else None)
    C2, rep = delta_from_casimir(B.algebra, m, B.coalgebra.counit_vec)
    if C2 is None or not rep.ok:
        return aggregate(name, [rep])
    parts = [rep]
    if C2.comul != B.coalgebra.comul:
        diff = C2.comul_map.first_difference(B.coalgebra.comul_map)
        parts.append(CheckReport.failed("delta_roundtrip", Witness(
            (diff,), B.coalgebra.comul_map.column_vec(diff), C2.comul_map.column_vec(diff), "Delta' != Delta")))
    else:
        parts.append(CheckReport.passed("delta_roundtrip"))
        m2 = casimir_from_delta(FrobeniusBundle(B.algebra, C2))
        if m2 != m:
            parts.append(CheckReport.failed("casimir_roundtrip_e", Witness((), None, None, "e' != e")))
        else:
            parts.append(CheckReport.passed("casimir_roundtrip_e"))
    return aggregate(name, parts)


# -- sections ------------------------------------------------------------------


@timed
def section_check(B: FrobeniusBundle, n: LinMap) -> CheckReport:
    """``mu n = id`` and ``n(b_i b_j) = (b_i (x) 1) n(b_j)``."""
    F, d = B.field, B.dim
    if n.shape != (d * d, d):
        raise UsageError(f"section must be {d * d}x{d}, got {n.shape}")
    mu = B.algebra.mul_map
    one = identity(F, d)
    return aggregate("section", [
        compare_maps("right_inverse", mu @ n, one, (d,), "mu n != id"),
        compare_maps("bimodule_square", n @ mu, tensor(mu, one) @ tensor(one, n), (d, d),
                     "n(b_i b_j) != (b_i (x) 1) n(b_j)"),
    ])
