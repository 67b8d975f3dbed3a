"""Non-unital algebras given by structure constants, and their basic checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import UsageError
from .exactla import (Echelon, LinMap, QuotientSpace, Vec, identity, kernel, quotient_by_rows,
                      rank, solve_many, tensor)
from .fields import FieldSpec
from .report import CheckReport, Witness, compare_maps, timed


def _canonical_triples(field: FieldSpec, dim: int, triples: Iterable, what: str,
                       bounds: Sequence[int]) -> tuple:
    seen = {}
    for t in triples:
        if len(t) != 4:
            raise UsageError(f"{what} entries are (i, j, k, c), got {t!r}")
        i, j, k, c = t
        key = (int(i), int(j), int(k))
        for x, b in zip(key, bounds):
            if not 0 <= x < b:
                raise UsageError(f"{what} index {key} out of range")
        if key in seen:
            raise UsageError(f"duplicate {what} entry {key}")
        seen[key] = field.coerce(c)
    return tuple(sorted((i, j, k, c) for (i, j, k), c in seen.items() if c))


def _check_labels(labels, dim: int) -> tuple:
    labels = tuple(str(x) for x in labels)
    if len(labels) != dim:
        raise UsageError(f"{len(labels)} labels for dimension {dim}")
    if len(set(labels)) != dim:
        raise UsageError("basis labels must be unique")
    return labels


@dataclass(frozen=True)
class AlgebraData:
    """``b_i * b_j = sum c * b_k`` for every triple ``(i, j, k, c)`` in ``mul``."""

    field: FieldSpec
    dim: int
    labels: tuple
    mul: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", _check_labels(self.labels, self.dim))
        d = self.dim
        object.__setattr__(self, "mul", _canonical_triples(self.field, d, self.mul, "mul", (d, d, d)))

    @classmethod
    def from_products(cls, field: FieldSpec, labels: Sequence[str], products: dict) -> AlgebraData:
        """Build from ``{(i, j): {k: c}}``."""
        triples = [(i, j, k, c) for (i, j), out in products.items() for k, c in out.items()]
        return cls(field, len(labels), tuple(labels), tuple(triples))

    @cached_property
    def products(self) -> dict:
        out: dict = {}
        for i, j, k, c in self.mul:
            out.setdefault((i, j), {})[k] = c
        return out

    @cached_property
    def mul_map(self) -> LinMap:
        d = self.dim
        return LinMap(self.field, d * d, d, [(k, i * d + j, c) for i, j, k, c in self.mul])

    def multiply(self, u: dict, v: dict) -> dict:
        """Product of two sparse vectors."""
        p = self.field.p
        prods = self.products
        acc: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                out = prods.get((i, j))
                if not out:
                    continue
                ab = a * b
                for k, c in out.items():
                    acc[k] = acc.get(k, 0) + ab * c
        if p is None:
            return {k: v for k, v in acc.items() if v}
        return {k: v % p for k, v in acc.items() if v % p}

    def mul_vec(self, u: Vec, v: Vec) -> Vec:
        return Vec.from_dict(self.field, self.dim, self.multiply(u.to_dict(), v.to_dict()))

    def left_mult_map(self, u: Vec | dict) -> LinMap:
        """``x -> u x``."""
        u = u.to_dict() if isinstance(u, Vec) else u
        cols = {j: self.multiply(u, {j: 1}) for j in range(self.dim)}
        return LinMap.from_columns(self.field, self.dim, self.dim, cols)

    def right_mult_map(self, u: Vec | dict) -> LinMap:
        """``x -> x u``."""
        u = u.to_dict() if isinstance(u, Vec) else u
        cols = {j: self.multiply({j: 1}, u) for j in range(self.dim)}
        return LinMap.from_columns(self.field, self.dim, self.dim, cols)

    def basis_vec(self, i: int) -> Vec:
        return Vec.basis(self.field, self.dim, i)

    def with_mul(self, triples: Iterable) -> AlgebraData:
        return replace(self, mul=tuple(triples))


@dataclass(frozen=True)
class LocalUnitFamily:
    elements: tuple
    max_subset_size: int = 2

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.max_subset_size < 1:
            raise UsageError("max_subset_size must be positive")


def tensor_algebra(R: AlgebraData, S: AlgebraData) -> AlgebraData:
    """``R (x) S`` with ``(r (x) s)(r' (x) s') = r r' (x) s s'``."""
    if R.field != S.field:
        raise UsageError("field mismatch")
    p = R.field.p
    e = S.dim
    prods: dict = {}
    for (i1, j1), out1 in R.products.items():
        for (i2, j2), out2 in S.products.items():
            tgt = {}
            for k1, c1 in out1.items():
                for k2, c2 in out2.items():
                    c = c1 * c2
                    tgt[k1 * e + k2] = c % p if p is not None else c
            prods[(i1 * e + i2, j1 * e + j2)] = tgt
    labels = [f"{a}|{b}" for a in R.labels for b in S.labels]
    return AlgebraData.from_products(R.field, labels, prods)


@timed
def check_associativity(R: AlgebraData) -> CheckReport:
    d, F = R.dim, R.field
    mu = R.mul_map
    one = identity(F, d)
    lhs = mu @ tensor(mu, one)
    rhs = mu @ tensor(one, mu)
    return compare_maps("associativity", lhs, rhs, (d, d, d),
                        "(b_i b_j) b_k != b_i (b_j b_k)")


def annihilator_maps(R: AlgebraData) -> tuple[LinMap, LinMap]:
    """``r -> (s -> s r)`` and ``r -> (s -> r s)``, flattened to ``R -> R (x) R``."""
    d = R.dim
    left, right = [], []
    for i, j, k, c in R.mul:
        # b_i b_j: contributes to s=b_i acting on r=b_j (left) and r=b_i on s=b_j (right)
        left.append((i * d + k, j, c))
        right.append((j * d + k, i, c))
    return LinMap(R.field, d, d * d, left), LinMap(R.field, d, d * d, right)


@timed
def check_nondegenerate(R: AlgebraData) -> CheckReport:
    left, right = annihilator_maps(R)
    for side, m in (("left", left), ("right", right)):
        ker = kernel(m)
        if ker:
            v = ker[0]
            msg = "s r = 0 for all s" if side == "left" else "r s = 0 for all s"
            return CheckReport.failed(
                "nondegenerate",
                Witness(tuple(v.support()), Vec.zero(R.field, R.dim), v, f"{side} annihilator nonzero: {msg}"))
    return CheckReport.passed("nondegenerate")


def firm_quotient(R: AlgebraData, m: int, action: LinMap) -> tuple[QuotientSpace, LinMap, LinMap]:
    """``A (x)_R R`` for a right module ``(k^m, action)``.

    Returns the quotient, the induced map to ``A`` and the relation map
    ``(alpha (x) R) - (A (x) mu)`` whose image is quotiented out.
    """
    F, d = R.field, R.dim
    relmap = tensor(action, identity(F, d)) - tensor(identity(F, m), R.mul_map)
    Q = quotient_by_rows(F, m * d, (col for _, col in sorted(relmap.columns().items())))
    induced = action @ Q.section
    return Q, induced, relmap


def firm_data(name: str, R: AlgebraData, m: int, action: LinMap,
              map_name: str = "induced action") -> tuple[CheckReport, QuotientSpace, LinMap | None]:
    """Firmness report, the quotient, and on success the section
    ``A -> A (x) R`` inverting the induced map."""
    F, d = R.field, R.dim
    Q, induced, relmap = firm_quotient(R, m, action)
    leak = action @ relmap
    if not leak.is_zero():
        c = min(leak.columns())
        rep = CheckReport.failed(name, Witness(
            (c // (d * d), (c // d) % d, c % d), Vec.zero(F, m), leak.column_vec(c),
            f"{map_name} does not factor through the balanced tensor product"))
        return rep, Q, None
    pre = solve_many(induced, [Vec.basis(F, m, i) for i in range(m)])
    for i, x in enumerate(pre):
        if x is None:
            e = Vec.basis(F, m, i)
            return CheckReport.failed(name, Witness((i,), e, None, f"{map_name} not surjective")), Q, None
    if Q.quotient_dim > m:
        lifted = Q.section.apply(kernel(induced)[0])
        return CheckReport.failed(name, Witness(tuple(lifted.support()), Vec.zero(F, m * d), lifted,
                                                f"{map_name} not injective")), Q, None
    inv = LinMap.from_columns(F, m, Q.quotient_dim, {i: x.to_dict() for i, x in enumerate(pre)})
    return CheckReport.passed(name, f"quotient dim {Q.quotient_dim} maps bijectively"), Q, Q.section @ inv


def firmness_report(name: str, R: AlgebraData, m: int, action: LinMap,
                    map_name: str = "induced action") -> tuple[CheckReport, QuotientSpace]:
    rep, Q, _ = firm_data(name, R, m, action, map_name)
    return rep, Q


def check_firm_algebra(R: AlgebraData) -> tuple[CheckReport, QuotientSpace]:
    t0 = time.perf_counter()
    rep, Q = firmness_report("firm_algebra", R, R.dim, R.mul_map, "μ̄")
    rep.timing = time.perf_counter() - t0
    return rep, Q


@timed
def verify_local_units(R: AlgebraData, E: LocalUnitFamily,
                       test_set: Sequence[Vec] | None = None) -> CheckReport:
    """Bounded certificate: every subset of ``test_set`` up to ``max_subset_size``
    is fixed on both sides by one member of ``E``."""
    name = "local_units"
    for idx, e in enumerate(E.elements):
        ee = R.mul_vec(e, e)
        if ee != e:
            return CheckReport.failed(name, Witness((idx,), e, ee, "local-unit candidate is not idempotent"))
    tests = list(test_set) if test_set is not None else [R.basis_vec(i) for i in range(R.dim)]
    fixes = []
    for e in E.elements:
        fixes.append(frozenset(i for i, r in enumerate(tests)
                               if R.mul_vec(e, r) == r and R.mul_vec(r, e) == r))
    k = E.max_subset_size
    for size in range(1, min(k, len(tests)) + 1):
        for S in combinations(range(len(tests)), size):
            if not any(f.issuperset(S) for f in fixes):
                r = tests[S[0]]
                return CheckReport.failed(name, Witness(S, r, None, f"no local unit fixes subset {S}"))
    return CheckReport.passed(name, f"local units verified up to subset size {k}",
                              provenance={"max_subset_size": k})


def find_unit(R: AlgebraData) -> Vec | None:
    """A two-sided unit, if one exists."""
    F, d = R.field, R.dim
    E = Echelon(F, d, 1)
    rows: dict = {}
    for i, j, k, c in R.mul:
        # u = sum u_x b_x; (u b_j)_k picks up u_i c, (b_i u)_k picks up u_j c
        left = rows.setdefault(("L", j, k), {})
        left[i] = left.get(i, 0) + c
        right = rows.setdefault(("R", i, k), {})
        right[j] = right.get(j, 0) + c
    for side in ("L", "R"):
        for j in range(d):
            for k in range(d):
                row = dict(rows.get((side, j, k), {}))
                if j == k:
                    row[d] = F.one
                if row:
                    E.add(row)
    x = E.solution(0)
    if x is None:
        return None
    return Vec.from_dict(F, d, x)


def _eigenvalues(T: LinMap) -> list:
    """Eigenvalues of a square map that lie in its base field, ascending."""
    import sympy
    from sympy.polys.matrices import DomainMatrix

    F = T.field
    n = T.domain_dim
    if n == 0:
        return []
    dense = T.to_dense()
    if F.p is None:
        dom = sympy.QQ
        M = DomainMatrix([[dom(int(v.numerator), int(v.denominator)) for v in row] for row in dense], (n, n), dom)
        cp = M.charpoly()
        x = sympy.Symbol("x")
        roots = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in cp], x,
                           domain=sympy.QQ).ground_roots()
        return sorted(Fraction(int(r.p), int(r.q)) for r in map(sympy.Rational, roots))
    dom = sympy.GF(F.p)
    M = DomainMatrix([[dom(int(v)) for v in row] for row in dense], (n, n), dom)
    cp = [int(c) % F.p for c in M.charpoly()]
    x = sympy.Symbol("x")
    roots = sympy.Poly(cp, x, modulus=F.p).ground_roots()
    return sorted({int(r) % F.p for r in roots})


def characters(R: AlgebraData) -> list[Vec]:
    """All nonzero algebra maps ``R -> k``, as value vectors on the basis.

    A character is a common eigen-functional of the right multiplications
    ``x -> x b_i`` with eigenvalues ``chi(b_i)``; the joint eigenspaces are
    intersected one operator at a time.
    """
    F, d = R.field, R.dim
    ops = [R.right_mult_map({i: F.one}).transpose() for i in range(d)]
    eig = [_eigenvalues(T) for T in ops]
    found: list[Vec] = []

    def rec(i: int, V: LinMap, lams: list):
        if i == d:
            if any(lams):
                found.append(Vec(F, lams))
            return
        for lam in eig[i]:
            shifted = ops[i] - identity(F, d).scale(lam)
            ker = kernel(shifted @ V)
            if not ker:
                continue
            W = V @ LinMap.from_columns(F, len(ker), V.domain_dim, {c: v.to_dict() for c, v in enumerate(ker)})
            rec(i + 1, W, lams + [lam])

    rec(0, identity(F, d), [])
    return found


def is_unital(R: AlgebraData) -> bool:
    return find_unit(R) is not None


def algebra_rank(R: AlgebraData) -> int:
    return rank(R.mul_map)
