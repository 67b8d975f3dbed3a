"""Coalgebras by structure constants, the convolution dual, and the
co-Frobenius comparison maps ``C -> C*``."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

from .algcore import AlgebraData, _canonical_triples, _check_labels, characters
from .errors import Refused, UsageError
from .exactla import LinMap, Vec, identity, kernel, tensor
from .fields import FieldSpec
from .report import CheckReport, Witness, aggregate, compare_maps, timed


@dataclass(frozen=True)
class CoalgebraData:
    """``Delta(b_i) = sum c * b_j (x) b_k`` over triples ``(i, j, k, c)``; ``counit[i] = eps(b_i)``."""

    field: FieldSpec
    dim: int
    labels: tuple
    comul: tuple
    counit: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", _check_labels(self.labels, self.dim))
        d = self.dim
        object.__setattr__(self, "comul", _canonical_triples(self.field, d, self.comul, "comul", (d, d, d)))
        counit = self.counit.entries if isinstance(self.counit, Vec) else self.counit
        if len(counit) != d:
            raise UsageError(f"counit has {len(counit)} values for dimension {d}")
        object.__setattr__(self, "counit", tuple(self.field.coerce(x) for x in counit))

    @classmethod
    def from_coproducts(cls, field: FieldSpec, labels: Sequence[str], coproducts: dict,
                        counit: Sequence) -> CoalgebraData:
        """Build from ``{i: {(j, k): c}}``."""
        triples = [(i, j, k, c) for i, out in coproducts.items() for (j, k), c in out.items()]
        return cls(field, len(labels), tuple(labels), tuple(triples), tuple(counit))

    @cached_property
    def coproducts(self) -> dict:
        out: dict = {}
        for i, j, k, c in self.comul:
            out.setdefault(i, {})[(j, k)] = c
        return out

    @cached_property
    def comul_map(self) -> LinMap:
        d = self.dim
        return LinMap(self.field, d, d * d, [(j * d + k, i, c) for i, j, k, c in self.comul])

    @cached_property
    def counit_map(self) -> LinMap:
        return LinMap(self.field, self.dim, 1, [(0, i, c) for i, c in enumerate(self.counit)])

    @property
    def counit_vec(self) -> Vec:
        return Vec(self.field, self.counit)

    def with_comul(self, triples: Iterable) -> CoalgebraData:
        return replace(self, comul=tuple(triples))

    def with_counit(self, values: Sequence) -> CoalgebraData:
        return replace(self, counit=tuple(values))


@timed
def check_coalgebra(C: CoalgebraData) -> CheckReport:
    d, F = C.dim, C.field
    delta, eps = C.comul_map, C.counit_map
    one = identity(F, d)
    parts = [
        compare_maps("coassociativity", tensor(delta, one) @ delta, tensor(one, delta) @ delta, (d,),
                     "(Delta (x) id) Delta != (id (x) Delta) Delta"),
        compare_maps("counit_left", tensor(eps, one) @ delta, one, (d,), "(eps (x) id) Delta != id"),
        compare_maps("counit_right", tensor(one, eps) @ delta, one, (d,), "(id (x) eps) Delta != id"),
    ]
    return aggregate("coalgebra", parts)


def dual_convolution(C: CoalgebraData) -> AlgebraData:
    """The convolution algebra ``C*`` on the dual basis; its unit is the counit."""
    rep = check_coalgebra(C)
    if not rep.ok:
        raise Refused("not a coalgebra", rep)
    # (b_j* * b_k*)(b_i) = coefficient of b_j (x) b_k in Delta(b_i)
    triples = [(j, k, i, c) for i, j, k, c in C.comul]
    return AlgebraData(C.field, C.dim, tuple(f"{x}*" for x in C.labels), tuple(triples))


def grouplike_elements(C: CoalgebraData) -> list[Vec]:
    """All ``g`` with ``Delta(g) = g (x) g`` and ``eps(g) = 1``.

    These are exactly the characters of the convolution algebra, read back
    through the dual basis.
    """
    out = []
    F = C.field
    delta = C.comul_map
    for chi in characters(dual_convolution(C)):
        g = chi
        gg = tensor(LinMap.from_vec_column(g), LinMap.from_vec_column(g)).column_vec(0)
        if delta.apply(g) == gg and C.counit_map.apply(g)[0] == F.one:
            out.append(g)
    return out


def _bilinear_counit(B) -> list[list]:
    """Table ``eps(b_i b_j)``."""
    R, C = B.algebra, B.coalgebra
    F, d = R.field, R.dim
    z = F.zero
    t = [[z] * d for _ in range(d)]
    for i, j, k, c in R.mul:
        t[i][j] = F.add(t[i][j], F.mul(c, C.counit[k]))
    return t


def cofrobenius_maps(B) -> tuple[LinMap, LinMap, CheckReport]:
    """``theta_R(c) = eps(c -)`` and ``theta_L(c) = eps(- c)`` as maps ``C -> C*``.

    The report certifies theta_R as a right C*-module map and theta_L as a
    left one on all basis pairs, then tests injectivity of both.
    """
    from .frobcore import bundle_prerequisites

    pre = bundle_prerequisites(B)
    if not pre.ok:
        raise Refused("bundle fails algebra/coalgebra/Frobenius prerequisites", pre)
    R, C = B.algebra, B.coalgebra
    F, d = R.field, R.dim
    e = _bilinear_counit(B)
    theta_r = LinMap(F, d, d, [(j, i, e[i][j]) for i in range(d) for j in range(d)])
    theta_l = LinMap(F, d, d, [(j, i, e[j][i]) for i in range(d) for j in range(d)])
    Cstar = dual_convolution(C)
    parts = []

    # c <- phi = phi(c_1) c_2 and phi -> c = c_1 phi(c_2), for phi = b_k*
    def hit_right(k: int) -> LinMap:
        return LinMap(F, d, d, [(j2, i, c) for i, j1, j2, c in C.comul if j1 == k])

    def hit_left(k: int) -> LinMap:
        return LinMap(F, d, d, [(j1, i, c) for i, j1, j2, c in C.comul if j2 == k])

    for k in range(d):
        phi = {k: F.one}
        conv_right = Cstar.right_mult_map(phi)   # psi -> psi * phi
        conv_left = Cstar.left_mult_map(phi)     # psi -> phi * psi
        parts.append(compare_maps(f"theta_R right-linear (phi=b_{k}*)", theta_r @ hit_right(k),
                                  conv_right @ theta_r, (d,), "theta_R(c <- phi) != theta_R(c) * phi"))
        parts.append(compare_maps(f"theta_L left-linear (phi=b_{k}*)", theta_l @ hit_left(k),
                                  conv_left @ theta_l, (d,), "theta_L(phi -> c) != phi * theta_L(c)"))
    for name, th in (("theta_R injective", theta_r), ("theta_L injective", theta_l)):
        ker = kernel(th)
        if ker:
            parts.append(CheckReport.failed(name, Witness(tuple(ker[0].support()), Vec.zero(F, d), ker[0],
                                                          f"{name.split()[0]} has a kernel")))
        else:
            parts.append(CheckReport.passed(name))
    return theta_r, theta_l, aggregate("cofrobenius_maps", parts)


def check_anti_multiplicative(B) -> CheckReport:
    """``eps(c d_1) eps(c' d_2) = eps(c' c d)`` on all basis triples ``(c, c', d)``."""
    R, C = B.algebra, B.coalgebra
    F, d = R.field, R.dim
    e = _bilinear_counit(B)
    for c in range(d):
        for c2 in range(d):
            cc = R.multiply({c2: F.one}, {c: F.one})
            for x in range(d):
                lhs = F.zero
                for (j, k), v in C.coproducts.get(x, {}).items():
                    lhs = F.add(lhs, F.mul(v, F.mul(e[c][j], e[c2][k])))
                rhs = F.zero
                for y, v in cc.items():
                    rhs = F.add(rhs, F.mul(v, e[y][x]))
                if lhs != rhs:
                    return CheckReport.failed("anti_multiplicative", Witness(
                        (c, c2, x), Vec(F, [lhs]), Vec(F, [rhs]), "eps(c d_1) eps(c' d_2) != eps(c' c d)"))
    return CheckReport.passed("anti_multiplicative")
