"""Exact linear algebra over Q and GF(p).

Maps are stored as sparse rows (``{row: {col: scalar}}``) and reduced with an
incremental sparse Gaussian elimination whose pivot is always the lowest
remaining column index.  Because the set of leading columns of a row space is
an invariant, every solution, kernel basis and quotient section produced here
is canonical and reproducible.

Tensor products use the row-major convention: the basis tensor ``(i, j)`` of
``V (x) W`` sits at index ``i * dim(W) + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import UsageError
from .fields import FieldSpec


def _check_same_field(*fields: FieldSpec) -> FieldSpec:
    first = fields[0]
    for f in fields[1:]:
        if f != first:
            raise UsageError(f"field mismatch: {first} vs {f}")
    return first


def _clean(d: dict, p: int | None) -> dict:
    if p is None:
        return {k: v for k, v in d.items() if v}
    out = {}
    for k, v in d.items():
        v %= p
        if v:
            out[k] = v
    return out


class Vec:
    """An immutable vector of exact scalars."""

    __slots__ = ("field", "entries")

    def __init__(self, field: FieldSpec, entries: Iterable):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", tuple(field.coerce(x) for x in entries))

    def __setattr__(self, name, value):
        raise AttributeError("Vec is immutable")

    @classmethod
    def zero(cls, field: FieldSpec, dim: int) -> Vec:
        return cls(field, [0] * dim)

    @classmethod
    def basis(cls, field: FieldSpec, dim: int, i: int) -> Vec:
        e = [0] * dim
        e[i] = 1
        return cls(field, e)

    @classmethod
    def from_dict(cls, field: FieldSpec, dim: int, d: dict) -> Vec:
        e = [0] * dim
        for k, v in d.items():
            e[k] = v
        return cls(field, e)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {i: v for i, v in enumerate(self.entries) if v}

    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.entries) if v]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        if not isinstance(other, Vec):
            return NotImplemented
        return self.field == other.field and self.entries == other.entries

    def __hash__(self):
        return hash((self.field, self.entries))

    def __add__(self, other: Vec) -> Vec:
        F = _check_same_field(self.field, other.field)
        if self.dim != other.dim:
            raise UsageError("dimension mismatch")
        return Vec(F, [F.add(a, b) for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: Vec) -> Vec:
        F = _check_same_field(self.field, other.field)
        if self.dim != other.dim:
            raise UsageError("dimension mismatch")
        return Vec(F, [F.sub(a, b) for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> Vec:
        return Vec(self.field, [self.field.neg(a) for a in self.entries])

    def scale(self, s) -> Vec:
        s = self.field.coerce(s)
        return Vec(self.field, [self.field.mul(s, a) for a in self.entries])

    def format(self) -> list[str]:
        return [self.field.format_scalar(x) for x in self.entries]

    def __repr__(self):
        return f"Vec({self.field}, [{', '.join(self.format())}])"


class LinMap:
    """An immutable sparse linear map ``k^domain_dim -> k^codomain_dim``.

    ``entries`` are ``(row, col, scalar)`` triples: row indexes the codomain,
    col the domain, so composition reads right to left (``f @ g`` is f after g).
    """

    __slots__ = ("field", "domain_dim", "codomain_dim", "_rows", "_cols")

    def __init__(self, field: FieldSpec, domain_dim: int, codomain_dim: int, entries: Iterable = ()):
        rows: dict[int, dict] = {}
        for r, c, v in entries:
            if not (0 <= r < codomain_dim and 0 <= c < domain_dim):
                raise UsageError(f"entry ({r}, {c}) out of range for {codomain_dim}x{domain_dim} map")
            row = rows.setdefault(r, {})
            if c in row:
                raise UsageError(f"duplicate entry ({r}, {c})")
            row[c] = field.coerce(v)
        rows = {r: _clean(row, None) for r, row in rows.items()}
        self._init(field, domain_dim, codomain_dim, {r: row for r, row in rows.items() if row})

    def _init(self, field, domain_dim, codomain_dim, rows):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "domain_dim", domain_dim)
        object.__setattr__(self, "codomain_dim", codomain_dim)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_cols", None)

    def __setattr__(self, name, value):
        raise AttributeError("LinMap is immutable")

    @classmethod
    def _wrap(cls, field, domain_dim, codomain_dim, rows) -> LinMap:
        # Trusted constructor: rows hold canonical nonzero scalars only.
        m = cls.__new__(cls)
        m._init(field, domain_dim, codomain_dim, rows)
        return m

    @classmethod
    def from_rows(cls, field, domain_dim, codomain_dim, rows: dict) -> LinMap:
        p = field.p
        clean = {}
        for r, row in rows.items():
            row = _clean(row, p)
            if row:
                clean[r] = row
        return cls._wrap(field, domain_dim, codomain_dim, clean)

    @classmethod
    def from_columns(cls, field, domain_dim, codomain_dim, cols: dict) -> LinMap:
        rows: dict[int, dict] = {}
        for c, col in cols.items():
            for r, v in col.items():
                rows.setdefault(r, {})[c] = v
        return cls.from_rows(field, domain_dim, codomain_dim, rows)

    @classmethod
    def from_dense(cls, field, matrix: Sequence[Sequence]) -> LinMap:
        cod = len(matrix)
        dom = len(matrix[0]) if cod else 0
        rows = {r: {c: field.coerce(v) for c, v in enumerate(row)} for r, row in enumerate(matrix)}
        return cls.from_rows(field, dom, cod, rows)

    @classmethod
    def identity(cls, field, n: int) -> LinMap:
        one = field.one
        return cls._wrap(field, n, n, {i: {i: one} for i in range(n)})

    @classmethod
    def zero(cls, field, domain_dim: int, codomain_dim: int) -> LinMap:
        return cls._wrap(field, domain_dim, codomain_dim, {})

    @classmethod
    def from_vec_column(cls, v: Vec) -> LinMap:
        """The map ``k -> k^n`` sending 1 to ``v``."""
        return cls.from_columns(v.field, 1, v.dim, {0: v.to_dict()})

    @classmethod
    def functional(cls, v: Vec) -> LinMap:
        """The map ``k^n -> k`` given by pairing with ``v``."""
        return cls.from_rows(v.field, v.dim, 1, {0: v.to_dict()})

    # -- access ------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.codomain_dim, self.domain_dim)

    def entries(self) -> list[tuple]:
        return sorted((r, c, v) for r, row in self._rows.items() for c, v in row.items())

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def row(self, r: int) -> dict:
        return self._rows.get(r, {})

    def rows(self) -> dict:
        return self._rows

    def columns(self) -> dict:
        if self._cols is None:
            cols: dict[int, dict] = {}
            for r, row in self._rows.items():
                for c, v in row.items():
                    cols.setdefault(c, {})[r] = v
            object.__setattr__(self, "_cols", cols)
        return self._cols

    def column(self, c: int) -> dict:
        return self.columns().get(c, {})

    def column_vec(self, c: int) -> Vec:
        return Vec.from_dict(self.field, self.codomain_dim, self.column(c))

    def get(self, r: int, c: int):
        return self._rows.get(r, {}).get(c, self.field.zero)

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> list[list]:
        z = self.field.zero
        out = [[z] * self.domain_dim for _ in range(self.codomain_dim)]
        for r, row in self._rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    # -- arithmetic --------------------------------------------------------

    def apply_sparse(self, x: dict) -> dict:
        p = self.field.p
        cols = self.columns()
        acc: dict[int, object] = {}
        for c, xv in x.items():
            col = cols.get(c)
            if not col:
                continue
            for r, v in col.items():
                acc[r] = acc.get(r, 0) + v * xv
        return _clean(acc, p)

    def apply(self, v: Vec) -> Vec:
        _check_same_field(self.field, v.field)
        if v.dim != self.domain_dim:
            raise UsageError(f"cannot apply {self.shape} map to vector of dim {v.dim}")
        return Vec.from_dict(self.field, self.codomain_dim, self.apply_sparse(v.to_dict()))

    __call__ = apply

    def __matmul__(self, other: LinMap) -> LinMap:
        F = _check_same_field(self.field, other.field)
        if self.domain_dim != other.codomain_dim:
            raise UsageError(f"cannot compose {self.shape} after {other.shape}")
        p = F.p
        orows = other._rows
        out = {}
        for r, row in self._rows.items():
            acc: dict[int, object] = {}
            for k, v in row.items():
                orow = orows.get(k)
                if not orow:
                    continue
                for c, w in orow.items():
                    acc[c] = acc.get(c, 0) + v * w
            acc = _clean(acc, p)
            if acc:
                out[r] = acc
        return LinMap._wrap(F, other.domain_dim, self.codomain_dim, out)

    def _combine(self, other: LinMap, sign: int) -> LinMap:
        F = _check_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise UsageError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            tgt = rows.setdefault(r, {})
            for c, v in row.items():
                tgt[c] = tgt.get(c, 0) + sign * v
        return LinMap.from_rows(F, self.domain_dim, self.codomain_dim, rows)

    def __add__(self, other: LinMap) -> LinMap:
        return self._combine(other, 1)

    def __sub__(self, other: LinMap) -> LinMap:
        return self._combine(other, -1)

    def __neg__(self) -> LinMap:
        return self.scale(-1)

    def scale(self, s) -> LinMap:
        s = self.field.coerce(s)
        rows = {r: {c: v * s for c, v in row.items()} for r, row in self._rows.items()}
        return LinMap.from_rows(self.field, self.domain_dim, self.codomain_dim, rows)

    def transpose(self) -> LinMap:
        return LinMap._wrap(self.field, self.codomain_dim, self.domain_dim,
                            {c: dict(col) for c, col in self.columns().items()})

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self._rows == other._rows)

    __hash__ = None

    def first_difference(self, other: LinMap) -> int | None:
        """Lowest domain index whose image differs, or None when equal."""
        if self.shape != other.shape:
            raise UsageError(f"shape mismatch {self.shape} vs {other.shape}")
        a, b = self.columns(), other.columns()
        diff = [c for c in set(a) | set(b) if a.get(c, {}) != b.get(c, {})]
        return min(diff) if diff else None

    def __repr__(self):
        return f"LinMap({self.field}, {self.codomain_dim}x{self.domain_dim}, nnz={self.nnz})"


# -- elimination -------------------------------------------------------------


class Echelon:
    """Incremental sparse row reduction of ``[A | B]``.

    Columns ``0 .. ncols-1`` are coefficient columns; ``ncols .. ncols+nrhs-1``
    carry right-hand sides along.  Pivots are chosen at the lowest coefficient
    column of each reduced row.
    """

    def __init__(self, field: FieldSpec, ncols: int, nrhs: int = 0):
        self.field = field
        self.ncols = ncols
        self.nrhs = nrhs
        self.pivots: dict[int, dict] = {}
        self.inconsistent: set[int] = set()
        self._full = True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        p = self.field.p
        n = self.ncols
        pivots = self.pivots
        row = dict(row)
        while row:
            c = min(row)
            if c >= n:
                break
            prow = pivots.get(c)
            if prow is None:
                break
            f = row[c]
            if p is None:
                for k, v in prow.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            else:
                for k, v in prow.items():
                    nv = (row.get(k, 0) - f * v) % p
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        return row

    def add(self, row: dict) -> int | None:
        """Insert a row; return its new pivot column, or None if it was dependent."""
        row = self.reduce(_clean(row, self.field.p))
        if not row:
            return None
        c = min(row)
        if c >= self.ncols:
            self.inconsistent.update(k - self.ncols for k in row)
            return None
        F = self.field
        f = F.inv(row[c])
        if f != 1:
            row = {k: F.mul(v, f) for k, v in row.items()}
        self.pivots[c] = row
        self._full = False
        return c

    def fully_reduce(self) -> None:
        """Back-substitute so every pivot column is zero outside its own row."""
        if self._full:
            return
        p = self.field.p
        pivots = self.pivots
        for c in sorted(pivots, reverse=True):
            row = pivots[c]
            for k in [k for k in row if k != c and k in pivots]:
                f = row.get(k)
                if not f:
                    continue
                for kk, v in pivots[k].items():
                    nv = row.get(kk, 0) - f * v
                    if p is not None:
                        nv %= p
                    if nv:
                        row[kk] = nv
                    else:
                        row.pop(kk, None)
        self._full = True

    def solution(self, j: int = 0) -> dict | None:
        """Solution for right-hand side ``j`` with all free variables zero."""
        if j in self.inconsistent:
            return None
        self.fully_reduce()
        key = self.ncols + j
        return {c: row[key] for c, row in self.pivots.items() if key in row}

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ncols) if c not in self.pivots]

    def nullspace(self) -> list[dict]:
        self.fully_reduce()
        F = self.field
        out = []
        for f in self.free_columns():
            x = {f: F.one}
            for c, row in self.pivots.items():
                v = row.get(f)
                if v:
                    x[c] = F.neg(v)
            out.append(x)
        return out

    def basis_rows(self) -> list[dict]:
        self.fully_reduce()
        return [{k: v for k, v in self.pivots[c].items() if k < self.ncols}
                for c in sorted(self.pivots)]


def _echelon_of(A: LinMap, rhs: Sequence[Vec] = ()) -> Echelon:
    n = A.domain_dim
    E = Echelon(A.field, n, len(rhs))
    rhs_d = [b.to_dict() for b in rhs]
    for r in range(A.codomain_dim):
        row = dict(A.row(r))
        for j, b in enumerate(rhs_d):
            if r in b:
                row[n + j] = b[r]
        if row:
            E.add(row)
    return E


def solve(A: LinMap, b: Vec) -> Vec | None:
    """Exact ``x`` with ``A x = b`` (free variables set to zero), or None."""
    _check_same_field(A.field, b.field)
    if b.dim != A.codomain_dim:
        raise UsageError(f"rhs has dim {b.dim}, map codomain is {A.codomain_dim}")
    x = _echelon_of(A, [b]).solution(0)
    if x is None:
        return None
    return Vec.from_dict(A.field, A.domain_dim, x)


def solve_many(A: LinMap, rhs: Sequence[Vec]) -> list[Vec | None]:
    for b in rhs:
        _check_same_field(A.field, b.field)
        if b.dim != A.codomain_dim:
            raise UsageError(f"rhs has dim {b.dim}, map codomain is {A.codomain_dim}")
    E = _echelon_of(A, rhs)
    out = []
    for j in range(len(rhs)):
        x = E.solution(j)
        out.append(None if x is None else Vec.from_dict(A.field, A.domain_dim, x))
    return out


def kernel(A: LinMap) -> list[Vec]:
    """Basis of ``{x : A x = 0}``; empty exactly when A is injective."""
    E = _echelon_of(A)
    return [Vec.from_dict(A.field, A.domain_dim, x) for x in E.nullspace()]


def rank(A: LinMap) -> int:
    return _echelon_of(A).rank


def inverse(A: LinMap) -> LinMap:
    if A.domain_dim != A.codomain_dim:
        raise UsageError("only square maps are invertible")
    n = A.domain_dim
    F = A.field
    E = Echelon(F, n, n)
    for r in range(n):
        row = dict(A.row(r))
        row[n + r] = F.one
        E.add(row)
    if E.rank < n:
        raise UsageError("map is singular")
    cols = {j: E.solution(j) for j in range(n)}
    return LinMap.from_columns(F, n, n, cols)


def span_basis(field: FieldSpec, dim: int, vectors: Iterable[Vec]) -> list[Vec]:
    """Reduced row-echelon basis of the span of ``vectors``."""
    E = Echelon(field, dim)
    for v in vectors:
        _check_same_field(field, v.field)
        E.add(v.to_dict())
    return [Vec.from_dict(field, dim, r) for r in E.basis_rows()]


def tensor(f: LinMap, g: LinMap) -> LinMap:
    """Kronecker product with ``(i, j) -> i * dim_g + j`` on both sides."""
    F = _check_same_field(f.field, g.field)
    gd, gc = g.domain_dim, g.codomain_dim
    p = F.p
    rows = {}
    for r1, row1 in f.rows().items():
        for r2, row2 in g.rows().items():
            out = {}
            for c1, v1 in row1.items():
                base = c1 * gd
                for c2, v2 in row2.items():
                    w = v1 * v2
                    out[base + c2] = w % p if p is not None else w
            rows[r1 * gc + r2] = out
    return LinMap._wrap(F, f.domain_dim * gd, f.codomain_dim * gc, rows)


def identity(field: FieldSpec, n: int) -> LinMap:
    return LinMap.identity(field, n)


def swap(field: FieldSpec, m: int, n: int) -> LinMap:
    """The flip ``V (x) W -> W (x) V`` for dim V = m, dim W = n."""
    one = field.one
    return LinMap._wrap(field, m * n, m * n,
                        {j * m + i: {i * n + j: one} for i in range(m) for j in range(n)})


def direct_sum(f: LinMap, g: LinMap) -> LinMap:
    F = _check_same_field(f.field, g.field)
    rows = {r: dict(row) for r, row in f.rows().items()}
    for r, row in g.rows().items():
        rows[r + f.codomain_dim] = {c + f.domain_dim: v for c, v in row.items()}
    return LinMap._wrap(F, f.domain_dim + g.domain_dim, f.codomain_dim + g.codomain_dim, rows)


@dataclass(frozen=True)
class QuotientSpace:
    """``k^ambient_dim / span(relations)`` with a chosen projection and section.

    The quotient coordinates are the non-pivot columns of the reduced relation
    matrix, so ``section`` maps quotient basis vector q to the ambient basis
    vector it stands for.
    """

    ambient_dim: int
    relations: tuple
    quotient_dim: int
    projection: LinMap
    section: LinMap
    free_columns: tuple


def quotient_by_span(ambient_dim: int, relations: Sequence[Vec], field: FieldSpec | None = None) -> QuotientSpace:
    if field is None:
        if not relations:
            raise UsageError("an empty relation list needs an explicit field")
        field = relations[0].field
    for v in relations:
        _check_same_field(field, v.field)
        if v.dim != ambient_dim:
            raise UsageError(f"relation of dim {v.dim} in ambient dim {ambient_dim}")
    return quotient_by_rows(field, ambient_dim, (v.to_dict() for v in relations))


def quotient_by_rows(field: FieldSpec, ambient_dim: int, rows: Iterable[dict]) -> QuotientSpace:
    """Like :func:`quotient_by_span` for sparse relation rows; ``relations`` holds
    the reduced basis of their span."""
    E = Echelon(field, ambient_dim)
    for row in rows:
        E.add(row)
    E.fully_reduce()
    free = E.free_columns()
    q = {c: i for i, c in enumerate(free)}
    proj_cols = {c: {q[c]: field.one} for c in free}
    for c, row in E.pivots.items():
        col = {q[k]: field.neg(v) for k, v in row.items() if k != c}
        if col:
            proj_cols[c] = col
    projection = LinMap.from_columns(field, ambient_dim, len(free), proj_cols)
    section = LinMap.from_columns(field, len(free), ambient_dim, {i: {c: field.one} for c, i in q.items()})
    basis = tuple(Vec.from_dict(field, ambient_dim, row) for row in E.basis_rows())
    return QuotientSpace(ambient_dim, basis, len(free), projection, section, tuple(free))
