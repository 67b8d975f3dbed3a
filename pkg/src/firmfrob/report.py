"""Check reports with failure witnesses."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exactla import LinMap, Vec

PASS = "pass"
FAIL = "fail"
WINDOW = "window-verified"
REFUSED = "refused"


@dataclass
class Witness:
    """Where a check broke: a basis tuple plus the two sides that disagree."""

    where: tuple
    expected: Vec | None = None
    actual: Vec | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "where": list(self.where),
            "expected": None if self.expected is None else self.expected.format(),
            "actual": None if self.actual is None else self.actual.format(),
            "message": self.message,
        }


@dataclass
class CheckReport:
    name: str
    verdict: str
    witness: Witness | None = None
    detail: str = ""
    timing: float = 0.0
    provenance: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict == FAIL and self.witness is None:
            raise ValueError(f"failing report {self.name!r} needs a witness")

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, WINDOW)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, name: str, detail: str = "", **kw) -> CheckReport:
        return cls(name, PASS, detail=detail, **kw)

    @classmethod
    def failed(cls, name: str, witness: Witness, detail: str = "", **kw) -> CheckReport:
        return cls(name, FAIL, witness=witness, detail=detail or witness.message, **kw)

    @classmethod
    def refused(cls, name: str, reason: str, witness: Witness | None = None) -> CheckReport:
        return cls(name, REFUSED, witness=witness, detail=reason)

    def first_failure(self) -> CheckReport | None:
        if self.ok:
            return None
        for c in self.children:
            if not c.ok:
                return c.first_failure() or c
        return self

    def to_dict(self) -> dict:
        d = {
            "check": self.name,
            "verdict": self.verdict,
            "detail": self.detail,
            "timing": round(self.timing, 6),
        }
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        if self.provenance:
            d["provenance"] = dict(self.provenance)
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def __str__(self) -> str:
        s = f"[{self.verdict}] {self.name}"
        if self.detail:
            s += f": {self.detail}"
        if self.witness is not None and not self.ok:
            s += f" at {self.witness.where}"
        return s


def aggregate(name: str, children: Sequence[CheckReport], detail: str = "") -> CheckReport:
    """Combine sub-reports; the first non-passing child supplies the witness."""
    children = list(children)
    bad = next((c for c in children if not c.ok), None)
    if bad is None:
        verdict = WINDOW if any(c.verdict == WINDOW for c in children) else PASS
        return CheckReport(name, verdict, detail=detail, children=children)
    if bad.verdict == REFUSED and bad.witness is None:
        return CheckReport(name, REFUSED, detail=f"{bad.name}: {bad.detail}", children=children)
    w = bad.witness or Witness((), message=bad.detail)
    return CheckReport(name, FAIL, witness=w, detail=f"{bad.name}: {bad.detail}", children=children)


def timed(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.timing = time.perf_counter() - t0
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__qualname__ = fn.__qualname__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def decode_index(index: int, dims: Sequence[int]) -> tuple:
    """Row-major index into ``dims[0] (x) dims[1] (x) ...`` -> basis tuple."""
    out = []
    for d in reversed(dims):
        out.append(index % d)
        index //= d
    return tuple(reversed(out))


def compare_maps(name: str, lhs: LinMap, rhs: LinMap, dims: Sequence[int],
                 message: str = "", labels: Callable[[tuple], tuple] | None = None) -> CheckReport:
    """Pass iff ``lhs == rhs``; otherwise witness the lexicographically first basis tuple."""
    c = lhs.first_difference(rhs)
    if c is None:
        return CheckReport.passed(name)
    where = decode_index(c, dims)
    if labels is not None:
        where = labels(where)
    return CheckReport.failed(name, Witness(where, lhs.column_vec(c), rhs.column_vec(c),
                                            message or f"{name} violated"))
