"""Exact scalar fields: the rationals and prime fields GF(p)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import ParseError, UsageError

RATIONALS = "rationals"
PRIME = "prime"

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")
_DIGITS_RE = re.compile(r"^\d+$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A scalar domain. Rationals are ``Fraction``; GF(p) elements are ints in [0, p)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.p is not None:
                raise UsageError("the rational field takes no modulus")
        elif self.kind == PRIME:
            if self.p is None or not (2 <= self.p < 2**31) or not _is_prime(self.p):
                raise UsageError(f"GF(p) needs a prime 2 <= p < 2**31, got {self.p!r}")
        else:
            raise UsageError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls(RATIONALS)

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(PRIME, int(p))

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Accept ``q``/``Q``/``QQ`` or ``p``, ``GF(p)``, ``F_p``."""
        t = str(text).strip()
        if t.lower() in ("q", "qq", "rationals"):
            return cls.rationals()
        m = re.fullmatch(r"(?:GF\(|F_?)?(\d+)\)?", t, flags=re.IGNORECASE)
        if m is None:
            raise UsageError(f"cannot parse field descriptor {text!r}")
        return cls.prime(int(m.group(1)))

    def __str__(self) -> str:
        return "Q" if self.kind == RATIONALS else f"GF({self.p})"

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == RATIONALS else self.p

    # -- scalars -----------------------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def coerce(self, x: Any):
        """Bring an int, Fraction or scalar string into canonical form."""
        if isinstance(x, str):
            return self.parse_scalar(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise UsageError(f"{x} has no image in {self}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def neg(self, a):
        return -a if self.p is None else -a % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.p is None else pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def format_scalar(self, x) -> str:
        if self.p is None:
            x = Fraction(x)
            return f"{x.numerator}/{x.denominator}"
        return str(int(x) % self.p)

    def parse_scalar(self, s: str):
        if not isinstance(s, str):
            raise ParseError(f"scalar must be a string, got {s!r}")
        if self.p is None:
            m = _RATIONAL_RE.match(s)
            if m is None:
                raise ParseError(f"malformed rational {s!r}")
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ParseError(f"zero denominator in {s!r}")
            return Fraction(int(m.group(1)), den)
        if not _DIGITS_RE.match(s):
            raise ParseError(f"malformed GF({self.p}) scalar {s!r}")
        v = int(s)
        if v >= self.p:
            raise ParseError(f"GF({self.p}) scalar {s!r} not in [0, {self.p})")
        return v

    def random_element(self, rng, nonzero: bool = False, bound: int = 3):
        """A small random scalar; rationals draw numerators/denominators up to ``bound``."""
        while True:
            if self.p is None:
                x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            else:
                x = rng.randrange(self.p)
            if x or not nonzero:
                return x

    def to_dict(self) -> dict:
        if self.p is None:
            return {"kind": RATIONALS}
        return {"kind": PRIME, "p": self.p}

    @classmethod
    def from_dict(cls, d: Any) -> FieldSpec:
        if not isinstance(d, dict) or "kind" not in d:
            raise ParseError("field descriptor must be an object with a 'kind' key")
        try:
            if d["kind"] == RATIONALS:
                return cls.rationals()
            if d["kind"] == PRIME:
                return cls.prime(int(d["p"]))
        except (KeyError, TypeError, ValueError, UsageError) as exc:
            raise ParseError(f"bad field descriptor: {exc}") from None
        raise ParseError(f"unknown field kind {d['kind']!r}")


QQ = FieldSpec.rationals()


def GF(p: int) -> FieldSpec:
    return FieldSpec.prime(p)
