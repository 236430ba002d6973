"""Exact arithmetic in a real quadratic field Q(sqrt d)."""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

_NUM = r"[+-]?\d+(?:/\d+)?"
_PATTERN = re.compile(
    rf"^\s*(?:(?P<p>{_NUM})(?![\d/]*\s*\*?\s*sqrt))?\s*"
    rf"(?:(?P<q>[+-]\s*(?:\d+(?:/\d+)?)?|(?<=^)(?:\d+(?:/\d+)?)?)\s*\*?\s*sqrt\(\s*(?P<d>\d+)\s*\))?\s*$"
)


def is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class QuadNumber:
    """``p + q sqrt(d)`` with rational ``p, q`` and square-free ``d >= 2``.

    Numbers with ``q = 0`` are plain rationals and combine with any ``d``.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p=0, q=0, d: int = 2):
        d = int(d)
        if not is_squarefree(d):
            raise ValueError(f"d must be a square-free integer >= 2, got {d}")
        self.p = _frac(p)
        self.q = _frac(q)
        self.d = d

    # construction helpers ------------------------------------------------
    @classmethod
    def coerce(cls, x, d: int = 2) -> "QuadNumber":
        if isinstance(x, QuadNumber):
            return x
        if isinstance(x, str):
            return cls.parse(x, d)
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return cls(x[0], x[1], d)
        return cls(_frac(x), 0, d)

    @classmethod
    def sqrt(cls, d: int) -> "QuadNumber":
        return cls(0, 1, d)

    @classmethod
    def parse(cls, text: str, d: int = 2) -> "QuadNumber":
        """Read ``"p/q"``, ``"r/s*sqrt(d)"`` or ``"p/q+r/s*sqrt(d)"``."""
        m = _PATTERN.match(text)
        if not m or (m.group("p") is None and m.group("d") is None):
            raise ValueError(f"not a quadratic number: {text!r}")
        p = Fraction(m.group("p")) if m.group("p") else Fraction(0)
        if m.group("d") is None:
            return cls(p, 0, d)
        qs = (m.group("q") or "").replace(" ", "")
        q = Fraction(1) if qs in ("", "+") else Fraction(-1) if qs == "-" else Fraction(qs)
        return cls(p, q, int(m.group("d")))

    # arithmetic -------------------------------------------------------------
    def _join(self, other) -> tuple["QuadNumber", int]:
        o = other if isinstance(other, QuadNumber) else QuadNumber(_frac(other), 0, self.d)
        if o.d == self.d or o.q == 0:
            return o, self.d
        if self.q == 0:
            return o, o.d
        raise ValueError(f"mixing Q(sqrt {self.d}) and Q(sqrt {o.d})")

    def __add__(self, other):
        try:
            o, d = self._join(other)
        except TypeError:
            return NotImplemented
        return QuadNumber(self.p + o.p, self.q + o.q, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o, d = self._join(other)
        except TypeError:
            return NotImplemented
        return QuadNumber(self.p - o.p, self.q - o.q, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o, d = self._join(other)
        except TypeError:
            return NotImplemented
        return QuadNumber(self.p * o.p + self.q * o.q * d, self.p * o.q + self.q * o.p, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return QuadNumber(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        try:
            o, _ = self._join(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadNumber.coerce(other, self.d) * self.inverse() if not isinstance(other, float) else NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = QuadNumber(1, 0, self.d)
        for _ in range(abs(k)):
            out = out * base
        return out

    # order ------------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``p + q sqrt d`` by comparing ``p^2`` with ``q^2 d``."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        diff = self.p * self.p - self.q * self.q * self.d
        return sp if diff > 0 else sq if diff < 0 else 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if isinstance(other, float):
            return NotImplemented
        try:
            o, _ = self._join(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        # rationals hash like the Fraction they equal
        return hash(self.p) if not self.q else hash((self.p, self.q, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return bool(self.p or self.q)

    def floor(self) -> int:
        n = math.floor(float(self))
        while QuadNumber(n, 0, self.d) > self:
            n -= 1
        while QuadNumber(n + 1, 0, self.d) <= self:
            n += 1
        return n

    def is_rational(self) -> bool:
        return self.q == 0

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    # rendering ------------------------------------------------------------
    def __str__(self):
        if self.q == 0:
            return str(self.p)
        q = "" if abs(self.q) == 1 else f"{abs(self.q)}*"
        rad = f"{q}sqrt({self.d})"
        if self.p == 0:
            return rad if self.q > 0 else f"-{rad}"
        return f"{self.p}{'+' if self.q > 0 else '-'}{rad}"

    def __repr__(self):
        return f"QuadNumber({str(self)!r})"

    def to_pair(self) -> list[str]:
        return [str(self.p), str(self.q)]
