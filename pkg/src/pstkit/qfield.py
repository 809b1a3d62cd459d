"""Exact arithmetic in real quadratic fields.

``QuadValue`` is ``x + y*sqrt(delta)`` with rational ``x, y`` and squarefree
``delta``.  ``ExactTime`` is ``c * pi / sqrt(delta)`` and ``UnitPhase`` is
``exp(i*pi*w)`` for an exponent ``w`` in a quadratic field, which is a root
of unity exactly when ``w`` is rational.  ``RadMatrix`` holds matrices whose
entries live in a multiquadratic field, so projectors belonging to different
quadratic fields can still be multiplied and compared exactly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath
import numpy as np

__all__ = [
    "squarefree_part",
    "v2",
    "odd_part",
    "QuadValue",
    "ExactTime",
    "UnitPhase",
    "phase_order",
    "RadMatrix",
]

Number = Union[int, Fraction, "QuadValue"]


@lru_cache(maxsize=4096)
def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(c, d)`` with ``n == c*c*d`` and ``d`` squarefree (trial division)."""
    if n <= 0:
        raise ValueError(f"squarefree_part needs a positive integer, got {n}")
    c, d, p = 1, 1, 2
    m = n
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        c *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    return c, d * m


def v2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("0 has no 2-adic valuation")
    n = abs(n)
    return (n & -n).bit_length() - 1


def odd_part(n: int) -> int:
    """Signed odd part: ``n == 2**v2(n) * odd_part(n)``."""
    return n >> v2(n) if n > 0 else -((-n) >> v2(n))


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class QuadValue:
    x: Fraction
    y: Fraction = Fraction(0)
    delta: int = 1

    def __post_init__(self):
        x, y, d = _frac(self.x), _frac(self.y), int(self.delta)
        if d < 1:
            raise ValueError("delta must be a positive integer")
        c, d = squarefree_part(d)
        y *= c
        if d == 1:
            x, y = x + y, Fraction(0)
        if y == 0:
            d = 1
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "delta", d)

    @classmethod
    def half(cls, a: int, b: int, delta: int) -> "QuadValue":
        """``(a + b*sqrt(delta)) / 2``."""
        return cls(Fraction(a, 2), Fraction(b, 2), delta)

    @staticmethod
    def coerce(v) -> "QuadValue":
        if isinstance(v, QuadValue):
            return v
        if isinstance(v, (int, Fraction, np.integer)):
            return QuadValue(Fraction(int(v)) if isinstance(v, np.integer) else _frac(v))
        raise TypeError(f"cannot use {type(v).__name__} as an exact quadratic value")

    # -- predicates ----------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.y == 0

    @property
    def is_integer(self) -> bool:
        return self.y == 0 and self.x.denominator == 1

    @property
    def is_pure_surd(self) -> bool:
        return self.x == 0

    def half_form(self):
        """``(a, b)`` with ``self == (a + b*sqrt(delta))/2`` if both are integers, else None."""
        a, b = 2 * self.x, 2 * self.y
        if a.denominator == 1 and b.denominator == 1:
            return int(a), int(b)
        return None

    # -- arithmetic ----------------------------------------------------------
    def _common(self, other) -> tuple["QuadValue", int]:
        o = QuadValue.coerce(other)
        if self.delta == o.delta or o.delta == 1:
            return o, self.delta
        if self.delta == 1:
            return o, o.delta
        raise ValueError(f"delta mismatch: sqrt({self.delta}) vs sqrt({o.delta})")

    def __add__(self, other):
        try:
            o, d = self._common(other)
        except TypeError:
            return NotImplemented
        return QuadValue(self.x + o.x, self.y + o.y, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadValue(-self.x, -self.y, self.delta)

    def __sub__(self, other):
        try:
            o = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return QuadValue.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        if self.delta != o.delta and self.delta != 1 and o.delta != 1:
            if self.is_pure_surd and o.is_pure_surd:
                # sqrt(a)*sqrt(b) = c*sqrt(d) with a*b = c^2 d
                c, d = squarefree_part(self.delta * o.delta)
                return QuadValue(0, self.y * o.y * c, d)
            raise ValueError(f"delta mismatch: sqrt({self.delta}) vs sqrt({o.delta})")
        d = max(self.delta, o.delta)
        return QuadValue(self.x * o.x + self.y * o.y * d, self.x * o.y + self.y * o.x, d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.x * self.x - self.y * self.y * self.delta

    def conj(self) -> "QuadValue":
        return QuadValue(self.x, -self.y, self.delta)

    def inverse(self) -> "QuadValue":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadValue(self.x / nm, -self.y / nm, self.delta)

    def __truediv__(self, other):
        try:
            o = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadValue.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QuadValue(Fraction(1)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order ---------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``x + y*sqrt(delta)`` by comparing squares."""
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0 or sx == sy:
            return sx if sx else sy
        if sx == 0:
            return sy
        lhs, rhs = self.x * self.x, self.y * self.y * self.delta
        return sx if lhs > rhs else sy

    def _cmp(self, other) -> int:
        o = QuadValue.coerce(other)
        if self.delta == o.delta or self.delta == 1 or o.delta == 1:
            return (self - o).sign()
        # r + p*sqrt(d1) + q*sqrt(d2) with d1 != d2
        r, p, q, d1, d2 = self.x - o.x, self.y, -o.y, self.delta, o.delta
        sp, sq = (p > 0) - (p < 0), (q > 0) - (q < 0)
        su = sp if sp == sq or p * p * d1 > q * q * d2 else sq
        sr = (r > 0) - (r < 0)
        if sr == 0 or sr == su:
            return su
        c, d = squarefree_part(d1 * d2)
        gap = QuadValue(r * r - p * p * d1 - q * q * d2, -2 * p * q * c, d)
        return sr if gap.sign() > 0 else su

    def __eq__(self, other):
        try:
            o = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self.x == o.x and self.y == o.y and self.delta == o.delta

    def __hash__(self):
        if self.y == 0:
            return hash(self.x)
        return hash((self.x, self.y, self.delta))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- conversion ----------------------------------------------------------
    def __float__(self):
        return float(self.to_mpf())

    def to_mpf(self, dps: int = 30):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.x.numerator) / self.x.denominator + \
                mpmath.mpf(self.y.numerator) / self.y.denominator * mpmath.sqrt(self.delta)

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        ys = "" if self.y == 1 else "-" if self.y == -1 else f"{self.y}*"
        s = f"{ys}sqrt({self.delta})"
        if self.x == 0:
            return s
        return f"{self.x}{'' if s.startswith('-') else '+'}{s}"

    def __repr__(self):
        return f"QuadValue({self})"


# -- times and phases ----------------------------------------------------------

_TIME_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*\*\s*pi\s*(?:/\s*sqrt\(\s*(\d+)\s*\))?\s*$")


@dataclass(frozen=True)
class ExactTime:
    """``coef * pi / sqrt(delta)`` with ``coef > 0``."""

    coef: Fraction
    delta: int = 1

    def __post_init__(self):
        coef = _frac(self.coef)
        if coef <= 0:
            raise ValueError("times must be positive")
        c, d = squarefree_part(int(self.delta))
        object.__setattr__(self, "coef", coef / c)
        object.__setattr__(self, "delta", d)

    @classmethod
    def of(cls, p: int, q: int = 1, delta: int = 1) -> "ExactTime":
        return cls(Fraction(p, q), delta)

    @classmethod
    def parse(cls, text: str) -> "ExactTime":
        """Parse ``"p/q*pi/sqrt(D)"``; the ``/q`` and ``/sqrt(D)`` parts are optional."""
        m = _TIME_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse time {text!r}; expected p/q*pi/sqrt(D)")
        p, q, d = m.groups()
        return cls(Fraction(int(p), int(q or 1)), int(d or 1))

    @property
    def p(self) -> int:
        return self.coef.numerator

    @property
    def q(self) -> int:
        return self.coef.denominator

    def __str__(self):
        return f"{self.p}/{self.q}*pi/sqrt({self.delta})"

    def __repr__(self):
        return f"ExactTime({self})"

    def to_float(self) -> float:
        # rounded once, from a 30-digit evaluation
        with mpmath.workdps(30):
            v = mpmath.mpf(self.p) / self.q * mpmath.pi / mpmath.sqrt(self.delta)
            return float(v)

    def __float__(self):
        return self.to_float()

    def __mul__(self, k):
        return ExactTime(self.coef * _frac(k), self.delta)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactTime):
            return self.ratio(other)
        return ExactTime(self.coef / _frac(other), self.delta)

    def ratio(self, other: "ExactTime"):
        """``self / other`` as a Fraction, or None when the ratio is irrational."""
        if self.delta != other.delta:
            return None
        return self.coef / other.coef

    def __lt__(self, other: "ExactTime"):
        return self.coef ** 2 * other.delta < other.coef ** 2 * self.delta

    def exponent(self, theta: Number) -> QuadValue:
        """``w`` with ``self * theta == pi * w``."""
        th = QuadValue.coerce(theta)
        d = self.delta
        if d == 1:
            return th * self.coef
        if th.delta in (1, d):
            # coef * (x + y sqrt(d)) / sqrt(d) = coef*y + coef*x/d * sqrt(d)
            return QuadValue(self.coef * th.y, self.coef * th.x / d, d)
        if th.is_pure_surd:
            c, dd = squarefree_part(th.delta * d)
            return QuadValue(0, self.coef * th.y * c / d, dd)
        raise ValueError(f"time over sqrt({d}) times eigenvalue over sqrt({th.delta}) leaves a quadratic field")


@dataclass(frozen=True)
class UnitPhase:
    """``exp(i*pi*exponent)``; the rational part of the exponent is reduced into [0, 2)."""

    exponent: QuadValue

    def __post_init__(self):
        w = QuadValue.coerce(self.exponent)
        x = w.x % 2
        object.__setattr__(self, "exponent", QuadValue(x, w.y, w.delta))

    @classmethod
    def of(cls, p: int, q: int = 1) -> "UnitPhase":
        return cls(QuadValue(Fraction(p, q)))

    @property
    def is_root_of_unity(self) -> bool:
        return self.exponent.is_rational

    @property
    def p(self) -> int:
        return self.exponent.x.numerator

    @property
    def q(self) -> int:
        return self.exponent.x.denominator

    def order(self) -> int:
        return phase_order(self)

    def __mul__(self, other: "UnitPhase") -> "UnitPhase":
        return UnitPhase(self.exponent + other.exponent)

    def __truediv__(self, other: "UnitPhase") -> "UnitPhase":
        return UnitPhase(self.exponent - other.exponent)

    def __neg__(self) -> "UnitPhase":
        return UnitPhase(self.exponent + 1)

    def __pow__(self, k: int) -> "UnitPhase":
        return UnitPhase(self.exponent * k)

    def conj(self) -> "UnitPhase":
        return UnitPhase(-self.exponent)

    def to_complex(self) -> complex:
        with mpmath.workdps(30):
            return complex(mpmath.expjpi(self.exponent.to_mpf()))

    def __complex__(self):
        return self.to_complex()

    def __str__(self):
        w = self.exponent
        if w.is_rational:
            return f"exp(i*pi*{self.p}/{self.q})"
        return f"exp(i*pi*({w}))"

    def __repr__(self):
        return f"UnitPhase({self})"

    _RE = re.compile(r"^exp\(i\*pi\*(-?\d+)/(\d+)\)$")

    @classmethod
    def parse(cls, text: str) -> "UnitPhase":
        m = cls._RE.match(text.strip())
        if not m:
            raise ValueError(f"cannot parse phase {text!r}")
        return cls.of(int(m.group(1)), int(m.group(2)))


def phase_order(lam: UnitPhase) -> int:
    """Smallest ``n >= 1`` with ``lam**n == 1``."""
    if not lam.is_root_of_unity:
        raise ValueError(f"{lam} is not a root of unity")
    p, q = lam.p, lam.q
    return 2 * q // math.gcd(p, 2 * q)


# -- exact matrices over multiquadratic fields ---------------------------------

def _obj(a) -> np.ndarray:
    a = np.asarray(a)
    return a if a.dtype == object else a.astype(np.int64).astype(object)


class RadMatrix:
    """Matrix ``sum_m parts[m] * sqrt(m) / den`` with integer arrays ``parts``."""

    __slots__ = ("parts", "den", "shape")

    def __init__(self, parts: dict, den: int = 1, shape=None):
        if den <= 0:
            raise ValueError("denominator must be positive")
        clean = {}
        for m, arr in parts.items():
            arr = np.asarray(arr, dtype=object)
            if shape is None:
                shape = arr.shape
            if any(v != 0 for v in arr.flat):
                clean[int(m)] = arr
        self.shape = tuple(shape)
        g = den
        for arr in clean.values():
            for v in arr.flat:
                g = math.gcd(g, int(v))
                if g == 1:
                    break
            if g == 1:
                break
        if g > 1:
            clean = {m: arr // g for m, arr in clean.items()}
            den //= g
        self.parts = clean
        self.den = den if clean else 1

    @classmethod
    def from_int(cls, a) -> "RadMatrix":
        return cls({1: _obj(a)}, 1, np.shape(a))

    @classmethod
    def identity(cls, n: int) -> "RadMatrix":
        return cls.from_int(np.eye(n, dtype=np.int64))

    @classmethod
    def combine(cls, coeffs: list, mats: list) -> "RadMatrix":
        """``sum_k coeffs[k] * mats[k]`` for QuadValue coefficients and integer matrices."""
        shape = np.shape(mats[0])
        qs = [QuadValue.coerce(c) for c in coeffs]
        den = 1
        for c in qs:
            den = den * c.x.denominator // math.gcd(den, c.x.denominator)
            den = den * c.y.denominator // math.gcd(den, c.y.denominator)
        parts: dict[int, np.ndarray] = {}
        for c, m in zip(qs, mats):
            mo = m if m.dtype == object else _obj(m)
            for rad, coef in ((1, c.x), (c.delta, c.y)):
                if coef == 0:
                    continue
                k = int(coef * den)
                parts[rad] = parts[rad] + k * mo if rad in parts else k * mo
        return cls(parts, den, shape)

    def _zero(self):
        return np.zeros(self.shape, dtype=object) * 0

    def _aligned(self, other: "RadMatrix"):
        den = self.den * other.den // math.gcd(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        return den, fa, fb

    def __add__(self, other: "RadMatrix") -> "RadMatrix":
        den, fa, fb = self._aligned(other)
        parts = {m: arr * fa for m, arr in self.parts.items()}
        for m, arr in other.parts.items():
            parts[m] = parts[m] + arr * fb if m in parts else arr * fb
        return RadMatrix(parts, den, self.shape)

    def __neg__(self) -> "RadMatrix":
        return RadMatrix({m: -arr for m, arr in self.parts.items()}, self.den, self.shape)

    def __sub__(self, other: "RadMatrix") -> "RadMatrix":
        return self + (-other)

    def scale(self, c: Number) -> "RadMatrix":
        c = QuadValue.coerce(c)
        den = c.x.denominator * c.y.denominator
        out: dict[int, np.ndarray] = {}
        for coef, rad in ((c.x, 1), (c.y, c.delta)):
            if coef == 0:
                continue
            k = int(coef * den)
            for m, arr in self.parts.items():
                f, r = squarefree_part(m * rad)
                out[r] = out[r] + (k * f) * arr if r in out else (k * f) * arr
        return RadMatrix(out, self.den * den, self.shape)

    def __matmul__(self, other: "RadMatrix") -> "RadMatrix":
        out: dict[int, np.ndarray] = {}
        for ma, a in self.parts.items():
            for mb, b in other.parts.items():
                f, r = squarefree_part(ma * mb)
                prod = a.dot(b)
                if f != 1:
                    prod = prod * f
                out[r] = out[r] + prod if r in out else prod
        return RadMatrix(out, self.den * other.den, (self.shape[0], other.shape[1]))

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, RadMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None

    def column_is_zero(self, j: int) -> bool:
        return all(v == 0 for arr in self.parts.values() for v in arr[:, j])

    def columns_equal(self, i: int, j: int, sign: int = 1) -> bool:
        return all(np.array_equal(arr[:, i], sign * arr[:, j]) for arr in self.parts.values())

    def entry(self, i: int, j: int) -> dict[int, Fraction]:
        return {m: Fraction(int(arr[i, j]), self.den) for m, arr in self.parts.items() if arr[i, j] != 0}

    def trace(self) -> dict[int, Fraction]:
        out = {}
        for m, arr in self.parts.items():
            t = sum(int(v) for v in np.diagonal(arr))
            if t:
                out[m] = Fraction(t, self.den)
        return out

    def rational_trace(self) -> Fraction:
        tr = self.trace()
        if set(tr) - {1}:
            raise ValueError("trace is irrational")
        return tr.get(1, Fraction(0))

    def radicands(self) -> set[int]:
        return set(self.parts)

    def to_float(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=float)
        for m, arr in self.parts.items():
            out += arr.astype(float) * math.sqrt(m)
        return out / self.den

    def __repr__(self):
        return f"<RadMatrix {self.shape} radicands={sorted(self.parts)} den={self.den}>"
