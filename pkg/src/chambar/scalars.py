"""Scalars: exact elements of a cyclotomic field Q(zeta_m), or plain complex numbers.

An exact element is stored as an integer numerator vector over the power basis
``1, zeta, ..., zeta^(d-1)`` (``d = deg Phi_m``) together with one positive
common denominator.  Keeping integers instead of ``Fraction`` objects makes the
hot arithmetic (convolution plus a precomputed reduction table) cheap.

Approximate scalars are ordinary Python ``complex`` values; the helpers in this
module accept both kinds and refuse to mix them.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

from .errors import DivisionByZero, InputError, ModeMismatch

# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (coefficients low degree first, den monic)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        q, r = divmod(num[k + len(den) - 1], lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        out[k] = q
        if q:
            for i, c in enumerate(den):
                num[k + i] -= q * c
    if any(num[: len(den) - 1]):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def phi_m(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, lowest degree first.

    >>> phi_m(12)
    (1, 0, -1, 0, 1)
    """
    if m < 1:
        raise InputError(f"cyclotomic index must be positive, got {m}")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(phi_m(d)))
    return tuple(poly)


def phi_m_string(m: int, var: str = "t") -> str:
    """Human readable form, highest degree first (``t^4 - t^2 + 1`` for m = 12)."""
    parts = []
    coeffs = phi_m(m)
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = abs(c)
        body = str(mag) if (mag != 1 or k == 0) else ""
        body = body + mono
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


@lru_cache(maxsize=None)
def _field_data(m: int):
    """Degree and reduction table: row k gives zeta^k in the power basis, k < 2d - 1."""
    phi = phi_m(m)
    d = len(phi) - 1
    table = []
    for k in range(max(2 * d - 1, d + 1)):
        if k < d:
            row = [0] * d
            row[k] = 1
        else:
            prev = table[k - 1]
            # multiply previous row by zeta and reduce zeta^d = -sum phi_i zeta^i
            row = [0] + prev[:-1]
            top = prev[-1]
            if top:
                for i in range(d):
                    row[i] -= top * phi[i]
        table.append(row)
    return d, tuple(tuple(r) for r in table)


def _norm_m(m: int) -> int:
    # Q(zeta_2) = Q(zeta_1) = Q; keep a single label for the rationals.
    return 1 if m in (1, 2) else m


# ---------------------------------------------------------------------------
# the exact scalar
# ---------------------------------------------------------------------------


class Cyclo:
    """Element of Q(zeta_m) with zeta = exp(2 pi i / m)."""

    __slots__ = ("m", "num", "den")

    def __init__(self, m: int, num, den: int = 1, _normalized: bool = False):
        self.m = m
        if _normalized:
            self.num = num
            self.den = den
            return
        m = _norm_m(m)
        self.m = m
        d = _field_data(m)[0]
        num = list(num)
        if len(num) > d:
            num = _reduce(num, m)
        elif len(num) < d:
            num = num + [0] * (d - len(num))
        if den == 0:
            raise DivisionByZero("zero denominator")
        if den < 0:
            num = [-c for c in num]
            den = -den
        if den == 1:
            self.num = tuple(num)
            self.den = 1
            return
        g = math.gcd(den, *num)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self.num = tuple(num)
        self.den = den

    # -- constructors ------------------------------------------------------
    @classmethod
    def rational(cls, q, m: int = 1) -> "Cyclo":
        q = Fraction(q)
        m = _norm_m(m)
        d = _field_data(m)[0]
        return cls(m, (q.numerator,) + (0,) * (d - 1), q.denominator, _normalized=True)

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "Cyclo":
        """zeta_m ** k."""
        m0 = _norm_m(m)
        if m0 == 1:
            return cls.rational(1 if (m == 1 or k % 2 == 0) else -1)
        d, table = _field_data(m0)
        k %= m0
        if k < len(table):
            return cls(m0, table[k], 1)
        return cls.zeta(m0, 1) ** k

    @classmethod
    def from_fractions(cls, m: int, coeffs) -> "Cyclo":
        coeffs = [Fraction(c) for c in coeffs]
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(m, [int(c * den) for c in coeffs], den)

    # -- basic queries -----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.num)

    def coeffs(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.num]

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise InputError(f"{self!r} is not rational")
        return Fraction(self.num[0], self.den)

    def __complex__(self) -> complex:
        if self.m == 1:
            return complex(self.num[0] / self.den)
        z = cmath.exp(2j * math.pi / self.m)
        acc = 0j
        p = 1 + 0j
        for c in self.num:
            if c:
                acc += c * p
            p *= z
        return acc / self.den

    def __bool__(self) -> bool:
        return any(self.num)

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self.num[0], self.den))
        return hash((self.m, self.num, self.den))

    def __eq__(self, other) -> bool:
        if isinstance(other, Cyclo):
            if self.m != other.m:
                if self.is_rational() and other.is_rational():
                    return self.den == other.den and self.num[0] == other.num[0]
                return False
            return self.den == other.den and self.num == other.num
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __repr__(self) -> str:
        return f"Cyclo({self})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.num):
            if not c:
                continue
            q = Fraction(c, self.den)
            if k == 0:
                terms.append(str(q))
            else:
                mono = "z" if k == 1 else f"z^{k}"
                terms.append(mono if q == 1 else f"-{mono}" if q == -1 else f"({q})*{mono}")
        if not terms:
            return "0"
        text = " + ".join(terms).replace("+ -", "- ")
        return text if self.is_rational() else f"{text} [m={self.m}]"

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Cyclo":
        if isinstance(other, Cyclo):
            if other.m == self.m:
                return other
            if other.m == 1:
                return Cyclo.rational(Fraction(other.num[0], other.den), self.m)
            if self.m == 1:
                return other  # caller swaps
            raise ModeMismatch(
                f"cannot combine Q(zeta_{self.m}) with Q(zeta_{other.m}); re-embed explicitly"
            )
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return Cyclo.rational(other, self.m)
        if isinstance(other, bool):
            return Cyclo.rational(int(other), self.m)
        if isinstance(other, (float, complex)):
            raise ModeMismatch("cannot mix exact and approximate scalars")
        return NotImplemented

    def _lift(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return None, None
        a = self
        if a.m == 1 and o.m != 1:
            a = Cyclo.rational(Fraction(a.num[0], a.den), o.m)
        return a, o

    def __add__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        if a.den == b.den:
            num = [x + y for x, y in zip(a.num, b.num)]
            return Cyclo(a.m, num, a.den)
        num = [x * b.den + y * a.den for x, y in zip(a.num, b.num)]
        return Cyclo(a.m, num, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.m, tuple(-c for c in self.num), self.den, _normalized=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        if a.den == b.den:
            return Cyclo(a.m, [x - y for x, y in zip(a.num, b.num)], a.den)
        num = [x * b.den - y * a.den for x, y in zip(a.num, b.num)]
        return Cyclo(a.m, num, a.den * b.den)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        d = len(a.num)
        if d == 1:
            return Cyclo(a.m, (a.num[0] * b.num[0],), a.den * b.den)
        if b.is_rational():
            s = b.num[0]
            return Cyclo(a.m, [c * s for c in a.num], a.den * b.den)
        if a.is_rational():
            s = a.num[0]
            return Cyclo(a.m, [c * s for c in b.num], a.den * b.den)
        return Cyclo(a.m, _mul_reduce(a.num, b.num, a.m), a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            n = self.num[0]
            r = Cyclo.rational(Fraction(self.den, n), self.m)
            return r
        inv = _poly_inverse_mod_phi(self.coeffs(), self.m)
        return Cyclo.from_fractions(self.m, inv)

    def __truediv__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return b * a.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclo.rational(1, self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Cyclo":
        """Complex conjugate (zeta -> zeta^-1)."""
        if self.m == 1:
            return self
        acc = Cyclo.rational(0, self.m)
        for k, c in enumerate(self.num):
            if c:
                acc = acc + Cyclo.zeta(self.m, -k) * c
        return acc / self.den


def _reduce(num: list[int], m: int) -> list[int]:
    d, table = _field_data(m)
    out = list(num[:d])
    for k in range(d, len(num)):
        c = num[k]
        if not c:
            continue
        if k < len(table):
            row = table[k]
        else:
            # large powers: reduce zeta^k through k mod m first
            kk = k % m
            row = table[kk] if kk < len(table) else list(Cyclo.zeta(m, kk).num)
        for i in range(d):
            if row[i]:
                out[i] += c * row[i]
    return out


def _mul_reduce(a, b, m: int) -> list[int]:
    d, table = _field_data(m)
    conv = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    conv[i + j] += x * y
    out = conv[:d]
    for k in range(d, 2 * d - 1):
        c = conv[k]
        if c:
            row = table[k]
            for i in range(d):
                r = row[i]
                if r:
                    out[i] += c * r
    return out


def _poly_inverse_mod_phi(coeffs: list[Fraction], m: int) -> list[Fraction]:
    """Extended Euclid in Q[t]: find u with u * a = 1 mod Phi_m."""

    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    def divmod_poly(a, b):
        a = list(a)
        q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            k = len(a) - len(b)
            q[k] = f
            for i, c in enumerate(b):
                a[k + i] -= f * c
            trim(a)
        return trim(q), a

    def sub(p, q):
        n = max(len(p), len(q))
        return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])

    def mul(p, q):
        if not p or not q:
            return []
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return trim(out)

    r0 = [Fraction(c) for c in phi_m(m)]
    r1 = trim([Fraction(c) for c in coeffs])
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
    # r0 is the gcd, a nonzero constant because Phi_m is irreducible
    if len(r0) != 1:
        raise DivisionByZero("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


# ---------------------------------------------------------------------------
# helpers over both scalar kinds
# ---------------------------------------------------------------------------

Scalar = Union[Cyclo, complex]


def is_exact(s) -> bool:
    return isinstance(s, Cyclo)


def is_zero(s, tol: float = 0.0) -> bool:
    if isinstance(s, Cyclo):
        return s.is_zero()
    if isinstance(s, (int, Fraction)):
        return s == 0
    return abs(s) <= tol


def magnitude(s) -> float:
    return abs(complex(s))


def to_complex(s) -> complex:
    return complex(s)


def make_scalar(value, mode: str = "exact", m: int = 1):
    """Turn an int, Fraction, string, float or complex into a scalar of the given mode."""
    if mode == "approx":
        if isinstance(value, Cyclo):
            return complex(value)
        if isinstance(value, str):
            return complex(Fraction(value))
        return complex(value)
    if isinstance(value, Cyclo):
        if value.m == _norm_m(m) or value.m == 1:
            return value if value.m == _norm_m(m) else Cyclo.rational(value.as_fraction(), m)
        raise ModeMismatch(f"scalar lives in Q(zeta_{value.m}), requested m={m}")
    if isinstance(value, (float, complex)):
        raise ModeMismatch("float given where an exact scalar is required")
    return Cyclo.rational(Fraction(value), m)


def one_like(s):
    return Cyclo.rational(1, s.m) if isinstance(s, Cyclo) else 1 + 0j


def zero_like(s):
    return Cyclo.rational(0, s.m) if isinstance(s, Cyclo) else 0j


def common_field(values) -> int:
    """Smallest label m able to hold all exact values (rationals adapt to any field)."""
    m = 1
    for v in values:
        if isinstance(v, Cyclo) and v.m != 1:
            if m not in (1, v.m):
                raise ModeMismatch(f"values from Q(zeta_{m}) and Q(zeta_{v.m})")
            m = v.m
    return m


def imag_unit(m: int) -> Cyclo:
    """The element i of Q(zeta_m); needs 4 | m."""
    if m % 4:
        raise ModeMismatch(f"i is not in Q(zeta_{m})")
    return Cyclo.zeta(m, m // 4)


def sqrt_exact(a: Cyclo) -> Cyclo:
    """Square root inside the field when it is a rational square (or minus one, when i exists)."""
    from .errors import NotRepresentable

    if not a.is_rational():
        raise NotRepresentable(f"no exact square root available for {a}")
    q = a.as_fraction()
    sign = 1 if q >= 0 else -1
    q = abs(q)
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise NotRepresentable(f"{q} is not a rational square")
    root = Cyclo.rational(Fraction(rn, rd), a.m)
    if sign < 0:
        root = root * imag_unit(a.m)
    return root


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar_to_json(s) -> dict:
    if isinstance(s, Cyclo):
        return {"mode": "exact", "m": s.m, "coeffs": [[_frac_str(c), "0"] for c in s.coeffs()]}
    s = complex(s)
    return {"mode": "approx", "re": s.real, "im": s.imag}


def scalar_from_json(obj) -> Scalar:
    """Decode a scalar.  Also accepts bare numbers / strings as rationals for convenience."""
    if isinstance(obj, (int, str)):
        return Cyclo.rational(Fraction(obj))
    if isinstance(obj, float):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if not isinstance(obj, dict) or "mode" not in obj:
        raise InputError(f"malformed scalar: {obj!r}")
    if obj["mode"] == "approx":
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    if obj["mode"] != "exact":
        raise InputError(f"unknown scalar mode {obj['mode']!r}")
    m = int(obj.get("m", 1))
    acc = Cyclo.rational(0, m)
    for k, pair in enumerate(obj.get("coeffs", [])):
        if isinstance(pair, (list, tuple)):
            re = Fraction(pair[0])
            im = Fraction(pair[1]) if len(pair) > 1 else Fraction(0)
        else:
            re, im = Fraction(pair), Fraction(0)
        if re:
            acc = acc + Cyclo.zeta(m, k) * re
        if im:
            acc = acc + Cyclo.zeta(m, k) * imag_unit(_norm_m(m)) * im
    return acc
