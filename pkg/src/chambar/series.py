"""Truncated multivariate Taylor jets, algebraic expansions and constant-coefficient operators.

A :class:`Jet` stores the coefficients of ``f(x0 + u)`` as a sparse map from
exponent tuples (in ``u``) to scalars.  ``order`` is the certified truncation
degree: every coefficient of total degree ``<= order`` is known exactly and
nothing is claimed beyond.  ``order is None`` marks an exact polynomial, i.e.
all omitted coefficients are genuinely zero.

Order bookkeeping:

* sums and products keep the smaller order,
* a partial derivative lowers the order by one,
* composition keeps the smallest order among the outer jet and the inner ones.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import BasepointMismatch, DivisionByZero, InputError, NotAUnit, SingularBasepoint
from .scalars import Cyclo, is_zero, magnitude, make_scalar, scalar_from_json, scalar_to_json

Exp = tuple


def _min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def graded_key(e: Exp):
    """Graded order with x_1 first inside each degree."""
    return (sum(e), tuple(-k for k in e))


def _same_base(a: tuple, b: tuple) -> bool:
    if a is b:
        return True
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, Cyclo) != isinstance(y, Cyclo):
            return False
        if x != y:
            return False
    return True


class Jet:
    __slots__ = ("nvars", "base", "terms", "order")

    def __init__(self, nvars: int, base: Sequence, terms: dict, order: Optional[int] = None):
        self.nvars = nvars
        self.base = tuple(base)
        if len(self.base) != nvars:
            raise InputError(f"basepoint has {len(self.base)} entries, expected {nvars}")
        self.terms = terms
        self.order = order

    # -- construction ------------------------------------------------------
    @staticmethod
    def origin(nvars: int, mode: str = "exact") -> tuple:
        return tuple(make_scalar(0, mode) for _ in range(nvars))

    @classmethod
    def zero(cls, nvars, base, order=None) -> "Jet":
        return cls(nvars, base, {}, order)

    @classmethod
    def constant(cls, c, nvars, base, order=None) -> "Jet":
        terms = {} if is_zero(c) else {(0,) * nvars: c}
        return cls(nvars, base, terms, order)

    @classmethod
    def variable(cls, i: int, nvars: int, base, order=None) -> "Jet":
        """The coordinate function x_i (exact unless an order is requested)."""
        base = tuple(base)
        e = [0] * nvars
        e[i] = 1
        terms = {tuple(e): _one_for(base[i])}
        if not is_zero(base[i]):
            terms[(0,) * nvars] = base[i]
        return cls(nvars, base, terms, order)

    @classmethod
    def from_poly(cls, nvars: int, poly: dict, mode: str = "exact", m: int = 1) -> "Jet":
        """Exact polynomial at the origin from ``{exponent: value}``."""
        terms = {}
        for e, c in poly.items():
            c = make_scalar(c, mode, m) if not isinstance(c, (Cyclo, complex)) else c
            if not is_zero(c):
                terms[tuple(e)] = c
        base = tuple(make_scalar(0, mode, m) for _ in range(nvars))
        return cls(nvars, base, terms, None)

    # -- queries -----------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.order is None

    def coeff(self, e: Exp):
        return self.terms.get(tuple(e), 0)

    def const_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(c, tol) for c in self.terms.values())

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: graded_key(kv[0]))

    def is_exact_scalars(self) -> bool:
        probe = list(self.terms.values()) + list(self.base)
        return all(isinstance(c, Cyclo) for c in probe)

    def max_coeff(self) -> float:
        return max((magnitude(c) for c in self.terms.values()), default=0.0)

    def __repr__(self):
        shown = " + ".join(f"({c})*u^{list(e)}" for e, c in self.sorted_terms()[:8])
        tail = " ..." if len(self.terms) > 8 else ""
        o = "exact" if self.exact else f"O({self.order + 1})"
        return f"Jet[{self.nvars}]({shown or '0'}{tail}; {o})"

    def same_point(self, other: "Jet") -> bool:
        return self.nvars == other.nvars and _same_base(self.base, other.base)

    def _check(self, other: "Jet"):
        if self.nvars != other.nvars:
            raise BasepointMismatch(f"jets in {self.nvars} and {other.nvars} variables")
        if not _same_base(self.base, other.base):
            raise BasepointMismatch("jets expanded at different basepoints")

    # -- arithmetic --------------------------------------------------------
    def truncate(self, order: Optional[int]) -> "Jet":
        order = _min_order(self.order, order)
        if order is None:
            return self
        terms = {e: c for e, c in self.terms.items() if sum(e) <= order}
        return Jet(self.nvars, self.base, terms, order)

    def with_order(self, order: Optional[int]) -> "Jet":
        """Treat the jet as known to ``order`` (used when exactness is separately certified)."""
        j = Jet(self.nvars, self.base, dict(self.terms), order)
        return j if order is None else j.truncate(order)

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            order = _min_order(self.order, other.order)
            terms = dict(self.terms)
            for e, c in other.terms.items():
                if e in terms:
                    v = terms[e] + c
                    if is_zero(v):
                        del terms[e]
                    else:
                        terms[e] = v
                else:
                    terms[e] = c
            j = Jet(self.nvars, self.base, terms, order)
            return j.truncate(order) if order is not None else j
        # scalar
        if is_zero(other):
            return self
        e0 = (0,) * self.nvars
        terms = dict(self.terms)
        v = terms.get(e0, 0) + other
        if is_zero(v):
            terms.pop(e0, None)
        else:
            terms[e0] = v
        return Jet(self.nvars, self.base, terms, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.base, {e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "Jet":
        if is_zero(s):
            return Jet(self.nvars, self.base, {}, self.order)
        return Jet(self.nvars, self.base, {e: c * s for e, c in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        order = _min_order(self.order, other.order)
        return Jet(self.nvars, self.base, _mul_terms(self.terms, other.terms, order), order)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            if isinstance(k, int):
                return self.inverse() ** (-k)
            return NotImplemented
        result = Jet.constant(_one_for(self._probe()), self.nvars, self.base, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _probe(self):
        for c in self.terms.values():
            return c
        return self.base[0] if self.base else Cyclo.rational(0)

    def deriv(self, i: int) -> "Jet":
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                terms[ne] = c * k
        order = None if self.order is None else self.order - 1
        if order is not None and order < 0:
            return Jet(self.nvars, self.base, {}, -1)
        return Jet(self.nvars, self.base, terms, order)

    def inverse(self, order: Optional[int] = None) -> "Jet":
        """Multiplicative inverse of a unit.  Exact non-constant inputs need ``order``."""
        c0 = self.const_term()
        if is_zero(c0):
            raise NotAUnit("jet with vanishing constant term has no inverse")
        K = _min_order(self.order, order)
        if K is None:
            if self.total_degree() <= 0:
                return Jet.constant(_one_for(c0) / c0, self.nvars, self.base, None)
            raise InputError("inverse of a non-constant polynomial needs a truncation order")
        inv0 = _one_for(c0) / c0
        g = (self.scale(inv0) - _one_for(c0)).truncate(K)  # f = c0 * (1 + g)
        # 1/(1+g) = sum (-g)^k; g has no constant term so k <= K suffices
        acc = Jet.constant(_one_for(c0), self.nvars, self.base, K)
        term = acc
        ng = -g
        for _ in range(K):
            term = term * ng
            if not term.terms:
                break
            acc = acc + term
        return acc.scale(inv0)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse(self.order)
        if is_zero(other):
            raise DivisionByZero("jet divided by zero")
        return self.scale(_one_for(other) / other)

    # -- composition -------------------------------------------------------
    def compose(self, subs: Sequence["Jet"]) -> "Jet":
        """Substitute ``x_i = subs[i]``; all ``subs`` share one basepoint."""
        if len(subs) != self.nvars:
            raise InputError(f"need {self.nvars} substitutions, got {len(subs)}")
        first = subs[0]
        for s in subs[1:]:
            first._check(s)
        order = self.order
        for s in subs:
            order = _min_order(order, s.order)
        shifted = []
        for i, s in enumerate(subs):
            d = s - self.base[i]
            if self.order is not None and not is_zero(d.const_term()):
                raise BasepointMismatch(
                    "inner jets do not map the new basepoint onto the outer basepoint"
                )
            shifted.append(d.truncate(order) if order is not None else d)
        one = Jet.constant(_one_for(self._probe()), first.nvars, first.base, order)
        zero = Jet.zero(first.nvars, first.base, order)
        out = _horner(list(self.terms.items()), 0, shifted, one, zero)
        return out.truncate(order) if order is not None else out

    def recenter(self, new_base: Sequence) -> "Jet":
        """Exact Taylor shift of a polynomial to a new basepoint."""
        if not self.exact:
            raise InputError("only exact polynomials can be re-expanded at another point")
        new_base = tuple(new_base)
        subs = [Jet.variable(i, self.nvars, new_base) for i in range(self.nvars)]
        # outer variable u_i = x_i - base_i; compose handles the shift
        return self.compose(subs)

    def evaluate(self, point: Sequence):
        """Value of the truncated polynomial at ``x = point`` (absolute coordinates)."""
        acc = 0
        shift = [p - b for p, b in zip(point, self.base)]
        for e, c in self.terms.items():
            v = c
            for s, k in zip(shift, e):
                if k:
                    v = v * s**k
            acc = acc + v
        return acc

    def map_coeffs(self, fn) -> "Jet":
        terms = {}
        for e, c in self.terms.items():
            v = fn(c)
            if not is_zero(v):
                terms[e] = v
        return Jet(self.nvars, tuple(fn(b) for b in self.base), terms, self.order)

    def to_approx(self) -> "Jet":
        return self.map_coeffs(complex)

    def nonconstant_part(self) -> "Jet":
        e0 = (0,) * self.nvars
        return Jet(self.nvars, self.base, {e: c for e, c in self.terms.items() if e != e0}, self.order)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.same_point(other)
            and self.order == other.order
            and (self - other).is_zero()
        )

    __hash__ = None


def _one_for(c):
    if isinstance(c, Cyclo):
        return Cyclo.rational(1, c.m)
    if isinstance(c, complex):
        return 1 + 0j
    return 1


def _mul_terms(a: dict, b: dict, order: Optional[int]) -> dict:
    if len(a) < len(b):
        a, b = b, a
    bl = sorted(((sum(e), e, c) for e, c in b.items()), key=lambda t: t[0])
    out: dict = {}
    for e1, c1 in a.items():
        d1 = sum(e1)
        for d2, e2, c2 in bl:
            if order is not None and d1 + d2 > order:
                break
            e = tuple([x + y for x, y in zip(e1, e2)])
            v = c1 * c2
            if e in out:
                out[e] = out[e] + v
            else:
                out[e] = v
    return {e: c for e, c in out.items() if not is_zero(c)}


def _horner(items, i, shifted, one, zero):
    """Evaluate a polynomial, given as (exponent, coeff) pairs, at the jets ``shifted``.

    Nested Horner scheme on the variables ``i, i+1, ...``: the number of jet
    multiplications is the sum of the partial degrees instead of the number of monomials.
    """
    if not items:
        return zero
    n = len(shifted)
    if i == n:
        acc = zero
        for _, c in items:
            acc = acc + one.scale(c)
        return acc
    groups: dict = {}
    for e, c in items:
        groups.setdefault(e[i], []).append((e, c))
    top = max(groups)
    acc = None
    for k in range(top, -1, -1):
        part = _horner(groups[k], i + 1, shifted, one, zero) if k in groups else None
        if acc is None:
            acc = part
        else:
            acc = acc * shifted[i]
            if part is not None:
                acc = acc + part
    return acc


def var_jets(nvars: int, base: Sequence, order: Optional[int] = None) -> list[Jet]:
    return [Jet.variable(i, nvars, base, order) for i in range(nvars)]


# ---------------------------------------------------------------------------
# algebraic expansions
# ---------------------------------------------------------------------------


def _linear_arg(lam, mu, base, nvars, var):
    """Return (value at base, linear jet lam . u) for the affine form lam . x + mu."""
    base = tuple(base)
    if isinstance(lam, (list, tuple)):
        lams = list(lam)
    else:
        lams = [0] * nvars
        lams[var] = lam
    value = mu
    terms = {}
    for i, l in enumerate(lams):
        if not is_zero(l):
            value = value + l * base[i]
            e = [0] * nvars
            e[i] = 1
            terms[tuple(e)] = l
    return value, Jet(nvars, base, terms, None)


def _series_in(coeffs: list, s: Jet, order: int) -> Jet:
    """sum_k coeffs[k] * s^k truncated at ``order`` (s has no constant term)."""
    out = Jet.constant(coeffs[0], s.nvars, s.base, order)
    p = Jet.constant(_one_for(coeffs[0]), s.nvars, s.base, order)
    for k in range(1, order + 1):
        p = p * s
        if not p.terms:
            break
        if not is_zero(coeffs[k]):
            out = out + p.scale(coeffs[k])
    return out


def affine_power(lam, mu, q, base, order: int, root=None, nvars: int = 1, var: int = 0) -> Jet:
    """Jet of ``(lam . x + mu) ** q`` at ``base``.

    ``root`` is the chosen branch value ``A ** q`` at the basepoint; when omitted
    it is computed exactly (integer ``q``, or rational ``q`` when ``A`` is a
    perfect power in the field) or with the principal branch in approximate mode.
    """
    q = Fraction(q)
    A, lin = _linear_arg(lam, mu, base, nvars, var)
    if is_zero(A):
        raise SingularBasepoint("affine argument vanishes at the basepoint")
    if root is None:
        root = _principal_power(A, q)
    else:
        _check_root(root, A, q)
    inv_a = _one_for(A) / A
    coeffs = []
    binom = Fraction(1)
    for k in range(order + 1):
        coeffs.append(root * binom * inv_a**k)
        binom = binom * (q - k) / (k + 1)
    return _series_in(coeffs, lin, order)


def _principal_power(A, q: Fraction):
    if isinstance(A, complex):
        return cmath.exp(complex(q) * cmath.log(A))
    if q.denominator == 1:
        return A ** int(q)
    from .errors import NotRepresentable
    from .scalars import sqrt_exact

    if q.denominator == 2:
        return sqrt_exact(A) ** int(q.numerator)
    if A == 1:
        return Cyclo.rational(1, A.m)
    if A.is_rational():
        a = A.as_fraction()
        if a > 0:
            n, d = q.denominator, q.numerator
            rn = round(a.numerator ** (1 / n))
            rd = round(a.denominator ** (1 / n))
            if rn**n == a.numerator and rd**n == a.denominator:
                return Cyclo.rational(Fraction(rn, rd), A.m) ** d
    raise NotRepresentable(f"({A})^{q} is not available exactly; pass root=")


def _check_root(root, A, q: Fraction):
    n, d = q.denominator, q.numerator
    lhs = root**n
    rhs = A**d if d >= 0 else (A ** (-d)).inverse() if isinstance(A, Cyclo) else A**d
    if isinstance(root, Cyclo) and isinstance(A, Cyclo):
        if lhs != rhs:
            raise InputError("supplied root is not a branch of the requested power")
    elif abs(complex(lhs) - complex(rhs)) > 1e-9 * max(1.0, abs(complex(rhs))):
        raise InputError("supplied root is not a branch of the requested power")


def sqrt_affine(lam, mu, base, order: int, root=None, nvars: int = 1, var: int = 0) -> Jet:
    return affine_power(lam, mu, Fraction(1, 2), base, order, root, nvars, var)


def reciprocal_affine(lam, mu, base, order: int, nvars: int = 1, var: int = 0) -> Jet:
    return affine_power(lam, mu, -1, base, order, None, nvars, var)


def exp_affine(lam, base, order: int, mu=0, nvars: int = 1, var: int = 0) -> Jet:
    """Jet of ``exp(lam . x + mu)``; exact mode needs the exponent to vanish at the basepoint."""
    A, lin = _linear_arg(lam, mu, base, nvars, var)
    if isinstance(A, complex):
        v = cmath.exp(A)
    elif is_zero(A):
        v = _one_for(A)
    else:
        from .errors import NotRepresentable

        raise NotRepresentable("exp of a nonzero exact value is transcendental; use approx mode")
    coeffs = []
    fact = 1
    for k in range(order + 1):
        coeffs.append(v * Fraction(1, fact) if isinstance(v, Cyclo) else v / fact)
        fact *= k + 1
    return _series_in(coeffs, lin, order)


def expand_algebraic(kind: str, params: dict, base, order: int, nvars: int = 1, var: int = 0) -> Jet:
    """Dispatch by name: ``sqrt_affine``, ``exp_affine``, ``reciprocal_affine``, ``affine_power``."""
    lam = params.get("lam", params.get("lambda", 1))
    mu = params.get("mu", 0)
    if kind == "sqrt_affine":
        return sqrt_affine(lam, mu, base, order, params.get("root"), nvars, var)
    if kind == "reciprocal_affine":
        return reciprocal_affine(lam, mu, base, order, nvars, var)
    if kind == "exp_affine":
        return exp_affine(lam, base, order, mu, nvars, var)
    if kind == "affine_power":
        return affine_power(lam, mu, params["q"], base, order, params.get("root"), nvars, var)
    raise InputError(f"unknown algebraic kind {kind!r}")


# ---------------------------------------------------------------------------
# constant-coefficient differential operators
# ---------------------------------------------------------------------------


class DiffOperator:
    """``sum c_alpha d^alpha`` with constant coefficients, stored like a polynomial in the d_j."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = {tuple(e): c for e, c in terms.items() if not is_zero(c)}

    @classmethod
    def partial(cls, i: int, nvars: int, power: int = 1, m: int = 1) -> "DiffOperator":
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): Cyclo.rational(1, m)})

    @classmethod
    def from_symbol(cls, poly: Jet) -> "DiffOperator":
        return cls(poly.nvars, dict(poly.terms))

    def symbol(self) -> Jet:
        base = Jet.origin(self.nvars)
        return Jet(self.nvars, base, dict(self.terms), None)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        return DiffOperator.from_symbol(self.symbol() + other.symbol())

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return DiffOperator.from_symbol(self.symbol() - other.symbol())

    def __mul__(self, other):
        """Composition (constant coefficients commute) or scaling."""
        if isinstance(other, DiffOperator):
            return DiffOperator.from_symbol(self.symbol() * other.symbol())
        return DiffOperator(self.nvars, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DiffOperator":
        return DiffOperator.from_symbol(self.symbol() ** k)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.nvars == other.nvars and (self.symbol() - other.symbol()).is_zero()

    __hash__ = None

    def order(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def apply(self, f: Jet) -> Jet:
        if f.nvars != self.nvars:
            raise InputError("operator and function live in different dimensions")
        acc = Jet.zero(f.nvars, f.base, f.order)
        for e, c in self.terms.items():
            g = f
            for i, k in enumerate(e):
                for _ in range(k):
                    g = g.deriv(i)
            acc = acc + g.scale(c)
        if f.order is not None:
            acc = acc.truncate(f.order - self.order())
        return acc

    def __repr__(self):
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: graded_key(kv[0])):
            mono = "*".join(f"d{i + 1}^{k}" if k > 1 else f"d{i + 1}" for i, k in enumerate(e) if k)
            parts.append(f"({c})*{mono or '1'}")
        return "DiffOperator(" + (" + ".join(parts) or "0") + ")"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def jet_to_json(j: Jet) -> dict:
    return {
        "nvars": j.nvars,
        "basepoint": [scalar_to_json(b) for b in j.base],
        "order": j.order,
        "exact": j.exact,
        "terms": [{"exp": list(e), "coeff": scalar_to_json(c)} for e, c in j.sorted_terms()],
    }


def jet_from_json(obj: dict) -> Jet:
    try:
        nvars = int(obj["nvars"])
        base = [scalar_from_json(b) for b in obj.get("basepoint", [0] * nvars)]
        exact = bool(obj.get("exact", obj.get("order") is None))
        order = None if exact else int(obj["order"])
        terms = {}
        for t in obj.get("terms", []):
            e = tuple(int(k) for k in t["exp"])
            if len(e) != nvars:
                raise InputError(f"exponent {e} does not match nvars={nvars}")
            c = scalar_from_json(t["coeff"])
            if not is_zero(c):
                terms[e] = terms[e] + c if e in terms else c
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed jet: {exc}") from exc
    j = Jet(nvars, base, terms, order)
    return j if order is None else j.truncate(order)


def jets_share_mode(jets: Iterable[Jet]) -> bool:
    kinds = set()
    for j in jets:
        for c in list(j.terms.values()) + list(j.base):
            kinds.add(isinstance(c, Cyclo))
    return len(kinds) <= 1
