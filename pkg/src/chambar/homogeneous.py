"""Homogeneous fields on the plane: tangent-cone data, Euler identities, degree-2 classification.

For a homogeneous field ``X`` of degree ``d`` on C^2 the polynomial
``f = x X(y) - y X(x)`` (degree ``d + 1``) vanishes on the invariant lines
through the origin, and ``X(f) = h f`` with ``h`` of degree ``d - 1``.  Together
with the radial field ``R`` and the hamiltonian ``H(f) = f_x d/dy - f_y d/dx``
these satisfy ``(d + 1) X - h R = H(f)`` and ``X(f) = x X^2(y) - y X^2(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import linalg
from .core import Chambar, Refuted, VectorField, affine_conjugate, check_barycentric, lie_apply
from .errors import IdentityViolated, InputError, NonHomogeneous, WrongArity, WrongDegree
from .scalars import Cyclo, is_zero
from .series import Jet, var_jets


# ---------------------------------------------------------------------------
# polynomial helpers
# ---------------------------------------------------------------------------


def _origin_poly(j: Jet) -> Jet:
    if not j.exact:
        raise InputError("homogeneous analysis needs exact polynomial fields")
    if all(is_zero(b) for b in j.base):
        return j
    return j.recenter(tuple(Cyclo.rational(0, getattr(b, "m", 1)) for b in j.base))


def _at_origin(X: VectorField) -> VectorField:
    if X.nvars != 2:
        raise InputError("homogeneous analysis works on the plane")
    return VectorField([_origin_poly(c) for c in X.components], X.name)


def homogeneous_degree(X: VectorField) -> Optional[int]:
    """Common degree of all monomials of X, None for the zero field.

    Raises NonHomogeneous when the monomials have several degrees.
    """
    degs = {sum(e) for c in X.components for e, v in c.terms.items() if not is_zero(v)}
    if not degs:
        return None
    if len(degs) > 1:
        raise NonHomogeneous(f"monomials of degrees {sorted(degs)}")
    return degs.pop()


def exact_divide(a: Jet, b: Jet) -> Optional[Jet]:
    """a / b for polynomials when the division is exact, otherwise None.

    Multivariate division by the lexicographic leading term of ``b``.
    """
    if b.is_zero():
        raise InputError("division by the zero polynomial")
    lead_b = max(e for e, c in b.terms.items() if not is_zero(c))
    cb = b.terms[lead_b]
    rem = a
    q_terms: dict = {}
    while not rem.is_zero():
        lead = max(e for e, c in rem.terms.items() if not is_zero(c))
        diff = tuple(x - y for x, y in zip(lead, lead_b))
        if min(diff) < 0:
            return None
        coef = rem.terms[lead] / cb
        q_terms[diff] = q_terms.get(diff, 0) + coef
        mono = Jet(a.nvars, a.base, {diff: coef}, None)
        rem = rem - mono * b
    return Jet(a.nvars, a.base, {e: c for e, c in q_terms.items() if not is_zero(c)}, None)


def hamiltonian(f: Jet) -> VectorField:
    """H(f) = f_x d/dy - f_y d/dx."""
    return VectorField([-f.deriv(1), f.deriv(0)], "H")


def _binary_coeffs(f: Jet, d: int) -> list:
    """Coefficients c_k of x^(d-k) y^k."""
    zero = Cyclo.rational(0)
    return [f.terms.get((d - k, k), zero) for k in range(d + 1)]


# ---------------------------------------------------------------------------
# tangent cone data and the Euler identities
# ---------------------------------------------------------------------------


@dataclass
class TangentCone:
    f: Jet
    h: Optional[Jet]
    degree: int
    radial_colinear: bool

    def to_dict(self) -> dict:
        from .series import jet_to_json

        return {
            "degree": self.degree,
            "f": jet_to_json(self.f),
            "h": None if self.h is None else jet_to_json(self.h),
            "radial_colinear": self.radial_colinear,
        }


def tangent_cone_data(X: VectorField, d: Optional[int] = None) -> TangentCone:
    X = _at_origin(X)
    deg = homogeneous_degree(X)
    if d is None:
        if deg is None:
            raise InputError("the zero field has no degree; pass d")
        d = deg
    elif deg is not None and deg != d:
        raise WrongDegree(f"field is homogeneous of degree {deg}, not {d}")
    x, y = var_jets(2, X.base)
    f = x * X.components[1] - y * X.components[0]
    if f.is_zero():
        return TangentCone(f, None, d, True)
    Xf = lie_apply(X, f)
    h = exact_divide(Xf, f)
    if h is None:
        raise IdentityViolated("X(f) is not divisible by f", Xf)
    return TangentCone(f, h, d, False)


def verify_euler_relations(X: VectorField, f: Jet, h: Optional[Jet], d: int) -> dict:
    """Check (d+1) X - h R = H(f), X(f) = x X^2(y) - y X^2(x) and R(f) = (d+1) f exactly."""
    X = _at_origin(X)
    x, y = var_jets(2, X.base)
    R = VectorField([x, y], "R")
    hh = h if h is not None else Jet.zero(2, X.base)
    H = hamiltonian(f)
    lhs = [X.components[i].scale(d + 1) - hh * R.components[i] for i in range(2)]
    res1 = [a - b for a, b in zip(lhs, H.components)]
    if not all(r.is_zero() for r in res1):
        raise IdentityViolated("(d+1) X - h R = H(f)", res1)
    X2x = lie_apply(X, X.components[0])
    X2y = lie_apply(X, X.components[1])
    res2 = lie_apply(X, f) - (x * X2y - y * X2x)
    if not res2.is_zero():
        raise IdentityViolated("X(f) = x X^2(y) - y X^2(x)", res2)
    res3 = lie_apply(R, f) - f.scale(d + 1)
    if not res3.is_zero():
        raise IdentityViolated("R(f) = (d+1) f", res3)
    if h is not None:
        res4 = lie_apply(X, f) - h * f
        if not res4.is_zero():
            raise IdentityViolated("X(f) = h f", res4)
    return {"hamiltonian_relation": True, "second_iterate_relation": True, "euler": True, "degree": d}


# ---------------------------------------------------------------------------
# power sums
# ---------------------------------------------------------------------------


@dataclass
class AllZero:
    kind: str = field(default="AllZero", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass
class Nonzero:
    ell: int
    value: object
    kind: str = field(default="Nonzero", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ell": self.ell, "value": str(self.value)}


def power_sum_obstruction(values: Sequence, L: Optional[int] = None, tol: float = 0.0):
    """First l <= L with sum v_i^l != 0, or AllZero.

    With ``L >= len(values)`` vanishing of all these power sums forces every value
    to vanish (Newton's identities in characteristic zero); the engine checks it.
    """
    vals = list(values)
    if L is None:
        L = len(vals)
    if L < len(vals):
        raise InputError(f"need L >= {len(vals)} power sums to decide, got {L}")
    powers = list(vals)
    for ell in range(1, L + 1):
        if ell > 1:
            powers = [p * v for p, v in zip(powers, vals)]
        s = sum(powers[1:], powers[0]) if powers else 0
        if not is_zero(s, tol):
            return Nonzero(ell, s)
    if not all(is_zero(v, tol) for v in vals):
        raise IdentityViolated("power sums vanish but the values do not", vals)
    return AllZero()


# ---------------------------------------------------------------------------
# degree-2 classification
# ---------------------------------------------------------------------------


@dataclass
class NormalForm:
    a: list
    basis_change: list  # rows of S: new coordinates (u, v) = S (x, y)
    linear_form: list  # coefficients of the common line v = l(x, y)
    kind: str = field(default="NormalForm", init=False)

    def fields(self) -> list[VectorField]:
        """a_j v^2 d/du in the new coordinates."""
        base = Jet.origin(2)
        u, v = var_jets(2, base)
        return [VectorField([(v * v).scale(a), Jet.zero(2, base)]) for a in self.a]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "certificate_kind": "ExactCertificate",
            "a": [str(v) for v in self.a],
            "basis_change": [[str(v) for v in row] for row in self.basis_change],
            "linear_form": [str(v) for v in self.linear_form],
        }


@dataclass
class NotAChambar:
    witness: dict
    kind: str = field(default="NotAChambar", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "certificate_kind": "Refuted", "witness": self.witness}


def _cube_line(f: Jet):
    """(alpha, beta) with f = c (alpha x + beta y)^3, or None (f a nonzero binary cubic)."""
    c0, c1, c2, c3 = _binary_coeffs(f, 3)
    if not is_zero(c0):
        r = c1 / (3 * c0)
        if c2 == 3 * c0 * r * r and c3 == c0 * r * r * r:
            return (Cyclo.rational(1, getattr(r, "m", 1)), r)
        return None
    if is_zero(c1) and is_zero(c2):
        return (Cyclo.rational(0, getattr(c3, "m", 1)), Cyclo.rational(1, getattr(c3, "m", 1)))
    return None


def _proportional(p, q) -> bool:
    return is_zero(p[0] * q[1] - p[1] * q[0])


def classify_homog2(ch: Chambar, K_t: int = 8) -> NormalForm | NotAChambar:
    """Bring a 3-chambar of quadratic homogeneous planar fields to the form a_j v^2 d/du."""
    if ch.p != 3:
        raise WrongArity(f"classification handles triples, got {ch.p} fields")
    fields = [_at_origin(X) for X in ch.fields]
    for X in fields:
        deg = homogeneous_degree(X)
        if deg is not None and deg != 2:
            raise WrongDegree(f"field of degree {deg}, expected 2")
    C0 = Chambar(fields, list(ch.weights))
    verdict = check_barycentric(C0, K_t)
    if isinstance(verdict, Refuted):
        return NotAChambar(verdict.to_dict())
    cones = [tangent_cone_data(X, 2) for X in fields]
    fs = [c.f for c in cones]
    hs = [c.h if c.h is not None else Jet.zero(2, fields[0].base) for c in cones]
    total_f = fs[0] + fs[1] + fs[2]
    if not total_f.is_zero():
        raise IdentityViolated("sum of the f_j does not vanish for a chambar", total_f)
    total_hf = hs[0] * fs[0] + hs[1] * fs[1] + hs[2] * fs[2]
    if not total_hf.is_zero():
        raise IdentityViolated("sum of X_j(f_j) does not vanish for a chambar", total_hf)
    # fields colinear with the radial field are l R; their multipliers must all vanish
    radial = [k for k, c in enumerate(cones) if c.radial_colinear and not fields[k].is_zero()]
    if radial:
        raise IdentityViolated("radial-colinear member in a verified chambar", radial)
    line = None
    for f in fs:
        if f.is_zero():
            continue
        ln = _cube_line(f)
        if ln is None:
            raise IdentityViolated("f_j is not the cube of a linear form", f)
        if line is None:
            line = ln
        elif not _proportional(line, ln):
            raise IdentityViolated("the f_j do not share their invariant line", f)
    if line is None:
        zero = Cyclo.rational(0)
        one = Cyclo.rational(1)
        return NormalForm([zero, zero, zero], [[one, zero], [zero, one]], [zero, one])
    alpha, beta = line
    one = Cyclo.rational(1, getattr(alpha, "m", 1))
    zero = one - one
    if is_zero(beta):
        u_row = [zero, one]
    else:
        u_row = [one, zero] if is_zero(alpha) else [zero, one]
    S = [u_row, [alpha, beta]]
    if is_zero(linalg.det(S)):
        u_row = [one, zero]
        S = [u_row, [alpha, beta]]
    base = fields[0].base
    x, y = var_jets(2, base)
    u = x.scale(S[0][0]) + y.scale(S[0][1])
    v = x.scale(S[1][0]) + y.scale(S[1][1])
    a = []
    for X in fields:
        if not lie_apply(X, v).is_zero():
            raise IdentityViolated("the common line is not a first integral", lie_apply(X, v))
        q = exact_divide(lie_apply(X, u), v * v) if not lie_apply(X, u).is_zero() else Jet.zero(2, base)
        if q is None or not q.nonconstant_part().is_zero():
            raise IdentityViolated("X_j(u) is not a constant multiple of v^2", lie_apply(X, u))
        a.append(q.const_term() if q.terms else zero)
    nf = NormalForm(a, S, [alpha, beta])
    # second route: conjugating by S must reproduce a_j v^2 d/du term by term
    for X, target in zip(fields, nf.fields()):
        Y = affine_conjugate(X, S, [zero, zero])
        for c, t in zip(Y.components, target.components):
            if not (c - t).is_zero():
                raise IdentityViolated("basis change does not produce the normal form", c - t)
    s1 = a[0] + a[1] + a[2]
    if not is_zero(s1):
        raise IdentityViolated("normal-form multipliers do not sum to zero", s1)
    return nf
