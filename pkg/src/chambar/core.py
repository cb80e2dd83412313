"""Vector fields as jets, the barycentric flow condition and the structural tests around it.

A tuple of fields ``X_1..X_p`` with weights ``alpha_k`` satisfies the flow
condition when ``sum alpha_k exp(t X_k) = (sum alpha_k) id``.  Expanding the
flows in ``t`` turns this into the family of identities

    sum_k alpha_k X_k^l (x_j) = 0     for every l >= 1 and coordinate j,

which is what :func:`check_barycentric` tests, coefficient by coefficient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import linalg
from .errors import (
    BasepointMismatch,
    InputError,
    NonExactInput,
    NotColinear,
    NotLocallyInvertible,
    NotResolvable,
    RankDeficient,
    SumNotZero,
    WrongArity,
)
from .scalars import Cyclo, common_field, is_zero, magnitude, scalar_from_json, scalar_to_json
from .series import Jet, graded_key, jet_from_json, jet_to_json, var_jets

# ---------------------------------------------------------------------------
# vector fields and chambars
# ---------------------------------------------------------------------------


@dataclass
class VectorField:
    components: list
    name: str = ""

    def __post_init__(self):
        self.components = list(self.components)
        if not self.components:
            raise InputError("a vector field needs at least one component")
        n = self.components[0].nvars
        if len(self.components) != n:
            raise InputError(f"{len(self.components)} components for {n} variables")
        first = self.components[0]
        for c in self.components[1:]:
            if not first.same_point(c):
                raise BasepointMismatch("components expanded at different basepoints")

    @property
    def nvars(self) -> int:
        return len(self.components)

    @property
    def base(self) -> tuple:
        return self.components[0].base

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.components)

    @property
    def order(self) -> Optional[int]:
        orders = [c.order for c in self.components if c.order is not None]
        return min(orders) if orders else None

    def __call__(self, f: Jet) -> Jet:
        return lie_apply(self, f)

    def scale(self, s) -> "VectorField":
        return VectorField([c.scale(s) for c in self.components], self.name)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return self.scale(-1)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(c.is_zero(tol) for c in self.components)

    def truncate(self, order) -> "VectorField":
        return VectorField([c.truncate(order) for c in self.components], self.name)

    def to_approx(self) -> "VectorField":
        return VectorField([c.to_approx() for c in self.components], self.name)

    def with_base(self, base) -> "VectorField":
        """Re-expand an exact field at another basepoint."""
        return VectorField([c.recenter(base) for c in self.components], self.name)

    # -- constructors ------------------------------------------------------
    @classmethod
    def radial(cls, nvars: int, base=None, order=None) -> "VectorField":
        """R = sum x_j d/dx_j."""
        base = Jet.origin(nvars) if base is None else tuple(base)
        return cls(var_jets(nvars, base, order), "R")

    @classmethod
    def from_polys(cls, polys: Sequence[dict], nvars: Optional[int] = None, m: int = 1, name="") -> "VectorField":
        n = nvars or len(polys)
        return cls([Jet.from_poly(n, p, m=m) for p in polys], name)

    @classmethod
    def linear(cls, A, base=None, name="") -> "VectorField":
        """The field x -> A x (exact)."""
        n = len(A)
        base = Jet.origin(n) if base is None else tuple(base)
        xs = var_jets(n, base)
        comps = []
        for row in A:
            acc = Jet.zero(n, base)
            for a, xj in zip(row, xs):
                if not is_zero(a):
                    acc = acc + xj.scale(a)
            comps.append(acc)
        return cls(comps, name)


@dataclass
class Chambar:
    fields: list
    weights: Optional[list] = None
    expected: Optional[dict] = None

    def __post_init__(self):
        self.fields = list(self.fields)
        if len(self.fields) < 2:
            raise InputError("a chambar needs at least two fields")
        n = self.fields[0].nvars
        for f in self.fields:
            if f.nvars != n:
                raise InputError("fields live in different dimensions")
            if not self.fields[0].components[0].same_point(f.components[0]):
                raise BasepointMismatch("fields expanded at different basepoints")
        if self.weights is None:
            self.weights = [1] * len(self.fields)
        elif len(self.weights) != len(self.fields):
            raise InputError("one weight per field is required")
        self.weights = list(self.weights)

    @property
    def p(self) -> int:
        return len(self.fields)

    @property
    def nvars(self) -> int:
        return self.fields[0].nvars

    @property
    def base(self) -> tuple:
        return self.fields[0].base

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self.fields)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass
class ExactCertificate:
    t_degree_bound: int
    kind: str = field(default="ExactCertificate", init=False)

    def to_dict(self):
        return {"certificate_kind": self.kind, "t_degree_bound": self.t_degree_bound}


@dataclass
class VerifiedToOrder:
    K_t: int
    spatial_order: Optional[int]
    kind: str = field(default="VerifiedToOrder", init=False)

    def to_dict(self):
        return {"certificate_kind": self.kind, "K_t": self.K_t, "spatial_order": self.spatial_order}


@dataclass
class Refuted:
    ell: int
    coord: int
    exponent: tuple
    value: object
    kind: str = field(default="Refuted", init=False)

    def to_dict(self):
        return {
            "certificate_kind": self.kind,
            "ell": self.ell,
            "coord": self.coord,
            "exponent": list(self.exponent),
            "value": scalar_to_json(self.value),
        }


Verdict = Union[ExactCertificate, VerifiedToOrder, Refuted]


# ---------------------------------------------------------------------------
# Lie derivative, flows, the barycentric check
# ---------------------------------------------------------------------------


def lie_apply(X: VectorField, f: Jet) -> Jet:
    """X(f) = sum_k A_k df/dx_k."""
    if not X.components[0].same_point(f):
        raise BasepointMismatch("field and function expanded at different basepoints")
    acc = None
    for k, A in enumerate(X.components):
        if not A.terms:
            term = Jet.zero(f.nvars, f.base, A.order)
            term = term if acc is None else term
        else:
            term = A * f.deriv(k)
        acc = term if acc is None else acc + term
    if f.order is not None and acc.order is not None and acc.order > f.order - 1:
        acc = acc.truncate(f.order - 1)
    if not acc.exact and acc.order is not None and acc.order < 0:
        return Jet(f.nvars, f.base, {}, -1)
    return acc


def lie_iterates(X: VectorField, f: Jet, count: int) -> list[Jet]:
    """[f, X(f), X^2(f), ..., X^count(f)]."""
    out = [f]
    for _ in range(count):
        out.append(lie_apply(X, out[-1]))
    return out


@dataclass
class FlowJet:
    """Coefficients F[j][k] = X^k(x_j) / k! of the flow expansion in t."""

    coeffs: list
    t_order: int
    t_degree: Optional[int]

    def as_polynomial(self, j: int) -> Jet:
        """The j-th component as a jet in (t, x) with t as variable 0 (exact fields only)."""
        rows = self.coeffs[j]
        n = rows[0].nvars
        base = (rows[0].base[0].__class__.rational(0) if isinstance(rows[0].base[0], Cyclo) else 0j,) + rows[0].base
        order = None
        terms = {}
        for k, c in enumerate(rows):
            if c.order is not None:
                order = c.order if order is None else min(order, c.order)
            for e, v in c.terms.items():
                terms[(k,) + e] = v
        return Jet(n + 1, base, terms, order)


def flow_jet(X: VectorField, K_t: int) -> FlowJet:
    """Flow coefficients up to t^K_t; ``t_degree`` is set only for exact fields whose iterates die out."""
    xs = var_jets(X.nvars, X.base)
    coeffs = []
    for x in xs:
        its = lie_iterates(X, x, K_t)
        fact = 1
        row = [its[0]]
        for k in range(1, len(its)):
            fact *= k
            row.append(its[k].scale(Fraction(1, fact)))
        coeffs.append(row)
    degree = None
    if X.exact:
        # iterates of the coordinates vanish from some order on exactly when the flow is polynomial
        last = [row[K_t].is_zero() for row in coeffs]
        if all(last):
            degree = max(
                (max((k for k, c in enumerate(row) if not c.is_zero()), default=0) for row in coeffs),
                default=0,
            )
    return FlowJet(coeffs, K_t, degree)


def _first_nonzero(j: Jet, tol: float):
    limit = j.order
    for e, c in j.sorted_terms():
        if limit is not None and sum(e) > limit:
            break
        if not is_zero(c, tol):
            return e, c
    return None


def check_barycentric(ch: Chambar, K_t: int = 8, spatial_order: Optional[int] = None, tol: Optional[float] = None) -> Verdict:
    """Test sum_k alpha_k X_k^l(x_j) = 0 for l = 1..K_t.

    Returns ``Refuted`` with the smallest (l, j) and the first offending
    coefficient in graded order, ``ExactCertificate`` when every field is an
    exact polynomial and all iterates die out within ``K_t``, else
    ``VerifiedToOrder``.
    """
    fields = ch.fields
    if spatial_order is not None:
        fields = [f.truncate(spatial_order) for f in fields]
    n = ch.nvars
    base = ch.base
    exact_mode = all(isinstance(b, Cyclo) for b in base)
    if tol is None:
        tol = 0.0 if exact_mode else 1e-9
    weights = ch.weights
    current = [[x for x in var_jets(n, base)] for _ in fields]
    all_exact = all(f.exact for f in fields)
    min_order = None
    for ell in range(1, K_t + 1):
        for k, X in enumerate(fields):
            current[k] = [lie_apply(X, f) for f in current[k]]
        for j in range(n):
            acc = None
            for k in range(len(fields)):
                term = current[k][j].scale(weights[k])
                acc = term if acc is None else acc + term
            if acc.order is not None:
                min_order = acc.order if min_order is None else min(min_order, acc.order)
            scale_ = 1.0
            if tol:
                scale_ = max([1.0] + [current[k][j].max_coeff() * magnitude(weights[k]) for k in range(len(fields))])
            hit = _first_nonzero(acc, tol * scale_)
            if hit is not None:
                return Refuted(ell, j, hit[0], hit[1])
        if all_exact and all(f.is_zero() for row in current for f in row):
            return ExactCertificate(ell - 1)
    return VerifiedToOrder(K_t, min_order)


def reverify_refutation(ch: Chambar, r: Refuted, tol: float = 0.0) -> bool:
    """Recompute the witness coefficient independently of the scan order."""
    n = ch.nvars
    x = var_jets(n, ch.base)[r.coord]
    acc = None
    for w, X in zip(ch.weights, ch.fields):
        it = lie_iterates(X, x, r.ell)[-1].scale(w)
        acc = it if acc is None else acc + it
    c = acc.coeff(r.exponent)
    if isinstance(c, Cyclo) and isinstance(r.value, Cyclo):
        return c == r.value and not c.is_zero()
    return abs(complex(c) - complex(r.value)) <= tol + 1e-9 * max(1.0, abs(complex(r.value)))


# ---------------------------------------------------------------------------
# t-degree, straightness, Pfaff form
# ---------------------------------------------------------------------------


@dataclass
class Degree:
    d: int
    kind: str = field(default="Degree", init=False)


@dataclass
class NotWithinBound:
    bound: int
    kind: str = field(default="NotWithinBound", init=False)


@dataclass
class Never1D:
    reason: str
    kind: str = field(default="Never1D", init=False)


def t_poly_degree(X: VectorField, bound: int = 16):
    """Degree in t of the flow of an exact polynomial field, if it is at most ``bound``."""
    if not X.exact:
        raise NonExactInput("t-degree needs exact polynomial components")
    if X.nvars == 1:
        a = X.components[0]
        if a.is_zero():
            return Degree(0)
        if a.total_degree() == 0:
            return Degree(1)
        return Never1D("in one variable only constant fields have polynomial flows")
    xs = var_jets(X.nvars, X.base)
    current = xs
    for ell in range(1, bound + 2):
        current = [lie_apply(X, f) for f in current]
        if all(f.is_zero() for f in current):
            return Degree(ell - 1)
    return NotWithinBound(bound)


@dataclass
class StraightnessResult:
    kind: str
    witness: Optional[dict] = None


def _minors(U: Sequence[Jet], V: Sequence[Jet]):
    """All 2x2 minors U_i V_j - U_j V_i, i < j."""
    out = []
    for i, j in itertools.combinations(range(len(U)), 2):
        out.append(((i, j), U[i] * V[j] - U[j] * V[i]))
    return out


def straightness_test(X: VectorField, tol: float = 0.0) -> StraightnessResult:
    """StraightFlow when DX.X = 0; StraightFoliation when DX.X is colinear to X."""
    acc = [lie_apply(X, a) for a in X.components]  # (DX . X)_k = X(A_k)
    if all(a.is_zero(tol) for a in acc):
        return StraightnessResult("StraightFlow")
    for (i, j), minor in _minors(X.components, acc):
        hit = _first_nonzero(minor, tol)
        if hit is not None:
            return StraightnessResult(
                "NotStraight",
                {"minor": [i, j], "exponent": list(hit[0]), "value": scalar_to_json(hit[1])},
            )
    return StraightnessResult("StraightFoliation")


def _cross(a: Sequence[Jet], b: Sequence[Jet]) -> list[Jet]:
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


@dataclass
class PfaffResult:
    omega: list
    coefficient: Jet
    pair: tuple
    annihilates_all: bool

    @property
    def contact(self) -> bool:
        return not self.coefficient.is_zero()


def pfaffian_integrability(ch: Chambar) -> PfaffResult:
    """Annihilating 1-form from a cross product and the coefficient of omega ^ d omega."""
    if ch.nvars != 3:
        raise InputError("the Pfaff form test is defined in three variables")
    for a, b in itertools.combinations(range(ch.p), 2):
        omega = _cross(ch.fields[a].components, ch.fields[b].components)
        if any(not is_zero(w.const_term()) for w in omega):
            break
    else:
        raise RankDeficient("no two fields are independent at the basepoint")
    P, Q, R = omega
    coeff = P * (R.deriv(1) - Q.deriv(2)) + Q * (P.deriv(2) - R.deriv(0)) + R * (Q.deriv(0) - P.deriv(1))
    ann = True
    for X in ch.fields:
        s = X.components[0] * P + X.components[1] * Q + X.components[2] * R
        if not s.is_zero():
            ann = False
    return PfaffResult(omega, coeff, (a, b), ann)


def pfaff_coefficient(omega: Sequence[Jet]) -> Jet:
    """Coefficient of dx1^dx2^dx3 in omega ^ d omega for omega = P dx1 + Q dx2 + R dx3."""
    P, Q, R = omega
    return P * (R.deriv(1) - Q.deriv(2)) + Q * (P.deriv(2) - R.deriv(0)) + R * (Q.deriv(0) - P.deriv(1))


# ---------------------------------------------------------------------------
# semi-rigid triples
# ---------------------------------------------------------------------------


@dataclass
class SemiRigidResult:
    kind: str
    ratio: Optional[Jet] = None
    constants: Optional[list] = None
    residual: Optional[list] = None


def _ratio(U: VectorField, V: VectorField) -> Jet:
    for k, a in enumerate(U.components):
        if not is_zero(a.const_term()):
            return V.components[k] / a
    raise NotResolvable("no component of the first field is a unit at the basepoint")


def semi_rigid_analyze(X1: VectorField, X2: VectorField, X3: VectorField, tol: float = 0.0) -> SemiRigidResult:
    """Triples with X1 + X2 + X3 = 0 and X1, X2 colinear: write X2 = f X1."""
    total = X1 + X2 + X3
    if not total.is_zero(tol):
        raise SumNotZero("the three fields do not sum to zero")
    for _, minor in _minors(X1.components, X2.components):
        if not minor.is_zero(tol):
            raise NotColinear("the fields are not pointwise colinear")
    f = _ratio(X1, X2)
    fc = f.nonconstant_part()
    if fc.is_zero(tol):
        c = f.const_term()
        if is_zero(1 + c + c * c, tol):
            return SemiRigidResult("Rigid", f, [1, c, -(1 + c)])
    DXX = [lie_apply(X1, a) for a in X1.components]
    wedge = _minors(X1.components, DXX)
    if all(m.is_zero(tol) for _, m in wedge):
        return SemiRigidResult("StraightLines", f)
    # residual of 2(1+f+f^2) DX.X + (1+2f) X(f) X, which must vanish for a chambar
    g = (f * f + f + 1).scale(2)
    h = lie_apply(X1, f) * (f.scale(2) + 1)
    res = [g * d + h * a for d, a in zip(DXX, X1.components)]
    return SemiRigidResult("Neither", f, None, res)


# ---------------------------------------------------------------------------
# one-dimensional classification
# ---------------------------------------------------------------------------


@dataclass
class Classify1D:
    kind: str
    data: dict


def _affine_of(j: Jet, tol: float):
    """(lam, mu) with j = lam x + mu, or None."""
    for e, c in j.terms.items():
        if sum(e) >= 2 and not is_zero(c, tol) and (j.order is None or sum(e) <= j.order):
            return None
    lam = j.coeff((1,))
    c0 = j.coeff((0,))
    mu = c0 - lam * j.base[0]
    return lam, mu


def classify_1d(ch: Chambar, tol: Optional[float] = None) -> Classify1D:
    """Recognise the constant, square-root and paired square-root shapes on the line."""
    if ch.p not in (3, 4):
        raise WrongArity(f"one-dimensional classification handles p = 3 or 4, got {ch.p}")
    if ch.nvars != 1:
        raise InputError("fields must live on a line")
    exact_mode = all(isinstance(b, Cyclo) for b in ch.base)
    if tol is None:
        tol = 0.0 if exact_mode else 1e-9
    a = [f.components[0] for f in ch.fields]
    scale_ = max([1.0] + [x.max_coeff() for x in a]) if tol else 1.0
    t = tol * scale_
    if all(x.nonconstant_part().is_zero(t) for x in a):
        return Classify1D("Constant", {"values": [x.const_term() for x in a]})
    if any(is_zero(x.const_term(), t) for x in a):
        return Classify1D("Unrecognized", {"reason": "a field vanishes at the basepoint"})
    sq = [(x * x) for x in a]
    aff = [_affine_of(s, t) for s in sq]
    if all(v is not None for v in aff):
        mult = []
        ok = True
        for x in a:
            r = x / a[0]
            if not r.nonconstant_part().is_zero(t):
                ok = False
                break
            mult.append(r.const_term())
        lam, mu = aff[0]
        if ok and not is_zero(lam, t):
            s1 = sum(mult[1:], mult[0])
            s2 = sum((c * c for c in mult[1:]), mult[0] * mult[0])
            if is_zero(s1, t) and is_zero(s2, t):
                return Classify1D("RigidSqrt", {"lambda": lam, "mu": mu, "multipliers": mult})
    if ch.p == 4:
        for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
            if (a[i] + a[j]).is_zero(t) and (a[k] + a[l]).is_zero(t):
                ai, ak = aff[i], aff[k]
                if ai is None or ak is None or is_zero(ai[0], t) or is_zero(ak[0], t):
                    continue
                # roots of the two affine functions; their gap is the pairing shift
                ri = -ai[1] / ai[0]
                rk = -ak[1] / ak[0]
                return Classify1D(
                    "Special",
                    {"pairing": [[i, j], [k, l]], "affine": [list(ai), list(ak)], "epsilon": ri - rk},
                )
    return Classify1D("Unrecognized", {})


# ---------------------------------------------------------------------------
# colinearity locus
# ---------------------------------------------------------------------------


def colinearity_locus(X: VectorField, Y: VectorField) -> list[Jet]:
    """Generators of the locus where X and Y are colinear: Y_i X_j - Y_j X_i for i < j."""
    return [m for _, m in _minors(Y.components, X.components)]


# ---------------------------------------------------------------------------
# conjugation and local inverses
# ---------------------------------------------------------------------------


def _linear_map_jets(L, shift, src_base, dst_nvars) -> list[Jet]:
    """Exact jets of x -> L x + shift at src_base."""
    n = len(src_base)
    xs = var_jets(n, src_base)
    out = []
    for row, s in zip(L, shift):
        acc = Jet.constant(s, n, src_base) if not is_zero(s) else Jet.zero(n, src_base)
        for a, x in zip(row, xs):
            if not is_zero(a):
                acc = acc + x.scale(a)
        out.append(acc)
    return out


def affine_conjugate(X: VectorField, L, c) -> VectorField:
    """Push X forward by y = L x + c; the result is expanded at L x0 + c."""
    L = linalg.lift(L)
    c = [Cyclo.rational(Fraction(v)) if isinstance(v, (int, Fraction)) else v for v in c]
    x0 = list(X.base)
    y0 = [v + ci for v, ci in zip(linalg.matvec(L, x0), c)]
    Linv = linalg.inverse(L)
    shift = [-v for v in linalg.matvec(Linv, c)]
    back = _linear_map_jets(Linv, shift, tuple(y0), X.nvars)
    pulled = [a.compose(back) for a in X.components]
    comps = []
    for row in L:
        acc = Jet.zero(X.nvars, tuple(y0))
        for a, comp in zip(row, pulled):
            if not is_zero(a):
                acc = acc + comp.scale(a)
        order = X.order
        comps.append(acc if order is None else acc.truncate(order).with_order(order))
    return VectorField(comps, X.name)


def affine_conjugate_chambar(ch: Chambar, L, c) -> Chambar:
    return Chambar([affine_conjugate(X, L, c) for X in ch.fields], list(ch.weights))


def local_inverse(F: Sequence[Jet], order: int) -> list[Jet]:
    """Series reversion of a map given by jets at x0; the result is expanded at F(x0).

    When ``F`` is polynomial and the reversion closes up to an exact polynomial
    inverse (checked by composing back), the returned jets are marked exact.
    """
    n = len(F)
    x0 = F[0].base
    y0 = tuple(f.const_term() if f.terms.get((0,) * n) is not None else _zero_like(x0[0]) for f in F)
    M = [[f.coeff(tuple(1 if k == j else 0 for k in range(n))) for j in range(n)] for f in F]
    M = [[v if not isinstance(v, int) else Cyclo.rational(v) for v in row] for row in M]
    if is_zero(linalg.det(M)):
        raise NotLocallyInvertible("the differential is singular at the basepoint")
    Minv = linalg.inverse(M)
    fo = None
    for f in F:
        if f.order is not None:
            fo = f.order if fo is None else min(fo, f.order)
    K = order if fo is None else min(order, fo)
    us = [Jet(n, x0, {e: c for e, c in f.terms.items() if sum(e) >= 2}, f.order) for f in F]  # nonlinear part
    vs = [v - c for v, c in zip(var_jets(n, y0, K), y0)]  # y - y0 as jets at y0

    def lin(vec):
        return [sum((w.scale(a) for a, w in zip(row, vec) if not is_zero(a)), Jet.zero(n, y0, K)) for row in Minv]

    g = lin(vs)  # g = x - x0 as jets at y0
    # pass k fixes the degree k + 1 terms, so it only needs jets truncated at k + 1
    for k in range(1, K + 1):
        gk = [gi.truncate(k + 1) if k + 1 < K else gi for gi in g]
        xg = [gi + x0[i] for i, gi in enumerate(gk)]
        N = [u.compose(xg) if u.terms else Jet.zero(n, y0, k + 1) for u in us]
        g_new = lin([v.truncate(k + 1) - nn for v, nn in zip(vs, N)])
        g_new = [Jet(n, y0, gi.terms, K) for gi in g_new]
        if fo is None and k >= 2 and all((a - b).is_zero() for a, b in zip(g_new, g)):
            g = g_new
            break
        g = g_new
    G = [(gi + x0[i]).truncate(K) for i, gi in enumerate(g)]
    if fo is None:
        Gx = [Jet(n, y0, dict(gi.terms), None) for gi in G]
        back = [f.compose(Gx) for f in F]
        ident = var_jets(n, y0)
        if all((b - i).is_zero() for b, i in zip(back, ident)):
            return Gx
    return G


def pushforward_chambar(ch: Chambar, F: Sequence[Jet], order: int) -> Chambar:
    G = local_inverse(F, order + 1)
    return Chambar([pushforward(X, F, order, G) for X in ch.fields], list(ch.weights))


def _zero_like(s):
    return Cyclo.rational(0, s.m) if isinstance(s, Cyclo) else 0j


def pushforward(X: VectorField, F: Sequence[Jet], order: int, inverse=None) -> VectorField:
    """F_* X = DF(F^-1(y)) X(F^-1(y)) as jets at F(x0).

    ``inverse`` may carry a precomputed ``local_inverse(F, order + 1)`` so that
    several fields can be pushed through the same map at the cost of one reversion.
    """
    G = inverse if inverse is not None else local_inverse(F, order + 1)
    n = X.nvars
    comps = []
    DX = [[f.deriv(j) for j in range(n)] for f in F]
    for i in range(n):
        acc = None
        for j in range(n):
            term = DX[i][j] * X.components[j]
            acc = term if acc is None else acc + term
        comps.append(acc.compose(G))
    return VectorField(comps, X.name)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def field_to_json(X: VectorField) -> dict:
    out = {"nvars": X.nvars, "components": [jet_to_json(c) for c in X.components]}
    if X.name:
        out["name"] = X.name
    return out


def field_from_json(obj: dict) -> VectorField:
    try:
        comps = [jet_from_json(c) for c in obj["components"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed vector field: {exc}") from exc
    return VectorField(comps, obj.get("name", ""))


def chambar_to_json(ch: Chambar) -> dict:
    out = {
        "nvars": ch.nvars,
        "fields": [field_to_json(f) for f in ch.fields],
        "weights": [scalar_to_json(_as_scalar(w)) for w in ch.weights],
    }
    if ch.expected is not None:
        out["expected"] = ch.expected
    return out


def _as_scalar(w):
    if isinstance(w, (Cyclo, complex)):
        return w
    return Cyclo.rational(Fraction(w))


def chambar_from_json(obj: dict) -> Chambar:
    if not isinstance(obj, dict) or "fields" not in obj:
        raise InputError("expected a chambar object with a 'fields' list")
    fields = [field_from_json(f) for f in obj["fields"]]
    weights = obj.get("weights")
    if weights is not None:
        weights = [scalar_from_json(w) for w in weights]
    return Chambar(fields, weights, obj.get("expected"))


def verdict_to_json(v) -> dict:
    return v.to_dict()
