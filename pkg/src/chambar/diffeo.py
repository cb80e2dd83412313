"""Maps compatible with the standard planar 3-chambar and the operators that describe them.

A map phi is compatible when it conjugates the three translation flows along
(1,0), (0,1), (-1,-1) into a chambar, i.e. when

    phi(x+t, y) + phi(x, y+t) + phi(x-t, y-t) = 3 phi(x, y).

The coefficient of t^k/k! on the left is T_k(phi) with
T_k = d_x^k + d_y^k + (-1)^k (d_x + d_y)^k; T_2 = 2S and T_3 = -3T.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

from . import linalg
from .core import Chambar, VectorField, check_barycentric, pushforward_chambar
from .errors import InputError
from .scalars import Cyclo, is_zero
from .series import DiffOperator, Jet, var_jets


def _monomials(n: int, D: int, exact_degree: Optional[int] = None):
    out = []
    degs = range(D + 1) if exact_degree is None else [exact_degree]
    for d in degs:
        for e in itertools.product(range(d + 1), repeat=n):
            if sum(e) == d:
                out.append(e)
    out.sort(key=lambda e: (sum(e), tuple(-k for k in e)))
    return out


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def t_operator(k: int, n: int, m: int = 1) -> DiffOperator:
    """T_k = sum_j d_j^k + (-1)^k (sum_j d_j)^k, expanded multinomially."""
    if k < 2:
        raise InputError("T_k is defined for k >= 2")
    terms: dict = {}
    for j in range(n):
        e = tuple(k if i == j else 0 for i in range(n))
        terms[e] = terms.get(e, 0) + 1
    sign = -1 if k % 2 else 1
    for e in itertools.product(range(k + 1), repeat=n):
        if sum(e) != k:
            continue
        coef = factorial(k)
        for a in e:
            coef //= factorial(a)
        terms[e] = terms.get(e, 0) + sign * coef
    return DiffOperator(n, {e: Cyclo.rational(c, m) for e, c in terms.items()})


def hamiltonian_field(f: Jet) -> VectorField:
    """H(f) = f_x d/dy - f_y d/dx in the plane."""
    if f.nvars != 2:
        raise InputError("H(f) is defined for functions of two variables")
    return VectorField([-f.deriv(1), f.deriv(0)], "H(f)")


def make_operator(name: str, n: int = 2, k: Optional[int] = None, f: Optional[Jet] = None, m: int = 1):
    """``S``, ``T``, ``T_k`` (needs k) as DiffOperators; ``Hf`` (needs f) as a vector field."""
    one = Cyclo.rational(1, m)
    if name == "S":
        if n != 2:
            raise InputError("S is a planar operator")
        return DiffOperator(2, {(2, 0): one, (1, 1): one, (0, 2): one})
    if name == "T":
        if n != 2:
            raise InputError("T is a planar operator")
        return DiffOperator(2, {(2, 1): one, (1, 2): one})
    if name in ("T_k", "Tk"):
        if k is None:
            raise InputError("T_k needs k")
        return t_operator(k, n, m)
    if name in ("Hf", "H"):
        if f is None:
            raise InputError("H(f) needs a function")
        return hamiltonian_field(f)
    raise InputError(f"unknown operator {name!r}")


def power_sum_symbol(k: int, n: int, m: int = 1) -> Jet:
    """P_k(z) = sum z_i^k + (-1)^k (sum z_i)^k, the symbol of T_k."""
    zs = var_jets(n, Jet.origin(n))
    s = zs[0]
    acc = zs[0] ** k
    for z in zs[1:]:
        s = s + z
        acc = acc + z**k
    acc = acc + (s**k).scale(-1 if k % 2 else 1)
    return acc


# ---------------------------------------------------------------------------
# kernels on bounded-degree polynomial spaces
# ---------------------------------------------------------------------------


def kernel_basis(ops: Sequence[DiffOperator], n: int, D: int, m: int = 3) -> list[Jet]:
    """Basis of the polynomials of degree <= D killed by every operator (exact, over Q(zeta_m))."""
    if D < 0:
        raise InputError("degree bound must be nonnegative")
    monos = _monomials(n, D)
    index = {}
    rows: list = []
    columns = []
    for e in monos:
        f = Jet.from_poly(n, {e: Cyclo.rational(1, m)})
        images = [op.apply(f) for op in ops]
        columns.append(images)
    for oi in range(len(ops)):
        for e in monos:
            index[(oi, e)] = len(index)
    rows = [[Cyclo.rational(0, m)] * len(monos) for _ in range(len(index))]
    for c, images in enumerate(columns):
        for oi, img in enumerate(images):
            for e, v in img.terms.items():
                rows[index[(oi, e)]][c] = rows[index[(oi, e)]][c] + v
    rows = [r for r in rows if any(not is_zero(x) for x in r)]
    if rows:
        null = linalg.nullspace(rows)
    else:
        null = linalg.identity(len(monos), Cyclo.rational(0, m))
    basis = []
    for v in null:
        basis.append(Jet.from_poly(n, {e: c for e, c in zip(monos, v) if not is_zero(c)}, m=m))
    return basis


def coefficient_matrix(polys: Sequence[Jet]) -> tuple[list, list]:
    monos = sorted({e for p in polys for e in p.terms}, key=lambda e: (sum(e), e))
    return [[p.coeff(e) if p.coeff(e) != 0 else Cyclo.rational(0) for e in monos] for p in polys], monos


def span_rank(polys: Sequence[Jet]) -> int:
    M, _ = coefficient_matrix(list(polys))
    M = [[x if isinstance(x, (Cyclo, complex)) else Cyclo.rational(x) for x in row] for row in M]
    return linalg.rank(M) if M and M[0] else 0


def kernel_span(m: int = 3) -> list[Jet]:
    """1, x, y, (y + j x)^2, (y + j^2 x)^2, x y (y - x) with j = zeta_3."""
    j = Cyclo.zeta(3)
    one = Cyclo.rational(1, 3)
    x, y = var_jets(2, Jet.origin(2, "exact"))
    x, y = x.scale(one), y.scale(one)
    return [
        Jet.from_poly(2, {(0, 0): one}),
        x,
        y,
        (y + x.scale(j)) ** 2,
        (y + x.scale(j * j)) ** 2,
        x * y * (y - x),
    ]


def nonaffine_span() -> list[Jet]:
    return kernel_span()[3:]


# ---------------------------------------------------------------------------
# compatibility of a map
# ---------------------------------------------------------------------------


@dataclass
class Compatible:
    order: Optional[int] = None
    kind: str = field(default="Compatible", init=False)


@dataclass
class Incompatible:
    witness: dict
    kind: str = field(default="Incompatible", init=False)


STANDARD_DIRECTIONS = ((1, 0), (0, 1), (-1, -1))


def barycentric_defect(phi: Jet) -> Jet:
    """phi(x+t,y) + phi(x,y+t) + phi(x-t,y-t) - 3 phi(x,y) as a jet in (t, x, y), t first."""
    if phi.nvars != 2:
        raise InputError("compatibility is tested for planar maps")
    base3 = (Cyclo.rational(0) if not isinstance(phi.base[0], complex) else 0j,) + phi.base
    t, x, y = var_jets(3, base3)
    lifted = Jet(3, base3, {(0,) + e: c for e, c in phi.terms.items()}, phi.order)
    acc = lifted.scale(-3)
    for a, b in STANDARD_DIRECTIONS:
        subs = [x + t.scale(a), y + t.scale(b)]
        shifted = phi.compose(subs)
        acc = acc + shifted
    return acc


def check_compatible(F: Sequence[Jet]) -> object:
    """Compatible, or Incompatible with the first failing component and the operator that detects it."""
    for comp_index, phi in enumerate(F):
        d = barycentric_defect(phi)
        if d.is_zero():
            continue
        kmin = min(e[0] for e in d.terms)
        coeff_poly = Jet(2, phi.base, {e[1:]: c for e, c in d.terms.items() if e[0] == kmin}, None if phi.exact else phi.order)
        # coefficient of t^k is T_k(phi)/k!
        if kmin == 2:
            op, value = "S", coeff_poly
        elif kmin == 3:
            op, value = "T", coeff_poly.scale(Fraction(-2))
        else:
            op, value = f"T_{kmin}", coeff_poly.scale(factorial(kmin))
        return Incompatible(
            {"component": comp_index, "t_power": kmin, "operator": op, "value": value}
        )
    orders = [f.order for f in F if f.order is not None]
    return Compatible(min(orders) if orders else None)


def span_membership(F: Sequence[Jet]) -> bool:
    """Each component minus its affine part lies in the span of the three non-affine kernel elements."""
    span = nonaffine_span()
    r0 = span_rank(span)
    for phi in F:
        rest = Jet(2, phi.base, {e: c for e, c in phi.terms.items() if sum(e) >= 2}, None)
        rest = rest if rest.terms else None
        if rest is None:
            continue
        if span_rank(span + [rest]) > r0:
            return False
    return True


def random_compatible_map(rng: random.Random) -> list[Jet]:
    """Invertible affine part plus random multiples of the non-affine kernel elements."""
    span = nonaffine_span()
    j = Cyclo.zeta(3)

    def rq():
        return Fraction(rng.randint(-2, 2), 1)

    while True:
        L = [[rq() for _ in range(2)] for _ in range(2)]
        if L[0][0] * L[1][1] - L[0][1] * L[1][0] != 0:
            break
    x, y = var_jets(2, Jet.origin(2))
    comps = []
    for i in range(2):
        f = x.scale(L[i][0]) + y.scale(L[i][1]) + Cyclo.rational(rq())
        for s in span:
            c = Cyclo.rational(rq()) + j * rq()
            f = f + s.scale(c)
        comps.append(f)
    return comps


def standard_chambar(base, order: Optional[int] = None) -> Chambar:
    """Ch_0 = (d/dx, d/dy, -d/dx - d/dy) as constant fields at ``base``."""
    one = Cyclo.rational(1)
    fields = []
    for a, b in STANDARD_DIRECTIONS:
        comps = [Jet.constant(one * a, 2, base, order), Jet.constant(one * b, 2, base, order)]
        fields.append(VectorField(comps))
    return Chambar(fields)


def pushforward_consistency(F: Sequence[Jet], rng: random.Random, order: int = 9, K_t: int = 8, height: int = 2):
    """Push Ch_0 forward by F at a random integer basepoint with DF invertible and run the verifier.

    Returns ``(basepoint, verdict)``; jets are carried to ``order`` so that the
    t-iterates up to ``K_t`` keep a nonnegative certified order.
    """
    while True:
        b = tuple(Cyclo.rational(rng.randint(-height, height)) for _ in range(2))
        Fb = [f.recenter(b) for f in F]
        M = [[f.coeff(e) if f.coeff(e) != 0 else Cyclo.rational(0) for e in ((1, 0), (0, 1))] for f in Fb]
        if not is_zero(linalg.det(M)):
            break
    pushed = pushforward_chambar(standard_chambar(b, order), Fb, order)
    return b, check_barycentric(pushed, K_t)


# ---------------------------------------------------------------------------
# the power ideal
# ---------------------------------------------------------------------------


@dataclass
class Contained:
    p: int
    certificates: list  # per coordinate: {k: cofactor Jet}
    kind: str = field(default="Contained", init=False)


@dataclass
class NotFoundWithin:
    K: int
    kind: str = field(default="NotFoundWithin", init=False)


def _membership_homogeneous(target: Jet, gens: dict, degree: int, n: int):
    """Solve target = sum_k c_k P_k with c_k homogeneous of degree ``degree - k``."""
    unknowns = []
    for k, g in gens.items():
        dk = degree - k
        if dk < 0:
            continue
        for e in _monomials(n, dk, exact_degree=dk):
            unknowns.append((k, e))
    if not unknowns:
        return None
    out_monos = _monomials(n, degree, exact_degree=degree)
    idx = {e: i for i, e in enumerate(out_monos)}
    A = [[Cyclo.rational(0)] * len(unknowns) for _ in out_monos]
    for col, (k, e) in enumerate(unknowns):
        for ge, c in gens[k].terms.items():
            oe = tuple(a + b for a, b in zip(e, ge))
            A[idx[oe]][col] = A[idx[oe]][col] + c
    b = [target.coeff(e) if target.coeff(e) != 0 else Cyclo.rational(0) for e in out_monos]
    sol = linalg.solve(A, b)
    if sol is None:
        return None
    cof: dict = {}
    for (k, e), v in zip(unknowns, sol):
        if not is_zero(v):
            cof.setdefault(k, {})[e] = v
    return {k: Jet.from_poly(n, poly) for k, poly in cof.items()}


def mn_power_membership(n: int, p: int, K: Optional[int] = None) -> object:
    """Is every z_j^p in the ideal generated by P_k, k >= 2?

    The generators and the targets are homogeneous, so a certificate with
    cofactors of degree <= K - k exists iff one exists in the degree-p graded
    piece (project any certificate onto degree p).  Only ``K >= p`` matters; when
    ``K`` is omitted it is raised from p to p + 6 as a safety net.
    """
    if p < 1:
        raise InputError("p must be positive")
    caps = [K] if K is not None else list(range(p, p + 7))
    for cap in caps:
        if cap < p:
            continue
        gens = {k: power_sum_symbol(k, n) for k in range(2, min(cap, p) + 1)}
        gens = {k: g for k, g in gens.items() if not g.is_zero()}
        certs = []
        ok = True
        for j in range(n):
            target = Jet.from_poly(n, {tuple(p if i == j else 0 for i in range(n)): 1})
            sol = _membership_homogeneous(target, gens, p, n)
            if sol is None:
                ok = False
                break
            certs.append(sol)
        if ok:
            return Contained(p, certs)
    return NotFoundWithin(caps[-1])


def verify_membership_certificate(n: int, p: int, cert: Contained) -> bool:
    for j, cof in enumerate(cert.certificates):
        acc = Jet.zero(n, Jet.origin(n))
        for k, c in cof.items():
            acc = acc + c * power_sum_symbol(k, n)
        target = Jet.from_poly(n, {tuple(p if i == j else 0 for i in range(n)): 1})
        if not (acc - target).is_zero():
            return False
    return True


def smallest_power(n: int, K: int = 8) -> Optional[int]:
    for p in range(1, K + 1):
        if isinstance(mn_power_membership(n, p, K), Contained):
            return p
    return None


# ---------------------------------------------------------------------------
# positivity of kernel vectors of the power-sum Vandermonde matrix
# ---------------------------------------------------------------------------


def power_matrix(z: Sequence) -> list:
    """Rows (z_1^k, ..., z_(n+1)^k) for k = 1..n+1."""
    z = [Cyclo.rational(Fraction(v)) if not isinstance(v, Cyclo) else v for v in z]
    N = len(z)
    return [[zi**k for zi in z] for k in range(1, N + 1)]


def positive_kernel_vector(Q) -> Optional[list]:
    """A strictly positive u with Q u = 0, found by vertex enumeration of {Qu=0, sum u=1, u>=0}."""
    N = len(Q[0])
    A = [list(r) for r in Q] + [[Cyclo.rational(1)] * N]
    b = [Cyclo.rational(0)] * len(Q) + [Cyclo.rational(1)]
    r = linalg.rank(A)
    vertices = []
    for cols in itertools.combinations(range(N), r):
        sub = [[row[c] for c in cols] for row in A]
        if linalg.rank(sub) < r:
            continue
        sol = linalg.solve(sub, b)
        if sol is None:
            continue
        u = [Cyclo.rational(0)] * N
        for c, v in zip(cols, sol):
            u[c] = v
        if all(v.as_fraction() >= 0 for v in u):
            # make sure it really solves the full system
            if all(is_zero(sum((a * x for a, x in zip(row, u)), Cyclo.rational(0)) - bi) for row, bi in zip(A, b)):
                vertices.append(u)
    if not vertices:
        return None
    centroid = [sum((v[i] for v in vertices), Cyclo.rational(0)) / len(vertices) for i in range(N)]
    if all(c.as_fraction() > 0 for c in centroid):
        return centroid
    return None


def vandermonde_positivity_check(n: int, samples: int = 1000, seed: int = 0, height: int = 6) -> dict:
    """Randomised check that Q_(n+1)(z) u = 0 with u > 0 forces z = 0."""
    if n > 4:
        raise InputError("the enumeration is meant for n <= 4")
    rng = random.Random(seed)
    counterexamples = []
    for _ in range(samples):
        while True:
            z = [Fraction(rng.randint(-height, height), rng.randint(1, 3)) for _ in range(n + 1)]
            if any(z):
                break
        u = positive_kernel_vector(power_matrix(z))
        if u is not None:
            counterexamples.append({"z": [str(v) for v in z], "u": [str(v) for v in u]})
    zero_ok = positive_kernel_vector(power_matrix([0] * (n + 1))) is not None
    return {
        "n": n,
        "samples": samples,
        "seed": seed,
        "counterexamples": counterexamples,
        "zero_admits_positive_kernel": zero_ok,
        "consistent": not counterexamples and zero_ok,
    }
