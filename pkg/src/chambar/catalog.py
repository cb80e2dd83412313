"""Constructors for the standard families of chambars, with their expected verdicts.

Every generator returns a :class:`~chambar.core.Chambar` whose ``expected``
attribute records the verdict kind that :func:`~chambar.core.check_barycentric`
should produce.  Parameter systems are checked before anything is built, and a
violated condition raises :class:`~chambar.errors.ConstraintViolated` naming the
offending sum.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .core import Chambar, Degree, VectorField, local_inverse, t_poly_degree
from .errors import (
    ConstraintViolated,
    DegreeMismatch,
    InputError,
    SumNotZero,
    ZeroField,
)
from .scalars import Cyclo, is_zero, make_scalar, scalar_to_json
from .series import Jet, affine_power, exp_affine, reciprocal_affine, var_jets


def _sc(v):
    if isinstance(v, (Cyclo, complex)):
        return v
    return Cyclo.rational(Fraction(v))


def _vec(v):
    return [_sc(x) for x in (v if isinstance(v, (list, tuple)) else [v])]


def _sum(values):
    it = iter(values)
    acc = next(it)
    for v in it:
        acc = acc + v
    return acc


def _expected(kind: str, **extra) -> dict:
    return {"certificate_kind": kind, **extra}


# ---------------------------------------------------------------------------
# constant chambars
# ---------------------------------------------------------------------------


def zero_subsets(vs: Sequence[Sequence]) -> list[tuple]:
    """Proper nonempty index subsets whose vectors sum to zero (p <= 12)."""
    p = len(vs)
    if p > 12:
        raise InputError("subset search is limited to p <= 12")
    vs = [_vec(v) for v in vs]
    out = []
    for r in range(1, p):
        for idx in itertools.combinations(range(p), r):
            if all(is_zero(_sum(vs[i][c] for i in idx)) for c in range(len(vs[0]))):
                out.append(idx)
    return out


def gen_constant(vs: Sequence[Sequence]) -> Chambar:
    vs = [_vec(v) for v in vs]
    n = len(vs[0])
    if any(len(v) != n for v in vs):
        raise InputError("all vectors need the same length")
    for c in range(n):
        if not is_zero(_sum(v[c] for v in vs)):
            raise SumNotZero(f"coordinate {c + 1} of the vectors sums to {_sum(v[c] for v in vs)}")
    base = Jet.origin(n)
    fields = [VectorField([Jet.constant(x, n, base) for x in v]) for v in vs]
    subsets = zero_subsets(vs) if len(vs) <= 12 else None
    exp = _expected(
        "ExactCertificate",
        t_degree_bound=1 if any(not is_zero(x) for v in vs for x in v) else 0,
        reducible=bool(subsets),
        zero_subsets=[list(s) for s in subsets or []],
    )
    return Chambar(fields, None, exp)


# ---------------------------------------------------------------------------
# rigid chambars from roots of unity
# ---------------------------------------------------------------------------


def z_nu_field(nu: int, base=1, order: int = 20, m: Optional[int] = None) -> VectorField:
    """Z_nu = nu x^((nu-1)/nu) d/dx as a jet at ``base`` (its flow is (x^(1/nu) + t)^nu)."""
    m = m or nu + 1
    b = (Cyclo.rational(Fraction(base), m),)
    comp = affine_power(1, 0, Fraction(nu - 1, nu), b, order).scale(Cyclo.rational(nu, m))
    return VectorField([comp], f"Z{nu}")


def jordan_field(n: int) -> VectorField:
    """Linear field of the nilpotent Jordan block of size n (flow of t-degree n - 1)."""
    A = [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)]
    return VectorField.linear(linalg.lift(A), name=f"J{n}")


def gen_rigid_root_of_unity(X: VectorField, m: Optional[int] = None, nu: Optional[int] = None) -> Chambar:
    """(X, sigma X, ..., sigma^(m-1) X) with sigma = zeta_m.

    For exact X the t-degree is computed; for jets ``nu`` must be supplied.  The
    Newton sums of sigma vanish up to m - 1, so ``m`` must be at least nu + 1.
    """
    if X.exact:
        d = t_poly_degree(X, bound=max(nu or 0, 16))
        if not isinstance(d, Degree):
            raise DegreeMismatch(f"field has no polynomial flow within the bound ({d.kind})")
        if nu is not None and nu != d.d:
            raise DegreeMismatch(f"declared degree {nu} but the flow has t-degree {d.d}")
        nu = d.d
    elif nu is None:
        raise DegreeMismatch("the t-degree of a jet field must be declared")
    m = m or nu + 1
    if m < nu + 1:
        raise DegreeMismatch(f"roots of order {m} cannot cancel a flow of t-degree {nu}")
    sigma = Cyclo.zeta(m)
    fields = [X.scale(sigma**k) for k in range(m)]
    if X.exact:
        exp = _expected("ExactCertificate", t_degree_bound=nu)
    else:
        exp = _expected("VerifiedToOrder")
    return Chambar(fields, None, exp)


# ---------------------------------------------------------------------------
# conjugated translations
# ---------------------------------------------------------------------------


def parabola_map() -> list[Jet]:
    """P(x, y) = (x + y^2, y)."""
    return [Jet.from_poly(2, {(1, 0): 1, (0, 2): 1}), Jet.from_poly(2, {(0, 1): 1})]


def translation_conditions(P: Sequence[Jet], vectors: Sequence[Sequence]) -> list[dict]:
    """Nonzero coefficients of sum_k [t^j] P(u + t a_k), j >= 1 (empty list: conditions hold)."""
    n = len(P)
    vectors = [_vec(a) for a in vectors]
    # variables (u_1..u_n, t)
    base = Jet.origin(n + 1)
    us = var_jets(n + 1, base)
    total = [Jet.zero(n + 1, base) for _ in range(n)]
    lifted = [Jet(n + 1, base, {e + (0,): c for e, c in f.terms.items()}, None) for f in P]
    for a in vectors:
        subs = [Jet(n + 1, base, {}, None) for _ in range(n)]
        for i in range(n):
            subs[i] = us[i] + us[n].scale(a[i])
        pulled = [g.compose(subs + [us[n]]) for g in lifted]
        total = [x + y for x, y in zip(total, pulled)]
    bad = []
    for i, comp in enumerate(total):
        for e, c in comp.sorted_terms():
            if e[n] >= 1:
                bad.append({"t_order": e[n], "component": i, "monomial": list(e[:n]), "sum": c})
    bad.sort(key=lambda d: (d["t_order"], d["component"]))
    return bad


def gen_conjugated_translations(P: Sequence[Jet], vectors: Sequence[Sequence], order: int = 12) -> Chambar:
    """Fields X_k(x) = DP(phi(x)) a_k with phi the local inverse of the polynomial map P."""
    n = len(P)
    if any(not f.exact for f in P):
        raise InputError("P must be an exact polynomial map")
    if any(not is_zero(f.const_term()) for f in P):
        raise InputError("P must fix the origin")
    bad = translation_conditions(P, vectors)
    if bad:
        b = bad[0]
        raise ConstraintViolated(
            f"the order-{b['t_order']} sum in component {b['component'] + 1} is nonzero "
            f"(coefficient of u^{b['monomial']} equals {b['sum']})"
        )
    phi = local_inverse(P, order)
    DP = [[f.deriv(j) for j in range(n)] for f in P]
    fields = []
    for a in vectors:
        a = _vec(a)
        comps = []
        for i in range(n):
            acc = Jet.zero(n, P[0].base)
            for j in range(n):
                if not is_zero(a[j]):
                    acc = acc + DP[i][j].scale(a[j])
            comps.append(acc.compose(phi))
        fields.append(VectorField(comps))
    degP = max(f.total_degree() for f in P)
    if all(f.exact for f in phi):
        exp = _expected("ExactCertificate", t_degree_bound=degP)
    else:
        exp = _expected("VerifiedToOrder")
    return Chambar(fields, None, exp)


def parabola_first_integrals(a: Sequence, b: Sequence) -> list[Jet]:
    """f_k = a_k y + b_k y^2 - b_k x, conserved along the k-th parabola field."""
    out = []
    for ak, bk in zip(_vec(a), _vec(b)):
        out.append(Jet.from_poly(2, {(0, 1): ak, (0, 2): bk, (1, 0): -bk}))
    return out


# ---------------------------------------------------------------------------
# polynomial translations along x
# ---------------------------------------------------------------------------


def solve_polynomial_family(a: Sequence, nu: int = 2) -> dict:
    """Linear system in the coefficients of P_k, for fields a_k d/dx + P_k(x) d/dy.

    The condition is sum_k P_k(x + a_k t) = 0 identically in (x, t).  Returns the
    rank, a kernel basis (the particular solution is zero), and the dimension of
    the solution component through ``a``: kernel dimension plus the dimension of
    the stratum of speed vectors with the same coincidence pattern.
    """
    a = _vec(a)
    p = len(a)
    if not is_zero(_sum(a)):
        raise SumNotZero("translation speeds must sum to zero")
    unknowns = [(k, d) for k in range(p) for d in range(nu + 1)]  # coefficient of x^d in P_k
    rows = []
    labels = []
    for i in range(nu + 1):  # power of x
        for j in range(nu + 1 - i):  # power of t
            row = []
            for k, d in unknowns:
                # x^d with x -> x + a t contributes binom(d, j) a^j x^(d-j) t^j
                if d - j == i and j <= d:
                    from math import comb

                    row.append(a[k] ** j * comb(d, j))
                else:
                    row.append(Cyclo.rational(0))
            rows.append(row)
            labels.append({"x_power": i, "t_power": j})
    rank = linalg.rank(rows)
    kernel = linalg.nullspace(rows)
    # stratum of speed vectors with the same equality pattern (sum fixed to zero)
    classes = []
    for x in a:
        if not any(x == c for c in classes):
            classes.append(x)
    if len(classes) == 1:
        stratum = 0
    else:
        stratum = len(classes) - 1
    branch = "distinct" if len(classes) == p else ("zero" if len(classes) == 1 else "coincident")
    inv_unknowns = [f"P{k + 1}[x^{d}]" for k, d in unknowns]
    return {
        "equations": len(rows),
        "rank": rank,
        "kernel_dim": len(kernel),
        "kernel_basis": kernel,
        "unknowns": inv_unknowns,
        "particular_solution": [Cyclo.rational(0)] * len(unknowns),
        "branch": branch,
        "stratum_dim": stratum,
        "component_dim": len(kernel) + stratum,
    }


def polynomial_family_chambar(a: Sequence, coeffs: Sequence[Sequence]) -> Chambar:
    """Fields a_k d/dx + P_k(x) d/dy from the coefficient lists of P_k."""
    fields = []
    for ak, cs in zip(_vec(a), coeffs):
        comps = [Jet.from_poly(2, {(0, 0): ak}), Jet.from_poly(2, {(d, 0): c for d, c in enumerate(_vec(cs))})]
        fields.append(VectorField(comps))
    return Chambar(fields, None, _expected("ExactCertificate"))


# ---------------------------------------------------------------------------
# lifts of translations under the blow-up chart
# ---------------------------------------------------------------------------


def blowup_conditions(a) -> list[str]:
    a = [_vec(r) for r in a]
    n = len(a[0])
    bad = []
    for l in range(n):
        s = _sum(r[l] for r in a)
        if not is_zero(s):
            bad.append(f"sum of speeds in coordinate {l + 1} is {s}")
    for l in range(1, n):
        s = _sum(r[0] * r[l] for r in a)
        if not is_zero(s):
            bad.append(f"sum of a_k1 * a_k{l + 1} is {s}")
    return bad


def gen_blowup_birational(a, base=None, order: int = 12) -> Chambar:
    """Lift of translations under (x_1, x_2, ..) -> (x_1, x_1 x_2, ..): X_k = a_k1 d1 + sum (a_k1 x_l / x_1 + a_kl x_1) d_l."""
    a = [_vec(r) for r in a]
    n = len(a[0])
    bad = blowup_conditions(a)
    if bad:
        raise ConstraintViolated(bad[0])
    if base is None:
        base = [1] + [0] * (n - 1)
    base = tuple(_sc(b) for b in base)
    if is_zero(base[0]):
        raise InputError("the chart needs x_1 != 0 at the basepoint")
    xs = var_jets(n, base, order)
    inv1 = reciprocal_affine(1, 0, base, order, nvars=n, var=0)
    fields = []
    for r in a:
        comps = [Jet.constant(r[0], n, base, order)]
        for l in range(1, n):
            comps.append((xs[l] * inv1).scale(r[0]) + xs[0].scale(r[l]))
        fields.append(VectorField(comps))
    return Chambar(fields, None, _expected("VerifiedToOrder", t_degree_bound=2))


# ---------------------------------------------------------------------------
# exponential family
# ---------------------------------------------------------------------------


def gen_exponential(a: Sequence, b: Sequence[Sequence], lam: Sequence, base=(0, 0), order: int = 12) -> Chambar:
    """Fields a_k d/dx + b_kj exp(lam_k x) d/dy for every k and j."""
    a, lam = _vec(a), _vec(lam)
    b = [_vec(r) for r in b]
    if not (len(a) == len(b) == len(lam)):
        raise InputError("a, b and lambda need one entry per block")
    if any(is_zero(x) for x in a) or any(is_zero(x) for x in lam):
        raise InputError("speeds and rates must be nonzero")
    total = _sum(ak * len(bk) for ak, bk in zip(a, b))
    if not is_zero(total):
        raise ConstraintViolated(f"sum of q_k a_k is {total}")
    for k, bk in enumerate(b):
        s = _sum(bk)
        if not is_zero(s):
            raise ConstraintViolated(f"sum of b_{k + 1},j is {s}")
    base = tuple(_sc(v) for v in base)
    fields = []
    for ak, bk, lk in zip(a, b, lam):
        e = exp_affine([lk, 0], base, order, nvars=2)
        for bkj in bk:
            fields.append(VectorField([Jet.constant(ak, 2, base, order), e.scale(bkj)]))
    return Chambar(fields, None, _expected("VerifiedToOrder"))


def exponential_first_integrals(a, b, lam, base=(0, 0), order: int = 12) -> list[Jet]:
    """lam_k a_k y - b_kj exp(lam_k x), in the same order as the generated fields."""
    a, lam = _vec(a), _vec(lam)
    b = [_vec(r) for r in b]
    base = tuple(_sc(v) for v in base)
    y = var_jets(2, base, order)[1]
    out = []
    for ak, bk, lk in zip(a, b, lam):
        e = exp_affine([lk, 0], base, order, nvars=2)
        for bkj in bk:
            out.append(y.scale(lk * ak) - e.scale(bkj))
    return out


# ---------------------------------------------------------------------------
# linear fields in the Heisenberg algebra
# ---------------------------------------------------------------------------


def heisenberg_matrix(alpha, beta, gamma) -> list[list]:
    """M(alpha, beta, gamma): alpha at (1,2), beta at (2,3), gamma at (1,3)."""
    z = Cyclo.rational(0)
    alpha, beta, gamma = _sc(alpha), _sc(beta), _sc(gamma)
    return [[z, alpha, gamma], [z, z, beta], [z, z, z]]


def heisenberg_conditions(alpha, beta, gamma) -> list[str]:
    alpha, beta, gamma = _vec(alpha), _vec(beta), _vec(gamma)
    bad = []
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        s = _sum(v)
        if not is_zero(s):
            bad.append(f"sum of {name} is {s}")
    s = _sum(x * y for x, y in zip(alpha, beta))
    if not is_zero(s):
        bad.append(f"sum of alpha*beta is {s}")
    return bad


def gen_linear_heisenberg(alpha, beta, gamma) -> Chambar:
    bad = heisenberg_conditions(alpha, beta, gamma)
    if bad:
        raise ConstraintViolated(bad[0])
    mats = [heisenberg_matrix(x, y, z) for x, y, z in zip(_vec(alpha), _vec(beta), _vec(gamma))]
    fields = [VectorField.linear(M) for M in mats]
    ch = Chambar(fields, None, _expected("ExactCertificate", t_degree_bound=2))
    ch.matrices = mats
    return ch


# ---------------------------------------------------------------------------
# homogeneous quadratic fields
# ---------------------------------------------------------------------------


def gen_homogeneous_deg2(a: Sequence) -> Chambar:
    """X_j = a_j y^2 d/dx."""
    a = _vec(a)
    if any(is_zero(x) for x in a):
        raise ZeroField("every coefficient must be nonzero (a zero field is not allowed)")
    if not is_zero(_sum(a)):
        raise SumNotZero(f"coefficients sum to {_sum(a)}")
    fields = [VectorField([Jet.from_poly(2, {(0, 2): x}), Jet.from_poly(2, {})]) for x in a]
    return Chambar(fields, None, _expected("ExactCertificate", t_degree_bound=1))


FAMILIES = (
    "constant",
    "rigid",
    "translations",
    "polyfamily",
    "blowup",
    "exponential",
    "heisenberg",
    "homog2",
)
