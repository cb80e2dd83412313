import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from chambar import linalg
from chambar.catalog import gen_homogeneous_deg2
from chambar.core import Chambar, ExactCertificate, VectorField, affine_conjugate_chambar, check_barycentric
from chambar.errors import IdentityViolated, InputError, NonHomogeneous, WrongArity, WrongDegree
from chambar.homogeneous import (
    AllZero,
    Nonzero,
    classify_homog2,
    exact_divide,
    hamiltonian,
    homogeneous_degree,
    power_sum_obstruction,
    tangent_cone_data,
    verify_euler_relations,
)
from chambar.scalars import Cyclo

from conftest import field, jet_to_sympy, sympy_to_jet

x, y = sympy.symbols("x y")
j = Cyclo.zeta(3)


def sym(J):
    return jet_to_sympy(J, (x, y))


# -- tangent cone -----------------------------------------------------------


def test_cone_y_squared():
    t = tangent_cone_data(field(y**2, 0))
    assert sym(t.f) == -(y**3) and t.h.is_zero() and not t.radial_colinear


def test_cone_radial_multiple():
    t = tangent_cone_data(field(x**2, x * y))
    assert t.radial_colinear and t.f.is_zero() and t.h is None


def test_cone_x_squared_dy():
    t = tangent_cone_data(field(0, x**2))
    assert sym(t.f) == x**3
    assert t.h.is_zero()


quad = st.tuples(*[st.integers(-3, 3)] * 3).map(lambda c: sympy.sympify(c[0] * x**2 + c[1] * x * y + c[2] * y**2))


@given(quad, quad)
def test_cone_matches_sympy(A, B):
    if A == 0 and B == 0:
        return
    X = field(A, B)
    t = tangent_cone_data(X, 2)
    f = sympy.expand(x * B - y * A)
    assert sym(t.f) == f
    if f != 0:
        Xf = sympy.expand(A * sympy.diff(f, x) + B * sympy.diff(f, y))
        q, r = sympy.div(Xf, f, x, y)
        assert r == 0 and sym(t.h) == sympy.expand(q)
        rep = verify_euler_relations(X, t.f, t.h, 2)
        assert all(rep.values())


def test_wrong_degree():
    with pytest.raises(WrongDegree):
        tangent_cone_data(field(y**2, 0), d=3)
    with pytest.raises(NonHomogeneous):
        homogeneous_degree(field(y**2 + x, 0))


def test_euler_relations_examples():
    for X in (field(y**2, 0), field(0, x**2)):
        t = tangent_cone_data(X)
        assert all(verify_euler_relations(X, t.f, t.h, 2).values())
    H = hamiltonian(sympy_to_jet(-(y**3), (x, y)))
    assert [sym(c) for c in H.components] == [3 * y**2, 0]


def test_euler_corrupted_h():
    X = field(0, x**2)
    t = tangent_cone_data(X)
    with pytest.raises(IdentityViolated):
        verify_euler_relations(X, t.f, sympy_to_jet(x, (x, y)), 2)


def test_exact_divide():
    a = sympy_to_jet(sympy.expand((x - y) ** 2 * (x + 2 * y)), (x, y))
    b = sympy_to_jet(x - y, (x, y))
    assert sym(exact_divide(a, b)) == sympy.expand((x - y) * (x + 2 * y))
    assert exact_divide(b, sympy_to_jet(x + y, (x, y))) is None


# -- power sums -------------------------------------------------------------


def test_power_sum_examples():
    r = power_sum_obstruction([Cyclo.rational(1), j, j * j], 3)
    assert isinstance(r, Nonzero) and r.ell == 3 and r.value == 3
    assert isinstance(power_sum_obstruction([0, 0, 0]), AllZero)
    r = power_sum_obstruction([1, -1], 2)
    assert isinstance(r, Nonzero) and r.ell == 2
    with pytest.raises(InputError):
        power_sum_obstruction([1, 2, 3], 2)


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5))
def test_power_sum_newton(vals):
    r = power_sum_obstruction(vals)
    if any(vals):
        sums = [sum(v**k for v in vals) for k in range(1, len(vals) + 1)]
        first = next(k for k, s in enumerate(sums, 1) if s != 0)
        assert isinstance(r, Nonzero) and r.ell == first and r.value == sums[first - 1]
    else:
        assert isinstance(r, AllZero)


# -- classification ---------------------------------------------------------


def test_classify_identity_case():
    nf = classify_homog2(gen_homogeneous_deg2([1, j, j * j]))
    assert nf.kind == "NormalForm"
    assert nf.a[1] / nf.a[0] == j and nf.a[2] / nf.a[0] == j * j
    assert isinstance(check_barycentric(Chambar(nf.fields())), ExactCertificate)


@pytest.mark.parametrize("seed", range(10))
def test_classify_recovers_conjugated_family(seed):
    rng = random.Random(seed)
    while True:
        L = [[Fraction(rng.randint(-3, 3)) for _ in range(2)] for _ in range(2)]
        if L[0][0] * L[1][1] - L[0][1] * L[1][0]:
            break
    C = affine_conjugate_chambar(gen_homogeneous_deg2([1, j, j * j]), L, [0, 0])
    nf = classify_homog2(C)
    assert nf.a[1] / nf.a[0] == j and nf.a[2] / nf.a[0] == j * j
    # the returned basis change sends the input to the normal form
    back = affine_conjugate_chambar(C, nf.basis_change, [0, 0])
    for X, T in zip(back.fields, nf.fields()):
        assert all((a - b).is_zero() for a, b in zip(X.components, T.components))
    assert isinstance(check_barycentric(Chambar(nf.fields())), ExactCertificate)


def test_classify_case_b_not_a_chambar():
    B = Chambar([field(0, -(x**2)), field(-(y**2), 0), field(y**2, x**2)])
    r = classify_homog2(B)
    assert r.kind == "NotAChambar"
    w = r.witness
    assert w["ell"] == 2 and w["coord"] == 0


def test_classify_errors():
    with pytest.raises(WrongArity):
        classify_homog2(Chambar([field(y**2, 0), field(-(y**2), 0)]))
    with pytest.raises(WrongDegree):
        classify_homog2(Chambar([field(y**3, 0), field(-(y**3), 0), field(0, x**3)]))


@pytest.mark.parametrize("a", [(1, j, j * j), (2, -3, 1), (1, -1 - j, j)])
def test_sum_identities(a):
    ch = gen_homogeneous_deg2(a)
    cones = [tangent_cone_data(X, 2) for X in ch.fields]
    f = [c.f for c in cones]
    h = [c.h for c in cones]
    assert (f[0] + f[1] + f[2]).is_zero()
    assert (h[0] + h[1] + h[2]).is_zero()
    assert ((h[0] - h[2]) * f[0] - (h[2] - h[1]) * f[1]).is_zero()
