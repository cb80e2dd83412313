from fractions import Fraction

import pytest
import sympy

from chambar.catalog import (
    exponential_first_integrals,
    gen_blowup_birational,
    gen_conjugated_translations,
    gen_constant,
    gen_exponential,
    gen_homogeneous_deg2,
    gen_linear_heisenberg,
    gen_rigid_root_of_unity,
    jordan_field,
    parabola_first_integrals,
    parabola_map,
    polynomial_family_chambar,
    solve_polynomial_family,
    z_nu_field,
    zero_subsets,
)
from chambar.core import ExactCertificate, Refuted, VerifiedToOrder, check_barycentric, lie_apply, t_poly_degree
from chambar.errors import ConstraintViolated, DegreeMismatch, SumNotZero, ZeroField
from chambar.scalars import Cyclo
from chambar.series import Jet, var_jets

from conftest import jet_to_sympy

x, y = sympy.symbols("x y")
j = Cyclo.zeta(3)


def kind(v):
    return type(v).__name__


# -- constant ---------------------------------------------------------------


def brute_zero_subsets(vs):
    """Independent subset-sum oracle over exact integers."""
    from itertools import combinations

    p = len(vs)
    return [c for r in range(1, p) for c in combinations(range(p), r) if all(sum(vs[i][k] for i in c) == 0 for k in range(len(vs[0])))]


@pytest.mark.parametrize(
    "vs,reducible",
    [([[1], [-2], [1]], False), ([[1, 0], [0, 1], [-1, -1]], False), ([[1], [-1], [2], [-2]], True)],
)
def test_gen_constant(vs, reducible):
    ch = gen_constant(vs)
    assert ch.expected["reducible"] is reducible
    assert [tuple(s) for s in ch.expected["zero_subsets"]] == brute_zero_subsets(vs)
    assert kind(check_barycentric(ch)) == ch.expected["certificate_kind"] == "ExactCertificate"


def test_gen_constant_requires_zero_sum():
    with pytest.raises(SumNotZero):
        gen_constant([[1], [1]])


def test_zero_subsets_with_roots_of_unity():
    assert zero_subsets([[1], [j], [j * j], [-1], [-j], [-j * j]])[:3] == [(0, 3), (1, 4), (2, 5)]


# -- rigid ------------------------------------------------------------------


def test_rigid_sqrt():
    ch = gen_rigid_root_of_unity(z_nu_field(2), nu=2)
    assert [f.components[0].const_term() for f in ch.fields] == [2, 2 * j, 2 * j * j]
    assert isinstance(check_barycentric(ch, 12), VerifiedToOrder)


def test_rigid_jordan():
    ch = gen_rigid_root_of_unity(jordan_field(3))
    v = check_barycentric(ch)
    assert isinstance(v, ExactCertificate) and v.t_degree_bound == 2


def test_rigid_z5_six_chambar():
    ch = gen_rigid_root_of_unity(z_nu_field(5, order=12), nu=5)
    assert ch.p == 6
    assert isinstance(check_barycentric(ch, 8), VerifiedToOrder)


@pytest.mark.parametrize("nu", [1, 2, 3, 4, 5])
def test_rigid_newton_sums(nu):
    ch = gen_rigid_root_of_unity(jordan_field(nu + 1))
    sig = [f.components[0].coeff((0, 1) + (0,) * (nu - 1)) for f in ch.fields]
    for ell in range(1, nu + 1):
        assert sum((s**ell for s in sig), Cyclo.rational(0, nu + 1)).is_zero()


def test_rigid_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        gen_rigid_root_of_unity(jordan_field(3), m=2)
    with pytest.raises(DegreeMismatch):
        gen_rigid_root_of_unity(z_nu_field(2))


def test_z_nu_jet_matches_sympy():
    Z = z_nu_field(3, base=8, order=5, m=4)
    oracle = sympy.series(3 * (8 + x) ** sympy.Rational(2, 3), x, 0, 6).removeO()
    got = jet_to_sympy(Z.components[0], (x,)).subs(x, x + 8)
    assert sympy.expand(got - oracle) == 0


# -- conjugated translations ------------------------------------------------


def test_parabola_translations():
    ch = gen_conjugated_translations(parabola_map(), [[0, 1], [0, j], [0, j * j]])
    for f, b in zip(ch.fields, [1, j, j * j]):
        assert f.components[0] == Jet.from_poly(2, {(0, 1): 2 * b})
        assert f.components[1] == Jet.from_poly(2, {(0, 0): b})
    v = check_barycentric(ch)
    assert isinstance(v, ExactCertificate)
    for f in ch.fields:
        assert t_poly_degree(f).d <= 2


def test_hexagonal_web_first_integrals():
    a = b = [1, j, j * j]
    ch = gen_conjugated_translations(parabola_map(), list(zip(a, b)))
    fs = parabola_first_integrals(a, b)
    assert all(lie_apply(X, f).is_zero() for X, f in zip(ch.fields, fs))
    assert (fs[0] + fs[1] + fs[2]).is_zero()


def test_translation_constraint_violated():
    with pytest.raises(ConstraintViolated):
        gen_conjugated_translations(parabola_map(), [[0, 1], [0, 1], [0, -2]])


def test_conjugated_field_formula_matches_sympy():
    # X_k = DP(phi) a_k with phi = P^{-1} = (x - y^2, y)
    a = (2, 1)
    ch = gen_conjugated_translations(parabola_map(), [a, (2 * j, j), (2 * j * j, j * j)])
    P = sympy.Matrix([x + y**2, y])
    DP = P.jacobian([x, y])
    phi = {x: x - y**2, y: y}
    oracle = (DP.subs(phi, simultaneous=True) * sympy.Matrix(a)).applyfunc(sympy.expand)
    got = [jet_to_sympy(c, (x, y)) for c in ch.fields[0].components]
    assert got == list(oracle)


# -- polynomial family ------------------------------------------------------


def sympy_family_rank(a, nu=2):
    t = sympy.Symbol("t")
    cs = sympy.symbols(f"c0:{len(a) * (nu + 1)}")
    total = 0
    for k, ak in enumerate(a):
        total += sum(cs[k * (nu + 1) + d] * (x + ak * t) ** d for d in range(nu + 1))
    eqs = sympy.Poly(sympy.expand(total), x, t).coeffs()
    M = sympy.Matrix([[sympy.diff(e, c) for c in cs] for e in eqs])
    return M.rank(), len(cs) - M.rank()


@pytest.mark.parametrize("a", [(1, 2, -3), (0, 0, 0), (1, 1, -2)])
def test_polynomial_family_rank_matches_sympy(a):
    r = solve_polynomial_family(a)
    rank, kdim = sympy_family_rank(a)
    assert r["rank"] == rank and r["kernel_dim"] == kdim


def test_polynomial_family_dimensions():
    assert solve_polynomial_family((1, 2, -3))["component_dim"] == 5
    assert solve_polynomial_family((0, 0, 0))["component_dim"] == 6


def test_polynomial_family_kernel_gives_chambars():
    a = (1, 2, -3)
    r = solve_polynomial_family(a)
    for vec in r["kernel_basis"]:
        coeffs = [vec[3 * k : 3 * k + 3] for k in range(3)]
        ch = polynomial_family_chambar(a, coeffs)
        assert isinstance(check_barycentric(ch), ExactCertificate)


# -- blow-up lifts ----------------------------------------------------------


@pytest.mark.parametrize("a", [[[1, 0], [-1, 0], [0, 1], [0, -1]], [[1, 1], [-1, 1], [0, -2]]])
def test_blowup_valid(a):
    ch = gen_blowup_birational(a, base=[2, 3], order=10)
    assert not isinstance(check_barycentric(ch, 6), Refuted)


def test_blowup_fields_lift_translations():
    rows = [[1, 1], [-1, 1], [0, -2]]
    ch = gen_blowup_birational(rows, base=[2, 3], order=8)
    X1, X2 = var_jets(2, ch.base, 8)
    for (a1, a2), f in zip(rows, ch.fields):
        # x * X_2 = a1 y + a2 x^2 as jets, so X_2 = a1 y / x + a2 x
        lhs = X1 * f.components[1]
        rhs = X2.scale(Cyclo.rational(a1)) + (X1 * X1).scale(Cyclo.rational(a2))
        assert (lhs - rhs).truncate(lhs.order).is_zero()
        # and the chart (x, y) -> (x, y / x) sends the field to the constant (a1, a2)
        comps = [sympy.Integer(a1), a1 * y / x + a2 * x]
        pushed = sympy.diff(y / x, x) * comps[0] + sympy.diff(y / x, y) * comps[1]
        assert sympy.simplify(pushed - a2) == 0


def test_blowup_constraint():
    with pytest.raises(ConstraintViolated):
        gen_blowup_birational([[1, 1], [-1, 1], [0, -1]])
    with pytest.raises(ConstraintViolated):
        gen_blowup_birational([[1, 2], [1, -1], [-2, -1]])


# -- exponential ------------------------------------------------------------


def test_exponential_family():
    ch = gen_exponential([1, -1], [[1, -1], [1, -1]], [1, 1])
    assert ch.p == 4
    v = check_barycentric(ch, 8)
    assert isinstance(v, VerifiedToOrder) and v.K_t == 8
    fi = exponential_first_integrals([1, -1], [[1, -1], [1, -1]], [1, 1])
    for X, f in zip(ch.fields, fi):
        d = lie_apply(X, f)
        assert d.truncate(d.order).is_zero()


def test_exponential_jets_match_sympy():
    ch = gen_exponential([2, -1, -1], [[1, -1], [3, -3], [1, -1]], [1, 2, -1], order=6)
    e = jet_to_sympy(ch.fields[2].components[1], (x, y))
    oracle = sympy.series(3 * sympy.exp(2 * x), x, 0, 7).removeO()
    assert sympy.expand(e - oracle) == 0


def test_exponential_constraint():
    with pytest.raises(ConstraintViolated):
        gen_exponential([1, -1], [[1, 0], [1, -1]], [1, 1])


# -- Heisenberg -------------------------------------------------------------


def test_heisenberg_examples():
    ch = gen_linear_heisenberg([1, -1, 0], [1, 1, -2], [0, 0, 0])
    assert isinstance(check_barycentric(ch), ExactCertificate)
    ch = gen_linear_heisenberg([1, j, j * j], [1, j, j * j], [0, 0, 0])
    assert isinstance(check_barycentric(ch), ExactCertificate)
    with pytest.raises(ConstraintViolated):
        gen_linear_heisenberg([1, 1, -2], [1, 1, -2], [0, 0, 0])


def test_heisenberg_square_identity():
    # M(a, b, c)^2 = M(0, 0, a b), checked with sympy
    a, b, c = sympy.symbols("a b c")
    M = sympy.Matrix([[0, a, c], [0, 0, b], [0, 0, 0]])
    assert M**2 == sympy.Matrix([[0, 0, a * b], [0, 0, 0], [0, 0, 0]])
    ch = gen_linear_heisenberg([1, -1, 0], [1, 1, -2], [1, 0, -1])
    assert ch.matrices[0][0][1] == 1 and ch.matrices[0][1][2] == 1 and ch.matrices[0][0][2] == 1


# -- homogeneous quadratic --------------------------------------------------


@pytest.mark.parametrize("a", [(1, j, j * j), (2, -3, 1)])
def test_homog2_family(a):
    ch = gen_homogeneous_deg2(a)
    assert isinstance(check_barycentric(ch), ExactCertificate)
    for X, aj in zip(ch.fields, a):
        xj, yj = var_jets(2, ch.base)
        f = xj * lie_apply(X, yj) - yj * lie_apply(X, xj)
        aj = aj if isinstance(aj, Cyclo) else Cyclo.rational(aj)
        assert f == (yj**3).scale(-aj)
        assert lie_apply(X, f).is_zero()


def test_homog2_errors():
    with pytest.raises(ZeroField):
        gen_homogeneous_deg2((1, -1, 0))
    with pytest.raises(SumNotZero):
        gen_homogeneous_deg2((1, 1, 1))


@pytest.mark.parametrize(
    "ch,K",
    [
        (gen_constant([[1], [-2], [1]]), 4),
        (gen_rigid_root_of_unity(jordan_field(4)), 6),
        (gen_linear_heisenberg([1, -1, 0], [1, 1, -2], [0, 0, 0]), 4),
        (gen_homogeneous_deg2((2, -3, 1)), 4),
        (gen_exponential([1, -1], [[1, -1], [1, -1]], [1, 1]), 6),
        (gen_conjugated_translations(parabola_map(), [[0, 1], [0, j], [0, j * j]]), 4),
    ],
)
def test_expected_block_matches_verdict(ch, K):
    assert kind(check_barycentric(ch, K)) == ch.expected["certificate_kind"]
