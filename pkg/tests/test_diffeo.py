import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from chambar.core import Refuted, check_barycentric
from chambar.diffeo import (
    barycentric_defect,
    check_compatible,
    kernel_basis,
    kernel_span,
    make_operator,
    mn_power_membership,
    positive_kernel_vector,
    power_matrix,
    power_sum_symbol,
    pushforward_consistency,
    random_compatible_map,
    smallest_power,
    span_membership,
    span_rank,
    vandermonde_positivity_check,
    verify_membership_certificate,
)
from chambar.errors import InputError
from chambar.scalars import Cyclo
from chambar.series import DiffOperator, Jet, var_jets

from conftest import jet_to_sympy, sympy_to_jet

x, y = sympy.symbols("x y")
j = Cyclo.zeta(3)


def apply_sympy(op: DiffOperator, f, syms=(x, y)):
    """Independent application of a constant-coefficient operator with sympy."""
    out = 0
    for e, c in op.terms.items():
        g = f
        for s, k in zip(syms, e):
            if k:
                g = sympy.diff(g, s, k)
        out += sympy.nsimplify(c.as_fraction()) * g
    return sympy.expand(out)


def sympy_defect(phi):
    t = sympy.Symbol("t")
    return sympy.expand(phi.subs(x, x + t) + phi.subs(y, y + t) + phi.subs({x: x - t, y: y - t}, simultaneous=True) - 3 * phi)


# -- operators --------------------------------------------------------------


def test_operator_shapes():
    S, T = make_operator("S"), make_operator("T")
    assert S.terms == {(2, 0): 1, (1, 1): 1, (0, 2): 1}
    assert T.terms == {(2, 1): 1, (1, 2): 1}
    assert make_operator("T_k", k=2).terms == {(2, 0): 2, (1, 1): 2, (0, 2): 2}


@pytest.mark.parametrize("k", range(2, 8))
def test_t_k_is_multinomial_expansion(k):
    dx, dy = sympy.symbols("dx dy")
    oracle = sympy.Poly(dx**k + dy**k + (-1) ** k * (dx + dy) ** k, dx, dy)
    got = make_operator("T_k", k=k).terms
    assert {e: int(c.as_fraction()) for e, c in got.items()} == {e: int(c) for e, c in oracle.terms()}


def test_t_k_requires_k_at_least_two():
    with pytest.raises(InputError):
        make_operator("T_k", k=1)


def test_dx_compose_s_identity():
    dx = DiffOperator.partial(0, 2)
    assert dx * make_operator("S") == DiffOperator.partial(0, 2, 3) + make_operator("T")


@pytest.mark.parametrize("k", range(2, 7))
def test_symbol_of_t_k_on_exponentials(k):
    z1, z2 = sympy.symbols("z1 z2")
    e = sympy.exp(z1 * x + z2 * y)
    got = sympy.simplify(apply_sympy(make_operator("T_k", k=k), e) / e)
    P = jet_to_sympy(power_sum_symbol(k, 2), sympy.symbols("z1 z2"))
    assert sympy.expand(got - P) == 0


def test_hamiltonian_operator():
    f = sympy_to_jet(x**2 * y, (x, y))
    H = make_operator("Hf", f=f)
    assert [jet_to_sympy(c, (x, y)) for c in H.components] == [-(x**2), 2 * x * y]


# -- kernels ----------------------------------------------------------------


def test_kernel_s_t_is_six_dimensional():
    kb = kernel_basis([make_operator("S"), make_operator("T")], 2, 6)
    assert len(kb) == 6
    L = kernel_span()
    assert span_rank(kb) == span_rank(L) == span_rank(kb + L) == 6
    assert max(f.total_degree() for f in kb) == 3


def test_kernel_dimension_matches_sympy_nullspace():
    monos = [x**a * y**b for a in range(7) for b in range(7 - a)]
    rows = []
    for op in (make_operator("S"), make_operator("T")):
        imgs = [sympy.Poly(apply_sympy(op, m), x, y) if apply_sympy(op, m) != 0 else None for m in monos]
        targets = sorted({e for p in imgs if p is not None for e in p.monoms()})
        for t in targets:
            rows.append([p.coeff_monomial(t) if p is not None else 0 for p in imgs])
    assert len(monos) - sympy.Matrix(rows).rank() == 6


def test_kernel_span_polynomials_are_killed():
    for f in kernel_span():
        assert make_operator("S", m=3).apply(f).is_zero()
        assert make_operator("T", m=3).apply(f).is_zero()


def test_kernel_constants_only():
    assert len(kernel_basis([make_operator("S")], 2, 0)) == 1


def test_kernel_of_all_t_k_is_finite_degree():
    kb = kernel_basis([make_operator("T_k", k=k) for k in range(2, 7)], 2, 8)
    assert kb and max(f.total_degree() for f in kb) <= 3


def test_kernel_elements_satisfy_the_identity():
    for f in kernel_basis([make_operator("S"), make_operator("T")], 2, 6):
        assert barycentric_defect(f).is_zero()
    assert sympy_defect(x * y * (y - x)) == 0


# -- compatibility ----------------------------------------------------------


def test_compatible_examples():
    X, Y = var_jets(2, Jet.origin(2))
    assert check_compatible([X + (Y + X.scale(j)) ** 2, Y]).kind == "Compatible"
    assert check_compatible([X.scale(2) + Y + 1, X - Y]).kind == "Compatible"
    w = check_compatible([X + X * X, Y])
    assert w.kind == "Incompatible"
    assert w.witness["operator"] == "S" and w.witness["value"] == Jet.constant(Cyclo.rational(2), 2, Jet.origin(2))


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3), max_size=5).map(
    lambda d: sympy.sympify(sum(c * x**a * y**b for (a, b), c in d.items()))
)


@given(polys)
def test_defect_matches_sympy(phi):
    t = sympy.Symbol("t")
    d = barycentric_defect(sympy_to_jet(phi, (x, y)))
    assert jet_to_sympy(d, (t, x, y)) == sympy_defect(phi)


@given(polys)
def test_compatibility_agrees_with_span_membership(phi):
    F = [sympy_to_jet(x + phi, (x, y)), sympy_to_jet(y, (x, y))]
    assert (check_compatible(F).kind == "Compatible") == span_membership(F)


@pytest.mark.parametrize("seed", range(3))
def test_random_compatible_maps_push_forward_to_chambars(seed):
    rng = random.Random(seed)
    F = random_compatible_map(rng)
    assert check_compatible(F).kind == "Compatible"
    assert span_membership(F)
    _, verdict = pushforward_consistency(F, rng)
    assert not isinstance(verdict, Refuted)


def test_incompatible_map_pushes_forward_to_non_chambar():
    X, Y = var_jets(2, Jet.origin(2))
    _, verdict = pushforward_consistency([X + X * X, Y], random.Random(3))
    assert isinstance(verdict, Refuted)


# -- power ideal ------------------------------------------------------------


def test_membership_one_variable():
    r = mn_power_membership(1, 2)
    assert r.kind == "Contained" and verify_membership_certificate(1, 2, r)
    assert power_sum_symbol(2, 1) == Jet.from_poly(1, {(2,): 2})


def test_membership_degree_one_fails():
    assert mn_power_membership(2, 1).kind == "NotFoundWithin"


def test_membership_two_variables():
    p = smallest_power(2)
    assert p is not None
    r = mn_power_membership(2, p)
    assert verify_membership_certificate(2, p, r)
    assert mn_power_membership(2, p - 1).kind == "NotFoundWithin"


def test_membership_certificate_against_sympy():
    p = smallest_power(2)
    r = mn_power_membership(2, p)
    z = sympy.symbols("z1 z2")
    for jj, cof in enumerate(r.certificates):
        total = sum(jet_to_sympy(c, z) * jet_to_sympy(power_sum_symbol(k, 2), z) for k, c in cof.items())
        assert sympy.expand(total - z[jj] ** p) == 0


# -- positivity -------------------------------------------------------------


def test_power_matrix_direct():
    Q = power_matrix([1, -1])
    u = [Cyclo.rational(1), Cyclo.rational(1)]
    Qu = [sum((a * b for a, b in zip(row, u)), Cyclo.rational(0)) for row in Q]
    assert Qu == [0, 2]
    assert positive_kernel_vector(Q) is None
    assert positive_kernel_vector(power_matrix([0, 0])) is not None


@pytest.mark.parametrize("n", [1, 2])
def test_vandermonde_positivity(n):
    r = vandermonde_positivity_check(n, samples=300, seed=n)
    assert r["consistent"] and not r["counterexamples"]
