import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from chambar.scalars import Cyclo, _field_data

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def cyclo_strategy(m: int, height: int = 6):
    d = _field_data(m)[0] if m > 2 else 1
    coeff = st.fractions(min_value=-height, max_value=height, max_denominator=5)
    return st.lists(coeff, min_size=d, max_size=d).map(lambda cs: Cyclo.from_fractions(m, cs))


@pytest.fixture
def rng():
    return random.Random(12345)


def Q(v, m=1):
    return Cyclo.rational(Fraction(v), m)


def scalar_to_sympy(c):
    import sympy

    if isinstance(c, Cyclo):
        z = sympy.exp(2 * sympy.pi * sympy.I / c.m) if c.m > 2 else 1
        return sum(sympy.Rational(n, c.den) * z**k for k, n in enumerate(c.num))
    if isinstance(c, complex):
        return sympy.Float(c.real) + sympy.I * sympy.Float(c.imag)
    return sympy.nsimplify(c)


def jet_to_sympy(j, syms):
    """The jet as a sympy polynomial in the global coordinates ``syms``."""
    import sympy

    shifted = [s - scalar_to_sympy(b) for s, b in zip(syms, j.base)]
    expr = 0
    for e, c in j.terms.items():
        mono = 1
        for u, p in zip(shifted, e):
            mono *= u**p
        expr += scalar_to_sympy(c) * mono
    return sympy.expand(expr)


def sympy_to_jet(expr, syms, m=1):
    """Exact polynomial jet at the origin from a sympy polynomial with rational coefficients."""
    import sympy
    from fractions import Fraction as Fr
    from chambar.series import Jet

    poly = sympy.Poly(sympy.expand(expr), *syms)
    terms = {e: Cyclo.rational(Fr(int(c.p), int(c.q)), m) for e, c in poly.terms()}
    return Jet.from_poly(len(syms), terms, m=m)


def field(*polys, m=1):
    """Exact field from sympy expressions in x, y (, z)."""
    import sympy
    from chambar.core import VectorField

    syms = sympy.symbols("x y z")[: len(polys)]
    return VectorField([sympy_to_jet(p, syms, m) for p in polys])


# -- acceptance report ------------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_ac"):
        return
    if report.when == "call" or report.failed:
        prev = _ACCEPTANCE.get(name)
        _ACCEPTANCE[name] = "FAIL" if report.failed or prev == "FAIL" else ("SKIP" if report.skipped else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")

    def key(n):
        return int(n.split("_")[1][2:])

    for name in sorted(_ACCEPTANCE, key=key):
        label = name.split("_", 2)
        terminalreporter.write_line(f"{_ACCEPTANCE[name]} AC{key(name)} {label[2].replace('_', ' ')}")
