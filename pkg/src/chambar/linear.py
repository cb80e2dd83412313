"""Linear chambars: tuples of matrices A_k whose linear fields x -> A_k x satisfy the flow condition.

For linear fields ``X_k^l(x) = A_k^l x``, so the flow condition reads
``sum alpha_k A_k^l = 0`` for all ``l >= 1``.  Once every ``A_k`` is known to
be nilpotent the condition only has to be checked for ``l < n``, which turns
the infinite family into a finite certificate.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg
from .core import ExactCertificate, Refuted, VectorField, VerifiedToOrder
from .errors import ConstraintViolated, DenominatorZero, InputError
from .scalars import Cyclo, is_zero, scalar_from_json, scalar_to_json


def _sc(v):
    if isinstance(v, (Cyclo, complex)):
        return v
    return Cyclo.rational(Fraction(v))


@dataclass
class MatrixChambar:
    matrices: list
    weights: Optional[list] = None
    expected: Optional[dict] = None
    allow_zero: bool = False

    def __post_init__(self):
        self.matrices = [linalg.lift([[_sc(x) for x in row] for row in M]) for M in self.matrices]
        if not self.matrices:
            raise InputError("no matrices given")
        n = len(self.matrices[0])
        for M in self.matrices:
            if len(M) != n or any(len(r) != n for r in M):
                raise InputError("matrices must be square of one common size")
            if linalg.is_zero_matrix(M) and not self.allow_zero:
                raise InputError("zero matrices are not allowed")
        if self.weights is None:
            self.weights = [Cyclo.rational(1)] * len(self.matrices)
        self.weights = [_sc(w) for w in self.weights]

    @property
    def n(self) -> int:
        return len(self.matrices[0])

    @property
    def p(self) -> int:
        return len(self.matrices)

    def fields(self) -> list[VectorField]:
        return [VectorField.linear(M) for M in self.matrices]


def matrix_to_json(M) -> list:
    return [[scalar_to_json(x) for x in row] for row in M]


def matrix_from_json(rows) -> list:
    return [[scalar_from_json(x) for x in row] for row in rows]


def matrix_chambar_to_json(C: MatrixChambar) -> dict:
    out = {
        "matrices": [matrix_to_json(M) for M in C.matrices],
        "weights": [scalar_to_json(w) for w in C.weights],
    }
    if C.expected is not None:
        out["expected"] = C.expected
    return out


def matrix_chambar_from_json(obj) -> MatrixChambar:
    if isinstance(obj, list):
        obj = {"matrices": obj}
    if not isinstance(obj, dict) or "matrices" not in obj:
        raise InputError("expected an object with a 'matrices' list")
    mats = [matrix_from_json(M) for M in obj["matrices"]]
    w = obj.get("weights")
    return MatrixChambar(mats, [scalar_from_json(x) for x in w] if w else None, obj.get("expected"))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def nilpotency_index(A) -> Optional[int]:
    """Smallest k with A^k = 0; None means not nilpotent."""
    return linalg.nilpotency_index(linalg.lift(A))


def verify_linear(C: MatrixChambar):
    """Power sums first (l = 1..n p), then nilpotency of each matrix."""
    n, p = C.n, C.p
    powers = [M for M in C.matrices]
    for ell in range(1, n * p + 1):
        if ell > 1:
            powers = [linalg.matmul(P, M) for P, M in zip(powers, C.matrices)]
        S = linalg.zeros(n, n)
        for w, P in zip(C.weights, powers):
            S = linalg.matadd(S, linalg.matscale(P, w))
        for i in range(n):
            for j in range(n):
                if not is_zero(S[i][j]):
                    e = tuple(1 if k == j else 0 for k in range(n))
                    return Refuted(ell, i, e, S[i][j])
    indices = [linalg.nilpotency_index(M) for M in C.matrices]
    if all(k is not None for k in indices):
        return ExactCertificate(max(indices) - 1)
    return VerifiedToOrder(n * p, None)


def power_sum_traces(C: MatrixChambar, upto: Optional[int] = None) -> list:
    """tr(sum_k alpha_k A_k^l) for l = 1..upto (default n p)."""
    upto = upto or C.n * C.p
    out = []
    powers = list(C.matrices)
    for ell in range(1, upto + 1):
        if ell > 1:
            powers = [linalg.matmul(P, M) for P, M in zip(powers, C.matrices)]
        tr = Cyclo.rational(0)
        for w, P in zip(C.weights, powers):
            for i in range(C.n):
                tr = tr + w * P[i][i]
        out.append(tr)
    return out


def chambar_rank(C: MatrixChambar) -> int:
    return max(linalg.rank(M) for M in C.matrices)


# ---------------------------------------------------------------------------
# simultaneous strict triangularisation
# ---------------------------------------------------------------------------


@dataclass
class Embedded:
    basis: list  # columns of the change of basis S; S^-1 A S is strictly upper triangular
    flag_dims: list
    kind: str = field(default="Embedded", init=False)


@dataclass
class Obstruction:
    stage: int
    flag_dims: list
    commutator: Optional[dict] = None
    word: Optional[dict] = None
    kind: str = field(default="Obstruction", init=False)


def _annihilator(vectors: list, n: int) -> list:
    """Rows c with c . v = 0 for every v in ``vectors``."""
    if not vectors:
        return linalg.identity(n)
    return linalg.nullspace([list(v) for v in vectors])


def words(mats, length: int):
    """All products of ``length`` generators, with their index words."""
    for idx in itertools.product(range(len(mats)), repeat=length):
        P = mats[idx[0]]
        for i in idx[1:]:
            P = linalg.matmul(P, mats[i])
        yield idx, P


def heisenberg_embed_test(matrices) -> object:
    """Build V_k = {v : A_i v in V_(k-1)} until it fills the space or stalls."""
    mats = [linalg.lift(M) for M in matrices]
    n = len(mats[0])
    V: list = []  # basis of the current flag member, as vectors
    order: list = []  # basis vectors in the order they entered the flag
    dims = [0]
    stage = 0
    while len(V) < n:
        stage += 1
        C = _annihilator(V, n)
        stacked = []
        for A in mats:
            stacked.extend(linalg.matmul(C, A))
        new_space = linalg.nullspace(stacked) if stacked else linalg.identity(n)
        if len(new_space) <= len(V):
            return _obstruction(mats, stage, dims)
        # extend the old basis by new vectors, first-pivot first
        for v in new_space:
            if linalg.rank([list(x) for x in V] + [list(v)]) > len(V):
                V.append(v)
                order.append(v)
        dims.append(len(V))
    S = linalg.transpose(order)
    return Embedded(S, dims)


def _obstruction(mats, stage, dims) -> Obstruction:
    comm = None
    for i, j in itertools.combinations(range(len(mats)), 2):
        K = linalg.commutator(mats[i], mats[j])
        cp = linalg.charpoly(K)
        if not all(is_zero(c) for c in cp[:-1]):
            comm = {"pair": [i, j], "matrix": K, "charpoly": cp}
            break
    word = None
    n = len(mats[0])
    for idx, P in words(mats, n):
        if not linalg.is_zero_matrix(P):
            word = {"word": list(idx), "product": P}
            break
    return Obstruction(stage, dims, comm, word)


def words_vanish(mats, length: int) -> bool:
    return all(linalg.is_zero_matrix(P) for _, P in words([linalg.lift(M) for M in mats], length))


def two_variable_identity(A1, A2, A3, k: int, j: int) -> bool:
    """A1^k A2^j + A2^k A1^j == 2 A3^(k+j) (k, j >= 1) for a linear 3-chambar."""
    lhs = linalg.matadd(
        linalg.matmul(linalg.matpow(A1, k), linalg.matpow(A2, j)),
        linalg.matmul(linalg.matpow(A2, k), linalg.matpow(A1, j)),
    )
    rhs = linalg.matscale(linalg.matpow(A3, k + j), 2)
    return linalg.is_zero_matrix([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(lhs, rhs)])


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def _rand_q(rng: random.Random, lo: int = -5, hi: int = 5, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
        if q or not nonzero:
            return q


def sample_heisenberg_params(seed: int, p: int = 3):
    """Random rational (alpha, beta, gamma) on the quadric sum a = sum b = sum g = sum a b = 0."""
    rng = random.Random(seed)
    while True:
        alpha = [_rand_q(rng) for _ in range(p - 1)]
        alpha.append(-sum(alpha))
        gamma = [_rand_q(rng) for _ in range(p - 1)]
        gamma.append(-sum(gamma))
        # beta in the kernel of [[1,..,1],[alpha]]: random combination of a kernel basis
        ker = linalg.nullspace(linalg.lift([[1] * p, alpha]))
        if not ker:
            continue
        coeffs = [_rand_q(rng) for _ in ker]
        beta = [sum((c * v[i].as_fraction() for c, v in zip(coeffs, ker)), Fraction(0)) for i in range(p)]
        if all(a or b or g for a, b, g in zip(alpha, beta, gamma)):
            return alpha, beta, gamma


def random_invertible(n: int, rng: random.Random) -> list:
    while True:
        M = linalg.lift([[_rand_q(rng, -3, 3) for _ in range(n)] for _ in range(n)])
        if not is_zero(linalg.det(M)):
            return M


def conjugate(M, S) -> list:
    """S M S^-1."""
    return linalg.matmul(linalg.matmul(S, M), linalg.inverse(S))


def sample_family(family: str, params: Optional[dict] = None, seed: int = 0, beta_form: str = "printed") -> MatrixChambar:
    """Instantiate one of the three four-matrix families in dimension 3.

    ``family`` is ``"first"``, ``"second"`` or ``"third"`` (aliases ``6.3.1`` etc).
    Missing parameters are drawn from ``seed``.  For the first family the entry
    beta is derived from ``beta_form``: ``"printed"`` uses b^2/c + b^2/e^2,
    ``"entries"`` uses b^2/c + b^2/e (the value the matrix entries require).
    """
    rng = random.Random(seed)
    params = {k: _sc(v) for k, v in (params or {}).items()}
    fam = {"6.3.1": "first", "6.3.2": "second", "6.3.3": "third"}.get(family, family)

    def get(name, nonzero=False):
        if name not in params:
            params[name] = Cyclo.rational(_rand_q(rng, nonzero=nonzero))
        return params[name]

    z = Cyclo.rational(0)
    if fam == "first":
        a, b, c, d, e = get("a"), get("b", True), get("c", True), get("d"), get("e", True)
        if is_zero(c) or is_zero(e):
            raise DenominatorZero("c and e must be nonzero")
        derived = {
            "gamma": -a - d,
            "alpha": a * b / c - d * b / e,
            "beta": b * b / c + (b * b / (e * e) if beta_form == "printed" else b * b / e),
            "delta": -c - e,
        }
        for k, v in derived.items():
            if k in params and params[k] != v:
                raise ConstraintViolated(f"{k} must equal {v} for this family")
            params[k] = v
        al, be, ga, de = params["alpha"], params["beta"], params["gamma"], params["delta"]
        mats = [
            [[z, z, al], [z, z, be], [z, z, z]],
            [[z, ga, z], [z, z, z], [z, de, z]],
            [[z, a, -a * b / c], [z, b, -b * b / c], [z, c, -b]],
            [[z, d, d * b / e], [z, -b, -b * b / e], [z, e, b]],
        ]
        ok = beta_form != "printed" or is_zero(b) or e * e == e
        expected = {"certificate_kind": "ExactCertificate" if ok else "Refuted", "beta_form": beta_form}
    elif fam == "second":
        a, b, c = get("a"), get("b"), get("c")
        one = Cyclo.rational(1)
        mats = [
            [[z, z, z], [one, z, z], [z, one, z]],
            [[z, a, z], [z, z, z], [b, -c - 2, z]],
            [[z, -a, z], [z, z, z], [b, c, z]],
            [[z, z, z], [-one, z, z], [-2 * b, one, z]],
        ]
        expected = {"certificate_kind": "ExactCertificate"}
    elif fam == "third":
        a, b, c, al, be = get("a"), get("b"), get("c"), get("alpha"), get("beta")
        mats = [
            [[z, z, z], [a, z, b], [c, z, z]],
            [[z, al, z], [z, z, z], [-c, be, z]],
            [[z, z, z], [-a, z, -b], [c, z, z]],
            [[z, -al, z], [z, z, z], [-c, -be, z]],
        ]
        expected = {"certificate_kind": "ExactCertificate"}
    else:
        raise InputError(f"unknown family {family!r}")
    C = MatrixChambar(mats, None, expected, allow_zero=True)
    C.params = params
    return C
