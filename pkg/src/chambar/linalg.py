"""Small dense linear algebra over exact cyclotomic scalars (or complex with a tolerance).

Matrices are lists of row lists.  Everything here is deliberately plain: the
matrices met in this package are tiny, and exact answers matter more than speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import DimensionMismatch, DivisionByZero
from .scalars import Cyclo, is_zero, magnitude


def one_of(sample) -> object:
    if isinstance(sample, complex):
        return 1 + 0j
    if isinstance(sample, Cyclo):
        return Cyclo.rational(1, sample.m)
    return Cyclo.rational(1)


def zero_of(sample) -> object:
    if isinstance(sample, complex):
        return 0j
    if isinstance(sample, Cyclo):
        return Cyclo.rational(0, sample.m)
    return Cyclo.rational(0)


def _sample(M):
    for row in M:
        for x in row:
            if isinstance(x, (Cyclo, complex)):
                return x
    return Cyclo.rational(0)


def lift(M) -> list[list]:
    """Copy into a matrix of scalars, turning ints/Fractions into exact rationals."""
    out = []
    for row in M:
        out.append([Cyclo.rational(Fraction(x)) if isinstance(x, (int, Fraction)) else x for x in row])
    return out


def identity(n: int, sample=None) -> list[list]:
    one = one_of(sample)
    zero = zero_of(sample)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(r: int, c: int, sample=None) -> list[list]:
    zero = zero_of(sample)
    return [[zero] * c for _ in range(r)]


def matmul(A, B) -> list[list]:
    if not A or not B:
        return []
    if len(A[0]) != len(B):
        raise DimensionMismatch(f"cannot multiply {len(A)}x{len(A[0])} by {len(B)}x{len(B[0])}")
    zero = zero_of(_sample(A))
    Bt = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in Bt:
            acc = zero
            for a, b in zip(row, col):
                if not is_zero(a) and not is_zero(b):
                    acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def matadd(A, B) -> list[list]:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matscale(A, s) -> list[list]:
    return [[a * s for a in row] for row in A]


def matpow(A, k: int) -> list[list]:
    result = identity(len(A), _sample(A))
    base = A
    while k:
        if k & 1:
            result = matmul(result, base)
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


def matvec(A, v) -> list:
    return [row[0] for row in matmul(A, [[x] for x in v])]


def is_zero_matrix(A, tol: float = 0.0) -> bool:
    return all(is_zero(x, tol) for row in A for x in row)


def transpose(A) -> list[list]:
    return [list(r) for r in zip(*A)]


def rref(M, tol: float = 0.0):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [list(r) for r in M]
    if not R:
        return R, []
    rows, cols = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if tol:
            best = max(range(r, rows), key=lambda i: magnitude(R[i][c]))
            if magnitude(R[best][c]) <= tol:
                continue
            p = best
        else:
            p = next((i for i in range(r, rows) if not is_zero(R[i][c])), None)
            if p is None:
                continue
        R[r], R[p] = R[p], R[r]
        inv = one_of(R[r][c]) / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and not is_zero(R[i][c], tol):
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M, tol: float = 0.0) -> int:
    return len(rref(M, tol)[1])


def nullspace(M, ncols: Optional[int] = None, tol: float = 0.0) -> list[list]:
    """Basis of {v : M v = 0}, one vector per free column (free entry equal to one)."""
    if not M:
        n = ncols or 0
        return identity(n)
    R, pivots = rref(M, tol)
    cols = len(M[0])
    sample = _sample(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero_of(sample)] * cols
        v[f] = one_of(sample)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve(A, b, tol: float = 0.0) -> Optional[list]:
    """One solution of A x = b, or None when inconsistent."""
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, tol)
    ncols = len(A[0]) if A else 0
    if ncols in pivots:
        return None
    sample = _sample(aug)
    x = [zero_of(sample)] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return x


def det(M):
    n = len(M)
    if n == 0:
        return Cyclo.rational(1)
    R = [list(r) for r in M]
    sample = _sample(R)
    acc = one_of(sample)
    for c in range(n):
        p = next((i for i in range(c, n) if not is_zero(R[i][c])), None)
        if p is None:
            return zero_of(sample)
        if p != c:
            R[c], R[p] = R[p], R[c]
            acc = -acc
        acc = acc * R[c][c]
        inv = one_of(sample) / R[c][c]
        for i in range(c + 1, n):
            if not is_zero(R[i][c]):
                f = R[i][c] * inv
                R[i] = [x - f * y for x, y in zip(R[i], R[c])]
    return acc


def inverse(M) -> list[list]:
    n = len(M)
    aug = [list(row) + e for row, e in zip(M, identity(n, _sample(M)))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return [row[n:] for row in R]


def charpoly(M) -> list:
    """Coefficients c_0..c_n of det(t I - M), lowest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    sample = _sample(M)
    one = one_of(sample)
    coeffs = [None] * (n + 1)
    coeffs[n] = one
    Mk = identity(n, sample)  # M_0
    c = one
    AM = None
    for k in range(1, n + 1):
        AM = matmul(M, Mk)
        tr = zero_of(sample)
        for i in range(n):
            tr = tr + AM[i][i]
        c = -tr * Fraction(1, k) if isinstance(tr, Cyclo) else -tr / k
        coeffs[n - k] = c
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


def is_nilpotent(M) -> bool:
    """True iff the characteristic polynomial is t^n."""
    return all(is_zero(c) for c in charpoly(M)[:-1])


def nilpotency_index(M) -> Optional[int]:
    """Smallest k with M^k = 0, or None when M is not nilpotent."""
    n = len(M)
    P = identity(n, _sample(M))
    for k in range(1, n + 1):
        P = matmul(P, M)
        if is_zero_matrix(P):
            return k
    return None


def commutator(A, B) -> list[list]:
    AB = matmul(A, B)
    BA = matmul(B, A)
    return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(AB, BA)]
