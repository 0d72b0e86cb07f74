"""Exact integer lattice linear algebra.

Everything here runs on Python ints (arbitrary precision) and
``fractions.Fraction``; no floating point enters the library anywhere.
Vectors are plain tuples of ints, matrices are immutable ``IntMatrix``
values.  All normal-form routines use fixed pivot rules so that their
output is deterministic; downstream memo keys rely on this.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import DependentVectorsError, NotUnimodularError, ZeroVectorError

Vector = tuple[int, ...]


class IntMatrix:
    """Immutable rectangular integer matrix."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        self.entries: tuple[tuple[int, ...], ...] = rows

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries))) if self.entries else IntMatrix(())

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = other.transpose().entries
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries)
        )

    def mat_vec(self, v) -> Vector:
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def det(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if pivot is None:
                    return 0
                a[k], a[pivot] = a[pivot], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"IntMatrix({list(map(list, self.entries))})"


def primitive_vector(v) -> Vector:
    """Divide a nonzero integer vector by the gcd of its entries."""
    v = tuple(int(x) for x in v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ZeroVectorError("zero vector has no primitive generator")
    return tuple(x // g for x in v)


def hermite_normal_form(mat: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form ``H`` with unimodular ``U`` such that U*mat = H.

    Pivot rule: sweep columns left to right; among candidate rows take the
    one with the smallest nonzero absolute value (first on ties).  Pivots are
    made positive and entries above each pivot are reduced into [0, pivot).
    """
    m, n = mat.rows, mat.cols
    h = [list(r) for r in mat.entries]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if h[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(h[i][c]), i))
            if p != r:
                h[r], h[p] = h[p], h[r]
                u[r], u[p] = u[p], u[r]
            if len(nz) == 1:
                break
            for i in range(r + 1, m):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    if q:
                        h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-a for a in h[r]]
            u[r] = [-a for a in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                u[i] = [a - q * b for a, b in zip(u[i], u[r])]
        r += 1
    return IntMatrix(h), IntMatrix(u)


def smith_normal_form(mat: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (D, P, Q) with P*mat*Q = D diagonal,
    positive diagonal entries each dividing the next, P and Q unimodular.

    Pivot rule: scan the working submatrix row-major for the entry of
    smallest nonzero absolute value (first on ties).
    """
    m, n = mat.rows, mat.cols
    a = [list(r) for r in mat.entries]
    p = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    q = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in q:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        p[dst] = [x + k * y for x, y in zip(p[dst], p[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in q:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = abs(a[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        clean = False
            if not clean:
                continue
            # enforce divisibility of the trailing block by the pivot
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        if t < m and t < n and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            p[t] = [-x for x in p[t]]
    return IntMatrix(a), IntMatrix(p), IntMatrix(q)


def snf_diagonal(mat: IntMatrix) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(mat)
    k = min(mat.rows, mat.cols)
    return tuple(d.entries[i][i] for i in range(k))


def invert_unimodular(mat: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    n = mat.rows
    if mat.cols != n:
        raise ValueError("not square")
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(mat.entries)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    out = []
    for row in aug:
        vals = row[n:]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("matrix is not unimodular")
        out.append([int(v) for v in vals])
    return IntMatrix(out)


def _independent_rank(vectors) -> int:
    return sum(1 for d in snf_diagonal(IntMatrix(vectors)) if d != 0)


def is_unimodular_set(vectors) -> bool:
    """True iff the vectors extend to a basis of the ambient lattice.

    The test is that every Smith normal form diagonal entry equals 1.
    Dependent (or zero) input is an error, never a False.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return True
    if any(all(x == 0 for x in v) for v in vectors):
        raise DependentVectorsError("zero vector in input", witness=vectors)
    diag = snf_diagonal(IntMatrix(vectors))
    if any(d == 0 for d in diag):
        raise DependentVectorsError("vectors are linearly dependent", witness=vectors)
    return all(d == 1 for d in diag)


def complete_to_unimodular_basis(vectors, ambient_dim: int | None = None) -> tuple[IntMatrix, IntMatrix]:
    """Extend a unimodular set to a lattice basis.

    Returns (B, Bdual) where B is an n x n unimodular matrix whose first k
    columns are the input vectors and Bdual = B^-1, so row i of Bdual is the
    dual functional of column i (Bdual * B = B * Bdual = identity).  The
    completion is deterministic: it is read off the Smith decomposition.
    """
    vectors = [tuple(v) for v in vectors]
    if ambient_dim is None:
        if not vectors:
            raise ValueError("ambient_dim required for empty input")
        ambient_dim = len(vectors[0])
    n = ambient_dim
    if not vectors:
        ident = IntMatrix.identity(n)
        return ident, ident
    if not is_unimodular_set(vectors):
        raise NotUnimodularError(
            "vectors do not extend to a lattice basis",
            witness={"snf_diagonal": snf_diagonal(IntMatrix(vectors))},
        )
    k = len(vectors)
    a = IntMatrix(vectors)
    _, p, q = smith_normal_form(a)
    # P*A*Q = [I_k | 0]  =>  A * (Q * diag(P, I)) = [I_k | 0]
    blocks = [[p.entries[i][j] if i < k and j < k else (1 if i == j else 0) for j in range(n)]
              for i in range(n)]
    q_prime = q.mul(IntMatrix(blocks))
    w = invert_unimodular(q_prime)  # first k rows of W are the input vectors
    b = w.transpose()
    bdual = q_prime.transpose()
    return b, bdual


def quotient_projection(cone_rays, ambient_dim: int) -> IntMatrix:
    """Integer matrix presenting the quotient of the lattice by the span of
    the given unimodular ray set: kernel is exactly that span, image is all
    of the rank-(n-k) quotient lattice.  Rows are the trailing dual
    functionals of the deterministic basis completion.
    """
    rays = [tuple(v) for v in cone_rays]
    k = len(rays)
    _, bdual = complete_to_unimodular_basis(rays, ambient_dim)
    return IntMatrix(bdual.entries[k:])


def solve_rational(a: IntMatrix, b) -> tuple[Fraction, ...] | None:
    """One exact rational solution x of a*x = b, or None if inconsistent.

    Free variables are set to zero; pivoting is deterministic.
    """
    m, n = a.rows, a.cols
    rows = [[Fraction(x) for x in row] + [Fraction(bv)] for row, bv in zip(a.entries, b)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for pr, pc in pivots:
        x[pc] = rows[pr][n]
    return tuple(x)


def solve_integral(a: IntMatrix, b) -> Vector | None:
    """One integer solution x of a*x = b, or None if no integer solution exists."""
    d, p, q = smith_normal_form(a)
    pb = p.mat_vec(tuple(b))
    m, n = a.rows, a.cols
    y = [0] * n
    for i in range(m):
        di = d.entries[i][i] if i < n else 0
        if di == 0:
            if pb[i] != 0:
                return None
        else:
            if pb[i] % di:
                return None
            y[i] = pb[i] // di
    return q.mat_vec(tuple(y))


def quotient_order(a: IntMatrix, f) -> int | None:
    """Order of f modulo the integer column span of a.

    Returns the least k >= 1 with k*f in {a*x : x integer}, or None when no
    multiple of f lies in the span (f is not even in the rational span).
    """
    d, p, _ = smith_normal_form(a)
    pf = p.mat_vec(tuple(f))
    m, n = a.rows, a.cols
    k = 1
    for i in range(m):
        di = d.entries[i][i] if i < n else 0
        if di == 0:
            if pf[i] != 0:
                return None
        else:
            step = di // gcd(di, pf[i])
            k = k * step // gcd(k, step)
    return k
