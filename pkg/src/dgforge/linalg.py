"""Exact linear algebra over the supported coefficient rings.

Everything here is arbitrary precision: ints over Z, Fractions over Q and
Z[1/S], ints mod p over F_p.  No floating point anywhere.

The field algorithms are reduced row echelon form and friends; the
Z / Z[1/S] algorithms go through Smith normal form with unimodular
transforms, which doubles as the stored witness format for rank/torsion
claims (U @ A @ V = D can be re-checked without re-running the reduction).

Conventions: matrices act on column vectors, composition is matrix
product, and a basis of a subspace is packaged as the *columns* of a
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import RingMismatch, ShapeMismatch, UnsupportedRing
from .rings import CoefficientRing, Rationals, factorize

__all__ = [
    "Matrix",
    "bareiss_det",
    "block_matrix",
    "det",
    "image_basis",
    "inverse",
    "kernel_basis",
    "rank",
    "rref",
    "smith_divisors",
    "smith_with_transforms",
    "solve_right",
    "solve_sparse",
    "sparse_kernel_basis",
]


@dataclass(frozen=True)
class Matrix:
    """Immutable exact matrix with an explicit ring tag.

    ``rows`` is a tuple of row tuples; ``nrows``/``ncols`` are stored
    explicitly so zero-width shapes survive round trips.
    """

    ring: CoefficientRing
    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise ShapeMismatch(f"expected {self.nrows} rows, got {len(self.rows)}")
        for r in self.rows:
            if len(r) != self.ncols:
                raise ShapeMismatch(f"ragged row: expected {self.ncols} entries, got {len(r)}")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rows(cls, ring: CoefficientRing, rows) -> "Matrix":
        data = tuple(tuple(ring.coerce(v) for v in row) for row in rows)
        n = len(data)
        m = len(data[0]) if n else 0
        return cls(ring, n, m, data)

    @classmethod
    def zeros(cls, ring: CoefficientRing, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero()
        return cls(ring, nrows, ncols, tuple(tuple(z for _ in range(ncols)) for _ in range(nrows)))

    @classmethod
    def identity(cls, ring: CoefficientRing, n: int) -> "Matrix":
        z, o = ring.zero(), ring.one()
        return cls(ring, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    # -- basic structure ------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.ncols, self.nrows,
                      tuple(tuple(self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)))

    def column(self, j: int) -> tuple:
        return tuple(self.rows[i][j] for i in range(self.nrows))

    def hstack(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.nrows != other.nrows:
            raise ShapeMismatch(f"hstack: {self.shape} vs {other.shape}")
        return Matrix(self.ring, self.nrows, self.ncols + other.ncols,
                      tuple(self.rows[i] + other.rows[i] for i in range(self.nrows)))

    def vstack(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.ncols != other.ncols:
            raise ShapeMismatch(f"vstack: {self.shape} vs {other.shape}")
        return Matrix(self.ring, self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def submatrix(self, row_idx, col_idx) -> "Matrix":
        ri, ci = list(row_idx), list(col_idx)
        return Matrix(self.ring, len(ri), len(ci),
                      tuple(tuple(self.rows[i][j] for j in ci) for i in ri))

    # -- arithmetic -----------------------------------------------------

    def _same_ring(self, other: "Matrix") -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"add: {self.shape} vs {other.shape}")
        p = self.ring.p if self.ring.kind == "Fp" else 0
        return Matrix(self.ring, self.nrows, self.ncols, tuple(
            tuple((a + b) % p if p else a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        p = self.ring.p if self.ring.kind == "Fp" else 0
        return Matrix(self.ring, self.nrows, self.ncols,
                      tuple(tuple((-a) % p if p else -a for a in r) for r in self.rows))

    def scale(self, c) -> "Matrix":
        c = self.ring.coerce(c)
        p = self.ring.p if self.ring.kind == "Fp" else 0
        return Matrix(self.ring, self.nrows, self.ncols,
                      tuple(tuple((c * a) % p if p else c * a for a in r) for r in self.rows))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"matmul: {self.shape} @ {other.shape}")
        p = self.ring.p if self.ring.kind == "Fp" else 0
        zero = self.ring.zero()
        cols = other.ncols
        out = []
        for i in range(self.nrows):
            arow = self.rows[i]
            acc = [zero] * cols
            for k in range(self.ncols):
                a = arow[k]
                if a == 0:
                    continue
                brow = other.rows[k]
                for j in range(cols):
                    b = brow[j]
                    if b != 0:
                        acc[j] = acc[j] + a * b
            if p:
                acc = [v % p for v in acc]
            out.append(tuple(acc))
        return Matrix(self.ring, self.nrows, cols, tuple(out))

    def power(self, n: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise ShapeMismatch("power needs a square matrix")
        out = Matrix.identity(self.ring, self.nrows)
        base = self
        while n > 0:
            if n & 1:
                out = out @ base
            base = base @ base if n > 1 else base
            n >>= 1
        return out

    def apply_entrywise(self, fn, ring: CoefficientRing) -> "Matrix":
        return Matrix(ring, self.nrows, self.ncols,
                      tuple(tuple(fn(v) for v in r) for r in self.rows))


def block_matrix(ring: CoefficientRing, blocks, row_sizes: list[int],
                 col_sizes: list[int]) -> Matrix:
    """Assemble a matrix from a grid of blocks; None means a zero block."""
    nr, nc = sum(row_sizes), sum(col_sizes)
    z = ring.zero()
    out = [[z] * nc for _ in range(nr)]
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            blk = blocks[bi][bj]
            if blk is not None:
                if blk.shape != (rs, cs):
                    raise ShapeMismatch(f"block ({bi},{bj}): {blk.shape} != ({rs},{cs})")
                for i in range(rs):
                    row = blk.rows[i]
                    for j in range(cs):
                        out[r0 + i][c0 + j] = row[j]
            c0 += cs
        r0 += rs
    return Matrix(ring, nr, nc, tuple(tuple(r) for r in out))


# ---------------------------------------------------------------------------
# field algorithms
# ---------------------------------------------------------------------------


def _field_inv(ring: CoefficientRing, v):
    if ring.kind == "Fp":
        return pow(v, ring.p - 2, ring.p)
    return Fraction(1) / v


def _require_field(ring: CoefficientRing) -> None:
    if not ring.is_field:
        raise UnsupportedRing(f"field algorithm called over {ring}")


def rref(A: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.  Field rings only.

    Deterministic: the pivot is always the first nonzero entry in column
    order, so the output is the canonical RREF.
    """
    _require_field(A.ring)
    p = A.ring.p if A.ring.kind == "Fp" else 0
    rows = [list(r) for r in A.rows]
    pivots: list[int] = []
    r = 0
    for c in range(A.ncols):
        piv = next((i for i in range(r, A.nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = _field_inv(A.ring, rows[r][c])
        rows[r] = [(inv * v) % p if p else inv * v for v in rows[r]]
        for i in range(A.nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p if p else a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == A.nrows:
            break
    return Matrix(A.ring, A.nrows, A.ncols, tuple(tuple(row) for row in rows)), tuple(pivots)


def rank(A: Matrix) -> int:
    """Rank over the fraction field (= field rank after clearing units)."""
    if A.ring.is_field:
        return len(rref(A)[1])
    return len(rref(A.apply_entrywise(Fraction, Rationals()))[1])


def kernel_basis(A: Matrix) -> Matrix:
    """Canonical basis of ker(A) as matrix columns.

    Over a field this is the standard RREF kernel; over Z and Z[1/S] the
    integer kernel lattice basis (saturated, hence a free basis).
    """
    if A.ring.is_field:
        R, pivots = rref(A)
        free = [c for c in range(A.ncols) if c not in pivots]
        cols = []
        for fc in free:
            v = [A.ring.zero()] * A.ncols
            v[fc] = A.ring.one()
            for r_i, pc in enumerate(pivots):
                v[pc] = -R.rows[r_i][fc]
                if A.ring.kind == "Fp":
                    v[pc] %= A.ring.p
            cols.append(v)
        return Matrix(A.ring, A.ncols, len(cols),
                      tuple(tuple(col[i] for col in cols) for i in range(A.ncols)))
    ints, _ = _scaled_integer_rows(A)
    _, _, V, r, _ = _smith_engine(ints, A.ncols, want_v=True)
    cols = [[Fraction(V[i][j]) if A.ring.kind == "loc" else V[i][j]
             for i in range(A.ncols)] for j in range(r, A.ncols)]
    return Matrix(A.ring, A.ncols, len(cols),
                  tuple(tuple(col[i] for col in cols) for i in range(A.ncols)))


def image_basis(A: Matrix) -> Matrix:
    """Canonical basis of the column span, as matrix columns.

    Field case: canonical form of the column space (RREF of the transpose).
    Z / Z[1/S]: Hermite basis of the column lattice of a unit-scaled copy.
    """
    if A.ring.is_field:
        R, pivots = rref(A.transpose())
        cols = [R.rows[i] for i in range(len(pivots))]
        return Matrix(A.ring, A.nrows, len(cols),
                      tuple(tuple(c[i] for c in cols) for i in range(A.nrows)))
    cols = []
    for j in range(A.ncols):
        col = A.column(j)
        den = 1
        for v in col:
            den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
        cols.append([int(v * den) for v in col])
    basis = _column_hermite(cols, A.nrows)
    conv = (lambda v: Fraction(v)) if A.ring.kind == "loc" else (lambda v: v)
    return Matrix(A.ring, A.nrows, len(basis),
                  tuple(tuple(conv(b[i]) for b in basis) for i in range(A.nrows)))


def solve_right(A: Matrix, B: Matrix) -> Matrix | None:
    """Particular solution X of A @ X = B, or None if there is none.

    Canonical over fields (free variables are 0).  Over Z and Z[1/S] the
    solution is produced through Smith normal form and is deterministic.
    """
    if A.nrows != B.nrows:
        raise ShapeMismatch(f"solve: {A.shape} vs {B.shape}")
    if A.ring.is_field:
        aug, _ = rref(A.hstack(B))
        n, k = A.ncols, B.ncols
        X = [[A.ring.zero()] * k for _ in range(n)]
        for row in aug.rows:
            pc = next((c for c in range(n) if row[c] != 0), None)
            if pc is None:
                if any(v != 0 for v in row[n:]):
                    return None
                continue
            for j in range(k):
                X[pc][j] = row[n + j]
        return Matrix(A.ring, n, k, tuple(tuple(r) for r in X))
    return _solve_pid(A, B)


def inverse(A: Matrix) -> Matrix:
    """Two-sided inverse; raises UnsupportedRing when not invertible."""
    if A.nrows != A.ncols:
        raise ShapeMismatch("inverse needs a square matrix")
    if A.ring.is_field:
        X = solve_right(A, Matrix.identity(A.ring, A.nrows))
        if X is None or rank(A) != A.nrows:
            raise UnsupportedRing("matrix is singular")
        return X
    X = _solve_pid(A, Matrix.identity(A.ring, A.nrows))
    if X is None:
        raise UnsupportedRing(f"matrix is not invertible over {A.ring}")
    return X


def det(A: Matrix):
    """Determinant (exact, fraction-free over Z)."""
    if A.nrows != A.ncols:
        raise ShapeMismatch("det needs a square matrix")
    if A.ring.kind == "Fp":
        p = A.ring.p
        rows = [list(r) for r in A.rows]
        d = 1
        for c in range(A.ncols):
            piv = next((i for i in range(c, A.nrows) if rows[i][c] % p != 0), None)
            if piv is None:
                return 0
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                d = -d % p
            d = d * rows[c][c] % p
            inv = pow(rows[c][c], p - 2, p)
            for i in range(c + 1, A.nrows):
                f = rows[i][c] * inv % p
                if f:
                    rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[c])]
        return d % p
    den = 1
    for row in A.rows:
        for v in row:
            dv = Fraction(v).denominator
            den = den * dv // gcd(den, dv)
    ints = [[int(v * den) for v in row] for row in A.rows]
    d = Fraction(bareiss_det(ints), den ** A.nrows)
    if A.ring.kind == "Z":
        return int(d)
    return d


def bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(rows)
    if n == 0:
        return 1
    m = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _scaled_integer_rows(A: Matrix) -> tuple[list[list[int]], int]:
    """Clear denominators: returns (u*A as int rows, u).  u is a unit of the
    ring by the ring's own value invariant (denominators sit inside S)."""
    den = 1
    for row in A.rows:
        for v in row:
            dv = Fraction(v).denominator
            den = den * dv // gcd(den, dv)
    return [[int(v * den) for v in row] for row in A.rows], den


def _smith_engine(rows: list[list[int]], ncols: int, want_u: bool = False,
                  want_v: bool = False, rhs: list[list[int]] | None = None):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns (diag, U, V, rank-ish) where diag is the full diagonalized
    matrix (divisibility chain enforced, nonnegative diagonal), U/V are the
    tracked transforms (None unless requested) and the last component is
    the number of nonzero diagonal entries.  When ``rhs`` is given, the row
    operations are mirrored onto it (it plays U @ rhs without storing U).
    """
    m = [row[:] for row in rows]
    nr, nc = len(m), ncols
    U = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)] if want_u else None
    V = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)] if want_v else None
    R = [row[:] for row in rhs] if rhs is not None else None

    def row_op(i, j, q):  # row_i -= q*row_j
        m[i] = [a - q * b for a, b in zip(m[i], m[j])]
        if U is not None:
            U[i] = [a - q * b for a, b in zip(U[i], U[j])]
        if R is not None:
            R[i] = [a - q * b for a, b in zip(R[i], R[j])]

    def col_op(i, j, q):  # col_i -= q*col_j
        for row in m:
            row[i] -= q * row[j]
        if V is not None:
            for row in V:
                row[i] -= q * row[j]

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if R is not None:
            R[i], R[j] = R[j], R[i]

    def col_swap(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        # pick the nonzero entry of least magnitude in the remaining block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = abs(m[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        while True:
            dirty = False
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    row_op(i, t, q)
                    if m[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    col_op(j, t, q)
                    if m[t][j]:
                        col_swap(t, j)
                        dirty = True
            if not dirty:
                break
        t += 1
    r = t
    # nonnegative diagonal
    for i in range(r):
        if m[i][i] < 0:
            m[i] = [-v for v in m[i]]
            if U is not None:
                U[i] = [-v for v in U[i]]
            if R is not None:
                R[i] = [-v for v in R[i]]
    # enforce d_i | d_{i+1}
    i = 0
    while i < r - 1:
        a, b = m[i][i], m[i + 1][i + 1]
        if b % a != 0:
            # fold column i+1 into column i and re-smith the 2x2 block
            col_op(i, i + 1, -1)  # col_i += col_{i+1}
            g = gcd(a, b)
            # euclid on the 2x2 corner [[a,0],[b,b]] now at (i, i+1)
            while m[i + 1][i] != 0:
                q = m[i][i] // m[i + 1][i] if m[i + 1][i] else 0
                if m[i + 1][i] and abs(m[i][i]) >= abs(m[i + 1][i]):
                    row_op(i, i + 1, q)
                row_swap(i, i + 1)
            # clear the off-diagonal remnants in row i / column i+1
            if m[i][i] < 0:
                m[i] = [-v for v in m[i]]
                if U is not None:
                    U[i] = [-v for v in U[i]]
                if R is not None:
                    R[i] = [-v for v in R[i]]
            q = m[i][i + 1] // m[i][i] if m[i][i] else 0
            if m[i][i + 1]:
                col_op(i + 1, i, q)
            if m[i + 1][i + 1] < 0:
                m[i + 1] = [-v for v in m[i + 1]]
                if U is not None:
                    U[i + 1] = [-v for v in U[i + 1]]
                if R is not None:
                    R[i + 1] = [-v for v in R[i + 1]]
            assert m[i][i] == g and m[i + 1][i] == 0 and m[i][i + 1] == 0
            i = max(i - 1, 0)
        else:
            i += 1
    return m, U, V, r, R


def smith_with_transforms(A: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(U, D, V) with U @ A @ V = D.

    Over Z: unimodular U, V and a divisibility-chained nonnegative D.
    Over Z[1/S]: same after clearing denominators; V absorbs the unit
    scale so the identity holds verbatim over the ring.
    Over a field: D has ones then zeros on the diagonal.
    """
    ring = A.ring
    if ring.is_field:
        R, pivots = rref(A)
        # U from re-running the row reduction on [A | I]
        aug, _ = rref(A.hstack(Matrix.identity(ring, A.nrows)))
        U = aug.submatrix(range(A.nrows), range(A.ncols, A.ncols + A.nrows))
        # column-reduce R: move pivots to the front, clear non-pivot columns
        r = len(pivots)
        V_rows = [[ring.zero()] * A.ncols for _ in range(A.ncols)]
        used = set(pivots)
        free = [c for c in range(A.ncols) if c not in used]
        for newj, c in enumerate(pivots):
            V_rows[c][newj] = ring.one()
        for k, c in enumerate(free):
            V_rows[c][r + k] = ring.one()
            for i, pc in enumerate(pivots):
                v = -R.rows[i][c]
                V_rows[pc][r + k] = v % ring.p if ring.kind == "Fp" else v
        V = Matrix(ring, A.ncols, A.ncols, tuple(tuple(r_) for r_ in V_rows))
        D = U @ A @ V
        return U, D, V
    ints, den = _scaled_integer_rows(A)
    diag, Uw, Vw, _, _ = _smith_engine(ints, A.ncols, want_u=True, want_v=True)
    if ring.kind == "Z":
        U = Matrix.from_rows(ring, Uw)
        V = Matrix.from_rows(ring, Vw)
        D = Matrix.from_rows(ring, diag)
        return U, D, V
    U = Matrix.from_rows(ring, Uw)
    V = Matrix.from_rows(ring, [[Fraction(v) * den for v in row] for row in Vw])
    D = Matrix.from_rows(ring, diag)
    return U, D, V


def smith_divisors(A: Matrix) -> list[int]:
    """Elementary divisors (positive, divisibility-chained) of the integer
    matrix obtained by clearing unit denominators.  For Z[1/S] rings the
    S-supported parts of each divisor are stripped (they are units)."""
    ints, _ = _scaled_integer_rows(A)
    diag, _, _, r, _ = _smith_engine(ints, A.ncols)
    divisors = [diag[i][i] for i in range(r)]
    if A.ring.kind == "loc":
        out = []
        for d in divisors:
            for q in A.ring.primes:
                while d % q == 0:
                    d //= q
            out.append(d)
        return out
    if A.ring.is_field:
        return [1] * r
    return divisors


def _solve_pid(A: Matrix, B: Matrix) -> Matrix | None:
    """Solve A @ X = B over Z or Z[1/S] via Smith reduction.

    Denominators of A and B are cleared first (they are units of the
    ring); solvability over the ring then reads off the diagonal.
    """
    ring = A.ring
    den = 1
    for M in (A, B):
        for row in M.rows:
            for v in row:
                dv = Fraction(v).denominator
                den = den * dv // gcd(den, dv)
    a_int = [[int(v * den) for v in row] for row in A.rows]
    b_int = [[int(v * den) for v in row] for row in B.rows]
    diag, _, V, r, Ub = _smith_engine(a_int, A.ncols, want_v=True, rhs=b_int)
    k = B.ncols
    loc_primes = ring.primes if ring.kind == "loc" else ()
    z = [[Fraction(0)] * k for _ in range(A.ncols)]
    for i in range(len(diag)):
        for j in range(k):
            c = Ub[i][j]
            if i >= r:
                if c != 0:
                    return None
                continue
            q = Fraction(c, diag[i][i])
            for prime in factorize(q.denominator):
                if prime not in loc_primes:
                    return None
            z[i][j] = q
    X = [[sum(Fraction(V[i][t]) * z[t][j] for t in range(A.ncols))
          for j in range(k)] for i in range(A.ncols)]
    conv = (lambda v: int(v)) if ring.kind == "Z" else (lambda v: v)
    return Matrix.from_rows(ring, [[conv(v) for v in row] for row in X])


def _column_hermite(cols: list[list[int]], nrows: int) -> list[list[int]]:
    """Canonical (Hermite-reduced) basis of the integer column lattice."""
    work = [c[:] for c in cols if any(c)]
    basis: list[list[int]] = []
    row = 0
    while row < nrows and work:
        nz = [c for c in work if c[row] != 0]
        rest = [c for c in work if c[row] == 0]
        if not nz:
            work = rest
            row += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[row]))
            a = nz[0]
            out = [a]
            for c in nz[1:]:
                q = c[row] // a[row]
                c2 = [x - q * y for x, y in zip(c, a)]
                if c2[row] != 0:
                    out.append(c2)
                elif any(c2):
                    rest.append(c2)
            nz = out
        pivot = nz[0]
        if pivot[row] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        work = [c for c in rest if any(c)]
        row += 1
    # reduce above-pivot entries for canonical form
    for i in range(len(basis)):
        pr = next(r for r in range(nrows) if basis[i][r] != 0)
        for j in range(i):
            if basis[j][pr] != 0:
                q = basis[j][pr] // basis[i][pr]
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
    return basis


# ---------------------------------------------------------------------------
# sparse systems (used by the bigger structured solves)
# ---------------------------------------------------------------------------


def solve_sparse(rows: list[dict[int, object]], rhs: list[object], nvars: int,
                 ring: CoefficientRing) -> list | None:
    """Particular solution of a sparse linear system, or None.

    ``rows[i]`` maps variable index -> coefficient; the i-th equation is
    sum(coeff * x[var]) == rhs[i].  Over fields a sparsity-guided Gaussian
    elimination is used; over Z and Z[1/S] the system is densified and
    pushed through the Smith solver (desk scale only).
    """
    if not rows:
        return [ring.zero()] * nvars
    if not ring.is_field:
        dense = [[ring.zero()] * nvars for _ in rows]
        for i, r in enumerate(rows):
            for j, v in r.items():
                dense[i][j] = v
        A = Matrix(ring, len(rows), nvars, tuple(tuple(r) for r in dense))
        B = Matrix(ring, len(rows), 1, tuple((v,) for v in rhs))
        X = solve_right(A, B)
        return None if X is None else [X.rows[i][0] for i in range(nvars)]
    p = ring.p if ring.kind == "Fp" else 0
    work: list[tuple[dict, object]] = []
    for r, b in zip(rows, rhs):
        r2 = {j: v for j, v in r.items() if v != 0}
        work.append((r2, b))
    # eliminate in order of growing row support for fill control
    work.sort(key=lambda rb: (len(rb[0]), min(rb[0]) if rb[0] else -1))
    pivots: dict[int, tuple[dict, object]] = {}
    for r, b in work:
        r = dict(r)
        while r:
            c = min(r)
            if c not in pivots:
                break
            pr, pb = pivots[c]
            f = r[c]
            for j, v in pr.items():
                nv = r.get(j, ring.zero()) - f * v
                if p:
                    nv %= p
                if nv == 0:
                    r.pop(j, None)
                else:
                    r[j] = nv
            b = b - f * pb
            if p:
                b %= p
        if not r:
            if b != 0:
                return None
            continue
        c = min(r)
        inv = _field_inv(ring, r[c])
        r = {j: (inv * v) % p if p else inv * v for j, v in r.items()}
        b = (inv * b) % p if p else inv * b
        pivots[c] = (r, b)
    x = [ring.zero()] * nvars
    for c in sorted(pivots, reverse=True):
        r, b = pivots[c]
        acc = b
        for j, v in r.items():
            if j != c and x[j] != 0:
                acc = acc - v * x[j]
        if p:
            acc %= p
        x[c] = acc
    return x


def sparse_kernel_basis(rows: list[dict[int, object]], nvars: int,
                        ring: CoefficientRing) -> list[list]:
    """Basis of the solution space of the homogeneous sparse system.

    Field rings only; returns dense vectors (canonical free-variable
    basis, one vector per non-pivot variable).
    """
    _require_field(ring)
    p = ring.p if ring.kind == "Fp" else 0
    pivots: dict[int, dict] = {}
    work = [{j: v for j, v in r.items() if v != 0} for r in rows]
    work.sort(key=lambda r: (len(r), min(r) if r else -1))
    for r in work:
        r = dict(r)
        while r:
            c = min(r)
            if c not in pivots:
                break
            pr = pivots[c]
            f = r[c]
            for j, v in pr.items():
                nv = r.get(j, ring.zero()) - f * v
                if p:
                    nv %= p
                if nv == 0:
                    r.pop(j, None)
                else:
                    r[j] = nv
        if not r:
            continue
        c = min(r)
        inv = _field_inv(ring, r[c])
        pivots[c] = {j: (inv * v) % p if p else inv * v for j, v in r.items()}
    # back-substitute pivot rows against each other for a reduced form
    for c in sorted(pivots, reverse=True):
        r = pivots[c]
        for c2 in sorted(pivots):
            if c2 <= c:
                continue
            f = r.get(c2)
            if f is None or f == 0:
                continue
            for j, v in pivots[c2].items():
                nv = r.get(j, ring.zero()) - f * v
                if p:
                    nv %= p
                if nv == 0:
                    r.pop(j, None)
                else:
                    r[j] = nv
    free = [j for j in range(nvars) if j not in pivots]
    basis = []
    for fc in free:
        v = [ring.zero()] * nvars
        v[fc] = ring.one()
        for c, r in pivots.items():
            coeff = r.get(fc)
            if coeff is not None and coeff != 0:
                v[c] = (-coeff) % p if p else -coeff
        basis.append(v)
    return basis
