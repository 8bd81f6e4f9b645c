"""Bounded cochain complexes of finite free modules.

Grading is cohomological: the differential raises degree by one, so
``d(n)`` maps degree n to degree n+1 and has shape rank(n+1) x rank(n).
Complexes are finitely supported; degrees outside the stored support are
zero.  All matrices act on column vectors.

Sign conventions, fixed once so serialized certificates are
bit-reproducible:

* shift: ``shift(C, k)`` has degree-n piece C^{n+k} and differential
  (-1)^k d(n+k);
* cone of f : C -> D sits in degree n as D^n + C^{n+1} with differential
  [[d_D, f], [0, -d_C]];
* tensor: d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy, basis ordered by
  ascending left degree, then row-major within a bidegree;
* hom: (delta phi)(x) = d(phi(x)) - (-1)^{|phi|} phi(dx).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InvalidChainMap,
    InvalidComplex,
    InvalidHomotopy,
    RingMismatch,
    ShapeMismatch,
)
from .linalg import (
    Matrix,
    block_matrix,
    image_basis,
    inverse,
    kernel_basis,
    rank,
    rref,
    smith_divisors,
    solve_right,
    solve_sparse,
)
from .rings import CoefficientRing, RingMap, factorize, ring_map_apply_value

__all__ = [
    "ChainMap",
    "CohomologyReport",
    "Complex",
    "Homotopy",
    "base_change",
    "cohomology",
    "cohomology_basis",
    "cone",
    "cone_inclusion",
    "cone_projection",
    "direct_sum",
    "find_homotopy",
    "h_matrix",
    "hom_complex",
    "identity_map",
    "is_quasi_iso",
    "shift",
    "shift_map",
    "tensor",
    "tensor_many",
    "unit_complex",
    "validate_complex",
    "zero_homotopy",
    "zero_map",
]


@dataclass(frozen=True, eq=True)
class Complex:
    """A bounded complex of finite free modules over one ring.

    ``ranks`` holds the nonzero degrees only; ``diffs[n]`` is d(n) and is
    stored only where both endpoint degrees are nonzero.
    """

    ring: CoefficientRing
    ranks: dict = field(default_factory=dict)
    diffs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        ranks = {int(n): int(r) for n, r in self.ranks.items() if r}
        for n, r in ranks.items():
            if r < 0:
                raise ShapeMismatch(f"negative rank {r} in degree {n}")
        diffs = {}
        for n, m in self.diffs.items():
            n = int(n)
            if m.ring != self.ring:
                raise RingMismatch(f"differential in degree {n} lives over {m.ring}")
            want = (ranks.get(n + 1, 0), ranks.get(n, 0))
            if m.shape != want:
                raise ShapeMismatch(f"d({n}) has shape {m.shape}, expected {want}")
            if 0 not in m.shape and not m.is_zero():
                diffs[n] = m
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "diffs", diffs)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.diffs.get(n)
        if m is not None:
            return m
        return Matrix.zeros(self.ring, self.rank(n + 1), self.rank(n))

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        return (min(self.ranks), max(self.ranks))

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def is_zero(self) -> bool:
        return not self.ranks


def unit_complex(ring: CoefficientRing) -> Complex:
    """The ring itself, concentrated in degree 0."""
    return Complex(ring, {0: 1}, {})


def validate_complex(C: Complex) -> bool:
    """True iff d(n+1) @ d(n) = 0 in every degree.

    Shape problems raise at construction time, so this only tests the
    square-zero identity.
    """
    for n in C.degrees():
        if not (C.d(n + 1) @ C.d(n)).is_zero():
            return False
    return True


def _require_valid(C: Complex) -> None:
    if not validate_complex(C):
        raise InvalidComplex("differential does not square to zero")


@dataclass(frozen=True, eq=True)
class ChainMap:
    """A degreewise map f with d_dst f = f d_src.

    ``maps[n]`` has shape dst.rank(n) x src.rank(n); missing degrees are
    zero maps.
    """

    src: Complex
    dst: Complex
    maps: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.src.ring != self.dst.ring:
            raise RingMismatch(f"{self.src.ring} vs {self.dst.ring}")
        maps = {}
        for n, m in self.maps.items():
            n = int(n)
            if m.ring != self.src.ring:
                raise RingMismatch(f"component in degree {n} lives over {m.ring}")
            want = (self.dst.rank(n), self.src.rank(n))
            if m.shape != want:
                raise ShapeMismatch(f"f({n}) has shape {m.shape}, expected {want}")
            if 0 not in m.shape and not m.is_zero():
                maps[n] = m
        object.__setattr__(self, "maps", maps)

    @property
    def ring(self) -> CoefficientRing:
        return self.src.ring

    def f(self, n: int) -> Matrix:
        m = self.maps.get(n)
        if m is not None:
            return m
        return Matrix.zeros(self.ring, self.dst.rank(n), self.src.rank(n))

    def degrees(self) -> list[int]:
        return sorted(set(self.src.ranks) | set(self.dst.ranks))

    def commutes(self) -> bool:
        return all((self.dst.d(n) @ self.f(n)) == (self.f(n + 1) @ self.src.d(n))
                   for n in self.degrees())

    def require_valid(self) -> "ChainMap":
        if not self.commutes():
            raise InvalidChainMap("map does not commute with the differentials")
        return self

    # chain maps form a group under + and compose with @

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._same_ends(other)
        return ChainMap(self.src, self.dst,
                        {n: self.f(n) + other.f(n) for n in self.degrees()})

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.src, self.dst, {n: -m for n, m in self.maps.items()})

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.src, self.dst, {n: m.scale(c) for n, m in self.maps.items()})

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        if other.dst != self.src:
            raise ShapeMismatch("composition endpoints do not match")
        return ChainMap(other.src, self.dst,
                        {n: self.f(n) @ other.f(n) for n in other.degrees()})

    def power(self, k: int) -> "ChainMap":
        if self.src != self.dst:
            raise ShapeMismatch("power needs an endomorphism")
        out = identity_map(self.src)
        for _ in range(k):
            out = self @ out
        return out

    def is_zero(self) -> bool:
        return not self.maps

    def _same_ends(self, other: "ChainMap") -> None:
        if self.src != other.src or self.dst != other.dst:
            raise ShapeMismatch("maps have different endpoints")


def identity_map(C: Complex) -> ChainMap:
    return ChainMap(C, C, {n: Matrix.identity(C.ring, C.rank(n)) for n in C.degrees()})


def zero_map(src: Complex, dst: Complex) -> ChainMap:
    return ChainMap(src, dst, {})


@dataclass(frozen=True, eq=True)
class Homotopy:
    """Degree -1 data h with f - g = d h + h d for a pair (f, g).

    ``maps[n]`` has shape dst.rank(n-1) x src.rank(n).  The pair it is a
    witness for is not stored; `witnesses` checks a given pair.
    """

    src: Complex
    dst: Complex
    maps: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.src.ring != self.dst.ring:
            raise RingMismatch(f"{self.src.ring} vs {self.dst.ring}")
        maps = {}
        for n, m in self.maps.items():
            n = int(n)
            want = (self.dst.rank(n - 1), self.src.rank(n))
            if m.ring != self.src.ring:
                raise RingMismatch(f"component in degree {n} lives over {m.ring}")
            if m.shape != want:
                raise ShapeMismatch(f"h({n}) has shape {m.shape}, expected {want}")
            if 0 not in m.shape and not m.is_zero():
                maps[n] = m
        object.__setattr__(self, "maps", maps)

    @property
    def ring(self) -> CoefficientRing:
        return self.src.ring

    def h(self, n: int) -> Matrix:
        m = self.maps.get(n)
        if m is not None:
            return m
        return Matrix.zeros(self.ring, self.dst.rank(n - 1), self.src.rank(n))

    def boundary(self) -> ChainMap:
        """The chain map d h + h d this homotopy bounds."""
        degs = sorted(set(self.src.ranks) | set(self.dst.ranks))
        return ChainMap(self.src, self.dst, {
            n: self.dst.d(n - 1) @ self.h(n) + self.h(n + 1) @ self.src.d(n)
            for n in degs})

    def witnesses(self, f: ChainMap, g: ChainMap) -> bool:
        if f.src != self.src or f.dst != self.dst or g.src != self.src or g.dst != self.dst:
            raise ShapeMismatch("homotopy endpoints do not match the pair")
        return (f - g) == self.boundary()

    def require_witnesses(self, f: ChainMap, g: ChainMap) -> "Homotopy":
        if not self.witnesses(f, g):
            raise InvalidHomotopy("stored homotopy does not bound f - g")
        return self

    def __add__(self, other: "Homotopy") -> "Homotopy":
        if self.src != other.src or self.dst != other.dst:
            raise ShapeMismatch("homotopies have different endpoints")
        degs = set(self.maps) | set(other.maps)
        return Homotopy(self.src, self.dst, {n: self.h(n) + other.h(n) for n in degs})

    def __neg__(self) -> "Homotopy":
        return Homotopy(self.src, self.dst, {n: -m for n, m in self.maps.items()})

    def scale(self, c) -> "Homotopy":
        return Homotopy(self.src, self.dst, {n: m.scale(c) for n, m in self.maps.items()})

    def precompose(self, u: ChainMap) -> "Homotopy":
        """h . u for u : B -> src (degreewise h(n) @ u(n))."""
        if u.dst != self.src:
            raise ShapeMismatch("precompose endpoints do not match")
        return Homotopy(u.src, self.dst, {n: self.h(n) @ u.f(n) for n in self.maps})

    def postcompose(self, u: ChainMap) -> "Homotopy":
        """u . h for u : dst -> B (degreewise u(n-1) @ h(n))."""
        if u.src != self.dst:
            raise ShapeMismatch("postcompose endpoints do not match")
        return Homotopy(self.src, u.dst, {n: u.f(n - 1) @ self.h(n) for n in self.maps})


def zero_homotopy(src: Complex, dst: Complex) -> Homotopy:
    return Homotopy(src, dst, {})


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class CohomologyReport:
    """Betti numbers and torsion, degree by degree.

    ``torsion[n]`` is a sorted list of prime powers; always empty over a
    field.  Degrees with neither betti nor torsion are omitted.
    """

    ring: CoefficientRing
    betti: dict = field(default_factory=dict)
    torsion: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "betti", {n: b for n, b in self.betti.items() if b})
        object.__setattr__(self, "torsion",
                           {n: sorted(t) for n, t in self.torsion.items() if t})

    def betti_at(self, n: int) -> int:
        return self.betti.get(n, 0)

    def torsion_at(self, n: int) -> list[int]:
        return list(self.torsion.get(n, []))

    def is_zero(self) -> bool:
        return not self.betti and not self.torsion

    def torsion_primes(self) -> tuple[int, ...]:
        out: set[int] = set()
        for parts in self.torsion.values():
            for q in parts:
                out.update(factorize(q))
        return tuple(sorted(out))


def _torsion_parts(divisors: list[int]) -> list[int]:
    """Split nonunit elementary divisors into their prime-power parts."""
    out = []
    for d in divisors:
        if d in (0, 1):
            continue
        for p, e in factorize(d).items():
            out.append(p**e)
    return sorted(out)


def cohomology(C: Complex) -> CohomologyReport:
    """Betti numbers and torsion of a valid complex.

    betti(n) = rank(n) - rank d(n) - rank d(n-1) over the fraction field;
    torsion(n) comes from the elementary divisors of d(n-1), with unit
    divisors (including those supported in the inverted primes of the
    ring) discarded.
    """
    _require_valid(C)
    degs = set(C.degrees())
    for n in list(degs):
        degs.add(n + 1)
    betti: dict[int, int] = {}
    torsion: dict[int, list[int]] = {}
    rank_d = {n: rank(C.d(n)) for n in degs}
    for n in degs:
        b = C.rank(n) - rank_d.get(n, 0) - rank_d.get(n - 1, 0)
        if b:
            betti[n] = b
        if not C.ring.is_field:
            t = _torsion_parts(smith_divisors(C.d(n - 1)))
            if t:
                torsion[n] = t
    return CohomologyReport(C.ring, betti, torsion)


def cohomology_basis(C: Complex, n: int) -> tuple[Matrix, Matrix]:
    """(boundaries, representatives) for H^n over a field.

    The first matrix is the canonical basis of im d(n-1); the second holds
    representative cocycles whose classes form a basis of H^n.  Both are
    column collections in C^n.
    """
    if not C.ring.is_field:
        raise RingMismatch("cohomology bases need a field")
    _require_valid(C)
    B = image_basis(C.d(n - 1))
    K = kernel_basis(C.d(n))
    if K.ncols == 0:
        return B, Matrix.zeros(C.ring, C.rank(n), 0)
    stacked = B.hstack(K)
    _, pivots = rref(stacked)
    reps = [c - B.ncols for c in pivots if c >= B.ncols]
    return B, K.submatrix(range(K.nrows), reps)


def h_matrix(f: ChainMap, n: int) -> Matrix:
    """Matrix of H^n(f) in the canonical cohomology bases (field rings)."""
    _, src_reps = cohomology_basis(f.src, n)
    dst_b, dst_reps = cohomology_basis(f.dst, n)
    if src_reps.ncols == 0 or dst_reps.ncols + dst_b.ncols == 0:
        return Matrix.zeros(f.ring, dst_reps.ncols, src_reps.ncols)
    images = f.f(n) @ src_reps
    coords = solve_right(dst_b.hstack(dst_reps), images)
    if coords is None:
        raise InvalidChainMap("image of a cocycle is not a cocycle")
    return coords.submatrix(range(dst_b.ncols, dst_b.ncols + dst_reps.ncols),
                            range(coords.ncols))


def is_quasi_iso(f: ChainMap) -> bool:
    """True iff the cone of f is acyclic (no betti, no torsion)."""
    f.require_valid()
    return cohomology(cone(f)).is_zero()


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def cone(f: ChainMap) -> Complex:
    """Mapping cone: degree n is dst^n + src^{n+1}."""
    f.require_valid()
    C, D = f.src, f.dst
    degs = set(D.ranks) | {n - 1 for n in C.ranks}
    ranks = {n: D.rank(n) + C.rank(n + 1) for n in degs}
    diffs = {}
    for n in degs:
        m = block_matrix(D.ring,
                         [[D.d(n), f.f(n + 1)],
                          [None, -C.d(n + 1)]],
                         [D.rank(n + 1), C.rank(n + 2)],
                         [D.rank(n), C.rank(n + 1)])
        diffs[n] = m
    return Complex(D.ring, ranks, diffs)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """The canonical map dst -> cone(f)."""
    K = cone(f)
    D = f.dst
    maps = {}
    for n in D.degrees():
        maps[n] = block_matrix(D.ring, [[Matrix.identity(D.ring, D.rank(n))], [None]],
                               [D.rank(n), f.src.rank(n + 1)], [D.rank(n)])
    return ChainMap(D, K, maps)


def cone_projection(f: ChainMap) -> ChainMap:
    """The canonical map cone(f) -> shift(src, 1)."""
    K = cone(f)
    C = f.src
    S = shift(C, 1)
    maps = {}
    for n in K.degrees():
        maps[n] = block_matrix(C.ring, [[None, Matrix.identity(C.ring, C.rank(n + 1))]],
                               [C.rank(n + 1)], [f.dst.rank(n), C.rank(n + 1)])
    return ChainMap(K, S, maps)


def shift(C: Complex, k: int) -> Complex:
    """C[k]: degree n is C^{n+k}, differential picks up (-1)^k."""
    sign = 1 if k % 2 == 0 else -1
    ranks = {n - k: r for n, r in C.ranks.items()}
    diffs = {n - k: (m if sign == 1 else -m) for n, m in C.diffs.items()}
    return Complex(C.ring, ranks, diffs)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.src, k), shift(f.dst, k),
                    {n - k: m for n, m in f.maps.items()})


def direct_sum(C: Complex, D: Complex) -> Complex:
    if C.ring != D.ring:
        raise RingMismatch(f"{C.ring} vs {D.ring}")
    degs = set(C.ranks) | set(D.ranks)
    ranks = {n: C.rank(n) + D.rank(n) for n in degs}
    diffs = {}
    for n in degs:
        diffs[n] = block_matrix(C.ring, [[C.d(n), None], [None, D.d(n)]],
                                [C.rank(n + 1), D.rank(n + 1)],
                                [C.rank(n), D.rank(n)])
    return Complex(C.ring, ranks, diffs)


def tensor(C: Complex, D: Complex) -> Complex:
    """Total complex of the bigraded tensor product.

    Basis of degree n: pairs (p, q) with p + q = n, ordered by ascending
    p, row-major within each (p, q) block (C index moves slowest).
    """
    if C.ring != D.ring:
        raise RingMismatch(f"{C.ring} vs {D.ring}")
    ring = C.ring
    pairs: dict[int, list[tuple[int, int]]] = {}
    for p in C.degrees():
        for q in D.degrees():
            pairs.setdefault(p + q, []).append((p, q))
    for n in pairs:
        pairs[n].sort()
    ranks = {n: sum(C.rank(p) * D.rank(q) for p, q in ps) for n, ps in pairs.items()}

    def offset(n: int, p: int, q: int) -> int:
        off = 0
        for (pp, qq) in pairs.get(n, []):
            if (pp, qq) == (p, q):
                return off
            off += C.rank(pp) * D.rank(qq)
        return off

    diffs = {}
    for n, ps in pairs.items():
        rows_n1 = ranks.get(n + 1, 0)
        cols_n = ranks[n]
        if rows_n1 == 0 or cols_n == 0:
            continue
        grid = [[ring.zero()] * cols_n for _ in range(rows_n1)]
        for (p, q) in ps:
            rc, rd = C.rank(p), D.rank(q)
            base_c = offset(n, p, q)
            # d_C (x) id lands in bidegree (p+1, q)
            dC = C.d(p)
            if D.rank(q) and not dC.is_zero():
                base_r = offset(n + 1, p + 1, q)
                for i in range(dC.nrows):
                    for ii in range(rc):
                        v = dC.rows[i][ii]
                        if v == 0:
                            continue
                        for j in range(rd):
                            grid[base_r + i * rd + j][base_c + ii * rd + j] = v
            # id (x) d_D lands in bidegree (p, q+1) with sign (-1)^p
            dD = D.d(q)
            if rc and not dD.is_zero():
                sgn = 1 if p % 2 == 0 else -1
                base_r = offset(n + 1, p, q + 1)
                rd1 = D.rank(q + 1)
                for j in range(dD.nrows):
                    for jj in range(rd):
                        v = dD.rows[j][jj]
                        if v == 0:
                            continue
                        for i in range(rc):
                            grid[base_r + i * rd1 + j][base_c + i * rd + jj] = sgn * v
        diffs[n] = Matrix(ring, rows_n1, cols_n, tuple(tuple(r) for r in grid))
    return Complex(ring, ranks, diffs)


def tensor_many(factors: list[Complex]) -> Complex:
    """Left-associated iterated tensor; empty product is the unit."""
    if not factors:
        raise ShapeMismatch("tensor_many needs at least one factor")
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def hom_complex(C: Complex, D: Complex) -> Complex:
    """Total Hom complex: degree n collects maps C^m -> D^{m+n}.

    Basis of degree n: ascending m, then matrix units E_{ij} of
    Hom(C^m, D^{m+n}) in row-major order.
    """
    if C.ring != D.ring:
        raise RingMismatch(f"{C.ring} vs {D.ring}")
    ring = C.ring
    summands: dict[int, list[int]] = {}
    for m in C.degrees():
        for md in D.degrees():
            summands.setdefault(md - m, []).append(m)
    for n in summands:
        summands[n] = sorted(set(summands[n]))
    ranks = {n: sum(C.rank(m) * D.rank(m + n) for m in ms) for n, ms in summands.items()}

    def offset(n: int, m: int) -> int:
        off = 0
        for mm in summands.get(n, []):
            if mm == m:
                return off
            off += C.rank(mm) * D.rank(mm + n)
        return off

    diffs = {}
    for n, ms in summands.items():
        rows_n1 = ranks.get(n + 1, 0)
        cols_n = ranks[n]
        if rows_n1 == 0 or cols_n == 0:
            continue
        grid = [[ring.zero()] * cols_n for _ in range(rows_n1)]
        sgn = 1 if n % 2 == 0 else -1
        for m in ms:
            rc, rd = C.rank(m), D.rank(m + n)
            base_c = offset(n, m)
            # postcomposition d_D . phi stays in the m summand
            dD = D.d(m + n)
            if rc and not dD.is_zero():
                base_r = offset(n + 1, m)
                rd1 = D.rank(m + n + 1)
                for i in range(rd1):
                    for ii in range(rd):
                        v = dD.rows[i][ii]
                        if v == 0:
                            continue
                        for j in range(rc):
                            grid[base_r + i * rc + j][base_c + ii * rc + j] = v
            # precomposition -(-1)^n phi . d_C lands in the m-1 summand
            dC = C.d(m - 1)
            if rd and not dC.is_zero():
                base_r = offset(n + 1, m - 1)
                rc1 = C.rank(m - 1)
                for j in range(dC.nrows):
                    for jj in range(rc1):
                        v = dC.rows[j][jj]
                        if v == 0:
                            continue
                        for i in range(rd):
                            grid[base_r + i * rc1 + jj][base_c + i * rc + j] = -sgn * v
        diffs[n] = Matrix(ring, rows_n1, cols_n, tuple(tuple(r) for r in grid))
    return Complex(ring, ranks, diffs)


# ---------------------------------------------------------------------------
# homotopy search
# ---------------------------------------------------------------------------


def _splitting_frames(C: Complex):
    """Per-degree change of basis splitting C^n as boundaries + harmonic
    representatives + a complement of the cocycles (field rings).

    Returns {n: (T, Tinv, sizes)} where T's columns are the three groups
    in that order and sizes = (dim boundaries, dim harmonic, dim rest).
    The complement is spanned by the pivot coordinates of d(n), and the
    boundary basis in degree n+1 is d(n) applied to exactly those
    coordinates, so both differentials become identity blocks in these
    frames.
    """
    ring = C.ring
    degs = sorted(set(C.degrees()) | {n + 1 for n in C.degrees()})
    pivot_cols = {}
    for n in degs:
        _, piv = rref(C.d(n))
        pivot_cols[n] = piv
    frames = {}
    for n in degs:
        r = C.rank(n)
        if r == 0:
            frames[n] = (Matrix.zeros(ring, 0, 0), Matrix.zeros(ring, 0, 0), (0, 0, 0))
            continue
        # boundary basis: d(n-1) applied to the pivot coordinates below
        below = pivot_cols.get(n - 1, ())
        d_prev = C.d(n - 1)
        I_cols = [d_prev.column(j) for j in below]
        K = kernel_basis(C.d(n))
        I_mat = Matrix(ring, r, len(I_cols), tuple(tuple(c[i] for c in I_cols) for i in range(r)))
        if K.ncols:
            _, piv = rref(I_mat.hstack(K))
            hp = [c - I_mat.ncols for c in piv if c >= I_mat.ncols]
        else:
            hp = []
        H_mat = K.submatrix(range(K.nrows), hp)
        L_cols = pivot_cols[n]
        L_mat = Matrix(ring, r, len(L_cols),
                       tuple(tuple(ring.one() if i == j else ring.zero() for j in L_cols)
                             for i in range(r)))
        T = I_mat.hstack(H_mat).hstack(L_mat)
        frames[n] = (T, inverse(T), (I_mat.ncols, H_mat.ncols, L_mat.ncols))
    return frames


def _block(m: Matrix, row_range, col_range) -> Matrix:
    return m.submatrix(row_range, col_range)


def find_homotopy(f: ChainMap, g: ChainMap) -> Homotopy | None:
    """A homotopy witnessing f = g up to boundaries, or None.

    Over a field the homotopy is assembled degree by degree from a
    splitting of each term into boundaries, harmonic representatives, and
    a complement of the cocycles; the only obstruction is the harmonic
    block, which is exactly the induced map on cohomology.  Over Z and
    Z[1/S] the defining linear system is solved integrally.
    """
    f.require_valid()
    g.require_valid()
    if f.src != g.src or f.dst != g.dst:
        raise InvalidChainMap("maps have different endpoints")
    delta = f - g
    ring = f.ring
    if ring.is_field:
        return _find_homotopy_field(delta)
    return _find_homotopy_integral(delta)


def _find_homotopy_field(delta: ChainMap) -> Homotopy | None:
    ring = delta.ring
    src_frames = _splitting_frames(delta.src)
    dst_frames = _splitting_frames(delta.dst)
    degs = sorted(set(src_frames) | set(dst_frames))
    w: dict[int, tuple[Matrix, tuple, tuple]] = {}
    for n in degs:
        Ts, _, ssz = src_frames.get(n, (None, None, (0, 0, 0)))
        _, Tdi, dsz = dst_frames.get(n, (None, None, (0, 0, 0)))
        if Ts is None or Tdi is None or delta.src.rank(n) == 0 or delta.dst.rank(n) == 0:
            w[n] = (Matrix.zeros(ring, delta.dst.rank(n), delta.src.rank(n)), ssz, dsz)
            continue
        w[n] = (Tdi @ delta.f(n) @ Ts, ssz, dsz)
    # obstruction: the harmonic-to-harmonic block must vanish
    for n in degs:
        wn, (si, sh, sl), (di, dh, dl) = w[n]
        if sh and dh:
            hh = _block(wn, range(di, di + dh), range(si, si + sh))
            if not hh.is_zero():
                return None
    h_maps: dict[int, Matrix] = {}
    for n in degs:
        r_src = delta.src.rank(n)
        r_dst_prev = delta.dst.rank(n - 1)
        if r_src == 0 or r_dst_prev == 0:
            continue
        _, _, (si, sh, sl) = src_frames[n]
        _, _, (pi, ph, pl) = dst_frames[n - 1]
        hb = [[ring.zero()] * r_src for _ in range(r_dst_prev)]

        def put(block: Matrix, r0: int, c0: int) -> None:
            for i in range(block.nrows):
                for j in range(block.ncols):
                    hb[r0 + i][c0 + j] = block.rows[i][j]

        wn, _, (di_n, dh_n, dl_n) = w[n]
        # boundary rows of w(n) prescribe the complement rows of h(n)
        if di_n:
            put(_block(wn, range(di_n), range(si)), pi + ph, 0)                      # -> h_{L,I}
            put(_block(wn, range(di_n), range(si, si + sh)), pi + ph, si)            # -> h_{L,H}
            put(_block(wn, range(di_n), range(si + sh, si + sh + sl)), pi + ph, si + sh)  # -> h_{L,L}
        if n - 1 in w:
            wp, (si_p, sh_p, sl_p), (di_p, dh_p, dl_p) = w[n - 1]
            if dh_p and sl_p:
                # harmonic-to-complement block one degree down fixes h_{H,I}
                put(_block(wp, range(di_p, di_p + dh_p), range(si_p + sh_p, si_p + sh_p + sl_p)),
                    pi, 0)
        h_maps[n] = Matrix(ring, r_dst_prev, r_src, tuple(tuple(r) for r in hb))
    # transport the block solution back to the standard bases
    out: dict[int, Matrix] = {}
    for n, hb in h_maps.items():
        Td, _, _ = dst_frames[n - 1]
        _, Tsi, _ = src_frames[n]
        out[n] = Td @ hb @ Tsi
    h = Homotopy(delta.src, delta.dst, out)
    return h


def _find_homotopy_integral(delta: ChainMap) -> Homotopy | None:
    ring = delta.ring
    src, dst = delta.src, delta.dst
    degs = sorted(set(src.ranks) | set(dst.ranks) | {n + 1 for n in src.ranks})
    # variables: entries of h(n) for each degree with a nonempty shape
    var_index: dict[tuple[int, int, int], int] = {}
    for n in degs:
        rows_, cols_ = dst.rank(n - 1), src.rank(n)
        for i in range(rows_):
            for j in range(cols_):
                var_index[(n, i, j)] = len(var_index)
    eqs: list[dict[int, object]] = []
    rhs = []
    for n in degs:
        target = delta.f(n)
        d_dst = dst.d(n - 1)
        d_src = src.d(n)
        for i in range(dst.rank(n)):
            for j in range(src.rank(n)):
                row: dict[int, object] = {}
                # (d h)(n)_{ij} = sum_t d_dst[i][t] h(n)[t][j]
                for t in range(dst.rank(n - 1)):
                    v = d_dst.rows[i][t]
                    if v != 0:
                        k = var_index[(n, t, j)]
                        row[k] = row.get(k, ring.zero()) + v
                # (h d)(n)_{ij} = sum_t h(n+1)[i][t] d_src[t][j]
                for t in range(src.rank(n + 1)):
                    v = d_src.rows[t][j]
                    if v != 0:
                        k = var_index[(n + 1, i, t)]
                        row[k] = row.get(k, ring.zero()) + v
                if row or target.rows[i][j] != 0:
                    eqs.append(row)
                    rhs.append(target.rows[i][j])
    sol = solve_sparse(eqs, rhs, len(var_index), ring)
    if sol is None:
        return None
    maps: dict[int, Matrix] = {}
    for n in degs:
        rows_, cols_ = dst.rank(n - 1), src.rank(n)
        if rows_ == 0 or cols_ == 0:
            continue
        maps[n] = Matrix(ring, rows_, cols_, tuple(
            tuple(sol[var_index[(n, i, j)]] for j in range(cols_)) for i in range(rows_)))
    return Homotopy(src, dst, maps)


# ---------------------------------------------------------------------------
# base change
# ---------------------------------------------------------------------------


def _map_matrix(m: Matrix, rm: RingMap) -> Matrix:
    return m.apply_entrywise(lambda v: ring_map_apply_value(rm, v), rm.dst)


def base_change(obj, rm: RingMap):
    """Apply a coefficient ring map entrywise to a Complex, ChainMap, or
    Homotopy.  Validity is preserved because the map is a ring hom."""
    if isinstance(obj, Complex):
        if obj.ring != rm.src:
            raise RingMismatch(f"complex lives over {obj.ring}, map starts at {rm.src}")
        return Complex(rm.dst, dict(obj.ranks),
                       {n: _map_matrix(m, rm) for n, m in obj.diffs.items()})
    if isinstance(obj, ChainMap):
        return ChainMap(base_change(obj.src, rm), base_change(obj.dst, rm),
                        {n: _map_matrix(m, rm) for n, m in obj.maps.items()})
    if isinstance(obj, Homotopy):
        return Homotopy(base_change(obj.src, rm), base_change(obj.dst, rm),
                        {n: _map_matrix(m, rm) for n, m in obj.maps.items()})
    raise ShapeMismatch(f"cannot base change {type(obj).__name__}")
