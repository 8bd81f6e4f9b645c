"""Splitting homotopy idempotents and rectifying homotopy ladders.

The splitting construction realizes the sequential colimit along an
endomorphism at finite rank: over a field, a chain endomorphism acts
invertibly on the degreewise eventual image im(e^N) (N at least the
maximal rank), and that image is a subcomplex because d commutes with
e^N.  The retraction is the eventual-image projection composed with the
inverse of the restricted endomorphism, which makes r . i = id hold on
the nose; only the homotopy i . r ~ e needs solving.

Over Z and Z[1/S] a homotopy idempotent is first strictified by the cubic
averaging iteration e -> 3e^2 - 2e^3 (each step stays in the homotopy
class, with the witness transported explicitly); the iteration converges
exactly when the defect e^2 - e is nilpotent, and a strict idempotent
over these rings always splits its column lattice off as a direct
summand.  Non-nilpotent defects are refused rather than approximated.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2

from .complexes import (
    ChainMap,
    Complex,
    Homotopy,
    base_change,
    cohomology,
    find_homotopy,
    h_matrix,
    identity_map,
    zero_homotopy,
)
from .errors import (
    InvalidCertificate,
    InvalidHomotopy,
    InvalidSquare,
    NoSplitFound,
    NotSplit,
    ShapeMismatch,
    UnsupportedRing,
)
from .linalg import Matrix, image_basis, inverse, rank, solve_right, solve_sparse
from .rings import Rationals, RingMap

__all__ = [
    "HomotopyIdempotent",
    "Ladder",
    "LadderMap",
    "SplittingCertificate",
    "eventual_image",
    "idempotent_up_to_power",
    "rectify_ladder",
    "telescope_split",
    "verify_idempotent",
    "verify_splitting_certificate",
]


@dataclass(frozen=True)
class HomotopyIdempotent:
    """An endomorphism e of B together with a witness h for e.e ~ e."""

    B: Complex
    e: ChainMap
    h: Homotopy

    def __post_init__(self) -> None:
        if self.e.src != self.B or self.e.dst != self.B:
            raise ShapeMismatch("e must be an endomorphism of B")
        if self.h.src != self.B or self.h.dst != self.B:
            raise ShapeMismatch("h must be a degree -1 endomorphism datum of B")


def verify_idempotent(P: HomotopyIdempotent) -> bool:
    """Exact check: e is a chain map and e.e - e = d h + h d."""
    if not P.e.commutes():
        return False
    return P.h.witnesses(P.e @ P.e, P.e)


@dataclass(frozen=True)
class SplittingCertificate:
    """A splitting A --i--> B --r--> A of a homotopy idempotent.

    r . i = id up to H_ri and i . r = e up to H_ir; the construction in
    this module always emits H_ri = 0 (the identity holds strictly).
    """

    idem: HomotopyIdempotent
    A: Complex
    i: ChainMap
    r: ChainMap
    H_ri: Homotopy
    H_ir: Homotopy


def _restrict_endo(B: Complex, J: dict[int, Matrix], target: ChainMap) -> dict[int, Matrix]:
    """Coordinates of target's action on the span of the J-columns."""
    out = {}
    for n, basis in J.items():
        if basis.ncols == 0:
            continue
        img = target.f(n) @ basis
        coords = solve_right(basis, img)
        if coords is None:
            raise NoSplitFound("endomorphism does not preserve the eventual image")
        out[n] = coords
    return out


def _image_subcomplex(B: Complex, eN: ChainMap) -> tuple[Complex, ChainMap, dict[int, Matrix]]:
    """The degreewise image of eN as a subcomplex, with its inclusion."""
    ring = B.ring
    J = {n: image_basis(eN.f(n)) for n in B.degrees()}
    ranks = {n: J[n].ncols for n in J if J[n].ncols}
    diffs = {}
    for n in ranks:
        if ranks.get(n + 1):
            img = B.d(n) @ J[n]
            coords = solve_right(J[n + 1], img)
            if coords is None:
                raise NoSplitFound("differential does not preserve the eventual image")
            diffs[n] = coords
        elif not (B.d(n) @ J[n]).is_zero():
            raise NoSplitFound("differential leaves the eventual image")
    A = Complex(ring, ranks, diffs)
    incl = ChainMap(A, B, {n: J[n] for n in ranks})
    return A, incl, J


def eventual_image(B: Complex, e: ChainMap) -> tuple[Complex, ChainMap]:
    """(A, i) with A = degreewise im(e^N), N = max rank, i the inclusion.

    Over a field this exists for any chain endomorphism and e acts
    invertibly on A.  Over Z / Z[1/S] only strict idempotents are
    accepted (their image is a direct summand of the lattice).
    """
    if e.src != B or e.dst != B:
        raise ShapeMismatch("e must be an endomorphism of B")
    e.require_valid()
    if not B.ring.is_field:
        if not (e @ e - e).is_zero():
            raise UnsupportedRing(
                f"eventual images over {B.ring} need a strict idempotent")
        A, incl, J = _image_subcomplex(B, e)
        return A, incl
    N = max([B.rank(n) for n in B.degrees()], default=0)
    A, incl, _ = _image_subcomplex(B, e.power(max(N, 1)))
    return A, incl


def _strictify(P: HomotopyIdempotent):
    """Iterate e -> 3e^2 - 2e^3 with transported witnesses.

    Returns (strict e, accumulated homotopy acc) with
    strict_e - e = d acc + acc d, or (None, None) when the defect is not
    nilpotent (the iteration cannot terminate).
    """
    B = P.B
    e, h = P.e, P.h
    acc = zero_homotopy(B, B)
    eps = e @ e - e
    max_rank = max([B.rank(n) for n in B.degrees()], default=1)
    steps = max(1, ceil(log2(max(max_rank, 2)))) + 1
    for _ in range(steps):
        if eps.is_zero():
            return e, acc
        one = identity_map(B)
        # e' - e = d[(1-2e)h] + [(1-2e)h]d
        acc = acc + h.postcompose(one - e.scale(2))
        e2 = e @ e
        e_next = e2.scale(3) - (e2 @ e).scale(2)
        # defect transforms as eps' = eps^2(4 eps - 3), witnessed by
        # h' = h . (4 eps^2 - 3 eps)
        h = h.precompose((eps @ eps).scale(4) - eps.scale(3))
        e = e_next
        eps = e @ e - e
    if eps.is_zero():
        return e, acc
    return None, None


def telescope_split(P: HomotopyIdempotent) -> SplittingCertificate:
    """Split a homotopy idempotent with an exactly verified certificate.

    The retraction candidate makes r . i = id strict, so H_ri = 0; the
    homotopy i . r ~ e is found by the degreewise solver, with a joint
    linear solve over (r, H_ri, H_ir) as a completeness fallback.
    """
    if not verify_idempotent(P):
        raise InvalidHomotopy("input does not verify as a homotopy idempotent")
    B, ring = P.B, P.B.ring
    if ring.is_field:
        return _telescope_split_field(P)
    return _telescope_split_integral(P)


def _telescope_split_field(P: HomotopyIdempotent) -> SplittingCertificate:
    B, e = P.B, P.e
    N = max(max([B.rank(n) for n in B.degrees()], default=1), 1)
    eN = e.power(N)
    A, incl, J = _image_subcomplex(B, eN)
    proj = ChainMap(B, A, _restrict_endo_full(B, A, J, eN))
    eA = ChainMap(A, A, _restrict_endo(B, J, e))
    eA_inv = _invert_chain_map(eA)
    r = eA_inv.power(N) @ proj
    if not (r @ incl == identity_map(A)):
        raise NoSplitFound("retraction candidate failed r.i = id")
    H_ri = zero_homotopy(A, A)
    H_ir = find_homotopy(incl @ r, e)
    if H_ir is None:
        r, H_ri, H_ir = _joint_solve(P, A, incl)
    return SplittingCertificate(P, A, incl, r, H_ri, H_ir)


def _telescope_split_integral(P: HomotopyIdempotent) -> SplittingCertificate:
    B = P.B
    e0, acc = _strictify(P)
    if e0 is None:
        raise UnsupportedRing(
            f"homotopy idempotent over {B.ring} has a non-nilpotent defect; "
            "no strict representative at this stage")
    A, incl, J = _image_subcomplex(B, e0)
    r = ChainMap(B, A, _restrict_endo_full(B, A, J, e0))
    if not (r @ incl == identity_map(A)):
        raise NoSplitFound("lattice retraction failed r.i = id")
    if not (incl @ r == e0):
        raise NoSplitFound("lattice splitting does not reproduce the idempotent")
    # i.r - e = e0 - e = d acc + acc d
    return SplittingCertificate(P, A, incl, r, zero_homotopy(A, A), acc)


def _restrict_endo_full(B: Complex, A: Complex, J: dict[int, Matrix],
                        eN: ChainMap) -> dict[int, Matrix]:
    """Coordinates of eN : B -> span(J) in the J-basis, degree by degree."""
    out = {}
    for n in B.degrees():
        basis = J.get(n)
        if basis is None or basis.ncols == 0:
            continue
        coords = solve_right(basis, eN.f(n))
        if coords is None:
            raise NoSplitFound("projection onto the eventual image is not defined")
        out[n] = coords
    return out


def _invert_chain_map(u: ChainMap) -> ChainMap:
    try:
        return ChainMap(u.src, u.src,
                        {n: inverse(u.f(n)) for n in u.src.degrees() if u.src.rank(n)})
    except UnsupportedRing as exc:
        raise NoSplitFound(f"restricted endomorphism is not invertible: {exc}") from exc


def _joint_solve(P: HomotopyIdempotent, A: Complex, incl: ChainMap):
    """Completeness fallback: solve for (r, H_ri, H_ir) as one linear
    system with i fixed.  Raises NoSplitFound with the system's
    dimensions if even this has no solution."""
    B, e, ring = P.B, P.e, P.B.ring
    degs = sorted(set(B.ranks) | set(A.ranks))
    var: dict[tuple, int] = {}

    def vid(tag, n, i, j):
        key = (tag, n, i, j)
        if key not in var:
            var[key] = len(var)
        return var[key]

    eqs: list[dict[int, object]] = []
    rhs: list[object] = []

    def emit(row, b):
        if row or b != 0:
            eqs.append(row)
            rhs.append(b)

    for n in degs:
        ra_n, ra_n1 = A.rank(n), A.rank(n + 1)
        rb_n, rb_n1 = B.rank(n), B.rank(n + 1)
        dA, dB = A.d(n), B.d(n)
        # r is a chain map: dA r(n) - r(n+1) dB = 0
        for i in range(ra_n1):
            for j in range(rb_n):
                row: dict[int, object] = {}
                for t in range(ra_n):
                    v = dA.rows[i][t]
                    if v != 0:
                        k = vid("r", n, t, j)
                        row[k] = row.get(k, ring.zero()) + v
                for t in range(rb_n1):
                    v = dB.rows[t][j]
                    if v != 0:
                        k = vid("r", n + 1, i, t)
                        row[k] = row.get(k, ring.zero()) - v
                emit(row, ring.zero())
        # r i - id = d H_ri + H_ri d   (A -> A)
        for i in range(ra_n):
            for j in range(ra_n):
                row = {}
                for t in range(rb_n):
                    v = incl.f(n).rows[t][j]
                    if v != 0:
                        k = vid("r", n, i, t)
                        row[k] = row.get(k, ring.zero()) + v
                for t in range(A.rank(n - 1)):
                    v = A.d(n - 1).rows[i][t]
                    if v != 0:
                        k = vid("hri", n, t, j)
                        row[k] = row.get(k, ring.zero()) - v
                for t in range(ra_n1):
                    v = dA.rows[t][j]
                    if v != 0:
                        k = vid("hri", n + 1, i, t)
                        row[k] = row.get(k, ring.zero()) - v
                emit(row, ring.one() if i == j else ring.zero())
        # i r - e = d H_ir + H_ir d   (B -> B)
        for i in range(rb_n):
            for j in range(rb_n):
                row = {}
                for t in range(ra_n):
                    v = incl.f(n).rows[i][t]
                    if v != 0:
                        k = vid("r", n, t, j)
                        row[k] = row.get(k, ring.zero()) + v
                for t in range(rb_n - rb_n):
                    pass
                for t in range(B.rank(n - 1)):
                    v = B.d(n - 1).rows[i][t]
                    if v != 0:
                        k = vid("hir", n, t, j)
                        row[k] = row.get(k, ring.zero()) - v
                for t in range(rb_n1):
                    v = dB.rows[t][j]
                    if v != 0:
                        k = vid("hir", n + 1, i, t)
                        row[k] = row.get(k, ring.zero()) - v
                emit(row, e.f(n).rows[i][j])
    sol = solve_sparse(eqs, rhs, len(var), ring)
    if sol is None:
        raise NoSplitFound(
            f"joint splitting system unsolvable: {len(eqs)} equations, "
            f"{len(var)} unknowns over {ring}")

    def collect(tag, shape_of):
        out = {}
        for n in degs:
            nr, nc = shape_of(n)
            if nr == 0 or nc == 0:
                continue
            out[n] = Matrix(ring, nr, nc, tuple(
                tuple(sol[var[(tag, n, i, j)]] if (tag, n, i, j) in var else ring.zero()
                      for j in range(nc)) for i in range(nr)))
        return out

    r = ChainMap(B, A, collect("r", lambda n: (A.rank(n), B.rank(n))))
    H_ri = Homotopy(A, A, collect("hri", lambda n: (A.rank(n - 1), A.rank(n))))
    H_ir = Homotopy(B, B, collect("hir", lambda n: (B.rank(n - 1), B.rank(n))))
    return r, H_ri, H_ir


def _to_field(obj):
    ring = obj.ring if hasattr(obj, "ring") else obj.src.ring
    if ring.is_field:
        return obj
    return base_change(obj, RingMap(ring, Rationals()))


def verify_splitting_certificate(cert: SplittingCertificate) -> bool:
    """Re-check every stored equality of a splitting certificate.

    Chain-level identities are verified over the certificate's own ring;
    the cohomology-level identities are checked over the fraction field.
    """
    P = cert.idem
    if not verify_idempotent(P):
        return False
    if cert.i.src != cert.A or cert.i.dst != P.B:
        return False
    if cert.r.src != P.B or cert.r.dst != cert.A:
        return False
    if not (cert.i.commutes() and cert.r.commutes()):
        return False
    if not cert.H_ri.witnesses(cert.r @ cert.i, identity_map(cert.A)):
        return False
    if not cert.H_ir.witnesses(cert.i @ cert.r, P.e):
        return False
    # cohomology-level identities
    i_f, r_f, e_f = _to_field(cert.i), _to_field(cert.r), _to_field(P.e)
    degs = sorted(set(cert.A.ranks) | set(P.B.ranks))
    for n in degs:
        hi = h_matrix(i_f, n)
        hr = h_matrix(r_f, n)
        he = h_matrix(e_f, n)
        if hr @ hi != Matrix.identity(hi.ring, hi.ncols):
            return False
        if hi @ hr != he:
            return False
    return True


def idempotent_up_to_power(cert: SplittingCertificate) -> bool:
    """The automorphism argument at the cohomology level.

    With u = r . i, checks H(u)^3 = H(u)^2 and H(u) invertible in every
    degree; both force H(u) = id.  The certificate must verify first.
    """
    if not verify_splitting_certificate(cert):
        raise InvalidCertificate("certificate fails its stored equalities")
    u = cert.r @ cert.i
    u_f = _to_field(u)
    for n in sorted(cert.A.ranks):
        hu = h_matrix(u_f, n)
        if hu @ hu @ hu != hu @ hu:
            return False
        if hu.ncols and rank(hu) != hu.ncols:
            return False
    return True


# ---------------------------------------------------------------------------
# ladders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ladder:
    """X_0 -> X_1 -> ... with degreewise split injective structure maps.

    ``splits[n]`` maps each degree m to a matrix s with s @ f_n(m) = id;
    the split witness need not be a chain map.
    """

    objects: tuple
    maps: tuple
    splits: tuple

    def __post_init__(self) -> None:
        if len(self.maps) != len(self.objects) - 1 or len(self.splits) != len(self.maps):
            raise ShapeMismatch("ladder lengths are inconsistent")
        for n, f in enumerate(self.maps):
            if f.src != self.objects[n] or f.dst != self.objects[n + 1]:
                raise ShapeMismatch(f"ladder map {n} has wrong endpoints")

    def validate(self) -> None:
        for n, f in enumerate(self.maps):
            f.require_valid()
            src = self.objects[n]
            for m in src.degrees():
                s = self.splits[n].get(m)
                if s is None:
                    raise NotSplit(f"missing split witness at stage {n}, degree {m}")
                if s @ f.f(m) != Matrix.identity(src.ring, src.rank(m)):
                    raise NotSplit(f"split witness fails at stage {n}, degree {m}")


@dataclass(frozen=True)
class LadderMap:
    """Stagewise maps u_n with homotopy-commuting squares.

    ``squares[n]`` witnesses g_n . u_n ~ u_{n+1} . f_n.
    """

    src: Ladder
    dst: Ladder
    components: tuple
    squares: tuple

    def __post_init__(self) -> None:
        if len(self.components) != len(self.src.objects):
            raise ShapeMismatch("one component per ladder stage is required")
        if len(self.squares) != len(self.src.maps):
            raise ShapeMismatch("one square witness per ladder rung is required")

    def validate(self) -> None:
        self.src.validate()
        for u in self.components:
            u.require_valid()
        for n, H in enumerate(self.squares):
            g, f = self.dst.maps[n], self.src.maps[n]
            u, u1 = self.components[n], self.components[n + 1]
            if not H.witnesses(g @ u, u1 @ f):
                raise InvalidSquare(f"square {n} is not homotopy-commutative as witnessed")


def rectify_ladder(L: LadderMap) -> tuple[list[ChainMap], list[Homotopy]]:
    """Replace the components by strictly commuting ones.

    Returns (v, K) with g_n @ v_n = v_{n+1} @ f_n as exact matrix
    equality and K_n witnessing v_n ~ u_n.  The correction at each stage
    is the boundary of the accumulated square defect transported through
    the split witness, so no linear solving is involved.
    """
    L.validate()
    vs = [L.components[0]]
    Ks = [zero_homotopy(L.src.objects[0], L.dst.objects[0])]
    for n in range(len(L.src.maps)):
        g, f = L.dst.maps[n], L.src.maps[n]
        u1 = L.components[n + 1]
        # accumulated defect: g v_n - u_{n+1} f = d(defect) + (defect) d
        defect = L.squares[n] + Ks[-1].postcompose(g)
        s = L.src.splits[n]
        X1, Y1 = L.src.objects[n + 1], L.dst.objects[n + 1]
        transported = {}
        for m in X1.degrees():
            sm = s.get(m)
            if sm is None or Y1.rank(m - 1) == 0:
                continue
            transported[m] = defect.h(m) @ sm
        K1 = Homotopy(X1, Y1, transported)
        v1 = u1 + K1.boundary()
        if not (g @ vs[-1] == v1 @ f):
            raise InvalidSquare("rectification failed to commute strictly")
        vs.append(v1)
        Ks.append(K1)
    return vs, Ks
