"""Independent reference implementations used to cross-check the library.

Each oracle deliberately uses a different algorithm from the code under
test (minors instead of elimination, extended Euclid instead of Fermat,
brute force instead of structure) so agreement is meaningful.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination with full
    pivoting.  Independent of the RREF path in the library."""
    m = [row[:] for row in rows]
    if not m or not m[0]:
        return 0
    nr, nc = len(m), len(m[0])
    r = 0
    prev = 1
    for _ in range(min(nr, nc)):
        piv = None
        for i in range(r, nr):
            for j in range(nc):
                if m[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        m[r], m[pi] = m[pi], m[r]
        for i in range(r + 1, nr):
            for j in range(nc):
                if j == pj:
                    continue
                m[i][j] = (m[i][j] * m[r][pj] - m[i][pj] * m[r][j]) // prev
            m[i][pj] = 0
        prev = m[r][pj]
        r += 1
    return r


def rational_rank(rows: list[list[Fraction]]) -> int:
    den = 1
    for row in rows:
        for v in row:
            d = Fraction(v).denominator
            den = den * d // gcd(den, d)
    return bareiss_rank([[int(Fraction(v) * den) for v in row] for row in rows])


def _det(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, v in enumerate(rows[0]):
        if v == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * v * _det(minor)
    return total


def minor_gcd_divisors(rows: list[list[int]]) -> list[int]:
    """Elementary divisors from gcds of k-by-k minors.  Exponential; keep
    the matrices small (at most 5x5 or so)."""
    if not rows or not rows[0]:
        return []
    nr, nc = len(rows), len(rows[0])
    gs = [1]
    for k in range(1, min(nr, nc) + 1):
        g = 0
        for ri in combinations(range(nr), k):
            for ci in combinations(range(nc), k):
                sub = [[rows[i][j] for j in ci] for i in ri]
                g = gcd(g, abs(_det(sub)))
        gs.append(g)
        if g == 0:
            break
    out = []
    for k in range(1, len(gs)):
        if gs[k] == 0:
            break
        out.append(gs[k] // gs[k - 1])
    return out


def minor_rank(rows: list[list[int]]) -> int:
    """Rank as the size of the largest nonvanishing minor.  Exponential,
    for small matrices only; shares nothing with elimination."""
    if not rows or not rows[0]:
        return 0
    nr, nc = len(rows), len(rows[0])
    assert max(nr, nc) <= 8, "minor_rank oracle is for small matrices"
    for k in range(min(nr, nc), 0, -1):
        for ri in combinations(range(nr), k):
            for ci in combinations(range(nc), k):
                if _det([[rows[i][j] for j in ci] for i in ri]) != 0:
                    return k
    return 0


def mod_inverse(a: int, p: int) -> int:
    """Inverse of a mod p via extended Euclid (library uses Fermat)."""
    old_r, r = a % p, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1, "not invertible"
    return old_s % p


def brute_prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# Frozen expected values, computed by hand before the library existed.
# 1/6 in F_5: 6 = 1 mod 5, so 1/6 = 1.
FROZEN_LOC_TO_F5 = {"src": ("loc", (2, 3)), "value": Fraction(1, 6), "p": 5, "image": 1}
# smallest localization containing 3/10 and 1/4 inverts exactly {2, 5}
FROZEN_MINIMAL_LOC = {"values": [Fraction(3, 10), Fraction(1, 4)], "primes": (2, 5)}
# 10 in F_7
FROZEN_Z_TO_F7 = {"value": 10, "p": 7, "image": 3}
