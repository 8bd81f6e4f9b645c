"""Coefficient rings and the maps allowed between them.

Four rings are supported, all with exact arithmetic:

* ``Integers()``            -- Z, values are Python ints
* ``LocalizedIntegers(S)``  -- Z[1/S] for a finite set of primes S, values are
                               Fractions whose denominator only involves S
* ``Rationals()``           -- Q, values are Fractions
* ``PrimeField(p)``         -- F_p, values are ints in [0, p)

The only ring homomorphisms the package will ever apply are the canonical
ones: out of Z into anything, localization enlargements Z[1/S] -> Z[1/S'],
Z[1/S] -> Q, reduction Z[1/S] -> F_p for p outside S, and identities.
Everything else is refused at construction time.

>>> src = LocalizedIntegers((2, 3))
>>> to_f5 = RingMap(src, PrimeField(5))
>>> ring_map_apply(to_f5, RingElement(src, Fraction(1, 6))).value
1
>>> minimal_localization([Fraction(3, 10), Fraction(1, 4)]).primes
(2, 5)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InadmissibleMap, InvalidObject, RingMismatch, UnsupportedRing

__all__ = [
    "CoefficientRing",
    "Integers",
    "LocalizedIntegers",
    "PrimeField",
    "Rationals",
    "RingElement",
    "RingMap",
    "decode_ring",
    "denominator_primes",
    "encode_ring",
    "factorize",
    "format_scalar",
    "is_defined_over",
    "is_prime",
    "minimal_localization",
    "parse_scalar",
    "ring_map_apply",
    "ring_map_apply_value",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer by trial division.

    Inputs here are denominators and elementary divisors of desk-scale
    matrices, so trial division is plenty.
    """
    if n <= 0:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def denominator_primes(x: Fraction | int) -> tuple[int, ...]:
    """Sorted primes dividing the reduced denominator of ``x``."""
    d = 1 if isinstance(x, int) else Fraction(x).denominator
    return tuple(sorted(factorize(d))) if d > 1 else ()


@dataclass(frozen=True)
class CoefficientRing:
    """One of Z, Z[1/S], Q, F_p.  Use the factory functions below."""

    kind: str  # "Z" | "loc" | "Q" | "Fp"
    primes: tuple[int, ...] = ()
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "loc", "Q", "Fp"):
            raise InvalidObject(f"unknown ring kind {self.kind!r}")
        if self.kind == "loc":
            if not self.primes:
                raise InvalidObject("LocalizedIntegers with empty S must be Integers()")
            if list(self.primes) != sorted(set(self.primes)):
                raise InvalidObject("localized primes must be sorted and distinct")
            for q in self.primes:
                if not is_prime(q):
                    raise InvalidObject(f"{q} is not prime")
        if self.kind == "Fp" and not is_prime(self.p):
            raise InvalidObject(f"{self.p} is not prime")

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp")

    @property
    def char_zero(self) -> bool:
        return self.kind in ("Z", "loc", "Q")

    def zero(self):
        return 0 if self.kind in ("Z", "Fp") else Fraction(0)

    def one(self):
        return 1 if self.kind in ("Z", "Fp") else Fraction(1)

    def coerce(self, raw):
        """Normalize ``raw`` to this ring's value type, or raise."""
        if self.kind == "Fp":
            if isinstance(raw, Fraction):
                if raw.denominator % self.p == 0:
                    raise InvalidObject(f"denominator of {raw} vanishes mod {self.p}")
                num = raw.numerator % self.p
                return num * pow(raw.denominator % self.p, self.p - 2, self.p) % self.p
            return int(raw) % self.p
        x = Fraction(raw)
        if self.kind == "Z":
            if x.denominator != 1:
                raise InvalidObject(f"{x} is not an integer")
            return int(x)
        if self.kind == "loc":
            for q in denominator_primes(x):
                if q not in self.primes:
                    raise InvalidObject(f"{x} is not defined over {self}: prime {q}")
        return x

    def contains_value(self, raw) -> bool:
        try:
            self.coerce(raw)
        except InvalidObject:
            return False
        return True

    def invert(self, v):
        """Multiplicative inverse, or raise UnsupportedRing if not a unit."""
        if self.kind == "Fp":
            if v % self.p == 0:
                raise UnsupportedRing(f"0 is not invertible in F_{self.p}")
            return pow(v, self.p - 2, self.p)
        if v == 0:
            raise UnsupportedRing("0 is not invertible")
        inv = Fraction(1) / Fraction(v)
        if self.kind in ("Z", "loc") and not self.contains_value(inv):
            raise UnsupportedRing(f"{v} is not a unit in {self}")
        return int(inv) if self.kind == "Z" else inv

    def is_unit(self, v) -> bool:
        try:
            self.invert(v)
        except UnsupportedRing:
            return False
        return True

    def __str__(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        if self.kind == "Fp":
            return f"F_{self.p}"
        inside = ",".join(str(q) for q in self.primes)
        return f"Z[1/{{{inside}}}]"


def Integers() -> CoefficientRing:
    return CoefficientRing("Z")


def LocalizedIntegers(primes) -> CoefficientRing:
    """Z[1/S].  An empty S normalizes to plain Z so stages compare structurally."""
    ps = tuple(sorted(set(int(q) for q in primes)))
    if not ps:
        return Integers()
    return CoefficientRing("loc", primes=ps)


def Rationals() -> CoefficientRing:
    return CoefficientRing("Q")


def PrimeField(p: int) -> CoefficientRing:
    return CoefficientRing("Fp", p=int(p))


@dataclass(frozen=True)
class RingElement:
    """A scalar tagged with its ring; values are normalized at construction."""

    ring: CoefficientRing
    value: object = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.ring.coerce(self.value))

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        v = self.value + other.value
        return RingElement(self.ring, v % self.ring.p if self.ring.kind == "Fp" else v)

    def __mul__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        v = self.value * other.value
        return RingElement(self.ring, v % self.ring.p if self.ring.kind == "Fp" else v)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, -self.value)

    def inverse(self) -> "RingElement":
        return RingElement(self.ring, self.ring.invert(self.value))

    def _check(self, other: "RingElement") -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")


# Admissible source -> target kinds; subset/characteristic side conditions are
# enforced in RingMap.__post_init__.
_ADMISSIBLE = {
    ("Z", "Z"), ("Z", "loc"), ("Z", "Q"), ("Z", "Fp"),
    ("loc", "loc"), ("loc", "Q"), ("loc", "Fp"),
    ("Q", "Q"),
    ("Fp", "Fp"),
}


@dataclass(frozen=True)
class RingMap:
    """A canonical homomorphism between two supported rings."""

    src: CoefficientRing
    dst: CoefficientRing

    def __post_init__(self) -> None:
        s, d = self.src, self.dst
        if (s.kind, d.kind) not in _ADMISSIBLE:
            raise InadmissibleMap(f"no canonical map {s} -> {d}")
        if s.kind == "loc" and d.kind == "loc":
            if not set(s.primes) <= set(d.primes):
                raise InadmissibleMap(f"{s} -> {d}: localized primes must not shrink")
        if s.kind == "loc" and d.kind == "Fp":
            if d.p in s.primes:
                raise InadmissibleMap(f"{s} -> {d}: {d.p} is already inverted")
        if s.kind == "Fp" and d.kind == "Fp" and s.p != d.p:
            raise InadmissibleMap(f"no map F_{s.p} -> F_{d.p}")


def ring_map_apply_value(m: RingMap, v):
    """Apply ``m`` to a raw value of the source ring."""
    return m.dst.coerce(v)


def ring_map_apply(m: RingMap, x: RingElement) -> RingElement:
    """Image of ``x`` under the canonical map ``m``.

    >>> ring_map_apply(RingMap(Integers(), PrimeField(7)), RingElement(Integers(), 10)).value
    3
    """
    if x.ring != m.src:
        raise RingMismatch(f"element lives over {x.ring}, map starts at {m.src}")
    return RingElement(m.dst, ring_map_apply_value(m, x.value))


def minimal_localization(xs) -> CoefficientRing:
    """Smallest Z[1/S] containing every listed rational.

    Accepts RingElements over char-0 rings, Fractions, and ints.
    """
    primes: set[int] = set()
    for x in xs:
        if isinstance(x, RingElement):
            if not x.ring.char_zero:
                raise UnsupportedRing(f"{x.ring} is not a subring of Q")
            v = x.value
        else:
            v = x
        primes.update(denominator_primes(v))
    return LocalizedIntegers(primes)


def is_defined_over(x, ring: CoefficientRing) -> bool:
    """Whether the rational ``x`` lies in the subring ``ring`` of Q.

    Membership in a finite field is not a subring question, so F_p targets
    are refused rather than answered.
    """
    if ring.kind == "Fp":
        raise UnsupportedRing("is_defined_over targets must be subrings of Q")
    v = x.value if isinstance(x, RingElement) else x
    return ring.contains_value(v)


def encode_ring(ring: CoefficientRing):
    """Ring -> the textual encoding used in object files."""
    if ring.kind == "Z":
        return "Z"
    if ring.kind == "Q":
        return "Q"
    if ring.kind == "Fp":
        return {"Fp": ring.p}
    return {"loc": list(ring.primes)}


def decode_ring(obj) -> CoefficientRing:
    """Inverse of :func:`encode_ring`; raises InvalidObject on junk."""
    if obj == "Z":
        return Integers()
    if obj == "Q":
        return Rationals()
    if isinstance(obj, dict) and set(obj) == {"Fp"}:
        return PrimeField(obj["Fp"])
    if isinstance(obj, dict) and set(obj) == {"loc"}:
        loc = obj["loc"]
        if not isinstance(loc, list):
            raise InvalidObject(f"bad ring encoding {obj!r}")
        return LocalizedIntegers(loc)
    raise InvalidObject(f"bad ring encoding {obj!r}")


def format_scalar(ring: CoefficientRing, v) -> str:
    """Canonical string form of a scalar: "a" or "a/b" with b > 0 reduced."""
    if ring.kind == "Fp":
        return str(v % ring.p)
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_scalar(ring: CoefficientRing, s):
    """Parse the canonical scalar string form back to a ring value."""
    if not isinstance(s, str):
        raise InvalidObject(f"scalar must be a string, got {s!r}")
    try:
        f = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidObject(f"bad scalar {s!r}") from exc
    return ring.coerce(f)
