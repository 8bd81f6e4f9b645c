import random
from fractions import Fraction

import pytest

from dgforge.errors import InadmissibleMap, InvalidObject, RingMismatch, UnsupportedRing
from dgforge.rings import (
    CoefficientRing,
    Integers,
    LocalizedIntegers,
    PrimeField,
    Rationals,
    RingElement,
    RingMap,
    decode_ring,
    denominator_primes,
    encode_ring,
    factorize,
    format_scalar,
    is_defined_over,
    is_prime,
    minimal_localization,
    parse_scalar,
    ring_map_apply,
)
from oracles import (
    FROZEN_LOC_TO_F5,
    FROZEN_MINIMAL_LOC,
    FROZEN_Z_TO_F7,
    brute_prime_factors,
    mod_inverse,
)


def test_frozen_localization_to_f5():
    src = LocalizedIntegers(FROZEN_LOC_TO_F5["src"][1])
    m = RingMap(src, PrimeField(FROZEN_LOC_TO_F5["p"]))
    x = RingElement(src, FROZEN_LOC_TO_F5["value"])
    assert ring_map_apply(m, x).value == FROZEN_LOC_TO_F5["image"]


def test_frozen_integer_reduction():
    m = RingMap(Integers(), PrimeField(FROZEN_Z_TO_F7["p"]))
    x = RingElement(Integers(), FROZEN_Z_TO_F7["value"])
    assert ring_map_apply(m, x).value == FROZEN_Z_TO_F7["image"]


def test_frozen_minimal_localization():
    assert minimal_localization(FROZEN_MINIMAL_LOC["values"]).primes == FROZEN_MINIMAL_LOC["primes"]


def test_empty_localization_is_z():
    assert LocalizedIntegers(()) == Integers()
    assert LocalizedIntegers([]).kind == "Z"
    assert minimal_localization([3, Fraction(4, 1)]) == Integers()


def test_localization_normalizes_primes():
    assert LocalizedIntegers([5, 2, 5, 3]).primes == (2, 3, 5)
    with pytest.raises(InvalidObject):
        LocalizedIntegers([4])


def test_prime_field_rejects_composite():
    with pytest.raises(InvalidObject):
        PrimeField(6)


def test_coerce_boundaries():
    z = Integers()
    assert z.coerce(Fraction(6, 2)) == 3
    with pytest.raises(InvalidObject):
        z.coerce(Fraction(1, 2))
    loc = LocalizedIntegers((2,))
    assert loc.coerce(Fraction(3, 4)) == Fraction(3, 4)
    with pytest.raises(InvalidObject):
        loc.coerce(Fraction(1, 3))
    f5 = PrimeField(5)
    with pytest.raises(InvalidObject):
        f5.coerce(Fraction(1, 5))


def test_field_inverse_matches_euclid_oracle():
    rng = random.Random(11)
    for p in (2, 3, 5, 7, 97):
        f = PrimeField(p)
        for _ in range(20):
            a = rng.randrange(1, p)
            assert f.invert(a) == mod_inverse(a, p)


def test_units():
    z = Integers()
    assert z.is_unit(-1) and z.is_unit(1) and not z.is_unit(2)
    loc = LocalizedIntegers((2, 3))
    assert loc.is_unit(Fraction(4, 9)) and not loc.is_unit(Fraction(5))
    with pytest.raises(UnsupportedRing):
        Rationals().invert(Fraction(0))


def test_admissible_maps():
    z, q = Integers(), Rationals()
    s23, s2356 = LocalizedIntegers((2, 3)), LocalizedIntegers((2, 3, 5, 6 + 1))
    RingMap(z, q)
    RingMap(z, PrimeField(2))
    RingMap(s23, s2356)
    RingMap(s23, q)
    RingMap(s23, PrimeField(5))
    RingMap(PrimeField(5), PrimeField(5))
    with pytest.raises(InadmissibleMap):
        RingMap(s2356, s23)  # primes must not shrink
    with pytest.raises(InadmissibleMap):
        RingMap(s23, PrimeField(3))  # 3 already inverted
    with pytest.raises(InadmissibleMap):
        RingMap(q, z)
    with pytest.raises(InadmissibleMap):
        RingMap(PrimeField(3), PrimeField(5))
    with pytest.raises(InadmissibleMap):
        RingMap(PrimeField(3), q)


def test_ring_map_is_multiplicative_and_additive():
    rng = random.Random(23)
    src = LocalizedIntegers((2, 7))
    for p in (3, 5, 11):
        m = RingMap(src, PrimeField(p))
        for _ in range(25):
            a = RingElement(src, Fraction(rng.randrange(-30, 30), rng.choice([1, 2, 4, 7, 14])))
            b = RingElement(src, Fraction(rng.randrange(-30, 30), rng.choice([1, 2, 8, 49])))
            assert ring_map_apply(m, a + b).value == (ring_map_apply(m, a) + ring_map_apply(m, b)).value
            assert ring_map_apply(m, a * b).value == (ring_map_apply(m, a) * ring_map_apply(m, b)).value


def test_ring_element_checks_ring():
    with pytest.raises(RingMismatch):
        RingElement(Integers(), 1) + RingElement(Rationals(), 1)


def test_minimal_localization_random_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        xs = [Fraction(rng.randrange(-40, 40), rng.randrange(1, 40)) for _ in range(6)]
        ring = minimal_localization(xs)
        expected = sorted(set(p for x in xs for p in brute_prime_factors(x.denominator)))
        got = list(ring.primes) if ring.kind == "loc" else []
        assert got == expected
        assert all(is_defined_over(x, ring) for x in xs)


def test_minimal_localization_rejects_fp_elements():
    with pytest.raises(UnsupportedRing):
        minimal_localization([RingElement(PrimeField(5), 2)])


def test_is_defined_over():
    assert is_defined_over(Fraction(3, 8), LocalizedIntegers((2,)))
    assert not is_defined_over(Fraction(3, 8), Integers())
    with pytest.raises(UnsupportedRing):
        is_defined_over(Fraction(1, 2), PrimeField(7))


def test_encode_decode_roundtrip():
    for ring in (Integers(), Rationals(), PrimeField(13), LocalizedIntegers((3, 11))):
        assert decode_ring(encode_ring(ring)) == ring
    with pytest.raises(InvalidObject):
        decode_ring("R")
    with pytest.raises(InvalidObject):
        decode_ring({"loc": "2,3"})


def test_scalar_format_roundtrip():
    rng = random.Random(7)
    q = Rationals()
    for _ in range(40):
        v = Fraction(rng.randrange(-99, 99), rng.randrange(1, 99))
        assert parse_scalar(q, format_scalar(q, v)) == v
    assert format_scalar(q, Fraction(-4, 6)) == "-2/3"
    assert format_scalar(Integers(), 5) == "5"
    assert format_scalar(PrimeField(7), 9) == "2"
    with pytest.raises(InvalidObject):
        parse_scalar(q, "1/0")
    with pytest.raises(InvalidObject):
        parse_scalar(q, "x")


def test_factorize_against_oracle():
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randrange(1, 10**6)
        f = factorize(n)
        assert sorted(f) == brute_prime_factors(n)
        prod = 1
        for p, e in f.items():
            assert is_prime(p)
            prod *= p**e
        assert prod == n


def test_denominator_primes():
    assert denominator_primes(Fraction(1, 12)) == (2, 3)
    assert denominator_primes(7) == ()


def test_ring_str_forms():
    assert str(LocalizedIntegers((2, 5))) == "Z[1/{2,5}]"
    assert str(PrimeField(3)) == "F_3"


def test_raw_constructor_rejects_unsorted():
    with pytest.raises(InvalidObject):
        CoefficientRing("loc", primes=(3, 2))
