import random

import pytest

from tsinorm.errors import DomainError, ParseError
from tsinorm.ordinals import (
    OMEGA,
    ONE,
    TWO,
    ZERO,
    Ordinal,
    add,
    compare,
    format_ordinal,
    from_int,
    leading,
    mul,
    omega_power,
    parse_ordinal,
)


def test_compare_basic():
    assert compare(omega_power(OMEGA), mul(OMEGA, from_int(5))) > 0
    three_w2 = mul(omega_power(TWO), from_int(3))
    assert compare(three_w2, three_w2) == 0
    assert compare(omega_power(from_int(3)), mul(omega_power(TWO), from_int(9))) > 0
    assert ZERO < ONE < TWO < OMEGA


def test_add_absorption():
    assert add(ONE, OMEGA) == OMEGA
    assert add(OMEGA, ONE) == parse_ordinal("w + 1")
    left = add(mul(omega_power(TWO), TWO), OMEGA)
    assert add(left, mul(OMEGA, from_int(3))) == parse_ordinal("w^2*2 + w*4")


def test_mul_rules():
    assert mul(parse_ordinal("w + 1"), TWO) == parse_ordinal("w*2 + 1")
    assert mul(parse_ordinal("w^2*3 + w"), OMEGA) == parse_ordinal("w^3")
    assert mul(from_int(3), from_int(4)) == from_int(12)
    assert mul(ZERO, OMEGA) == ZERO
    assert mul(OMEGA, ZERO) == ZERO


def test_leading_data():
    exp, coeff = leading(parse_ordinal("w^w*2 + w^3"))
    assert exp == OMEGA and coeff == 2
    exp, coeff = leading(from_int(5))
    assert exp == ZERO and coeff == 5
    exp, coeff = leading(parse_ordinal("w^2*7 + w"))
    assert exp == TWO and coeff == 7
    with pytest.raises(DomainError):
        leading(ZERO)


def test_omega_power():
    assert omega_power(ZERO) == ONE
    assert omega_power(TWO) == parse_ordinal("w^2")
    assert omega_power(OMEGA) == parse_ordinal("w^w")


def test_leading_of_omega_power_roundtrip():
    for text in ["0", "1", "w", "w^2*3 + 1", "w^w"]:
        a = parse_ordinal(text)
        exp, coeff = leading(omega_power(a))
        assert exp == a and coeff == 1


def random_ordinal(rng, depth):
    # Fold random monomials with ordinal addition; absorption keeps the
    # result in normal form whatever the generation order.
    result = ZERO
    for _ in range(rng.randint(0, 3)):
        exp = random_ordinal(rng, depth - 1) if depth > 0 else ZERO
        result = add(result, Ordinal(((exp, rng.randint(1, 9)),)))
    return result


def test_algebraic_laws_seeded():
    rng = random.Random(20240817)
    for _ in range(500):
        a = random_ordinal(rng, 3)
        b = random_ordinal(rng, 3)
        c = random_ordinal(rng, 3)
        assert add(add(a, b), c) == add(a, add(b, c))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
        assert compare(add(a, b), a) >= 0
        assert compare(add(a, b), b) >= 0


def test_mul_by_omega_power_absorbs_tail():
    a = parse_ordinal("w^2*3 + w + 4")
    assert mul(a, omega_power(ONE)) == parse_ordinal("w^3")
    assert mul(a, omega_power(TWO)) == parse_ordinal("w^4")


def test_parse_print_roundtrip():
    cases = ["0", "w", "17", "w^w*2 + w^3", "w^{w + 1}*4 + w*2 + 9", "w^2*7 + w"]
    for text in cases:
        value = parse_ordinal(text)
        assert parse_ordinal(format_ordinal(value)) == value
        assert format_ordinal(parse_ordinal(format_ordinal(value))) == format_ordinal(value)


def test_parse_rejects_bad_input():
    for bad in ["w +", "w^", "1 + w", "w*0", "w + w", "x", "w^{w"]:
        with pytest.raises(ParseError):
            parse_ordinal(bad)


def test_fundamental_sequences():
    assert OMEGA.fundamental(4) == from_int(4)
    assert parse_ordinal("w^2").fundamental(3) == parse_ordinal("w*3")
    assert parse_ordinal("w*2").fundamental(4) == parse_ordinal("w + 4")
    assert parse_ordinal("w^w").fundamental(3) == parse_ordinal("w^3")
    assert parse_ordinal("w^{w + 1}").fundamental(2) == parse_ordinal("w^w*2")
    with pytest.raises(DomainError):
        parse_ordinal("w + 1").fundamental(2)
    with pytest.raises(DomainError):
        OMEGA.fundamental(0)


def test_successor_structure():
    assert parse_ordinal("w + 3").is_successor()
    assert parse_ordinal("w + 3").predecessor() == parse_ordinal("w + 2")
    assert parse_ordinal("w + 1").predecessor() == OMEGA
    assert OMEGA.is_limit() and not OMEGA.is_successor()
    assert not ZERO.is_limit() and not ZERO.is_successor()
