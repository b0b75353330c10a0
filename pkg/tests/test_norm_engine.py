import random
from fractions import Fraction

import pytest

from tsinorm import families
from tsinorm.errors import ConfigError, DomainError, ParseError
from tsinorm.norm_engine import (
    CertNode,
    SpaceSpec,
    Vector,
    brute_force_norm,
    certificate_from_json,
    certificate_to_json,
    distortion_norm,
    level_norm,
    norm,
    norm_value,
    parse_theta_rule,
    verify_certificate,
)

from conftest import sweep_vectors

F = Fraction


def iter_level_norm(vec, sp, m):
    """Oracle for the iterated norms: literal recursion on the defining
    maximum, over compositions of arbitrary support subsets."""
    entries = vec.entries
    if not entries:
        return F(0)
    if m == 0:
        return max(abs(c) for _, c in entries)
    best = iter_level_norm(vec, sp, m - 1)
    count = len(entries)
    l1 = sum(abs(c) for _, c in entries)
    n = 1
    while True:
        theta = sp.theta(n)
        if theta * l1 <= best:
            break
        family = sp.family(n)
        for mask in range(1, 1 << count):
            positions = [i for i in range(count) if mask >> i & 1]
            if len(positions) < 2:
                continue
            for cut_mask in range(1 << (len(positions) - 1)):
                cuts = [0] + [
                    j + 1 for j in range(len(positions) - 1) if cut_mask >> j & 1
                ] + [len(positions)]
                chunks = [positions[a:b] for a, b in zip(cuts, cuts[1:])]
                if len(chunks) < 2:
                    continue
                minima = tuple(entries[chunk[0]][0] for chunk in chunks)
                if not families.member(family, minima):
                    continue
                total = sum(
                    iter_level_norm(
                        Vector(tuple(entries[i] for i in chunk)), sp, m - 1
                    )
                    for chunk in chunks
                )
                if theta * total > best:
                    best = theta * total
        n += 1
    return best


def test_level_norm_examples(schreier_space):
    assert level_norm(Vector.from_text("1:1 2:1"), schreier_space, 0) == 1
    assert level_norm(Vector.from_text("2:1 3:1"), schreier_space, 1) == 1
    assert level_norm(Vector.basis(7), schreier_space, 5) == 1
    with pytest.raises(DomainError):
        level_norm(Vector.basis(1), schreier_space, -1)


def test_level_norm_against_oracle(schreier_space, ank_space):
    rng = random.Random(9131)
    for sp in (schreier_space, ank_space):
        for _ in range(40):
            size = rng.randint(1, 4)
            support = sorted(rng.sample(range(1, 8), size))
            coeffs = [F(rng.choice((1, 1, 2, 3)), rng.choice((1, 2))) for _ in support]
            vec = Vector.from_pairs(zip(support, coeffs))
            for m in range(0, size + 2):
                assert level_norm(vec, sp, m) == iter_level_norm(vec, sp, m)


def test_norm_examples(schreier_space):
    value, cert = norm(Vector.basis(4), schreier_space)
    assert value == 1
    assert cert.members == (4,) and cert.children == ()
    assert norm_value(Vector.basis(4).scale(F(3, 2)), schreier_space) == F(3, 2)
    assert norm_value(Vector.from_text("2:1 3:1"), schreier_space) == 1
    assert norm_value(Vector.from_text("3:1 4:1 5:1"), schreier_space) == F(3, 2)
    value, cert = norm(Vector(), schreier_space)
    assert value == 0 and cert.members == ()


def test_norm_matches_brute_force_sample(test_spaces):
    rng = random.Random(40917)
    picks = [vec for vec in sweep_vectors(5)]
    rng.shuffle(picks)
    for sp in test_spaces.values():
        for vec in picks[:120]:
            assert norm_value(vec, sp) == brute_force_norm(vec, sp), vec.to_text()


def test_norm_matches_brute_force_other_space_shapes():
    shapes = [
        "theta = list 1/2,1/3 tail geometric 1/2\nfamily = const (S[1],A[2])\n",
        "theta = geometric 2/3\nfamily = const A[3]\n",
    ]
    for text in shapes:
        sp = SpaceSpec.from_text(text)
        for vec in sweep_vectors(4):
            value = norm_value(vec, sp)
            assert value == brute_force_norm(vec, sp), (text, vec.to_text())
            got, cert = norm(vec, sp)
            assert verify_certificate(cert, vec, sp) == (True, got)


def test_brute_force_guard(schreier_space):
    wide = Vector.from_pairs((k, 1) for k in range(1, 10))
    with pytest.raises(DomainError):
        brute_force_norm(wide, schreier_space)


def test_certificates_verify_and_roundtrip(test_spaces):
    rng = random.Random(2205)
    picks = [vec for vec in sweep_vectors(5)]
    rng.shuffle(picks)
    for name, sp in test_spaces.items():
        for vec in picks[:60]:
            value, cert = norm(vec, sp)
            valid, evaluated = verify_certificate(cert, vec, sp)
            assert valid and evaluated == value, (name, vec.to_text())
            reloaded = certificate_from_json(certificate_to_json(cert))
            assert reloaded == cert


def test_certificate_determinism(schreier_space):
    vec = Vector.from_text("3:1 4:1 5:1 6:1")
    first = norm(vec, schreier_space)
    second = norm(vec, schreier_space)
    assert first == second
    fresh_space = SpaceSpec.from_text(schreier_space.canonical_text())
    third = norm(vec, fresh_space)
    assert third == first


def test_verify_rejects_bad_trees(schreier_space):
    x = Vector.from_text("1:1 2:1")
    bad = CertNode((1, 2), F(1), 1, (
        CertNode((1,), F(1, 2)), CertNode((2,), F(1, 2))))
    valid, value = verify_certificate(bad, x, schreier_space)
    assert not valid and value == 1

    y = Vector.from_text("2:1 3:1")
    good = CertNode((2, 3), F(1), 1, (
        CertNode((2,), F(1, 2)), CertNode((3,), F(1, 2))))
    assert verify_certificate(good, y, schreier_space) == (True, 1)

    wrong_tag = CertNode((2, 3), F(1), 1, (
        CertNode((2,), F(1, 3)), CertNode((3,), F(1, 2))))
    valid, _ = verify_certificate(wrong_tag, y, schreier_space)
    assert not valid

    bad_root_tag = CertNode((2,), F(1, 2))
    valid, _ = verify_certificate(bad_root_tag, y, schreier_space)
    assert not valid

    leaf_with_level = CertNode((2,), F(1), 3)
    valid, _ = verify_certificate(leaf_with_level, y, schreier_space)
    assert not valid


def test_distortion_norm(schreier_space):
    assert distortion_norm(Vector.from_text("2:1 3:1"), schreier_space, 1) == 2
    assert distortion_norm(Vector.basis(1), schreier_space, 4) == 1
    assert distortion_norm(Vector(), schreier_space, 1) == 0
    rng = random.Random(515)
    for vec in [v for v in sweep_vectors(4)][::37]:
        for n in (1, 2):
            dist = distortion_norm(vec, schreier_space, n)
            value = norm_value(vec, schreier_space)
            assert dist >= value
            assert value >= schreier_space.theta(n) * dist


def test_norm_axioms_sampled(test_spaces):
    rng = random.Random(77113)
    for sp in test_spaces.values():
        for _ in range(40):
            size = rng.randint(1, 5)
            support = sorted(rng.sample(range(1, 9), size))
            coeffs = [F(rng.randint(1, 4), rng.randint(1, 3)) for _ in support]
            vec = Vector.from_pairs(zip(support, coeffs))
            value = norm_value(vec, sp)
            assert norm_value(vec.scale(F(-7, 3)), sp) == F(7, 3) * value
            flips = {k for k in vec.support if rng.random() < 0.5}
            assert norm_value(vec.flip(flips), sp) == value
            keep = [k for k in vec.support if rng.random() < 0.6]
            assert norm_value(vec.restrict(keep), sp) <= value
            assert vec.c0_norm() <= value <= vec.l1_norm()


def test_triangle_inequality_sampled(schreier_space):
    rng = random.Random(90125)

    def pick():
        size = rng.randint(1, 4)
        support = sorted(rng.sample(range(1, 9), size))
        return Vector.from_pairs(
            (k, F(rng.randint(-3, 3), rng.randint(1, 2))) for k in support)

    for _ in range(100):
        x = pick()
        y = pick()
        lhs = norm_value(x + y, schreier_space)
        assert lhs <= norm_value(x, schreier_space) + norm_value(y, schreier_space)


def test_vector_text_roundtrip():
    vec = Vector.from_text("2:1 3:1 5:3/2")
    assert vec.to_text() == "2:1/1 3:1/1 5:3/2"
    assert Vector.from_text(vec.to_text()) == vec
    assert Vector.from_text("4:0 5:1").support == (5,)
    with pytest.raises(ParseError):
        Vector.from_text("2:")
    with pytest.raises(DomainError):
        Vector.from_text("2:1 2:1")
    with pytest.raises(ParseError):
        Vector.from_text("x")


def test_space_spec_parsing():
    sp = SpaceSpec.from_text("theta = geometric 1/2\nfamily = schreier n")
    assert sp.theta(3) == F(1, 8)
    assert str(sp.family(2)) == "S[2]"
    sp2 = SpaceSpec.from_text(
        "theta = list 1/2,1/3 tail geometric 1/2\nfamily = const S[1]\n")
    assert sp2.theta(2) == F(1, 3) and sp2.theta(4) == F(1, 12)
    assert sp2.canonical_text() == (
        "theta = list 1/2,1/3 tail geometric 1/2\nfamily = const S[1]\n"
        "horizon = 64\n")
    reparsed = SpaceSpec.from_text(sp2.canonical_text())
    assert reparsed.canonical_text() == sp2.canonical_text()
    sp3 = SpaceSpec.from_text("theta = geometric 1/2\nfamily = ank n+1")
    assert str(sp3.family(4)) == "A[5]"


def test_space_spec_rejections():
    with pytest.raises(ConfigError):
        SpaceSpec.from_text("theta = geometric 2\nfamily = schreier n")
    with pytest.raises(ConfigError):
        SpaceSpec.from_text("theta = geometric 1/2\nfamily = const A[1]")
    with pytest.raises(ConfigError):
        SpaceSpec.from_text("theta = geometric 1/2")
    with pytest.raises(ConfigError):
        SpaceSpec.from_text("family = schreier n")
    with pytest.raises(ConfigError):
        SpaceSpec.from_text(
            "theta = list 1/2,2/3 tail geometric 1/2\nfamily = schreier n")
    with pytest.raises(ParseError):
        SpaceSpec.from_text("theta geometric\nfamily = schreier n")
    with pytest.raises(ParseError):
        SpaceSpec.from_text("theta = geometric 1/2\nwat = 3\nfamily = schreier n")


def test_theta_rule_values():
    rule = parse_theta_rule("harmonic 1")
    assert [rule.value(n) for n in (1, 2, 3)] == [F(1, 2), F(1, 3), F(1, 4)]
    rule = parse_theta_rule("geometric 2/3")
    assert rule.value(3) == F(8, 27)
    with pytest.raises(ParseError):
        parse_theta_rule("geometric")
    with pytest.raises(ParseError):
        parse_theta_rule("list tail geometric 1/2")


def test_level_norm_monotone_and_stabilizes(test_spaces):
    rng = random.Random(3301)
    for sp in test_spaces.values():
        for _ in range(25):
            size = rng.randint(1, 5)
            support = sorted(rng.sample(range(1, 9), size))
            vec = Vector.from_pairs(
                (k, F(rng.randint(1, 3), rng.randint(1, 2))) for k in support)
            target = norm_value(vec, sp)
            previous = F(0)
            for m in range(0, size + 2):
                current = level_norm(vec, sp, m)
                assert current >= previous
                previous = current
            assert level_norm(vec, sp, size) == target
            assert level_norm(vec, sp, size + 1) == target
