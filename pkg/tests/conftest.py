import itertools
from fractions import Fraction

import pytest

from tsinorm.norm_engine import SpaceSpec, Vector

SCHREIER_SPACE = "theta = geometric 1/2\nfamily = schreier n\n"
HARMONIC_SPACE = "theta = harmonic 1\nfamily = const S[1]\n"
ANK_SPACE = "theta = geometric 1/2\nfamily = ank n+1\n"

SWEEP_COEFFS = (Fraction(1), Fraction(1, 2), Fraction(2))


def sweep_vectors(max_index=6, coeffs=SWEEP_COEFFS):
    """Every nonzero vector with support within {1..max_index} and
    coefficients drawn from ``coeffs``."""
    for size in range(1, max_index + 1):
        for support in itertools.combinations(range(1, max_index + 1), size):
            for chosen in itertools.product(coeffs, repeat=size):
                yield Vector(tuple(zip(support, chosen)))


@pytest.fixture(scope="session")
def schreier_space():
    return SpaceSpec.from_text(SCHREIER_SPACE)


@pytest.fixture(scope="session")
def harmonic_space():
    return SpaceSpec.from_text(HARMONIC_SPACE)


@pytest.fixture(scope="session")
def ank_space():
    return SpaceSpec.from_text(ANK_SPACE)


@pytest.fixture(scope="session")
def test_spaces(schreier_space, harmonic_space, ank_space):
    return {
        "schreier": schreier_space,
        "harmonic-const": harmonic_space,
        "ank": ank_space,
    }
