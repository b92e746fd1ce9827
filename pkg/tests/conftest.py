import pytest

from rm_theta.curves import HyperellipticCurve

# The fixed five-curve corpus: three with a declared RM field, two canaries.
CORPUS_SPEC = [
    ((1, 0, 0, 0, 0, 1), 5, "x^5+1"),
    ((0, 1, 0, 0, 0, 1), None, "x^5+x"),
    ((1, 5, 0, -5, 0, 1), 5, "x^5-5x^3+5x+1"),
    ((1, 3, 0, 0, 0, 0, 1), None, "x^6+3x+1"),
    ((3, -1, 2, 0, 0, 1), None, "x^5+2x^2-x+3"),
]


@pytest.fixture(scope="session")
def corpus():
    return [HyperellipticCurve(f, d, label) for f, d, label in CORPUS_SPEC]
