import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import J4, box_theta, det2, matmul, random_symplectic, reduced_binary_form
from rm_theta.errors import BoundTooLarge, DimensionMismatch, IndefiniteGram
from rm_theta.lattices import GlobalLattice
from rm_theta.theta import (
    HalfIntegralMatrix,
    HarmonicWeight,
    ThetaCoefficientTable,
    archimedean_schwartz,
    coefficient_report,
    eval_harmonic,
    psd_half_integral,
    short_vectors,
    theta_coefficients,
    unimodular_classes,
)

DET = HarmonicWeight("det")
ONE = HarmonicWeight("one")
Z4 = GlobalLattice.standard(4)


def cols(u, v):
    return [[u[i], v[i]] for i in range(4)]


def e(i):
    return [int(i == j) for j in range(4)]


# -- harmonic weight -----------------------------------------------------------

def test_eval_examples():
    assert eval_harmonic(DET, [[0, 0]] * 4) == 0
    assert eval_harmonic(DET, cols(e(0), e(2))) == 1
    assert eval_harmonic(DET, cols(e(0), e(1))) == 0
    assert eval_harmonic(ONE, cols(e(0), e(1))) == 1


def test_eval_shape_check():
    with pytest.raises(DimensionMismatch):
        eval_harmonic(DET, [[1, 2]] * 3)


def test_symplectic_generators_are_symplectic():
    rng = random.Random(3)
    for _ in range(20):
        g = random_symplectic(rng)
        gt = [list(r) for r in zip(*g)]
        assert matmul(matmul(gt, J4), g) == J4


def test_symplectic_invariance_exact():
    rng = random.Random(4)
    gs = [random_symplectic(rng) for _ in range(100)]
    Xs = [[[rng.randint(-3, 3) for _ in range(2)] for _ in range(4)] for _ in range(100)]
    for g in gs:
        for X in Xs:
            assert eval_harmonic(DET, matmul(g, X)) == eval_harmonic(DET, X)


def test_det_squared_equivariance_exact():
    rng = random.Random(5)
    for _ in range(100):
        U = [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)]
        X = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(4)]
        assert eval_harmonic(DET, matmul(X, U)) == det2(U) ** 2 * eval_harmonic(DET, X)


@settings(max_examples=100, deadline=None)
@given(X=st.lists(st.lists(st.fractions(max_denominator=7).filter(lambda f: abs(f) < 20),
                           min_size=2, max_size=2), min_size=4, max_size=4),
       t=st.fractions(max_denominator=5).filter(lambda f: abs(f) < 10))
def test_homogeneous_degree_four(X, t):
    tX = [[t * v for v in row] for row in X]
    assert eval_harmonic(DET, tX) == t ** 4 * eval_harmonic(DET, X)


def test_schwartz_envelope():
    X = cols(e(0), e(2))
    import math
    assert abs(archimedean_schwartz(DET, X) - math.exp(-2 * math.pi)) < 1e-15


# -- half-integral matrices ----------------------------------------------------

def test_half_integral_matrix():
    T = HalfIntegralMatrix(1, 1, 1)
    assert T.matrix() == [[1, Fraction(1, 2)], [Fraction(1, 2), 1]]
    assert T.is_psd() and T.trace == 2 and T.disc == 3
    assert not HalfIntegralMatrix(1, 3, 1).is_psd()
    assert T.transform(((0, 1), (1, 0))) == T.swap()


def test_psd_enumeration_count():
    got = set(T.key() for T in psd_half_integral(3))
    brute = {(a, b, c) for a in range(4) for c in range(4) for b in range(-6, 7)
             if a + c <= 3 and 4 * a * c - b * b >= 0}
    assert got == brute


# -- short vectors ---------------------------------------------------------------

def test_short_vectors_z4():
    vs = short_vectors(Z4.gram, 2)
    assert len(vs) == 1 + 8 + 24


def test_short_vectors_skewed_gram():
    G = [[2, 1], [1, 2]]  # A2 root lattice
    vs = short_vectors(G, 2)
    assert len(vs) == 7
    assert all(2 * x * x + 2 * x * y + 2 * y * y <= 2 for x, y in vs)


def test_budget():
    with pytest.raises(BoundTooLarge):
        short_vectors(Z4.gram, 50, budget=100)
    with pytest.raises(BoundTooLarge):
        theta_coefficients(Z4, ONE, 6, budget=500)


def test_indefinite():
    with pytest.raises(IndefiniteGram):
        short_vectors([[1, 2], [2, 1]], 3)


# -- coefficients ----------------------------------------------------------------

def test_coefficient_examples():
    t1 = theta_coefficients(Z4, ONE, 4)
    assert t1[(0, 0, 0)] == 1
    assert t1[(1, 0, 0)] == 24
    td = theta_coefficients(Z4, DET, 4)
    assert td[(0, 0, 0)] == 0


@pytest.mark.parametrize("weight", ["one", "det"])
def test_matches_box_oracle(weight):
    table = theta_coefficients(Z4, HarmonicWeight(weight), 4)
    oracle = box_theta(4, weight)
    assert set(oracle) <= set(table.entries)
    for key, value in table.entries.items():
        assert value == oracle.get(key, 0), key


def test_table_completeness_and_non_psd():
    table = theta_coefficients(Z4, ONE, 3)
    assert set(table.entries) == {T.key() for T in psd_half_integral(3)}
    assert table[(1, 3, 1)] == 0  # not psd
    with pytest.raises(KeyError):
        table[(4, 0, 0)]


def test_column_swap_symmetry():
    table = theta_coefficients(Z4, ONE, 5)
    for (a, b, c), v in table.entries.items():
        assert table.entries[(c, b, a)] == v


def test_values_are_exact_integers():
    for w in (ONE, DET):
        table = theta_coefficients(Z4, w, 4)
        assert all(isinstance(v, int) for v in table.entries.values())


def test_gram_only_lattice_matches_basis_lattice():
    G = GlobalLattice(Z4.gram)
    a = theta_coefficients(G, ONE, 3).entries
    b = theta_coefficients(Z4, ONE, 3).entries
    assert a == b


def test_det_weight_needs_basis():
    with pytest.raises(ValueError):
        theta_coefficients(GlobalLattice(Z4.gram), DET, 2)


def test_rational_basis_lattice():
    # x in (1/2) Z^4 with |x|^2 = 2 is y / 2 with y in Z^4, |y|^2 = 8
    table = theta_coefficients(Z4.scaled(Fraction(1, 2)), ONE, 1)
    n8 = sum(1 for y in short_vectors(Z4.gram, 8) if sum(t * t for t in y) == 8)
    assert table[(1, 0, 0)] == n8


def test_two_lattices():
    # T = (1, 0, 2): x1 in Z^4 of norm 2, x2 = 2y in 2Z^4 of norm 4, x1 . y = 0
    table = theta_coefficients(Z4, ONE, 4, second=Z4.scaled(2))
    vs = short_vectors(Z4.gram, 2)
    want = sum(1 for x in vs for y in vs
               if sum(t * t for t in x) == 2 and sum(t * t for t in y) == 1
               and sum(a * b for a, b in zip(x, y)) == 0)
    assert table[(1, 0, 2)] == want


def test_table_json_roundtrip():
    table = theta_coefficients(Z4, DET, 3)
    obj = table.to_json()
    assert obj["bound"] == 3 and {"a", "b", "c", "value"} <= set(obj["entries"][0])
    again = ThetaCoefficientTable.from_json(obj)
    assert again.entries == table.entries


# -- reports ---------------------------------------------------------------------

def test_report_trivial_table():
    table = ThetaCoefficientTable(ONE, 0, {(0, 0, 0): 1})
    rep = coefficient_report(table)
    assert len(rep["classes"]) == 1 and rep["classes"][0]["values"] == [1]


def test_classes_match_reduction_oracle():
    keys = [T.key() for T in psd_half_integral(6)]
    classes = unimodular_classes(keys)
    for cls in classes:
        assert len({reduced_binary_form(*k) for k in cls}) == 1
    reps = [reduced_binary_form(*cls[0]) for cls in classes]
    assert len(reps) == len(set(reps))
    # [[1,0],[0,1]] and [[1,1/2],[1/2,1]] are inequivalent (different determinants)
    find = {k: i for i, cls in enumerate(classes) for k in cls}
    assert find[(1, 0, 1)] != find[(1, 1, 1)]
    assert find[(1, 2, 1)] == find[(1, 0, 0)]


def test_uniform_classes_for_z4():
    rep = coefficient_report(theta_coefficients(Z4, ONE, 5))
    assert all(c["uniform"] for c in rep["classes"])
    rep_det = coefficient_report(theta_coefficients(Z4, DET, 5))
    assert all(c["uniform"] for c in rep_det["classes"])
    assert rep_det["vanishing"][0] == [0, 0, 0]
    assert rep["growth"][1]["nonzero"] == 2
