import cmath
import math
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rm_theta.characters import (
    MultiplicativeCharacter,
    character_from_values,
    gauss_sum,
    quadratic_character,
    trivial_character,
)
from rm_theta.errors import (
    DivergentParameters,
    NotBorel,
    SatakeUnsolvable,
    UnramifiedCharacter,
    ZeroDiagonal,
)
from rm_theta.local_fields import make_field
from rm_theta.local_zeta import (
    LocalLFactor,
    SatakeParams,
    WhittakerDatum,
    ramified_epsilon,
    ramified_lfactor,
    ramified_zeta_series,
    spherical_rs_lfactor,
    unramified_doubling_integral,
    whittaker_eval,
)

Q3 = make_field(3)


def chi_with(pi_phase, quadratic=True):
    if quadratic:
        return quadratic_character(Q3, pi_value=Fraction(pi_phase))
    return trivial_character(Q3, pi_value=Fraction(pi_phase))


# -- Whittaker datum ---------------------------------------------------------

def test_whittaker_examples():
    assert whittaker_eval(WhittakerDatum(trivial_character(Q3)), (1, 0, 1)) == 1
    W = WhittakerDatum(quadratic_character(Q3))
    assert whittaker_eval(W, (2, 5, 1)) == -1
    assert whittaker_eval(W, (3, 0, 1)) == 0
    assert whittaker_eval(W, [[2, 7], [0, 1]]) == -1


def test_whittaker_errors():
    W = WhittakerDatum(quadratic_character(Q3))
    with pytest.raises(ZeroDiagonal):
        whittaker_eval(W, (0, 1, 1))
    with pytest.raises(NotBorel):
        whittaker_eval(W, [[1, 0], [1, 1]])


def test_whittaker_depends_only_on_diagonal():
    W = WhittakerDatum(quadratic_character(Q3))
    for a, d in [(1, 2), (2, 2), (4, 5), (7, 9)]:
        vals = {whittaker_eval(W, (a, star, d)) for star in (0, 1, Fraction(1, 3), 17)}
        assert len(vals) == 1


# -- zeta series -------------------------------------------------------------

def test_series_example_trivial_pi():
    Z = ramified_zeta_series(chi_with(0), 1.5, 100)
    assert abs(Z.partial_sum - 1.5) <= Z.tail_bound + 1e-15


def test_series_example_unshifted_minus_one():
    Z = ramified_zeta_series(chi_with(Fraction(1, 2)), 0.5, 400, normalization="unshifted")
    target = 1 / (1 + 3 ** -0.5)
    assert abs(Z.partial_sum - target) <= Z.tail_bound + 1e-15


def test_series_tends_to_one_for_large_s():
    assert abs(ramified_zeta_series(chi_with(0), 60, 10).partial_sum - 1) < 1e-20


def test_series_divergence():
    with pytest.raises(DivergentParameters):
        ramified_zeta_series(chi_with(0), 0.5, 10)
    with pytest.raises(DivergentParameters):
        ramified_zeta_series(chi_with(0), 0.0, 10, normalization="unshifted")


@settings(max_examples=120, deadline=None)
@given(re=st.floats(0.8, 6.0), im=st.floats(-20, 20), k=st.integers(0, 11),
       norm=st.sampled_from(["paper", "unshifted"]))
def test_partial_sum_within_tail_bound(re, im, k, norm):
    chi = chi_with(Fraction(k, 12))
    s = complex(re, im)
    Z = ramified_zeta_series(chi, s, 200, normalization=norm)
    shift = 0.5 if norm == "paper" else 0.0
    closed = 1 / (1 - cmath.exp(2j * math.pi * k / 12) * 3 ** (-(s - shift)))
    assert abs(Z.partial_sum - closed) <= Z.tail_bound + 1e-12


@settings(max_examples=60, deadline=None)
@given(re=st.floats(1.2, 5.0), im=st.floats(-10, 10), k=st.integers(0, 7))
def test_series_limits_match_lfactor(re, im, k):
    chi = chi_with(Fraction(k, 8))
    s = complex(re, im)
    L = ramified_lfactor(chi)
    unshifted = ramified_zeta_series(chi, s, 200, "unshifted").partial_sum
    paper = ramified_zeta_series(chi, s, 200, "paper").partial_sum
    assert abs(unshifted - L(s)) < 1e-10
    assert abs(paper - L(s - 0.5)) < 1e-10


def test_unit_modulus_complex_pi_value():
    z = cmath.exp(1j * 0.7)
    chi = MultiplicativeCharacter(Q3, 1, (Fraction(1, 2),), z)
    Z = ramified_zeta_series(chi, 2.0, 200)
    assert abs(Z.partial_sum - 1 / (1 - z * 3 ** -1.5)) < 1e-12


# -- L and epsilon factors -----------------------------------------------------

def test_lfactor_examples():
    L1 = ramified_lfactor(chi_with(0))
    for s in (1.0, 2.0, 0.5 + 3j):
        assert abs(L1(s) - 1 / (1 - 3 ** -s)) < 1e-14
    assert abs(ramified_lfactor(chi_with(Fraction(1, 2)))(1) - 0.75) < 1e-15
    assert abs(ramified_lfactor(chi_with(Fraction(1, 4)))(2) - 1 / (1 - 1j / 9)) < 1e-15
    assert L1.degree == 1


def test_epsilon_examples():
    chi = quadratic_character(Q3)
    assert ramified_epsilon(chi, None, 0.5, include_gauss=False) == -1
    even = character_from_values(make_field(5), 1, [Fraction(1, 2)])
    assert even.sign() == 1
    assert ramified_epsilon(even, None, 0.5, include_gauss=False) == 1
    eps = ramified_epsilon(chi, None, 0.5, include_gauss=True)
    assert abs(eps - (-1j * math.sqrt(3))) < 1e-12


def test_epsilon_needs_ramified_for_gauss():
    with pytest.raises(UnramifiedCharacter):
        ramified_epsilon(trivial_character(Q3), None, 0.5, include_gauss=True)
    assert ramified_epsilon(trivial_character(Q3), None, 1.5, include_gauss=False) == 1 / 3


@pytest.mark.parametrize("p,c", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (3, 3)])
def test_epsilon_magnitude(p, c):
    from rm_theta.characters import all_characters
    K = make_field(p)
    for _, chi in all_characters(K, c):
        if chi.conductor_exponent != c:
            continue
        eps = ramified_epsilon(chi, None, 0.5, include_gauss=True)
        assert abs(abs(eps) - p ** (c / 2)) < 1e-9
        assert abs(abs(gauss_sum(chi)) - p ** (c / 2)) < 1e-9


# -- spherical factor ----------------------------------------------------------

def test_spherical_degenerate():
    L = spherical_rs_lfactor(SatakeParams(3, 1, 1))
    for s in (1.0, 2.0, 1 + 1j):
        assert abs(L(s) - (1 - 3 ** -s) ** -4) < 1e-13


def test_spherical_inverse_roots():
    q = 7
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        L = spherical_rs_lfactor(SatakeParams(q, math.sqrt(q), 1 / math.sqrt(q)))
    got = sorted(complex(g).real for g in L.inverse_roots)
    assert all(abs(a - b) < 1e-12 for a, b in zip(got, [1 / q, 1, 1, q]))


def test_spherical_direct_product_example():
    # alpha / beta = 2, q = 3, s = 2
    alpha, beta = math.sqrt(2), 1 / math.sqrt(2)
    L = spherical_rs_lfactor(SatakeParams(3, alpha, beta))
    X = 3 ** -2
    direct = 1 / ((1 - X) * (1 - 2 * X) * (1 - 0.5 * X) * (1 - X))
    assert abs(L(2) - direct) < 1e-14


@settings(max_examples=100, deadline=None)
@given(a=st.floats(-1.9, 1.9), re=st.floats(0.6, 4), im=st.floats(-5, 5),
       q=st.sampled_from([3, 5, 7, 11, 25]))
def test_spherical_swap_symmetry(a, re, im, q):
    sat = SatakeParams.from_hecke_eigenvalue(a * math.sqrt(q), q)
    swapped = SatakeParams(q, sat.beta, sat.alpha, unitary=True)
    s = complex(re, im)
    assert abs(spherical_rs_lfactor(sat)(s) - spherical_rs_lfactor(swapped)(s)) < 1e-12


def test_doubling_integral_shift():
    sat = SatakeParams.from_hecke_eigenvalue(1.0, 5)
    assert unramified_doubling_integral(sat, 1.5) == spherical_rs_lfactor(sat)(2.0)


def test_satake_validation():
    with pytest.raises(SatakeUnsolvable):
        SatakeParams(3, 0, 1)
    with pytest.raises(SatakeUnsolvable):
        SatakeParams(3, 2, 2, unitary=True)
    with pytest.warns(RuntimeWarning):
        SatakeParams(3, 5, 0.2)


def test_hecke_edge_gives_trivial_satake():
    sat = SatakeParams.from_hecke_eigenvalue(2 * math.sqrt(11), 11)
    assert abs(sat.alpha - 1) < 1e-7 and abs(sat.beta - 1) < 1e-7


def test_lfactor_json():
    obj = LocalLFactor(3, (1, 1j)).to_json()
    assert obj["q"] == 3 and obj["inverse_roots"][1] == {"re": 0.0, "im": 1.0}


def test_random_satake_samples():
    rng = random.Random(11)
    for _ in range(50):
        q = rng.choice([3, 5, 7])
        alpha = cmath.exp(1j * rng.uniform(0, math.pi))
        sat = SatakeParams(q, alpha, 1 / alpha)
        s = complex(rng.uniform(0.6, 3), rng.uniform(-4, 4))
        X = q ** -s
        direct = 1 / ((1 - X) ** 2 * (1 - alpha ** 2 * X) * (1 - alpha ** -2 * X))
        assert abs(spherical_rs_lfactor(sat)(s) - direct) < 1e-12
