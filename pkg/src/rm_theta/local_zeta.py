"""Local L-factors, epsilon factors and the reduced local zeta series.

The zeta "integrals" here are the reduced series obtained after the
Iwasawa decomposition and the Whittaker expansion have been applied:

    Z(s) = sum_{n >= 0} chi(pi^n) q^(-n (s - 1/2))        (normalization="paper")
    Z(s) = sum_{n >= 0} chi(pi^n) q^(-n s)                (normalization="unshifted")

The first is the series as it comes out of the measure used upstream; it sums
to ``L(s - 1/2, chi)``.  The second sums to the displayed L-factor
``1 / (1 - chi(pi) q^-s)`` itself.  Neither is preferred silently.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .characters import AdditiveCharacter, MultiplicativeCharacter, cis, gauss_sum
from .errors import (
    DivergentParameters,
    NotBorel,
    SatakeUnsolvable,
    UnramifiedCharacter,
    ZeroDiagonal,
)

NORMALIZATIONS = ("paper", "unshifted")


@dataclass(frozen=True)
class LocalLFactor:
    """``prod_i (1 - gamma_i q^-s)^-1``."""

    q: int
    inverse_roots: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.inverse_roots)

    def __call__(self, s: complex) -> complex:
        X = self.q ** (-complex(s))
        out = 1 + 0j
        for g in self.inverse_roots:
            out /= 1 - g * X
        return out

    def to_json(self) -> dict:
        return {"q": self.q,
                "inverse_roots": [{"re": complex(g).real, "im": complex(g).imag}
                                  for g in self.inverse_roots]}


@dataclass(frozen=True)
class SatakeParams:
    q: int
    alpha: complex
    beta: complex
    unitary: bool = False

    def __post_init__(self):
        if self.alpha == 0 or self.beta == 0:
            raise SatakeUnsolvable("Satake parameters must be nonzero")
        if self.unitary and abs(self.alpha * self.beta - 1) > 1e-12:
            raise SatakeUnsolvable(f"alpha*beta = {self.alpha * self.beta}, expected 1")
        bound = math.sqrt(self.q) * (1 + 1e-12)
        if abs(self.alpha) > bound or abs(self.beta) > bound:
            warnings.warn(f"Satake parameter exceeds q^(1/2) for q={self.q}", RuntimeWarning,
                          stacklevel=2)

    @classmethod
    def from_hecke_eigenvalue(cls, a: float, q: int) -> "SatakeParams":
        """Solve ``alpha + beta = a / sqrt(q)``, ``alpha * beta = 1``."""
        t = a / math.sqrt(q)
        root = cmath.sqrt(t * t - 4)
        return cls(q, (t + root) / 2, (t - root) / 2, unitary=True)


@dataclass(frozen=True)
class WhittakerDatum:
    """``W(g) = chi(det g) * 1_{O^x}(a)`` for Borel ``g = [[a, *], [0, d]]``."""

    chi: MultiplicativeCharacter


@dataclass(frozen=True)
class ZetaSeries:
    partial_sum: complex
    tail_bound: float
    ratio: complex
    terms: int
    normalization: str

    @property
    def closed_form(self) -> complex:
        return 1 / (1 - self.ratio)


def whittaker_eval(W: WhittakerDatum, g) -> complex:
    """Evaluate on a Borel element, given as ``(a, star, d)`` or a 2x2 matrix."""
    field = W.chi.field
    if len(g) == 2:
        (a, star), (c, d) = g
        if not field.coerce(c).is_zero():
            raise NotBorel("the Whittaker datum is only defined on the Borel subgroup")
    else:
        a, star, d = g
    a, d = field.coerce(a), field.coerce(d)
    if a.is_zero() or d.is_zero():
        raise ZeroDiagonal("diagonal entries of a Borel element must be nonzero")
    if a.valuation != 0:
        return 0j
    return W.chi(a * d)


def _series_ratio(chi: MultiplicativeCharacter, s: complex, normalization: str) -> complex:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    q = chi.field.q
    shift = 0.5 if normalization == "paper" else 0.0
    return chi.value_at_uniformizer() * q ** (-(complex(s) - shift))


def ramified_zeta_series(chi: MultiplicativeCharacter, s: complex, terms: int,
                         normalization: str = "paper") -> ZetaSeries:
    """Partial sum of the reduced zeta series with a rigorous tail bound.

    The bound is ``|r|^terms / (1 - |r|)`` for the geometric ratio ``r``.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    r = _series_ratio(chi, s, normalization)
    rho = abs(r)
    if rho >= 1:
        raise DivergentParameters(
            f"series ratio has modulus {rho:.6g} >= 1; need Re(s) beyond the abscissa of convergence")
    q = chi.field.q
    shift = 0.5 if normalization == "paper" else 0.0
    log_q = math.log(q)
    s = complex(s)
    re, im = [], []
    for n in range(terms):
        if chi.exact:
            u = cis(n * chi.pi_value)
        else:
            u = chi.pi_value ** n
        term = u * cmath.exp(-n * (s - shift) * log_q)
        re.append(term.real)
        im.append(term.imag)
    tail = rho ** terms / (1 - rho)
    return ZetaSeries(complex(math.fsum(re), math.fsum(im)), tail, r, terms, normalization)


def ramified_lfactor(chi: MultiplicativeCharacter) -> LocalLFactor:
    """``1 / (1 - chi(pi) q^-s)``, the closed form of the geometric series."""
    return LocalLFactor(chi.field.q, (chi.value_at_uniformizer(),))


def ramified_epsilon(chi: MultiplicativeCharacter, psi: AdditiveCharacter | None, s: complex,
                     include_gauss: bool = True) -> complex:
    """``chi(-1) q^(1/2 - s)``, times ``G(chi, psi)`` when ``include_gauss``."""
    if include_gauss and chi.conductor_exponent == 0:
        raise UnramifiedCharacter("the Gauss-sum form needs a ramified character")
    q = chi.field.q
    eps = chi.sign() * q ** (0.5 - complex(s))
    if include_gauss:
        eps *= gauss_sum(chi, psi)
    return eps


def spherical_rs_lfactor(satake: SatakeParams) -> LocalLFactor:
    """``L(s, pi x pi~)`` for unramified ``pi``: inverse roots ``alpha_i / beta_j``."""
    a, b = complex(satake.alpha), complex(satake.beta)
    return LocalLFactor(satake.q, (1 + 0j, a / b, b / a, 1 + 0j))


def unramified_doubling_integral(satake: SatakeParams, s: complex) -> complex:
    """The unramified local doubling integral, ``L(s + 1/2, pi x pi~)``."""
    return spherical_rs_lfactor(satake)(complex(s) + 0.5)
