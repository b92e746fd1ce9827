"""Genus-2 curves ``y^2 = f(x)``: point counts over F_p, F_{p^2} and Euler factors.

Counting is the naive character sum
``#C(F_q) = q + sum_x chi_q(f(x)) + #(points at infinity)``,
vectorized with numpy.  F_{p^2} is ``F_p[t]/(t^2 + a t + b)`` for the first
irreducible ``(a, b)`` in lexicographic order; its quadratic character is
the Legendre symbol of the norm.
"""
from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import Poly, discriminant, isprime, symbols

from .errors import BadReduction, UnsupportedFieldSize, WeilBoundViolation
from .quadratic import QuadInt

WEIL_TOL = 1e-6

_x = symbols("x")


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RM_THETA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class HyperellipticCurve:
    """``y^2 = f(x)`` with integer ``f`` of degree 5 or 6 (coefficients low to high)."""

    f: tuple[int, ...]
    rm_disc: int | None = None
    label: str = ""

    def __post_init__(self):
        f = list(int(c) for c in self.f)
        while f and f[-1] == 0:
            f.pop()
        object.__setattr__(self, "f", tuple(f))
        if len(f) - 1 not in (5, 6):
            raise ValueError(f"genus 2 needs deg f in {{5, 6}}, got {len(f) - 1}")
        if self.discriminant == 0:
            raise ValueError("f has a repeated root")

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    @property
    def leading(self) -> int:
        return self.f[-1]

    @cached_property
    def discriminant(self) -> int:
        return int(discriminant(Poly(list(reversed(self.f)), _x)))

    def has_good_reduction(self, p: int) -> bool:
        return p != 2 and self.leading % p != 0 and self.discriminant % p != 0

    def to_json(self) -> dict:
        out = {"f": list(self.f), "label": self.label}
        if self.rm_disc is not None:
            out["rm_disc"] = self.rm_disc
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "HyperellipticCurve":
        return cls(tuple(obj["f"]), obj.get("rm_disc"), obj.get("label", ""))


@lru_cache(maxsize=64)
def _legendre_table(p: int) -> np.ndarray:
    table = np.full(p, -1, dtype=np.int64)
    table[(np.arange(p, dtype=np.int64) ** 2) % p] = 1
    table[0] = 0
    return table


@lru_cache(maxsize=64)
def quadratic_modulus(p: int) -> tuple[int, int]:
    """``(a, b)`` with ``t^2 + a t + b`` the first irreducible monic quadratic mod ``p``."""
    leg = _legendre_table(p)
    for a in range(p):
        for b in range(p):
            if leg[(a * a - 4 * b) % p] == -1:
                return a, b
    raise AssertionError("no irreducible quadratic found")


def _chunks(n: int, k: int) -> list[tuple[int, int]]:
    step = -(-n // k)
    return [(lo, min(n, lo + step)) for lo in range(0, n, step)]


def _char_sum_fp(f: tuple[int, ...], p: int, lo: int, hi: int) -> int:
    xs = np.arange(lo, hi, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(f):
        acc = (acc * xs + c) % p
    return int(_legendre_table(p)[acc].sum())


def _char_sum_fp2(f: tuple[int, ...], p: int, lo: int, hi: int) -> int:
    # x = u + v t over rows u in [lo, hi)
    a, b = quadratic_modulus(p)
    u = np.repeat(np.arange(lo, hi, dtype=np.int64), p)
    v = np.tile(np.arange(p, dtype=np.int64), hi - lo)
    r = np.zeros_like(u)
    s = np.zeros_like(u)
    for c in reversed(f):
        # (r + s t)(u + v t) with t^2 = -a t - b
        rv = (r * v) % p
        sv = (s * v) % p
        r, s = (r * u - b * sv + c) % p, (rv + s * u - a * sv) % p
    norm = (r * r - a * ((r * s) % p) + b * ((s * s) % p)) % p
    return int(_legendre_table(p)[norm].sum())


def _split_prime_power(q: int) -> tuple[int, int]:
    if isprime(q):
        return q, 1
    r = math.isqrt(q)
    if r * r == q and isprime(r):
        return r, 2
    raise UnsupportedFieldSize(f"q = {q} is neither p nor p^2")


def count_points(C: HyperellipticCurve, q: int) -> int:
    """Projective points of the smooth model over ``F_q``, ``q`` in ``{p, p^2}``."""
    p, n = _split_prime_power(q)
    if not C.has_good_reduction(p):
        raise BadReduction(f"{C.label or C.f} has bad reduction at {p}")
    f = tuple(c % p for c in C.f)
    ranges = _chunks(p, min(thread_count(), p))
    worker = _char_sum_fp if n == 1 else _char_sum_fp2
    if len(ranges) == 1:
        total = worker(f, p, 0, p)
    else:
        with ThreadPoolExecutor(len(ranges)) as ex:
            total = sum(ex.map(lambda r: worker(f, p, *r), ranges))
    if C.degree == 5:
        infinity = 1
    else:
        # the leading coefficient lies in F_p, hence is a square in F_{p^2}
        infinity = 1 + (int(_legendre_table(p)[f[-1]]) if n == 1 else 1)
    return q + total + infinity


@dataclass(frozen=True)
class EulerFactor:
    """``L_p(T) = 1 + c1 T + c2 T^2 + c3 T^3 + c4 T^4``."""

    p: int
    coeffs: tuple[int, int, int, int, int]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if len(c) != 5 or c[0] != 1:
            raise ValueError("an Euler factor has five coefficients starting with 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def c1(self) -> int:
        return self.coeffs[1]

    @property
    def c2(self) -> int:
        return self.coeffs[2]

    def __call__(self, T: complex) -> complex:
        return sum(c * T ** k for k, c in enumerate(self.coeffs))

    def satisfies_functional_equation(self) -> bool:
        _, c1, _, c3, c4 = self.coeffs
        return c3 == self.p * c1 and c4 == self.p ** 2

    def weil_roots(self) -> list[complex]:
        """Roots of ``x^4 + c1 x^3 + c2 x^2 + c3 x + c4`` (the Frobenius eigenvalues)."""
        _, c1, c2, c3, c4 = self.coeffs
        p = self.p
        if not self.satisfies_functional_equation():
            return [complex(z) for z in np.roots([1, c1, c2, c3, c4])]
        # divide by x^2 and substitute y = x + p/x
        disc = cmath.sqrt(c1 * c1 - 4 * (c2 - 2 * p))
        roots = []
        for y in ((-c1 + disc) / 2, (-c1 - disc) / 2):
            w = cmath.sqrt(y * y - 4 * p)
            roots += [(y + w) / 2, (y - w) / 2]
        return roots

    def weil_defect(self) -> float:
        """Largest ``| |rho| - sqrt(p) |`` over the roots."""
        s = math.sqrt(self.p)
        return max(abs(abs(r) - s) for r in self.weil_roots())

    def check(self, tol: float = WEIL_TOL) -> None:
        if not self.satisfies_functional_equation():
            raise WeilBoundViolation(f"functional equation fails at p={self.p}: {self.coeffs}")
        if self.weil_defect() > tol:
            raise WeilBoundViolation(f"root off the circle |x| = sqrt({self.p}): {self.coeffs}")

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> "EulerFactor":
        return cls(obj["p"], tuple(obj["coeffs"]))


def euler_factor_from_counts(p: int, N1: int, N2: int) -> EulerFactor:
    s1 = p + 1 - N1
    s2 = p * p + 1 - N2
    if (s1 * s1 - s2) % 2:
        raise WeilBoundViolation(f"point counts N1={N1}, N2={N2} give a non-integral c2 at p={p}")
    c1 = -s1
    c2 = (s1 * s1 - s2) // 2
    E = EulerFactor(p, (1, c1, c2, p * c1, p * p))
    E.check()
    return E


def euler_factor(C: HyperellipticCurve, p: int) -> EulerFactor:
    if not C.has_good_reduction(p):
        raise BadReduction(f"{C.label or C.f} has bad reduction at {p}")
    return euler_factor_from_counts(p, count_points(C, p), count_points(C, p * p))


@dataclass(frozen=True)
class RMWitness:
    """``split``: ``L_p = (1 - aT + pT^2)(1 - a'T + pT^2)``; ``inert``: ``L_p = 1 - a0 T^2 + p^2 T^4``."""

    kind: str
    eigenvalues: tuple[QuadInt, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "a": [e.to_json() for e in self.eigenvalues]}


def rm_split_check(E: EulerFactor, disc: int) -> RMWitness | None:
    """Factor ``L_p`` compatibly with real multiplication by ``Q(sqrt(disc))``.

    The split shape is tried first, then the inert shape; ``None`` if neither fits.
    """
    p = E.p
    _, c1, c2, c3, c4 = E.coeffs
    if E.satisfies_functional_equation():
        delta = c1 * c1 - 4 * (c2 - 2 * p)
        pair = None
        if delta >= 0 and math.isqrt(delta) ** 2 == delta:
            s = math.isqrt(delta)
            pair = (QuadInt(-c1 + s, 0, disc), QuadInt(-c1 - s, 0, disc))
        elif delta > 0 and delta % disc == 0:
            m2 = delta // disc
            m = math.isqrt(m2)
            if m * m == m2 and (-c1 - m * disc) % 2 == 0:
                a = QuadInt(-c1, m, disc)
                pair = (a, a.conjugate())
        if pair is not None:
            return RMWitness("split", pair)
    if c1 == 0 and c3 == 0 and c4 == p * p:
        return RMWitness("inert", (QuadInt.rational(-c2, disc),))
    return None
