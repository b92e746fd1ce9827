"""Archimedean Schwartz data and theta-series Fourier coefficients.

The coefficient of ``T`` is the weighted representation number

    a(T) = sum over (x1, x2) in L1 x L2 with (1/2) Gram(x1, x2) = T of P([x1 x2])

where ``P`` is either the constant 1 or ``P(X) = det(X^t J X)`` with ``J`` the
standard symplectic form on R^4.  ``T = [[a, b/2], [b/2, c]]`` is stored as
the integer triple ``(a, b, c)``; pairs whose half-Gram matrix is not
half-integral (odd norms in an odd lattice) contribute to no coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import BoundTooLarge, DimensionMismatch, IndefiniteGram
from .lattices import GlobalLattice

J = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))
WEIGHTS = ("one", "det")
DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class HarmonicWeight:
    kind: str = "det"

    def __post_init__(self):
        if self.kind not in WEIGHTS:
            raise ValueError(f"weight must be one of {WEIGHTS}")

    def __call__(self, X) -> Fraction:
        return eval_harmonic(self, X)


def symplectic_pairing(x: Sequence, y: Sequence):
    """``x^t J y``."""
    return x[0] * y[2] + x[1] * y[3] - x[2] * y[0] - x[3] * y[1]


def eval_harmonic(P: HarmonicWeight, X) -> Fraction:
    """Exact value of the weight on a 4x2 matrix (list of four rows)."""
    if len(X) != 4 or any(len(r) != 2 for r in X):
        raise DimensionMismatch("X must be a 4x2 matrix")
    if P.kind == "one":
        return Fraction(1)
    X = [[Fraction(v) for v in row] for row in X]
    JX = [[sum(J[i][k] * X[k][j] for k in range(4)) for j in range(2)] for i in range(4)]
    M = [[sum(X[k][i] * JX[k][j] for k in range(4)) for j in range(2)] for i in range(2)]
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def archimedean_schwartz(P: HarmonicWeight, X) -> float:
    """``P(X) exp(-pi tr(X^t X))``."""
    tr = sum(float(v) ** 2 for row in X for v in row)
    return float(eval_harmonic(P, X)) * math.exp(-math.pi * tr)


@dataclass(frozen=True, order=True)
class HalfIntegralMatrix:
    """``T = [[a, b/2], [b/2, c]]``."""

    a: int
    b: int
    c: int

    @property
    def trace(self) -> int:
        return self.a + self.c

    @property
    def disc(self) -> int:
        """``4 det T = 4ac - b^2``."""
        return 4 * self.a * self.c - self.b * self.b

    def is_psd(self) -> bool:
        return self.a >= 0 and self.c >= 0 and self.disc >= 0

    def matrix(self) -> list[list[Fraction]]:
        h = Fraction(self.b, 2)
        return [[Fraction(self.a), h], [h, Fraction(self.c)]]

    def transform(self, U) -> "HalfIntegralMatrix":
        """``U^t T U``."""
        (p, q), (r, s) = U
        a, b, c = self.a, self.b, self.c
        return HalfIntegralMatrix(a * p * p + b * p * r + c * r * r,
                                  2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
                                  a * q * q + b * q * s + c * s * s)

    def swap(self) -> "HalfIntegralMatrix":
        return HalfIntegralMatrix(self.c, self.b, self.a)

    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def psd_half_integral(trace_bound: int) -> Iterator[HalfIntegralMatrix]:
    """All positive semidefinite half-integral T with ``tr T <= trace_bound``."""
    for a in range(trace_bound + 1):
        for c in range(trace_bound + 1 - a):
            m = math.isqrt(4 * a * c)
            for b in range(-m, m + 1):
                yield HalfIntegralMatrix(a, b, c)


# ---------------------------------------------------------------------------
# Fincke-Pohst enumeration

def _quadratic_completion(gram) -> list[list[float]]:
    n = len(gram)
    q = [[float(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            raise IndefiniteGram("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(gram, bound, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """All integer ``x`` with ``x^t G x <= bound``, in deterministic order.

    Floating-point tree search with a small slack; every candidate is then
    confirmed with exact arithmetic.  Raises :class:`BoundTooLarge` once more
    than ``budget`` tree nodes have been visited.
    """
    G = [[Fraction(v) for v in row] for row in gram]
    n = len(G)
    bound = Fraction(bound)
    q = _quadratic_completion(G)
    eps = 1e-9 * (1.0 + float(bound))
    out: list[tuple[int, ...]] = []
    x = [0] * n
    nodes = 0

    def exact_norm(v):
        return sum(G[i][j] * v[i] * v[j] for i in range(n) for j in range(n))

    def rec(i: int, remaining: float):
        nonlocal nodes
        center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / q[i][i])
        lo = math.ceil(center - radius - eps)
        hi = math.floor(center + radius + eps)
        for xi in range(lo, hi + 1):
            nodes += 1
            if nodes > budget:
                raise BoundTooLarge(f"enumeration exceeded {budget} nodes")
            rest = remaining - q[i][i] * (xi - center) ** 2
            if rest < -eps:
                continue
            x[i] = xi
            if i == 0:
                v = tuple(x)
                if exact_norm(v) <= bound:
                    out.append(v)
            else:
                rec(i - 1, rest)
        x[i] = 0

    rec(n - 1, float(bound))
    return out


# ---------------------------------------------------------------------------
# coefficient tables

@dataclass
class ThetaCoefficientTable:
    weight: HarmonicWeight
    bound: int
    entries: dict[tuple[int, int, int], int | Fraction]
    lattice: GlobalLattice | None = dc_field(default=None, repr=False)

    def __getitem__(self, T) -> int | Fraction:
        key = T.key() if isinstance(T, HalfIntegralMatrix) else tuple(T)
        T = HalfIntegralMatrix(*key)
        if not T.is_psd():
            return 0
        if T.trace > self.bound:
            raise KeyError(f"{key} lies beyond the trace bound {self.bound}")
        return self.entries[key]

    def nonzero(self) -> dict[tuple[int, int, int], int | Fraction]:
        return {k: v for k, v in self.entries.items() if v}

    def to_json(self) -> dict:
        def enc(v):
            return v if isinstance(v, int) else str(v)
        rows = [{"a": a, "b": b, "c": c, "value": enc(v)}
                for (a, b, c), v in sorted(self.entries.items())]
        return {"bound": self.bound, "weight": self.weight.kind, "entries": rows}

    @classmethod
    def from_json(cls, obj: dict) -> "ThetaCoefficientTable":
        entries = {}
        for r in obj["entries"]:
            v = r["value"]
            entries[(r["a"], r["b"], r["c"])] = v if isinstance(v, int) else Fraction(v)
        return cls(HarmonicWeight(obj.get("weight", "one")), obj["bound"], entries)


def _common_denominator(mats) -> int:
    den = 1
    for m in mats:
        for row in m:
            for v in row:
                den = math.lcm(den, Fraction(v).denominator)
    return den


def theta_coefficients(L: GlobalLattice, P: HarmonicWeight, trace_bound: int,
                       second: GlobalLattice | None = None,
                       budget: int = DEFAULT_BUDGET) -> ThetaCoefficientTable:
    """Weighted representation numbers ``a(T)`` for all psd ``T`` with ``tr T <= trace_bound``.

    ``x1`` runs over ``L`` and ``x2`` over ``second`` (default ``L``); when
    two lattices are given both need ambient bases.
    """
    if trace_bound < 0:
        raise ValueError("trace_bound must be >= 0")
    L2 = L if second is None else second
    if P.kind == "det" and (L.basis is None or L2.basis is None):
        raise ValueError("the det weight needs lattices with ambient bases")
    if P.kind == "det" and L.ambient_dim != 4:
        raise DimensionMismatch("the det weight lives on 4x2 matrices")
    if second is not None and (L.basis is None or L2.basis is None):
        raise ValueError("pairing two lattices needs ambient bases")

    limit = 2 * trace_bound
    V1 = short_vectors(L.gram, limit, budget)
    V2 = V1 if L2 is L else short_vectors(L2.gram, limit, budget)
    if len(V1) * len(V2) > budget * 10:
        raise BoundTooLarge(f"{len(V1)} x {len(V2)} vector pairs exceed the budget")

    if L.basis is not None and L2.basis is not None:
        # ambient integer coordinates scaled by a common denominator
        den = _common_denominator([L.basis, L2.basis])
        B1 = np.array([[int(v * den) for v in row] for row in L.basis], dtype=np.int64)
        B2 = np.array([[int(v * den) for v in row] for row in L2.basis], dtype=np.int64)
        A1 = np.array(V1, dtype=np.int64) @ B1.T
        A2 = np.array(V2, dtype=np.int64) @ B2.T
        gram_scale = den * den
        G = np.eye(A1.shape[1], dtype=np.int64)
    else:
        den = _common_denominator([L.gram])
        A1 = A2 = np.array(V1, dtype=np.int64)
        gram_scale = den
        G = np.array([[int(v * den) for v in row] for row in L.gram], dtype=np.int64)

    n1 = np.einsum("ij,jk,ik->i", A1, G, A1)
    n2 = np.einsum("ij,jk,ik->i", A2, G, A2)
    # half-integral T needs norm / gram_scale even and dot / gram_scale integral
    two_s = 2 * gram_scale
    tb = trace_bound
    size_b = 2 * tb + 1
    acc = np.zeros((tb + 1) * (tb + 1) * size_b, dtype=np.int64)
    ok2 = (n2 % two_s == 0)
    c_all = n2 // two_s
    Jm = np.array(J, dtype=np.int64)
    GA2 = A2 @ G
    for i in range(A1.shape[0]):
        if n1[i] % two_s:
            continue
        a = int(n1[i] // two_s)
        mask = ok2 & (c_all <= tb - a)
        if not mask.any():
            continue
        dots = GA2[mask] @ A1[i]
        good = dots % gram_scale == 0
        if not good.any():
            continue
        b = dots[good] // gram_scale
        c = c_all[mask][good]
        keys = (a * (tb + 1) + c) * size_b + (b + tb)
        if P.kind == "one":
            w = np.ones_like(keys)
        else:
            omega = A2[mask][good] @ (Jm.T @ A1[i])
            w = omega * omega
        np.add.at(acc, keys, w)

    scale = Fraction(1, den ** 4) if P.kind == "det" else Fraction(1)
    entries: dict[tuple[int, int, int], int | Fraction] = {}
    for T in psd_half_integral(tb):
        raw = int(acc[(T.a * (tb + 1) + T.c) * size_b + (T.b + tb)])
        v = raw * scale
        entries[T.key()] = int(v) if v.denominator == 1 else v
    return ThetaCoefficientTable(P, tb, entries, L)


# ---------------------------------------------------------------------------
# reports

def gl2_small_matrices(entry_bound: int = 3) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    rng = range(-entry_bound, entry_bound + 1)
    return [((p, q), (r, s)) for p, q, r, s in product(rng, repeat=4) if abs(p * s - q * r) == 1]


def unimodular_classes(keys, entry_bound: int = 3) -> list[list[tuple[int, int, int]]]:
    """Partition ``keys`` into GL_2(Z)-classes found by an exhaustive small-U search."""
    keys = sorted(set(keys))
    index = {k: i for i, k in enumerate(keys)}
    parent = list(range(len(keys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    Us = gl2_small_matrices(entry_bound)
    for k in keys:
        T = HalfIntegralMatrix(*k)
        for U in Us:
            k2 = T.transform(U).key()
            if k2 in index:
                ri, rj = find(index[k]), find(index[k2])
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list] = {}
    for k in keys:
        groups.setdefault(find(index[k]), []).append(k)
    return [groups[r] for r in sorted(groups)]


def coefficient_report(table: ThetaCoefficientTable, entry_bound: int = 3) -> dict:
    """Class grouping, growth by trace and vanishing pattern of a table."""
    if not table.entries:
        raise ValueError("empty table")

    def enc(v):
        return v if isinstance(v, int) else str(v)

    classes = []
    for members in unimodular_classes(table.entries, entry_bound):
        vals = [table.entries[m] for m in members]
        classes.append({
            "representative": list(members[0]),
            "members": [list(m) for m in members],
            "values": [enc(v) for v in vals],
            "uniform": len(set(vals)) == 1,
        })
    growth = []
    for t in range(table.bound + 1):
        vals = [abs(v) for k, v in table.entries.items() if k[0] + k[2] == t]
        growth.append({"trace": t, "count": len(vals),
                       "nonzero": sum(1 for v in vals if v),
                       "max_abs": enc(max(vals)) if vals else 0})
    vanishing = [list(k) for k, v in sorted(table.entries.items()) if not v]
    return {"bound": table.bound, "weight": table.weight.kind, "classes": classes,
            "growth": growth, "vanishing": vanishing}
