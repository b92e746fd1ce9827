"""Prime-by-prime comparison of curve-side and automorphic-side Euler factors.

Hecke eigenvalues are ingested from JSON, never computed.  A split prime
``p = P P'`` contributes ``(1 - a_P T + p T^2)(1 - a_P' T + p T^2)`` and an
inert prime ``1 - a_P T^2 + p^2 T^4``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Iterable

from sympy import isprime

from .curves import EulerFactor, HyperellipticCurve, RMWitness, euler_factor, rm_split_check
from .errors import (
    DiscMismatch,
    MissingPrime,
    NonIntegralProduct,
    RamifiedPrimeUnsupported,
    RmThetaError,
)
from .local_zeta import SatakeParams, spherical_rs_lfactor
from .quadratic import QuadInt


@dataclass(frozen=True)
class HeckeRecord:
    p: int
    splitting: str  # "split" | "inert" | "ramified"
    eigenvalues: tuple[QuadInt, ...] = ()

    def __post_init__(self):
        want = {"split": 2, "inert": 1, "ramified": None}
        if self.splitting not in want:
            raise ValueError(f"unknown splitting type {self.splitting!r}")
        n = want[self.splitting]
        if n is not None and len(self.eigenvalues) != n:
            raise ValueError(f"{self.splitting} prime {self.p} needs {n} eigenvalue(s)")

    def ramanujan_ok(self) -> bool:
        bound = 2 * math.sqrt(self.p if self.splitting == "split" else self.p ** 2)
        return all(abs(float(a)) <= bound + 1e-9 and abs(float(a.conjugate())) <= bound + 1e-9
                   for a in self.eigenvalues)

    def to_json(self) -> dict:
        out: dict = {"p": self.p, "split": self.splitting == "split"}
        if self.splitting == "ramified":
            out["ramified"] = True
        out["a"] = [a.to_json() for a in self.eigenvalues]
        return out

    @classmethod
    def from_json(cls, obj: dict, disc: int) -> "HeckeRecord":
        if obj.get("ramified"):
            return cls(obj["p"], "ramified")
        eig = []
        for a in obj.get("a", []):
            eig.append(QuadInt.rational(a, disc) if isinstance(a, int) else QuadInt(a[0], a[1], disc))
        return cls(obj["p"], "split" if obj["split"] else "inert", tuple(eig))


@dataclass(frozen=True)
class HeckeDataset:
    rm_disc: int
    records: tuple[HeckeRecord, ...]

    def __post_init__(self):
        for r in self.records:
            if any(a.D != self.rm_disc for a in r.eigenvalues):
                raise DiscMismatch(f"eigenvalue at p={r.p} lives in another quadratic field")
            if not r.ramanujan_ok():
                warnings.warn(f"eigenvalue at p={r.p} exceeds the Ramanujan bound", RuntimeWarning,
                              stacklevel=2)

    def get(self, p: int) -> HeckeRecord:
        for r in self.records:
            if r.p == p:
                return r
        raise MissingPrime(p)

    def primes(self) -> list[int]:
        return [r.p for r in self.records]

    def to_json(self) -> dict:
        return {"rm_disc": self.rm_disc, "records": [r.to_json() for r in self.records]}

    @classmethod
    def from_json(cls, obj: dict) -> "HeckeDataset":
        disc = obj["rm_disc"]
        return cls(disc, tuple(HeckeRecord.from_json(r, disc) for r in obj["records"]))


def automorphic_euler_factor(data: HeckeDataset, p: int) -> EulerFactor:
    rec = data.get(p)
    if rec.splitting == "ramified":
        raise RamifiedPrimeUnsupported(f"p={p} is ramified in the RM field")
    if rec.splitting == "inert":
        (a,) = rec.eigenvalues
        if not a.is_rational or a.u % 2:
            raise NonIntegralProduct(f"inert eigenvalue {a} at p={p} is not a rational integer")
        return EulerFactor(p, (1, 0, -a.to_int(), 0, p * p))
    a, b = rec.eigenvalues
    s, m = a + b, a * b
    if not (s.is_rational and m.is_rational) or s.u % 2 or m.u % 2:
        raise NonIntegralProduct(f"eigenvalues {a}, {b} at p={p} are not conjugate")
    t, n = s.to_int(), m.to_int()
    return EulerFactor(p, (1, -t, 2 * p + n, -p * t, p * p))


def record_from_witness(p: int, w: RMWitness) -> HeckeRecord:
    return HeckeRecord(p, w.kind, tuple(w.eigenvalues))


@dataclass(frozen=True)
class MatchRecord:
    p: int
    curve_factor: EulerFactor
    automorphic_factor: EulerFactor | None
    equal: bool
    hecke: HeckeRecord
    witness: RMWitness | None = None
    discrepancy: str | None = None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "equal": self.equal,
            "curve_factor": list(self.curve_factor.coeffs),
            "automorphic_factor": None if self.automorphic_factor is None
            else list(self.automorphic_factor.coeffs),
            "hecke": self.hecke.to_json(),
            "witness": None if self.witness is None else self.witness.to_json(),
            "discrepancy": self.discrepancy,
        }


@dataclass
class MatchReport:
    rm_disc: int
    records: list[MatchRecord] = dc_field(default_factory=list)
    skipped: list[tuple[int, str]] = dc_field(default_factory=list)

    @property
    def all_equal(self) -> bool:
        return all(r.equal for r in self.records)

    def mismatches(self) -> list[int]:
        return [r.p for r in self.records if not r.equal]

    def verdicts(self) -> dict[int, bool]:
        return {r.p: r.equal for r in self.records}

    def to_json(self) -> dict:
        return {
            "rm_disc": self.rm_disc,
            "compared": len(self.records),
            "all_equal": self.all_equal,
            "records": [r.to_json() for r in self.records],
            "skipped": [{"p": p, "reason": why} for p, why in self.skipped],
        }


def _primes(primes: Iterable[int]) -> list[int]:
    return sorted({int(p) for p in primes if int(p) > 1 and isprime(int(p))})


def match(curve: HyperellipticCurve, data: HeckeDataset, primes: Iterable[int]) -> MatchReport:
    """Exact comparison at every good, unramified prime present in ``data``."""
    if curve.rm_disc != data.rm_disc:
        raise DiscMismatch(f"curve has RM discriminant {curve.rm_disc}, dataset {data.rm_disc}")
    report = MatchReport(data.rm_disc)
    for p in _primes(primes):
        if not curve.has_good_reduction(p):
            report.skipped.append((p, "BadReduction"))
            continue
        try:
            rec = data.get(p)
        except MissingPrime:
            report.skipped.append((p, "MissingPrime"))
            continue
        if rec.splitting == "ramified" or data.rm_disc % p == 0:
            report.skipped.append((p, "RamifiedPrimeUnsupported"))
            continue
        E = euler_factor(curve, p)
        witness = rm_split_check(E, data.rm_disc)
        try:
            A = automorphic_euler_factor(data, p)
        except NonIntegralProduct as exc:
            report.records.append(MatchRecord(p, E, None, False, rec, witness,
                                              f"NonIntegralProduct: {exc}"))
            continue
        equal = A.coeffs == E.coeffs
        diff = None if equal else "coefficient differences " + str(
            [x - y for x, y in zip(A.coeffs, E.coeffs)])
        report.records.append(MatchRecord(p, E, A, equal, rec, witness, diff))
    return report


def dataset_from_curve(curve: HyperellipticCurve, primes: Iterable[int],
                       disc: int | None = None) -> HeckeDataset:
    """Hecke data read off the curve's own Euler factors via :func:`rm_split_check`.

    Primes without a witness are left out; primes dividing ``disc`` are
    recorded as ramified.
    """
    disc = curve.rm_disc if disc is None else disc
    if disc is None:
        raise DiscMismatch("no RM discriminant given")
    records = []
    for p in _primes(primes):
        if not curve.has_good_reduction(p):
            continue
        if disc % p == 0:
            records.append(HeckeRecord(p, "ramified"))
            continue
        w = rm_split_check(euler_factor(curve, p), disc)
        if w is not None:
            records.append(record_from_witness(p, w))
    return HeckeDataset(disc, tuple(records))


def dataset_from_report(report: MatchReport) -> HeckeDataset:
    return HeckeDataset(report.rm_disc, tuple(r.hecke for r in report.records))


def direct_rs_product(a: float, p: int, s: complex) -> complex:
    """``1 / ((1 - X)^2 (1 - (a^2/p - 2) X + X^2))`` with ``X = p^-s``."""
    X = p ** (-complex(s))
    return 1 / ((1 - X) ** 2 * (1 - (a * a / p - 2) * X + X * X))


def spherical_residual(a: float, p: int, s: complex) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sat = SatakeParams.from_hecke_eigenvalue(a, p)
    value = spherical_rs_lfactor(sat)(s)
    direct = direct_rs_product(a, p, s)
    if not (cmath.isfinite(value) and cmath.isfinite(direct)):
        raise RmThetaError(f"L-factor has a pole at s={s}")
    return abs(value - direct)


def spherical_consistency(data: HeckeDataset, p: int, s: complex) -> float:
    """Residual between the Satake-built Rankin-Selberg factor and the direct product."""
    rec = data.get(p)
    if rec.splitting != "split":
        raise RamifiedPrimeUnsupported(f"p={p} is not a split unramified prime")
    return spherical_residual(float(rec.eigenvalues[0]), p, s)
