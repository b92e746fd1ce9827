"""Finite-precision arithmetic in Q_p and its quadratic extensions.

An element is stored as ``pi**v * u`` where ``u`` is a unit of the ring of
integers known modulo ``P**r`` (``P`` the maximal ideal, ``r`` the relative
precision counted in uniformizer digits).  Units are coefficient pairs
``(a0, a1)`` meaning ``a0 + a1*sqrt(d)``; in the base field ``a1`` is always 0.

Three kinds of field are supported:

``base``
    Q_p itself, uniformizer ``p``.
``unram2``
    Q_p(sqrt(d)) with ``d`` a unit non-square mod an odd ``p``; uniformizer ``p``.
``ram2``
    Q_p(sqrt(d)) with ``v_p(d) = 1``; uniformizer ``sqrt(d)``, so ``v(p) = 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from sympy import Matrix, ZZ, factorint, isprime, primitive_root
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import (
    DivisionByZero,
    FieldMismatch,
    InvalidExtension,
    NonPrime,
    PrecisionError,
    UnsupportedField,
)

KINDS = ("base", "unram2", "ram2")
DEFAULT_PRECISION = 16

# dlog tables are built by enumeration; refuse anything larger than this
MAX_TABLE_SIZE = 2_000_000

Pair = tuple[int, int]


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer, ``inf`` for 0."""
    if n == 0:
        return math.inf
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class LocalFieldDesc:
    p: int
    kind: str = "base"
    d: int | None = None
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise NonPrime(f"{self.p!r} is not prime")
        if self.kind not in KINDS:
            raise InvalidExtension(f"unknown extension kind {self.kind!r}")
        if not isinstance(self.precision, int) or self.precision < 4:
            raise ValueError("precision must be an integer >= 4")
        if self.kind == "base":
            if self.d is not None:
                raise InvalidExtension("base field takes no defining element")
        elif self.kind == "ram2":
            if self.d is None or vp(self.d, self.p) != 1:
                raise InvalidExtension(
                    f"ramified quadratic extension needs v_p(d) = 1, got d={self.d}")
        else:
            if self.p == 2:
                raise InvalidExtension("unramified quadratic extensions of Q_2 are not supported")
            if self.d is None or self.d % self.p == 0 or _is_square_mod_p(self.d, self.p):
                raise InvalidExtension(
                    f"unramified quadratic extension needs a unit non-square d, got d={self.d}")

    # -- invariants -----------------------------------------------------
    @property
    def e(self) -> int:
        return 2 if self.kind == "ram2" else 1

    @property
    def f(self) -> int:
        return 2 if self.kind == "unram2" else 1

    @property
    def degree(self) -> int:
        return self.e * self.f

    @property
    def q(self) -> int:
        """Cardinality of the residue field."""
        return self.p ** self.f

    @property
    def _d(self) -> int:
        return 0 if self.d is None else self.d

    @property
    def _d_unit(self) -> int:
        # d = p * d' in the ramified case
        return self.d // self.p if self.kind == "ram2" else 1

    @property
    def _work(self) -> int:
        # exponent of the working modulus for unit inverses; comfortably past
        # anything the precision window can observe
        return 2 * self.precision + 8

    def __str__(self):
        if self.kind == "base":
            return f"Q_{self.p}"
        return f"Q_{self.p}(sqrt({self.d}))"

    # -- constructors -----------------------------------------------------
    def element(self, a: int | Fraction | str = 0, b: int | Fraction | str = 0) -> "LocalFieldElement":
        """The element ``a + b*sqrt(d)`` for rationals ``a``, ``b``."""
        a, b = Fraction(a), Fraction(b)
        if self.kind == "base" and b:
            raise FieldMismatch("base field elements have no sqrt(d) component")
        if not a and not b:
            return self.zero()
        den = math.lcm(a.denominator, b.denominator)
        A = (int(a * den), int(b * den))
        k = int(vp(den, self.p))
        den_unit = den // self.p ** k
        v = int(_pair_val(self, A))
        unit = _div_pi(self, A, v)
        # p**k = pi**(e*k) * w with w = d'**(-k) in the ramified case
        corr = pow(den_unit, -1, self.p ** self._work)
        if self.kind == "ram2":
            corr = corr * pow(self._d_unit, k, self.p ** self._work)
        unit = (unit[0] * corr, unit[1] * corr)
        return LocalFieldElement._make(self, v - self.e * k, unit, self.precision)

    __call__ = element

    def zero(self) -> "LocalFieldElement":
        return LocalFieldElement(self, None, (0, 0), 0)

    def one(self) -> "LocalFieldElement":
        return self.element(1)

    def uniformizer(self) -> "LocalFieldElement":
        return LocalFieldElement(self, 1, (1, 0), self.precision)

    def sqrt_d(self) -> "LocalFieldElement":
        if self.kind == "base":
            raise FieldMismatch("base field has no sqrt(d)")
        return self.element(0, 1)

    def coerce(self, x) -> "LocalFieldElement":
        if isinstance(x, LocalFieldElement):
            if x.field != self:
                raise FieldMismatch(f"element of {x.field} used in {self}")
            return x
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return self.element(*x)
        return self.element(x)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        out = {"p": self.p, "kind": self.kind, "precision": self.precision}
        if self.d is not None:
            out["d"] = self.d
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LocalFieldDesc":
        return make_field(obj["p"], obj.get("kind", "base"),
                          obj.get("precision", DEFAULT_PRECISION), d=obj.get("d"))


def _is_square_mod_p(a: int, p: int) -> bool:
    a %= p
    if a == 0 or p == 2:
        return True
    return pow(a, (p - 1) // 2, p) == 1


def make_field(p: int, kind: str = "base", precision: int = DEFAULT_PRECISION,
               d: int | None = None) -> LocalFieldDesc:
    """Build a field descriptor.

    For ``unram2`` a missing ``d`` is replaced by the least positive
    non-residue mod ``p``; for ``ram2`` it defaults to ``p``.
    """
    if not isinstance(p, int) or not isprime(p):
        raise NonPrime(f"{p!r} is not prime")
    if kind == "unram2" and d is None:
        d = next(a for a in range(2, p) if not _is_square_mod_p(a, p)) if p > 2 else None
    if kind == "ram2" and d is None:
        d = p
    return LocalFieldDesc(p, kind, d, precision)


# ---------------------------------------------------------------------------
# coefficient-pair helpers (exact integer representatives)

def _pair_mul(F: LocalFieldDesc, x: Pair, y: Pair) -> Pair:
    return (x[0] * y[0] + F._d * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _pi_mul(F: LocalFieldDesc, x: Pair, k: int) -> Pair:
    if F.kind != "ram2":
        s = F.p ** k
        return (x[0] * s, x[1] * s)
    m, odd = divmod(k, 2)
    s = F.d ** m
    a0, a1 = x[0] * s, x[1] * s
    return (F.d * a1, a0) if odd else (a0, a1)


def _pair_val(F: LocalFieldDesc, x: Pair) -> float:
    v0, v1 = vp(x[0], F.p), vp(x[1], F.p)
    if F.kind == "ram2":
        return min(2 * v0, 2 * v1 + 1)
    return min(v0, v1)


def _div_pi(F: LocalFieldDesc, x: Pair, k: int) -> Pair:
    """Exact division by ``pi**k``; requires ``v(x) >= k``."""
    if k <= 0:
        return _pi_mul(F, x, -k)
    if F.kind != "ram2":
        s = F.p ** k
        return (x[0] // s, x[1] // s)
    m, odd = divmod(k, 2)
    mod = F.p ** F._work
    inv = pow(F._d_unit, -1, mod)
    s = F.p ** m
    w = pow(inv, m, mod)
    a0, a1 = (x[0] // s) * w % mod, (x[1] // s) * w % mod
    if odd:
        # (a0 + a1 pi) / pi = a1 + (a0 / d) pi
        a0, a1 = a1, (a0 // F.p) * inv % mod
    return (a0, a1)


def _canon(F: LocalFieldDesc, x: Pair, r: int) -> Pair:
    """Canonical representative of ``x`` modulo ``P**r``."""
    p = F.p
    if F.kind == "base":
        return (x[0] % p ** r, 0)
    if F.kind == "unram2":
        m = p ** r
        return (x[0] % m, x[1] % m)
    return (x[0] % p ** ((r + 1) // 2), x[1] % p ** (r // 2))


def _unit_inverse(F: LocalFieldDesc, u: Pair) -> Pair:
    mod = F.p ** F._work
    norm = u[0] * u[0] - F._d * u[1] * u[1]
    ninv = pow(norm % mod, -1, mod)
    return (u[0] * ninv % mod, -u[1] * ninv % mod)


class LocalFieldElement:
    """``pi**valuation * unit`` with the unit known modulo ``P**prec``.

    Instances are immutable.  Zero is a distinguished value with infinite
    valuation; any sum whose known digits all cancel collapses to it.
    """

    __slots__ = ("field", "_v", "unit", "prec")

    def __init__(self, field: LocalFieldDesc, v: int | None, unit: Pair, prec: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("LocalFieldElement is immutable")

    @classmethod
    def _make(cls, F: LocalFieldDesc, v: int, unit: Pair, prec: int) -> "LocalFieldElement":
        prec = min(prec, F.precision)
        return cls(F, v, _canon(F, unit, prec), prec)

    # -- basic data -----------------------------------------------------
    @property
    def valuation(self) -> int | float:
        return math.inf if self._v is None else self._v

    def is_zero(self) -> bool:
        return self._v is None

    @property
    def absolute_precision(self) -> float:
        return math.inf if self._v is None else self._v + self.prec

    def is_integral(self) -> bool:
        return self._v is None or self._v >= 0

    def is_unit(self) -> bool:
        return self._v == 0

    def unit_residue(self, c: int) -> Pair:
        """The unit part modulo ``P**c``."""
        if self._v is None:
            raise DivisionByZero("zero has no unit part")
        if c > self.prec:
            raise PrecisionError(f"unit known only modulo P^{self.prec}, asked for P^{c}")
        return _canon(self.field, self.unit, c)

    def residue(self) -> Pair:
        """Reduction to the residue field; requires an integral element."""
        if self._v is None or self._v > 0:
            return (0, 0)
        if self._v < 0:
            raise ValueError("element is not integral")
        return self.unit_residue(1)

    def digits(self) -> list:
        """pi-adic digits of the unit part, least significant first.

        Digits are integers in ``[0, p)``, or pairs of such for the
        unramified extension (residue field F_{p^2}).
        """
        if self._v is None:
            return []
        F, out = self.field, []
        x = self.unit
        for _ in range(self.prec):
            if F.kind == "unram2":
                dig = (x[0] % F.p, x[1] % F.p)
                out.append(dig)
            else:
                dig = (x[0] % F.p, 0)
                out.append(dig[0])
            x = _div_pi(F, (x[0] - dig[0], x[1] - dig[1]), 1)
        return out

    def to_fraction(self) -> Fraction:
        """Rational approximation ``p**v * u`` (base field only)."""
        if self.field.kind != "base":
            raise FieldMismatch("to_fraction is only defined on Q_p")
        if self._v is None:
            return Fraction(0)
        return Fraction(self.field.p) ** self._v * self.unit[0]

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "LocalFieldElement":
        if isinstance(other, LocalFieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{other.field} vs {self.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __neg__(self):
        if self._v is None:
            return self
        return LocalFieldElement._make(self.field, self._v, (-self.unit[0], -self.unit[1]), self.prec)

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        if self._v is None:
            return y
        if y._v is None:
            return self
        F = self.field
        m = min(self._v, y._v)
        R = min(self._v - m + self.prec, y._v - m + y.prec)
        sx = _pi_mul(F, self.unit, self._v - m)
        sy = _pi_mul(F, y.unit, y._v - m)
        s = _canon(F, (sx[0] + sy[0], sx[1] + sy[1]), R)
        w = _pair_val(F, s)
        if w >= R:
            return F.zero()
        w = int(w)
        return LocalFieldElement._make(F, m + w, _div_pi(F, s, w), R - w)

    __radd__ = __add__

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return y + (-self)

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        if self._v is None or y._v is None:
            return self.field.zero()
        prec = min(self.prec, y.prec)
        return LocalFieldElement._make(self.field, self._v + y._v,
                                       _pair_mul(self.field, self.unit, y.unit), prec)

    __rmul__ = __mul__

    def inverse(self) -> "LocalFieldElement":
        if self._v is None:
            raise DivisionByZero("inverse of zero")
        return LocalFieldElement._make(self.field, -self._v,
                                       _unit_inverse(self.field, self.unit), self.prec)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return self * y.inverse()

    def __rtruediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return y * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if self._v is None:
            if n == 0:
                return self.field.one()
            return self
        u = (1, 0)
        base, k = self.unit, n
        mod = self.field.p ** self.field._work
        while k:
            if k & 1:
                u = _pair_mul(self.field, u, base)
                u = (u[0] % mod, u[1] % mod)
            base = _pair_mul(self.field, base, base)
            base = (base[0] % mod, base[1] % mod)
            k >>= 1
        return LocalFieldElement._make(self.field, self._v * n, u, self.prec)

    def __eq__(self, other):
        try:
            y = self._coerce(other)
        except FieldMismatch:
            return False
        if y is NotImplemented:
            return y
        if self._v is None or y._v is None:
            return self._v is None and y._v is None
        if self._v != y._v:
            return False
        r = min(self.prec, y.prec)
        return _canon(self.field, self.unit, r) == _canon(self.field, y.unit, r)

    def __hash__(self):
        return hash((self.field, self._v))

    def __repr__(self):
        if self._v is None:
            return f"<0 in {self.field}>"
        return f"<{self.field}: pi^{self._v} * {self.unit} + O(pi^{self._v + self.prec})>"


def valuation(x: LocalFieldElement) -> int | float:
    return x.valuation


def arith(x: LocalFieldElement, y: LocalFieldElement | None, op: str) -> LocalFieldElement:
    """Dispatch form of the field operations: ``op`` in {add, sub, mul, div, inv}."""
    if op == "inv":
        return x.inverse()
    if y is None:
        raise ValueError(f"{op} needs two operands")
    if not isinstance(y, LocalFieldElement) or x.field != y.field:
        raise FieldMismatch("operands live in different fields")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# unit groups (O / P^c)^x

class _Residues:
    """Arithmetic in O / P^c on canonical coefficient pairs."""

    def __init__(self, F: LocalFieldDesc, c: int):
        self.F, self.c = F, c

    def canon(self, x: Pair) -> Pair:
        return _canon(self.F, x, self.c)

    def mul(self, x: Pair, y: Pair) -> Pair:
        return self.canon(_pair_mul(self.F, x, y))

    def pow(self, x: Pair, n: int) -> Pair:
        if n < 0:
            x, n = self.inv(x), -n
        out = self.canon((1, 0))
        while n:
            if n & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            n >>= 1
        return out

    def inv(self, x: Pair) -> Pair:
        return self.canon(_unit_inverse(self.F, x))


def _one_unit_coords(R: _Residues, x: Pair, basis: list[Pair], gens: list[Pair]) -> list[int]:
    """Exponents of ``x`` in the filtration generators ``1 + eps * pi^i``.

    ``gens`` is ordered by level ``i = 1 .. c-1`` and within each level by
    ``basis`` (a lift of an F_p-basis of the residue field).
    """
    F, c, p = R.F, R.c, R.F.p
    nb = len(basis)
    coords = [0] * len(gens)
    for i in range(1, c):
        t = _div_pi(F, (x[0] - 1, x[1]), i)
        t = (t[0] % p, t[1] % p)
        # residue digits in terms of basis {1} or {1, sqrt d}
        digs = [t[0]] if nb == 1 else [t[0], t[1]]
        for j, k in enumerate(digs):
            if k:
                idx = (i - 1) * nb + j
                coords[idx] = k
                x = R.mul(x, R.pow(gens[idx], -k))
    if R.canon(x) != R.canon((1, 0)):
        raise AssertionError("filtration expansion did not terminate at 1")
    return coords


class UnitGroup:
    """(O / P^c)^x with an explicit basis of generators.

    Every class is ``prod(g_i ** e_i)`` for a unique exponent vector with
    ``0 <= e_i < orders[i]``.
    """

    def __init__(self, field: LocalFieldDesc, c: int, generators: list[Pair], orders: list[int]):
        self.field = field
        self.c = c
        self.generator_pairs = tuple(generators)
        self.orders = tuple(orders)
        self._R = _Residues(field, c)
        self._table: dict[Pair, tuple[int, ...]] | None = None

    @property
    def generators(self) -> tuple[LocalFieldElement, ...]:
        return tuple(LocalFieldElement._make(self.field, 0, g, self.c) for g in self.generator_pairs)

    @property
    def order(self) -> int:
        q = self.field.q
        return (q - 1) * q ** (self.c - 1)

    def key(self, x) -> Pair:
        """Canonical residue class of a unit (element or pair)."""
        if isinstance(x, LocalFieldElement):
            if x.field != self.field:
                raise FieldMismatch("unit from another field")
            if x.valuation != 0:
                raise ValueError("not a unit")
            return x.unit_residue(self.c)
        return self._R.canon(x)

    def mul(self, x: Pair, y: Pair) -> Pair:
        return self._R.mul(x, y)

    def element(self, exps) -> Pair:
        out = self._R.canon((1, 0))
        for g, e in zip(self.generator_pairs, exps):
            out = self._R.mul(out, self._R.pow(g, e))
        return out

    def _build_table(self) -> dict[Pair, tuple[int, ...]]:
        if self.order > MAX_TABLE_SIZE:
            raise UnsupportedField(f"unit group of order {self.order} is too large to tabulate")
        table = {self._R.canon((1, 0)): ()}
        for g, m in zip(self.generator_pairs, self.orders):
            new = {}
            for key, exps in table.items():
                x = key
                for k in range(m):
                    new[x] = exps + (k,)
                    x = self._R.mul(x, g)
            table = new
        if len(table) != self.order:
            raise AssertionError("generators do not give a direct-product decomposition")
        return table

    def dlog(self, x) -> tuple[int, ...]:
        if self._table is None:
            self._table = self._build_table()
        return self._table[self.key(x)]

    def elements(self) -> Iterator[Pair]:
        if self._table is None:
            self._table = self._build_table()
        return iter(self._table)

    def one_unit_generators(self, j: int) -> list[Pair]:
        """Generators of the image of ``1 + P^j`` (``j >= 1``)."""
        F = self.field
        basis = [(1, 0)] if F.f == 1 else [(1, 0), (0, 1)]
        out = []
        for i in range(j, self.c):
            for b in basis:
                t = _pi_mul(F, b, i)
                out.append(self._R.canon((1 + t[0], t[1])))
        return out

    def __repr__(self):
        return f"UnitGroup({self.field}, c={self.c}, orders={self.orders})"


def _residue_field_generator(F: LocalFieldDesc) -> Pair:
    q = F.q
    if F.f == 1:
        return (primitive_root(F.p), 0) if F.p > 2 else (1, 0)
    R1 = _Residues(F, 1)
    ell = list(factorint(q - 1))
    for a in range(F.p):
        for b in range(1, F.p):
            g = (a, b)
            if all(R1.pow(g, (q - 1) // l) != (1, 0) for l in ell):
                return g
    raise AssertionError("F_{p^2} has no generator?")


@lru_cache(maxsize=None)
def teichmuller_unit_group(field: LocalFieldDesc, c: int) -> UnitGroup:
    """Generators (with orders) of ``(O / P^c)^x``.

    Q_p uses the classical presentation: one primitive root mod p^2 for odd
    ``p``, and ``{-1, 5}`` for ``p = 2``.  The quadratic extensions use the
    Teichmuller lift of a residue-field generator times a Smith-normal-form
    basis of the one-units ``(1 + P) / (1 + P^c)``.
    """
    if not isinstance(c, int) or c < 1:
        raise ValueError("level c must be a positive integer")
    if c > field.precision:
        raise UnsupportedField(f"level {c} exceeds field precision {field.precision}")
    p = field.p
    if field.kind == "base":
        if p == 2:
            if c == 1:
                return UnitGroup(field, c, [], [])
            if c == 2:
                return UnitGroup(field, c, [(3, 0)], [2])
            return UnitGroup(field, c, [(2 ** c - 1, 0), (5, 0)], [2, 2 ** (c - 2)])
        g = primitive_root(p * p) % p ** c
        return UnitGroup(field, c, [(g, 0)], [(p - 1) * p ** (c - 1)])

    R = _Residues(field, c)
    gens, orders = [], []
    q = field.q
    if q > 2:
        g = _residue_field_generator(field)
        gens.append(R.pow(g, q ** c))
        orders.append(q - 1)
    if c > 1:
        basis = [(1, 0)] if field.f == 1 else [(1, 0), (0, 1)]
        filt = []
        for i in range(1, c):
            for b in basis:
                t = _pi_mul(field, b, i)
                filt.append(R.canon((1 + t[0], t[1])))
        n = len(filt)
        rel = []
        for idx, h in enumerate(filt):
            row = [-k for k in _one_unit_coords(R, R.pow(h, p), basis, filt)]
            row[idx] += p
            rel.append(row)
        S, _, V = smith_normal_decomp(Matrix(rel), domain=ZZ)
        Vinv = V.inv()
        for j in range(n):
            m = abs(int(S[j, j]))
            if m == 1:
                continue
            gj = R.canon((1, 0))
            for k in range(n):
                gj = R.mul(gj, R.pow(filt[k], int(Vinv[j, k])))
            gens.append(gj)
            orders.append(m)
    return UnitGroup(field, c, gens, orders)
