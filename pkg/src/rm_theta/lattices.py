"""Local adapted lattices (test vectors) and global lattices for theta sums.

Local lattices live in ``K^n`` for a local field ``K``.  Vectors are rows and
matrices act on the right, ``x -> x @ g``; the lattice is the O-span of the
rows of its basis matrix.  With this convention ``O + P^2 O`` in ``Q_2(sqrt 2)``
is stabilized by the matrices whose upper-right entry lies in ``P^2 = 2 O``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, IndefiniteGram, SingularMatrix
from .local_fields import LocalFieldDesc, LocalFieldElement

LocalMatrix = list[list[LocalFieldElement]]


def _as_matrix(field: LocalFieldDesc, g) -> LocalMatrix:
    return [[field.coerce(x) for x in row] for row in g]


def local_det(field: LocalFieldDesc, g) -> LocalFieldElement:
    """Determinant by elimination with minimal-valuation pivots."""
    m = _as_matrix(field, g)
    n = len(m)
    det = field.one()
    for col in range(n):
        piv = min(range(col, n), key=lambda r: m[r][col].valuation)
        if m[piv][col].is_zero():
            return field.zero()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        inv = m[col][col].inverse()
        for r in range(col + 1, n):
            t = m[r][col] * inv
            if not t.is_zero():
                m[r] = [a - t * b for a, b in zip(m[r], m[col])]
    return det


def local_inverse(field: LocalFieldDesc, g) -> LocalMatrix:
    """Gauss-Jordan inverse; raises :class:`SingularMatrix`."""
    m = _as_matrix(field, g)
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch("matrix is not square")
    aug = [row + [field.one() if i == j else field.zero() for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = min(range(col, n), key=lambda r: aug[r][col].valuation)
        if aug[piv][col].is_zero():
            raise SingularMatrix("matrix is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                t = aug[r][col]
                aug[r] = [a - t * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def local_matmul(a: LocalMatrix, b: LocalMatrix) -> LocalMatrix:
    field = a[0][0].field
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), field.zero())
             for j in range(len(b[0]))] for i in range(len(a))]


@dataclass(frozen=True, eq=False)
class AdaptedLattice:
    """Full-rank O-lattice in ``K^rank``.

    Either a valuation shape ``P^a1 + ... + P^ar`` (``shape`` set) or a
    general basis matrix whose rows span the lattice.
    """

    field: LocalFieldDesc
    basis: tuple[tuple[LocalFieldElement, ...], ...]
    shape: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.basis)
        if any(len(row) != n for row in self.basis):
            raise DimensionMismatch("basis must be square")
        if local_det(self.field, self.basis).is_zero():
            raise SingularMatrix("lattice basis is singular")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def _vector(self, x) -> list[LocalFieldElement]:
        if len(x) != self.rank:
            raise DimensionMismatch(f"vector of length {len(x)} for a rank-{self.rank} lattice")
        return [self.field.coerce(t) for t in x]

    def contains(self, x) -> bool:
        x = self._vector(x)
        if self.shape is not None:
            return all(t.valuation >= a for t, a in zip(x, self.shape))
        binv = local_inverse(self.field, self.basis)
        coords = local_matmul([x], binv)[0]
        return all(t.is_integral() for t in coords)

    __contains__ = contains

    def char_fn(self, x) -> int:
        """The Schwartz function ``1_L``."""
        return 1 if self.contains(x) else 0

    def stabilizes(self, g) -> bool:
        """True iff ``L @ g == L``."""
        g = _as_matrix(self.field, g)
        if len(g) != self.rank or any(len(row) != self.rank for row in g):
            raise DimensionMismatch("matrix size does not match the lattice rank")
        if local_det(self.field, g).is_zero():
            raise SingularMatrix("g is not invertible")
        if self.shape is not None:
            a = self.shape
            entries_ok = all(g[i][j].valuation + a[i] - a[j] >= 0
                             for i in range(self.rank) for j in range(self.rank))
            return entries_ok and local_det(self.field, g).valuation == 0
        conj = local_matmul(local_matmul([list(r) for r in self.basis], g),
                            local_inverse(self.field, self.basis))
        return (all(t.is_integral() for row in conj for t in row)
                and local_det(self.field, conj).valuation == 0)

    def to_json(self) -> dict:
        if self.shape is None:
            raise ValueError("only shape lattices have a JSON form")
        return {"field": self.field.to_json(), "shape": list(self.shape)}

    @classmethod
    def from_json(cls, obj: dict) -> "AdaptedLattice":
        return adapted_lattice(LocalFieldDesc.from_json(obj["field"]), obj["shape"])


def adapted_lattice(field: LocalFieldDesc, conductor_exponents: Sequence[int]) -> AdaptedLattice:
    """``P^a1 O + ... + P^ar O`` for shifts ``a_i`` (possibly negative)."""
    shape = tuple(int(a) for a in conductor_exponents)
    pi = field.uniformizer()
    n = len(shape)
    basis = tuple(tuple(pi ** a if i == j else field.zero() for j in range(n))
                  for i, a in enumerate(shape))
    return AdaptedLattice(field, basis, shape)


def lattice_from_basis(field: LocalFieldDesc, rows) -> AdaptedLattice:
    return AdaptedLattice(field, tuple(tuple(field.coerce(x) for x in row) for row in rows))


def char_fn(L: AdaptedLattice, x) -> int:
    return L.char_fn(x)


def invariance_subgroup_check(L: AdaptedLattice, g) -> bool:
    return L.stabilizes(g)


# ---------------------------------------------------------------------------
# global lattices

def _frac_matrix(m) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def _is_positive_definite(g) -> bool:
    # Sylvester's criterion with exact leading minors
    n = len(g)
    a = [list(row) for row in g]
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            t = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= t * a[k][j]
    return True


@dataclass(frozen=True, eq=False)
class GlobalLattice:
    """A positive-definite Z-lattice.

    ``basis`` is an ambient matrix whose columns are the basis vectors (in an
    orthonormal frame); ``gram`` is the matrix of inner products.  The
    harmonic weight needs ambient coordinates, so lattices built from a Gram
    matrix alone only support the constant weight.
    """

    gram: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[Fraction, ...], ...] | None = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gram", _frac_matrix(self.gram))
        n = len(self.gram)
        if any(len(r) != n for r in self.gram):
            raise DimensionMismatch("Gram matrix must be square")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(n)):
            raise IndefiniteGram("Gram matrix is not symmetric")
        if not _is_positive_definite(self.gram):
            raise IndefiniteGram("Gram matrix is not positive definite")
        if self.basis is not None:
            object.__setattr__(self, "basis", _frac_matrix(self.basis))
            if any(len(r) != n for r in self.basis):
                raise DimensionMismatch("basis has the wrong number of columns")
            if _gram_of(self.basis) != self.gram:
                raise ValueError("gram does not equal basis^T basis")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def ambient_dim(self) -> int | None:
        return None if self.basis is None else len(self.basis)

    @classmethod
    def from_basis(cls, basis) -> "GlobalLattice":
        basis = _frac_matrix(basis)
        return cls(_gram_of(basis), basis)

    @classmethod
    def standard(cls, n: int = 4) -> "GlobalLattice":
        return cls.from_basis([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def scaled(self, factor) -> "GlobalLattice":
        """``factor * L`` (a congruence sublattice when ``factor`` is an integer)."""
        factor = Fraction(factor)
        if self.basis is None:
            return GlobalLattice([[factor * factor * x for x in row] for row in self.gram])
        return GlobalLattice.from_basis([[factor * x for x in row] for row in self.basis])

    def ambient(self, coords) -> tuple[Fraction, ...]:
        """Ambient vector with the given coordinates in the basis."""
        if self.basis is None:
            raise ValueError("lattice has no ambient basis")
        return tuple(sum((b * c for b, c in zip(row, coords)), Fraction(0)) for row in self.basis)

    def norm(self, coords) -> Fraction:
        g = self.gram
        return sum((g[i][j] * coords[i] * coords[j]
                    for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def to_json(self) -> dict:
        out = {"rank": self.rank, "gram": [[str(x) for x in row] for row in self.gram]}
        if self.basis is not None:
            out["basis"] = [[str(x) for x in row] for row in self.basis]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GlobalLattice":
        if "basis" in obj:
            L = cls.from_basis(obj["basis"])
            if "gram" in obj and _frac_matrix(obj["gram"]) != L.gram:
                raise ValueError("gram does not equal basis^T basis")
        else:
            L = cls(obj["gram"])
        if "rank" in obj and obj["rank"] != L.rank:
            raise DimensionMismatch(f"declared rank {obj['rank']}, found {L.rank}")
        return L


def _gram_of(basis) -> tuple[tuple[Fraction, ...], ...]:
    n_amb, n = len(basis), len(basis[0])
    return tuple(tuple(sum((basis[k][i] * basis[k][j] for k in range(n_amb)), Fraction(0))
                       for j in range(n)) for i in range(n))


def induced_column_lattices(L: GlobalLattice, local: AdaptedLattice) -> list[GlobalLattice]:
    """Global column lattices cut out by a local shape at its prime.

    Column ``j`` gets the congruence condition ``x in P^a_j``, which on
    rational vectors reads ``x in p^ceil(a_j / e) L``.
    """
    if local.shape is None:
        raise ValueError("only shape lattices induce global congruence conditions")
    p, e = local.field.p, local.field.e
    return [L.scaled(Fraction(p) ** math.ceil(a / e)) for a in local.shape]
