"""Multiplicative and additive characters of local fields, conductors, Gauss sums.

Values that are roots of unity are carried as exact phases: a
:class:`~fractions.Fraction` ``t`` in ``[0, 1)`` stands for ``exp(2*pi*i*t)``.
Floating-point complex numbers only appear when a sum is formed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .errors import (
    FieldMismatch,
    InconsistentCharacterData,
    UnramifiedCharacter,
    UnsupportedField,
    ZeroArgument,
)
from .local_fields import LocalFieldDesc, LocalFieldElement, Pair, teichmuller_unit_group

Phase = Fraction


def cis(phase: Fraction) -> complex:
    """``exp(2*pi*i*phase)``, exact on quarter turns."""
    phase = Fraction(phase) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j,
             Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if phase in exact:
        return exact[phase]
    return cmath.exp(2j * math.pi * float(phase))


def _as_pi_value(value) -> Fraction | complex:
    if isinstance(value, (Fraction, int)):
        return Fraction(value) % 1
    z = complex(value)
    if abs(abs(z) - 1) > 1e-12:
        raise InconsistentCharacterData(f"uniformizer value {z} is not of modulus one")
    return z


@dataclass(frozen=True)
class MultiplicativeCharacter:
    """A finite-order-on-units character of ``K^x``.

    ``unit_values[i]`` is the phase of the value on the i-th generator of
    ``teichmuller_unit_group(field, conductor_exponent)``; ``pi_value`` is
    the value on the uniformizer, either an exact phase or a complex number
    of modulus one.
    """

    field: LocalFieldDesc
    conductor_exponent: int
    unit_values: tuple[Fraction, ...] = ()
    pi_value: Fraction | complex = Fraction(0)

    def __post_init__(self):
        c = self.conductor_exponent
        object.__setattr__(self, "unit_values", tuple(Fraction(t) % 1 for t in self.unit_values))
        object.__setattr__(self, "pi_value", _as_pi_value(self.pi_value))
        if c < 0:
            raise InconsistentCharacterData("conductor exponent must be >= 0")
        if c == 0:
            if self.unit_values:
                raise InconsistentCharacterData("an unramified character has no unit values")
            return
        G = teichmuller_unit_group(self.field, c)
        _check_homomorphism(G.orders, self.unit_values)
        if conductor(self.field, c, self.unit_values) != c:
            raise InconsistentCharacterData(
                f"data is trivial below level {c}; build it with character_from_values")

    # -- evaluation -----------------------------------------------------
    @property
    def exact(self) -> bool:
        return isinstance(self.pi_value, Fraction)

    def unit_phase(self, u) -> Fraction:
        """Phase of the value on a unit (element or residue pair mod P^c)."""
        c = self.conductor_exponent
        if c == 0:
            return Fraction(0)
        G = teichmuller_unit_group(self.field, c)
        exps = G.dlog(u)
        return sum((e * t for e, t in zip(exps, self.unit_values)), Fraction(0)) % 1

    def _coerce(self, x) -> LocalFieldElement:
        if isinstance(x, LocalFieldElement):
            if x.field != self.field:
                raise FieldMismatch(f"argument in {x.field}, character on {self.field}")
            return x
        return self.field.coerce(x)

    def phase(self, x) -> Fraction:
        """Exact phase of ``chi(x)``; needs an exact uniformizer value unless ``v(x) = 0``."""
        x = self._coerce(x)
        if x.is_zero():
            raise ZeroArgument("characters are not defined at 0")
        v = x.valuation
        ph = self.unit_phase(x.unit) if self.conductor_exponent else Fraction(0)
        if v == 0:
            return ph
        if not self.exact:
            raise ValueError("uniformizer value is not an exact root of unity")
        return (ph + v * self.pi_value) % 1

    def __call__(self, x) -> complex:
        x = self._coerce(x)
        if x.is_zero():
            raise ZeroArgument("characters are not defined at 0")
        if self.exact or x.valuation == 0:
            return cis(self.phase(x))
        return self.pi_value ** x.valuation * cis(self.unit_phase(x.unit))

    def value_at_uniformizer(self) -> complex:
        return cis(self.pi_value) if self.exact else self.pi_value

    def sign(self) -> int:
        """``chi(-1)``, always +1 or -1."""
        ph = self.phase(self.field.element(-1))
        return 1 if ph == 0 else -1

    def conjugate(self) -> "MultiplicativeCharacter":
        pi = (-self.pi_value) % 1 if self.exact else self.pi_value.conjugate()
        return MultiplicativeCharacter(self.field, self.conductor_exponent,
                                       tuple(-t for t in self.unit_values), pi)

    def is_trivial_on_units(self) -> bool:
        return self.conductor_exponent == 0

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        c = self.conductor_exponent
        orders = teichmuller_unit_group(self.field, c).orders if c else ()
        if self.exact:
            pi = [self.pi_value.denominator, self.pi_value.numerator]
        else:
            pi = {"re": self.pi_value.real, "im": self.pi_value.imag}
        return {
            "field": self.field.to_json(),
            "c": c,
            "unit_exponents": [[m, int(t * m)] for m, t in zip(orders, self.unit_values)],
            "pi_value": pi,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiplicativeCharacter":
        """Read a character; without ``"c"`` the ``"level"`` key says which
        unit group the exponents refer to and the conductor is computed."""
        field = LocalFieldDesc.from_json(obj["field"])
        phases = []
        for pair in obj.get("unit_exponents", []):
            m, k = pair
            if m <= 0:
                raise InconsistentCharacterData(f"bad root-of-unity order {m}")
            phases.append(Fraction(k, m))
        pi = obj.get("pi_value", [1, 0])
        if isinstance(pi, dict):
            pi = complex(pi.get("re", 0.0), pi.get("im", 0.0))
        else:
            m, k = pi
            pi = Fraction(k, m)
        if "c" in obj:
            return cls(field, obj["c"], tuple(phases), pi)
        return character_from_values(field, obj["level"], phases, pi)


def _check_homomorphism(orders, phases) -> None:
    if len(orders) != len(phases):
        raise InconsistentCharacterData(
            f"{len(phases)} values given for {len(orders)} generators")
    for m, t in zip(orders, phases):
        if (Fraction(t) * m).denominator != 1:
            raise InconsistentCharacterData(
                f"value exp(2 pi i {t}) on a generator of order {m} is not an {m}-th root of unity")


def conductor(field: LocalFieldDesc, level: int, unit_values) -> int:
    """Minimal ``c`` such that the character is trivial on ``1 + P^c``.

    ``unit_values`` are phases on the generators of
    ``teichmuller_unit_group(field, level)``.  Trivial restrictions are tested
    from the top level downward.
    """
    phases = [Fraction(t) % 1 for t in unit_values]
    G = teichmuller_unit_group(field, level)
    _check_homomorphism(G.orders, phases)
    if all(t == 0 for t in phases):
        return 0

    def phase_of(u: Pair) -> Fraction:
        return sum((e * t for e, t in zip(G.dlog(u), phases)), Fraction(0)) % 1

    c = level
    while c > 1 and all(phase_of(h) == 0 for h in G.one_unit_generators(c - 1)):
        c -= 1
    return c


def character_from_values(field: LocalFieldDesc, level: int, unit_values,
                          pi_value=Fraction(0)) -> MultiplicativeCharacter:
    """Character given by values on generators mod ``P^level``, in reduced form."""
    phases = [Fraction(t) % 1 for t in unit_values]
    c = conductor(field, level, phases)
    if c == 0:
        return MultiplicativeCharacter(field, 0, (), pi_value)
    G = teichmuller_unit_group(field, level)
    Gc = teichmuller_unit_group(field, c)

    def phase_of(u: Pair) -> Fraction:
        return sum((e * t for e, t in zip(G.dlog(u), phases)), Fraction(0)) % 1

    return MultiplicativeCharacter(field, c, tuple(phase_of(g) for g in Gc.generator_pairs), pi_value)


def trivial_character(field: LocalFieldDesc, pi_value=Fraction(0)) -> MultiplicativeCharacter:
    return MultiplicativeCharacter(field, 0, (), pi_value)


def quadratic_character(field: LocalFieldDesc, pi_value=Fraction(0)) -> MultiplicativeCharacter:
    """The quadratic residue character of the residue field, lifted to ``K^x``."""
    if field.p == 2:
        raise UnsupportedField("no tame quadratic character when p = 2")
    return MultiplicativeCharacter(field, 1, (Fraction(1, 2),), pi_value)


def all_characters(field: LocalFieldDesc, level: int,
                   pi_value=Fraction(0)) -> Iterator[tuple[tuple[Fraction, ...], MultiplicativeCharacter]]:
    """Every character of ``(O / P^level)^x`` as (raw level data, reduced character)."""
    G = teichmuller_unit_group(field, level)
    for ks in product(*(range(m) for m in G.orders)):
        phases = tuple(Fraction(k, m) for k, m in zip(ks, G.orders))
        yield phases, character_from_values(field, level, phases, pi_value)


@dataclass(frozen=True)
class AdditiveCharacter:
    """``psi(x) = exp(2*pi*i*{x * p^-level}_p)`` on ``Q_p``.

    At level 0 it is trivial on ``Z_p`` and nontrivial on ``p^-1 Z_p``.
    """

    field: LocalFieldDesc
    level: int = 0

    def __post_init__(self):
        if self.field.kind != "base":
            raise UnsupportedField("additive characters are implemented on Q_p only")

    def phase(self, x) -> Fraction:
        x = self.field.coerce(x)
        if x.is_zero():
            return Fraction(0)
        p = self.field.p
        v = x.valuation - self.level
        if v >= 0:
            return Fraction(0)
        k = -v
        if k > x.prec:
            raise ValueError("not enough digits to evaluate the fractional part")
        return Fraction(x.unit[0] % p ** k, p ** k)

    def __call__(self, x) -> complex:
        return cis(self.phase(x))


def standard_additive_character(field: LocalFieldDesc) -> AdditiveCharacter:
    return AdditiveCharacter(field, 0)


def gauss_sum(chi: MultiplicativeCharacter, psi: AdditiveCharacter | None = None) -> complex:
    """``G(chi, psi) = sum over u in (Z/p^c)^x of chi(u) psi(u / p^c)``."""
    field = chi.field
    if field.kind != "base":
        raise UnsupportedField("Gauss sums are implemented over Q_p only")
    if psi is None:
        psi = AdditiveCharacter(field, 0)
    if psi.field != field:
        raise FieldMismatch("characters on different fields")
    if psi.level != 0:
        raise ValueError("Gauss sums use the level-0 additive character")
    c = chi.conductor_exponent
    if c == 0:
        raise UnramifiedCharacter("no Gauss sum for an unramified character")
    p = field.p
    N = p ** c
    re, im = [], []
    for u in range(1, N):
        if u % p == 0:
            continue
        z = cis(chi.unit_phase((u, 0)) + Fraction(u, N))
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def eval_char(chi: MultiplicativeCharacter, x) -> complex:
    return chi(x)
