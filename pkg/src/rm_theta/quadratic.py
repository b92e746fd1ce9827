"""Exact integers of a real quadratic field, written ``(u + v*sqrt(D)) / 2``."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class QuadInt:
    u: int
    v: int
    D: int

    def __post_init__(self):
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise ValueError(f"D = {self.D} is not a positive non-square")
        if (self.u - self.v * self.D) % 2:
            raise ValueError(f"({self.u} + {self.v}*sqrt({self.D}))/2 is not an algebraic integer")

    @classmethod
    def rational(cls, n: int, D: int) -> "QuadInt":
        return cls(2 * n, 0, D)

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.u, -self.v, self.D)

    @property
    def trace(self) -> int:
        return self.u

    @property
    def norm(self) -> int:
        return (self.u * self.u - self.v * self.v * self.D) // 4

    def to_int(self) -> int:
        if self.v or self.u % 2:
            raise ValueError(f"{self} is not a rational integer")
        return self.u // 2

    def __float__(self):
        return (self.u + self.v * math.sqrt(self.D)) / 2

    def __add__(self, other: "QuadInt") -> "QuadInt":
        self._check(other)
        return QuadInt(self.u + other.u, self.v + other.v, self.D)

    def __mul__(self, other: "QuadInt") -> "QuadInt":
        self._check(other)
        # (u1 + v1 r)(u2 + v2 r) / 4 with r^2 = D
        u = self.u * other.u + self.v * other.v * self.D
        v = self.u * other.v + self.v * other.u
        return QuadInt(u // 2, v // 2, self.D)

    def _check(self, other):
        if not isinstance(other, QuadInt) or other.D != self.D:
            raise ValueError("quadratic integers from different fields")

    def to_json(self) -> list[int]:
        return [self.u, self.v]

    def __str__(self):
        if self.v == 0:
            return f"{self.u // 2}" if self.u % 2 == 0 else f"{self.u}/2"
        return f"({self.u}{self.v:+d}*sqrt({self.D}))/2"
