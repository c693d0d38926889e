"""Univariate polynomials over F_{q^r}, evaluated by Horner's rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GF

# degree of the zero polynomial
ZERO_DEGREE = -1


@dataclass(frozen=True)
class UniPoly:
    """a_0 + a_1 x + ... + a_k x^k with coefficients given as field codes."""

    field: GF
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return ZERO_DEGREE

    def is_zero(self) -> bool:
        return self.degree == ZERO_DEGREE

    def scale(self, c: int) -> UniPoly:
        return UniPoly(self.field, tuple(self.field.mul(c, a) for a in self.coeffs))


def evaluate(f: UniPoly, x: int) -> int:
    F = f.field
    acc = 0
    for a in reversed(f.coeffs):
        acc = F.add(F.mul(acc, x), a)
    return acc


def evaluate_many(f: UniPoly, xs) -> np.ndarray:
    F = f.field
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros_like(xs)
    for a in reversed(f.coeffs):
        acc = F.vadd(F.vmul(acc, xs), a)
    return acc


@dataclass(frozen=True)
class RootReport:
    roots: frozenset
    degree: int

    @property
    def s(self) -> int:
        return len(self.roots)

    @property
    def all_distinct(self) -> bool:
        """True when f splits into distinct linear factors over the field."""
        return len(self.roots) == self.degree


def distinct_roots_in_field(f: UniPoly) -> RootReport:
    if f.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    values = evaluate_many(f, np.arange(f.field.order))
    roots = frozenset(np.nonzero(values == 0)[0].tolist())
    return RootReport(roots=roots, degree=f.degree)


def from_roots(F: GF, roots, lead: int = 1) -> UniPoly:
    coeffs = [lead]
    for t in roots:
        # multiply by (x - t)
        nt = F.neg(t)
        shifted = [0] + coeffs
        coeffs = [F.add(shifted[i], F.mul(nt, coeffs[i]) if i < len(coeffs) else 0)
                  for i in range(len(shifted))]
    return UniPoly(F, tuple(coeffs))
