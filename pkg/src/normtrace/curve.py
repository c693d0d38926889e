"""Affine points of the Norm-Trace curve N(x) = T(y), and the projective
Hermitian curve for r = 2."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import FieldError, TowerContext


@dataclass(frozen=True, eq=False)
class NormTraceCurve:
    ctx: TowerContext
    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)
    point_index: dict = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def affine_points(self) -> list[tuple[int, int]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def __len__(self) -> int:
        return len(self.xs)


def trace_fibers(ctx: TowerContext) -> dict[int, np.ndarray]:
    """Map each trace value (an element of the embedded F_q) to its sorted fiber."""
    T = ctx.trace_table
    order = np.argsort(T, kind="stable")
    values, starts = np.unique(T[order], return_index=True)
    bounds = list(starts) + [len(order)]
    return {int(v): order[bounds[i]:bounds[i + 1]] for i, v in enumerate(values)}


def enumerate_affine(ctx: TowerContext) -> NormTraceCurve:
    """All (x, y) with N(x) = T(y), ordered by x then y."""
    fibers = trace_fibers(ctx)
    empty = np.empty(0, dtype=np.int64)
    xs, ys = [], []
    for x in range(ctx.Q):
        fib = fibers.get(int(ctx.norm_table[x]), empty)
        xs.append(np.full(len(fib), x, dtype=np.int64))
        ys.append(fib)
    xs = np.concatenate(xs)
    ys = np.concatenate(ys).astype(np.int64)
    index = {(int(x), int(y)): i for i, (x, y) in enumerate(zip(xs.tolist(), ys.tolist()))}
    return NormTraceCurve(ctx=ctx, xs=xs, ys=ys, point_index=index)


def contains(curve: NormTraceCurve, x: int, y: int) -> bool:
    ctx = curve.ctx
    return bool(ctx.norm_table[x] == ctx.trace_table[y])


def hermitian_equation_holds(ctx: TowerContext, x, y):
    """x^(q+1) == y^q + y, vectorized."""
    E = ctx.ext
    q = ctx.q
    return E.vpow(x, q + 1) == E.vadd(E.vpow(y, q), y)


def hermitian_projective_points(ctx: TowerContext) -> list[tuple[int, int, int]]:
    """Points of X^(q+1) = Y^q Z + Y Z^q in P^2(F_{q^2}); the point at infinity is last."""
    if ctx.r != 2:
        raise FieldError("the Hermitian curve needs r = 2")
    curve = enumerate_affine(ctx)
    pts = [(x, y, 1) for x, y in curve.affine_points]
    pts.append((0, 1, 0))
    return pts


def projective_hermitian_contains(ctx: TowerContext, X: int, Y: int, Z: int) -> bool:
    E = ctx.ext
    q = ctx.q
    lhs = E.pow(X, q + 1)
    rhs = E.add(E.mul(E.pow(Y, q), Z), E.mul(Y, E.pow(Z, q)))
    return lhs == rhs
