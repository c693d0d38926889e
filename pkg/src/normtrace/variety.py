"""The variety S, its transform V_{k,r}, exact point counts and bound windows."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import _numeric as num
from ._parallel import pmap
from .code import Message, code_for, encode
from .curve import NormTraceCurve, enumerate_affine
from .fields import (TowerContext, build_tower, matrix_M_row_identity_check, phi_basis_all,
                     prime_power)
from .unipoly import UniPoly, evaluate, evaluate_many


@dataclass(frozen=True, eq=False)
class VarietySpec:
    ctx: TowerContext
    f: UniPoly
    conjugate_rows: tuple[tuple[int, ...], ...] = field(repr=False)
    trace_a0: int

    @property
    def k(self) -> int:
        return len(self.f.coeffs) - 1


def make_spec(ctx: TowerContext, coeffs: Sequence[int]) -> VarietySpec:
    """coeffs = (a_0, ..., a_k) in F_{q^r}."""
    f = UniPoly(ctx.ext, tuple(coeffs))
    rows = tuple(tuple(int(ctx.frob_tables[i, a]) for i in range(ctx.r)) for a in f.coeffs[1:])
    return VarietySpec(ctx=ctx, f=f, conjugate_rows=rows, trace_a0=int(ctx.trace_table[f.coeffs[0]]))


def count_intersections(curve: NormTraceCurve, msg: Message) -> int:
    """Points (x, f(x)/b) of the curve, found through the curve's point index."""
    if msg.b == 0:
        raise ValueError("b = 0: the zero set is a union of vertical lines, count roots instead")
    F = curve.ctx.ext
    f = UniPoly(F, msg.a)
    binv = F.inv(msg.b)
    count = 0
    for x in range(F.order):
        y = F.mul(evaluate(f, x), binv)
        if (x, y) in curve.point_index:
            count += 1
    return count


def count_S_points(spec: VarietySpec) -> int:
    """#{s in F_q^r : N(Phi_B(s)) = T(f(Phi_B(s)))}, with N and T taken as
    powers and Frobenius sums of the image, not the precomputed tables."""
    ctx = spec.ctx
    E = ctx.ext
    xs = phi_basis_all(ctx)
    lhs = E.vpow(xs, (ctx.Q - 1) // (ctx.q - 1))
    fx = evaluate_many(spec.f, xs)
    rhs = np.zeros_like(fx)
    conj = fx
    for _ in range(ctx.r):
        rhs = E.vadd(rhs, conj)
        conj = E.vpow(conj, ctx.q)
    return int(np.count_nonzero(lhs == rhs))


def vkr_evaluate(spec: VarietySpec, X: Sequence[int]) -> int:
    """-prod X_i + sum_u sum_i a_u^(q^(i-1)) X_i^u + T(a_0)."""
    ctx = spec.ctx
    E = ctx.ext
    if len(X) != ctx.r:
        raise ValueError(f"expected {ctx.r} coordinates")
    prod = 1
    for xi in X:
        prod = E.mul(prod, xi)
    acc = E.add(E.neg(prod), spec.trace_a0)
    for u, row in enumerate(spec.conjugate_rows, start=1):
        for ai, xi in zip(row, X):
            acc = E.add(acc, E.mul(ai, E.pow(xi, u)))
    return acc


def vkr_evaluate_many(spec: VarietySpec, X: np.ndarray) -> np.ndarray:
    """Vectorized vkr_evaluate over the rows of an (N, r) array."""
    E = spec.ctx.ext
    X = np.asarray(X, dtype=np.int64)
    prod = np.ones(len(X), dtype=np.int64)
    for i in range(X.shape[1]):
        prod = E.vmul(prod, X[:, i])
    acc = E.vadd(E.vneg(prod), spec.trace_a0)
    for u, row in enumerate(spec.conjugate_rows, start=1):
        for i, ai in enumerate(row):
            acc = E.vadd(acc, E.vmul(ai, E.vpow(X[:, i], u)))
    return acc


def frobenius_orbits(ctx: TowerContext) -> np.ndarray:
    """Row x is (x, x^q, ..., x^(q^(r-1)))."""
    return ctx.frob_tables[:ctx.r].T.copy()


def orbit_identity_check(spec: VarietySpec) -> dict:
    """V_{k,r} on every Frobenius orbit equals T(f(x)) - N(x)."""
    ctx = spec.ctx
    E = ctx.ext
    el = np.arange(ctx.Q)
    got = vkr_evaluate_many(spec, frobenius_orbits(ctx))
    expect = E.vsub(ctx.trace_table[evaluate_many(spec.f, el)], ctx.norm_table)
    bad = np.nonzero(got != expect)[0]
    out = {"checked": int(ctx.Q), "failures": int(bad.size)}
    if bad.size:
        x = int(bad[0])
        out["counterexample"] = {"x": x, "got": int(got[x]), "expected": int(expect[x])}
    return out


def equivalence_check(spec: VarietySpec, curve: NormTraceCurve | None = None) -> dict:
    ctx = spec.ctx
    curve = curve or enumerate_affine(ctx)
    s_count = count_S_points(spec)
    inter = count_intersections(curve, Message(1, spec.f.coeffs))
    orbit_zeros = int(np.count_nonzero(vkr_evaluate_many(spec, frobenius_orbits(ctx)) == 0))
    mcheck = matrix_M_row_identity_check(ctx)
    return {
        "coeffs": list(spec.f.coeffs),
        "S_points": s_count,
        "intersections": inter,
        "V_orbit_zeros": orbit_zeros,
        "a_S_equals_intersections": s_count == inter,
        "b_V_equals_S": orbit_zeros == s_count,
        "c_matrix_identity": mcheck.passed,
        "passed": s_count == inter and orbit_zeros == s_count and mcheck.passed,
    }


def _verify_task(task) -> list[dict]:
    (p, m, r, k), coeff_rows = task
    ctx = build_tower(p, m, r)
    curve = enumerate_affine(ctx)
    code = code_for(p, m, r, k)
    out = []
    for coeffs in coeff_rows:
        spec = make_spec(ctx, coeffs)
        rep = equivalence_check(spec, curve)
        weight = encode(code, Message(1, tuple(coeffs))).weight
        rep["weight"] = weight
        rep["n_minus_weight"] = code.n - weight
        rep["orbit_identity_failures"] = orbit_identity_check(spec)["failures"]
        rep["passed"] = (rep["passed"] and rep["intersections"] == code.n - weight
                         and rep["orbit_identity_failures"] == 0)
        out.append(rep)
    return out


def random_coefficients(ctx: TowerContext, k: int, trials: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, ctx.Q, size=(trials, k + 1))


def verify_random(p: int, m: int, r: int, k: int, trials: int, seed: int, workers: int = 1) -> dict:
    """Equivalence checks for `trials` seeded random f of degree <= k."""
    ctx = build_tower(p, m, r)
    coeffs = random_coefficients(ctx, k, trials, seed)
    chunks = [((p, m, r, k), coeffs[i:i + 10].tolist()) for i in range(0, trials, 10)]
    rows = [row for part in pmap(_verify_task, chunks, workers) for row in part]
    return {"trials": trials, "passed": sum(r["passed"] for r in rows),
            "failed": sum(not r["passed"] for r in rows), "rows": rows}


# -- bound windows ---------------------------------------------------------------------

Theorem = Literal["lang_weil", "cafure_matera", "prop_general"]


@dataclass
class BoundReport:
    theorem: str
    q: int
    r: int
    k: int
    n: int
    d: int
    hypothesis_met: bool
    lower: int | None
    upper: int | None
    delta: float | None = None
    variant: str | None = None
    count: int | None = None
    holds: bool | None = None
    irreducibility_case: str | None = None
    lower_printed: int | None = None
    lower_corrected: int | None = None
    degenerate: bool = False

    def with_count(self, count: int) -> BoundReport:
        self.count = count
        lo_ok = self.lower is None or count >= self.lower
        hi_ok = self.upper is None or count <= self.upper
        self.holds = lo_ok and hi_ok
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def irreducibility_case(k: int, r: int, p: int) -> str | None:
    """Which of the three absolutely-irreducible regimes (k, r, p) falls in."""
    if k > r and k % p != 0:
        return "k>r,p!|k"
    if k == r >= 4:
        return "k=r>=4"
    if 0 < k < r:
        return "0<k<r"
    return None


def bound_window(q: int, r: int, k: int, theorem: Theorem = "cafure_matera", *,
                 C: float | None = None, variant: str = "corrected") -> BoundReport:
    """Point-count window for S (dimension r-1, degree max(k, r)) over F_q."""
    n = r - 1
    d = max(k, r)
    qq = num.mp(q)
    hyp = q > 2 * (n + 1) * d * d
    case = irreducibility_case(k, r, prime_power(q)[0])
    main = qq ** n
    if theorem == "cafure_matera":
        delta = (d - 1) * (d - 2) * qq ** (n - num.mp(1) / 2) + num.cm_constant(d) * qq ** (n - 1)
        return BoundReport("cafure_matera", q, r, k, n, d, hyp, num.floor(main - delta),
                           num.ceil(main + delta), num.as_float(delta), irreducibility_case=case)
    if theorem == "lang_weil":
        if C is None:
            raise ValueError("the Lang-Weil constant C must be supplied")
        delta = (d - 1) * (d - 2) * qq ** (n - num.mp(1) / 2) + num.mp(C) * qq ** (n - 1)
        rep = BoundReport("lang_weil", q, r, k, n, d, hyp, num.floor(main - delta),
                          num.ceil(main + delta), num.as_float(delta), irreducibility_case=case)
        rep.degenerate = rep.lower == rep.upper
        return rep
    if theorem == "prop_general":
        core = qq ** (r - 1) - (d - 1) * (d - 2) * qq ** (num.mp(2 * r - 3) / 2)
        tail = num.cm_constant(d) * qq ** (r - 2)
        printed = max(0, num.floor(core + tail))
        corrected = max(0, num.floor(core - tail))
        if variant not in ("printed", "corrected"):
            raise ValueError(f"unknown variant {variant!r}")
        lower = printed if variant == "printed" else corrected
        return BoundReport("prop_general", q, r, k, n, d, hyp, lower, None, variant=variant,
                           irreducibility_case=case, lower_printed=printed, lower_corrected=corrected,
                           degenerate=lower == 0)
    raise ValueError(f"unknown theorem {theorem!r}")


def window_check(ctx: TowerContext, coeffs: Sequence[int], theorem: Theorem = "cafure_matera",
                 **kw) -> BoundReport:
    spec = make_spec(ctx, coeffs)
    k = spec.f.degree
    return bound_window(ctx.q, ctx.r, k, theorem, **kw).with_count(count_S_points(spec))
