"""Conics of P^2(F_{q^2}), q odd, against the Hermitian curve X^(q+1) = Y^q Z + Y Z^q.

A conic is c0 X^2 + c1 Y^2 + c2 Z^2 + c3 XY + c4 XZ + c5 YZ. Projective classes
are represented with the first nonzero coefficient equal to 1 and indexed
block by block (position of that 1), with c5 the fastest-varying digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from ._parallel import pmap
from .curve import enumerate_affine
from .fields import FieldError, TowerContext, build_tower, nullspace, prime_power, rank
from .minimal import kernel_dimension

KINDS = ("irreducible", "repeated_line", "two_rational_lines", "two_conjugate_lines")
CASES = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "conj")
SURVEY_CAP = 1 << 26
# prefixes handled per exhaustive work unit (each prefix covers Q conics)
_PREFIX_CHUNK = 2048
_SAMPLE_CHUNK = 4096


class ConicError(ValueError):
    pass


def _require_odd_hermitian(ctx: TowerContext) -> None:
    if ctx.r != 2:
        raise ConicError("conic analysis needs r = 2")
    if ctx.p == 2:
        raise ConicError("conic classification needs q odd")


@dataclass(frozen=True)
class Conic:
    coeffs: tuple[int, ...]
    gram: tuple[tuple[int, ...], ...] = field(repr=False)
    kind: str
    rank: int
    lines: tuple[tuple[int, int, int], ...] | None = None
    singular_point: tuple[int, int, int] | None = None


@dataclass(frozen=True)
class PatternReport:
    projective_size: int
    affine_size: int
    compatible_patterns: tuple[str, ...]
    line_types: tuple[str, ...] | None = None

    @property
    def violation(self) -> bool:
        return not self.compatible_patterns


@dataclass(frozen=True, eq=False)
class HermitianData:
    ctx: TowerContext
    points: np.ndarray          # (N, 3) projective points, (0:1:0) last
    monomials: np.ndarray       # (6, N) values of X^2, Y^2, Z^2, XY, XZ, YZ
    affine_generator: np.ndarray  # (6, q^3) rows 1, x, y, x^2, xy, y^2
    affine_rank: int

    @property
    def n_projective(self) -> int:
        return len(self.points)


@lru_cache(maxsize=8)
def hermitian_data(ctx: TowerContext) -> HermitianData:
    _require_odd_hermitian(ctx)
    E = ctx.ext
    curve = enumerate_affine(ctx)
    X = np.concatenate([curve.xs, [0]])
    Y = np.concatenate([curve.ys, [1]])
    Z = np.concatenate([np.ones(curve.n, dtype=np.int64), [0]])
    pts = np.stack([X, Y, Z], axis=1)
    mon = np.stack([E.vmul(X, X), E.vmul(Y, Y), E.vmul(Z, Z),
                    E.vmul(X, Y), E.vmul(X, Z), E.vmul(Y, Z)])
    x, y = curve.xs, curve.ys
    G = np.stack([np.ones_like(x), x, y, E.vmul(x, x), E.vmul(x, y), E.vmul(y, y)])
    return HermitianData(ctx, pts, mon, G, rank(E, G))


def _data_for(p: int, m: int) -> HermitianData:
    return hermitian_data(build_tower(p, m, 2))


def normalize_line(E, line) -> tuple[int, int, int]:
    line = [int(v) for v in line]
    lead = next(v for v in line if v)
    inv = E.inv(lead)
    return tuple(E.mul(v, inv) for v in line)


def cross(E, u, v) -> tuple[int, int, int]:
    return (E.sub(E.mul(u[1], v[2]), E.mul(u[2], v[1])),
            E.sub(E.mul(u[2], v[0]), E.mul(u[0], v[2])),
            E.sub(E.mul(u[0], v[1]), E.mul(u[1], v[0])))


def conic_value(E, coeffs, P) -> int:
    X, Y, Z = P
    mons = (E.mul(X, X), E.mul(Y, Y), E.mul(Z, Z), E.mul(X, Y), E.mul(X, Z), E.mul(Y, Z))
    acc = 0
    for c, mo in zip(coeffs, mons):
        acc = E.add(acc, E.mul(c, mo))
    return acc


def gram_matrix(ctx: TowerContext, coeffs) -> tuple[tuple[int, ...], ...]:
    E = ctx.ext
    c0, c1, c2, c3, c4, c5 = (int(c) for c in coeffs)
    h = E.inv(E.add(1, 1))
    return ((c0, E.mul(c3, h), E.mul(c4, h)),
            (E.mul(c3, h), c1, E.mul(c5, h)),
            (E.mul(c4, h), E.mul(c5, h), c2))


def classify_conic(ctx: TowerContext, coeffs) -> Conic:
    """Kind from the rank of the Gram matrix; component lines for rank <= 2."""
    _require_odd_hermitian(ctx)
    E = ctx.ext
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != 6:
        raise ConicError("a conic has six coefficients")
    if not any(coeffs):
        raise ConicError("the zero form is not a conic")
    gram = gram_matrix(ctx, coeffs)
    rk = rank(E, gram)
    if rk == 3:
        return Conic(coeffs, gram, "irreducible", 3)
    if rk == 1:
        row = next(r for r in gram if any(r))
        line = normalize_line(E, row)
        return Conic(coeffs, gram, "repeated_line", 1, (line, line))

    (P,) = nullspace(E, gram)
    P = tuple(int(v) for v in P)
    lead = next(i for i in range(3) if P[i])
    U, V = [tuple(int(i == j) for j in range(3)) for i in range(3) if i != lead]
    a = conic_value(E, coeffs, U)
    c = conic_value(E, coeffs, V)
    UV = tuple(E.add(u, v) for u, v in zip(U, V))
    b = E.sub(E.sub(conic_value(E, coeffs, UV), a), c)
    disc = E.sub(E.mul(b, b), E.mul(E.add(E.add(a, a), E.add(a, a)), c))
    root = E.sqrt(disc)
    if root is None:
        return Conic(coeffs, gram, "two_conjugate_lines", 2, None, P)
    if a == 0:
        params = [(1, 0), (E.neg(c), b)]
    else:
        two_a = E.add(a, a)
        params = [(E.div(E.sub(E.neg(b), root), two_a), 1), (E.div(E.add(E.neg(b), root), two_a), 1)]
    lines = []
    for s, t in params:
        R = tuple(E.add(E.mul(s, u), E.mul(t, v)) for u, v in zip(U, V))
        lines.append(normalize_line(E, cross(E, P, R)))
    return Conic(coeffs, gram, "two_rational_lines", 2, tuple(sorted(lines)), P)


@lru_cache(maxsize=None)
def line_points(ctx: TowerContext, line: tuple[int, int, int]) -> frozenset:
    """Indices (into hermitian_data(ctx).points) of Hermitian points on the line."""
    E = ctx.ext
    H = hermitian_data(ctx)
    P = H.points
    val = E.vadd(E.vadd(E.vmul(line[0], P[:, 0]), E.vmul(line[1], P[:, 1])), E.vmul(line[2], P[:, 2]))
    return frozenset(np.nonzero(val == 0)[0].tolist())


def line_type(ctx: TowerContext, line) -> str:
    _require_odd_hermitian(ctx)
    line = normalize_line(ctx.ext, line)
    size = len(line_points(ctx, line))
    if size == 1:
        return "tangent"
    if size == ctx.q + 1:
        return "secant"
    raise AssertionError(f"line {line} meets the Hermitian curve in {size} points")


def all_lines(ctx: TowerContext) -> list[tuple[int, int, int]]:
    Q = ctx.Q
    out = [(1, b, c) for b in range(Q) for c in range(Q)]
    out += [(0, 1, c) for c in range(Q)]
    out.append((0, 0, 1))
    return out


def intersection_sizes(ctx: TowerContext, conic: Conic) -> tuple[int, int]:
    """(|H cap C| in P^2, the same count without the point (0:1:0))."""
    E = ctx.ext
    H = hermitian_data(ctx)
    vals = np.zeros(H.n_projective, dtype=np.int64)
    for c, mon in zip(conic.coeffs, H.monomials):
        vals = E.vadd(vals, E.vmul(c, mon))
    zero = vals == 0
    return int(zero.sum()), int(zero[:-1].sum())


# -- pattern catalogs --------------------------------------------------------------------

def _range_vii(q: int) -> tuple[int, int]:
    """Integer range [q - 2 sqrt(q) + 2, q + 2 sqrt(q) + 2], exactly."""
    def at_least(s):  # s >= q + 2 - 2 sqrt(q)
        t = q + 2 - s
        return t <= 0 or t * t <= 4 * q

    def at_most(s):  # s <= q + 2 + 2 sqrt(q)
        t = s - q - 2
        return t <= 0 or t * t <= 4 * q

    lo = 0
    while not at_least(lo):
        lo += 1
    hi = q + 2
    while at_most(hi + 1):
        hi += 1
    return lo, hi


def catalog(q: int) -> dict[str, tuple[str, frozenset]]:
    """Case label -> (conic kind, admissible projective intersection sizes)."""
    lo, hi = _range_vii(q)
    return {
        "i": ("irreducible", frozenset({0})),
        "ii": ("irreducible", frozenset({1})),
        "iii": ("irreducible", frozenset({2})),
        "iv": ("irreducible", frozenset({q + 1})),
        "v": ("irreducible", frozenset({2 * q, 2 * q + 1, 2 * q + 2})),
        "vi": ("irreducible", frozenset({q, q + 1, q + 2})),
        "vii": ("irreducible", frozenset(range(lo, hi + 1))),
        "viii": ("repeated_line", frozenset({1, q + 1})),
        "ix": ("two_rational_lines", frozenset({2})),
        "x": ("two_rational_lines", frozenset({q + 1, q + 2})),
        "xi": ("two_rational_lines", frozenset({2 * q + 1, 2 * q + 2})),
        "conj": ("two_conjugate_lines", frozenset({0, 1})),
    }


# line types each reducible case requires
_CASE_LINES = {
    "viii": {("secant", "secant"), ("tangent", "tangent")},
    "ix": {("tangent", "tangent")},
    "x": {("secant", "tangent")},
    "xi": {("secant", "secant")},
}
_VIII_SIZE = {"tangent": lambda q: 1, "secant": lambda q: q + 1}


def pattern_match(ctx: TowerContext, conic: Conic, sizes: tuple[int, int]) -> PatternReport:
    q = ctx.q
    proj, aff = sizes
    types = None
    if conic.lines is not None:
        types = tuple(sorted(line_type(ctx, ln) for ln in conic.lines))
    found = []
    for case, (kind, allowed) in catalog(q).items():
        if kind != conic.kind or proj not in allowed:
            continue
        if types is not None and case in _CASE_LINES:
            if types not in _CASE_LINES[case]:
                continue
            if case == "viii" and proj != _VIII_SIZE[types[0]](q):
                continue
        found.append(case)
    return PatternReport(proj, aff, tuple(found), types)


def prop53_minimality_predicate(ctx: TowerContext, conic: Conic, sizes: tuple[int, int]) -> bool:
    """Whether the conic's intersection pattern is one of (iv), (v), (vi), (vii), (xi)."""
    q = ctx.q
    if q % 2 == 0 or q <= 7:
        raise ConicError("the minimality criterion is stated for odd q > 7")
    if conic.kind == "irreducible":
        return sizes[0] > 4
    if conic.kind == "two_rational_lines":
        return all(line_type(ctx, ln) == "secant" for ln in conic.lines) and conic.lines[0] != conic.lines[1]
    return False


def analyse(ctx: TowerContext, coeffs) -> dict:
    """classify_conic + intersection_sizes + pattern_match for one conic."""
    conic = classify_conic(ctx, coeffs)
    sizes = intersection_sizes(ctx, conic)
    pat = pattern_match(ctx, conic, sizes)
    return {"coeffs": list(conic.coeffs), "kind": conic.kind, "rank": conic.rank,
            "lines": [list(ln) for ln in conic.lines] if conic.lines else None,
            "line_types": list(pat.line_types) if pat.line_types else None,
            "projective_size": sizes[0], "affine_size": sizes[1],
            "compatible_patterns": list(pat.compatible_patterns), "violation": pat.violation}


# -- class indexing ------------------------------------------------------------------------

def class_count(Q: int) -> int:
    return (Q**6 - 1) // (Q - 1)


def decode_classes(Q: int, idx) -> np.ndarray:
    """Coefficient vectors of the projective classes with the given indices."""
    idx = np.asarray(idx, dtype=np.int64)
    out = np.zeros((len(idx), 6), dtype=np.int64)
    start = 0
    for lead in range(6):
        size = Q ** (5 - lead)
        sel = (idx >= start) & (idx < start + size)
        off = idx[sel] - start
        block = np.zeros((sel.sum(), 6), dtype=np.int64)
        block[:, lead] = 1
        for pos in range(5, lead, -1):
            block[:, pos] = off % Q
            off //= Q
        out[sel] = block
        start += size
    return out


# -- vectorized kernels ---------------------------------------------------------------------

_KIND_CODE = {k: i for i, k in enumerate(KINDS)}


def _kinds(E, c0, c1, c2, c3, c4, c5) -> np.ndarray:
    """Kind codes from twice the Gram matrix, elementwise over broadcast arrays."""
    m00, m11, m22 = E.vadd(c0, c0), E.vadd(c1, c1), E.vadd(c2, c2)
    m01, m02, m12 = c3, c4, c5
    mul, sub = E.vmul, E.vsub
    a00 = sub(mul(m11, m22), mul(m12, m12))
    a11 = sub(mul(m00, m22), mul(m02, m02))
    a22 = sub(mul(m00, m11), mul(m01, m01))
    a01 = sub(mul(m02, m12), mul(m01, m22))
    a02 = sub(mul(m01, m12), mul(m02, m11))
    a12 = sub(mul(m01, m02), mul(m00, m12))
    det = E.vadd(E.vadd(mul(m00, a00), mul(m01, a01)), mul(m02, a02))
    rank1 = (a00 == 0) & (a11 == 0) & (a22 == 0) & (a01 == 0) & (a02 == 0) & (a12 == 0)
    diag = np.where(a00 != 0, a00, np.where(a11 != 0, a11, a22))
    neg = E.vneg(diag)
    square = (E.log[neg] % 2 == 0) & (neg != 0)
    kinds = np.where(det != 0, 0, np.where(rank1, 1, np.where(square, 2, 3)))
    return kinds


def _irreducible_allowed(q: int, n_proj: int) -> np.ndarray:
    allowed = np.zeros(n_proj + 1, dtype=bool)
    for case, (kind, sizes) in catalog(q).items():
        if kind == "irreducible":
            for s in sizes:
                if s <= n_proj:
                    allowed[s] = True
    return allowed


def _reducible_rows(ctx: TowerContext, coeff_rows, proj, aff, kinds, base_index) -> tuple[dict, list]:
    """Per-conic classification of the reducible conics of a block."""
    tally: dict = {}
    violations = []
    for i, coeffs in enumerate(coeff_rows):
        conic = classify_conic(ctx, coeffs)
        expect_kind = KINDS[int(kinds[i])]
        sizes = (int(proj[i]), int(aff[i]))
        pat = pattern_match(ctx, conic, sizes)
        size_by_lines = None
        if conic.lines is not None:
            pts = line_points(ctx, conic.lines[0]) | line_points(ctx, conic.lines[1])
            size_by_lines = len(pts)
        key = (conic.kind, pat.line_types, sizes[0])
        tally[key] = tally.get(key, 0) + 1
        problems = []
        if conic.kind != expect_kind:
            problems.append(f"kind mismatch: vectorized {expect_kind}, direct {conic.kind}")
        if size_by_lines is not None and size_by_lines != sizes[0]:
            problems.append(f"size mismatch: counted {sizes[0]}, from lines {size_by_lines}")
        if pat.violation:
            problems.append("no compatible pattern")
        if problems:
            violations.append({"class_index": int(base_index[i]), "coeffs": list(map(int, coeffs)),
                               "kind": conic.kind, "projective_size": sizes[0],
                               "line_types": pat.line_types, "problems": problems})
    return tally, violations


@dataclass
class _Partial:
    hist: dict = field(default_factory=dict)
    reducible: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    through_infinity: int = 0
    surveyed: int = 0
    prop53: dict = field(default_factory=dict)
    prop53_affine: dict = field(default_factory=dict)
    disagreements: list = field(default_factory=list)

    def merge(self, other: _Partial) -> None:
        for src, dst in ((other.hist, self.hist), (other.reducible, self.reducible),
                         (other.prop53, self.prop53), (other.prop53_affine, self.prop53_affine)):
            for key, v in src.items():
                dst[key] = dst.get(key, 0) + v
        self.violations.extend(other.violations)
        self.disagreements.extend(other.disagreements)
        self.through_infinity += other.through_infinity
        self.surveyed += other.surveyed


def _tally_block(ctx, part: _Partial, coeffs, proj, aff, kinds, index) -> None:
    q = ctx.q
    H = hermitian_data(ctx)
    allowed = _irreducible_allowed(q, H.n_projective)
    codes, counts = np.unique(kinds * (H.n_projective + 1) + proj, return_counts=True)
    for code, cnt in zip(codes.tolist(), counts.tolist()):
        key = (KINDS[code // (H.n_projective + 1)], code % (H.n_projective + 1))
        part.hist[key] = part.hist.get(key, 0) + cnt
    part.through_infinity += int(np.count_nonzero(proj != aff))
    part.surveyed += len(kinds)
    bad_irr = np.nonzero((kinds == 0) & ~allowed[proj])[0]
    bad_conj = np.nonzero((kinds == 3) & (proj > 1))[0]
    for i in np.concatenate([bad_irr, bad_conj]).tolist():
        part.violations.append({"class_index": int(index[i]), "coeffs": coeffs[i].tolist(),
                                "kind": KINDS[int(kinds[i])], "projective_size": int(proj[i]),
                                "problems": ["size outside catalog"]})
    red = np.nonzero((kinds == 1) | (kinds == 2))[0]
    tally, viol = _reducible_rows(ctx, coeffs[red], proj[red], aff[red], kinds[red], index[red])
    for key, v in tally.items():
        part.reducible[key] = part.reducible.get(key, 0) + v
    part.violations.extend(viol)


def _exhaustive_block(task) -> _Partial:
    """Conics with leading 1 at position `lead` and prefix index in [start, stop).

    c5 is resolved analytically: on affine points with y != 0 the conic
    vanishes iff c5 = -u / y where u is the value of the other five terms.
    """
    p, m, lead, start, stop = task
    ctx = build_tower(p, m, 2)
    E = ctx.ext
    Q = E.order
    H = hermitian_data(ctx)
    nfree = 4 - lead
    pre = np.arange(start, stop, dtype=np.int64)
    B = len(pre)
    cols = np.zeros((B, 5), dtype=np.int64)
    cols[:, lead] = 1
    off = pre.copy()
    for pos in range(4, lead, -1):
        cols[:, pos] = off % Q
        off //= Q
    del nfree

    mon = H.monomials[:, :-1]
    u = np.zeros((B, mon.shape[1]), dtype=np.int64)
    for j in range(5):
        u = E.vadd(u, E.vmul(cols[:, j:j + 1], mon[j][None, :]))
    y = mon[5]
    live = y != 0
    t = E.vneg(E.vmul(u[:, live], E.vinv(y[live])[None, :]))
    flat = (np.arange(B, dtype=np.int64)[:, None] * Q + t).ravel()
    aff = np.bincount(flat, minlength=B * Q).reshape(B, Q)
    aff += np.count_nonzero(u[:, ~live] == 0, axis=1)[:, None]
    c5 = np.arange(Q, dtype=np.int64)[None, :]
    proj = aff + (cols[:, 1] == 0)[:, None]
    kinds = _kinds(E, *[cols[:, j:j + 1] for j in range(5)], c5)

    coeffs = np.concatenate([np.repeat(cols, Q, axis=0), np.tile(np.arange(Q), B)[:, None]], axis=1)
    block_start = sum(Q ** (5 - j) for j in range(lead))
    index = block_start + np.repeat(pre * Q, Q) + np.tile(np.arange(Q), B)
    part = _Partial()
    _tally_block(ctx, part, coeffs, proj.ravel(), aff.ravel(), kinds.ravel(), index)
    return part


def evaluate_conics(ctx: TowerContext, coeffs: np.ndarray) -> np.ndarray:
    """Values of each conic (rows of coeffs) at every projective Hermitian point."""
    E = ctx.ext
    H = hermitian_data(ctx)
    vals = np.zeros((len(coeffs), H.n_projective), dtype=np.int64)
    for j in range(6):
        vals = E.vadd(vals, E.vmul(coeffs[:, j:j + 1], H.monomials[j][None, :]))
    return vals


@dataclass(frozen=True, eq=False)
class _AffineCode:
    field: object
    generator: np.ndarray
    measured_dimension: int


def _direct_block(task) -> _Partial:
    """Direct evaluation of explicitly listed classes (sampled mode)."""
    p, m, index, validate = task
    ctx = build_tower(p, m, 2)
    E = ctx.ext
    H = hermitian_data(ctx)
    coeffs = decode_classes(E.order, index)
    zero = evaluate_conics(ctx, coeffs) == 0
    proj = zero.sum(axis=1)
    aff = zero[:, :-1].sum(axis=1)
    kinds = _kinds(E, *[coeffs[:, j] for j in range(6)])
    part = _Partial()
    _tally_block(ctx, part, coeffs, proj, aff, kinds, index)
    if validate:
        code = _AffineCode(E, H.affine_generator, H.affine_rank)
        for i in range(len(coeffs)):
            conic = classify_conic(ctx, coeffs[i])
            sizes = (int(proj[i]), int(aff[i]))
            predicted = prop53_minimality_predicate(ctx, conic, sizes)
            zmask = zero[i, :-1]
            kdim = kernel_dimension(code, (~zmask).astype(np.int64))
            oracle = kdim == 1
            key = (predicted, oracle)
            part.prop53[key] = part.prop53.get(key, 0) + 1
            # same predicate fed affine sizes, since the code only sees affine points
            affine_pred = prop53_minimality_predicate(ctx, conic, (sizes[1], sizes[1]))
            key = (affine_pred, oracle)
            part.prop53_affine[key] = part.prop53_affine.get(key, 0) + 1
            if predicted != oracle:
                part.disagreements.append({
                    "class_index": int(index[i]), "coeffs": coeffs[i].tolist(), "kind": conic.kind,
                    "lines": [list(ln) for ln in conic.lines] if conic.lines else None,
                    "projective_size": sizes[0], "affine_size": sizes[1],
                    "through_infinity": sizes[0] != sizes[1], "kernel_dimension": int(kdim),
                    "predicate": predicted, "predicate_affine_sizes": affine_pred,
                    "oracle_minimal": oracle})
    return part


def survey(ctx: TowerContext, mode: Literal["exhaustive", "sampled"] = "exhaustive",
           samples: int = 100_000, seed: int = 0, workers: int = 1,
           validate_prop53: bool = False, cap: int = SURVEY_CAP) -> dict:
    _require_odd_hermitian(ctx)
    E = ctx.ext
    Q = E.order
    total = class_count(Q)
    p, m = ctx.p, ctx.m
    if validate_prop53 and (ctx.q <= 7):
        raise ConicError("validation of the minimality criterion needs q > 7")
    if mode == "exhaustive":
        if total > cap:
            raise ConicError(f"{total} conic classes exceed the exhaustive cap {cap}")
        if validate_prop53:
            tasks = [(p, m, np.arange(s, min(s + _SAMPLE_CHUNK, total)), True)
                     for s in range(0, total, _SAMPLE_CHUNK)]
            parts = pmap(_direct_block, tasks, workers)
        else:
            tasks = []
            for lead in range(5):
                n_pre = Q ** (4 - lead)
                tasks += [(p, m, lead, s, min(s + _PREFIX_CHUNK, n_pre)) for s in range(0, n_pre, _PREFIX_CHUNK)]
            parts = pmap(_exhaustive_block, tasks, workers)
            parts.append(_direct_block((p, m, np.array([total - 1]), False)))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        n = min(samples, total)
        index = np.sort(rng.choice(total, size=n, replace=False))
        tasks = [(p, m, index[s:s + _SAMPLE_CHUNK], validate_prop53) for s in range(0, n, _SAMPLE_CHUNK)]
        parts = pmap(_direct_block, tasks, workers)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    acc = _Partial()
    for part in parts:
        acc.merge(part)
    return _report(ctx, mode, total, acc, validate_prop53)


def _report(ctx: TowerContext, mode: str, total: int, acc: _Partial, validate: bool) -> dict:
    q = ctx.q
    lo, hi = _range_vii(q)
    report = {
        "q": q,
        "mode": mode,
        "classes_total": total,
        "classes_surveyed": acc.surveyed,
        "histogram": [{"kind": k, "size": s, "count": c} for (k, s), c in
                      sorted(acc.hist.items(), key=lambda kv: (KINDS.index(kv[0][0]), kv[0][1]))],
        "reducible_line_types": [
            {"kind": k, "line_types": list(t) if t else None, "size": s, "count": c}
            for (k, t, s), c in sorted(acc.reducible.items(), key=lambda kv: (kv[0][0], kv[0][1] or (), kv[0][2]))],
        "through_infinity": acc.through_infinity,
        "catalog": {case: {"kind": kind, "sizes": sorted(sizes)} for case, (kind, sizes) in catalog(q).items()},
        "range_vii": [lo, hi],
        "max_irreducible_size": max((s for (k, s) in acc.hist if k == "irreducible"), default=None),
        "violations": sorted(acc.violations, key=lambda v: v["class_index"]),
    }
    if validate:
        report["prop53"] = _agreement(acc.prop53)
        report["prop53"]["disagreements"] = sorted(acc.disagreements, key=lambda d: d["class_index"])
        report["prop53_affine_sizes"] = _agreement(acc.prop53_affine)
    return report


def _agreement(tally: dict) -> dict:
    matrix = {str(pred).lower(): {"minimal": tally.get((pred, True), 0),
                                  "not_minimal": tally.get((pred, False), 0)} for pred in (True, False)}
    agree = tally.get((True, True), 0) + tally.get((False, False), 0)
    checked = sum(tally.values())
    return {"checked": checked, "agreements": agree,
            "agreement_rate": agree / checked if checked else None,
            "agreement_matrix": matrix, "provenance": "measured"}


def survey_for_q(q: int, **kw) -> dict:
    p, m = prime_power(q)
    if p == 2:
        raise ConicError("conic classification needs q odd")
    return survey(build_tower(p, m, 2), **kw)
