"""The evaluation code C_{q,r,k}: b*y - f(x) evaluated at the affine curve points."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Literal

import numpy as np

from . import _numeric as num
from ._parallel import pmap
from .curve import NormTraceCurve, enumerate_affine
from .fields import TowerContext, build_tower, rank
from .unipoly import UniPoly, evaluate_many

SPECTRUM_CAP = 1 << 28
# elements of the largest array built while enumerating a spectrum block
_BLOCK = 1 << 22


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Message:
    """Coefficients of b*y - (a_0 + a_1 x + ... + a_k x^k)."""

    b: int
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "a", tuple(int(c) for c in self.a))

    @classmethod
    def from_vector(cls, v) -> Message:
        v = [int(c) for c in v]
        return cls(v[0], tuple(v[1:]))

    @property
    def vector(self) -> tuple[int, ...]:
        return (self.b,) + self.a

    def is_zero(self) -> bool:
        return not any(self.vector)


@dataclass(frozen=True, eq=False)
class Codeword:
    values: np.ndarray = field(repr=False)
    source: Message | None = None

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.values))

    def is_zero(self) -> bool:
        return not self.values.any()


@dataclass(frozen=True, eq=False)
class EvalCode:
    curve: NormTraceCurve
    k: int
    generator: np.ndarray = field(repr=False)
    measured_dimension: int

    @property
    def ctx(self) -> TowerContext:
        return self.curve.ctx

    @property
    def field(self):
        return self.curve.ctx.ext

    @property
    def n(self) -> int:
        return self.curve.n

    @property
    def q(self) -> int:
        return self.curve.ctx.q

    @property
    def r(self) -> int:
        return self.curve.ctx.r

    @property
    def message_length(self) -> int:
        return self.k + 2

    @property
    def claimed_dimension(self) -> int:
        return self.k + 1

    def message_matrix_vector(self, msg: Message) -> np.ndarray:
        """Coefficients of msg against the generator rows (y, 1, x, ..., x^k)."""
        F = self.field
        return np.array([msg.b] + [F.neg(a) for a in msg.a], dtype=np.int64)


def generator_rows(curve: NormTraceCurve, k: int) -> np.ndarray:
    F = curve.ctx.ext
    rows = [curve.ys, np.ones(curve.n, dtype=np.int64)]
    for i in range(1, k + 1):
        rows.append(F.vmul(rows[-1], curve.xs))
    return np.array(rows, dtype=np.int64)


def build_code(curve: NormTraceCurve, k: int) -> EvalCode:
    q, r = curve.ctx.q, curve.ctx.r
    if not 0 < k < q ** (r - 1):
        raise ValueError(f"need 0 < k < q^(r-1) = {q ** (r - 1)}, got k={k}")
    if k >= curve.n:
        raise ValueError("k must be smaller than the number of affine points")
    G = generator_rows(curve, k)
    return EvalCode(curve=curve, k=k, generator=G, measured_dimension=rank(curve.ctx.ext, G))


@lru_cache(maxsize=16)
def code_for(p: int, m: int, r: int, k: int) -> EvalCode:
    return build_code(enumerate_affine(build_tower(p, m, r)), k)


def _code_key(code: EvalCode) -> tuple[int, int, int, int]:
    return (code.ctx.p, code.ctx.m, code.r, code.k)


def encode(code: EvalCode, msg: Message) -> Codeword:
    if len(msg.a) != code.k + 1:
        raise ValueError(f"message needs {code.k + 1} coefficients a_0..a_k")
    F = code.field
    curve = code.curve
    fx = evaluate_many(UniPoly(F, msg.a), curve.xs)
    values = F.vsub(F.vmul(msg.b, curve.ys), fx)
    return Codeword(values=values, source=msg)


def encode_many(code: EvalCode, msgs: np.ndarray) -> np.ndarray:
    """Rows of codeword values for an (N, k+2) array of messages (b, a_0..a_k)."""
    F = code.field
    G = code.generator
    msgs = np.asarray(msgs, dtype=np.int64)
    out = F.vmul(msgs[:, :1], G[0][None, :])
    for j in range(1, G.shape[0]):
        out = F.vsub(out, F.vmul(msgs[:, j:j + 1], G[j][None, :]))
    return out


def zero_count_law(code: EvalCode, roots: int) -> int:
    """Weight of ev(f(x)) when f has `roots` distinct roots in F_{q^r}."""
    return code.n - roots * code.q ** (code.r - 1)


# -- spectra -------------------------------------------------------------------------

def _spectrum_block(task) -> np.ndarray:
    """Weight histogram for all messages whose leading part is `prefix`.

    prefix = (b, a_k, a_{k-1}, ..., a_j); the coefficients a_{j-1}..a_1 are
    enumerated as a vectorized grid and a_0 is resolved by counting, since
    b*y - g(x) - a_0 vanishes exactly where b*y - g(x) == a_0.
    """
    key, prefix = task
    code = code_for(*key)
    F = code.field
    Q = F.order
    n = code.n
    G = code.generator
    k = code.k
    b, lead = prefix[0], prefix[1:]
    base = F.vmul(b, G[0])
    for off, a in enumerate(lead):
        base = F.vsub(base, F.vmul(a, G[k + 1 - off]))
    vecs = base[None, :]
    el = np.arange(Q, dtype=np.int64)
    first_free = k - len(lead)
    for deg in range(first_free, 0, -1):
        term = F.vmul(el[:, None], G[deg + 1][None, :])
        vecs = F.vsub(vecs[:, None, :], term[None, :, :]).reshape(-1, n)
    rows = vecs.shape[0]
    flat = (np.arange(rows, dtype=np.int64)[:, None] * Q + vecs).ravel()
    zeros = np.bincount(flat, minlength=rows * Q).reshape(rows, Q)
    return np.bincount((n - zeros).ravel(), minlength=n + 1)


def _prefixes(code: EvalCode) -> list[tuple[int, ...]]:
    Q = code.field.order
    n = code.n
    # fix enough leading coefficients that each block has at most _BLOCK cells
    fixed = 1
    while fixed < code.k + 1 and Q ** (code.k + 1 - fixed) * n > _BLOCK:
        fixed += 1
    fixed = max(fixed, 2) if code.k >= 1 else 1
    return [tuple(t) for t in product(range(Q), repeat=fixed)]


def weight_spectrum(code: EvalCode, mode: Literal["exhaustive", "sampled"] = "exhaustive",
                    samples: int = 10_000, seed: int = 0, workers: int = 1,
                    cap: int = SPECTRUM_CAP) -> dict[int, int]:
    """Histogram weight -> number of messages (the zero message included)."""
    Q = code.field.order
    n = code.n
    if mode == "exhaustive":
        total = Q ** code.message_length
        if total > cap:
            raise CapExceeded(f"{total} messages exceed the exhaustive cap {cap}")
        key = _code_key(code)
        parts = pmap(_spectrum_block, [(key, pre) for pre in _prefixes(code)], workers)
        hist = np.sum(parts, axis=0)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        msgs = rng.integers(0, Q, size=(samples, code.message_length))
        chunks = [(_code_key(code), msgs[i:i + 4096]) for i in range(0, samples, 4096)]
        parts = pmap(_sampled_block, chunks, workers)
        hist = np.sum(parts, axis=0) if parts else np.zeros(n + 1, dtype=np.int64)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {w: int(c) for w, c in enumerate(hist) if c}


def _sampled_block(task) -> np.ndarray:
    key, msgs = task
    code = code_for(*key)
    weights = np.count_nonzero(encode_many(code, msgs), axis=1)
    return np.bincount(weights, minlength=code.n + 1)


def rank_by_enumeration(code: EvalCode, cap: int = 1 << 20) -> int:
    """Dimension as log_Q of the number of distinct codewords (brute force)."""
    Q = code.field.order
    total = Q ** code.message_length
    if total > cap:
        raise CapExceeded(f"{total} messages exceed cap {cap}")
    msgs = np.array(list(product(range(Q), repeat=code.message_length)), dtype=np.int64)
    words = encode_many(code, msgs)
    distinct = len(np.unique(words, axis=0))
    dim = 0
    while Q ** dim < distinct:
        dim += 1
    assert Q ** dim == distinct
    return dim


def dimension_report(code: EvalCode) -> dict:
    return {
        "measured": code.measured_dimension,
        "paper_claim": code.claimed_dimension,
        "spanning_functions": code.message_length,
        "delta": code.measured_dimension - code.claimed_dimension,
        "provenance": {"measured": "measured", "paper_claim": "paper_formula"},
    }


# -- classical weight bounds ------------------------------------------------------------

BoundVariant = Literal["bezout", "corollary_ii_as_printed", "corollary_ii_cm_derived"]


def classical_bound_value(q: int, r: int, k: int, s: int | None, variant: BoundVariant):
    """Unclamped value of a weight lower bound (exact int for bezout)."""
    n = q ** (2 * r - 1)
    if variant == "bezout":
        if s is None or s > k or s < 0:
            raise ValueError("bezout needs 0 <= s <= k")
        return n - s * (q**r - 1) // (q - 1)
    d = max(k, r)
    qq = num.mp(q)
    if variant == "corollary_ii_as_printed":
        return (n - q**r - num.cm_constant(d) * qq ** (r - 1)
                - (k - 1) * (k - 2) * qq ** (num.mp(r - 1) / 2))
    if variant == "corollary_ii_cm_derived":
        return (n - qq ** (r - 1) - (d - 1) * (d - 2) * qq ** (num.mp(2 * r - 3) / 2)
                - num.cm_constant(d) * qq ** (r - 2))
    raise ValueError(f"unknown bound variant {variant!r}")


def classical_bounds(q: int, r: int, k: int, s: int | None = None,
                     variant: BoundVariant = "bezout") -> int:
    """Lower bound on the weight of a nonzero codeword, clamped at 0."""
    value = classical_bound_value(q, r, k, s, variant)
    return max(0, value if isinstance(value, int) else num.floor(value))
