"""Minimal codewords: supports, two minimality oracles, and the predicted
classification of minimal codewords of C_{q,r,k}."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from . import _numeric as num
from ._parallel import pmap
from .code import CapExceeded, Codeword, EvalCode, Message, code_for, encode, encode_many
from .fields import GF, nullspace, rank
from .unipoly import UniPoly, distinct_roots_in_field, from_roots

PROJECTIVE_CAP = 1 << 22

LABELS = ("class_i", "class_ii", "class_iii", "predicted_nonminimal", "outside_hypotheses")
SHAPES = ("class_i", "class_ii", "class_iii", "predicted_nonminimal")


@dataclass(frozen=True)
class SupportSet:
    bits: int
    n: int

    @classmethod
    def of(cls, values) -> SupportSet:
        values = np.asarray(values)
        packed = np.packbits(values != 0, bitorder="little")
        return cls(int.from_bytes(packed.tobytes(), "little"), len(values))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __le__(self, other: SupportSet) -> bool:
        return self.bits & ~other.bits == 0

    def positions(self) -> list[int]:
        return [i for i in range(self.n) if self.bits >> i & 1]


def covers(c: Codeword, c_prime: Codeword) -> bool:
    """True iff Supp(c_prime) is contained in Supp(c)."""
    if len(c.values) != len(c_prime.values):
        raise ValueError("codewords of different lengths")
    return SupportSet.of(c_prime.values) <= SupportSet.of(c.values)


def normalize(F: GF, values) -> tuple[int, ...]:
    """Scale a nonzero vector so its first nonzero entry is 1."""
    values = np.asarray(values, dtype=np.int64)
    nz = np.nonzero(values)[0]
    if nz.size == 0:
        return tuple(values.tolist())
    return tuple(F.vmul(values, F.inv(int(values[nz[0]]))).tolist())


def proportional(F: GF, u, v) -> bool:
    return normalize(F, u) == normalize(F, v)


@dataclass
class MinimalityVerdict:
    is_minimal: bool
    method: str
    witness: dict = field(default_factory=dict)


def _as_codeword(code: EvalCode, c) -> Codeword:
    if isinstance(c, Message):
        return encode(code, c)
    return c


def kernel_dimension(code: EvalCode, values) -> int:
    """Dimension of the subcode vanishing wherever `values` vanishes."""
    zero = np.asarray(values) == 0
    return code.measured_dimension - rank(code.field, code.generator[:, zero])


def is_minimal(code: EvalCode, c, method: Literal["kernel", "scan"] = "kernel") -> MinimalityVerdict:
    c = _as_codeword(code, c)
    if c.is_zero():
        raise ValueError("the zero codeword is not minimal by convention")
    if method == "kernel":
        return _kernel_verdict(code, c)
    if method == "scan":
        return _scan_verdict(code, c)
    raise ValueError(f"unknown method {method!r}")


def _kernel_verdict(code: EvalCode, c: Codeword) -> MinimalityVerdict:
    F = code.field
    zero = c.values == 0
    GZ = code.generator[:, zero]
    dim = code.measured_dimension - rank(F, GZ)
    witness = {"zero_set_size": int(zero.sum()), "kernel_dimension": dim}
    if dim == 1:
        return MinimalityVerdict(True, "kernel", witness)
    # the left kernel of G_Z contains a message whose codeword is not a multiple of c
    for v in nullspace(F, GZ.T):
        word = F.vsum(F.vmul(v[:, None], code.generator), axis=0)
        if word.any() and not proportional(F, word, c.values):
            witness["covered_message_coefficients"] = v.tolist()
            witness["covered_codeword"] = word.tolist()
            break
    return MinimalityVerdict(False, "kernel", witness)


def projective_vectors(Q: int, length: int) -> np.ndarray:
    """One representative per nonzero projective class, first nonzero entry 1.

    Rows are grouped by the position of the leading 1, then ordered
    lexicographically in the remaining entries.
    """
    blocks = []
    for lead in range(length):
        free = length - lead - 1
        grid = np.indices((Q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((len(grid), length), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = grid
        blocks.append(block)
    return np.concatenate(blocks)


@dataclass(frozen=True, eq=False)
class _ClassTable:
    messages: np.ndarray
    words: np.ndarray
    supports: list
    normal: list


@lru_cache(maxsize=4)
def _class_table(key) -> _ClassTable:
    code = code_for(*key)
    return _class_table_for(code)


def _class_table_for(code: EvalCode) -> _ClassTable:
    F = code.field
    Q = F.order
    count = (Q ** code.message_length - 1) // (Q - 1)
    if count > PROJECTIVE_CAP:
        raise CapExceeded(f"{count} projective classes exceed cap {PROJECTIVE_CAP}")
    msgs = projective_vectors(Q, code.message_length)
    words = encode_many(code, msgs)
    supports = [SupportSet.of(w) for w in words]
    normal = [normalize(F, w) for w in words]
    return _ClassTable(msgs, words, supports, normal)


def _scan_verdict(code: EvalCode, c: Codeword) -> MinimalityVerdict:
    """Test `covers` against one representative of every projective class."""
    F = code.field
    key = (code.ctx.p, code.ctx.m, code.r, code.k)
    table = _class_table(key) if code is code_for(*key) else _class_table_for(code)
    mine = SupportSet.of(c.values)
    own = normalize(F, c.values)
    checked = 0
    for msg, word, sup, nf in zip(table.messages, table.words, table.supports, table.normal):
        if sup.bits == 0 or nf == own:
            continue
        checked += 1
        if sup <= mine:
            return MinimalityVerdict(False, "scan", {
                "covered_message": Message.from_vector(msg).vector, "covered_codeword": word.tolist()})
    return MinimalityVerdict(True, "scan", {"classes_checked": checked})


def enumerate_minimal(code: EvalCode, workers: int = 1) -> list[dict]:
    """Every projective message class with its kernel-oracle verdict."""
    F = code.field
    Q = F.order
    count = (Q ** code.message_length - 1) // (Q - 1)
    if count > PROJECTIVE_CAP:
        raise CapExceeded(f"{count} projective classes exceed cap {PROJECTIVE_CAP}")
    msgs = projective_vectors(Q, code.message_length)
    key = (code.ctx.p, code.ctx.m, code.r, code.k)
    chunks = [(key, msgs[i:i + 2048]) for i in range(0, len(msgs), 2048)]
    verdicts = np.concatenate(pmap(_kernel_block, chunks, workers))
    weights = np.count_nonzero(encode_many(code, msgs), axis=1)
    return [{"message": tuple(m.tolist()), "weight": int(w), "minimal": bool(v)}
            for m, w, v in zip(msgs, weights, verdicts)]


def _kernel_block(task) -> np.ndarray:
    key, msgs = task
    code = code_for(*key)
    return kernel_minimal_many(code, msgs)


def kernel_minimal_many(code: EvalCode, msgs) -> np.ndarray:
    F = code.field
    dim = code.measured_dimension
    words = encode_many(code, np.asarray(msgs, dtype=np.int64))
    out = np.zeros(len(words), dtype=bool)
    for i, w in enumerate(words):
        zero = w == 0
        if zero.all() or zero.sum() < dim - 1:
            continue
        out[i] = rank(F, code.generator[:, zero]) == dim - 1
    return out


# -- predicted classification ----------------------------------------------------------

def _class_i_inequality(q: int, r: int, k: int, kbar: int, sign: int) -> bool:
    D = max(kbar, r)
    qq = num.mp(q)
    lhs = (qq ** (r - 1) - (D - 1) * (D - 2) * qq ** (num.mp(2 * r - 3) / 2)
           + sign * num.cm_constant(D) * qq ** (r - 2))
    return bool(lhs > k)


def _side_conditions(kbar: int, r: int, p: int) -> bool:
    return (kbar > r and kbar % p != 0) or (kbar == r >= 4) or (0 < kbar < r)


@dataclass(frozen=True)
class ClassPrediction:
    label: str
    shape: str
    corrected_shape: str
    k_bar: int | None = None
    side_conditions: bool | None = None
    inequality_printed: bool | None = None
    inequality_corrected: bool | None = None
    hypotheses: bool = True

    @property
    def corrected_label(self) -> str:
        return self.corrected_shape if self.hypotheses else "outside_hypotheses"


def hypotheses_hold(code: EvalCode) -> bool:
    return code.k > 3 and code.k < code.n + 1


def predicted_class(msg: Message, code: EvalCode) -> ClassPrediction:
    """Which class of the minimal-codeword classification msg falls in.

    ``shape`` ignores the k > 3 hypothesis; ``label`` is ``outside_hypotheses``
    when it fails. Class (i) is decided with the printed inequality (``+5 ...``);
    ``corrected_shape`` uses the minus sign instead.
    """
    if msg.is_zero():
        raise ValueError("the zero message has no class")
    F = code.field
    q, r, k, p = code.q, code.r, code.k, code.ctx.p
    hyp = hypotheses_hold(code)
    if msg.b != 0:
        f = UniPoly(F, msg.a).scale(F.inv(msg.b))
        kbar = f.degree
        if kbar <= 0:
            shape = corrected = "class_iii"
            pred = ClassPrediction("", shape, corrected, max(kbar, 0))
        else:
            side = _side_conditions(kbar, r, p)
            printed = _class_i_inequality(q, r, k, kbar, +1)
            fixed = _class_i_inequality(q, r, k, kbar, -1)
            shape = "class_i" if side and printed else "predicted_nonminimal"
            corrected = "class_i" if side and fixed else "predicted_nonminimal"
            pred = ClassPrediction("", shape, corrected, kbar, side, printed, fixed)
    else:
        f = UniPoly(F, msg.a)
        roots = distinct_roots_in_field(f)
        ok = f.degree == k and roots.all_distinct
        shape = corrected = "class_ii" if ok else "predicted_nonminimal"
        pred = ClassPrediction("", shape, corrected, f.degree)
    label = pred.shape if hyp else "outside_hypotheses"
    return ClassPrediction(label, pred.shape, pred.corrected_shape, pred.k_bar, pred.side_conditions,
                           pred.inequality_printed, pred.inequality_corrected, hyp)


def _expected_minimal(label: str) -> bool | None:
    if label.startswith("class_"):
        return True
    if label == "predicted_nonminimal":
        return False
    return None


# -- samplers per predicted shape -----------------------------------------------------------

def _random_projective(rng, Q: int, length: int) -> np.ndarray:
    while True:
        v = rng.integers(0, Q, size=length)
        if v.any():
            return v


def sample_shape(code: EvalCode, shape: str, count: int, rng) -> list[Message]:
    """Seeded draws of messages whose predicted shape is `shape`."""
    F = code.field
    Q = F.order
    k = code.k
    out: list[Message] = []
    if shape == "class_iii":
        for a0 in rng.integers(0, Q, size=count):
            out.append(Message(1, (int(a0),) + (0,) * k))
        return out
    if shape == "class_ii":
        if k > Q:
            return out
        for _ in range(count):
            roots = rng.choice(Q, size=k, replace=False)
            f = from_roots(F, [int(t) for t in roots], lead=int(rng.integers(1, Q)))
            out.append(Message(0, f.coeffs))
        return out
    if shape == "class_i":
        degrees = [kb for kb in range(1, k + 1)
                   if predicted_class(Message(1, (0,) * kb + (1,) + (0,) * (k - kb)), code).shape == "class_i"]
        if not degrees:
            return out
        for _ in range(count):
            kb = int(rng.choice(degrees))
            coeffs = [int(c) for c in rng.integers(0, Q, size=kb)] + [int(rng.integers(1, Q))]
            coeffs += [0] * (k - kb)
            out.append(Message(1, tuple(coeffs)))
        return out
    if shape == "predicted_nonminimal":
        tries = 0
        while len(out) < count and tries < 1000 * max(count, 1):
            tries += 1
            msg = Message.from_vector(_random_projective(rng, Q, code.message_length))
            if predicted_class(msg, code).shape == "predicted_nonminimal":
                out.append(msg)
        return out
    raise ValueError(f"unknown shape {shape!r}")


# -- comparison harness ---------------------------------------------------------------------

def _row(code: EvalCode, msg: Message, oracle: bool) -> dict:
    pred = predicted_class(msg, code)
    expect = _expected_minimal(pred.label)
    return {
        "message": list(msg.vector),
        "predicted": pred.label,
        "shape": pred.shape,
        "predicted_corrected": pred.corrected_label,
        "k_bar": pred.k_bar,
        "inequality_printed": pred.inequality_printed,
        "inequality_corrected": pred.inequality_corrected,
        "oracle": oracle,
        "agree": None if expect is None else expect == oracle,
    }


def _rows_block(task) -> list[dict]:
    key, vectors = task
    code = code_for(*key)
    verdicts = kernel_minimal_many(code, vectors)
    return [_row(code, Message.from_vector(v), bool(o)) for v, o in zip(vectors, verdicts)]


def _tally(rows: list[dict]) -> dict:
    matrix: dict[str, dict[str, int]] = {}
    corrected: dict[str, dict[str, int]] = {}
    for row in rows:
        verdict = "minimal" if row["oracle"] else "not_minimal"
        cell = matrix.setdefault(row["predicted"], {"minimal": 0, "not_minimal": 0})
        cell[verdict] += 1
        cell = corrected.setdefault(row["predicted_corrected"], {"minimal": 0, "not_minimal": 0})
        cell[verdict] += 1
    assessed = [r for r in rows if r["agree"] is not None]
    return {
        "agreement_matrix": dict(sorted(matrix.items())),
        "agreement_matrix_corrected": dict(sorted(corrected.items())),
        "assessed": len(assessed),
        "agreements": sum(1 for r in assessed if r["agree"]),
        "disagreements": sum(1 for r in assessed if not r["agree"]),
    }


def classification_report(code: EvalCode, mode: Literal["exhaustive", "sampled"] = "exhaustive",
                          samples: int = 1000, seed: int = 0, workers: int = 1) -> dict:
    """Predicted class against the kernel oracle, per projective class.

    Sampled mode draws `samples` messages for each predicted shape (stratified),
    each shape from its own seeded stream.
    """
    key = (code.ctx.p, code.ctx.m, code.r, code.k)
    if mode == "exhaustive":
        Q = code.field.order
        count = (Q ** code.message_length - 1) // (Q - 1)
        if count > PROJECTIVE_CAP:
            raise CapExceeded(f"{count} projective classes exceed cap {PROJECTIVE_CAP}")
        vectors = projective_vectors(Q, code.message_length)
        strata = {"all": vectors}
    elif mode == "sampled":
        strata = {}
        for i, shape in enumerate(SHAPES):
            rng = np.random.default_rng([seed, i])
            msgs = sample_shape(code, shape, samples, rng)
            strata[shape] = np.array([m.vector for m in msgs], dtype=np.int64).reshape(-1, code.message_length)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    report = {"mode": mode, "hypotheses_hold": hypotheses_hold(code), "strata": {}}
    all_rows = []
    for name, vectors in strata.items():
        chunks = [(key, vectors[i:i + 1024]) for i in range(0, len(vectors), 1024)]
        rows = [row for part in pmap(_rows_block, chunks, workers) for row in part]
        all_rows.extend(rows)
        report["strata"][name] = {"count": len(rows), **_tally(rows)}
    report.update(_tally(all_rows))
    report["rows"] = all_rows
    return report
