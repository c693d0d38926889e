from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtrace.code import Codeword, Message, code_for, encode, encode_many
from normtrace.minimal import (SupportSet, classification_report, covers, enumerate_minimal, is_minimal,
                               kernel_minimal_many, predicted_class, projective_vectors, proportional)


def word(code, *vec):
    return encode(code, Message.from_vector(vec))


def test_support_set():
    s = SupportSet.of([0, 3, 0, 1, 2])
    assert s.weight == 3 and s.positions() == [1, 3, 4]
    assert SupportSet.of([0, 0, 0, 1, 0]) <= s
    assert not s <= SupportSet.of([0, 0, 0, 1, 0])


def test_covers_examples():
    c = code_for(3, 1, 2, 2)
    F = c.field
    w = word(c, 1, 2, 0, 5)
    zero = Codeword(np.zeros(c.n, dtype=np.int64))
    assert covers(w, w)
    assert covers(w, zero)
    assert covers(w, Codeword(F.vmul(4, w.values)))


def test_y_minus_omega_minimal():
    c = code_for(2, 1, 2, 1)
    assert is_minimal(c, Message(1, (2, 0))).is_minimal
    assert is_minimal(c, Message(1, (2, 0)), "scan").is_minimal


def test_full_support_not_minimal():
    c = code_for(2, 1, 2, 1)
    msgs = projective_vectors(4, 3)
    full = [m for m, w in zip(msgs, encode_many(c, msgs)) if (w != 0).all()]
    assert full
    for m in full:
        verdict = is_minimal(c, Message.from_vector(m))
        assert not verdict.is_minimal
        covered = np.array(verdict.witness["covered_codeword"])
        assert not proportional(c.field, covered, encode(c, Message.from_vector(m)).values)


def test_zero_rejected():
    with pytest.raises(ValueError):
        is_minimal(code_for(2, 1, 2, 1), Message(0, (0, 0)))


@pytest.mark.parametrize("key,classes,n_minimal", [((2, 1, 2, 1), 21, 12), ((3, 1, 2, 2), 820, 486)])
def test_enumerate_and_oracles_agree(key, classes, n_minimal):
    c = code_for(*key)
    rows = enumerate_minimal(c)
    assert len(rows) == classes
    assert sum(r["minimal"] for r in rows) == n_minimal
    assert all(any(r["message"]) for r in rows)
    for r in rows:
        msg = Message.from_vector(r["message"])
        assert is_minimal(c, msg, "scan").is_minimal == r["minimal"]
    dmin = min(r["weight"] for r in rows)
    assert all(r["minimal"] for r in rows if r["weight"] == dmin)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=4, max_size=4).filter(any), st.integers(1, 8))
def test_projective_invariance(vec, lam):
    c = code_for(3, 1, 2, 2)
    F = c.field
    scaled = [F.mul(lam, v) for v in vec]
    assert kernel_minimal_many(c, [vec])[0] == kernel_minimal_many(c, [scaled])[0]


@pytest.mark.parametrize("key", [(2, 1, 2, 1), (3, 1, 2, 2), (2, 1, 3, 2)])
def test_polynomial_in_x_with_a_root_never_covers_y_part(key):
    c = code_for(*key)
    Q = c.field.order
    tails = np.array(list(product(range(Q), repeat=c.k + 1)))
    g = encode_many(c, np.hstack([np.zeros((len(tails), 1), dtype=np.int64), tails])[1:]) != 0
    h = encode_many(c, np.hstack([np.ones((len(tails), 1), dtype=np.int64), tails])) != 0
    # g covers h iff no position where h is nonzero and g vanishes
    covered = (h.astype(np.int64) @ (~g).astype(np.int64).T) == 0
    has_root = ~g.all(axis=1)
    assert not covered[:, has_root].any()
    # a root-free g has full weight and covers every codeword
    assert covered[:, ~has_root].all()


@pytest.mark.parametrize("key", [(2, 1, 2, 1), (3, 1, 2, 2), (2, 1, 3, 3), (5, 1, 2, 4)])
def test_y_minus_constant_minimal_iff_trace_nonzero(key):
    c = code_for(*key)
    ctx = c.ctx
    msgs = [[1, a] + [0] * c.k for a in range(ctx.Q)]
    verdicts = kernel_minimal_many(c, msgs)
    assert verdicts.tolist() == [bool(ctx.trace_table[a]) for a in range(ctx.Q)]


def test_predicted_class_examples():
    c = code_for(5, 1, 2, 4)
    assert predicted_class(Message(1, (7, 0, 0, 0, 0)), c).label == "class_iii"
    F = c.field
    from normtrace.unipoly import from_roots
    f = from_roots(F, [1, 2, 3, 4])
    assert predicted_class(Message(0, f.coeffs), c).label == "class_ii"
    c4 = code_for(2, 2, 2, 2)
    assert predicted_class(Message(0, (0, 0, 1)), c4).shape == "predicted_nonminimal"
    assert predicted_class(Message(0, (0, 0, 1)), c4).label == "outside_hypotheses"


def test_class_i_records_both_inequalities():
    c = code_for(5, 1, 2, 4)
    pred = predicted_class(Message(1, (0, 1, 0, 0, 0)), c)
    assert pred.k_bar == 1
    assert pred.inequality_printed is True and pred.inequality_corrected is False
    assert pred.label == "class_i" and pred.corrected_label == "predicted_nonminimal"


def test_classification_report_small():
    rep = classification_report(code_for(2, 1, 2, 1))
    assert len(rep["rows"]) == 21
    assert rep["agreement_matrix"] == {"outside_hypotheses": {"minimal": 12, "not_minimal": 9}}
    rep = classification_report(code_for(3, 1, 2, 2))
    assert set(rep["agreement_matrix"]) == {"outside_hypotheses"} and rep["assessed"] == 0


def test_classification_report_sampled_deterministic():
    c = code_for(5, 1, 2, 4)
    a = classification_report(c, "sampled", samples=40, seed=5)
    b = classification_report(c, "sampled", samples=40, seed=5, workers=2)
    assert a == b
    assert a["strata"]["class_ii"]["agreement_matrix"] == {"class_ii": {"minimal": 40, "not_minimal": 0}}
