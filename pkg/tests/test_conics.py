from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtrace.conics import (ConicError, all_lines, catalog, class_count, classify_conic, conic_value,
                              decode_classes, intersection_sizes, line_type, pattern_match,
                              prop53_minimality_predicate, survey, survey_for_q)
from normtrace.fields import build_tower, rank
from normtrace.minimal import projective_vectors


def plane_points(Q):
    return [(x, y, 1) for x in range(Q) for y in range(Q)] + [(x, 1, 0) for x in range(Q)] + [(1, 0, 0)]


def hermitian_points(ctx):
    E, q = ctx.ext, ctx.q
    return [P for P in plane_points(ctx.Q)
            if E.pow(P[0], q + 1) == E.add(E.mul(E.pow(P[1], q), P[2]), E.mul(P[1], E.pow(P[2], q)))]


def kind_by_points(ctx, coeffs):
    """Kind from the F_{q^2}-points of the conic alone."""
    E = ctx.ext
    pts = [P for P in plane_points(ctx.Q) if conic_value(E, coeffs, P) == 0]
    Q = ctx.Q
    if len(pts) == 1:
        return "two_conjugate_lines"
    if len(pts) == 2 * Q + 1:
        return "two_rational_lines"
    assert len(pts) == Q + 1
    return "repeated_line" if rank(E, pts) == 2 else "irreducible"


@pytest.fixture(scope="module")
def herm9(f9_tower):
    return hermitian_points(f9_tower)


def test_classify_examples(f9_tower):
    assert classify_conic(f9_tower, (0, 0, 0, 1, 0, 0)).kind == "two_rational_lines"
    assert classify_conic(f9_tower, (1, 0, 0, 0, 0, 0)).kind == "repeated_line"
    assert classify_conic(f9_tower, (1, 1, 1, 0, 0, 0)).kind == "irreducible"
    with pytest.raises(ConicError):
        classify_conic(f9_tower, (0,) * 6)
    with pytest.raises(ConicError):
        classify_conic(build_tower(2, 1, 2), (1, 0, 0, 0, 0, 0))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=6, max_size=6).filter(any), st.integers(1, 8))
def test_classify_matches_point_oracle(coeffs, lam):
    ctx = build_tower(3, 1, 2)
    E = ctx.ext
    conic = classify_conic(ctx, coeffs)
    assert conic.kind == kind_by_points(ctx, coeffs)
    assert classify_conic(ctx, [E.mul(lam, c) for c in coeffs]).kind == conic.kind
    if conic.lines:
        on_conic = {P for P in plane_points(ctx.Q) if conic_value(E, coeffs, P) == 0}
        on_lines = {P for P in plane_points(ctx.Q) for ln in conic.lines
                    if E.add(E.add(E.mul(ln[0], P[0]), E.mul(ln[1], P[1])), E.mul(ln[2], P[2])) == 0}
        assert on_conic == on_lines


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=6, max_size=6).filter(any))
def test_sizes_match_brute_force(coeffs):
    ctx = build_tower(3, 1, 2)
    herm = hermitian_points(ctx)
    on = [P for P in herm if conic_value(ctx.ext, coeffs, P) == 0]
    proj, aff = intersection_sizes(ctx, classify_conic(ctx, coeffs))
    assert proj == len(on)
    assert aff == sum(1 for P in on if P[2] == 1)
    assert proj - aff in (0, 1)


def test_line_type_examples(f9_tower):
    assert line_type(f9_tower, (0, 0, 1)) == "tangent"
    assert line_type(f9_tower, (1, 0, 0)) == "secant"


@pytest.mark.parametrize("p", [3, 5])
def test_every_line_tangent_or_secant(p):
    ctx = build_tower(p, 1, 2)
    types = [line_type(ctx, ln) for ln in all_lines(ctx)]
    q = ctx.q
    assert types.count("tangent") == q**3 + 1
    assert types.count("secant") == ctx.Q**2 + ctx.Q + 1 - (q**3 + 1)


def test_intersection_examples(f9_tower):
    q = 3
    x2 = classify_conic(f9_tower, (1, 0, 0, 0, 0, 0))
    assert intersection_sizes(f9_tower, x2)[0] == q + 1
    # x (x - z): two distinct secants through the points with x = 0 and x = 1
    two = classify_conic(f9_tower, (1, 0, 0, 0, f9_tower.ext.neg(1), 0))
    assert all(line_type(f9_tower, ln) == "secant" for ln in two.lines)
    assert intersection_sizes(f9_tower, two)[0] in (2 * q + 1, 2 * q + 2)


def test_pattern_match_examples(f9_tower):
    ctx5 = build_tower(5, 1, 2)
    irr = classify_conic(ctx5, (1, 1, 1, 0, 0, 0))
    assert pattern_match(ctx5, irr, (0, 0)).compatible_patterns == ("i",)
    assert pattern_match(ctx5, irr, (6, 6)).compatible_patterns == ("iv", "vi", "vii")
    rep = classify_conic(f9_tower, (1, 0, 0, 0, 0, 0))
    assert pattern_match(f9_tower, rep, (4, 3)).compatible_patterns == ("viii",)
    assert pattern_match(ctx5, irr, (13, 13)).violation


def test_catalog_range_vii():
    assert catalog(3)["vii"][1] == frozenset(range(2, 9))
    assert catalog(9)["vii"][1] == frozenset(range(5, 18))
    assert catalog(25)["vii"][1] == frozenset(range(17, 38))


def test_prop53_examples(f81_tower):
    ctx = f81_tower
    E = ctx.ext
    two = classify_conic(ctx, (1, 0, 0, 0, E.neg(1), 0))
    assert prop53_minimality_predicate(ctx, two, intersection_sizes(ctx, two))
    irr = classify_conic(ctx, (1, 1, 1, 0, 0, 0))
    assert not prop53_minimality_predicate(ctx, irr, (2, 2))
    rep = classify_conic(ctx, (1, 0, 0, 0, 0, 0))
    assert not prop53_minimality_predicate(ctx, rep, intersection_sizes(ctx, rep))
    with pytest.raises(ConicError):
        prop53_minimality_predicate(build_tower(7, 1, 2), irr, (8, 8))


def test_decode_classes_order():
    Q = 5
    total = class_count(Q)
    assert (decode_classes(Q, np.arange(total)) == projective_vectors(Q, 6)).all()


def test_survey_q3_exhaustive_matches_direct(f9_tower):
    fast = survey(f9_tower)
    direct = survey(f9_tower, "sampled", samples=10**9)
    assert fast["classes_surveyed"] == direct["classes_surveyed"] == 66430
    for key in ("histogram", "reducible_line_types", "through_infinity", "violations"):
        assert fast[key] == direct[key]
    assert fast["violations"] == []
    irreducible = sum(r["count"] for r in fast["histogram"] if r["kind"] == "irreducible")
    assert irreducible == 9**5 - 9**2  # nonsingular conics over F_9
    assert fast["max_irreducible_size"] <= 8


def test_survey_rejects():
    with pytest.raises(ConicError):
        survey_for_q(4)
    with pytest.raises(ConicError):
        survey(build_tower(7, 1, 2), "sampled", samples=10, validate_prop53=True)


def test_q9_irreducible_size_four_exists(f81_tower):
    # an irreducible conic meeting the curve in 4 points: below the (vii) floor of 5
    conic = classify_conic(f81_tower, (1, 0, 49, 38, 59, 74))
    assert conic.kind == "irreducible"
    sizes = intersection_sizes(f81_tower, conic)
    assert sizes == (4, 3)
    assert pattern_match(f81_tower, conic, sizes).violation


def test_validation_sample_q9(f81_tower):
    rep = survey(f81_tower, "sampled", samples=1500, seed=2, validate_prop53=True)
    assert rep["prop53"]["checked"] == 1500
    for d in rep["prop53"]["disagreements"]:
        assert d["kind"] == "irreducible" and d["projective_size"] == 5 and d["through_infinity"]
        assert not d["oracle_minimal"] and d["predicate"]
    assert rep["prop53_affine_sizes"]["agreement_rate"] == 1.0
    again = survey(f81_tower, "sampled", samples=1500, seed=2, validate_prop53=True, workers=2)
    assert again == rep
