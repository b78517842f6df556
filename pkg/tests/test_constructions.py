import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krein import (IntervalSet, MeasureError, PhaseShift, exp_K_shift, pair_from_shift, perturbed_atoms,
                   strictly_interlaced)
from krein.constructions import (CantorSpec, SelectionError, WellMixedPair, build_interleaved_shift,
                                 cantor_build, cantor_points_periodic, cantor_shift, certify,
                                 claim_6_1_check, classify_lambda_sweep, density_chain, example_5_2,
                                 example_5_2_bound, example_5_2_points, interleaved_pair, is_well_mixed,
                                 lemma_4_2_select, lemma_4_3_refine, middle_thirds_complement, porous_embed,
                                 run_stages, sample_points, theorem_4_1_stage, theorem_5_5_check)

UNIT = PhaseShift.exact([(0.0, 1.0)], 1)


# -- well-mixed sets -------------------------------------------------------

def test_well_mixed_examples():
    assert is_well_mixed([0.0, 2.0], [1.0, 3.0])
    bad = is_well_mixed([0.0, 1.0], [2.0, 3.0])
    assert not bad and bad.violation == "(0.0, 1.0) contains no b"
    with pytest.raises(MeasureError):
        is_well_mixed([0.0], [0.0])


def test_interleaved_shift_sign_follows_smallest_point():
    assert build_interleaved_shift(WellMixedPair([0.0, 2.0], [1.0, 3.0])).sign == 1
    u = build_interleaved_shift(WellMixedPair([1.0, 3.0], [0.0, 2.0]))
    assert u.sign == -1 and u.intervals == ((0.0, 1.0), (2.0, 3.0))


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=20, unique=True), st.booleans())
def test_interleaved_pair_round_trip(pts, flip):
    pts = sorted(pts)
    if len(pts) % 2:
        pts = pts[:-1]
    if min(b - a for a, b in zip(pts, pts[1:])) < 1e-3:
        return
    a, b = pts[int(flip)::2], pts[1 - int(flip)::2]
    pair = interleaved_pair(WellMixedPair(a, b))
    assert list(pair.mu.locations) == sorted(a) and list(pair.nu.locations) == sorted(b)
    member = perturbed_atoms(pair.mu, pair.lam)
    np.testing.assert_allclose(member.x, pair.nu.x, atol=1e-9)
    np.testing.assert_allclose(member.w, pair.nu.w, rtol=1e-8)


def test_example_5_2_points_and_trail():
    a, b = example_5_2_points(3)
    assert a == [Fraction(-1, 2), Fraction(1, 4), Fraction(-1, 8)]
    assert b == [Fraction(-1), Fraction(-1, 2) + Fraction(1, 16), Fraction(1, 4) - Fraction(1, 64)]
    vals = [example_5_2(n).criterion.value for n in range(2, 9)]
    assert all(q >= p for p, q in zip(vals, vals[1:])) and vals[-1] <= example_5_2_bound()
    res = example_5_2(8)
    assert res.well_mixed and res.criterion.verdict == "atom" and res.mass_at_zero > 0


# -- porosity ----------------------------------------------------------------

def test_middle_thirds_fails_at_cantor_points():
    removed = middle_thirds_complement(8)
    assert len(removed.intervals) == 255
    for y in cantor_points_periodic(["02", "0022"]):
        r = theorem_5_5_check(removed, y)
        assert r.verdict == "fails" and min(r.increments[len(r.increments) // 2:]) > 0.5


def test_finite_list_passes_and_endpoint_skips_adjacent():
    ivs = IntervalSet(((1.0, 2.0),))
    r = theorem_5_5_check(ivs, 0.0)
    assert r.verdict == "passes" and r.total == pytest.approx(math.log(2))
    assert theorem_5_5_check(ivs, 1.0).total == 0.0
    with pytest.raises(MeasureError):
        theorem_5_5_check(ivs, 1.5)


def test_porous_embedding_stays_under_budget():
    res = porous_embed(IntervalSet(((0.0, 1.0), (2.0, 3.0))))
    assert res.ok and res.budgets == (0.5, 0.25)
    for y in res.boundary_points()[::7]:
        assert theorem_5_5_check(res.removed, y, tail_bound=res.tail_bound).tail_bound < 0.75


def test_periodic_cantor_points():
    assert cantor_points_periodic(["02"]) == [0.25]
    with pytest.raises(ValueError):
        cantor_points_periodic(["012"])


# -- selection ---------------------------------------------------------------

def test_selection_on_middle_thirds():
    ivs = middle_thirds_complement(12).intervals
    cert = lemma_4_2_select(ivs, 6, [0.25, 0.75])
    assert cert.ok and not set(cert.L) & set(cert.M)
    sums = cert.partial_integrals("L")
    assert all(v[-1] >= 3 for v in sums.values())
    z = [b - 0.5 * (b - a) ** 2 for a, b in ivs]
    ref = lemma_4_3_refine(cert, z, interior=[0.25, 0.75])
    assert set(ref.refined) <= set(cert.M)
    assert ref.delta_ratio <= 0.5 and ref.quarter_ok
    assert all(abs(v) < 1 for v in ref.pv_sup.values())


def test_selection_fails_when_scale_too_coarse():
    with pytest.raises(SelectionError):
        lemma_4_2_select(middle_thirds_complement(10).intervals, 6, [0.25, 0.75])


def test_refine_rejects_bad_anchor_points():
    ivs = middle_thirds_complement(4).intervals
    cert = lemma_4_2_select(ivs, 1, [0.25])
    with pytest.raises(MeasureError):
        lemma_4_3_refine(cert, [a for a, _ in ivs])


# -- staged construction -----------------------------------------------------

def test_single_stage_bounds():
    st1 = theorem_4_1_stage(UNIT, 2.0, 1)
    assert st1.ok and st1.c > 2.0 and abs(st1.c - 2.0) < st1.separation_bound
    inner = theorem_4_1_stage(UNIT, 0.5, 2)
    assert inner.ok and inner.c < 0.5 and len(inner.shift.intervals) == 2


def test_stage_rejects_jump_points_and_negative_sign():
    with pytest.raises(MeasureError):
        theorem_4_1_stage(UNIT, 1.0, 1)
    with pytest.raises(MeasureError):
        theorem_4_1_stage(PhaseShift.exact([(0.0, 1.0)], -1), 2.0, 1)
    with pytest.raises(ValueError):
        theorem_4_1_stage(UNIT, 2.0, 0)


def test_five_stages_keep_cumulative_drift():
    run = run_stages(UNIT, [2.0, 0.5, -1.0, 3.0, 0.25])
    assert run.ok
    for ratios, (lo, hi) in zip(run.cumulative, run.bounds):
        assert all(lo < r < hi for r in ratios)


# -- fat Cantor sets -----------------------------------------------------------

def test_middle_thirds_tree():
    tree = cantor_build(CantorSpec(3, constant=Fraction(1, 3)))
    assert len(tree.intervals()) == 8
    assert all(r - l == Fraction(1, 27) for l, r in tree.levels[3])
    assert tree.measure() == Fraction(8, 27)


def test_fat_cantor_measure_and_certificate():
    tree = cantor_build(CantorSpec(6))
    assert tree.measure() == tree.product()
    cert = certify(CantorSpec(6), horizon=10_000)
    assert cert.conforming and 0.08 < cert.c_lower <= cert.c_upper < 0.09
    dens = density_chain(tree, horizon=10_000)
    assert dens.exact_density_ok and dens.chain_ok and dens.nodes == 2 ** 7 - 2


def test_poisson_imaginary_part_decreases_with_depth():
    tree = cantor_build(CantorSpec(8))
    vals = [exp_K_shift(cantor_shift(tree, d), 1j).imag for d in range(1, 9)]
    assert all(q < p for p, q in zip(vals, vals[1:]))


def test_claim_check_on_and_off_the_set():
    tree = cantor_build(CantorSpec(8))
    on = claim_6_1_check(tree, sample_points(tree, 1)[0])
    assert on.inside and on.d > 0 and on.quotient_diverges
    off = claim_6_1_check(tree, -1.0)
    assert off.inside is False and off.derivative is not None
    assert claim_6_1_check(tree, 0.0).inside is None


def test_small_sweep():
    tree = cantor_build(CantorSpec(5))
    small, big = classify_lambda_sweep(tree, [0.5, 2.0], samples=3)
    assert small.off_set_atoms == 0 and small.verdict == "singular_continuous_evidence"
    assert big.off_set_atoms == big.confirmed == len(tree.inner_gaps()) + 1
    assert max(big.oracle_max_loc, big.oracle_max_mass) < 1e-8
    mu = pair_from_shift(cantor_shift(tree), 1.0).mu
    assert strictly_interlaced(mu.locations, [a.x for a in big.atoms])
