import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from krein import AtomicMeasure, IntervalSet, MeasureError, combine, norm, restrict, validate
from conftest import measures


def test_norm_of_unit_atom_at_zero():
    assert norm(AtomicMeasure.from_arrays([0.0], [1.0])) == pytest.approx(1 / math.pi, abs=1e-15)


def test_norm_counts_mass_at_infinity():
    m = AtomicMeasure.from_arrays([1.0], [2.0], infinity_mass=0.5)
    assert norm(m) == pytest.approx(1 / math.pi + 0.5)


def test_empty_measure_has_zero_norm():
    assert norm(AtomicMeasure.empty()) == 0.0


def test_validate_reports_duplicates_unsorted_and_nonpositive():
    assert "duplicate" in validate(AtomicMeasure((0.0, 0.0), (1.0, 1.0)))
    assert "unsorted" in validate(AtomicMeasure((1.0, 0.0), (1.0, 1.0)))
    assert "nonpositive" in validate(AtomicMeasure((0.0,), (0.0,)))
    assert validate(AtomicMeasure((0.0, 1.0), (1.0, 2.0))) is None


def test_from_arrays_rejects_invalid():
    with pytest.raises(MeasureError):
        AtomicMeasure.from_arrays([0.0, 0.0], [1.0, 1.0])


def test_json_round_trip():
    m = AtomicMeasure.from_arrays([-1.0, 0.5], [0.25, 3.0], 0.125)
    assert AtomicMeasure.from_json(m.to_json()) == m


def test_interval_set_rejects_overlap_and_merges_touching():
    with pytest.raises(MeasureError):
        IntervalSet(((0.0, 2.0), (1.0, 3.0)))
    assert IntervalSet(((0.0, 1.0), (1.0, 2.0))).merged().intervals == ((0.0, 2.0),)


def test_restrict_keeps_atoms_inside_open_intervals():
    m = AtomicMeasure.from_arrays([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], 1.0)
    r = restrict(m, IntervalSet(((0.0, 1.0),)))
    assert r.locations == (0.5,) and r.masses == (2.0,) and r.infinity_mass == 0.0


@given(measures(), measures())
def test_norm_is_additive(m1, m2):
    shifted = AtomicMeasure.from_arrays([x + 10 for x in m2.locations], m2.masses)
    assert norm(combine(m1, shifted)) == pytest.approx(norm(m1) + norm(shifted), rel=1e-12)


@given(measures(), st.floats(-3, 0), st.floats(0.01, 3))
def test_restrict_is_idempotent(m, a, width):
    s = IntervalSet(((a, a + width),))
    once = restrict(m, s)
    assert restrict(once, s) == once
