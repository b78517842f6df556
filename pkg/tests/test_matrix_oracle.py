import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krein import (AtomicMeasure, MeasureError, OracleError, OracleModel, compare_with_formula,
                   measure_to_model, model_to_measure, oracle_spectrum, perturb_spectrum, strictly_interlaced)
from conftest import measures, random_measure


def test_model_of_two_half_atoms():
    model = measure_to_model(AtomicMeasure.from_arrays([0.0, 1.0], [0.5, 0.5]))
    assert model.diag == (0.0, 1.0) and model.vec == pytest.approx((math.sqrt(0.5),) * 2)
    assert model_to_measure(model).masses == pytest.approx((0.5, 0.5))


def test_scalar_case_moves_atom_by_coupling():
    nu = perturb_spectrum(measure_to_model(AtomicMeasure.from_arrays([0.0], [1.0])), 1.0)
    assert nu.locations == pytest.approx((1.0,)) and nu.masses == pytest.approx((1.0,))


def test_two_by_two_closed_form():
    nu = perturb_spectrum(measure_to_model(AtomicMeasure.from_arrays([0.0, 1.0], [0.5, 0.5])), 1.0)
    assert nu.locations == pytest.approx((1 - 1 / math.sqrt(2), 1 + 1 / math.sqrt(2)), abs=1e-14)
    assert all(0 < w < 1 for w in nu.masses) and sum(nu.masses) == pytest.approx(1.0)


def test_zero_coupling_returns_input():
    m = AtomicMeasure.from_arrays([0.0, 2.0], [1.0, 3.0])
    out = perturb_spectrum(measure_to_model(m), 0.0)
    assert out.locations == m.locations and out.masses == pytest.approx(m.masses, rel=1e-15)


def test_model_invariants_and_cap():
    with pytest.raises(MeasureError):
        OracleModel((1.0, 0.0), (1.0, 1.0))
    with pytest.raises(MeasureError):
        OracleModel((0.0,), (0.0,))
    with pytest.raises(MeasureError):
        measure_to_model(AtomicMeasure.from_arrays([0.0], [1.0], infinity_mass=1.0))
    with pytest.raises(OracleError):
        oracle_spectrum(OracleModel((0.0, 1.0), (1.0, 1.0)), 1.0, cap=1)


def test_random_eight_atoms_agree_three_ways():
    rng = np.random.default_rng(8)
    m = AtomicMeasure.from_arrays(np.sort(rng.uniform(0, 1, 8)), rng.uniform(0.1, 1, 8))
    for lam in (1.0, -1.0):
        d = compare_with_formula(m, lam)
        assert d.ok(1e-9) and d.interlaced


@given(measures(n_max=10), st.floats(0.1, 3))
def test_mass_conservation_and_interlacing(m, lam):
    for sign in (1, -1):
        nu = perturb_spectrum(measure_to_model(m), sign * lam)
        assert sum(nu.masses) == pytest.approx(sum(m.masses), rel=1e-12)
        assert strictly_interlaced(m.locations, nu.locations)
        if sign > 0:
            assert nu.locations[-1] > m.locations[-1]
        else:
            assert nu.locations[0] < m.locations[0]


def test_eigenvalues_increase_with_coupling():
    m = random_measure(np.random.default_rng(3))
    model = measure_to_model(m)
    evs = [oracle_spectrum(model, lam).eigenvalues for lam in np.linspace(-2, 2, 9)]
    assert all(np.all(b > a) for a, b in zip(evs, evs[1:]))
