import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krein import (AtomicMeasure, CharFunction, CircleParam, char_function_eval, circle_to_coupling,
                   classify_points, clark_member_poisson, coupling_to_circle, perturbed_atoms,
                   perturbed_cauchy, perturb_spectrum, measure_to_model, poisson, atom_test_nontangential)
from conftest import measures, upper_half_plane

DELTA0 = AtomicMeasure.from_arrays([0.0], [1.0])
TWO = AtomicMeasure.from_arrays([0.0, 1.0], [0.5, 0.5])


def test_coupling_to_circle_example():
    cp = coupling_to_circle(1 / math.pi)
    assert cp.alpha == pytest.approx(1j, abs=1e-15) and cp.scale_c == pytest.approx(0.5)


def test_circle_round_trip():
    assert circle_to_coupling(coupling_to_circle(0.37)) == pytest.approx(0.37, abs=1e-14)
    with pytest.raises(ValueError):
        circle_to_coupling(-1)
    with pytest.raises(ValueError):
        CircleParam(2.0)


def test_perturbed_cauchy_of_unit_atom():
    assert perturbed_cauchy(DELTA0, 1.0, 1j) == pytest.approx((1 + 1j) / (2 * math.pi), abs=1e-15)


def test_characteristic_function_of_unit_atom():
    cf = CharFunction(DELTA0)
    assert char_function_eval(cf, 1j) == pytest.approx((1 - math.pi) / (1 + math.pi), abs=1e-15)


def test_two_atom_perturbation():
    nu = perturbed_atoms(TWO, 1.0)
    assert nu.locations == pytest.approx([1 - 1 / math.sqrt(2), 1 + 1 / math.sqrt(2)], abs=1e-14)
    assert sum(nu.masses) == pytest.approx(1.0, abs=1e-14)
    assert nu.masses == pytest.approx([(2 - math.sqrt(2)) / 4, (2 + math.sqrt(2)) / 4], abs=1e-14)


def test_classify_points_finds_perturbed_atom():
    atom, empty = classify_points(DELTA0, 1.0, [1.0, 0.5])
    assert atom.kind == "atom" and atom.mass == pytest.approx(1.0, abs=1e-6)
    assert empty.kind == "no_atom"


def test_clark_member_at_one_is_unperturbed_measure():
    v = atom_test_nontangential(CharFunction(DELTA0), 1.0, 0.0)
    assert v.kind == "atom" and v.mass == pytest.approx(1.0, abs=1e-6)


def test_mass_at_infinity_is_rejected():
    with pytest.raises(ValueError):
        CharFunction(AtomicMeasure.from_arrays([0.0], [1.0], infinity_mass=1.0))


@given(measures(), st.sampled_from([-2.0, -0.5, 0.5, 1.0, 2.0]), upper_half_plane)
def test_perturbed_poisson_is_scaled_clark_member(m, lam, z):
    nu = perturbed_atoms(m, lam)
    cp = coupling_to_circle(lam)
    lhs = poisson(nu, z)
    rhs = cp.scale_c * clark_member_poisson(CharFunction(m), cp, z)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@given(measures(n_max=6), st.sampled_from([-1.0, 0.5, 2.0]))
def test_formula_atoms_match_diagonalization(m, lam):
    a, b = perturbed_atoms(m, lam), perturb_spectrum(measure_to_model(m), lam)
    np.testing.assert_allclose(a.x, b.x, atol=1e-9)
    np.testing.assert_allclose(a.w, b.w, atol=1e-9)
