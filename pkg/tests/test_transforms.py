import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krein import (AtomicMeasure, LimitConfig, PhaseShift, UndecidedError, cauchy, cauchy_of_shift,
                   conj_poisson, exp_K_shift, hilbert_correction_check, nontangential_limit, poisson,
                   poisson_of_shift, pv_integral, stieltjes_atom, verify_clark_limit)
from conftest import measures, upper_half_plane

UNIT = PhaseShift.exact([(0.0, 1.0)], 1)


def test_cauchy_of_two_half_atoms_at_i():
    m = AtomicMeasure.from_arrays([0.0, 1.0], [0.5, 0.5])
    assert cauchy(m, 1j) == pytest.approx((0.5 + 1.5j) / (2 * math.pi), abs=1e-15)


def test_cauchy_of_unit_interval_shift_at_i():
    assert cauchy_of_shift(UNIT, 1j) == pytest.approx(0.5 * math.log(2) + 1j * math.pi / 4, abs=1e-14)
    assert conj_poisson(UNIT, 1j) == pytest.approx(-0.5 * math.log(2), abs=1e-14)
    assert np.exp(cauchy_of_shift(UNIT, 1j)) == pytest.approx(1 + 1j, abs=1e-14)


def test_cauchy_rejects_real_points():
    with pytest.raises(ValueError):
        cauchy(AtomicMeasure.from_arrays([0.0], [1.0]), 1.0 + 0j)


def test_boundary_limit_off_and_on_an_atom():
    m = AtomicMeasure.from_arrays([0.0], [1.0])
    res = nontangential_limit(lambda z: cauchy(m, z), 1.0)
    assert res.converged and res.value == pytest.approx(-1 / math.pi, abs=1e-8)
    assert nontangential_limit(lambda z: cauchy(m, z), 0.0).diverges


def test_stieltjes_recovers_atoms_and_zero():
    m = AtomicMeasure.from_arrays([0.0, 2.0], [0.75, 1.5])
    assert stieltjes_atom(lambda z: cauchy(m, z), 0.0) == pytest.approx(0.75, abs=1e-9)
    assert stieltjes_atom(lambda z: cauchy(m, z), 2.0) == pytest.approx(1.5, abs=1e-9)
    assert stieltjes_atom(lambda z: cauchy(m, z), 1.0) == pytest.approx(0.0, abs=1e-9)


def test_stieltjes_undecided_raises():
    cfg = LimitConfig(steps=10)
    with pytest.raises(UndecidedError):
        stieltjes_atom(lambda z: 1j * np.sin(1 / z.imag) / z.imag, 0.0, cfg)


def test_clark_limit_single_and_double_atom():
    assert verify_clark_limit(AtomicMeasure.from_arrays([0.0], [1.0]), [3.0]).passed
    rep = verify_clark_limit(AtomicMeasure.from_arrays([0.0, 1.0], [1.0, 1.0]), [2.0, 5.0], xs=[1.0])
    assert rep.passed and rep.checks[0].expected == 5.0


def test_pv_of_unit_shift():
    assert pv_integral(UNIT, 0.0).kind == "plus_inf"
    assert pv_integral(UNIT, 1.0).kind == "minus_inf"
    mid = pv_integral(UNIT, 0.5)
    assert mid.kind == "finite" and mid.value == pytest.approx(0.0, abs=1e-14)


def test_hilbert_correction_is_small_away_from_jumps():
    assert hilbert_correction_check(UNIT, 0.5).sup < 1e-2


def test_hilbert_correction_at_a_jump_tends_to_zero():
    h = hilbert_correction_check(UNIT, 0.0)
    assert h.sup < 1e-2 and h.values[-1] < 1e-12


def test_hilbert_correction_bounded_without_vanishing_on_dyadic_shells():
    shells = PhaseShift.exact(sorted((2.0 ** (-2 * k - 1), 2.0 ** (-2 * k)) for k in range(25)), 1)
    h = hilbert_correction_check(shells, 0.0, LimitConfig(steps=30))
    assert h.sup < 0.1 and h.values[-1] > 0.05


@given(measures(), upper_half_plane)
def test_cauchy_is_herglotz(m, z):
    assert cauchy(m, z).imag >= 0


@given(measures(), upper_half_plane)
def test_imaginary_part_of_cauchy_is_poisson(m, z):
    assert cauchy(m, z).imag == pytest.approx(poisson(m, z), rel=1e-12, abs=1e-15)


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=8, unique=True), upper_half_plane)
def test_exp_cauchy_closed_form_matches_quadrature(pts, z):
    pts = sorted(pts)
    if min(b - a for a, b in zip(pts, pts[1:])) < 1e-3:
        return
    pairs = list(zip(pts[0::2], pts[1::2]))
    u = PhaseShift.exact(pairs, 1)
    quad = np.exp(cauchy_of_shift(u, z, method="quad"))
    assert quad == pytest.approx(exp_K_shift(u, z), rel=1e-8, abs=1e-8)
    assert poisson_of_shift(u, z) == pytest.approx(cauchy_of_shift(u, z).imag)


@given(measures(n_max=6), st.data())
def test_stieltjes_recovery_on_random_measure(m, data):
    i = data.draw(st.integers(0, len(m) - 1))
    got = stieltjes_atom(lambda z: cauchy(m, z), m.locations[i])
    assert got == pytest.approx(m.masses[i], abs=1e-9)


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=8, unique=True), st.floats(-3, 3))
def test_pv_reflection_symmetry(pts, x):
    pts = sorted(pts)
    if min(b - a for a, b in zip(pts, pts[1:])) < 1e-3 or min(abs(p - x) for p in pts) < 1e-6:
        return
    u = PhaseShift.exact(list(zip(pts[0::2], pts[1::2])), 1)
    a, b = pv_integral(u, x), pv_integral(u.reflect(), -x)
    assert a.kind == b.kind == "finite"
    assert a.value == pytest.approx(-b.value, abs=1e-12)


@given(measures(n_max=8), st.data())
def test_clark_boundary_limit_property(sigma, data):
    f = data.draw(st.lists(st.floats(-3, 3), min_size=len(sigma), max_size=len(sigma)))
    assert verify_clark_limit(sigma, f).passed
