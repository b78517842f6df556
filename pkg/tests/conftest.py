import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from krein import AtomicMeasure, PhaseShift

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_measure(rng: np.random.Generator, n_max: int = 12, gap: float = 1e-3) -> AtomicMeasure:
    """Atoms in (0, 1) with pairwise gaps >= gap and masses in [0.05, 1]."""
    n = int(rng.integers(1, n_max + 1))
    while True:
        x = np.sort(rng.uniform(0, 1, n))
        if n == 1 or np.diff(x).min() >= gap:
            return AtomicMeasure.from_arrays(x, rng.uniform(0.05, 1.0, n))


def random_exact_shift(rng: np.random.Generator, n_max: int = 15, gap: float = 1e-3, sign: int = 1) -> PhaseShift:
    """Disjoint intervals in (0, 1) with endpoints separated by >= gap."""
    n = int(rng.integers(1, n_max + 1))
    while True:
        pts = np.sort(rng.uniform(0, 1, 2 * n))
        if np.diff(pts).min() >= gap:
            return PhaseShift.exact(list(zip(pts[0::2], pts[1::2])), sign)


@st.composite
def measures(draw, n_max: int = 8):
    n = draw(st.integers(1, n_max))
    xs = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n, unique=True))
    xs = sorted(xs)
    if any(b - a < 1e-3 for a, b in zip(xs, xs[1:])):
        xs = [i * 0.37 - 1 for i in range(n)]
    ws = draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    return AtomicMeasure.from_arrays(xs, ws)


upper_half_plane = st.builds(complex, st.floats(-5, 5), st.floats(0.01, 5))


@pytest.fixture
def report(capsys):
    """Print one acceptance line outside pytest's capture."""
    def _report(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return _report
