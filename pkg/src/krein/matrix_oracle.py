"""Ground truth by brute force: realize an atomic measure as a diagonal matrix
with a cyclic vector, add the rank-one term literally and diagonalize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import AtomicMeasure, MeasureError

DEFAULT_CAP = 512
TINY_MASS = 1e-14


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleModel:
    diag: tuple[float, ...]
    vec: tuple[float, ...]

    def __post_init__(self):
        if len(self.diag) != len(self.vec):
            raise MeasureError("diag and vec lengths differ")
        if any(b <= a for a, b in zip(self.diag, self.diag[1:])):
            raise MeasureError("diag must be strictly increasing")
        if any(not v > 0 for v in self.vec):
            raise MeasureError("vec entries must be positive (cyclicity)")


def measure_to_model(m: AtomicMeasure) -> OracleModel:
    if m.infinity_mass > 0:
        raise MeasureError("mass at infinity has no matrix realization")
    return OracleModel(m.locations, tuple(math.sqrt(w) for w in m.masses))


def model_to_measure(model: OracleModel) -> AtomicMeasure:
    return AtomicMeasure.from_arrays(model.diag, [v * v for v in model.vec])


@dataclass(frozen=True)
class OracleSpectrum:
    eigenvalues: np.ndarray
    masses: np.ndarray
    tiny: tuple[int, ...]  # indices whose mass is below TINY_MASS (kept, never dropped)

    def measure(self) -> AtomicMeasure:
        if np.any(self.masses <= 0):
            raise OracleError("eigenvector has zero overlap with the cyclic vector")
        return AtomicMeasure.from_arrays(self.eigenvalues, self.masses, tol=0.0)


def oracle_spectrum(model: OracleModel, lam: float, cap: int = DEFAULT_CAP) -> OracleSpectrum:
    """Eigenvalues of ``diag + lam * vec vec^T`` and the squared projections of ``vec``."""
    n = len(model.diag)
    if n > cap:
        raise OracleError(f"model size {n} exceeds cap {cap}")
    v = np.asarray(model.vec, dtype=float)
    a = np.diag(np.asarray(model.diag, dtype=float)) + lam * np.outer(v, v)
    try:
        evals, evecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"eigensolver failed (cond={np.linalg.cond(a):.3g}): {exc}") from exc
    masses = (evecs.T @ v) ** 2
    tiny = tuple(int(i) for i in np.nonzero(masses < TINY_MASS)[0])
    return OracleSpectrum(evals, masses, tiny)


def perturb_spectrum(model: OracleModel, lam: float, cap: int = DEFAULT_CAP) -> AtomicMeasure:
    """Spectral measure of ``vec`` for ``diag + lam * vec vec^T``."""
    if lam == 0:
        return model_to_measure(model)
    return oracle_spectrum(model, lam, cap).measure()


def strictly_interlaced(a, b) -> bool:
    """True if the sorted merge of ``a`` and ``b`` alternates between the two sets."""
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    if any(p[0] == q[0] for p, q in zip(merged, merged[1:])):
        return False
    return all(p[1] != q[1] for p, q in zip(merged, merged[1:]))


@dataclass(frozen=True)
class Discrepancy:
    n: int
    lam: float
    loc_formula: float
    mass_formula: float
    loc_shift: float
    mass_shift: float
    loc_formula_vs_shift: float
    mass_formula_vs_shift: float
    interlaced: bool

    @property
    def worst(self) -> float:
        return max(self.loc_formula, self.mass_formula, self.loc_shift, self.mass_shift,
                   self.loc_formula_vs_shift, self.mass_formula_vs_shift)

    def ok(self, tol: float = 1e-9) -> bool:
        return self.worst <= tol

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["worst"] = self.worst
        return d


def _gap(m1: AtomicMeasure, m2: AtomicMeasure) -> tuple[float, float]:
    if len(m1) != len(m2):
        return math.inf, math.inf
    if not len(m1):
        return 0.0, 0.0
    return (float(np.max(np.abs(m1.x - m2.x))), float(np.max(np.abs(m1.w - m2.w))))


def compare_with_formula(m: AtomicMeasure, lam: float, cap: int = DEFAULT_CAP) -> Discrepancy:
    """Three-way comparison of the perturbed measure.

    (a) dense diagonalization, (b) poles and residues of the resolvent
    formula, (c) the phase-shift pipeline (shift of ``m`` at coupling
    ``lam``, then exact residues of the shift).
    """
    from .phase_shift import exact_shift_from_measure, pair_from_shift
    from .rank_one import perturbed_atoms

    oracle = perturb_spectrum(measure_to_model(m), lam, cap)
    formula = perturbed_atoms(m, lam)
    shift_nu = pair_from_shift(exact_shift_from_measure(m, lam), lam).nu
    lf, mf = _gap(oracle, formula)
    ls, ms = _gap(oracle, shift_nu)
    lfs, mfs = _gap(formula, shift_nu)
    return Discrepancy(len(m), lam, lf, mf, ls, ms, lfs, mfs,
                       strictly_interlaced(m.locations, oracle.locations))
