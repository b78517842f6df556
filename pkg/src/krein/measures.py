"""Finite nonnegative atomic measures on the extended real line.

A measure is a finite list of point masses at strictly increasing real
locations, plus an optional mass sitting at infinity.  Continuous parts are
never materialized; they only show up through transforms of phase shifts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MERGE_TOL = 1e-12


class MeasureError(ValueError):
    """Raised when a measure or interval set violates its invariants."""


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float


@dataclass(frozen=True)
class AtomicMeasure:
    """Point masses ``sum(mass_i * delta_{location_i}) + infinity_mass * delta_inf``.

    Use :meth:`from_arrays` (validating) rather than the raw constructor
    unless you intend to build an invalid value on purpose, e.g. to exercise
    :func:`validate`.
    """

    locations: tuple[float, ...] = ()
    masses: tuple[float, ...] = ()
    infinity_mass: float = 0.0

    @classmethod
    def from_arrays(cls, locations, masses, infinity_mass: float = 0.0,
                    tol: float = MERGE_TOL) -> "AtomicMeasure":
        m = cls(tuple(float(v) for v in locations),
                tuple(float(v) for v in masses), float(infinity_mass))
        problem = validate(m, tol=tol)
        if problem is not None:
            raise MeasureError(problem)
        return m

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom], infinity_mass: float = 0.0) -> "AtomicMeasure":
        atoms = list(atoms)
        return cls.from_arrays([a.location for a in atoms], [a.mass for a in atoms],
                               infinity_mass)

    @classmethod
    def empty(cls) -> "AtomicMeasure":
        return cls()

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.locations, dtype=float)

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=float)

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(x, w) for x, w in zip(self.locations, self.masses)]

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses) + self.infinity_mass

    def __len__(self) -> int:
        return len(self.locations)

    def mass_at(self, x: float, tol: float = 1e-12) -> float:
        """Mass of the atom at ``x`` (0 if there is none within ``tol``)."""
        if not self.locations:
            return 0.0
        i = int(np.argmin(np.abs(self.x - x)))
        return self.masses[i] if abs(self.locations[i] - x) <= tol else 0.0

    def to_json(self) -> dict:
        return {"atoms": [{"x": x, "w": w} for x, w in zip(self.locations, self.masses)],
                "inf": self.infinity_mass}

    @classmethod
    def from_json(cls, data: dict | str) -> "AtomicMeasure":
        if isinstance(data, str):
            data = json.loads(data)
        atoms = data.get("atoms", [])
        return cls.from_arrays([a["x"] for a in atoms], [a["w"] for a in atoms],
                               data.get("inf", 0.0))


def validate(m: AtomicMeasure, tol: float = MERGE_TOL) -> str | None:
    """Return ``None`` if ``m`` is valid, otherwise a description of the first violation.

    Locations closer than ``tol`` are reported as duplicates; they are never
    merged.
    """
    if len(m.locations) != len(m.masses):
        return "length mismatch between locations and masses"
    for i, (x, w) in enumerate(zip(m.locations, m.masses)):
        if not math.isfinite(x):
            return f"non-finite location at atom {i}"
        if not (w > 0) or not math.isfinite(w):
            return f"nonpositive mass at atom {i} (x={x})"
    for i in range(1, len(m.locations)):
        gap = m.locations[i] - m.locations[i - 1]
        if abs(gap) <= tol:
            return f"duplicate location {m.locations[i]} (gap {gap:g} <= tol)"
        if gap < 0:
            return f"unsorted: atom {i} at {m.locations[i]} precedes {m.locations[i - 1]}"
    if not (m.infinity_mass >= 0) or not math.isfinite(m.infinity_mass):
        return "negative or non-finite infinity mass"
    return None


def norm(m: AtomicMeasure) -> float:
    """(1/pi) * sum(w / (1 + x^2)) + mass at infinity."""
    if not m.locations:
        return m.infinity_mass
    return float(np.sum(m.w / (1.0 + m.x ** 2)) / math.pi) + m.infinity_mass


def combine(m1: AtomicMeasure, m2: AtomicMeasure) -> AtomicMeasure:
    """Sum of two measures whose atom locations are disjoint."""
    pairs = sorted(zip(m1.locations + m2.locations, m1.masses + m2.masses))
    return AtomicMeasure.from_arrays([p[0] for p in pairs], [p[1] for p in pairs],
                                     m1.infinity_mass + m2.infinity_mass)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint open intervals, sorted left to right."""

    intervals: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not a < b:
                raise MeasureError(f"empty or reversed interval ({a}, {b})")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if b0 > a1:
                raise MeasureError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap or are unsorted")

    @classmethod
    def from_unsorted(cls, intervals: Iterable[Sequence[float]]) -> "IntervalSet":
        return cls(tuple(sorted((float(a), float(b)) for a, b in intervals)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def lefts(self) -> np.ndarray:
        return np.array([a for a, _ in self.intervals], dtype=float)

    @property
    def rights(self) -> np.ndarray:
        return np.array([b for _, b in self.intervals], dtype=float)

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    def contains(self, x: float) -> bool:
        return any(a < x < b for a, b in self.intervals)

    def merged(self) -> "IntervalSet":
        """Same set with touching intervals glued together."""
        out: list[list[float]] = []
        for a, b in self.intervals:
            if out and out[-1][1] == a:
                out[-1][1] = b
            else:
                out.append([a, b])
        return IntervalSet(tuple((a, b) for a, b in out))

    def is_subset_of(self, other: "IntervalSet") -> bool:
        return all(any(c <= a and b <= d for c, d in other.intervals) for a, b in self.intervals)


def restrict(m: AtomicMeasure, s: IntervalSet) -> AtomicMeasure:
    """Keep the atoms lying inside some interval of ``s``; the mass at infinity is dropped."""
    keep = [i for i, x in enumerate(m.locations) if s.contains(x)]
    return AtomicMeasure(tuple(m.locations[i] for i in keep), tuple(m.masses[i] for i in keep), 0.0)
