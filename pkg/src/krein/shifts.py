"""Phase-shift values: exact piecewise-constant shifts and sampled shifts.

An exact shift with sign +1 equals pi on a finite union of open intervals and
0 elsewhere; sign -1 means -pi on the intervals.  Sampled shifts are grid
values, produced only for inspection.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .measures import IntervalSet, MeasureError

PI = math.pi


@dataclass(frozen=True)
class StepFunction:
    """Compactly supported step function: ``values[j]`` on ``(knots[j], knots[j+1])``."""

    knots: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.knots and len(self.values) != len(self.knots) - 1:
            raise ValueError("need len(values) == len(knots) - 1")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError("knots must be strictly increasing")

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[float, float, float]]) -> "StepFunction":
        """Sum of ``c * indicator(p, q)`` over the given (possibly overlapping) pieces."""
        pieces = [(float(p), float(q), float(c)) for p, q, c in pieces if q > p and c != 0]
        if not pieces:
            return cls()
        # event sweep with an integer multiplicity per coefficient, so values stay exact sums
        events: dict[float, Counter] = defaultdict(Counter)
        for p, q, c in pieces:
            events[p][c] += 1
            events[q][c] -= 1
        knots = sorted(events)
        active: Counter = Counter()
        vals = []
        for a in knots[:-1]:
            active.update(events[a])
            vals.append(math.fsum(c * k for c, k in active.items() if k))
        return cls(tuple(knots), tuple(vals)).simplified()

    def simplified(self) -> "StepFunction":
        """Drop knots where the value does not change and trim zero ends."""
        if not self.knots:
            return self
        knots = [self.knots[0]]
        vals: list[float] = []
        for j, v in enumerate(self.values):
            if vals and vals[-1] == v:
                knots[-1] = self.knots[j + 1]
            else:
                vals.append(v)
                knots.append(self.knots[j + 1])
        while vals and vals[0] == 0:
            vals.pop(0)
            knots.pop(0)
        while vals and vals[-1] == 0:
            vals.pop()
            knots.pop()
        if not vals:
            return StepFunction()
        return StepFunction(tuple(knots), tuple(vals))

    def pieces(self) -> list[tuple[float, float, float]]:
        return [(a, b, c) for a, b, c in zip(self.knots, self.knots[1:], self.values) if c != 0]

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return StepFunction.from_pieces(self.pieces() + other.pieces())

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.knots, tuple(-v for v in self.values))

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def shifted(self, c: float, window: tuple[float, float]) -> "StepFunction":
        """This function plus the constant ``c`` on ``window``."""
        return self + StepFunction.from_pieces([(window[0], window[1], c)])

    def right_value(self, x: float) -> float:
        """Limit of the function at ``x`` from the right."""
        for a, b, c in zip(self.knots, self.knots[1:], self.values):
            if a <= x < b:
                return c
        return 0.0

    def left_value(self, x: float) -> float:
        for a, b, c in zip(self.knots, self.knots[1:], self.values):
            if a < x <= b:
                return c
        return 0.0

    def __call__(self, x) -> np.ndarray:
        """Pointwise values; at a knot the right limit is returned."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b, c in zip(self.knots, self.knots[1:], self.values):
            out = np.where((x >= a) & (x < b), c, out)
        return out

    def reflect(self) -> "StepFunction":
        """The function t -> f(-t)."""
        return StepFunction(tuple(-k for k in reversed(self.knots)), tuple(reversed(self.values)))

    @property
    def support_measure(self) -> float:
        return math.fsum(b - a for a, b, _ in self.pieces())


@dataclass(frozen=True)
class PhaseShift:
    """Krein spectral shift, in exact (interval) form or sampled form.

    ``sign = +1`` corresponds to positive couplings (values in [0, pi]) and
    ``sign = -1`` to negative couplings (values in [-pi, 0]).
    """

    sign: int
    support: IntervalSet | None = None
    grid_x: tuple[float, ...] | None = None
    grid_v: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MeasureError("sign must be +1 or -1")
        if (self.support is None) == (self.grid_x is None):
            raise MeasureError("a shift is either exact (support) or sampled (grid), not both")
        if self.grid_x is not None:
            v = np.asarray(self.grid_v, dtype=float)
            if len(v) != len(self.grid_x):
                raise MeasureError("grid length mismatch")
            if np.any(np.abs(v) > PI + 1e-9):
                raise MeasureError("sampled shift exceeds pi in absolute value")
            if np.any(np.diff(np.asarray(self.grid_x)) <= 0):
                raise MeasureError("grid must be strictly increasing")

    @classmethod
    def exact(cls, intervals: IntervalSet | Iterable[Sequence[float]], sign: int = 1) -> "PhaseShift":
        if not isinstance(intervals, IntervalSet):
            intervals = IntervalSet(tuple(tuple(iv) for iv in intervals))
        for a, b in intervals:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise MeasureError("exact shifts must have bounded support")
        return cls(sign=sign, support=intervals.merged())

    @classmethod
    def sampled(cls, x, values, sign: int = 1) -> "PhaseShift":
        return cls(sign=sign, grid_x=tuple(float(t) for t in x),
                   grid_v=tuple(float(v) for v in values))

    @property
    def form(self) -> str:
        return "exact" if self.support is not None else "sampled"

    @property
    def is_exact(self) -> bool:
        return self.support is not None

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        self._need_exact()
        return self.support.intervals

    @property
    def lefts(self) -> np.ndarray:
        return self.support.lefts

    @property
    def rights(self) -> np.ndarray:
        return self.support.rights

    def _need_exact(self):
        if self.support is None:
            raise MeasureError("operation needs an exact (piecewise-constant) shift")

    def step(self) -> StepFunction:
        self._need_exact()
        return StepFunction.from_pieces((a, b, self.sign * PI) for a, b in self.support)

    def up_jumps(self) -> list[float]:
        """Points where the shift jumps upward (mu-side atoms)."""
        self._need_exact()
        return [a for a, _ in self.support] if self.sign > 0 else [b for _, b in self.support]

    def down_jumps(self) -> list[float]:
        """Points where the shift jumps downward (nu-side atoms)."""
        self._need_exact()
        return [b for _, b in self.support] if self.sign > 0 else [a for a, _ in self.support]

    def __call__(self, x) -> np.ndarray:
        if self.support is not None:
            return self.step()(x)
        return np.interp(np.asarray(x, dtype=float), self.grid_x, self.grid_v, left=0.0, right=0.0)

    def reflect(self) -> "PhaseShift":
        """The shift t -> u(-t)."""
        if self.support is not None:
            return PhaseShift.exact([(-b, -a) for a, b in reversed(self.support.intervals)], self.sign)
        return PhaseShift.sampled([-t for t in reversed(self.grid_x)], list(reversed(self.grid_v)), self.sign)

    def to_json(self) -> dict:
        self._need_exact()
        return {"sign": self.sign, "intervals": [[a, b] for a, b in self.support]}

    @classmethod
    def from_json(cls, data: dict | str) -> "PhaseShift":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.exact([tuple(iv) for iv in data["intervals"]], int(data.get("sign", 1)))
