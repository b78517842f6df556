"""Porosity of a closed set K measured by ``int_{R \\ K} dx / |x - y|``.

K is given by its bounded removed intervals.  At a point ``y`` of K that is
not an endpoint the integral runs over all removed intervals; at an endpoint
the adjacent interval is left out.  Finite-depth inputs carry a generation
label per interval so the per-generation increments can be inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..measures import IntervalSet, MeasureError


@dataclass(frozen=True)
class GradedIntervals:
    """Disjoint removed intervals, each tagged with a generation number."""

    intervals: IntervalSet
    generations: tuple[int, ...]

    def __post_init__(self):
        if len(self.generations) != len(self.intervals):
            raise MeasureError("one generation label per interval")

    @classmethod
    def from_pairs(cls, items: Sequence[tuple[tuple[float, float], int]]) -> "GradedIntervals":
        items = sorted(items)
        return cls(IntervalSet(tuple(iv for iv, _ in items)), tuple(g for _, g in items))


@dataclass(frozen=True)
class T55Result:
    verdict: str  # passes | fails | undecided
    total: float
    endpoint: bool
    increments: tuple[float, ...] = field(default=())
    partial_sums: tuple[float, ...] = field(default=())
    tail_bound: float | None = None


def _interval_terms(ivs: np.ndarray, y: float) -> np.ndarray:
    """``int_a^b dx / |x - y|`` for each interval not containing ``y`` (closed form)."""
    a, b = ivs[:, 0], ivs[:, 1]
    near = np.where(b <= y, y - b, a - y)
    far = np.where(b <= y, y - a, b - y)
    with np.errstate(divide="ignore"):
        return np.log(far) - np.log(near)


def theorem_5_5_check(removed: IntervalSet | GradedIntervals, y: float, truncated: bool | None = None,
                      tail_bound: float | None = None) -> T55Result:
    """Condition on ``int dx / |y - x|`` over the removed intervals at ``y`` in K.

    For a complete (finite) list of intervals the sum is finite and the check
    passes with the exact total.  For a finite-depth truncation of an
    infinite family (``GradedIntervals``, or ``truncated=True``) the verdict
    comes from the per-generation increments: bounded below over the last
    half of the generations means linear growth (fails); geometric decay
    gives a certified tail bound (passes); anything else is undecided.
    A caller that knows a closed-form bound on the generations left out
    passes it as ``tail_bound`` and the decay test is skipped.
    """
    graded = removed if isinstance(removed, GradedIntervals) else None
    ivs = graded.intervals if graded else removed
    if truncated is None:
        truncated = graded is not None
    if ivs.contains(y):
        raise MeasureError(f"{y} lies inside a removed interval")
    if not len(ivs):
        return T55Result("passes", 0.0, False)
    arr = np.array(ivs.intervals, dtype=float)
    adjacent = (arr[:, 0] == y) | (arr[:, 1] == y)
    terms = _interval_terms(arr, y)
    terms[adjacent] = 0.0
    endpoint = bool(adjacent.any())
    total = math.fsum(terms)
    if not truncated:
        return T55Result("passes", total, endpoint)
    gens = np.asarray(graded.generations if graded else
                      np.floor(-np.log2(arr[:, 1] - arr[:, 0])).astype(int))
    levels = sorted(set(int(g) for g in gens))
    inc = [math.fsum(terms[gens == g]) for g in levels]
    partial = tuple(np.cumsum(inc).tolist())
    tail = inc[len(inc) // 2:]
    if len(inc) >= 4 and min(tail) > 0 and min(tail) >= 0.25 * max(tail):
        return T55Result("fails", total, endpoint, tuple(inc), partial)
    if tail_bound is not None:
        return T55Result("passes", total, endpoint, tuple(inc), partial, total + tail_bound)
    last = [v for v in inc[-4:]]
    ratios = [b / a for a, b in zip(last, last[1:]) if a > 0]
    if len(ratios) == 3 and max(ratios) <= 0.9:
        r = max(ratios)
        bound = total + last[-1] * r / (1 - r)
        return T55Result("passes", total, endpoint, tuple(inc), partial, bound)
    return T55Result("undecided", total, endpoint, tuple(inc), partial)


def middle_thirds_complement(depth: int, ratio: float | Fraction = Fraction(1, 3)) -> GradedIntervals:
    """Removed middle intervals of [0, 1] through ``depth`` generations."""
    ratio = Fraction(ratio)
    level = [(Fraction(0), Fraction(1))]
    items = []
    for g in range(1, depth + 1):
        nxt = []
        for l, r in level:
            half = ratio * (r - l) / 2
            mid = (l + r) / 2
            items.append(((float(mid - half), float(mid + half)), g))
            nxt += [(l, mid - half), (mid + half, r)]
        level = nxt
    return GradedIntervals.from_pairs(items)


def cantor_points_periodic(patterns: Sequence[str]) -> list[float]:
    """Points of the middle-thirds set with purely periodic ternary digits (0/2 strings).

    A pattern containing both digits gives a point that is not an endpoint of
    any removed interval.
    """
    out = []
    for p in patterns:
        if set(p) - {"0", "2"}:
            raise ValueError("digits must be 0 or 2")
        n = len(p)
        out.append(float(Fraction(int(p, 3), 3 ** n - 1)))
    return out


@dataclass(frozen=True)
class PorousResult:
    removed: GradedIntervals
    budgets: tuple[float, ...]
    certified: tuple[float, ...]  # worst-case integral per host interval, at its endpoints
    levels: int = 16

    @property
    def ok(self) -> bool:
        return all(c < b for c, b in zip(self.certified, self.budgets))

    @property
    def tail_bound(self) -> float:
        """Bound on the contribution of the levels that were not materialized, at any point of K."""
        return math.fsum(4 * (b / 8) * 2.0 ** -self.levels for b in self.budgets)

    def boundary_points(self) -> list[float]:
        return sorted({v for iv in self.removed.intervals.intervals for v in iv})


def porous_embed(hosts: IntervalSet, budgets: Sequence[float] | None = None,
                 levels: int = 16) -> PorousResult:
    """Intervals accumulating at both ends of each host ``J_i`` with
    ``int_{U Delta} dx / |x - y| < budget_i`` for every ``y`` outside ``J_i``.

    Level ``k`` places an interval of width ``eps_k * d_k`` at distance
    ``d_k = |J| 2^-k / 4`` from each endpoint, ``eps_k = (budget / 8) 2^-k``.
    The integral is largest at the endpoints of ``J_i``, where it is
    evaluated in closed form; the levels beyond ``levels`` (not
    materialized, their widths fall below float resolution) add at most
    ``2 * sum_{k > levels} eps_k``, which is included in the certificate.
    """
    if budgets is None:
        budgets = [2.0 ** -(i + 1) for i in range(len(hosts))]
    if len(budgets) != len(hosts):
        raise ValueError("one budget per host interval")
    items, certified = [], []
    for (x, y), budget in zip(hosts, budgets):
        length = y - x
        eps = budget / 8
        own = []
        for k in range(1, levels + 1):
            d = length * 2.0 ** -k / 4
            w = eps * 2.0 ** -k * d
            own.append(((x + d, x + d + w), k))
            own.append(((y - d - w, y - d), k))
        arr = np.array([iv for iv, _ in own])
        tail = 2 * eps * 2.0 ** -levels
        certified.append(max(math.fsum(_interval_terms(arr, x)), math.fsum(_interval_terms(arr, y))) + tail)
        items.extend(own)
    if not items:
        return PorousResult(GradedIntervals(IntervalSet(), ()), tuple(budgets), (), levels)
    return PorousResult(GradedIntervals.from_pairs(items), tuple(budgets), tuple(certified), levels)
