"""Well-mixed finite point sets, the interleaved shift they determine, and a
dyadic example whose shift forces an extra point mass at 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..measures import MeasureError
from ..phase_shift import (CriterionResult, MeasurePair, atom_criterion_mu, criterion_integrand,
                           pair_from_shift)
from ..shifts import PhaseShift

PI = math.pi


@dataclass(frozen=True)
class MixCheck:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_well_mixed(a: Sequence[float], b: Sequence[float]) -> MixCheck:
    """Between any two points of one set, and outside their closed span, lies a point of the other."""
    a, b = sorted(a), sorted(b)
    if set(a) & set(b):
        raise MeasureError("sets must be disjoint")
    for one, other, name in ((a, b, "b"), (b, a, "a")):
        if len(one) < 2:
            continue
        # consecutive pairs suffice for the inner condition
        j = 0
        for p, q in zip(one, one[1:]):
            while j < len(other) and other[j] <= p:
                j += 1
            if not (j < len(other) and other[j] < q):
                return MixCheck(False, f"({p}, {q}) contains no {name}")
        if not (other and (other[0] < one[0] or other[-1] > one[-1])):
            return MixCheck(False, f"no {name} outside [{one[0]}, {one[-1]}]")
    return MixCheck(True)


@dataclass(frozen=True)
class WellMixedPair:
    seq_a: tuple[float, ...]
    seq_b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "seq_a", tuple(sorted(float(v) for v in self.seq_a)))
        object.__setattr__(self, "seq_b", tuple(sorted(float(v) for v in self.seq_b)))
        check = is_well_mixed(self.seq_a, self.seq_b)
        if not check:
            raise MeasureError(f"not well-mixed: {check.violation}")


def build_interleaved_shift(pair: WellMixedPair) -> PhaseShift:
    """Compactly supported {0, pi}-valued shift jumping up at each ``a`` and down at each ``b``.

    If the smallest point is an ``a`` the shift is ``pi`` on ``(a_i, b_i)``
    (sign +1); if it is a ``b`` the same jumps are realized by the sign -1
    shift ``-pi`` on ``(b_i, a_i)``.
    """
    a, b = pair.seq_a, pair.seq_b
    if len(a) != len(b):
        raise MeasureError("no compactly supported shift: the sets differ in size")
    if not a:
        return PhaseShift.exact([], 1)
    if a[0] < b[0]:
        return PhaseShift.exact(list(zip(a, b)), 1)
    return PhaseShift.exact(list(zip(b, a)), -1)


def interleaved_pair(pair: WellMixedPair) -> MeasurePair:
    u = build_interleaved_shift(pair)
    return pair_from_shift(u, float(u.sign))


# -- dyadic example --------------------------------------------------------

def example_5_2_points(n: int) -> tuple[list[Fraction], list[Fraction]]:
    """``a_k = (-1)^k / 2^k`` and ``b_1 = -1``, ``b_k = a_{k-1} + (-1)^k / 4^k``, k <= n."""
    a = [Fraction((-1) ** k, 2 ** k) for k in range(1, n + 1)]
    b = [Fraction(-1)] + [a[k - 2] + Fraction((-1) ** k, 4 ** k) for k in range(2, n + 1)]
    return a, b


def example_5_2_zero_set(n: int) -> list[tuple[Fraction, Fraction]]:
    """Intervals where the forced shift vanishes, truncated at ``n`` points per set.

    The innermost down-jump ``b_n`` side is closed off at 0 (standing in for
    the remaining points, which accumulate there), so 0 replaces ``a_n`` as an
    up-jump.
    """
    a, b = example_5_2_points(n)
    out = [(b[0], a[0])]
    for k in range(1, n + 1):
        if 2 * k + 1 <= n - 1:
            out.append((b[2 * k - 1], a[2 * k]))        # (b_{2k}, a_{2k+1}), left of 0
        if 2 * k + 1 <= n:
            out.append((b[2 * k], a[2 * k - 1]))        # (b_{2k+1}, a_{2k}), right of 0
    kk = n // 2
    out.append((b[2 * kk - 1], Fraction(0)))            # (b_{2K}, 0)
    return sorted(out)


@dataclass(frozen=True)
class Example52Result:
    n: int
    a: tuple[float, ...]
    b: tuple[float, ...]
    well_mixed: bool
    shift: PhaseShift
    criterion: CriterionResult
    partial_sums: tuple[float, ...]
    bound: float
    mass_at_zero: float


def example_5_2_bound() -> float:
    """Limit of the criterion integral at 0 as the truncation grows.

    The pieces where the integrand is nonzero are ``(a_{2k-1}, b_{2k})`` and
    ``(b_{2k+1}, a_{2k})``; they contribute ``-pi*log(1 - 2^-j)`` for j >= 3.
    """
    return PI * math.fsum(-math.log1p(-2.0 ** -j) for j in range(3, 200))


def example_5_2(n: int) -> Example52Result:
    """Truncated dyadic example: well-mixedness, the forced shift and its criterion at 0.

    The forced shift is ``pi`` except on the zero set; it is represented as
    the sign -1 shift ``-pi`` on the zero set (coupling -1), whose criterion
    integrand at 0 is the original one.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    a, b = example_5_2_points(n)
    mixed = bool(is_well_mixed([float(v) for v in a], [float(v) for v in b]))
    zeros = example_5_2_zero_set(n)
    u = PhaseShift.exact([(float(p), float(q)) for p, q in zeros], -1)
    crit = atom_criterion_mu(u, 0.0)
    # partial sums over the zero-set pieces in order of distance from 0
    v = criterion_integrand(u, 0.0, "mu")
    pieces = sorted(v.pieces(), key=lambda pc: -min(abs(pc[0]), abs(pc[1])))
    partial, acc = [], []
    for p, q, c in pieces:
        acc.append(c * (math.log(abs(q)) - math.log(abs(p))))
        partial.append(math.fsum(acc))
    pair = pair_from_shift(u, -1.0)
    return Example52Result(n, tuple(float(v) for v in a), tuple(float(v) for v in b), mixed, u, crit,
                           tuple(partial), example_5_2_bound(), pair.mu.mass_at(0.0, 0.0))
