"""Staged refinement of an exact shift: each stage adds one new up-jump at a
prescribed point, with a compensating down-jump close enough that the existing
atoms barely move."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..measures import MeasureError
from ..phase_shift import compare_shifts, identity_residual, pair_from_shift, pair_is_valid
from ..shifts import PhaseShift
from .wellmixed import is_well_mixed

PI = math.pi
MAX_HALVINGS = 200
RESIDUAL_GRID = np.array([x + 1j * y for x in np.linspace(-3, 5, 17) for y in (0.05, 0.5, 2.0)])


@dataclass(frozen=True)
class AtomDrift:
    x: float
    side: str            # mu | nu
    ratio: float         # new mass / old mass, from the pv formula
    residue_ratio: float  # the same ratio from exact residues


@dataclass(frozen=True)
class StageResult:
    shift: PhaseShift
    b: float
    c: float
    k: int
    separation_bound: float                  # dist(b, knots) / 2^(k+1)
    perturbation: tuple[tuple[float, float], ...]  # (y, int |u_k - u_{k+1}| / |x - y| dx)
    perturbation_bound: float                # 2^-(k+1)
    drift: tuple[AtomDrift, ...]
    drift_bound: float                       # 2^-k
    residual: float
    well_mixed: bool

    @property
    def ok(self) -> bool:
        return (abs(self.b - self.c) < self.separation_bound
                and all(v < self.perturbation_bound for _, v in self.perturbation)
                and all(abs(d.ratio - 1) < self.drift_bound and abs(d.residue_ratio - 1) < self.drift_bound
                        for d in self.drift)
                and self.residual < 1e-10 and self.well_mixed)


def _added_piece_integral(b: float, c: float, y: float) -> float:
    """``int |pi * indicator| / |x - y|`` over the interval between b and c, for y outside it."""
    return PI * abs(math.log(abs(c - y)) - math.log(abs(b - y)))


def theorem_4_1_stage(u: PhaseShift, b: float, k: int, others: Sequence[float] = ()) -> StageResult:
    """Insert an up-jump at ``b`` into the sign +1 shift ``u``.

    If ``u(b) = 0`` the piece ``pi * indicator(b, c)`` with ``c > b`` is added;
    if ``u(b) = pi`` the piece ``(c, b)`` with ``c < b`` is removed.  Starting
    from ``|b - c| = dist(b, knots) / 2^(k+2)`` the gap is halved until the
    perturbation integral is at most ``2^-(k+2)`` (half the required bound) at
    every existing jump and at ``others``.  The drift of every old atom is
    reported both from the pv formula and from exact residues.
    """
    if u.sign != 1 or not u.is_exact:
        raise MeasureError("stage needs an exact shift with sign +1")
    if k < 1:
        raise ValueError("stage index starts at 1")
    b = float(b)
    knots = sorted({v for iv in u.intervals for v in iv})
    if b in knots:
        raise MeasureError(f"{b} is already a jump point")
    probes = sorted(set(knots) | {float(y) for y in others} - {b})
    dist = min((abs(b - v) for v in probes), default=1.0)
    inside = bool(u(np.array([b]))[0] != 0)
    sep = dist / 2 ** (k + 1)
    target = 2.0 ** -(k + 2)
    delta = dist / 2 ** (k + 2)
    for _ in range(MAX_HALVINGS):
        c = b - delta if inside else b + delta
        if all(_added_piece_integral(b, c, y) <= target for y in probes):
            break
        delta /= 2
    else:
        worst = max(probes, key=lambda y: _added_piece_integral(b, c, y))
        raise MeasureError(f"no admissible c near {b}: binding constraint at y = {worst}")
    if inside:
        ivs = []
        for p, q in u.intervals:
            if p < b < q:
                ivs += [(p, c), (b, q)]
            else:
                ivs.append((p, q))
    else:
        ivs = list(u.intervals) + [(b, c)]
    new = PhaseShift.exact(sorted(ivs), 1)
    perturbation = tuple((y, _added_piece_integral(b, c, y)) for y in probes)

    old_pair, new_pair = pair_from_shift(u, 1.0), pair_from_shift(new, 1.0)
    drift = []
    for side, old_m, new_m in (("mu", old_pair.mu, new_pair.mu), ("nu", old_pair.nu, new_pair.nu)):
        for x, w in zip(old_m.locations, old_m.masses):
            cmp = compare_shifts(new, u, x)
            ratio = cmp.mu_density if side == "mu" else cmp.nu_density
            drift.append(AtomDrift(float(x), side, float(ratio if ratio is not None else math.nan),
                                   new_m.mass_at(x, 0.0) / w))
    residual = identity_residual(new, new_pair, RESIDUAL_GRID)
    mixed = pair_is_valid(new_pair) and bool(is_well_mixed(new_pair.mu.locations, new_pair.nu.locations))
    return StageResult(new, b, c, k, sep, perturbation, 2.0 ** -(k + 1), tuple(drift), 2.0 ** -k,
                       residual, mixed)


@dataclass(frozen=True)
class StagedRun:
    stages: tuple[StageResult, ...]
    tracked: tuple[float, ...]               # original mu atoms
    cumulative: tuple[tuple[float, ...], ...]  # per stage, mass ratio to the original for each tracked atom
    bounds: tuple[tuple[float, float], ...]    # per stage, (prod (1 - 2^-j), prod (1 + 2^-j))

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stages) and all(
            lo < r < hi for rs, (lo, hi) in zip(self.cumulative, self.bounds) for r in rs)


def run_stages(u0: PhaseShift, points: Sequence[float], start: int = 1) -> StagedRun:
    """Apply one stage per point, with stage indices ``start, start + 1, ...``."""
    base = pair_from_shift(u0, 1.0).mu
    tracked = tuple(float(x) for x in base.locations)
    u, stages, cumulative, bounds = u0, [], [], []
    lo = hi = 1.0
    for j, b in enumerate(points):
        k = start + j
        earlier = [s.b for s in stages]
        st = theorem_4_1_stage(u, b, k, others=earlier)
        stages.append(st)
        u = st.shift
        mu = pair_from_shift(u, 1.0).mu
        cumulative.append(tuple(mu.mass_at(x, 0.0) / w for x, w in zip(tracked, base.masses)))
        lo *= 1 - 2.0 ** -k
        hi *= 1 + 2.0 ** -k
        bounds.append((lo, hi))
    return StagedRun(tuple(stages), tracked, tuple(cumulative), tuple(bounds))
