"""Interval selection at finite scale: splitting the complementary intervals of
a null closed set into two families whose one-sided kernel integrals both
grow at every sampled point, and refining one family near right endpoints so
that a principal value stays bounded at interior points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..measures import IntervalSet, MeasureError
from ..shifts import StepFunction
from ..transforms import truncated_kernel_integral


class SelectionError(MeasureError):
    """The input does not allow the required selection at this scale."""


def one_sided_terms(ivs: np.ndarray, y: float, side: str, window: float = 1.0) -> np.ndarray:
    """``int dx / |x - y|`` over each interval clipped to ``(y, y + window)`` or ``(y - window, y)``."""
    a, b = ivs[:, 0], ivs[:, 1]
    if side == "right":
        lo, hi = np.maximum(a, y), np.minimum(b, y + window)
        d_lo, d_hi = lo - y, hi - y
    else:
        lo, hi = np.maximum(a, y - window), np.minimum(b, y)
        d_lo, d_hi = y - hi, y - lo
    out = np.zeros(len(ivs))
    ok = hi > lo
    with np.errstate(divide="ignore"):
        out[ok] = np.log(d_hi[ok]) - np.log(d_lo[ok])
    return out


@dataclass
class SelectionCertificate:
    intervals: IntervalSet
    generations: list[list[int]]          # interval indices chosen in each generation
    samples: tuple[float, ...]
    increments: list[dict[tuple[float, str], float]]  # per generation: (y, side) -> increment
    target: float = 1.0
    refined: list[int] = field(default_factory=list)   # N, filled by lemma_4_3_refine
    pv_bound: list[float] = field(default_factory=list)

    @property
    def L(self) -> list[int]:
        return sorted(i for g, idx in enumerate(self.generations) if g % 2 == 0 for i in idx)

    @property
    def M(self) -> list[int]:
        return sorted(i for g, idx in enumerate(self.generations) if g % 2 == 1 for i in idx)

    def partial_integrals(self, family: str) -> dict[tuple[float, str], list[float]]:
        """Cumulative lower bounds of the one-sided integrals over L (odd generations) or M (even)."""
        parity = 0 if family == "L" else 1
        out: dict[tuple[float, str], list[float]] = {}
        for g, inc in enumerate(self.increments):
            if g % 2 != parity:
                continue
            for key, v in inc.items():
                prev = out.setdefault(key, [])
                prev.append((prev[-1] if prev else 0.0) + v)
        return out

    @property
    def ok(self) -> bool:
        return (not set(self.L) & set(self.M)
                and all(v >= self.target for inc in self.increments for v in inc.values()))


def _half_cover(ivs: np.ndarray, available: np.ndarray) -> list[int]:
    """Largest available intervals in each unit window until more than half the available measure is covered."""
    chosen = []
    idx = np.flatnonzero(available)
    if not idx.size:
        return chosen
    lengths = ivs[:, 1] - ivs[:, 0]
    windows = np.floor(0.5 * (ivs[idx, 0] + ivs[idx, 1])).astype(int)
    for w in np.unique(windows):
        members = idx[windows == w]
        total = lengths[members].sum()
        acc = 0.0
        for i in members[np.argsort(-lengths[members], kind="stable")]:
            if acc > total / 2:
                break
            chosen.append(int(i))
            acc += lengths[i]
    return chosen


def lemma_4_2_select(intervals: IntervalSet, generations: int, samples: Sequence[float],
                     target: float = 1.0, window: float = 1.0) -> SelectionCertificate:
    """Split the intervals into generations; odd generations form L and even ones M.

    Each generation first takes, in every unit window, the largest remaining
    intervals covering more than half of the remaining measure, then tops up
    with the remaining interval of largest contribution until the one-sided
    integrals on both sides of every sample have grown by at least ``target``.
    Samples must lie outside the intervals and off their endpoints.
    """
    ivs = np.array(intervals.intervals, dtype=float).reshape(-1, 2)
    samples = tuple(float(y) for y in samples)
    ends = set(ivs.ravel().tolist())
    for y in samples:
        if intervals.contains(y) or y in ends:
            raise MeasureError(f"sample {y} must lie in the closed set and off the endpoints")
    available = np.ones(len(ivs), bool)
    terms = {(y, s): one_sided_terms(ivs, y, s, window) for y in samples for s in ("right", "left")}
    gens, incs = [], []
    for g in range(generations):
        chosen = _half_cover(ivs, available)
        available[chosen] = False
        inc = {key: float(t[chosen].sum()) for key, t in terms.items()}
        for key, t in terms.items():
            while inc[key] < target:
                cand = np.where(available, t, 0.0)
                best = int(np.argmax(cand))
                if cand[best] <= 0:
                    raise SelectionError(
                        f"generation {g + 1}: the {key[1]} integral at y = {key[0]} reaches only "
                        f"{inc[key]:.4g} < {target}; too few intervals at this scale")
                available[best] = False
                chosen.append(best)
                for k2, t2 in terms.items():
                    inc[k2] += float(t2[best])
        gens.append(sorted(chosen))
        incs.append(inc)
    return SelectionCertificate(intervals, gens, samples, incs, target)


def _union(pieces) -> IntervalSet:
    out: list[list[float]] = []
    for a, b in sorted(pieces):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return IntervalSet(tuple((a, b) for a, b in out))


@dataclass(frozen=True)
class Anchor:
    index: int            # index of the interval I_l
    y: float              # right endpoint
    z: float
    length_sq: float      # |I_l|^2
    delta: float
    dist_prior: float     # distance from y to the earlier J's on its right (inf if none)
    chosen: tuple[int, ...]
    partial_sums: tuple[float, ...]  # one-sided integral at y over J, accumulated from the outside in


@dataclass(frozen=True)
class RefineResult:
    anchors: tuple[Anchor, ...]
    refined: tuple[int, ...]                     # N, a subset of M
    pv_trails: dict[float, tuple[tuple[float, float], ...]]  # y -> (eps, truncated integral of chi_E)
    pv_sup: dict[float, float]

    @property
    def delta_ratio(self) -> float:
        """max delta_l / |I_l|^2 over the anchors."""
        return max((a.delta / a.length_sq for a in self.anchors), default=0.0)

    @property
    def quarter_ok(self) -> bool:
        """delta_l < (y_l - z_l) dist_l / 4 at every anchor."""
        return all(a.delta < 0.25 * (a.y - a.z) * a.dist_prior for a in self.anchors)


def lemma_4_3_refine(cert: SelectionCertificate, z_points: Sequence[float],
                     interior: Sequence[float] = (), eps_scales: int = 40) -> RefineResult:
    """Choose ``N`` inside ``M`` near right endpoints and bound the truncated pv of ``chi_E``.

    ``z_points[n]`` lies in the n-th interval with ``y_n - z_n < |I_n|^2``.
    Anchors are processed by decreasing length with
    ``delta_l = min(|I_l|^2, (y_l - z_l) dist_l / 4) / 2`` where ``dist_l``
    is the distance from ``y_l`` to the earlier ``J``'s on its right;
    ``J_l`` collects the unused M intervals inside ``(y_l, y_l + delta_l)``.
    At finite scale ``J_l`` may be empty; such anchors are kept with no
    chosen intervals.  ``E`` is the union of N and all ``[z_n, y_n]``.
    """
    ivs = np.array(cert.intervals.intervals, dtype=float).reshape(-1, 2)
    z = np.asarray(z_points, dtype=float)
    if z.shape != (len(ivs),):
        raise ValueError("one z point per interval")
    lengths = ivs[:, 1] - ivs[:, 0]
    bad = np.flatnonzero(~((z > ivs[:, 0]) & (z < ivs[:, 1]) & (ivs[:, 1] - z < lengths ** 2)))
    if bad.size:
        i = int(bad[0])
        raise MeasureError(f"z = {z[i]} violates z in I and y - z < |I|^2 for I = ({float(ivs[i, 0])}, {float(ivs[i, 1])})")
    m_set = np.zeros(len(ivs), bool)
    m_set[cert.M] = True
    used = np.zeros(len(ivs), bool)
    order = np.argsort(-lengths, kind="stable")
    anchors, prior = [], []   # prior: (lo, hi) hulls of earlier J's
    for l in order:
        y = ivs[l, 1]
        right = [lo - y for lo, _ in prior if lo > y]
        dist = min(right) if right else math.inf
        delta = 0.5 * min(lengths[l] ** 2, 0.25 * (y - z[l]) * dist)
        inside = np.flatnonzero(m_set & ~used & (ivs[:, 0] > y) & (ivs[:, 1] < y + delta))
        used[inside] = True
        if inside.size:
            prior.append((float(ivs[inside, 0].min()), float(ivs[inside, 1].max())))
        t = one_sided_terms(ivs[inside], y, "right") if inside.size else np.array([])
        partial = tuple(np.cumsum(t[np.argsort(-ivs[inside, 0])]).tolist()) if inside.size else ()
        anchors.append(Anchor(int(l), float(y), float(z[l]), float(lengths[l] ** 2), float(delta), float(dist),
                              tuple(int(i) for i in inside), partial))
    refined = tuple(sorted(int(i) for i in np.flatnonzero(used)))
    pieces = [tuple(ivs[i]) for i in refined] + [(float(z[n]), float(ivs[n, 1])) for n in range(len(ivs))]
    e_set = _union(pieces)
    chi = StepFunction.from_pieces((a, b, 1.0) for a, b in e_set)
    trails, sups = {}, {}
    for y in interior:
        y = float(y)
        if e_set.contains(y):
            raise MeasureError(f"interior point {y} lies in E")
        trail = tuple((2.0 ** -j, truncated_kernel_integral(chi, y, 2.0 ** -j, 1.0)) for j in range(1, eps_scales + 1))
        trails[y] = trail
        sups[y] = max(v for _, v in trail)
    cert.refined = list(refined)
    cert.pv_bound = [sups[y] for y in sorted(sups)]
    return RefineResult(tuple(anchors), refined, trails, sups)
