"""Fat Cantor sets with shrinking gap ratios, the shift ``pi * indicator(C)``
and the coupling sweep of its rank-one family, all at finite depth.

Level ``n`` removes from every level ``n-1`` interval the centered open gap
of relative length ``a_n``.  With ``a_n = min(1/2, n^-3/2)`` the product
``prod (1 - a_n)`` is positive while the removed fraction inside every level
``n`` interval stays at least ``1/(n+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..matrix_oracle import perturb_spectrum, measure_to_model
from ..measures import AtomicMeasure
from ..phase_shift import atom_criterion_mu, atom_criterion_nu, pair_from_shift
from ..rank_one import AtomTestConfig, CharFunction, atom_test_nontangential, coupling_to_circle
from ..shifts import PhaseShift
from ..transforms import LimitConfig, cauchy_of_shift, nontangential_limit

PI = math.pi
CERT_HORIZON = 100_000


@dataclass(frozen=True)
class CantorSpec:
    """Gap ratios ``a_n = min(cap, n^-exponent)`` (or a constant ratio) and a depth."""

    depth: int
    exponent: float = 1.5
    cap: float = 0.5
    constant: float | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be positive")
        if self.constant is None and not self.exponent > 1:
            raise ValueError("exponent must exceed 1")
        if self.constant is not None and not 0 < self.constant < 1:
            raise ValueError("constant ratio must be in (0, 1)")

    def ratio(self, n: int) -> float:
        if self.constant is not None:
            return self.constant
        return min(self.cap, n ** -self.exponent)

    def ratios(self, upto: int | None = None) -> list[float]:
        return [self.ratio(n) for n in range(1, (upto or self.depth) + 1)]

    def tail_sum_bound(self, n: int) -> float:
        """Upper bound on ``sum_{k > n} a_k``."""
        if self.constant is not None:
            return math.inf
        p = self.exponent
        return n ** (1 - p) / (p - 1)


@dataclass(frozen=True)
class SpecCertificate:
    c_lower: float
    c_upper: float
    product_ok: bool                    # prod (1 - a_n) > 0
    removed_fraction: tuple[tuple[int, float], ...]  # (n, lower bound of 1 - prod_{k>=n}(1 - a_k))
    removed_ok: bool                    # >= 1/n for 2 <= n <= depth + 1
    monotone: bool

    @property
    def conforming(self) -> bool:
        return self.product_ok and self.removed_ok and self.monotone


def certify(spec: CantorSpec, horizon: int = CERT_HORIZON) -> SpecCertificate:
    """Certify positivity of ``prod (1 - a_n)`` and the removed-fraction bound.

    The finite product up to ``horizon`` is an upper bound for every tail
    product, hence a valid lower bound for the removed fraction.  The lower
    bound for ``c`` uses ``log(1 - a) >= -2a`` (a <= 1/2) on the tail.  The
    bound at ``n = 1`` is impossible together with ``c > 0`` and is not
    required.
    """
    a = np.array(spec.ratios(horizon))
    logs = np.log1p(-a)
    c_upper = float(np.exp(logs.sum()))
    tail = spec.tail_sum_bound(horizon)
    c_lower = c_upper * math.exp(-2 * tail) if math.isfinite(tail) else 0.0
    suffix = np.cumsum(logs[::-1])[::-1]  # suffix[n-1] = sum_{k>=n} log(1 - a_k) up to horizon
    rows, ok = [], True
    for n in range(2, spec.depth + 2):
        lb = float(-np.expm1(suffix[n - 1]))
        rows.append((n, lb))
        ok &= lb >= 1.0 / n
    monotone = bool(np.all(np.diff(a) <= 0) and np.all((a > 0) & (a < 1)))
    return SpecCertificate(c_lower, c_upper, c_lower > 0, tuple(rows), ok, monotone)


# -- tree -------------------------------------------------------------------

@dataclass
class CantorTree:
    spec: CantorSpec
    levels: list[list[tuple[Fraction, Fraction]]]       # levels[n] = intervals of C_n
    gaps: list[list[tuple[Fraction, Fraction]]]         # gaps[n] = gaps removed at level n (n >= 1)
    exact_ratios: list[Fraction] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def measure(self, level: int | None = None) -> Fraction:
        level = self.depth if level is None else level
        return sum((r - l for l, r in self.levels[level]), Fraction(0))

    def product(self, level: int | None = None) -> Fraction:
        level = self.depth if level is None else level
        out = Fraction(1)
        for q in self.exact_ratios[:level]:
            out *= 1 - q
        return out

    def intervals(self, level: int | None = None) -> list[tuple[float, float]]:
        level = self.depth if level is None else level
        return [(float(l), float(r)) for l, r in self.levels[level]]

    def inner_gaps(self, level: int | None = None) -> list[tuple[float, float]]:
        """Bounded complementary intervals of ``C_level`` inside [0, 1]."""
        iv = self.intervals(level)
        return [(b, a) for (_, b), (a, _) in zip(iv, iv[1:])]

    def locate(self, x: float, level: int | None = None) -> int | None:
        """Index of the level interval containing ``x`` (closed), or None."""
        level = self.depth if level is None else level
        iv = self.levels[level]
        lo, hi = 0, len(iv) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            l, r = iv[mid]
            if x < l:
                hi = mid - 1
            elif x > r:
                lo = mid + 1
            else:
                return mid
        return None

    def to_json(self) -> dict:
        def node(level: int, k: int) -> dict:
            l, r = self.levels[level][k]
            kids = [] if level == self.depth else [node(level + 1, 2 * k), node(level + 1, 2 * k + 1)]
            return {"interval": [float(l), float(r)], "children": kids}
        return node(0, 0)


def cantor_build(spec: CantorSpec) -> CantorTree:
    """Interval tree of ``C_0 = [0, 1] > C_1 > ... > C_depth`` in exact binary arithmetic."""
    ratios = [Fraction(q) for q in spec.ratios()]
    levels = [[(Fraction(0), Fraction(1))]]
    gaps: list[list[tuple[Fraction, Fraction]]] = [[]]
    for q in ratios:
        nxt, removed = [], []
        for l, r in levels[-1]:
            mid, half = (l + r) / 2, q * (r - l) / 2
            removed.append((mid - half, mid + half))
            nxt += [(l, mid - half), (mid + half, r)]
        levels.append(nxt)
        gaps.append(removed)
    return CantorTree(spec, levels, gaps, ratios)


def cantor_shift(tree: CantorTree, depth: int | None = None) -> PhaseShift:
    """``pi`` on ``C_depth``, 0 elsewhere."""
    return PhaseShift.exact(tree.intervals(depth), 1)


@dataclass(frozen=True)
class DensityReport:
    nodes: int
    exact_density_ok: bool          # |I ∩ C_depth| / |I| == prod_{j=n+1}^{depth}(1 - a_j) exactly
    chain_ok: bool                  # removed fraction >= 1/(n+1) >= ln2 / (-ln|I|) at every node n >= 1
    worst_margin: float
    literal_deficits: tuple[tuple[int, float], ...]  # levels where density >= 1/n fails, with density


def density_chain(tree: CantorTree, horizon: int = CERT_HORIZON) -> DensityReport:
    """Density bounds at every node of levels 1..depth.

    Two statements are checked: the exact finite-depth density identity, and
    the chain ``1 - prod_{k>n}(1 - a_k) >= 1/(n+1) >= ln 2 / (-ln |I|)`` for
    the limit set.  The version with the density itself on the left is
    reported level by level where it fails.
    """
    depth = tree.depth
    a = np.array(tree.spec.ratios(horizon))
    logs = np.log1p(-a)
    suffix = np.cumsum(logs[::-1])[::-1]
    exact_ok, chain_ok, worst, nodes = True, True, math.inf, 0
    deficits = []
    for n in range(1, depth + 1):
        expected = Fraction(1)
        for q in tree.exact_ratios[n:depth]:
            expected *= 1 - q
        removed_lb = float(-np.expm1(suffix[n]))  # 1 - prod_{k >= n+1}
        density_limit = 1 - removed_lb
        if density_limit < 1.0 / n:
            deficits.append((n, density_limit))
        width = 2 ** (depth - n)
        for k, (l, r) in enumerate(tree.levels[n]):
            nodes += 1
            kids = tree.levels[depth][k * width:(k + 1) * width]
            got = sum((q - p for p, q in kids), Fraction(0)) / (r - l)
            exact_ok &= got == expected
            rhs = math.log(2) / -math.log(float(r - l))
            margin = min(removed_lb - 1.0 / (n + 1), 1.0 / (n + 1) - rhs)
            worst = min(worst, margin)
            chain_ok &= margin >= 0
    return DensityReport(nodes, exact_ok, chain_ok, worst, tuple(deficits))


# -- boundary behavior on and off the set ------------------------------------

def nested_point(tree: CantorTree, path: Sequence[int], extra: int = 30) -> float:
    """Point of the limit set reached by choosing child ``path[k]`` (0 left, 1 right) at each level.

    The path is extended periodically ``extra`` levels beyond the tree with the
    same ratio rule, so the point lies in the limit set to float precision.
    """
    l, r = 0.0, 1.0
    steps = len(path) and (tree.depth + extra)
    for n in range(1, steps + 1):
        q = tree.spec.ratio(n)
        mid, half = (l + r) / 2, q * (r - l) / 2
        if path[(n - 1) % len(path)] == 0:
            r = mid - half
        else:
            l = mid + half
        if r - l < 1e-15:
            break
    return 0.5 * (l + r)


def sample_points(tree: CantorTree, count: int = 10) -> list[float]:
    """Deterministic points of the limit set, away from all gap endpoints."""
    patterns = [(0, 1), (1, 0), (0, 0, 1, 1), (1, 1, 0, 0), (0, 1, 1), (1, 0, 0), (0, 1, 0, 1, 1),
                (1, 0, 1, 0, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1, 1), (1, 0, 0, 0)]
    return [nested_point(tree, patterns[i % len(patterns)]) for i in range(count)]


@dataclass(frozen=True)
class ClaimReport:
    x: float
    inside: bool | None             # None: too close to an endpoint of C_depth
    derivative: complex | None      # off the set: the finite derivative
    ys: tuple[float, ...] = ()
    gaps: tuple[float, ...] = ()     # |pi - Pu(x_k + i y_k)|
    d: float | None = None           # min_k gap_k * |ln y_k|
    quotients: tuple[float, ...] = ()  # gap_k / y_k, a lower bound for the difference quotient
    tends_to_zero: bool | None = None
    quotient_diverges: bool | None = None


def claim_6_1_check(tree: CantorTree, x: float, depth: int | None = None) -> ClaimReport:
    """Derivative evidence for ``U = K(pi * indicator(C_depth))`` at ``x``.

    Off the set the nontangential difference quotient converges.  On the set
    the level-``k`` interval containing ``x`` gives the point
    ``x_k + i y_k`` (center, half-width); the report records
    ``|pi - Pu|`` there, the constant ``d = min |pi - Pu| |ln y_k|`` over
    levels ``k <= depth - 2``, and the quotients ``|pi - Pu| / y_k``.
    """
    depth = tree.depth if depth is None else depth
    u = cantor_shift(tree, depth)
    knots = np.array([v for iv in tree.intervals(depth) for v in iv])
    dist = float(np.min(np.abs(knots - x)))
    if dist < 1e-9:
        return ClaimReport(x, None, None)
    idx = tree.locate(x, depth)
    if idx is None:
        cfg = LimitConfig(y0=min(0.1, dist / 4), steps=20, tol=1e-8)
        lim = nontangential_limit(lambda z: cauchy_of_shift(u, z), x, cfg)
        q = nontangential_limit(lambda z: (cauchy_of_shift(u, z) - lim.value) / (z - x), x, cfg)
        return ClaimReport(x, False, q.value if q.converged else None)
    ys, gaps = [], []
    for k in range(1, depth - 1):
        j = tree.locate(x, k)
        l, r = tree.levels[k][j]
        center, half = float((l + r) / 2), float((r - l) / 2)
        pu = float(np.imag(cauchy_of_shift(u, center + 1j * half)))
        ys.append(half)
        gaps.append(abs(PI - pu))
    ys_a, g = np.array(ys), np.array(gaps)
    d = float(np.min(g * np.abs(np.log(ys_a)))) if len(g) else None
    quot = g / ys_a
    half = len(g) // 2
    tends = bool(len(g) >= 4 and g[-1] < 0.5 * g[:half].max() and np.all(np.diff(g[half:]) < 0))
    diverges = bool(len(quot) >= 2 and np.all(np.diff(quot) > 0))
    return ClaimReport(x, True, None, tuple(ys), tuple(gaps), d, tuple(quot.tolist()), tends, diverges)


# -- coupling sweep -----------------------------------------------------------

@dataclass(frozen=True)
class SweepAtom:
    x: float
    mass: float
    region: str          # gap | outer_left | outer_right | support (inside C_depth)
    confirmed: bool
    test_mass: float


@dataclass
class SpectralReport:
    lam: float
    depth: int
    atoms: list[SweepAtom]
    inner_gaps: int
    off_set_atoms: int
    truncation_atoms: int
    oracle_max_loc: float | None
    oracle_max_mass: float | None
    oracle_off_set: int | None
    sc_evidence: list[ClaimReport]
    criteria_fail_at_samples: bool

    @property
    def confirmed(self) -> int:
        return sum(a.confirmed for a in self.atoms if a.region != "support")

    @property
    def verdict(self) -> str:
        if self.off_set_atoms == 0 and self.sc_evidence and all(
                c.d and c.d > 0 and c.quotient_diverges for c in self.sc_evidence):
            return "singular_continuous_evidence"
        if self.off_set_atoms and self.off_set_atoms == len(self.atoms):
            return "pure_point"
        return "mixed_evidence"


def _log_abs_r(lefts: np.ndarray, rights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``log |R(x)|`` for ``R = prod (b - x) / (a - x)``, vectorized over ``x``."""
    out = np.zeros_like(x)
    for s in range(0, len(lefts), 256):
        a, b = lefts[s:s + 256], rights[s:s + 256]
        out += np.sum(np.log(np.abs(b[None, :] - x[:, None])) - np.log(np.abs(a[None, :] - x[:, None])), axis=1)
    return out


def _bisect_all(f, lo: np.ndarray, hi: np.ndarray, increasing: np.ndarray) -> np.ndarray:
    """Vectorized bisection of monotone ``f`` on each bracket to float resolution."""
    lo, hi = lo.copy(), hi.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        v = f(mid)
        go_right = (v < 0) == increasing
        lo = np.where(active & go_right, mid, lo)
        hi = np.where(active & ~go_right, mid, hi)
    return 0.5 * (lo + hi)


def _sweep_roots(lefts, rights, target: float):
    """Solutions of ``R(x) = target`` with the region of each."""
    n = len(lefts)
    lt = math.log(abs(target))

    def f(x):
        return _log_abs_r(lefts, rights, x) - lt

    if target < 0:
        # R runs from -inf to 0 on each support interval; |R| decreases there
        lo, hi = np.nextafter(lefts, rights), np.nextafter(rights, lefts)
        return _bisect_all(f, lo, hi, np.zeros(n, bool)), ["support"] * n
    # R runs from 0 to +inf on each inner gap
    lo, hi = np.nextafter(rights[:-1], lefts[1:]), np.nextafter(lefts[1:], rights[:-1])
    regions = ["gap"] * (n - 1)
    inc = np.ones(n - 1, bool)
    if target < 1:      # right of the support R increases from 0 to 1
        span = 1.0
        while f(np.array([rights[-1] + span]))[0] < 0:
            span *= 2
        lo = np.append(lo, np.nextafter(rights[-1], np.inf))
        hi = np.append(hi, rights[-1] + span)
        inc = np.append(inc, True)
        regions.append("outer_right")
    elif target > 1:    # left of the support R increases from 1 to +inf
        span = 1.0
        while f(np.array([lefts[0] - span]))[0] > 0:
            span *= 2
        lo = np.insert(lo, 0, lefts[0] - span)
        hi = np.insert(hi, 0, np.nextafter(lefts[0], -np.inf))
        inc = np.insert(inc, 0, True)
        regions.insert(0, "outer_left")
    return _bisect_all(f, lo, hi, inc), regions


def classify_lambda_sweep(tree: CantorTree, lambdas: Sequence[float], depth: int | None = None,
                          samples: int = 10, oracle: bool = True, confirm: bool = True,
                          mass_tol: float = 1e-6, oracle_tol: float = 1e-8) -> list[SpectralReport]:
    """Atoms of ``nu_lam`` for the truncated Cantor pair, with their evidence.

    ``nu_0`` is the first measure of the pair with shift ``pi * indicator(C_depth)``
    at coupling 1.  Atoms of ``nu_lam`` solve ``R(x) = 1 - 1/lam`` with
    ``R = exp(K u)``; their masses are ``1 / (lam^2 R'(x))``.  Each atom is
    confirmed by the nontangential derivative test of the characteristic
    function, and the whole list is compared with dense diagonalization.
    """
    depth = tree.depth if depth is None else depth
    u = cantor_shift(tree, depth)
    iv = np.array(u.intervals)
    lefts, rights = iv[:, 0], iv[:, 1]
    nu0 = pair_from_shift(u, 1.0).mu
    cf = CharFunction(nu0)
    pts = sample_points(tree, samples)
    evidence = [claim_6_1_check(tree, x, depth) for x in pts]
    crit_fail = all(atom_criterion_mu(u, x).verdict == "no_atom" and atom_criterion_nu(u, x).verdict == "no_atom"
                    for x in pts)
    reports = []
    for lam in lambdas:
        lam = float(lam)
        if lam == 0:
            atoms = [SweepAtom(x, w, "support", False, 0.0) for x, w in zip(nu0.locations, nu0.masses)]
            reports.append(SpectralReport(lam, depth, atoms, len(lefts) - 1, 0, len(atoms), None, None, None,
                                          evidence, crit_fail))
            continue
        target = 1.0 - 1.0 / lam
        if target == 0:
            nu1 = pair_from_shift(u, 1.0).nu
            atoms = [SweepAtom(x, w, "support", False, 0.0) for x, w in zip(nu1.locations, nu1.masses)]
            reports.append(SpectralReport(lam, depth, atoms, len(lefts) - 1, 0, len(atoms), None, None, None,
                                          evidence, crit_fail))
            continue
        roots, regions = _sweep_roots(lefts, rights, target)
        dlog = np.array([np.sum(1.0 / (lefts - r) - 1.0 / (rights - r)) for r in roots])
        masses = 1.0 / (lam ** 2 * target * dlog)
        cp = coupling_to_circle(lam)
        atoms = []
        for r, w, reg in zip(roots, masses, regions):
            ok, tm = False, 0.0
            if confirm and reg != "support":
                v = atom_test_nontangential(cf, cp, float(r), AtomTestConfig())
                tm = v.mass * cp.scale_c if v.kind == "atom" else 0.0
                ok = v.kind == "atom" and abs(tm - w) <= mass_tol * max(w, 1e-300) + 1e-12
            atoms.append(SweepAtom(float(r), float(w), reg, ok, tm))
        off = sum(a.region != "support" for a in atoms)
        o_loc = o_mass = o_off = None
        if oracle:
            om = perturb_spectrum(measure_to_model(nu0), lam, cap=max(512, len(nu0)))
            if len(om) == len(atoms):
                o_loc = float(np.max(np.abs(om.x - roots)))
                o_mass = float(np.max(np.abs(om.w - masses)))
            o_off = int(sum(tree.locate(x, depth) is None for x in om.locations))
            if oracle_tol is not None and o_loc is not None and max(o_loc, o_mass) > oracle_tol:
                atoms = [SweepAtom(a.x, a.mass, a.region, False, a.test_mass) for a in atoms]
        reports.append(SpectralReport(lam, depth, atoms, len(lefts) - 1, off, len(atoms) - off,
                                      o_loc, o_mass, o_off, evidence, crit_fail))
    return reports
