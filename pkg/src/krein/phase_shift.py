"""Spectral shift of a rank-one pair and the pointwise criteria built on it.

For coupling ``lam`` the pair (mu, nu) and the shift u satisfy
``1 + pi*lam*K mu = exp(K u) = 1 / (1 - pi*lam*K nu)``.  For an exact shift
``exp(K u)`` is the rational function ``R(z) = prod (b - z) / (a - z)`` (its
reciprocal for sign -1), so both measures are read off from the residues of
``R`` and ``1/R``: mu sits at the up-jumps of u, nu at the down-jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .measures import AtomicMeasure, IntervalSet, MeasureError, validate
from .shifts import PhaseShift, StepFunction
from .transforms import (DEFAULT_LIMIT, LimitConfig, PvConfig, PvResult, cauchy, classify_trend,
                         nontangential_limit, pv_integral, truncated_kernel_integral)

PI = math.pi
EXACT_RESIDUE_LIMIT = 40  # above this many jumps, residues use log-space floats
ATOM_SKIP = 1e-9


@dataclass(frozen=True)
class MeasurePair:
    mu: AtomicMeasure
    nu: AtomicMeasure
    lam: float


def _check_coupling(u: PhaseShift, lam: float):
    if lam == 0:
        raise MeasureError("coupling 0 has no shift")
    if (lam > 0) != (u.sign > 0):
        raise MeasureError(f"shift sign {u.sign} does not match coupling {lam}")


# -- measure -> shift ------------------------------------------------------

@dataclass(frozen=True)
class SampledShiftResult:
    shift: PhaseShift
    skipped: tuple[float, ...]
    undecided: tuple[float, ...] = ()


def shift_from_pair(m: AtomicMeasure, lam: float, grid: Sequence[float],
                    config: LimitConfig = DEFAULT_LIMIT) -> SampledShiftResult:
    """Boundary values of ``arg(1 + pi*lam*K m)`` on ``grid`` (sampled shift).

    Grid points within 1e-9 of an atom are skipped and reported.
    """
    if lam == 0:
        raise MeasureError("coupling 0 has no shift")
    sign = 1 if lam > 0 else -1
    xs, vs, skipped, undecided = [], [], [], []

    def arg(z):
        return np.angle(1 + PI * lam * np.asarray(cauchy(m, z), dtype=complex))

    for x in np.asarray(grid, dtype=float):
        if len(m) and np.min(np.abs(m.x - x)) < ATOM_SKIP:
            skipped.append(float(x))
            continue
        res = nontangential_limit(arg, float(x), config)
        if not res.converged:
            undecided.append(float(x))
            continue
        xs.append(float(x))
        vs.append(float(np.clip(res.value.real, -PI, PI)))
    return SampledShiftResult(PhaseShift.sampled(xs, vs, sign), tuple(skipped), tuple(undecided))


def _bisect_sign_change(g, lo: float, hi: float) -> float:
    """Point where ``g`` changes sign on (lo, hi), to the last representable bit."""
    glo = np.sign(g(lo))
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        if np.sign(g(mid)) == glo:
            lo = mid
        else:
            hi = mid


def exact_shift_from_measure(m: AtomicMeasure, lam: float) -> PhaseShift:
    """Exact shift of ``m`` at coupling ``lam``.

    The boundary value ``1 + lam * sum(w / (t - x))`` is real off the atoms;
    the shift equals ``sign*pi`` where it is negative.  Its zeros are located
    by plain bisection on each bracket between consecutive atoms.
    """
    if lam == 0:
        raise MeasureError("coupling 0 has no shift")
    if m.infinity_mass > 0:
        raise MeasureError("measure must be compactly supported")
    t, w = m.x, m.w
    if not len(t):
        return PhaseShift.exact([], 1 if lam > 0 else -1)

    def g(x):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return 1.0 + lam * float(np.sum(w / (t - x)))

    reach = abs(lam) * float(w.sum()) + 1.0
    if lam > 0:
        ends = list(t[1:]) + [t[-1] + reach]
        roots = [_bisect_sign_change(g, np.nextafter(a, b), np.nextafter(b, a) if b in t else b)
                 for a, b in zip(t, ends)]
        return PhaseShift.exact(list(zip(t, roots)), 1)
    starts = [t[0] - reach] + list(t[:-1])
    roots = [_bisect_sign_change(g, np.nextafter(a, b) if a in t else a, np.nextafter(b, a))
             for a, b in zip(starts, t)]
    return PhaseShift.exact(list(zip(roots, t)), -1)


# -- shift -> measures -----------------------------------------------------

def exp_K_shift(u: PhaseShift, z):
    """``exp(K u)(z)`` as a rational product."""
    zz = np.asarray(z, dtype=complex)
    out = np.ones_like(zz)
    for a, b in u.intervals:
        out = out * ((b - zz) / (a - zz) if u.sign > 0 else (a - zz) / (b - zz))
    return complex(out) if np.ndim(z) == 0 else out


def _numer_denom(u: PhaseShift) -> tuple[list[float], list[float]]:
    """Zeros and poles of ``R = exp(K u)``."""
    lefts = [a for a, _ in u.intervals]
    rights = [b for _, b in u.intervals]
    return (rights, lefts) if u.sign > 0 else (lefts, rights)


def pole_coefficients(zeros: Sequence[float], poles: Sequence[float], exact: bool | None = None) -> list[float]:
    """For ``R(z) = prod (n_i - z) / (d_i - z)``, the coefficients ``C_j`` with
    ``R(z) ~ C_j / (d_j - z)`` near each pole ``d_j``.

    Exact rational arithmetic on the binary values of the endpoints when
    ``exact`` (default for up to 40 poles); log-space floats otherwise.
    """
    n = len(poles)
    if exact is None:
        exact = n <= EXACT_RESIDUE_LIMIT
    if exact:
        zf = [Fraction(v) for v in zeros]
        pf = [Fraction(v) for v in poles]
        out = []
        for j, d in enumerate(pf):
            c = zf[j] - d
            for i in range(n):
                if i != j:
                    c *= (zf[i] - d) / (pf[i] - d)
            out.append(c)
        return [float(c) for c in out]
    zs = np.asarray(zeros, dtype=float)
    ps = np.asarray(poles, dtype=float)
    out = []
    for s in range(0, n, 512):
        rows = np.arange(s, min(n, s + 512))
        num = zs[None, :] - ps[rows, None]
        den = ps[None, :] - ps[rows, None]
        den[np.arange(len(rows)), rows] = 1.0
        ratio = num / den
        sgn = np.prod(np.sign(ratio), axis=1)
        out.extend(sgn * np.exp(np.sum(np.log(np.abs(ratio)), axis=1)))
    return [float(c) for c in out]


def pair_from_shift(u: PhaseShift, lam: float, exact: bool | None = None) -> MeasurePair:
    """The pair (mu, nu) with shift ``u`` at coupling ``lam``, by exact residues."""
    _check_coupling(u, lam)
    zeros, poles = _numer_denom(u)
    c_mu = pole_coefficients(zeros, poles, exact)
    c_nu = pole_coefficients(poles, zeros, exact)
    mu_mass = [c / lam for c in c_mu]
    nu_mass = [-c / lam for c in c_nu]
    if any(not v > 0 for v in mu_mass + nu_mass):
        raise MeasureError("nonpositive residue mass (intervals not disjoint?)")
    mu = AtomicMeasure.from_arrays(poles, mu_mass, tol=0.0)
    nu = AtomicMeasure.from_arrays(zeros, nu_mass, tol=0.0)
    return MeasurePair(mu, nu, lam)


def identity_residual(u: PhaseShift, pair: MeasurePair, zs) -> float:
    """Max relative residual of ``R = 1 + pi*lam*K mu`` and ``R * (1 - pi*lam*K nu) = 1``."""
    zs = np.asarray(zs, dtype=complex)
    r = np.asarray(exp_K_shift(u, zs))
    lam = pair.lam
    k_mu = np.asarray(cauchy(pair.mu, zs)) if len(pair.mu) else np.zeros_like(zs)
    k_nu = np.asarray(cauchy(pair.nu, zs)) if len(pair.nu) else np.zeros_like(zs)
    e1 = np.abs(r - 1 - PI * lam * k_mu) / np.maximum(1.0, np.abs(r))
    e2 = np.abs(r * (1 - PI * lam * k_nu) - 1)
    return float(max(e1.max(initial=0.0), e2.max(initial=0.0)))


# -- pointwise criteria ----------------------------------------------------

@dataclass(frozen=True)
class CriterionResult:
    verdict: str  # atom | no_atom | undecided
    value: float | None
    partials: tuple[tuple[float, float], ...] = field(default=(), repr=False)


def criterion_integrand(u: PhaseShift, x: float, side: str) -> StepFunction:
    """Numerator step ``v`` of the criterion integrand, oriented so that ``v / (y - x) >= 0``."""
    lift = [(x - 1.0, x + 1.0, PI)] if u.sign < 0 else []
    shift = u.step() + StepFunction.from_pieces(lift)
    if side == "mu":
        return StepFunction.from_pieces([(x, x + 1.0, PI)]) - shift
    # nu: (pi*chi(x-1, x) - u) / (x - y) = (u - pi*chi(x-1, x)) / (y - x)
    return shift - StepFunction.from_pieces([(x - 1.0, x, PI)])


def _criterion(u: PhaseShift, x: float, side: str, config: PvConfig) -> CriterionResult:
    if not u.is_exact:
        return _criterion_sampled(u, x, side, config)
    v = criterion_integrand(u, x, side)
    partials = tuple((float(e), truncated_kernel_integral(v, x, e, 1.0)) for e in config.eps())
    if v.left_value(x) != 0 or v.right_value(x) != 0:
        return CriterionResult("no_atom", None, partials)
    return CriterionResult("atom", truncated_kernel_integral(v, x, 0.0, 1.0), partials)


def _criterion_sampled(u: PhaseShift, x: float, side: str, config: PvConfig) -> CriterionResult:
    from scipy import integrate
    lift = PI if u.sign < 0 else 0.0

    def v(t):
        base = u(t) + lift
        if side == "mu":
            return (PI * (x < t < x + 1) - base) / (t - x)
        return (base - PI * (x - 1 < t < x)) / (t - x)

    gx = np.asarray(u.grid_x)
    h = float(np.min(np.diff(gx))) if len(gx) > 1 else 1.0
    partials = []
    for e in config.eps():
        if e < 2 * h:
            break
        s = integrate.quad(v, x - 1, x - e, limit=400)[0] + integrate.quad(v, x + e, x + 1, limit=400)[0]
        partials.append((float(e), s))
    kind = classify_trend([p[1] for p in partials], config.tail, config.tol)
    verdict = {"finite": "atom", "plus_inf": "no_atom"}.get(kind, "undecided")
    return CriterionResult(verdict, partials[-1][1] if verdict == "atom" else None, tuple(partials))


def atom_criterion_mu(u: PhaseShift, x: float, config: PvConfig = PvConfig()) -> CriterionResult:
    """Point-mass test for mu at ``x`` over the window [x-1, x+1]."""
    return _criterion(u, float(x), "mu", config)


def atom_criterion_nu(u: PhaseShift, x: float, config: PvConfig = PvConfig()) -> CriterionResult:
    """Point-mass test for nu at ``x`` over the window [x-1, x+1]."""
    return _criterion(u, float(x), "nu", config)


@dataclass(frozen=True)
class SupportResult:
    side: str  # mu_side | nu_side | neither | undecided
    pv: PvResult


def singular_support_test(u: PhaseShift, x: float, config: PvConfig = PvConfig()) -> SupportResult:
    """Sign of the divergence of ``p.v. int u(x+t) dt / t``: +inf on the mu side, -inf on the nu side."""
    pv = pv_integral(u, float(x), config=config)
    side = {"plus_inf": "mu_side", "minus_inf": "nu_side", "finite": "neither"}.get(pv.kind, "undecided")
    return SupportResult(side, pv)


@dataclass(frozen=True)
class RegionReport:
    ok: bool
    bad_fraction: float


def singularity_region_test(u: PhaseShift, k: IntervalSet, tol: float = 1e-6) -> RegionReport:
    """Whether ``|u|`` takes only the values 0 and pi on ``k``.

    Exact shifts pass by construction; sampled shifts report the fraction of
    grid points in ``k`` whose value is farther than ``tol`` from {0, pi}.
    """
    if u.is_exact:
        return RegionReport(True, 0.0)
    x = np.asarray(u.grid_x)
    v = np.abs(np.asarray(u.grid_v))
    inside = np.array([k.contains(t) for t in x], dtype=bool)
    if not inside.any():
        return RegionReport(True, 0.0)
    dist = np.minimum(v, np.abs(v - PI))[inside]
    frac = float(np.mean(dist > tol))
    return RegionReport(frac == 0.0, frac)


@dataclass(frozen=True)
class ShiftComparison:
    pv: PvResult
    f: float | None
    mu_density: float | None
    nu_density: float | None
    mu_relation: str
    nu_relation: str
    mu_masses: tuple[float, float]
    nu_masses: tuple[float, float]


def compare_shifts(u1: PhaseShift, u2: PhaseShift, x: float, lam: float = 1.0) -> ShiftComparison:
    """Relative behavior of the pairs of ``u1`` and ``u2`` at ``x``.

    With ``f = p.v. int (u1 - u2)(x+t) dt / t`` finite, the atom masses satisfy
    ``mu1(x) = exp(f/pi) * mu2(x)`` and ``nu1(x) = exp(-f/pi) * nu2(x)``.
    ``+inf`` means mu1 charges ``x`` where mu2 does not (and nu2 where nu1
    does not); ``-inf`` is the mirror case.
    """
    if u1.sign != u2.sign:
        raise MeasureError("shifts must have the same sign")
    lam = abs(lam) * u1.sign
    d = u1.step() - u2.step()
    pv = pv_integral(d, float(x))
    p1, p2 = pair_from_shift(u1, lam), pair_from_shift(u2, lam)
    mu = (p1.mu.mass_at(x, 0.0), p2.mu.mass_at(x, 0.0))
    nu = (p1.nu.mass_at(x, 0.0), p2.nu.mass_at(x, 0.0))
    if pv.kind == "finite":
        f = pv.value
        return ShiftComparison(pv, f, math.exp(f / PI), math.exp(-f / PI),
                               "mutually_continuous", "mutually_continuous", mu, nu)
    if pv.kind == "plus_inf":
        return ShiftComparison(pv, None, None, None, "mu1_not_abs_cont_wrt_mu2",
                               "nu2_not_abs_cont_wrt_nu1", mu, nu)
    if pv.kind == "minus_inf":
        return ShiftComparison(pv, None, None, None, "mu2_not_abs_cont_wrt_mu1",
                               "nu1_not_abs_cont_wrt_nu2", mu, nu)
    return ShiftComparison(pv, None, None, None, "undecided", "undecided", mu, nu)


def pair_is_valid(pair: MeasurePair) -> bool:
    return validate(pair.mu) is None and validate(pair.nu) is None
