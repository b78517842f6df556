"""Cauchy, Poisson and conjugate-Poisson transforms, boundary limits and
principal-value integrals.

Conventions: ``K m(z) = (1/pi) * sum(w / (x - z))`` for an atomic measure and
``K u(z) = (1/pi) * int u(t) / (t - z) dt`` for a phase shift, so that for
``u = pi * indicator(a, b)`` one gets ``K u(z) = log((b - z) / (a - z))``.

Boundary behavior is probed along the vertical ray ``x + i*y`` with
geometrically decreasing ``y``; for the finite atomic objects handled here a
vertical limit exists exactly when the nontangential one does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .measures import AtomicMeasure, MeasureError
from .shifts import PhaseShift, StepFunction

PI = math.pi


class UndecidedError(RuntimeError):
    """A boundary limit could not be decided from the sampled evidence."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


def _as_uhp(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("points must lie in the open upper half-plane")
    return z


def _scalar_or_array(out: np.ndarray, z):
    return complex(out) if np.ndim(z) == 0 and np.iscomplexobj(out) else (
        float(out) if np.ndim(z) == 0 else out)


# -- transforms of measures -------------------------------------------------

def cauchy(m: AtomicMeasure, z):
    """``(1/pi) * sum(w_i / (x_i - z))``; vectorized over ``z``."""
    if m.infinity_mass > 0:
        raise MeasureError("Cauchy transform ignores mass at infinity; remove it first")
    zz = _as_uhp(z)
    if not m.locations:
        return _scalar_or_array(np.zeros_like(zz), z)
    out = (m.w / (m.x - zz[..., None])).sum(axis=-1) / PI
    return _scalar_or_array(out, z)


def poisson(m: AtomicMeasure, z):
    """Poisson integral plus ``y * infinity_mass``."""
    zz = _as_uhp(z)
    x, y = zz.real, zz.imag
    if m.locations:
        d = (x[..., None] - m.x) ** 2 + y[..., None] ** 2
        out = (m.w * y[..., None] / d).sum(axis=-1) / PI
    else:
        out = np.zeros_like(x)
    out = out + y * m.infinity_mass
    return float(out) if np.ndim(z) == 0 else out


# -- transforms of phase shifts ---------------------------------------------

def _step_of(u) -> StepFunction:
    if isinstance(u, StepFunction):
        return u
    return u.step()


def _cauchy_step_exact(s: StepFunction, zz: np.ndarray) -> np.ndarray:
    out = np.zeros_like(zz)
    for p, q, c in s.pieces():
        # each factor (q - z)/(p - z) has argument in (0, pi) on the upper half-plane
        out = out + (c / PI) * (np.log(q - zz) - np.log(p - zz))
    return out


def _quad_complex(fun, a, b, points=None):
    kw = dict(limit=400, epsabs=1e-13, epsrel=1e-12)
    if points is not None:
        kw["points"] = points
    re = integrate.quad(lambda t: fun(t).real, a, b, **kw)[0]
    im = integrate.quad(lambda t: fun(t).imag, a, b, **kw)[0]
    return complex(re, im)


def _cauchy_quadrature(u, z: complex) -> complex:
    if isinstance(u, PhaseShift) and not u.is_exact:
        gx = np.asarray(u.grid_x)
        gv = np.asarray(u.grid_v)
        inner = [t for t in gx[1:-1]][:300] if len(gx) <= 302 else None
        val = _quad_complex(lambda t: np.interp(t, gx, gv) / (t - z), gx[0], gx[-1], points=inner)
        return val / PI
    total = 0j
    for p, q, c in _step_of(u).pieces():
        total += c * _quad_complex(lambda t: 1.0 / (t - z), p, q)
    return total / PI


def cauchy_of_shift(u, z, method: str = "auto"):
    """``K u(z)``.  Exact log-sum for piecewise-constant shifts; quadrature otherwise.

    ``method="quad"`` forces quadrature (lower trust; used as an independent
    check of the closed form).
    """
    zz = _as_uhp(z)
    exact_ok = isinstance(u, StepFunction) or u.is_exact
    if method == "auto":
        method = "exact" if exact_ok else "quad"
    if method == "exact":
        if not exact_ok:
            raise MeasureError("closed form needs a piecewise-constant shift")
        out = _cauchy_step_exact(_step_of(u), zz)
    elif method == "quad":
        out = np.vectorize(lambda w: _cauchy_quadrature(u, w), otypes=[complex])(zz)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(out) if np.ndim(z) == 0 else out


def conj_poisson(u, z, method: str = "auto"):
    """Conjugate Poisson integral ``Q u = -Re K u``."""
    out = -np.real(cauchy_of_shift(u, z, method))
    return float(out) if np.ndim(z) == 0 else out


def poisson_of_shift(u, z, method: str = "auto"):
    """Poisson integral of a shift, ``P u = Im K u``."""
    out = np.imag(cauchy_of_shift(u, z, method))
    return float(out) if np.ndim(z) == 0 else out


# -- boundary limits --------------------------------------------------------

@dataclass(frozen=True)
class LimitConfig:
    y0: float = 0.1
    ratio: float = 0.5
    steps: int = 40
    tol: float = 1e-8
    cap: float = 1e12
    tail: int = 8

    def __post_init__(self):
        if not (self.y0 > 0 and 0 < self.ratio < 1 and self.tol > 0 and self.cap > 0):
            raise ValueError("invalid limit configuration")
        if self.tail < 2 or self.steps < self.tail + 2:
            raise ValueError("need steps >= tail + 2 and tail >= 2")

    def ys(self) -> np.ndarray:
        return self.y0 * self.ratio ** np.arange(self.steps)


DEFAULT_LIMIT = LimitConfig()


@dataclass(frozen=True)
class BoundaryLimitResult:
    kind: str  # converged | diverges_to_plus_inf | diverges_to_minus_inf | undecided
    value: complex | None
    evidence: tuple[tuple[float, complex], ...] = field(default=(), repr=False)

    @property
    def converged(self) -> bool:
        return self.kind == "converged"

    @property
    def diverges(self) -> bool:
        return self.kind.startswith("diverges")


def extrapolate_to_zero(ys: Sequence[float], fs: Sequence[complex]) -> complex:
    """Polynomial (Richardson/Neville) extrapolation of samples ``f(y)`` to ``y = 0``."""
    y = list(ys)
    p = [complex(v) for v in fs]
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (y[i] * p[i + 1] - y[i + m] * p[i]) / (y[i] - y[i + m])
    return p[0]


def _divergence_kind(v: complex) -> str:
    major = v.real if abs(v.real) >= abs(v.imag) else v.imag
    return "diverges_to_plus_inf" if major > 0 else "diverges_to_minus_inf"


def _evaluate_on_ray(f: Callable, x: float, ys: np.ndarray) -> np.ndarray:
    vals = f(x + 1j * ys)
    return np.broadcast_to(np.asarray(vals, dtype=complex), ys.shape).copy()


def limit_from_samples(ys: np.ndarray, vals: np.ndarray,
                       config: LimitConfig = DEFAULT_LIMIT) -> BoundaryLimitResult:
    evidence = tuple(zip(ys.tolist(), vals.tolist()))
    mags = np.abs(vals)
    if not np.all(np.isfinite(vals)):
        return BoundaryLimitResult("undecided", None, evidence)
    t = config.tail
    last = mags[-t:]
    if last[-1] > config.cap and np.all(np.diff(last) > 0):
        return BoundaryLimitResult(_divergence_kind(vals[-1]), None, evidence)
    ext = [extrapolate_to_zero(ys[k - t + 1:k + 1], vals[k - t + 1:k + 1])
           for k in range(t - 1, len(ys))]
    diffs = [abs(b - a) for a, b in zip(ext, ext[1:])]
    scale = max(1.0, abs(ext[-1]))
    if all(d < config.tol * scale for d in diffs[-3:]):
        return BoundaryLimitResult("converged", ext[-1], evidence)
    return BoundaryLimitResult("undecided", None, evidence)


def nontangential_limit(f: Callable, x: float,
                        config: LimitConfig = DEFAULT_LIMIT) -> BoundaryLimitResult:
    """Boundary limit of ``f`` at ``x`` along ``x + i*y_k``, ``y_k = y0 * ratio**k``.

    ``f`` must accept a numpy array of complex points.  Convergence is declared
    when the last three successive extrapolants agree to ``tol`` (relative to
    max(1, |value|)); divergence when ``|f|`` increases monotonically over the
    last ``tail`` samples and ends above ``cap``; otherwise the result is
    ``undecided``.
    """
    ys = config.ys()
    return limit_from_samples(ys, _evaluate_on_ray(f, x, ys), config)


def stieltjes_atom(f: Callable, x: float, config: LimitConfig = DEFAULT_LIMIT) -> float:
    """Mass at ``x`` of the measure whose Cauchy transform is ``f``: ``lim y * Im(pi f(x+iy))``."""
    res = nontangential_limit(lambda z: z.imag * np.imag(PI * np.asarray(f(z), dtype=complex)), x, config)
    if not res.converged:
        raise UndecidedError(f"Stieltjes inversion at {x} is {res.kind}", res)
    return max(0.0, float(np.real(res.value)))


@dataclass
class ClarkCheck:
    x: float
    expected: float
    result: BoundaryLimitResult
    ok: bool


@dataclass
class ClarkReport:
    checks: list[ClarkCheck]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def undecided(self) -> list[float]:
        return [c.x for c in self.checks if c.result.kind == "undecided"]


def verify_clark_limit(sigma: AtomicMeasure, f_values: Sequence[complex],
                       xs: Sequence[float] | None = None, tol: float = 1e-6,
                       config: LimitConfig = DEFAULT_LIMIT) -> ClarkReport:
    """Check that ``(1 + K(f sigma)) / (1 + K sigma)`` tends to ``f`` at atoms of ``sigma``."""
    f_values = np.asarray(f_values, dtype=complex)
    if len(f_values) != len(sigma):
        raise ValueError("need one f value per atom")
    fx, w = sigma.x, sigma.w
    fw = f_values * w

    def F(z):
        z = np.asarray(z, dtype=complex)
        num = 1 + (fw / (fx - z[..., None])).sum(axis=-1) / PI
        den = 1 + (w / (fx - z[..., None])).sum(axis=-1) / PI
        return num / den

    lookup = dict(zip(sigma.locations, f_values))
    checks = []
    for x in (sigma.locations if xs is None else xs):
        if x not in lookup:
            raise ValueError(f"{x} is not an atom of sigma")
        res = nontangential_limit(F, x, config)
        ok = res.converged and abs(res.value - lookup[x]) <= tol * max(1.0, abs(lookup[x]))
        checks.append(ClarkCheck(x, lookup[x], res, ok))
    return ClarkReport(checks)


# -- principal values -------------------------------------------------------

@dataclass(frozen=True)
class PvConfig:
    eps0: float = 0.5
    steps: int = 40
    tail: int = 8
    tol: float = 1e-8

    def eps(self) -> np.ndarray:
        return self.eps0 * 0.5 ** np.arange(self.steps)


@dataclass(frozen=True)
class PvResult:
    kind: str  # finite | plus_inf | minus_inf | undecided
    value: float | None
    partials: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    @property
    def finite(self) -> bool:
        return self.kind == "finite"



def truncated_kernel_integral(s: StepFunction, x: float, eps: float,
                              window: float = math.inf) -> float:
    """``int s(t) / (t - x) dt`` over ``eps < |t - x| < window`` (closed form)."""
    # clip in offsets t - x so that tiny eps does not cancel against x
    total = []
    for p, q, c in s.pieces():
        lo, hi = max(p - x, -window), min(q - x, window)
        a, b = lo, min(hi, -eps)
        if b > a:
            total.append(c * (math.log(-b) - math.log(-a)))
        a, b = max(lo, eps), hi
        if b > a:
            total.append(c * (math.log(b) - math.log(a)))
    return math.fsum(total)


def _pv_exact(s: StepFunction, x: float, window: float, config: PvConfig) -> PvResult:
    partials = tuple((float(e), truncated_kernel_integral(s, x, e, window)) for e in config.eps())
    left, right = s.left_value(x), s.right_value(x)
    if math.isfinite(window) and window <= 0:
        return PvResult("finite", 0.0, partials)
    if right > left:
        return PvResult("plus_inf", None, partials)
    if right < left:
        return PvResult("minus_inf", None, partials)
    gaps = [abs(k - x) for k in s.knots if k != x]
    if math.isfinite(window):
        gaps.append(window)
    e = 0.5 * min(gaps) if gaps else 1.0
    return PvResult("finite", truncated_kernel_integral(s, x, e, window), partials)


def classify_trend(values: Sequence[float], tail: int = 8, tol: float = 1e-8) -> str:
    """Classify a sequence of truncated integrals at halving scales."""
    v = np.asarray(values, dtype=float)
    if len(v) < tail + 1:
        return "undecided"
    inc = np.diff(v[-(tail + 1):])
    if np.all(np.abs(inc) < tol * max(1.0, abs(v[-1]))):
        return "finite"
    if np.all(inc > 0) and abs(inc[-1]) >= 0.5 * abs(inc[0]):
        return "plus_inf"
    if np.all(inc < 0) and abs(inc[-1]) >= 0.5 * abs(inc[0]):
        return "minus_inf"
    return "undecided"


def _pv_sampled(u: PhaseShift, x: float, window: float, config: PvConfig) -> PvResult:
    gx = np.asarray(u.grid_x)
    gv = np.asarray(u.grid_v)
    h = float(np.min(np.diff(gx))) if len(gx) > 1 else 1.0
    lo, hi = gx[0], gx[-1]
    if math.isfinite(window):
        lo, hi = max(lo, x - window), min(hi, x + window)

    def g(t):
        return np.interp(t, gx, gv) / (t - x)

    partials = []
    for e in config.eps():
        if e < 2 * h:
            break
        parts = []
        if x - e > lo:
            parts.append(integrate.quad(g, lo, x - e, limit=400)[0])
        if hi > x + e:
            parts.append(integrate.quad(g, x + e, hi, limit=400)[0])
        partials.append((float(e), math.fsum(parts)))
    kind = classify_trend([p[1] for p in partials], config.tail, config.tol)
    value = partials[-1][1] if kind == "finite" else None
    return PvResult(kind, value, tuple(partials))


def pv_integral(u, x: float, window: float = math.inf, config: PvConfig = PvConfig()) -> PvResult:
    """``p.v. int u(x + t) dt / t`` over ``|t| < window``.

    Exact shifts are decided in closed form from the one-sided values of
    ``u`` at ``x``; sampled shifts (lower trust) by the trend of the
    truncations over at least ``config.tail`` halvings of epsilon.
    """
    if isinstance(u, StepFunction) or u.is_exact:
        return _pv_exact(_step_of(u), x, window, config)
    return _pv_sampled(u, x, window, config)


@dataclass
class HilbertCorrection:
    ys: np.ndarray
    values: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def __float__(self) -> float:
        return self.sup


def hilbert_correction_check(u, x: float, config: LimitConfig = DEFAULT_LIMIT) -> HilbertCorrection:
    """``|Q u(x+iy) - (1/pi) int_{|t-x|>y} u(t) dt / (x - t)|`` along the sampled ``y``."""
    s = _step_of(u)
    ys = config.ys()
    q = conj_poisson(s, x + 1j * ys)
    trunc = np.array([-truncated_kernel_integral(s, x, y) / PI for y in ys])
    return HilbertCorrection(ys, np.abs(q - trunc))


def with_scale(config: LimitConfig, y0: float, steps: int | None = None) -> LimitConfig:
    return replace(config, y0=y0, steps=steps if steps is not None else config.steps)
