"""Rank-one perturbation calculus on the real line.

``A_lam = A_0 + lam * (., phi) phi`` with spectral measure ``nu_lam`` of the
cyclic vector.  The resolvent identity gives
``K nu_lam = K nu_0 / (1 + pi * lam * K nu_0)``; the characteristic function
``phi = (w - 1) / (w + 1)`` with ``w = -i K nu_0`` parametrizes the circle family
``P mu_alpha = Re((alpha + phi) / (alpha - phi))``, and
``P nu_lam = c * P mu_beta`` with ``beta = (1 + i pi lam) / (1 - i pi lam)``,
``c = 1 / (1 + pi^2 lam^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import optimize

from .measures import AtomicMeasure, MeasureError
from .transforms import (DEFAULT_LIMIT, BoundaryLimitResult, LimitConfig, UndecidedError,
                         cauchy, nontangential_limit, stieltjes_atom)

PI = math.pi


@dataclass(frozen=True)
class CircleParam:
    alpha: complex
    scale_c: float = 1.0

    def __post_init__(self):
        if abs(abs(self.alpha) - 1) > 1e-12:
            raise ValueError(f"|alpha| = {abs(self.alpha)} is not 1")
        if not self.scale_c > 0:
            raise ValueError("scale must be positive")


def coupling_to_circle(lam: float) -> CircleParam:
    beta = (1 + 1j * PI * lam) / (1 - 1j * PI * lam)
    return CircleParam(complex(beta), 1.0 / (1.0 + PI ** 2 * lam ** 2))


def circle_to_coupling(alpha: complex | CircleParam) -> float:
    a = alpha.alpha if isinstance(alpha, CircleParam) else complex(alpha)
    if abs(a + 1) < 1e-15:
        raise ValueError("alpha = -1 corresponds to infinite coupling")
    return float(((1j / PI) * (1 - a) / (1 + a)).real)


def _alpha(alpha) -> complex:
    return alpha.alpha if isinstance(alpha, CircleParam) else complex(alpha)


def perturbed_cauchy(m0: AtomicMeasure, lam: float, z):
    k = np.asarray(cauchy(m0, z), dtype=complex)
    out = k / (1 + PI * lam * k)
    return complex(out) if np.ndim(z) == 0 else out


# -- poles and residues of the resolvent formula ------------------------------

def _secular(t: np.ndarray, w: np.ndarray, lam: float):
    def g(x):
        # brackets start one ulp from a pole, where the sum may overflow to +-inf
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return 1.0 + lam * float(np.sum(w / (t - x)))
    return g


def perturbed_atoms(m0: AtomicMeasure, lam: float) -> AtomicMeasure:
    """Atoms of ``nu_lam``: zeros of ``1 + lam * sum(w / (t - x))`` with mass
    ``1 / (lam^2 * sum(w / (t - r)^2))``."""
    if lam == 0 or not len(m0):
        return m0
    if m0.infinity_mass > 0:
        raise MeasureError("measure must be compactly supported")
    t, w = m0.x, m0.w
    g = _secular(t, w, lam)
    reach = abs(lam) * float(w.sum()) + 1.0
    if lam > 0:
        brackets = list(zip(t[:-1], t[1:])) + [(t[-1], t[-1] + reach)]
    else:
        brackets = [(t[0] - reach, t[0])] + list(zip(t[:-1], t[1:]))
    roots = []
    for lo, hi in brackets:
        lo = np.nextafter(lo, hi) if lo in t else lo
        hi = np.nextafter(hi, lo) if hi in t else hi
        roots.append(optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))
    r = np.asarray(roots)
    masses = [1.0 / (lam ** 2 * float(np.sum(w / (t - x) ** 2))) for x in r]
    return AtomicMeasure.from_arrays(r, masses, tol=0.0)


# -- characteristic function and the circle family ----------------------------

@dataclass(frozen=True)
class CharFunction:
    base_measure: AtomicMeasure

    def __post_init__(self):
        if self.base_measure.infinity_mass > 0:
            raise MeasureError("base measure must be compactly supported")

    def __call__(self, z):
        return char_function_eval(self, z)


def char_function_eval(cf: CharFunction, z):
    w = -1j * np.asarray(cauchy(cf.base_measure, z), dtype=complex)
    out = (w - 1) / (w + 1)
    return complex(out) if np.ndim(z) == 0 else out


def clark_member_transform(cf: CharFunction, alpha, z):
    """Herglotz function ``i (alpha + phi) / (alpha - phi)``; its imaginary part is ``P mu_alpha``."""
    a = _alpha(alpha)
    phi = np.asarray(char_function_eval(cf, z), dtype=complex)
    out = 1j * (a + phi) / (a - phi)
    return complex(out) if np.ndim(z) == 0 else out


def clark_member_poisson(cf: CharFunction, alpha, z):
    out = np.imag(clark_member_transform(cf, alpha, z))
    return float(out) if np.ndim(z) == 0 else out


@dataclass(frozen=True)
class SpectralVerdict:
    kind: str  # atom | no_atom | singular_continuous_evidence | undecided
    x: float
    mass: float = 0.0
    evidence: tuple[BoundaryLimitResult, ...] = field(default=(), repr=False)
    evidence_rate: float = 0.0

    def __post_init__(self):
        if self.kind == "atom" and not self.mass > 0:
            raise ValueError("atom verdict needs positive mass")


@dataclass(frozen=True)
class AtomTestConfig:
    match_tol: float = 1e-6
    quotient_tol: float = 1e-6
    steps: int = 12
    scale: float = 0.25
    refinements: int = 2      # retries with the ray start divided by 8 after an undecided verdict


def _log_slope(result: BoundaryLimitResult, tail: int = 8) -> float:
    """Slope of log|f| against log(1/y) over the last samples."""
    ev = result.evidence[-tail:]
    if len(ev) < 2:
        return 0.0
    ly = np.log([1.0 / y for y, _ in ev])
    lf = np.log(np.maximum([abs(v) for _, v in ev], 1e-300))
    return float(np.polyfit(ly, lf, 1)[0])


def _ray_config(cf: CharFunction, x: float, cfg: AtomTestConfig, tol: float) -> LimitConfig:
    d = np.abs(cf.base_measure.x - x) if len(cf.base_measure) else np.array([])
    d = d[d > 0]
    y0 = cfg.scale * float(d.min()) if d.size else 0.1
    return LimitConfig(y0=min(y0, 0.1), ratio=0.5, steps=cfg.steps, tol=tol, tail=8)


def atom_test_nontangential(cf: CharFunction, alpha, x: float,
                            config: AtomTestConfig = AtomTestConfig()) -> SpectralVerdict:
    """Point-mass test for ``mu_alpha`` at ``x``: ``phi -> alpha`` and a finite
    nontangential derivative ``(phi(z) - alpha) / (z - x)``."""
    verdict = _atom_test_once(cf, alpha, x, config)
    for _ in range(config.refinements):
        if verdict.kind != "undecided":
            break
        config = replace(config, scale=config.scale / 8)
        verdict = _atom_test_once(cf, alpha, x, config)
    return verdict


def _atom_test_once(cf: CharFunction, alpha, x: float, config: AtomTestConfig) -> SpectralVerdict:
    a = _alpha(alpha)
    lim_cfg = _ray_config(cf, x, config, config.match_tol)
    lim = nontangential_limit(lambda z: char_function_eval(cf, z), x, lim_cfg)
    if not lim.converged:
        return SpectralVerdict("undecided", x, evidence=(lim,))
    if abs(lim.value - a) > config.match_tol:
        return SpectralVerdict("no_atom", x, evidence=(lim,))
    q_cfg = _ray_config(cf, x, config, config.quotient_tol)
    # measured against the boundary value rather than alpha: a root known to
    # float precision leaves phi(x) - alpha ~ 1e-11, which would add a 1/y term
    base = complex(lim.value)
    quot = nontangential_limit(lambda z: (char_function_eval(cf, z) - base) / (z - x), x, q_cfg)
    rate = _log_slope(quot)
    if quot.diverges:
        return SpectralVerdict("singular_continuous_evidence", x, evidence=(lim, quot), evidence_rate=rate)
    if not quot.converged:
        return SpectralVerdict("undecided", x, evidence=(lim, quot), evidence_rate=rate)
    try:
        mass = stieltjes_atom(lambda z: clark_member_transform(cf, a, z), x, q_cfg)
    except UndecidedError:
        return SpectralVerdict("undecided", x, evidence=(lim, quot), evidence_rate=rate)
    if not mass > 0:
        return SpectralVerdict("no_atom", x, evidence=(lim, quot), evidence_rate=rate)
    return SpectralVerdict("atom", x, mass, (lim, quot), rate)


def classify_points(m0: AtomicMeasure, lam: float, xs: Sequence[float],
                    config: AtomTestConfig = AtomTestConfig()) -> list[SpectralVerdict]:
    """Atom verdicts for ``nu_lam`` at each ``x``; masses are those of ``nu_lam``."""
    cf = CharFunction(m0)
    cp = coupling_to_circle(lam)
    out = []
    for x in xs:
        v = atom_test_nontangential(cf, cp, float(x), config)
        if v.kind == "atom":
            v = SpectralVerdict("atom", v.x, v.mass * cp.scale_c, v.evidence, v.evidence_rate)
        out.append(v)
    return out
