"""Discrete dispersion relation of the interior stencil.

Inserting a Bloch wave into the five-point stencil equation gives a quadratic
in c = cos(mu*h). Solving it in the shifted variable s = 1 - c keeps full
precision at small frequencies: the constant term of the shifted quadratic is
exactly the stencil's consistency residual minus Lambda^2 times its mass row
sum, so no catastrophic cancellation occurs even when |mu*h - Lambda| is
near 1e-14.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import Stencil
from .derivation import t3_value, t5_value
from .errors import (
    InsufficientDataError,
    ParameterError,
    StopBandError,
)
from .rules import QuadratureRule

#: fit window bounds and the round-off floor for error fitting
FIT_WINDOW = (1e-2, 2e-1)
FIT_FLOOR = 1e-14
DEFAULT_FIT_POINTS = 8

#: consistency residual budget for a usable stencil
CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class DispersionSample:
    """Normalized frequency Lambda = omega*h and discrete wavenumber mu*h."""

    Lambda: float
    mu_h: float

    @property
    def abs_error(self) -> float:
        return abs(self.mu_h - self.Lambda)


@dataclass(frozen=True)
class SeriesCoefficients:
    t3: float
    t5: float


def _shifted_quadratic(st: Stencil, lam: float):
    """Coefficients (a2, a1, a0) of the quadratic in s = 1 - cos(mu*h)."""
    a_term = st.k2 - lam**2 * st.m2
    b_term = st.k1 + lam**2 * st.m1
    a2 = 4.0 * a_term
    a1 = 2.0 * b_term - 8.0 * a_term
    a0 = st.stiffness_row_sum() - lam**2 * st.mass_row_sum()
    return a2, a1, a0


def _shifted_roots(st: Stencil, lam: float) -> list[float]:
    a2, a1, a0 = _shifted_quadratic(st, lam)
    if a2 == 0.0:
        return [-a0 / a1] if a1 != 0.0 else []
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        return []
    q = -0.5 * (a1 + math.copysign(math.sqrt(disc), a1))
    roots = []
    if a2 != 0.0:
        roots.append(q / a2)
    if q != 0.0:
        roots.append(a0 / q)
    return roots


def _valid_roots(st: Stencil, lam: float) -> list[float]:
    eps = 1e-12
    out = []
    for s in _shifted_roots(st, lam):
        if -eps <= s <= 2.0 + eps:
            out.append(min(max(s, 0.0), 2.0))
    return out


def stop_band_cutoff(st: Stencil, probe: float = 10.0) -> float:
    """Largest Lambda for which a real wavenumber branch exists."""
    lo = 1e-8
    if not _valid_roots(st, lo):
        return 0.0
    hi = probe
    while _valid_roots(st, hi):
        hi *= 2.0
        if hi > 1e6:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _valid_roots(st, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _error_from_shift(s: float, s0: float) -> float:
    """acos(1-s) - acos(1-s0) without cancellation.

    Integral of 1/sqrt(t(2-t)) from s0 to s, by two-point Gauss when the
    interval is narrow relative to its midpoint and directly otherwise.
    """
    ds = s - s0
    sbar = 0.5 * (s + s0)
    if sbar <= 0.0:
        return 0.0
    margin = 0.01 * min(sbar, 2.0 - sbar)
    if abs(ds) <= margin:
        off = 0.5 * ds / math.sqrt(3.0)
        total = 0.0
        for t in (sbar - off, sbar + off):
            total += 1.0 / math.sqrt(t * (2.0 - t))
        return 0.5 * ds * total
    return math.acos(1.0 - s) - math.acos(1.0 - s0)


def solve_dispersion(st: Stencil, lam: float) -> DispersionSample:
    """Discrete wavenumber mu*h for normalized frequency Lambda.

    Selects the branch continuous with mu*h -> Lambda as Lambda -> 0 (the
    root of the shifted quadratic closest to 1 - cos(Lambda), ties broken
    toward the smaller shift).
    """
    if lam <= 0.0:
        raise ParameterError(f"Lambda must be positive, got {lam}")
    if abs(st.stiffness_row_sum()) > CONSISTENCY_TOL:
        raise ParameterError(
            f"stencil is inconsistent: stiffness row sum {st.stiffness_row_sum():.3e}"
        )
    roots = _valid_roots(st, lam)
    if not roots:
        raise StopBandError(lam, stop_band_cutoff(st, probe=max(2.0 * lam, 1.0)))
    s0 = 2.0 * math.sin(0.5 * lam) ** 2
    s = min(roots, key=lambda r: (abs(r - s0), r))
    err = _error_from_shift(s, s0)
    return DispersionSample(Lambda=lam, mu_h=lam + err)


def series_coefficients(rule: QuadratureRule) -> SeriesCoefficients:
    """Coefficients of mu*h = L - t3*L^3 + t5*L^5 + O(L^7) for the rule.

    Written for two-point rules; rules with more nodes are evaluated with the
    same weighted sums extended over all nodes, which reproduces the fitted
    orders (validated against fit_error_order).
    """
    return SeriesCoefficients(
        t3=t3_value(rule.nodes, rule.weights),
        t5=t5_value(rule.nodes, rule.weights),
    )


def default_ladder(n_points: int = DEFAULT_FIT_POINTS) -> np.ndarray:
    return np.geomspace(FIT_WINDOW[0], FIT_WINDOW[1], n_points)


def fit_error_order(st: Stencil, ladder=None):
    """Least-squares (order, coefficient) of |mu*h - Lambda| ~ C * Lambda^p.

    Points with error below the round-off floor are dropped; fewer than four
    usable points raise InsufficientDataError.
    """
    if ladder is None:
        ladder = default_ladder()
    ladder = np.asarray(ladder, dtype=float)
    if ladder.size < 6:
        raise ParameterError(f"fit ladder needs at least 6 points, got {ladder.size}")
    lo, hi = FIT_WINDOW
    if ladder.min() < lo * (1.0 - 1e-9) or ladder.max() > hi * (1.0 + 1e-9):
        raise ParameterError(
            f"fit ladder must stay within [{lo}, {hi}], got "
            f"[{ladder.min()}, {ladder.max()}]"
        )
    lams, errs = [], []
    for lam in ladder:
        sample = solve_dispersion(st, float(lam))
        err = sample.abs_error
        if err > FIT_FLOOR and math.isfinite(err):
            lams.append(lam)
            errs.append(err)
    if len(errs) < 4:
        raise InsufficientDataError(
            f"only {len(errs)} ladder points above the round-off floor"
        )
    slope, intercept = np.polyfit(np.log(lams), np.log(errs), 1)
    return float(slope), float(math.exp(intercept))
