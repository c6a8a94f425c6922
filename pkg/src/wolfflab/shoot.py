"""Radial p-Laplace equation with a Hardy weight: exact singular solutions,
residual checks, shooting from the centre, and decay-rate fitting.

For u(x) = U(r) the equation reads

    -|U'|^{p-2} [ (p-1) U'' + (n-1) U'/r ] = r^a U^q.

Shooting integrates the flux form in x = log r,

    w = r^{n-1} |U'|^{p-2} U',   dw/dx = -r^{n+a} U^q,
    dU/dx = -r (|w| / r^{n-1})^{1/(p-1)},

which never divides by U' and so stays regular at the centre for p < 2.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ClassificationAmbiguous, DomainError, NotApplicable, StepSizeUnderflow,
                     WindowTooNarrow)
from .params import ProblemParams, derive_exponents
from .profiles import PowerLawProfile, RadialProfile

DEFAULT_R_MAX = 1e16
DEFAULT_ODE_TOL = 1e-10
RATE_BAND = 0.05
FIT_RESIDUAL_TOL = 5e-3
SAMPLES_PER_DECADE = 200
NOISE_FLOOR_FACTOR = 1e3


class Classification(str, enum.Enum):
    CROSSING = "Crossing"
    FAST_DECAY = "FastDecay"
    SLOW_DECAY = "SlowDecay"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class OdeState:
    r: float
    U: float
    w: float


@dataclass
class ShootingResult:
    alpha: float
    profile: RadialProfile
    classification: Classification
    fitted_rate: float
    fit_window: tuple
    fit_residual: float
    crossing_radius: float | None = None
    r: np.ndarray = field(default=None, repr=False)
    U: np.ndarray = field(default=None, repr=False)
    w: np.ndarray = field(default=None, repr=False)

    def state(self, i: int) -> OdeState:
        return OdeState(float(self.r[i]), float(self.U[i]), float(self.w[i]))

    def to_dict(self) -> dict:
        d = {
            "alpha": self.alpha,
            "classification": self.classification.value,
            "fittedRate": self.fitted_rate,
            "fitWindow": list(self.fit_window),
            "fitResidual": self.fit_residual,
        }
        if self.crossing_radius is not None:
            d["r0"] = self.crossing_radius
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _require_pde_mode(params):
    if params.beta != 1.0:
        raise NotApplicable("the differential equation corresponds to beta = 1")


def singular_profile(params: ProblemParams) -> PowerLawProfile:
    """The exact solution c|x|^-t with the slow rate t = (p+a)/(q-p+1)."""
    _require_pde_mode(params)
    n, p, q, a = params.n, params.p, params.q, params.a
    ex = derive_exponents(params)
    if q <= ex.q_liouville:
        raise NotApplicable(f"q={q:g} must exceed the Liouville threshold {ex.q_liouville:g}")
    t = (p + a) / (q - p + 1)
    bracket = n - 1 - (p - 1) * (t + 1)
    if not bracket > 0:
        raise NotApplicable("n - 1 - (p-1)(t+1) must be positive")
    c = t ** ((p - 1) / (q - p + 1)) * bracket ** (1 / (q - p + 1))
    return PowerLawProfile(c, t)


def pde_residual(u, params: ProblemParams, r):
    """Relative residual of the radial equation at ``r`` (scalar or array)."""
    n, p, q, a = params.n, params.p, params.q, params.a
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("residual is evaluated at r > 0")
    d1, d2 = u.derivatives(r)
    U = np.asarray(u(r), dtype=float)
    lhs = -np.abs(d1) ** (p - 2) * ((p - 1) * d2 + (n - 1) * d1 / r)
    rhs = r ** a * U ** q
    res = (lhs - rhs) / np.maximum(rhs, np.finfo(float).tiny)
    return res if res.ndim else float(res)


def fit_decay_rate(u, window):
    """Negated least-squares slope of log u against log r over ``window``.

    Returns (rate, rms residual of the linear fit).
    """
    lo, hi = float(window[0]), float(window[1])
    if not (lo > 0 and hi > lo) or math.log10(hi / lo) < 1.0 - 1e-12:
        raise WindowTooNarrow("fit window must span at least one decade")
    if isinstance(u, RadialProfile):
        if lo < u.grid[0] * (1 - 1e-12) or hi > u.grid[-1] * (1 + 1e-12):
            raise WindowTooNarrow("fit window must lie inside the profile grid")
        mask = (u.grid >= lo * (1 - 1e-12)) & (u.grid <= hi * (1 + 1e-12))
        r, vals = u.grid[mask], u.values[mask]
    else:
        r = np.logspace(math.log10(lo), math.log10(hi), 201)
        vals = np.asarray(u(r), dtype=float)
    x, y = np.log(r), np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(-slope), float(np.sqrt(np.mean(resid ** 2)))


def _series_start(alpha, params):
    n, p, q, a = params.n, params.p, params.q, params.a
    gam = (p + a) / (p - 1)
    scale = alpha ** (-(q - p + 1) / (p + a))
    r0 = 1e-6 * scale
    k1 = (alpha ** q / (n + a)) ** (1 / (p - 1)) / gam
    U0 = alpha - k1 * r0 ** gam
    w0 = -alpha ** q * r0 ** (n + a) / (n + a) + q * alpha ** (q - 1) * k1 * r0 ** (n + a + gam) / (n + a + gam)
    return r0, U0, w0


def classify_rate(rate, residual, window, params, *, band=RATE_BAND, fit_tol=FIT_RESIDUAL_TOL):
    ex = derive_exponents(params)
    half = band * abs(ex.fast_rate - ex.slow_rate)
    fast = abs(rate - ex.fast_rate) <= half
    slow = abs(rate - ex.slow_rate) <= half
    if fast and slow:
        raise ClassificationAmbiguous(f"rate {rate:g} matches both the fast and the slow band")
    wide = math.log10(window[1] / window[0]) >= 2.0 - 1e-9
    if residual > fit_tol or not wide:
        return Classification.UNDETERMINED
    if fast:
        return Classification.FAST_DECAY
    if slow:
        return Classification.SLOW_DECAY
    return Classification.UNDETERMINED


def shoot_radial(alpha: float, params: ProblemParams, r_max: float = DEFAULT_R_MAX,
                 ode_tol: float = DEFAULT_ODE_TOL) -> ShootingResult:
    """Shoot from U(0) = alpha and classify the trajectory.

    Integration stops at the first zero of U (Crossing) or at ``r_max``.
    The trusted range ends at ``r_max`` or where U first drops below the
    round-off floor ``1e3 * ode_tol * alpha``; a zero reached more than a
    factor 2 past that point is drift, not a crossing.  The outer two
    decades of the trusted range are fitted and compared with the fast and
    slow rates.
    """
    _require_pde_mode(params)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if r_max < 1e4:
        raise DomainError("r_max must be at least 1e4")
    n, p, q, a = params.n, params.p, params.q, params.a
    m = 1.0 / (p - 1.0)
    r0, U0, w0 = _series_start(alpha, params)

    def rhs(x, y):
        r = math.exp(x)
        U, w = y
        dU = -r * (abs(w) / r ** (n - 1)) ** m
        dw = -r ** (n + a) * max(U, 0.0) ** q
        return [dU, dw]

    def hits_zero(x, y):
        return y[0]

    hits_zero.terminal = True
    hits_zero.direction = -1

    x0, x1 = math.log(r0), math.log(r_max)
    sol = solve_ivp(rhs, (x0, x1), [U0, w0], method="DOP853", rtol=ode_tol,
                    atol=[alpha * 1e-30, abs(w0) * 1e-30], events=hits_zero, dense_output=True)
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message)

    # Absolute round-off in U sits near ode_tol * alpha; below this floor a
    # decaying solution is no longer resolved.
    floor = NOISE_FLOOR_FACTOR * ode_tol * alpha
    event_x = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    x_stop = event_x if event_x is not None else x1
    count = max(int((x_stop - x0) / math.log(10) * SAMPLES_PER_DECADE), 16)
    xs = np.linspace(x0, x_stop, count + 1)
    U, w = sol.sol(xs)
    below = np.nonzero(U < floor)[0]
    x_floor = xs[below[0]] if below.size else None

    crossing = None
    if event_x is not None and (x_floor is None or event_x - x_floor <= math.log(2.0)):
        crossing = math.exp(event_x)
        keep = U > 0
    elif x_floor is not None:
        keep = xs < x_floor
    else:
        keep = np.ones(xs.size, dtype=bool)
    xs, U, w = xs[keep], U[keep], w[keep]
    rs = np.exp(xs)
    dU = -(np.abs(w) / rs ** (n - 1)) ** m

    if crossing is not None:
        prof = RadialProfile(rs, U, 0.0, math.inf, derivative=dU)
        nan = float("nan")
        return ShootingResult(alpha, prof, Classification.CROSSING, nan, (nan, nan), nan,
                              crossing, rs, U, w)

    r_end = float(rs[-1])
    window = (r_end / 100.0, r_end)
    prof = RadialProfile(rs, U, 0.0, math.inf, derivative=dU)
    if r_end / rs[0] < 100.0:
        nan = float("nan")
        return ShootingResult(alpha, prof, Classification.UNDETERMINED, nan, (nan, nan), nan, None, rs, U, w)
    rate, resid = fit_decay_rate(prof, window)
    cls = classify_rate(rate, resid, window, params)
    ex = derive_exponents(params)
    declared = {Classification.FAST_DECAY: ex.fast_rate,
                Classification.SLOW_DECAY: ex.slow_rate}.get(cls, rate)
    prof = RadialProfile(rs, U, 0.0, declared, derivative=dU)
    return ShootingResult(alpha, prof, cls, rate, window, resid, None, rs, U, w)
