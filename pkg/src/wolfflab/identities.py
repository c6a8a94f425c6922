"""Norms, energies and the identities they satisfy.

All integrals are radial, int_0^inf F(r) dr/r with F = f(r) r^n, taken by
Simpson's rule in log r on the profile grid and closed analytically past
both ends.  Whether an integral is finite is decided from the declared
inner/tail exponents alone; quadrature never gets to overflow.  An inner
exponent of -inf marks a profile that vanishes below its first node.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import DivergentIntegral, NotCritical
from .params import ProblemParams, derive_exponents
from .profiles import PowerLawProfile, RadialProfile, ScaledProfile, sample, sphere_area
from .shoot import pde_residual

CRITICAL_RTOL = 1e-9


class Integrability(str, enum.Enum):
    FINITE = "Finite"
    DIVERGES_AT_TAIL = "DivergesAtTail"
    DIVERGES_AT_ORIGIN = "DivergesAtOrigin"


def _sides(origin_exp, tail_exp):
    """Divergent ends of int F dr/r with F ~ r^origin_exp at 0 and r^tail_exp at inf."""
    sides = []
    if not origin_exp > 0:
        sides.append("origin")
    if not tail_exp < 0:
        sides.append("tail")
    return sides


def _raise_if_divergent(origin_exp, tail_exp, what):
    sides = _sides(origin_exp, tail_exp)
    if sides:
        raise DivergentIntegral("+".join(sides), f"{what} diverges at {' and '.join(sides)}")


def _log_integral(r, F, origin_exp, tail_exp):
    """int_0^inf F dr/r from samples, with power-law end closures."""
    x = np.log(r)
    body = simpson(F, x=x)
    head = 0.0 if origin_exp == math.inf else F[0] / origin_exp
    tail = 0.0 if tail_exp == -math.inf else F[-1] / -tail_exp
    return float(body + head + tail)


def _as_grid(u, grid=None) -> RadialProfile:
    return sample(u, grid)


def _grad_exponents(u, p, n):
    s0, s_inf = u.inner_exponent, u.tail_exponent
    if s0 == -math.inf:
        origin = math.inf
    else:
        origin = n - p * (s0 + 1) if s0 > 0 else n
    tail = -math.inf if s_inf == math.inf else (n - p * (s_inf + 1) if s_inf > 0 else -1.0)
    return origin, tail


def _pow_exponents(u, power, weight, n):
    s0, s_inf = u.inner_exponent, u.tail_exponent
    origin = n + weight - power * s0
    tail = -math.inf if s_inf == math.inf else n + weight - power * s_inf
    return origin, tail


def lp_norm_power(u, s: float, n: int, *, grid=None) -> float:
    """||u||_s^s = |S^{n-1}| int u^s r^{n-1} dr."""
    oe, te = _pow_exponents(u, s, 0.0, n)
    _raise_if_divergent(oe, te, f"||u||_{s:g}")
    g = _as_grid(u, grid)
    return sphere_area(n) * _log_integral(g.grid, g.values ** s * g.grid ** n, oe, te)


def gradient_energy(u, p: float, n: int, *, grid=None) -> float:
    """||grad u||_p^p."""
    oe, te = _grad_exponents(u, p, n)
    _raise_if_divergent(oe, te, "||grad u||_p^p")
    g = _as_grid(u, grid)
    d1, _ = g._node_derivatives()
    return sphere_area(n) * _log_integral(g.grid, np.abs(d1) ** p * g.grid ** n, oe, te)


def source_energy(u, params: ProblemParams, *, grid=None) -> float:
    """int |x|^a u^{q+1} dx."""
    n, q, a = params.n, params.q, params.a
    oe, te = _pow_exponents(u, q + 1, a, n)
    _raise_if_divergent(oe, te, "int |x|^a u^(q+1)")
    g = _as_grid(u, grid)
    return sphere_area(n) * _log_integral(g.grid, g.values ** (q + 1) * g.grid ** (n + a), oe, te)


def tail_integrability(u, s: float, n: int) -> Integrability:
    """Is u in L^s?  Borderline (logarithmic) cases count as divergent."""
    if not s * u.tail_exponent > n:
        return Integrability.DIVERGES_AT_TAIL
    if not s * u.inner_exponent < n:
        return Integrability.DIVERGES_AT_ORIGIN
    return Integrability.FINITE


@dataclass
class PohozaevResult:
    lhs: float
    rhs: float
    balance_residual: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.balance_residual))


def pohozaev_coefficients(params: ProblemParams):
    n, p, q, a = params.n, params.p, params.q, params.a
    return 1.0 - n / p, (n + a) / (q + 1.0)


def pohozaev_check(u, params: ProblemParams, *, grid=None) -> PohozaevResult:
    """Gradient energy, source energy and the relative Pohozaev imbalance.

    The imbalance (1 - n/p) ||grad u||_p^p + (n+a)/(q+1) int |x|^a u^{q+1}
    is reported relative to the sum of the two terms' magnitudes.
    """
    grad = gradient_energy(u, params.p, params.n, grid=grid)
    src = source_energy(u, params, grid=grid)
    c1, c2 = pohozaev_coefficients(params)
    bal = c1 * grad + c2 * src
    return PohozaevResult(float(grad), float(src), float(abs(bal) / (abs(c1 * grad) + abs(c2 * src))))


@dataclass
class ScalingReport:
    lam: float
    theta: float
    norm_ratios: dict
    power_ratios: dict
    predicted_power_ratios: dict
    max_residual: float | None = None

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "theta": self.theta,
            "normRatios": {repr(k): v for k, v in self.norm_ratios.items()},
            "powerRatios": {repr(k): v for k, v in self.power_ratios.items()},
            "predictedPowerRatios": {repr(k): v for k, v in self.predicted_power_ratios.items()},
            "maxResidual": self.max_residual,
        }


def scaled_profile(u, lam: float, theta: float):
    if isinstance(u, (RadialProfile, PowerLawProfile)):
        return u.scaled(lam, theta)
    return ScaledProfile(u, lam, theta)


def scaling_check(u, params: ProblemParams, lam: float, theta: float, etas, *, grid=None,
                  residual_radii=None) -> ScalingReport:
    """Compare ||u_lam||_eta with ||u||_eta for u_lam(x) = lam^theta u(lam x).

    ``power_ratios`` holds ||u_lam||_eta^eta / ||u||_eta^eta, which should be
    lam^{eta theta - n}.  When theta is the slow rate the scaled profile is
    also checked against the equation.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    n = params.n
    ul = scaled_profile(u, lam, theta)
    norm_ratios, power_ratios, predicted = {}, {}, {}
    for eta in etas:
        base = lp_norm_power(u, eta, n, grid=grid)
        scaled = lp_norm_power(ul, eta, n, grid=grid)
        power_ratios[eta] = float(scaled / base)
        norm_ratios[eta] = power_ratios[eta] ** (1.0 / eta)
        predicted[eta] = float(lam ** (eta * theta - n))
    max_res = None
    slow = derive_exponents(params).slow_rate
    if params.beta == 1.0 and math.isclose(theta, slow, rel_tol=1e-12):
        radii = np.logspace(-1, 1, 7) if residual_radii is None else np.asarray(residual_radii)
        max_res = float(np.max(np.abs(pde_residual(ul, params, radii))))
    return ScalingReport(lam, theta, norm_ratios, power_ratios, predicted, max_res)


def hs_quotient(u, params: ProblemParams, *, grid=None) -> float:
    """||grad u||_p / (int |x|^a |u|^{q+1})^{1/(q+1)} at the critical exponent."""
    n, p, q, a = params.n, params.p, params.q, params.a
    crit = p * (n + a) / (n - p)
    if not math.isclose(q + 1.0, crit, rel_tol=CRITICAL_RTOL):
        raise NotCritical(f"q + 1 = {q + 1:g} but the critical value is {crit:g}")
    grad = gradient_energy(u, p, n, grid=grid)
    src = source_energy(u, params, grid=grid)
    return float(grad ** (1.0 / p) / src ** (1.0 / (q + 1.0)))


@dataclass
class EnergyReport:
    gradient_energy: float | None
    source_energy: float | None
    ls_norms: dict
    pohozaev_left: float | None
    pohozaev_right: float | None
    hs_quotient: float | None
    divergences: dict = field(default_factory=dict)

    def rows(self):
        yield ("gradientEnergy", self.gradient_energy)
        yield ("sourceEnergy", self.source_energy)
        for s, v in self.ls_norms.items():
            yield (f"lsNorm[{s!r}]", v)
        yield ("pohozaevLeft", self.pohozaev_left)
        yield ("pohozaevRight", self.pohozaev_right)
        yield ("hsQuotient", self.hs_quotient)

    def to_dict(self) -> dict:
        d = {k: (v if v is not None else "inf") for k, v in self.rows() if not k.startswith("lsNorm")}
        d["lsNorms"] = {repr(s): (v if v is not None else "inf") for s, v in self.ls_norms.items()}
        d["divergences"] = dict(self.divergences)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "finite"])
        for name, v in self.rows():
            w.writerow([name, "inf" if v is None else repr(float(v)), v is not None])
        return buf.getvalue()


def energy_report(u, params: ProblemParams, ss=(), *, grid=None) -> EnergyReport:
    div = {}

    def attempt(name, fn):
        try:
            return fn()
        except DivergentIntegral as exc:
            div[name] = exc.side
            return None
        except NotCritical:
            return None

    grad = attempt("gradientEnergy", lambda: gradient_energy(u, params.p, params.n, grid=grid))
    src = attempt("sourceEnergy", lambda: source_energy(u, params, grid=grid))
    norms = {s: attempt(f"lsNorm[{s!r}]", lambda s=s: lp_norm_power(u, s, params.n, grid=grid)) for s in ss}
    c1, c2 = pohozaev_coefficients(params)
    left = None if grad is None else c1 * grad
    right = None if src is None else -c2 * src
    hs = None
    if grad is not None and src is not None:
        hs = attempt("hsQuotient", lambda: hs_quotient(u, params, grid=grid))
    return EnergyReport(grad, src, norms, left, right, hs, div)
