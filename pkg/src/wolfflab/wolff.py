"""Wolff potential W_{beta,p}(|y|^a u^q)(x) of a radial profile.

    W(x) = int_0^inf [ I(t) / t^{n - p beta} ]^{1/(p-1)} dt / t,
    I(t) = int_{B_t(x)} |y|^a u(y)^q dy.

The t-integral runs in s = log t over segments split at |x|/2, |x| and
2|x| (and at the support edge of a compactly supported profile), graded
toward each breakpoint.  Below t_lo the ball integral is replaced by its small-ball limit
g(|x|) |B_t|, and beyond the truncation radius the tail is closed with the
declared power-law decay of the profile.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .errors import DivergentPotential, DomainError, QuadratureFailure
from .params import ProblemParams
from .profiles import ball_volume, source_arrays
from .radgeom import QuadratureConfig, ball_integrals

MAX_TAIL_LOG_SPAN = 150.0


@dataclass
class WolffEvaluation:
    radius: float
    value: float
    w1: float
    w2: float
    truncation_radius: float
    tail_estimate: float
    error_estimate: float

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "value": self.value,
            "w1": self.w1,
            "w2": self.w2,
            "truncationRadius": self.truncation_radius,
            "tailEstimate": self.tail_estimate,
            "errorEstimate": self.error_estimate,
        }


@dataclass
class RatioReport:
    radii: list
    ratios: list
    u_values: list
    evaluations: list
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "ratios": list(self.ratios),
            "lower": self.lower,
            "upper": self.upper,
            "evaluations": [e.to_dict() for e in self.evaluations],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "u", "W", "w1", "w2", "ratio"])
        for r, u, ev, ratio in zip(self.radii, self.u_values, self.evaluations, self.ratios):
            w.writerow([repr(float(r)), repr(float(u)), repr(ev.value), repr(ev.w1), repr(ev.w2), repr(float(ratio))])
        return buf.getvalue()


def _tail_decay(params: ProblemParams, s_out: float) -> float:
    """Decay exponent kappa of the t-integrand at infinity (in s = log t)."""
    n, p, beta = params.n, params.p, params.beta
    sigma_g = math.inf if s_out == -math.inf else -s_out
    if not sigma_g > p * beta:
        raise DivergentPotential(
            f"outer t-integral diverges: |y|^a u^q decays like |y|^-{sigma_g:g}, needs > p*beta = {p * beta:g}")
    return (min(sigma_g, n) - p * beta) / (p - 1.0)


def _cuts(d, t_lo, t_hi, support):
    """Breakpoints in t: the three around |x|, plus the support edge if any."""
    cuts = {t_lo, 0.5 * d, d, 2.0 * d, t_hi}
    if support is not None:
        for c in (abs(d - support), d + support):
            if t_lo * 1.001 < c < t_hi / 1.001 and all(abs(math.log(c / k)) > 1e-3 for k in cuts):
                cuts.add(c)
    return sorted(cuts)


def _segments(cuts, quad):
    from .kernels._panels import panel_edges

    logs = [math.log(c) for c in cuts]
    return [panel_edges(logs[i], logs[i + 1], quad.h_max, quad.n_grade, quad.sigma) for i in range(len(logs) - 1)]


def _nodes(edges, quad):
    gx, gw = quad.rule()
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return s, w


def _integrate(arrays, params, d, segs, quad, backend):
    n, p, beta = params.n, params.p, params.beta
    m = 1.0 / (p - 1.0)
    parts = []
    last = None
    for edges in segs:
        s, w = _nodes(edges, quad)
        ts = np.exp(s)
        vals = ball_integrals(arrays, n, d, ts, quad, backend)
        integrand = (np.maximum(vals, 0.0) / ts ** (n - p * beta)) ** m
        parts.append(float(np.dot(w, integrand)))
        last = (s, integrand)
    return parts, last


def wolff_potential(u, params: ProblemParams, x: float, quad: QuadratureConfig | None = None,
                    *, backend=None) -> WolffEvaluation:
    """W_{beta,p}(|y|^a u^q) at a point with |x| = ``x`` > 0."""
    quad = quad or QuadratureConfig()
    d = float(x)
    if not d > 0:
        raise DomainError("Wolff potential is evaluated at |x| > 0")
    impl = backend or kernels.active
    n, p, beta = params.n, params.p, params.beta
    m = 1.0 / (p - 1.0)
    arrays = source_arrays(u, params.q, params.a)
    lx, ly, s_in, s_out = arrays
    if s_in + n <= 0:
        raise DivergentPotential("|y|^a u^q is not locally integrable at the origin")
    kappa = _tail_decay(params, s_out)

    head_pow = p * beta * m
    delta = min(1e-2, (1e-3 * quad.rtol) ** (1.0 / (head_pow + 2.0)))
    t_lo = delta * d
    span = math.log(10.0 / quad.rtol) / kappa
    e_pos = max(n + s_in, n + (s_out if s_out != -math.inf else -n), 1.0)
    max_span = min(MAX_TAIL_LOG_SPAN, 500.0 / e_pos)
    span = min(span, max_span)
    t_hi = 2.0 * d * math.exp(span)

    g_d = math.exp(float(impl.log_eval(lx, ly, s_in, s_out, np.array([math.log(d)]))[0]))
    head = (g_d * ball_volume(n)) ** m * t_lo ** head_pow / head_pow
    support = math.exp(lx[-1]) if s_out == -math.inf else None
    cuts = _cuts(d, t_lo, t_hi, support)
    inner = sum(1 for c in cuts[1:] if c <= 0.5 * d * (1 + 1e-12))

    cfg = quad
    while True:
        segs = _segments(cuts, cfg)
        fine, (s_last, g_last) = _integrate(arrays, params, d, segs, cfg, impl)
        rough, _ = _integrate(arrays, params, d, segs, cfg.coarse(), impl)
        g_end = g_last[-1]
        tail = g_end / kappa
        # observed log-slope near t_hi checks the declared decay
        j = int(np.searchsorted(s_last, s_last[-1] - 0.5))
        if g_last[j] > 0 and g_end > 0 and s_last[-1] > s_last[j]:
            slope = (math.log(g_end) - math.log(g_last[j])) / (s_last[-1] - s_last[j])
            tail_err = tail * abs(slope + kappa) / kappa
        else:
            tail_err = 0.0
        w1 = head + sum(fine[:inner])
        w2 = sum(fine[inner:]) + tail
        value = w1 + w2
        quad_err = abs(sum(fine) - sum(rough))
        err = quad_err + tail_err + head * delta ** 2
        if err <= quad.rtol * value or value == 0.0:
            break
        # the source may not have reached its tail regime by t_hi yet
        if tail_err > quad_err and math.log(t_hi / (2.0 * d)) + span <= max_span:
            t_hi *= math.exp(span)
            cuts = _cuts(d, t_lo, t_hi, support)
            continue
        nxt = cfg.refined()
        if sum(len(e) - 1 for e in _segments(cuts, nxt)) > quad.max_panels:
            raise QuadratureFailure(f"Wolff potential at |x|={d:g}: error {err:.3g} above rtol {quad.rtol:g}")
        cfg = nxt
    return WolffEvaluation(d, float(value), float(w1), float(w2), float(t_hi), float(tail), float(err))


def wolff_split(u, params: ProblemParams, x: float, quad: QuadratureConfig | None = None):
    """(W_1, W_2): the t-integral over (0, |x|/2) and over (|x|/2, inf)."""
    ev = wolff_potential(u, params, x, quad)
    return ev.w1, ev.w2


def ratio_R(u, params: ProblemParams, radii, quad: QuadratureConfig | None = None) -> RatioReport:
    """R(x) = u(x) / W(x) sampled at ``radii``."""
    radii = [float(r) for r in radii]
    evs = [wolff_potential(u, params, r, quad) for r in radii]
    uvals = [float(u(r)) for r in radii]
    ratios = [uv / ev.value for uv, ev in zip(uvals, evs)]
    return RatioReport(radii, ratios, uvals, evs, min(ratios), max(ratios))


def wolff_exponent(params: ProblemParams, t: float) -> float:
    """Decay exponent of W for u = c|x|^-t: W(d) = K d^{-(q t - a - p beta)/(p-1)}."""
    return (params.q * t - params.a - params.p * params.beta) / (params.p - 1.0)
