"""Scalar-loop kernels compiled with numba.

Profiles reach the kernels as four plain values: log-radius nodes ``lx``,
log-density values ``ly``, and the log-log slopes ``s_in`` / ``s_out`` used
below the first and above the last node (``s_out = -inf`` means the density
vanishes past the grid).
"""
import math

import numpy as np
from numba import njit

from . import _panels

panel_edges = njit(cache=True)(_panels.panel_edges)


@njit(cache=True)
def log_eval(lx, ly, s_in, s_out, x):
    m = lx.size
    if x <= lx[0]:
        return ly[0] + s_in * (x - lx[0])
    if x >= lx[m - 1]:
        if x == lx[m - 1]:
            return ly[m - 1]
        return ly[m - 1] + s_out * (x - lx[m - 1])
    i = np.searchsorted(lx, x) - 1
    return ly[i] + (ly[i + 1] - ly[i]) * (x - lx[i]) / (lx[i + 1] - lx[i])


@njit(cache=True)
def _expm1_ratio(z):
    if abs(z) < 1e-12:
        return 1.0 + 0.5 * z
    return math.expm1(z) / z


@njit(cache=True)
def cumulative_nodes(lx, ly, s_in, n):
    """J(r_i) = int_0^{r_i} g(rho) rho^{n-1} drho at every node."""
    m = lx.size
    out = np.empty(m)
    b0 = s_in + n
    if b0 <= 0.0:
        out[:] = np.inf
        return out
    out[0] = math.exp(ly[0] + n * lx[0]) / b0
    for i in range(m - 1):
        dx = lx[i + 1] - lx[i]
        b = (ly[i + 1] - ly[i]) / dx + n
        out[i + 1] = out[i] + math.exp(ly[i] + n * lx[i]) * dx * _expm1_ratio(b * dx)
    return out


@njit(cache=True)
def radial_cumulative_one(lx, ly, s_in, s_out, cum, n, r):
    if r <= 0.0:
        return 0.0
    x = math.log(r)
    m = lx.size
    if x <= lx[0]:
        b0 = s_in + n
        if b0 <= 0.0:
            return np.inf
        return math.exp(ly[0] + s_in * (x - lx[0]) + n * x) / b0
    if x >= lx[m - 1]:
        if s_out == -np.inf or x == lx[m - 1]:
            return cum[m - 1]
        dx = x - lx[m - 1]
        return cum[m - 1] + math.exp(ly[m - 1] + n * lx[m - 1]) * dx * _expm1_ratio((s_out + n) * dx)
    i = np.searchsorted(lx, x) - 1
    dx = x - lx[i]
    b = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]) + n
    return cum[i] + math.exp(ly[i] + n * lx[i]) * dx * _expm1_ratio(b * dx)


@njit(cache=True)
def radial_cumulative(lx, ly, s_in, s_out, n, rs):
    cum = cumulative_nodes(lx, ly, s_in, n)
    out = np.empty(rs.size)
    for k in range(rs.size):
        out[k] = radial_cumulative_one(lx, ly, s_in, s_out, cum, n, rs[k])
    return out


SMALL_CAP = 0.25


@njit(cache=True)
def _cap_series(h, m):
    """I_h(m, m) = h^m / (m B(m,m)) * 2F1(m, 1-m; m+1; h), for small h."""
    log_beta = 2.0 * math.lgamma(m) - math.lgamma(2.0 * m)
    term = 1.0
    total = 1.0
    for k in range(200):
        term *= (k + 1.0 - m) * (m + k) / ((m + 1.0 + k) * (k + 1.0)) * h
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return math.exp(m * math.log(h) - log_beta) / m * total


@njit(cache=True)
def cap_fraction_one(h, n):
    """Fraction of S^{n-1} inside a polar cap with (1 - cos theta)/2 = h.

    Small caps use the hypergeometric series (the sine-power reduction
    below cancels there); larger ones reduce int_0^theta sin^k."""
    if h <= 0.0:
        return 0.0
    if h >= 1.0:
        return 1.0
    if h < SMALL_CAP:
        return _cap_series(h, 0.5 * (n - 1))
    k = n - 2
    c = 1.0 - 2.0 * h
    s = 2.0 * math.sqrt(h * (1.0 - h))
    if k % 2 == 1:
        val = 2.0 * h
        full = 2.0
        j0 = 3
    else:
        val = 2.0 * math.asin(math.sqrt(h))
        full = math.pi
        j0 = 2
    sp = s ** (j0 - 2)
    for j in range(j0, k + 1, 2):
        sp_next = sp * s  # sin^{j-1}
        val = -sp_next * c / j + (j - 1.0) / j * val
        full = (j - 1.0) / j * full
        sp = sp_next * s
    return val / full


@njit(cache=True)
def cap_fraction(hs, n):
    out = np.empty(hs.size)
    for i in range(hs.size):
        out[i] = cap_fraction_one(hs[i], n)
    return out


@njit(cache=True)
def ball_integral_one(lx, ly, s_in, s_out, cum, n, omega, d, t, gx, gw, h_max, n_grade, sigma):
    """int over B_t(x) of g(|y|) dy with |x| = d."""
    if t <= 0.0:
        return 0.0
    if d == 0.0:
        return omega * radial_cumulative_one(lx, ly, s_in, s_out, cum, n, t)
    total = 0.0
    if t > d:
        total += omega * radial_cumulative_one(lx, ly, s_in, s_out, cum, n, t - d)
    lo = abs(t - d)
    hi = t + d
    if lo < 1e-15 * hi:
        # origin on the sphere of the ball: near rho = 0 half of each shell is inside
        lo = 1e-15 * hi
        total += 0.5 * omega * radial_cumulative_one(lx, ly, s_in, s_out, cum, n, lo)
    if s_out == -np.inf:
        # compact support: stop the shells at the last node, where g jumps to 0
        hi = min(hi, math.exp(lx[-1]))
        if lo >= hi:
            return total
    edges = panel_edges(math.log(lo), math.log(hi), h_max, n_grade, sigma)
    acc = 0.0
    for e in range(edges.size - 1):
        half = 0.5 * (edges[e + 1] - edges[e])
        mid = 0.5 * (edges[e + 1] + edges[e])
        for k in range(gx.size):
            x = mid + half * gx[k]
            rho = math.exp(x)
            lg = log_eval(lx, ly, s_in, s_out, x)
            if lg == -np.inf:
                continue
            h = (t - d + rho) * (t + d - rho) / (4.0 * d * rho)
            acc += gw[k] * half * math.exp(lg + n * x) * cap_fraction_one(h, n)
    return total + omega * acc


@njit(cache=True)
def ball_integrals(lx, ly, s_in, s_out, n, omega, d, ts, gx, gw, h_max, n_grade, sigma):
    cum = cumulative_nodes(lx, ly, s_in, n)
    out = np.empty(ts.size)
    for i in range(ts.size):
        out[i] = ball_integral_one(lx, ly, s_in, s_out, cum, n, omega, d, ts[i],
                                   gx, gw, h_max, n_grade, sigma)
    return out


@njit(cache=True)
def log_eval_many(lx, ly, s_in, s_out, xs):
    out = np.empty(xs.size)
    for i in range(xs.size):
        out[i] = log_eval(lx, ly, s_in, s_out, xs[i])
    return out
