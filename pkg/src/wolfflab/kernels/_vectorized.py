"""Pure-numpy versions of the kernels in ``_loops``.

Same node layout and same formulas, vectorised over quadrature nodes; the
cap fraction goes through the regularized incomplete beta function
instead of the sine-power recurrence.
"""
import numpy as np
from scipy.special import betainc

from ._panels import panel_edges


def log_eval(lx, ly, s_in, s_out, x):
    x = np.asarray(x, dtype=float)
    out = np.interp(x, lx, ly)
    below = x < lx[0]
    out[below] = ly[0] + s_in * (x[below] - lx[0])
    above = x > lx[-1]
    if s_out == -np.inf:
        out[above] = -np.inf
    else:
        out[above] = ly[-1] + s_out * (x[above] - lx[-1])
    return out


def _expm1_ratio(z):
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-12
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, np.expm1(safe) / safe)


def cumulative_nodes(lx, ly, s_in, n):
    b0 = s_in + n
    if b0 <= 0.0:
        return np.full(lx.size, np.inf)
    dx = np.diff(lx)
    b = np.diff(ly) / dx + n
    seg = np.exp(ly[:-1] + n * lx[:-1]) * dx * _expm1_ratio(b * dx)
    head = np.exp(ly[0] + n * lx[0]) / b0
    return np.concatenate(([head], head + np.cumsum(seg)))


def radial_cumulative(lx, ly, s_in, s_out, n, rs, cum=None):
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    if cum is None:
        cum = cumulative_nodes(lx, ly, s_in, n)
    out = np.zeros(rs.size)
    pos = rs > 0
    x = np.log(rs[pos])
    res = np.empty(x.size)
    m = lx.size
    below = x <= lx[0]
    if np.any(below):
        b0 = s_in + n
        res[below] = np.inf if b0 <= 0 else np.exp(ly[0] + s_in * (x[below] - lx[0]) + n * x[below]) / b0
    above = x >= lx[-1]
    if np.any(above):
        dx = x[above] - lx[-1]
        if s_out == -np.inf:
            res[above] = cum[-1]
        else:
            res[above] = cum[-1] + np.exp(ly[-1] + n * lx[-1]) * dx * _expm1_ratio((s_out + n) * dx)
    mid = ~(below | above)
    if np.any(mid):
        xm = x[mid]
        i = np.clip(np.searchsorted(lx, xm) - 1, 0, m - 2)
        dx = xm - lx[i]
        b = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]) + n
        res[mid] = cum[i] + np.exp(ly[i] + n * lx[i]) * dx * _expm1_ratio(b * dx)
    out[pos] = res
    return out


def cap_fraction(hs, n):
    hs = np.clip(np.asarray(hs, dtype=float), 0.0, 1.0)
    m = 0.5 * (n - 1)
    return betainc(m, m, hs)


def ball_integral_one(lx, ly, s_in, s_out, cum, n, omega, d, t, gx, gw, h_max, n_grade, sigma):
    if t <= 0.0:
        return 0.0
    if d == 0.0:
        return omega * radial_cumulative(lx, ly, s_in, s_out, n, [t], cum)[0]
    total = 0.0
    if t > d:
        total += omega * radial_cumulative(lx, ly, s_in, s_out, n, [t - d], cum)[0]
    lo, hi = abs(t - d), t + d
    if lo < 1e-15 * hi:
        lo = 1e-15 * hi
        total += 0.5 * omega * radial_cumulative(lx, ly, s_in, s_out, n, [lo], cum)[0]
    if s_out == -np.inf:
        hi = min(hi, float(np.exp(lx[-1])))
        if lo >= hi:
            return total
    edges = panel_edges(np.log(lo), np.log(hi), h_max, n_grade, sigma)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    rho = np.exp(x)
    lg = log_eval(lx, ly, s_in, s_out, x)
    h = (t - d + rho) * (t + d - rho) / (4.0 * d * rho)
    with np.errstate(invalid="ignore"):
        vals = np.exp(lg + n * x) * cap_fraction(h, n)
    vals[lg == -np.inf] = 0.0
    return total + omega * float(np.dot(w, vals))


def ball_integrals(lx, ly, s_in, s_out, n, omega, d, ts, gx, gw, h_max, n_grade, sigma):
    cum = cumulative_nodes(lx, ly, s_in, n)
    return np.array([
        ball_integral_one(lx, ly, s_in, s_out, cum, n, omega, d, float(t), gx, gw, h_max, n_grade, sigma)
        for t in ts
    ])
