"""Spheres cut by off-centre balls, and integrals of radial densities over balls.

For |x| = d, the ball B_t(x) meets the sphere {|y| = rho} in a polar cap of
half-angle theta* with cos theta* = (d^2 + rho^2 - t^2)/(2 d rho).  Writing
h = (1 - cos theta*)/2, the cap holds the fraction I_h((n-1)/2, (n-1)/2) of
the sphere, so

    int_{B_t(x)} g(|y|) dy = |S^{n-1}| int g(rho) rho^{n-1} I_h(...) drho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import DivergentIntegral, DomainError, QuadratureFailure
from .profiles import piecewise_arrays, sphere_area


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-8
    max_panels: int = 2000
    order: int = 16
    h_max: float = 0.5
    n_grade: int = 10
    sigma: float = 0.15

    def refined(self) -> "QuadratureConfig":
        return replace(self, h_max=self.h_max / 2, n_grade=self.n_grade + 4)

    def coarse(self) -> "QuadratureConfig":
        return replace(self, order=max(4, self.order - 6))

    def rule(self):
        return np.polynomial.legendre.leggauss(self.order)

    def panels_for(self, log_width: float) -> int:
        return max(2, math.ceil(log_width / self.h_max)) + 2 * self.n_grade


def _cap_h(rho, d, t):
    return (t - d + rho) * (t + d - rho) / (4.0 * d * rho)


def cap_measure(rho: float, d: float, t: float, n: int) -> float:
    """(n-1)-measure of {|y| = rho} inside B_t(x), |x| = d."""
    if rho < 0 or d < 0 or t < 0:
        raise DomainError("cap_measure needs rho, d, t >= 0")
    if n < 2:
        raise DomainError("cap_measure needs n >= 2")
    if rho == 0.0:
        return 0.0
    full = sphere_area(n) * rho ** (n - 1)
    if rho + d <= t:
        return full
    if rho >= d + t or rho <= d - t:
        return 0.0
    h = _cap_h(rho, d, t)
    if n == 3:
        return full * h
    return full * float(kernels.active.cap_fraction(np.array([h]), n)[0])


def cap_measure_closed_form_3d(rho, d, t):
    """2 pi rho^2 (1 - cos theta*), the n = 3 special case."""
    if rho + d <= t:
        return 4.0 * math.pi * rho ** 2
    if rho >= d + t or rho <= d - t:
        return 0.0
    cos_t = (d * d + rho * rho - t * t) / (2.0 * d * rho)
    return 2.0 * math.pi * rho ** 2 * (1.0 - cos_t)


def _check_origin(arrays, n, d, t):
    _, _, s_in, _ = arrays
    if t >= d and s_in + n <= 0:
        raise DivergentIntegral("origin", "density is not integrable at the origin inside the ball")


def ball_integrals(arrays, n: int, d: float, ts, quad: QuadratureConfig, backend=None) -> np.ndarray:
    """Vector of int_{B_t(x)} g for every t in ``ts`` (fixed rule, no error control)."""
    impl = backend or kernels.active
    lx, ly, s_in, s_out = arrays
    gx, gw = quad.rule()
    return impl.ball_integrals(np.ascontiguousarray(lx), np.ascontiguousarray(ly), float(s_in), float(s_out),
                               int(n), sphere_area(n), float(d), np.ascontiguousarray(ts, dtype=float),
                               gx, gw, quad.h_max, quad.n_grade, quad.sigma)


def ball_integral_radial(g, d: float, t: float, n: int, quad: QuadratureConfig | None = None,
                         *, full_output: bool = False):
    """int over B_t(x) of g(|y|) dy for a radial density ``g``, with |x| = d.

    ``g`` is any profile; its values are the density itself (apply the
    |y|^a u^q weighting beforehand, e.g. via ``profiles.source_arrays``), or
    a raw ``(lx, ly, s_in, s_out)`` tuple.  Refines until two Gauss rules
    agree to ``quad.rtol``.
    """
    quad = quad or QuadratureConfig()
    if t <= 0:
        raise DomainError("ball radius must be positive")
    if d < 0:
        raise DomainError("centre distance must be >= 0")
    arrays = g if isinstance(g, tuple) else piecewise_arrays(g)
    _check_origin(arrays, n, d, t)
    ts = np.array([t])
    cfg = quad
    while True:
        fine = ball_integrals(arrays, n, d, ts, cfg)[0]
        rough = ball_integrals(arrays, n, d, ts, cfg.coarse())[0]
        err = abs(fine - rough)
        if err <= quad.rtol * abs(fine) or fine == 0.0:
            fine, err = float(fine), float(err)
            return (fine, err) if full_output else fine
        width = math.log((t + d) / max(abs(t - d), 1e-15 * (t + d))) if d > 0 else 0.0
        nxt = cfg.refined()
        if nxt.panels_for(width) > quad.max_panels:
            raise QuadratureFailure(f"ball integral did not reach rtol={quad.rtol} (err {err:.3g})")
        cfg = nxt
