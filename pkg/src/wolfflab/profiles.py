"""Positive radial profiles u(|x|).

Every profile answers ``u(r)``, ``derivatives(r) -> (U', U'')`` and carries
the power-law exponents that model it below its first node
(``inner_exponent``) and past its last node (``tail_exponent``): u behaves
like r^{-inner_exponent} near 0 and r^{-tail_exponent} at infinity.  A
``tail_exponent`` of ``inf`` means u vanishes beyond the grid.

``log_arrays()`` exposes the piecewise power-law representation the
kernels integrate exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DerivativeUnavailable, DomainError

DEFAULT_DECADES = (-8.0, 8.0)
DEFAULT_PER_DECADE = 400


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def ball_volume(n: int) -> float:
    return sphere_area(n) / n


def log_grid(lo_decade=DEFAULT_DECADES[0], hi_decade=DEFAULT_DECADES[1], per_decade=DEFAULT_PER_DECADE):
    count = int(round((hi_decade - lo_decade) * per_decade)) + 1
    return np.logspace(lo_decade, hi_decade, count)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    grid: np.ndarray
    values: np.ndarray
    inner_exponent: float = 0.0
    tail_exponent: float = math.inf
    derivative: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise DomainError("grid and values must be 1-D arrays of equal length >= 2")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be positive and strictly increasing")
        if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
            raise DomainError("profile values must be finite and positive")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.derivative is not None:
            object.__setattr__(self, "derivative", np.asarray(self.derivative, dtype=float))

    @property
    def decades(self) -> float:
        return math.log10(self.grid[-1] / self.grid[0])

    def log_arrays(self):
        return (np.log(self.grid), np.log(self.values),
                -float(self.inner_exponent), -float(self.tail_exponent))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lx, ly, s_in, s_out = self.log_arrays()
        x = np.log(np.maximum(r, 1e-300)).ravel()
        y = np.interp(x, lx, ly)
        lo, hi = x < lx[0], x > lx[-1]
        y[lo] = ly[0] + s_in * (x[lo] - lx[0])
        y[hi] = -np.inf if s_out == -math.inf else ly[-1] + s_out * (x[hi] - lx[-1])
        out = np.exp(y).reshape(r.shape)
        return out if out.ndim else float(out)

    def _node_derivatives(self):
        lx = np.log(self.grid)
        lu = np.log(self.values)
        slope = np.gradient(lu, lx, edge_order=2)
        curv = np.gradient(slope, lx, edge_order=2)
        r, u = self.grid, self.values
        d1 = u * slope / r if self.derivative is None else self.derivative
        d2 = u / r ** 2 * (slope ** 2 - slope + curv)
        return d1, d2

    def derivatives(self, r):
        """U'(r), U''(r) from finite differences on the log grid."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.grid[1]) or np.any(r > self.grid[-2]):
            raise DerivativeUnavailable("derivatives need r inside the grid interior")
        d1, d2 = self._node_derivatives()
        lx = np.log(self.grid)
        x = np.log(r)
        return np.interp(x, lx, d1), np.interp(x, lx, d2)

    def scaled(self, lam: float, theta: float) -> "RadialProfile":
        """u_lam(r) = lam^theta u(lam r), on the rescaled grid."""
        deriv = None if self.derivative is None else lam ** (theta + 1) * self.derivative
        return RadialProfile(self.grid / lam, lam ** theta * self.values,
                             self.inner_exponent, self.tail_exponent, deriv)

    # I/O: '# {header json}' line, then 'r,u' rows
    def to_csv(self) -> str:
        buf = io.StringIO()
        header = {"innerExponent": _json_float(self.inner_exponent),
                  "tailExponent": _json_float(self.tail_exponent)}
        buf.write("# " + json.dumps(header) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "u"])
        for r, u in zip(self.grid, self.values):
            w.writerow([repr(float(r)), repr(float(u))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RadialProfile":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise DomainError("profile CSV must start with a '# {json}' header line")
        header = json.loads(lines[0][1:])
        rows = list(csv.reader(lines[1:]))
        if rows[0] != ["r", "u"]:
            raise DomainError("profile CSV column header must be 'r,u'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1], float(header["innerExponent"]), float(header["tailExponent"]))


def _json_float(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


@dataclass(frozen=True)
class PowerLawProfile:
    """u(r) = coeff * r^(-exponent), exact at every radius."""

    coeff: float
    exponent: float

    def __post_init__(self):
        if not self.coeff > 0:
            raise DomainError("power-law coefficient must be positive")

    @property
    def inner_exponent(self):
        return self.exponent

    @property
    def tail_exponent(self):
        return self.exponent

    def __call__(self, r):
        return self.coeff * np.asarray(r, dtype=float) ** (-self.exponent)

    def derivatives(self, r):
        r = np.asarray(r, dtype=float)
        c, t = self.coeff, self.exponent
        return -t * c * r ** (-t - 1), t * (t + 1) * c * r ** (-t - 2)

    def log_arrays(self):
        return (np.array([0.0]), np.array([math.log(self.coeff)]), -self.exponent, -self.exponent)

    def scaled(self, lam, theta):
        return PowerLawProfile(self.coeff * lam ** (theta - self.exponent), self.exponent)


@dataclass(frozen=True)
class BubbleProfile:
    """Critical-exponent extremal C s^{-theta} (1 + (r/s)^gamma)^{-k}.

    With gamma = (p+a)/(p-1) and k = (n-p)/(p+a) it solves
    -Delta_p u = |x|^a u^q exactly at q + 1 = p(n+a)/(n-p); ``scale`` s moves
    along the family of dilations.  For n=3, p=2, a=0 this is
    3^{1/4} (1 + r^2)^{-1/2}.
    """

    n: int
    p: float
    a: float = 0.0
    scale: float = 1.0

    @property
    def q(self):
        return self.p * (self.n + self.a) / (self.n - self.p) - 1.0

    @property
    def gamma(self):
        return (self.p + self.a) / (self.p - 1.0)

    @property
    def k(self):
        return (self.n - self.p) / (self.p + self.a)

    @property
    def theta(self):
        return (self.n - self.p) / self.p

    @property
    def amplitude(self):
        base = (self.n + self.a) * ((self.n - self.p) / (self.p - 1.0)) ** (self.p - 1.0)
        return base ** (1.0 / (self.q - self.p + 1.0))

    @property
    def inner_exponent(self):
        return 0.0

    @property
    def tail_exponent(self):
        return (self.n - self.p) / (self.p - 1.0)

    def __call__(self, r):
        z = np.asarray(r, dtype=float) / self.scale
        return self.amplitude * self.scale ** (-self.theta) * (1.0 + z ** self.gamma) ** (-self.k)

    def derivatives(self, r):
        r = np.asarray(r, dtype=float)
        s, g, k = self.scale, self.gamma, self.k
        amp = self.amplitude * s ** (-self.theta)
        z = r / s
        zg = z ** g
        base = 1.0 + zg
        # d/dr of (1+z^g)^{-k} = -k g z^{g-1} (1+z^g)^{-k-1} / s
        d1 = -amp * k * g * z ** (g - 1) * base ** (-k - 1) / s
        d2 = -amp * k * g / s ** 2 * ((g - 1) * z ** (g - 2) * base ** (-k - 1)
                                      - (k + 1) * g * z ** (2 * g - 2) * base ** (-k - 2))
        return d1, d2


@dataclass(frozen=True)
class ScaledProfile:
    """u_lam(r) = lam^theta base(lam r) for any analytic base profile."""

    base: object
    lam: float
    theta: float

    @property
    def inner_exponent(self):
        return self.base.inner_exponent

    @property
    def tail_exponent(self):
        return self.base.tail_exponent

    def __call__(self, r):
        return self.lam ** self.theta * self.base(self.lam * np.asarray(r, dtype=float))

    def derivatives(self, r):
        d1, d2 = self.base.derivatives(self.lam * np.asarray(r, dtype=float))
        return self.lam ** (self.theta + 1) * d1, self.lam ** (self.theta + 2) * d2


def sample(profile, grid=None) -> RadialProfile:
    """Tabulate an analytic profile (with exact U') on a log grid."""
    if isinstance(profile, RadialProfile):
        return profile
    grid = log_grid() if grid is None else np.asarray(grid, dtype=float)
    vals = np.asarray(profile(grid), dtype=float)
    d1, _ = profile.derivatives(grid)
    return RadialProfile(grid, vals, profile.inner_exponent, profile.tail_exponent, derivative=d1)


def piecewise_arrays(profile):
    """Piecewise power-law arrays for ``profile`` (sampling analytic ones)."""
    if hasattr(profile, "log_arrays"):
        return profile.log_arrays()
    return sample(profile).log_arrays()


def source_arrays(profile, q: float, a: float):
    """Arrays for the density g(r) = r^a u(r)^q."""
    lx, ly, s_in, s_out = piecewise_arrays(profile)
    return lx, q * ly + a * lx, q * s_in + a, (q * s_out + a) if s_out != -math.inf else -math.inf
