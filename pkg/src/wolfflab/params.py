"""Parameter validation, derived exponents and regime classification.

The problem is ``-div(|grad u|^{p-2} grad u) = |x|^a u^q`` in R^n (and the
companion integral equation with the Wolff potential of order ``beta``).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Sequence

from .errors import AssumptionViolation

CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    n: int
    p: float
    q: float
    a: float = 0.0
    beta: float = 1.0

    @property
    def ratio(self) -> float:
        """Growth factor q/(p-1) of the exponent recurrences."""
        return self.q / (self.p - 1.0)

    def as_tuple(self):
        return (self.n, self.p, self.q, self.a, self.beta)

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "q": self.q, "a": self.a, "beta": self.beta}


@dataclass(frozen=True)
class DerivedExponents:
    s0: float
    p_star: float
    q_critical: float
    q_liouville: float
    fast_rate: float
    slow_rate: float
    integrability_floor: float

    def to_dict(self) -> dict:
        return {
            "s0": self.s0,
            "pStar": self.p_star,
            "qCritical": self.q_critical,
            "qLiouville": self.q_liouville,
            "fastRate": self.fast_rate,
            "slowRate": self.slow_rate,
            "integrabilityFloor": self.integrability_floor,
        }


class Regime(str, enum.Enum):
    NONEXISTENCE = "Nonexistence"
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    lp_impossible: bool
    exponents: DerivedExponents
    params: ProblemParams

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "regime": self.regime.value,
            "lpImpossible": self.lp_impossible,
            "exponents": self.exponents.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _violations(n, p, q, a, beta, q_floor_strict) -> list[str]:
    out = []
    if not float(n).is_integer():
        out.append(f"n must be an integer (got {n})")
    if n < 3:
        out.append(f"n >= 3 fails (n={n})")
    if not p > 1:
        out.append(f"p > 1 fails (p={p})")
    if not p <= 2:
        out.append(f"p <= 2 fails (p={p})")
    if not beta > 0:
        out.append(f"beta > 0 fails (beta={beta})")
    if q_floor_strict:
        if not q > p - 1:
            out.append(f"q > p - 1 fails (q={q}, p-1={p - 1})")
    elif not q > 0:
        out.append(f"q > 0 fails (q={q})")
    if not -a >= 0:
        out.append(f"-a >= 0 fails (a={a} must be <= 0)")
    if not -a < p * beta:
        out.append(f"-a < p*beta fails (a={a}, p*beta={p * beta})")
    if not p * beta < n:
        out.append(f"p*beta < n fails (p*beta={p * beta}, n={n})")
    return out


def validate_params(raw: Sequence[float] | Mapping[str, Any], *, allow_low_q: bool = False) -> ProblemParams:
    """Check the standing assumptions and return a ``ProblemParams``.

    ``raw`` is either a 5-tuple ``(n, p, q, a, beta)`` or a mapping with
    those keys (``beta`` defaults to 1).  With ``allow_low_q`` the source
    exponent only has to be positive, which is what the nonexistence
    iteration needs.

    Raises AssumptionViolation listing every failed inequality.
    """
    if isinstance(raw, Mapping):
        try:
            n, p, q = raw["n"], raw["p"], raw["q"]
        except KeyError as exc:
            raise AssumptionViolation([f"missing parameter {exc.args[0]!r}"]) from None
        a = raw.get("a", 0.0)
        beta = raw.get("beta", 1.0)
    else:
        vals = list(raw)
        if len(vals) == 4:
            vals.append(1.0)
        if len(vals) != 5:
            raise AssumptionViolation([f"expected (n, p, q, a, beta), got {len(vals)} values"])
        n, p, q, a, beta = vals
    try:
        n_f, p, q, a, beta = float(n), float(p), float(q), float(a), float(beta)
    except (TypeError, ValueError):
        raise AssumptionViolation([f"non-numeric parameter in {raw!r}"]) from None
    if not all(math.isfinite(v) for v in (n_f, p, q, a, beta)):
        raise AssumptionViolation(["parameters must be finite"])
    bad = _violations(n_f, p, q, a, beta, q_floor_strict=not allow_low_q)
    if bad:
        raise AssumptionViolation(bad)
    return ProblemParams(int(n_f), p, q, a, beta)


def derive_exponents(params: ProblemParams) -> DerivedExponents:
    n, p, q, a, beta = params.as_tuple()
    pb = p * beta
    gap = q - p + 1
    # gap = 0 only arises for the low-q iteration; the slow rate is then infinite
    slow = (pb + a) / gap if gap != 0 else math.inf
    return DerivedExponents(
        s0=n * (q - p + 1) / (pb + a),
        p_star=n * p / (n - pb),
        q_critical=p * (n + a) / (n - pb) - 1,
        q_liouville=(n + a) * (p - 1) / (n - pb),
        fast_rate=(n - pb) / (p - 1),
        slow_rate=slow,
        integrability_floor=n * (p - 1) / (n - pb),
    )


def classify_regime(params: ProblemParams, tol: float = CRITICAL_RTOL) -> RegimeReport:
    """Place ``params`` in the nonexistence / sub / critical / supercritical trichotomy.

    ``tol`` is a relative band around the critical exponent; the Liouville
    endpoint itself counts as nonexistence.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    ex = derive_exponents(params)
    q = params.q
    if q <= ex.q_liouville:
        regime = Regime.NONEXISTENCE
    elif abs(q - ex.q_critical) <= tol * max(1.0, abs(ex.q_critical)):
        regime = Regime.CRITICAL
    elif q < ex.q_critical:
        regime = Regime.SUBCRITICAL
    else:
        regime = Regime.SUPERCRITICAL
    return RegimeReport(regime, params.n <= params.p ** 2, ex, params)


def params_from_mapping(cfg: Mapping[str, Any]) -> ProblemParams:
    return validate_params({k: cfg[k] for k in ("n", "p", "q", "a", "beta") if k in cfg})
