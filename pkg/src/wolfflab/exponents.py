"""Decay-exponent bootstrap sequences.

Both the nonexistence argument and the slow-rate rigidity argument iterate
the same affine map on pointwise lower-bound exponents,

    e_j = (q e_{j-1} - p*beta - a) / (p - 1),

and differ only in the starting value and in the stopping rule (``<= 0``
versus ``< 0``).  The affine map has growth factor ``r = q/(p-1)`` and fixed
point ``L = (p*beta + a)/(q - p + 1)``, the slow decay rate.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

from .errors import IterationBudgetExceeded, NotApplicable
from .params import ProblemParams, derive_exponents

DEFAULT_MAX_ITER = 10_000
_OVERFLOW_GUARD = 1e150


class SequenceKind(str, enum.Enum):
    NONEXISTENCE_A = "NonexistenceA"
    SLOW_BOOTSTRAP_B = "SlowBootstrapB"


class Verdict(str, enum.Enum):
    HIT_NONPOSITIVE = "HitNonpositive"
    CONVERGES = "ConvergesTo"
    DIVERGES = "Diverges"


@dataclass
class ExponentSequence:
    kind: SequenceKind
    start: float
    terms: list
    verdict: Verdict
    ratio: float
    j0: int | None = None
    limit: float | None = None
    predicted_j0: int | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "start": self.start,
            "ratio": self.ratio,
            "terms": list(self.terms),
            "verdict": self.verdict.value,
        }
        if self.verdict is Verdict.HIT_NONPOSITIVE:
            d["j0"] = self.j0
        elif self.verdict is Verdict.CONVERGES:
            d["limit"] = self.limit
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "term"])
        for j, term in enumerate(self.terms):
            w.writerow([j, repr(float(term))])
        return buf.getvalue()


def _affine(params: ProblemParams):
    p, q, a, beta = params.p, params.q, params.a, params.beta
    return q / (p - 1), (beta * p + a) / (p - 1)


def closed_form_term(j: int, start: float, params: ProblemParams) -> float:
    """j-th iterate of the exponent recurrence, without iterating."""
    if j < 0:
        raise ValueError("j must be >= 0")
    r, k = _affine(params)
    if j == 0:
        return float(start)
    if r == 1.0:
        return start - j * k
    rj = r ** j
    return rj * start - (rj - 1.0) / (r - 1.0) * k


def _hit(x: float, strict: bool) -> bool:
    return x < 0 if strict else x <= 0


def predict_j0(start: float, params: ProblemParams, *, strict: bool = False) -> int | None:
    """First index whose term is nonpositive (negative if ``strict``).

    Returns None when the sequence never gets there.
    """
    if _hit(start, strict):
        return 0
    r, k = _affine(params)
    if r == 1.0:
        guess = start / k
        j = math.floor(guess) + 1 if strict else math.ceil(guess)
    else:
        lim = k / (r - 1.0)
        gap = start - lim
        if r > 1.0 and gap >= 0:
            return None
        # r^j * gap + lim crosses zero at r^j = -lim/gap
        target = -lim / gap
        if target <= 0:
            return None
        j = math.ceil(math.log(target) / math.log(r))
    j = max(j, 1)
    # settle integer rounding against the closed form itself
    while j > 1 and _hit(closed_form_term(j - 1, start, params), strict):
        j -= 1
    while not _hit(closed_form_term(j, start, params), strict):
        j += 1
    return j


def _run(kind, start, params, max_iter, strict) -> ExponentSequence:
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    r, k = _affine(params)
    predicted = predict_j0(start, params, strict=strict)
    terms = [float(start)]
    lim = k / (r - 1.0) if r != 1.0 else math.inf
    if predicted is None and r > 1.0 and abs(start - lim) <= 1e-12 * max(1.0, abs(lim)):
        # unstable fixed point: rounding would drift off, so report it exactly
        terms += [lim] * min(max_iter, 8)
        return ExponentSequence(kind, float(start), terms, Verdict.CONVERGES, r,
                                limit=lim, predicted_j0=None)
    x = float(start)
    if _hit(x, strict):
        return ExponentSequence(kind, x, terms, Verdict.HIT_NONPOSITIVE, r, j0=0,
                                predicted_j0=predicted)
    for j in range(1, max_iter + 1):
        x = r * x - k
        terms.append(x)
        if _hit(x, strict):
            return ExponentSequence(kind, float(start), terms, Verdict.HIT_NONPOSITIVE, r,
                                    j0=j, predicted_j0=predicted)
        if abs(x) > _OVERFLOW_GUARD:
            break
    if predicted is not None:
        raise IterationBudgetExceeded(
            f"closed form predicts a nonpositive term at j0={predicted} > max_iter={max_iter}")
    if r > 1.0:
        return ExponentSequence(kind, float(start), terms, Verdict.DIVERGES, r)
    if r < 1.0:
        return ExponentSequence(kind, float(start), terms, Verdict.CONVERGES, r, limit=lim)
    raise IterationBudgetExceeded("ratio = 1 sequence undecided within budget")


def nonexistence_sequence(params: ProblemParams, max_iter: int = DEFAULT_MAX_ITER) -> ExponentSequence:
    """Iterate a_j from a_0 = (n - beta p)/(p - 1) until a term is <= 0.

    ``params`` may carry any q > 0 (build it with
    ``validate_params(..., allow_low_q=True)``).
    """
    a0 = (params.n - params.beta * params.p) / (params.p - 1)
    return _run(SequenceKind.NONEXISTENCE_A, a0, params, max_iter, strict=False)


def slow_bootstrap(b0: float, params: ProblemParams, max_iter: int = DEFAULT_MAX_ITER) -> ExponentSequence:
    """Iterate b_j from ``b0`` until a term is negative.

    Below the slow rate the sequence turns negative in finitely many steps;
    at the slow rate it is constant; above it grows without bound.
    """
    ex = derive_exponents(params)
    if params.q <= ex.q_liouville:
        raise NotApplicable("slow bootstrap needs q above the Liouville threshold")
    if b0 < 0:
        raise ValueError("b0 must be >= 0")
    return _run(SequenceKind.SLOW_BOOTSTRAP_B, b0, params, max_iter, strict=True)
