"""Special Lagrangian operators ``F^t`` acting on Hessian eigenvalues.

Five forms, selected by ``t``::

    t = 0            sum ln(lam)
    0 < t < pi/4     sum ln((lam + a - b) / (lam + a + b))
    t = pi/4         sum 1 / (1 + lam)
    pi/4 < t < pi/2  sum arctan((lam + a - b) / (lam + a + b))
    t = pi/2         sum arctan(lam)

All functions accept eigenvalues along the last axis, so a whole grid of
Hessian spectra can be evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BranchCrossingError, DomainError
from .metric_planes import MetricConstants, metric_constants

__all__ = [
    "ADMISSIBILITY_MARGIN",
    "FamilyPoint",
    "equation_form",
    "eigen_term",
    "eigen_term_derivative",
    "f_t",
    "f_t_gradient",
    "inverse_metric_diagonal",
    "gradient_scale",
    "check_admissible",
    "eigenvalue_transform",
    "ct_identity_residual",
    "v_transform",
    "RegimeClass",
    "classify_regime",
    "quarter_pi_scale",
    "QuarterPiLimit",
    "limit_quarter_pi_check",
]

ADMISSIBILITY_MARGIN = 1e-14


@dataclass(frozen=True)
class FamilyPoint:
    """Parameter ``t`` of the family together with the right-hand side ``c``."""

    t: float
    c: float = 0.0
    constants: MetricConstants = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constants", metric_constants(self.t))


def _constants(point) -> MetricConstants:
    if isinstance(point, FamilyPoint):
        return point.constants
    if isinstance(point, MetricConstants):
        return point
    return metric_constants(point)


def equation_form(t) -> str:
    """Name of the operator used at ``t``: one of ``log``, ``log-ratio``,
    ``resolvent``, ``arctan-ratio``, ``arctan``."""
    mc = _constants(t)
    if mc.t == 0.0:
        return "log"
    if mc.regime == "pseudo":
        return "log-ratio"
    if mc.regime == "degenerate":
        return "resolvent"
    if mc.t == math.pi / 2:
        return "arctan"
    return "arctan-ratio"


def _fail(message, lam, mask):
    bad = np.argwhere(np.broadcast_to(mask, np.shape(lam)))
    first = tuple(int(i) for i in bad[0])
    value = float(np.asarray(lam)[first])
    raise DomainError(f"{message}: eigenvalue {value!r} at index {first}")


def check_admissible(lambdas, point) -> None:
    """Raise :class:`DomainError` naming the first inadmissible eigenvalue."""
    lam = np.asarray(lambdas, dtype=float)
    if not np.all(np.isfinite(lam)):
        _fail("non-finite eigenvalue", lam, ~np.isfinite(lam))
    mc = _constants(point)
    form = equation_form(mc)
    eps = ADMISSIBILITY_MARGIN
    if form == "log":
        bad = lam <= eps
        if bad.any():
            _fail("log argument not positive", lam, bad)
    elif form == "log-ratio":
        num, den = lam + mc.a - mc.b, lam + mc.a + mc.b
        bad = (np.abs(num) <= eps) | (np.abs(den) <= eps) | (num * den <= 0)
        if bad.any():
            _fail("log-ratio argument not positive", lam, bad)
    elif form == "resolvent":
        bad = np.abs(1 + lam) <= eps
        if bad.any():
            _fail("pole of 1/(1+lambda)", lam, bad)
    elif form == "arctan-ratio":
        bad = np.abs(lam + mc.a + mc.b) <= eps
        if bad.any():
            _fail("pole of the arctan ratio", lam, bad)


def eigen_term(lam, point) -> np.ndarray:
    """Per-eigenvalue summand of ``F^t`` (elementwise)."""
    check_admissible(lam, point)
    lam = np.asarray(lam, dtype=float)
    mc = _constants(point)
    form = equation_form(mc)
    if form == "log":
        return np.log(lam)
    if form == "log-ratio":
        # log|num| - log|den| keeps the lam < -(a+b) branch accurate
        return np.log(np.abs(lam + mc.a - mc.b)) - np.log(np.abs(lam + mc.a + mc.b))
    if form == "resolvent":
        return 1.0 / (1.0 + lam)
    if form == "arctan-ratio":
        return np.arctan((lam + mc.a - mc.b) / (lam + mc.a + mc.b))
    return np.arctan(lam)


def eigen_term_derivative(lam, point) -> np.ndarray:
    """Exact derivative of :func:`eigen_term` with respect to ``lam``."""
    check_admissible(lam, point)
    lam = np.asarray(lam, dtype=float)
    mc = _constants(point)
    form = equation_form(mc)
    if form == "log":
        return 1.0 / lam
    if form == "log-ratio":
        return 1.0 / (lam + mc.a - mc.b) - 1.0 / (lam + mc.a + mc.b)
    if form == "resolvent":
        return -1.0 / (1.0 + lam) ** 2
    if form == "arctan-ratio":
        mu = lam + mc.a
        return mc.b / (mu * mu + mc.b * mc.b)
    return 1.0 / (1.0 + lam * lam)


def f_t(lambdas, point) -> np.ndarray | float:
    """Left-hand side ``F^t(lam)``, summed over the last axis."""
    out = np.sum(eigen_term(lambdas, point), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def f_t_gradient(lambdas, point) -> np.ndarray:
    """``dF^t / dlam_i``.

    This equals ``gradient_scale(t) * inverse_metric_diagonal(lam, t)``: the
    partial derivatives are proportional to the diagonal of the inverse
    induced metric, with a positive factor except at ``t = pi/4`` where the
    resolvent form decreases.
    """
    return eigen_term_derivative(lambdas, point)


def inverse_metric_diagonal(lambdas, point) -> np.ndarray:
    """``1 / (sin t (1 + lam^2) + 2 cos t lam)`` for each eigenvalue.

    Raises
    ------
    DomainError
        If a denominator is within the admissibility margin of zero
        (the metric degenerates in that direction).
    """
    lam = np.asarray(lambdas, dtype=float)
    mc = _constants(point)
    den = mc.sin_t * (1.0 + lam * lam) + 2.0 * mc.cos_t * lam
    bad = np.abs(den) <= ADMISSIBILITY_MARGIN
    if bad.any():
        _fail("induced metric degenerates", lam, bad)
    return 1.0 / den


def gradient_scale(point) -> float:
    """Constant ``s(t)`` with ``f_t_gradient = s(t) * inverse_metric_diagonal``."""
    mc = _constants(point)
    form = equation_form(mc)
    if form == "log":
        return 2.0
    if form == "log-ratio":
        return 2.0 * mc.b * mc.sin_t
    if form == "resolvent":
        return -1.0 / math.sqrt(2.0)
    return mc.b * mc.sin_t


# --------------------------------------------------------------------------
# Lewy rotation identities
# --------------------------------------------------------------------------


def eigenvalue_transform(lam, constants: MetricConstants) -> np.ndarray | float:
    """Moebius map ``(tau + sigma lam) / (sigma + tau lam)`` on eigenvalues."""
    lam_arr = np.asarray(lam, dtype=float)
    den = constants.sigma + constants.tau * lam_arr
    bad = np.abs(den) <= ADMISSIBILITY_MARGIN
    if bad.any():
        _fail("pole at lambda = -sigma/tau", lam_arr, bad)
    out = (constants.tau + constants.sigma * lam_arr) / den
    return float(out) if out.ndim == 0 else out


def _branch_shift(lam: np.ndarray, mc: MetricConstants) -> np.ndarray:
    # below the pole lam = -sigma/tau the continuous arctan sits pi under the principal one
    return np.where(mc.sigma + mc.tau * lam < 0, -math.pi, 0.0)


def ct_identity_residual(lam, constants: MetricConstants, correct_branch: bool = False):
    """``arctan((lam + a)/b) + C_t - arctan((tau + sigma lam)/(sigma + tau lam))``.

    Only defined in the Euclidean regime ``pi/4 < t < pi/2``.  Points past the
    pole ``sigma + tau lam = 0`` need a ``-pi`` correction on the right-hand
    arctan; without ``correct_branch`` they raise :class:`BranchCrossingError`
    carrying that shift.
    """
    mc = constants
    if mc.regime != "euclidean" or mc.t >= math.pi / 2:
        raise DomainError(f"C_t identity needs pi/4 < t < pi/2, got t={mc.t!r}")
    lam_arr = np.asarray(lam, dtype=float)
    den = mc.sigma + mc.tau * lam_arr
    if np.any(np.abs(den) <= ADMISSIBILITY_MARGIN):
        raise BranchCrossingError("evaluated on the pole sigma + tau*lambda = 0", shift=math.nan)
    shift = _branch_shift(lam_arr, mc)
    if not correct_branch and np.any(shift):
        raise BranchCrossingError(
            "sigma + tau*lambda < 0: subtract pi from the transformed arctan", shift=-math.pi
        )
    res = (
        np.arctan((lam_arr + mc.a) / mc.b)
        + mc.C_t
        - (np.arctan((mc.tau + mc.sigma * lam_arr) / den) + shift)
    )
    return float(res) if res.ndim == 0 else res


def v_transform(lam, constants: MetricConstants) -> np.ndarray | float:
    """Eigenvalue action ``lam -> (lam + a)/b`` of ``v = u/b + a|x|^2/(2b)``."""
    if constants.b == 0.0:
        raise DomainError("v_transform undefined at t = pi/4 (b = 0)")
    if math.isinf(constants.b):
        raise DomainError("v_transform undefined at t = 0")
    out = (np.asarray(lam, dtype=float) + constants.a) / constants.b
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# classification and the t -> pi/4 limit
# --------------------------------------------------------------------------


class RegimeClass(NamedTuple):
    spacelike: bool
    convex: bool
    concave: bool


def classify_regime(lambdas, point) -> RegimeClass:
    """Pointwise ellipticity (space-likeness) and convexity classification."""
    lam = np.asarray(lambdas, dtype=float)
    mc = _constants(point)
    den = mc.sin_t * (1.0 + lam * lam) + 2.0 * mc.cos_t * lam
    a = mc.a
    return RegimeClass(
        spacelike=bool(np.all(den > ADMISSIBILITY_MARGIN)),
        convex=bool(np.all(lam < -a)),
        concave=bool(np.all(lam > -a)),
    )


def quarter_pi_scale(t: float) -> float:
    """Leading coefficient ``kappa(t) = -2 b`` in

    ``F^t(lam) - n ln(a - b) = kappa(t) (sum 1/(1+lam) - n/2) + O(b^3)``
    as ``t -> pi/4`` from below.
    """
    mc = metric_constants(t)
    if mc.regime != "pseudo" or mc.t == 0.0:
        raise DomainError("quarter-pi expansion needs 0 < t < pi/4")
    return -2.0 * mc.b


@dataclass
class QuarterPiLimit:
    t: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    scaled_discrepancy: np.ndarray
    observed_order: float
    converged: bool
    reason: str = ""


def limit_quarter_pi_check(
    lambdas, t_sequence, pole_tol: float = 1e-8, roundoff: float = 1e-12
) -> QuarterPiLimit:
    """Compare the log-ratio form near ``pi/4`` against the resolvent form.

    For each ``t`` the discrepancy
    ``|F^t(lam) - n ln(a-b) - kappa(t) (sum 1/(1+lam) - n/2)| / |kappa(t)|``
    is recorded; the observed order is the least-squares slope of
    ``log(discrepancy)`` against ``log(b)``.  ``t_sequence`` should increase
    towards ``pi/4``.
    """
    lam = np.asarray(lambdas, dtype=float)
    n = lam.shape[-1]
    ts = np.asarray(list(t_sequence), dtype=float)
    if np.any(np.abs(1.0 + lam) <= pole_tol):
        nan = np.full(ts.shape, np.nan)
        return QuarterPiLimit(ts, nan, nan, nan, math.nan, False,
                              "eigenvalue at the pole lambda = -1 of the limit equation")
    bs, kappas, disc = [], [], []
    resolvent = np.sum(1.0 / (1.0 + lam)) - n / 2
    for t in ts:
        mc = metric_constants(t)
        kappa = quarter_pi_scale(t)
        lhs = f_t(lam, mc) - n * math.log(mc.a - mc.b)
        bs.append(mc.b)
        kappas.append(kappa)
        disc.append(abs(lhs - kappa * resolvent) / abs(kappa))
    bs, kappas, disc = map(np.asarray, (bs, kappas, disc))
    positive = disc > 0
    if positive.sum() >= 2:
        order = float(np.polyfit(np.log(bs[positive]), np.log(disc[positive]), 1)[0])
    else:
        order = math.inf
    decreasing = bool(np.all(np.diff(disc) <= 1e-15 + 1e-12 * disc[:-1]))
    # lam = 1 satisfies the limit identity exactly, leaving only roundoff
    exact = bool(np.all(disc <= roundoff))
    converged = exact or (decreasing and order > 0.5)
    reason = "" if converged else "discrepancy does not shrink with b"
    return QuarterPiLimit(ts, bs, kappas, disc, order, converged, reason)
