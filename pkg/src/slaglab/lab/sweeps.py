"""Randomised property suites.

Each suite draws its inputs from ``numpy.random.default_rng(seed)`` and
returns a :class:`SweepResult` with failure exemplars (full inputs) so that
any failure can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..equation_family import (
    ct_identity_residual,
    eigenvalue_transform,
    f_t,
    limit_quarter_pi_check,
)
from ..errors import DomainError
from ..metric_planes import (
    PK_MAX_DIM,
    MetricSpec,
    graph_phi_c,
    graph_volumes,
    metric_constants,
    pk_decomposition,
)

__all__ = [
    "SweepResult",
    "SUITES",
    "run_suite",
    "random_orthogonal",
    "sample_symdet",
    "sweep_symdet",
    "sweep_calibration",
    "sweep_transform",
    "sweep_ct_identity",
    "sweep_limit_quarter_pi",
]

MAX_EXEMPLARS = 5


@dataclass
class SweepResult:
    suite: str
    trials: int
    failures: int = 0
    exemplars: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def record(self, **inputs):
        self.failures += 1
        if len(self.exemplars) < MAX_EXEMPLARS:
            self.exemplars.append(inputs)


def random_orthogonal(rng, n, count):
    """``count`` Haar-random orthogonal ``n x n`` matrices."""
    Z = rng.standard_normal((count, n, n))
    Qm, R = np.linalg.qr(Z)
    signs = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    return Qm * signs[:, None, :]


def _random_spd(rng, n, count, lo, hi):
    V = random_orthogonal(rng, n, count)
    lam = rng.uniform(lo, hi, (count, n))
    return np.einsum("mij,mj,mkj->mik", V, lam, V)


def _random_antisym(rng, n, count, norm_lo, norm_hi):
    A = rng.standard_normal((count, n, n))
    A = A - np.swapaxes(A, -1, -2)
    norms = np.linalg.norm(A, axis=(-2, -1))
    target = np.exp(rng.uniform(np.log(norm_lo), np.log(norm_hi), count))
    return A * (target / norms)[:, None, None]


def sample_symdet(rng, n, count):
    """Matrices with symmetric part eigenvalues in ``[0.2, 3]``.

    Half the draws are symmetric up to an antisymmetric part of Frobenius
    norm at most ``1e-9``; the other half carry an antisymmetric part of norm
    in ``[0.2, 2]``.  The gap then stays away from the ``1e-10`` threshold
    on both sides (it is at least ``det S * |A|^2 / (2 * 9)`` for the generic
    half).
    """
    S = _random_spd(rng, n, count, 0.2, 3.0)
    near = rng.random(count) < 0.5
    A = np.where(
        near[:, None, None],
        _random_antisym(rng, n, count, 1e-13, 1e-9),
        _random_antisym(rng, n, count, 0.2, 2.0),
    )
    return S + A, S, A


def sweep_symdet(trials, seed, gap_tol=1e-10, equality_tol=1e-10, antisym_tol=1e-7, pk_every=200):
    """``det Q >= det sym(Q)``, with equality iff ``Q`` is symmetric.

    Every ``pk_every``-th draw also checks that the subset expansion sums to
    ``det Q`` with nonnegative antisymmetric contributions.
    """
    rng = np.random.default_rng(seed)
    res = SweepResult("symdet", trials)
    dims = rng.integers(2, PK_MAX_DIM + 1, trials)
    worst = math.inf
    eq_hits = 0
    for n in range(2, PK_MAX_DIM + 1):
        idx = np.flatnonzero(dims == n)
        if idx.size == 0:
            continue
        Q, S, A = sample_symdet(rng, n, idx.size)
        gap = np.linalg.det(Q) - np.linalg.det(S)
        anorm = np.linalg.norm(A, axis=(-2, -1))
        worst = min(worst, float(gap.min()))
        equal = np.abs(gap) < equality_tol
        symmetric = anorm < antisym_tol
        eq_hits += int(equal.sum())
        bad = (gap < -gap_tol) | (equal != symmetric)
        for m in np.flatnonzero(bad):
            res.record(n=n, Q=Q[m].tolist(), gap=float(gap[m]), antisym_norm=float(anorm[m]))
        for m in range(0, idx.size, pk_every):
            P = pk_decomposition(Q[m])
            detq = float(np.linalg.det(Q[m]))
            if abs(P.sum() - detq) > 1e-9 * max(1.0, abs(detq)) or np.any(P[1:-1] < -1e-12) or P[0] < -1e-12:
                res.record(n=n, Q=Q[m].tolist(), pk=P.tolist(), det=detq)
    res.stats = {"min_gap": worst, "equality_cases": eq_hits}
    return res


def sweep_calibration(trials, seed, gap_tol=1e-10, equality_tol=1e-10, n_max=4):
    """``Phi_c >= Vol`` on random space-like graph planes of ``dxdy``, and
    equality on symmetric ``Q`` with ``det Q = c^2``."""
    rng = np.random.default_rng(seed)
    res = SweepResult("calibration", trials)
    metric = MetricSpec.dxdy()
    dims = rng.integers(2, n_max + 1, trials)
    worst = math.inf
    worst_eq = 0.0
    for n in range(2, n_max + 1):
        idx = np.flatnonzero(dims == n)
        if idx.size == 0:
            continue
        m = idx.size
        S = _random_spd(rng, n, m, 0.1, 3.0)
        A = _random_antisym(rng, n, m, 1e-3, 2.0)
        Q = S + A
        c = np.exp(rng.uniform(-1.0, 1.0, m))
        vol = graph_volumes(Q, metric)
        phi = np.array([graph_phi_c(Q[i], c[i]) for i in range(m)])
        keep = phi > 0
        gap = phi - vol
        worst = min(worst, float(gap[keep].min()))
        for i in np.flatnonzero(keep & (gap < -gap_tol)):
            res.record(n=n, Q=Q[i].tolist(), c=float(c[i]), gap=float(gap[i]))
        # equality family: symmetric, positive, det = c^2
        Qe = _random_spd(rng, n, m, 0.2, 3.0)
        Qe = Qe * (c**2 / np.linalg.det(Qe))[:, None, None] ** (1.0 / n)
        gap_e = np.array([graph_phi_c(Qe[i], c[i]) for i in range(m)]) - graph_volumes(Qe, metric)
        worst_eq = max(worst_eq, float(np.abs(gap_e).max()))
        for i in np.flatnonzero(np.abs(gap_e) >= equality_tol):
            res.record(n=n, Q=Qe[i].tolist(), c=float(c[i]), equality_gap=float(gap_e[i]))
    res.stats = {"min_gap": worst, "max_equality_gap": worst_eq}
    return res


def _admissible_log_ratio(rng, mc, shape, margin=0.05, spread=5.0):
    # each eigenvalue on one of the two branches |lam + a| > b, away from poles
    side = rng.random(shape) < 0.5
    offset = margin + rng.exponential(spread / 3, shape)
    return np.where(side, -mc.a + mc.b + offset, -mc.a - mc.b - offset)


def sweep_transform(trials, seed, rtol=1e-10, n_max=4):
    """``prod lam_hat = (sigma/tau)^n exp(F^t(lam))`` for ``0 < t < pi/4``."""
    rng = np.random.default_rng(seed)
    res = SweepResult("transform", trials)
    worst = 0.0
    for _ in range(trials):
        t = rng.uniform(0.02, math.pi / 4 - 0.02)
        n = int(rng.integers(2, n_max + 1))
        mc = metric_constants(t)
        lam = _admissible_log_ratio(rng, mc, n)
        lhs = float(np.prod(eigenvalue_transform(lam, mc)))
        rhs = (mc.sigma / mc.tau) ** n * math.exp(f_t(lam, mc))
        err = abs(lhs - rhs) / abs(rhs)
        worst = max(worst, err)
        if err > rtol:
            res.record(t=t, lam=lam.tolist(), lhs=lhs, rhs=rhs, rel_error=err)
    res.stats = {"max_rel_error": worst}
    return res


def sweep_ct_identity(trials, seed, tol=1e-12):
    """Arctan identity with constant ``C_t`` on the principal branch
    ``lam > -sigma/tau`` for ``pi/4 < t < pi/2``."""
    rng = np.random.default_rng(seed)
    res = SweepResult("ct-identity", trials)
    worst = 0.0
    for _ in range(trials):
        t = rng.uniform(math.pi / 4 + 1e-3, math.pi / 2 - 1e-3)
        mc = metric_constants(t)
        pole = -mc.sigma / mc.tau
        lam = pole + math.exp(rng.uniform(math.log(1e-3), math.log(1e3)))
        r = abs(ct_identity_residual(lam, mc))
        worst = max(worst, r)
        if r > tol:
            res.record(t=t, lam=lam, residual=r)
    res.stats = {"max_residual": worst}
    return res


def sweep_limit_quarter_pi(trials, seed, n_max=3):
    """The log-ratio equation tends to the resolvent one as ``t -> pi/4``."""
    rng = np.random.default_rng(seed)
    res = SweepResult("limit-quarter-pi", trials)
    ts = math.pi / 4 - np.geomspace(1e-2, 1e-4, 5)
    orders = []
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        lam = rng.uniform(-0.9, 5.0, n)
        try:
            out = limit_quarter_pi_check(lam, ts)
        except DomainError:
            # inadmissible for some t in the sequence; not a failure of the limit
            continue
        if math.isfinite(out.observed_order):
            orders.append(out.observed_order)
        if not out.converged:
            res.record(lam=lam.tolist(), reason=out.reason, discrepancy=out.scaled_discrepancy.tolist())
    res.stats = {"min_observed_order": float(min(orders)) if orders else math.nan}
    return res


SUITES = {
    "symdet": sweep_symdet,
    "calibration": sweep_calibration,
    "transform": sweep_transform,
    "ct-identity": sweep_ct_identity,
    "limit-quarter-pi": sweep_limit_quarter_pi,
}


def run_suite(suite: str, trials: int, seed: int) -> SweepResult:
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    return SUITES[suite](trials, seed)
