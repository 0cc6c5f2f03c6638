"""Named experiments.  Each returns an :class:`ExperimentReport`."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..equation_family import ADMISSIBILITY_MARGIN, eigenvalue_transform
from ..errors import PreconditionError
from ..graph_geometry import (
    calibration_integral,
    cell_weights,
    gradient_field,
    graph_volume,
    hessian_field,
    mean_curvature_residual,
    random_perturbation,
    volume_density,
)
from ..grids import AnnulusMask, GridDomain, ScalarFieldGrid, VectorFieldGrid, write_grid
from ..lewy_transforms import (
    apply_phi_t,
    injectivity_check,
    projection_p,
    reconstruct_hat_potential,
)
from ..metric_planes import MetricSpec, metric_constants
from .report import ExperimentReport
from .sweeps import run_suite

__all__ = [
    "observed_orders",
    "expcos_potential",
    "run_counterexample_annulus",
    "run_expcos_example",
    "run_maximality_test",
    "run_property_sweeps",
    "run_transform",
]


def observed_orders(errors) -> list:
    """``log2`` ratios of successive errors under dyadic refinement."""
    e = np.asarray(errors, dtype=float)
    return [float(v) for v in np.log2(e[:-1] / e[1:])]


# --------------------------------------------------------------------------
# annulus counterexample
# --------------------------------------------------------------------------


def _annulus_bump(eps, amplitude):
    r2max = 1.0 + eps

    def eta(x, y):
        s = (x * x + y * y) / r2max
        out = np.zeros_like(s)
        inside = s < 1
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    return eta


def _identity(x, y):
    return x, y


def run_counterexample_annulus(eps: float = 0.01, eta_amplitude: float = 0.01,
                               resolution: int = 256, subsamples: int = 4) -> ExperimentReport:
    """Disconnected competitor beating the gradient graph of ``|x|^2/2`` over
    a thin annulus.

    ``Gamma`` is the graph of ``x`` over ``1 <= |x|^2 <= 1 + eps``;
    ``Sigma_1`` the same graph over the unit disk and ``Sigma_2`` the graph
    of ``x + eta(x) (1, 1)`` over the disk of radius ``sqrt(1 + eps)``, with
    ``eta`` a smooth bump vanishing on its boundary.  Volumes are taken in
    ``dxdy``.
    """
    if not 0 < eps <= 0.2:
        raise PreconditionError(f"eps must lie in (0, 0.2], got {eps!r}")
    rep = ExperimentReport("annulus", {"eps": eps, "eta_amplitude": eta_amplitude,
                                       "resolution": resolution, "subsamples": subsamples})
    metric = MetricSpec.dxdy()
    R = math.sqrt(1.0 + eps)
    dom = GridDomain.box([(-R, R), (-R, R)], resolution)
    eta = _annulus_bump(eps, eta_amplitude)
    with rep.timed("volumes"):
        gamma = VectorFieldGrid.from_function(dom, _identity, AnnulusMask(1.0, 1.0 + eps))
        sigma1 = VectorFieldGrid.from_function(dom, _identity, AnnulusMask(0.0, 1.0))
        sigma2 = VectorFieldGrid.from_function(
            dom, lambda x, y: (x + eta(x, y), y + eta(x, y)), AnnulusMask(0.0, 1.0 + eps))
        def vol(F):
            w = cell_weights(F.domain, F.mask, subsamples)
            return float(np.sum(w * volume_density(F, metric, weights=w)))

        v_gamma = vol(gamma)
        v_s1 = vol(sigma1)
        v_s2 = vol(sigma2)
    v_sigma = v_s1 + v_s2
    rep.quantities.update({"vol_gamma": v_gamma, "vol_sigma1": v_s1, "vol_sigma2": v_s2,
                           "vol_sigma": v_sigma, "h": dom.spacing[0]})
    rep.check("vol_gamma", v_gamma, math.pi * eps, 0.02, "claim", "rel")
    rep.check("vol_sigma", v_sigma, 2 * math.pi + math.pi * eps, 0.02, "claim", "rel")
    rep.check("sigma exceeds gamma", bool(v_sigma > v_gamma), True, 0.0, "claim", "equal")
    if eta_amplitude == 0.0:
        rep.check("vol_sigma2 equals disk area", v_s2, math.pi * (1 + eps), 0.02, "exact", "rel")
    rep.verdict = ("inequality violated as designed (disconnected Sigma)" if v_sigma > v_gamma
                   else "inequality not violated")
    return rep


# --------------------------------------------------------------------------
# explicit example with non-injective projection
# --------------------------------------------------------------------------


def expcos_potential(a: float, k: float):
    """``u = -(a/2)|x|^2 + k e^{x_1} cos x_2`` with its gradient."""
    def u(x, y):
        return -0.5 * a * (x * x + y * y) + k * np.exp(x) * np.cos(y)

    def grad(x, y):
        return -a * x + k * np.exp(x) * np.cos(y), -a * y - k * np.exp(x) * np.sin(y)

    return u, grad


def run_expcos_example(t: float = math.atan(0.5), k: float = 50.0,
                     bounds=((0.1, 3.0), (0.0, 2 * math.pi)), resolution=(65, 129),
                     refinements: int = 3, expect_witness: bool | None = None,
                     order_target: float = 1.9, out_dir=None) -> ExperimentReport:
    """Harmonic-type solution of the ``c = 0`` equation at ``n = 2``.

    Measures ``max |Laplace_h u + 2a|``, the Hessian eigenvalue error against
    ``-a -/+ k e^{x_1}`` and the mean-curvature residual on ``refinements + 1``
    dyadically refined grids, checks space-likeness, and searches for a
    collision of ``p = sigma x + tau grad u`` at the base resolution and at
    double resolution.
    """
    mc = metric_constants(t)
    if not 0 < t < math.pi / 4:
        raise PreconditionError(f"t must lie in (0, pi/4), got {t!r}")
    if not k > mc.b:
        raise PreconditionError(f"not space-like: need k > b = {mc.b:.6g}, got k = {k!r}")
    a = mc.a
    rep = ExperimentReport("expcos", {"t": t, "k": k, "bounds": [list(b) for b in bounds],
                                    "resolution": list(resolution), "refinements": refinements,
                                    "expect_witness": expect_witness})
    u_fn, _ = expcos_potential(a, k)
    dom = GridDomain(tuple(tuple(b) for b in bounds), tuple(resolution))
    lap_err, eig_err, mc_err, hs = [], [], [], []
    spacelike = True
    with rep.timed("refinement study"):
        for level in range(refinements + 1):
            u = ScalarFieldGrid.from_function(dom, u_fn)
            H = hessian_field(u)
            lap_err.append(float(np.max(np.abs(np.trace(H, axis1=-2, axis2=-1) + 2 * a))))
            lam = np.linalg.eigvalsh(H)
            x1 = dom.interior(1).mesh()[0]
            exact = np.sort(np.stack([-a - k * np.exp(x1), -a + k * np.exp(x1)], -1), axis=-1)
            eig_err.append(float(np.max(np.abs(lam - exact))))
            den = mc.sin_t * (1 + lam * lam) + 2 * mc.cos_t * lam
            spacelike &= bool(np.all(den > ADMISSIBILITY_MARGIN))
            mc_err.append(float(np.max(mean_curvature_residual(u, t).values)))
            hs.append(max(dom.spacing))
            if level < refinements:
                dom = dom.refine()
    lap_ord, eig_ord, mc_ord = observed_orders(lap_err), observed_orders(eig_err), observed_orders(mc_err)
    rep.quantities.update({
        "a": a, "b": mc.b, "sigma": mc.sigma, "tau": mc.tau, "h": hs,
        "laplacian_error": lap_err, "laplacian_order": lap_ord,
        "eigenvalue_error": eig_err, "eigenvalue_order": eig_ord,
        "mean_curvature_residual": mc_err, "mean_curvature_order": mc_ord,
    })
    rep.check("laplacian order", min(lap_ord), order_target, 0.0, "claim", "min")
    rep.check("eigenvalue order", min(eig_ord), order_target, 0.0, "claim", "min")
    rep.check("mean curvature order", min(mc_ord), order_target, 0.0, "oracle", "min")
    rep.check("space-like at every node", spacelike, True, 0.0, "claim", "equal")

    base = GridDomain(tuple(tuple(b) for b in bounds), tuple(resolution))
    u0 = ScalarFieldGrid.from_function(base, u_fn)
    with rep.timed("transform"):
        tg = apply_phi_t(u0, t)
        lam0 = np.linalg.eigvalsh(hessian_field(u0)).reshape(-1, 2)
        transport = float(np.max(np.abs(np.sort(tg.tangent_eigenvalues(), -1)
                                        - np.sort(eigenvalue_transform(lam0, mc), -1))))
        proj = projection_p(u0, t)
    rep.quantities.update({"kappa": tg.kappa, "eigenvalue_transport_error": transport,
                           "dp_min_sym_eigenvalue": proj.min_sym_eigenvalue, "dp_positive": proj.positive})
    rep.check("pullback factor", tg.kappa, 1.0, 1e-8, "oracle", "abs")
    with rep.timed("injectivity"):
        verdict = injectivity_check(proj.p)
        fine = ScalarFieldGrid.from_function(base.refine(), u_fn)
        verdict_fine = injectivity_check(projection_p(fine, t).p)
    rep.quantities["injectivity"] = verdict.to_dict()
    rep.quantities["injectivity_double_resolution"] = verdict_fine.to_dict()
    rep.check("injectivity verdict stable under refinement",
              verdict.injective == verdict_fine.injective, True, 0.0, "oracle", "equal")
    if expect_witness is not None:
        rep.check("collision witness found", not verdict.injective, expect_witness, 0.0, "claim", "equal")
    rep.verdict = ("p can not be injective: collision witness found" if not verdict.injective
                   else f"p injective on the sampled grid ({verdict.certificate})")
    if out_dir is not None:
        rows = np.column_stack([hs, lap_err, eig_err, mc_err])
        rep.add_csv(out_dir, "convergence.csv", ["h", "laplacian_error", "eigenvalue_error",
                                                  "mean_curvature_residual"], rows)
        tg.write(Path(out_dir) / "transformed_graph.csv", {"scenario": "expcos", "k": k})
        rep.artifacts += ["transformed_graph.csv", "transformed_graph.json"]
    return rep


# --------------------------------------------------------------------------
# maximality harness
# --------------------------------------------------------------------------


def run_maximality_test(potential=None, c: float = 1.0, num_perturbations: int = 100,
                        seed: int = 0, resolution: int = 128, amplitude: float = 0.3,
                        residual_tol: float = 1e-8, gap_tol: float = 1e-3,
                        calibration_tol: float = 1e-6, out_dir=None) -> ExperimentReport:
    """Compare the gradient graph of a solution of ``det D^2 u = c`` with
    competitors sharing its boundary.

    Competitors are ``grad u + G`` with ``G`` compactly supported; even
    indices use gradient fields, odd indices generic (non-symmetric Jacobian)
    fields.  Volumes are taken in ``dxdy``; the calibration level is
    ``sqrt(c)``.

    Raises
    ------
    PreconditionError
        If ``potential`` does not solve the equation to ``residual_tol``, or a
        competitor is not space-like.
    """
    if potential is None:
        dom = GridDomain.box([(0.0, 1.0), (0.0, 1.0)], resolution)
        potential = ScalarFieldGrid.from_function(dom, lambda x, y: 0.5 * (x * x + y * y))
    dom = potential.domain
    rep = ExperimentReport("maximality", {"c": c, "num_perturbations": num_perturbations, "seed": seed,
                                          "resolution": list(dom.resolution), "amplitude": amplitude})
    residual = float(np.max(np.abs(np.linalg.det(hessian_field(potential)) - c)))
    rep.quantities["source_residual"] = residual
    if residual > residual_tol:
        raise PreconditionError(f"source potential does not solve det D^2 u = c: residual {residual:.3e}")
    metric = MetricSpec.dxdy()
    level = math.sqrt(c)
    F = gradient_field(potential)
    rng = np.random.default_rng(seed)
    with rep.timed("volumes"):
        v0 = graph_volume(F, metric)
        cal0 = calibration_integral(F, level)
        gaps, cals, kinds = [], [], []
        for i in range(num_perturbations):
            kind = "gradient" if i % 2 == 0 else "generic"
            G = random_perturbation(dom, rng, kind=kind, amplitude=amplitude)
            Fi = VectorFieldGrid(dom, F.values + G.values)
            gaps.append(graph_volume(Fi, metric) - v0)
            cals.append(calibration_integral(Fi, level))
            kinds.append(0 if kind == "gradient" else 1)
    rep.quantities.update({"vol_gamma": v0, "calibration_gamma": cal0})
    if num_perturbations:
        max_gap = float(max(gaps))
        cal_spread = float(max(abs(v - cal0) for v in cals))
        rep.quantities.update({"max_volume_gap": max_gap, "min_volume_gap": float(min(gaps)),
                               "calibration_spread": cal_spread})
        rep.check("max volume gap", max_gap, 0.0, gap_tol, "claim", "max")
        rep.check("calibration integral constant", cal_spread, 0.0, calibration_tol, "oracle", "max")
        rep.verdict = ("no competitor exceeds the calibrated graph" if max_gap <= gap_tol
                       else "a competitor exceeds the calibrated graph")
        if out_dir is not None:
            rep.add_csv(out_dir, "volume_gaps.csv", ["index", "kind_generic", "volume_gap", "calibration"],
                        np.column_stack([np.arange(num_perturbations), kinds, gaps, cals]))
    else:
        rep.check("calibration equals volume", cal0, v0, 1e-8, "exact", "abs")
        rep.verdict = "no competitors requested"
    return rep


# --------------------------------------------------------------------------
# property sweeps
# --------------------------------------------------------------------------


SWEEP_SOURCES = {"symdet": "oracle", "calibration": "claim", "transform": "claim",
                 "ct-identity": "claim", "limit-quarter-pi": "oracle"}


def run_property_sweeps(suite: str, trials: int, seed: int = 0) -> ExperimentReport:
    rep = ExperimentReport(f"sweep:{suite}", {"suite": suite, "trials": trials, "seed": seed})
    with rep.timed("sweep"):
        res = run_suite(suite, trials, seed)
    rep.quantities.update(res.stats)
    rep.quantities["failure_exemplars"] = res.exemplars
    rep.check("failures", res.failures, 0, 0.0, SWEEP_SOURCES[suite], "max")
    rep.verdict = f"{res.failures} failures in {trials} trials"
    return rep


# --------------------------------------------------------------------------
# transform of an arbitrary potential
# --------------------------------------------------------------------------


def run_transform(u: ScalarFieldGrid, t: float, out_dir=None, hat_shrink: float = 0.9) -> ExperimentReport:
    """Apply ``phi_t`` to the gradient graph of ``u``; when ``Dp > 0``
    reconstruct the transformed potential."""
    mc = metric_constants(t)
    rep = ExperimentReport("transform", {"t": t, "grid": u.domain.header(u.mask)})
    with rep.timed("transform"):
        tg = apply_phi_t(u, t)
        lam = np.linalg.eigvalsh(hessian_field(u)).reshape(-1, u.domain.n)
        transport = float(np.max(np.abs(np.sort(tg.tangent_eigenvalues(), -1)
                                        - np.sort(eigenvalue_transform(lam, mc), -1))))
        proj = projection_p(u, t)
    rep.quantities.update({"kappa": tg.kappa, "eigenvalue_transport_error": transport,
                           "dp_min_sym_eigenvalue": proj.min_sym_eigenvalue})
    rep.check("eigenvalue transport", transport, 0.0, 1e-10, "claim", "max")
    if proj.positive:
        with rep.timed("reconstruction"):
            hp = reconstruct_hat_potential(u, t, shrink=hat_shrink)
        rep.quantities["path_residual"] = hp.path_residual
        h = max(u.domain.spacing)
        rep.check("path independence", hp.path_residual, 0.0, 10 * h * h, "claim", "max")
        if out_dir is not None:
            write_grid(Path(out_dir) / "uhat.csv", hp.uhat)
            rep.artifacts.append("uhat.csv")
        rep.verdict = "p is monotone; transformed potential reconstructed"
    else:
        rep.verdict = "Dp not positive; transformed potential not reconstructed"
    if out_dir is not None:
        tg.write(Path(out_dir) / "transformed_graph.csv", {"scenario": "transform"})
        rep.artifacts += ["transformed_graph.csv", "transformed_graph.json"]
    return rep
