"""Lewy rotations ``phi_t`` between members of the family.

``phi_t(x, y) = (sigma x + tau y, tau x + sigma y) = (p, q)`` carries
``(R^n x R^n, g_t)`` to ``g_0 = 2 dxdy`` for ``t < pi/4`` and to the Euclidean
metric for ``t > pi/4``.  At ``t = pi/4`` the projection ``P(x, y) = (x + y)/2``
plays the same role for the degenerate metric.  Conformal factors are
measured numerically, never assumed.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree

from .errors import ConsistencyError, DomainError, NotSpacelikeError, PreconditionError
from .graph_geometry import (
    gradient_field,
    graph_volume,
    hessian_field,
    jacobian_field,
)
from .grids import GridDomain, ScalarFieldGrid, VectorFieldGrid
from .metric_planes import MetricConstants, MetricSpec, graph_grams, metric_constants

__all__ = [
    "TransformedGraph",
    "target_metric",
    "pushforward_grams",
    "measure_conformal_factor",
    "apply_phi_t",
    "ProjectionResult",
    "projection_p",
    "InjectivityVerdict",
    "injectivity_check",
    "HatPotential",
    "reconstruct_hat_potential",
    "hat_potential_closed_form",
    "degenerate_conformal_factor",
    "DegenerateVolume",
    "degenerate_projection_volume",
]

KAPPA_RTOL = 1e-8


def _check_branch(mc: MetricConstants) -> None:
    if mc.regime == "degenerate":
        raise DomainError("phi_t is not defined at t = pi/4; use degenerate_projection_volume")


def target_metric(mc: MetricConstants) -> MetricSpec:
    """``g_0`` for the pseudo branch, ``delta_0`` for the Euclidean branch."""
    _check_branch(mc)
    return MetricSpec.family(0.0) if mc.regime == "pseudo" else MetricSpec.euclidean()


def pushforward_grams(Q: np.ndarray, mc: MetricConstants) -> np.ndarray:
    """Gram matrices, in the target metric, of the images under ``phi_t`` of
    the bases ``[I, Q]``."""
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[-1]
    eye = np.eye(n)
    A = mc.sigma * eye + mc.tau * Q
    B = mc.tau * eye + mc.sigma * Q
    rows = np.concatenate([A, B], axis=-1)
    M = target_metric(mc).matrix(n)
    return rows @ M @ np.swapaxes(rows, -1, -2)


def measure_conformal_factor(Q_samples: np.ndarray, mc: MetricConstants) -> float:
    """Least-squares ``kappa`` with ``Gram(phi xi) = kappa Gram(xi, g_t)``.

    Raises
    ------
    ConsistencyError
        If the per-sample ratios disagree by more than ``1e-8`` relative.
    """
    G_img = pushforward_grams(Q_samples, mc)
    G_src = graph_grams(Q_samples, MetricSpec.family(mc.t))
    axes = (-2, -1)
    per_sample = np.sum(G_img * G_src, axis=axes) / np.sum(G_src * G_src, axis=axes)
    kappa = float(np.sum(G_img * G_src) / np.sum(G_src * G_src))
    resid = np.linalg.norm(G_img - kappa * G_src, axis=axes) / np.linalg.norm(G_img, axis=axes)
    spread = np.max(np.abs(per_sample / kappa - 1.0))
    if spread > KAPPA_RTOL or np.max(resid) > KAPPA_RTOL:
        raise ConsistencyError(
            f"pullback is not a constant multiple of g_t (spread {spread:.2e}, residual {np.max(resid):.2e})"
        )
    return kappa


# --------------------------------------------------------------------------
# phi_t applied to a gradient graph
# --------------------------------------------------------------------------


@dataclass(eq=False)
class TransformedGraph:
    """Images ``phi_t(x, grad u(x))`` of the interior nodes of ``source``."""

    samples: np.ndarray
    source: ScalarFieldGrid
    constants: MetricConstants
    kappa: float
    tangents: np.ndarray = field(repr=False)

    def tangent_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the image tangent graph matrices (symmetric for
        Lagrangian sources)."""
        Qs = 0.5 * (self.tangents + np.swapaxes(self.tangents, -1, -2))
        return np.linalg.eigvalsh(Qs)

    def write(self, path, provenance: dict | None = None) -> tuple[Path, Path]:
        """CSV of image coordinates plus a JSON sidecar with ``t`` and ``kappa``."""
        path = Path(path)
        n = self.source.domain.n
        header = ",".join([f"x_{i + 1}" for i in range(n)] + [f"y_{i + 1}" for i in range(n)])
        np.savetxt(path, self.samples, fmt="%.17g", delimiter=",", header=header, comments="")
        sidecar = path.with_suffix(".json")
        meta = {
            "t": self.constants.t,
            "kappa": self.kappa,
            "sigma": self.constants.sigma,
            "tau": self.constants.tau,
            "regime": self.constants.regime,
            "source_grid": self.source.domain.header(self.source.mask),
            "provenance": provenance or {},
        }
        sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True))
        return path, sidecar


def _sample_planes(H: np.ndarray, count: int) -> np.ndarray:
    flat = H.reshape(-1, H.shape[-2], H.shape[-1])
    idx = np.linspace(0, flat.shape[0] - 1, min(count, flat.shape[0])).astype(int)
    return flat[idx]


def apply_phi_t(u: ScalarFieldGrid, t: float, kappa_samples: int = 64) -> TransformedGraph:
    """Push the gradient graph of ``u`` through ``phi_t``."""
    mc = metric_constants(t)
    _check_branch(mc)
    dom = u.domain
    n = dom.n
    inner = tuple(slice(1, -1) for _ in range(n))
    x = dom.points()[inner].reshape(-1, n)
    grad = gradient_field(u).values[inner].reshape(-1, n)
    H = hessian_field(u).reshape(-1, n, n)
    img = np.hstack([mc.sigma * x + mc.tau * grad, mc.tau * x + mc.sigma * grad])
    kappa = measure_conformal_factor(_sample_planes(H, kappa_samples), mc)
    eye = np.eye(n)
    A = mc.sigma * eye + mc.tau * H
    B = mc.tau * eye + mc.sigma * H
    sv = np.linalg.svd(A, compute_uv=False)
    if np.any(sv[..., -1] <= 1e-12 * np.maximum(sv[..., 0], 1.0)):
        raise NotSpacelikeError("eigenvalue -sigma/tau reached: image is not a graph over p")
    tangents = np.linalg.solve(A, B)
    return TransformedGraph(img, u, mc, kappa, tangents)


# --------------------------------------------------------------------------
# the projection p and injectivity
# --------------------------------------------------------------------------


@dataclass(eq=False)
class ProjectionResult:
    p: VectorFieldGrid
    dp: np.ndarray = field(repr=False)
    min_sym_eigenvalue: float
    positive: bool


def projection_p(u: ScalarFieldGrid, t: float) -> ProjectionResult:
    """``p(x) = sigma x + tau grad u(x)`` and ``Dp = sigma I + tau D^2 u``."""
    mc = metric_constants(t)
    _check_branch(mc)
    dom = u.domain
    grad = gradient_field(u).values
    p = VectorFieldGrid(dom, mc.sigma * dom.points() + mc.tau * grad, u.mask)
    H = hessian_field(u)
    dp = mc.sigma * np.eye(dom.n) + mc.tau * H
    lam_min = float(np.min(np.linalg.eigvalsh(dp)))
    return ProjectionResult(p, dp, lam_min, lam_min > 0)


@dataclass
class InjectivityVerdict:
    """``injective`` plus either a certificate or a collision witness.

    For a witness, ``x1`` is a node, ``x2`` a source point at least
    ``separation`` away, and ``distance = |p(x1) - p_h(x2)|`` with ``p_h`` the
    multilinear interpolant of the sampled map.
    """

    injective: bool
    certificate: str
    x1: tuple | None = None
    x2: tuple | None = None
    distance: float | None = None
    tolerance: float = 0.0
    separation: float = 0.0

    def to_dict(self) -> dict:
        return {
            "injective": self.injective,
            "certificate": self.certificate,
            "x1": self.x1,
            "x2": self.x2,
            "distance": self.distance,
            "tolerance": self.tolerance,
            "separation": self.separation,
        }


def _corner_offsets(n):
    return np.array(list(itertools.product((0, 1), repeat=n)))


def _multilinear(s, corners):
    # s: (m, n), corners: (m, 2^n, d) ordered like _corner_offsets
    m, n = s.shape
    offs = _corner_offsets(n)
    w = np.ones((m, len(offs)))
    dw = np.ones((m, n, len(offs)))
    for i in range(n):
        fi = np.where(offs[:, i] == 1, s[:, i, None], 1.0 - s[:, i, None])
        dfi = np.where(offs[:, i] == 1, 1.0, -1.0)[None, :]
        w = w * fi
        for k in range(n):
            dw[:, k, :] *= dfi if k == i else fi
    val = np.einsum("mc,mcd->md", w, corners)
    jac = np.einsum("mkc,mcd->mdk", dw, corners)
    return val, jac


def _cell_cover_search(p, sep, limit=200000):
    dom = p.domain
    n = dom.n
    h = np.array(dom.spacing)
    res = np.array(dom.resolution)
    offs = _corner_offsets(n)
    cell_idx = np.stack(np.meshgrid(*[np.arange(r - 1) for r in res], indexing="ij"), -1).reshape(-1, n)
    vals = p.values
    corners = np.stack([vals[tuple((cell_idx + o).T)] for o in offs], axis=1)
    centers = corners.mean(axis=1)
    radius = np.max(np.linalg.norm(corners - centers[:, None, :], axis=-1), axis=1) * (1 + 1e-9)
    node_pts = vals.reshape(-1, n)
    node_idx = np.stack(np.unravel_index(np.arange(node_pts.shape[0]), tuple(res)), -1)
    tree = cKDTree(node_pts)
    hits = tree.query_ball_point(centers, radius)
    pairs_c, pairs_n = [], []
    for ci, lst in enumerate(hits):
        if lst:
            pairs_c.extend([ci] * len(lst))
            pairs_n.extend(lst)
    if not pairs_c:
        return None
    pairs_c = np.array(pairs_c)
    pairs_n = np.array(pairs_n)
    # source distance from node to cell box, in physical units
    lo = cell_idx[pairs_c] * h
    hi = lo + h
    xn = node_idx[pairs_n] * h
    gap = np.maximum(0.0, np.maximum(lo - xn, xn - hi))
    far = np.linalg.norm(gap, axis=1) > sep
    pairs_c, pairs_n = pairs_c[far][:limit], pairs_n[far][:limit]
    if pairs_c.size == 0:
        return None
    target = node_pts[pairs_n]
    cc = corners[pairs_c]
    s = np.full((pairs_c.size, n), 0.5)
    for _ in range(30):
        val, jac = _multilinear(s, cc)
        r = val - target
        try:
            step = np.linalg.solve(jac, r[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac.reshape(-1, n), r.reshape(-1), rcond=None)[0].reshape(r.shape)
        s = np.clip(s - step, -0.5, 1.5)
    val, _ = _multilinear(s, cc)
    dist = np.linalg.norm(val - target, axis=1)
    scale = np.maximum(1.0, np.linalg.norm(target, axis=1))
    ok = np.all((s >= -1e-9) & (s <= 1 + 1e-9), axis=1) & (dist <= 1e-9 * scale)
    if not ok.any():
        return None
    k = int(np.flatnonzero(ok)[0])
    origin = np.array([b[0] for b in dom.bounds])
    x1 = origin + node_idx[pairs_n[k]] * h
    x2 = origin + (cell_idx[pairs_c[k]] + np.clip(s[k], 0, 1)) * h
    return tuple(map(float, x1)), tuple(map(float, x2)), float(dist[k])


def injectivity_check(p: VectorFieldGrid, tol: float | None = None,
                      separation: float | None = None) -> InjectivityVerdict:
    """Decide whether the sampled map ``p`` is injective on its grid.

    1. ``sym(Dp) > 0`` at every node certifies injectivity on the convex box
       ("monotone map").
    2. Otherwise node images closer than ``tol`` whose sources are more than
       ``separation`` (default ``2h``) apart are a collision.  The default
       ``tol`` is a quarter of the shortest image of a grid edge, so a map
       that merely compresses the grid is not flagged.
    3. Otherwise each node image is tested for membership in the image of
       every far-away grid cell (multilinear inverse); a hit is a collision.
    """
    dom = p.domain
    h = min(dom.spacing)
    sep = 2 * h if separation is None else separation
    if tol is None:
        edges = [np.linalg.norm(np.diff(p.values, axis=i), axis=-1).min() for i in range(dom.n)]
        tol = 0.25 * float(min(edges))
    J = jacobian_field(p)
    sym = 0.5 * (J + np.swapaxes(J, -1, -2))
    if np.min(np.linalg.eigvalsh(sym)) > 0:
        return InjectivityVerdict(True, "monotone map", tolerance=tol, separation=sep)
    pts = p.values.reshape(-1, dom.n)
    src = dom.points().reshape(-1, dom.n)
    tree = cKDTree(pts)
    for i, j in sorted(tree.query_pairs(tol)):
        if np.linalg.norm(src[i] - src[j]) > sep:
            return InjectivityVerdict(
                False, "node collision",
                tuple(map(float, src[i])), tuple(map(float, src[j])),
                float(np.linalg.norm(pts[i] - pts[j])), tol, sep,
            )
    found = _cell_cover_search(p, sep)
    if found is not None:
        x1, x2, dist = found
        return InjectivityVerdict(False, "cell overlap", x1, x2, dist, tol, sep)
    return InjectivityVerdict(True, "no collision found", tolerance=tol, separation=sep)


# --------------------------------------------------------------------------
# reconstruction of the transformed potential
# --------------------------------------------------------------------------


@dataclass(eq=False)
class HatPotential:
    """``u_hat`` on a grid inside ``p(Omega)`` with ``grad u_hat = q o p^{-1}``."""

    uhat: ScalarFieldGrid
    r: VectorFieldGrid
    preimages: np.ndarray = field(repr=False)
    path_residual: float
    constants: MetricConstants
    shrink: float

    def source_hessians(self, u: ScalarFieldGrid) -> np.ndarray:
        """Spline Hessians of ``u`` at the preimages of the hat nodes."""
        spline = _potential_spline(u)
        x = self.preimages.reshape(-1, 2)
        return _spline_hessian(spline, x).reshape(self.preimages.shape[:-1] + (2, 2))


def _potential_spline(u: ScalarFieldGrid) -> RectBivariateSpline:
    ax = u.domain.axes()
    return RectBivariateSpline(ax[0], ax[1], u.values, kx=3, ky=3, s=0)


def _spline_gradient(spline, x):
    g1 = spline.ev(x[:, 0], x[:, 1], dx=1)
    g2 = spline.ev(x[:, 0], x[:, 1], dy=1)
    return np.stack([g1, g2], axis=-1)


def _spline_hessian(spline, x):
    h11 = spline.ev(x[:, 0], x[:, 1], dx=2)
    h12 = spline.ev(x[:, 0], x[:, 1], dx=1, dy=1)
    h22 = spline.ev(x[:, 0], x[:, 1], dy=2)
    return np.stack([np.stack([h11, h12], -1), np.stack([h12, h22], -1)], -2)


def _invert_p(spline, mc, targets, x0, lo, hi, iters=50):
    x = x0.copy()
    eye = np.eye(2)
    for _ in range(iters):
        val = mc.sigma * x + mc.tau * _spline_gradient(spline, x)
        jac = mc.sigma * eye + mc.tau * _spline_hessian(spline, x)
        step = np.linalg.solve(jac, (val - targets)[..., None])[..., 0]
        x = np.clip(x - step, lo, hi)
        if np.max(np.abs(step)) < 1e-14 * max(1.0, float(np.max(np.abs(x)))):
            break
    resid = np.linalg.norm(mc.sigma * x + mc.tau * _spline_gradient(spline, x) - targets, axis=-1)
    return x, resid


def reconstruct_hat_potential(u: ScalarFieldGrid, t: float, resolution=None,
                              shrink: float = 0.9, max_shrink_steps: int = 8) -> HatPotential:
    """Build ``u_hat`` with ``grad u_hat = q o p^{-1}`` on a grid inside ``p(Omega)``.

    ``p^{-1}`` is evaluated by Newton iteration on the bicubic spline
    interpolant of ``u``; ``u_hat`` is integrated from the grid centre along
    both axis orders, averaged, and normalised to vanish at ``p(centre of
    Omega)``.  ``path_residual`` is the largest disagreement between the two
    path orders.  The hat grid is the largest axis-aligned box inscribed in
    ``p(Omega)`` scaled about its centre by ``shrink`` (further reduced by
    factors of 0.9 until every node has a preimage).

    Raises
    ------
    PreconditionError
        If ``Dp`` is not uniformly positive definite, or ``n != 2``.
    """
    mc = metric_constants(t)
    _check_branch(mc)
    dom = u.domain
    if dom.n != 2:
        raise PreconditionError("hat-potential reconstruction is implemented for n = 2")
    proj = projection_p(u, t)
    if not proj.positive:
        raise PreconditionError(
            f"Dp is not uniformly positive (min sym eigenvalue {proj.min_sym_eigenvalue:.3e});"
            " p need not be injective"
        )
    spline = _potential_spline(u)
    P = proj.p.values
    lo_x = np.array([b[0] for b in dom.bounds])
    hi_x = np.array([b[1] for b in dom.bounds])
    # inscribed box: the images of opposite edges bound it from inside
    box_lo = np.array([P[0, :, 0].max(), P[:, 0, 1].max()])
    box_hi = np.array([P[-1, :, 0].min(), P[:, -1, 1].min()])
    if np.any(box_hi <= box_lo):
        raise PreconditionError("image p(Omega) contains no axis-aligned box")
    res = dom.resolution if resolution is None else tuple(resolution)
    tree = cKDTree(P.reshape(-1, 2))
    src = dom.points().reshape(-1, 2)
    mid = 0.5 * (box_lo + box_hi)
    if not 0 < shrink <= 1:
        raise DomainError(f"shrink must lie in (0, 1], got {shrink!r}")
    for step in range(max_shrink_steps + 1):
        factor = shrink * 0.9**step
        lo = mid - factor * (mid - box_lo)
        hi = mid + factor * (box_hi - mid)
        hat_dom = GridDomain(tuple(zip(lo, hi)), res)
        targets = hat_dom.points().reshape(-1, 2)
        _, nearest = tree.query(targets)
        x, resid = _invert_p(spline, mc, targets, src[nearest], lo_x, hi_x)
        inside = np.all((x > lo_x) & (x < hi_x), axis=1)
        if np.all(inside) and np.max(resid) < 1e-10 * max(1.0, float(np.max(np.abs(targets)))):
            break
    else:
        raise PreconditionError("could not place a grid inside p(Omega)")
    r = mc.tau * x + mc.sigma * _spline_gradient(spline, x)
    r_grid = r.reshape(res + (2,))
    ax1, ax2 = hat_dom.axes()
    i0, j0 = res[0] // 2, res[1] // 2

    def cumulative(values, axis_coords, axis, start):
        out = cumulative_trapezoid(values, axis_coords, axis=axis, initial=0.0)
        return out - np.take(out, [start], axis=axis)

    row = cumulative(r_grid[:, j0, 0], ax1, 0, i0)
    path_a = row[:, None] + cumulative(r_grid[:, :, 1], ax2, 1, j0)
    col = cumulative(r_grid[i0, :, 1], ax2, 0, j0)
    path_b = col[None, :] + cumulative(r_grid[:, :, 0], ax1, 0, i0)
    path_residual = float(np.max(np.abs(path_a - path_b)))
    uhat = 0.5 * (path_a + path_b)
    # normalise at the image of the domain centre
    pc = mc.sigma * dom.center + mc.tau * _spline_gradient(spline, dom.center[None, :])[0]
    uspl = RectBivariateSpline(ax1, ax2, uhat, kx=3, ky=3, s=0)
    uhat = uhat - float(uspl.ev(pc[0], pc[1]))
    return HatPotential(
        ScalarFieldGrid(hat_dom, uhat),
        VectorFieldGrid(hat_dom, r_grid),
        x.reshape(res + (2,)),
        path_residual,
        mc,
        factor,
    )


def hat_potential_closed_form(x, u, grad_u, mc: MetricConstants):
    """``u_hat(p(x))`` up to a constant, in closed form.

    Differentiating ``x -> u_hat(p(x))`` gives ``Dp^T q``, which is the
    gradient of ``sigma tau |x|^2/2 + (sigma^2 - tau^2) u + tau^2 x.grad u +
    sigma tau |grad u|^2 / 2``.  Used as an independent check of the path
    integration.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(grad_u, dtype=float)
    s, tt = mc.sigma, mc.tau
    return (s * tt * np.sum(x * x, -1) / 2 + (s * s - tt * tt) * np.asarray(u)
            + tt * tt * np.sum(x * g, -1) + s * tt * np.sum(g * g, -1) / 2)


# --------------------------------------------------------------------------
# the degenerate case t = pi/4
# --------------------------------------------------------------------------


def degenerate_conformal_factor(Q_samples: np.ndarray) -> float:
    """Measured ``kappa`` with ``g_{pi/4} = kappa P^* delta_0`` on planes."""
    Q_samples = np.asarray(Q_samples, dtype=float)
    n = Q_samples.shape[-1]
    G_src = graph_grams(Q_samples, MetricSpec.family(math.pi / 4))
    img = 0.5 * (np.eye(n) + Q_samples)
    G_img = img @ np.swapaxes(img, -1, -2)
    kappa = float(np.sum(G_src * G_img) / np.sum(G_img * G_img))
    resid = np.linalg.norm(G_src - kappa * G_img, axis=(-2, -1)) / np.linalg.norm(G_src, axis=(-2, -1))
    if np.max(resid) > KAPPA_RTOL:
        raise ConsistencyError("degenerate metric is not a constant multiple of P^* delta_0")
    return kappa


@dataclass
class DegenerateVolume:
    direct: float
    boundary: float
    kappa: float


def _boundary_integral_2d(P, dom):
    # counter-clockwise loop of boundary node images; omega = -x_2 dx_1
    loop = np.concatenate([P[:, 0], P[-1, 1:], P[-2::-1, -1], P[0, -2:0:-1], P[:1, 0]])
    x1, x2 = loop[:, 0], loop[:, 1]
    return float(-np.sum(0.5 * (x2[1:] + x2[:-1]) * np.diff(x1)))


def _boundary_integral_3d(P, dom):
    # omega = x_3 dx_1 ^ dx_2 over the six faces with outward orientation
    total = 0.0
    h = dom.spacing
    for k in range(3):
        i, j = [a for a in range(3) if a != k]
        for end, sign in ((-1, 1.0), (0, -1.0)):
            face = np.take(P, end, axis=k)
            di = np.gradient(face, h[i], axis=0, edge_order=2)
            dj = np.gradient(face, h[j], axis=1, edge_order=2)
            jac = di[..., 0] * dj[..., 1] - di[..., 1] * dj[..., 0]
            integrand = face[..., 2] * jac
            w = np.ones(integrand.shape)
            w[0, :] *= 0.5; w[-1, :] *= 0.5; w[:, 0] *= 0.5; w[:, -1] *= 0.5
            orient = sign * (-1.0) ** k
            total += orient * float(np.sum(w * integrand)) * h[i] * h[j]
    return total


def degenerate_projection_volume(F: VectorFieldGrid, tol: float = 1e-9,
                                 kappa_samples: int = 64) -> DegenerateVolume:
    """Volume of the graph of ``F`` in ``g_{pi/4}``, computed twice.

    ``direct`` integrates the induced volume form and divides by the measured
    conformal factor ``kappa^{n/2}``; ``boundary`` integrates ``P^* omega``
    (``d omega = dVol``) over the boundary of the graph only.

    Raises
    ------
    PreconditionError
        If ``DF`` has an eigenvalue within ``tol`` of ``-1`` at some node.
    """
    dom = F.domain
    if F.mask is not None:
        raise PreconditionError("degenerate_projection_volume needs a rectangular domain")
    J = jacobian_field(F)
    eig = np.linalg.eigvals(J)
    closest = float(np.min(np.abs(eig + 1.0)))
    if closest <= tol:
        raise PreconditionError(f"DF has eigenvalue -1 within {closest:.2e}")
    Q = np.swapaxes(J, -1, -2)
    kappa = degenerate_conformal_factor(_sample_planes(Q, kappa_samples))
    direct = graph_volume(F, MetricSpec.family(math.pi / 4)) / kappa ** (dom.n / 2)
    P = 0.5 * (dom.points() + F.values)
    if dom.n == 2:
        boundary = _boundary_integral_2d(P, dom)
    else:
        boundary = _boundary_integral_3d(P, dom)
    return DegenerateVolume(direct, boundary, kappa)
