"""Discrete geometry of graphs ``(x, F(x))`` over rectangular grids.

Conventions: the Jacobian ``DF[..., i, j] = dF_i/dx_j``; the tangent plane
at a node has graph matrix ``Q = DF^T`` (``Q[i, j] = dF_j/dx_i``), matching
:class:`slaglab.metric_planes.TangentPlane`.  Gradients and Jacobians on the
full grid use second-order differences with one-sided stencils at the edges
(``numpy.gradient(edge_order=2)``); Hessians and residuals use central
stencils on interior nodes only.  All stencils are exact on quadratics.
"""

from __future__ import annotations

import numpy as np

from .equation_family import ADMISSIBILITY_MARGIN, f_t
from .errors import NotSpacelikeError, PreconditionError
from .grids import AnnulusMask, GridDomain, ScalarFieldGrid, VectorFieldGrid
from .metric_planes import DEFAULT_TOL, MetricSpec, graph_grams, metric_constants

__all__ = [
    "hessian_field",
    "gradient_field",
    "jacobian_field",
    "tangent_matrices",
    "cell_weights",
    "integrate",
    "domain_measure",
    "volume_density",
    "graph_volume",
    "mean_curvature_residual",
    "null_lagrangian_integral",
    "calibration_integral",
    "smooth_bump",
    "random_perturbation",
]


# --------------------------------------------------------------------------
# differential operators
# --------------------------------------------------------------------------


def _shift(values: np.ndarray, offsets) -> np.ndarray:
    # interior view of ``values`` shifted by ``offsets`` (each -1, 0 or +1)
    idx = tuple(slice(1 + o, values.shape[i] - 1 + o) for i, o in enumerate(offsets))
    return values[idx]


def hessian_field(u: ScalarFieldGrid) -> np.ndarray:
    """Central-difference Hessian at interior nodes.

    Returns an array of shape ``(*interior_resolution, n, n)``; mixed
    derivatives use the four-point cross stencil, so the result is symmetric
    by construction.
    """
    dom = u.domain
    n, h, v = dom.n, dom.spacing, u.values
    if min(dom.resolution) < 3:
        raise PreconditionError("need at least one interior node per axis")
    shape = tuple(r - 2 for r in dom.resolution) + (n, n)
    H = np.empty(shape)
    zero = [0] * n
    center = _shift(v, zero)
    for i in range(n):
        e = list(zero)
        e[i] = 1
        minus = [-x for x in e]
        H[..., i, i] = (_shift(v, e) - 2 * center + _shift(v, minus)) / h[i] ** 2
        for j in range(i + 1, n):
            pp = list(zero); pp[i] = 1; pp[j] = 1
            pm = list(zero); pm[i] = 1; pm[j] = -1
            mp = list(zero); mp[i] = -1; mp[j] = 1
            mm = list(zero); mm[i] = -1; mm[j] = -1
            d = (_shift(v, pp) - _shift(v, pm) - _shift(v, mp) + _shift(v, mm)) / (4 * h[i] * h[j])
            H[..., i, j] = d
            H[..., j, i] = d
    return H


def gradient_field(u: ScalarFieldGrid) -> VectorFieldGrid:
    """Second-order gradient of ``u`` on the full grid."""
    dom = u.domain
    grads = np.gradient(u.values, *dom.spacing, edge_order=2)
    return VectorFieldGrid(dom, np.stack(grads, axis=-1), u.mask)


def jacobian_field(F: VectorFieldGrid) -> np.ndarray:
    """``DF[..., i, j] = dF_i / dx_j`` on the full grid."""
    dom = F.domain
    J = np.empty(dom.resolution + (dom.n, dom.n))
    for i in range(dom.n):
        for j, g in enumerate(np.gradient(F.values[..., i], *dom.spacing, edge_order=2)):
            J[..., i, j] = g
    return J


def tangent_matrices(F: VectorFieldGrid) -> np.ndarray:
    """Graph matrices ``Q = DF^T`` of the tangent planes at every node."""
    return np.swapaxes(jacobian_field(F), -1, -2)


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def cell_weights(domain: GridDomain, mask: AnnulusMask | None = None, subsamples: int = 4) -> np.ndarray:
    """Nodal quadrature weights.

    Each cell contributes ``coverage * cell_volume / 2^n`` to each of its
    corners; without a mask this is the composite trapezoid rule.
    """
    n = domain.n
    cell_vol = float(np.prod(domain.spacing))
    if mask is None:
        cover = np.ones(tuple(r - 1 for r in domain.resolution))
    else:
        cover = mask.cell_coverage(domain, subsamples)
    w = np.zeros(domain.resolution)
    share = cover * cell_vol / 2**n
    for corner in np.ndindex(*(2,) * n):
        idx = tuple(slice(c, c + r - 1) for c, r in zip(corner, domain.resolution))
        w[idx] += share
    return w


def integrate(values: np.ndarray, domain: GridDomain, mask=None, weights=None) -> float:
    """Quadrature of nodal ``values`` over the (masked) domain."""
    if weights is None:
        weights = cell_weights(domain, mask)
    return float(np.sum(weights * values))


def domain_measure(domain: GridDomain, mask=None) -> float:
    return float(np.sum(cell_weights(domain, mask)))


def _location(domain: GridDomain, flat_index: int) -> tuple:
    idx = np.unravel_index(flat_index, domain.resolution)
    return tuple(float(ax[i]) for ax, i in zip(domain.axes(), idx))


def volume_density(F: VectorFieldGrid, metric: MetricSpec, tol: float = DEFAULT_TOL,
                   weights: np.ndarray | None = None) -> np.ndarray:
    """Pointwise ``sqrt(det Gram)`` of the tangent planes.

    Nodes with zero quadrature weight are not checked and get density 0.

    Raises
    ------
    NotSpacelikeError
        At the first weighted node whose Gram matrix is not positive definite.
    """
    dom = F.domain
    if weights is None:
        weights = cell_weights(dom, F.mask)
    G = graph_grams(tangent_matrices(F), metric)
    lam_min = np.linalg.eigvalsh(G)[..., 0]
    active = weights > 0
    bad = active & (lam_min <= tol)
    if bad.any():
        flat = int(np.flatnonzero(bad)[0])
        loc = _location(dom, flat)
        raise NotSpacelikeError(
            f"graph not space-like under {metric} at x={loc} "
            f"(min Gram eigenvalue {lam_min.ravel()[flat]:.3e})",
            min_eigenvalue=float(lam_min.ravel()[flat]),
            location=loc,
        )
    dens = np.zeros(dom.resolution)
    dens[active] = np.sqrt(np.linalg.det(G[active]))
    return dens


def graph_volume(F: VectorFieldGrid, metric: MetricSpec, tol: float = DEFAULT_TOL) -> float:
    """Volume of the graph of ``F`` under ``metric`` (masked trapezoid rule)."""
    weights = cell_weights(F.domain, F.mask)
    return float(np.sum(weights * volume_density(F, metric, tol, weights)))


def mean_curvature_residual(u: ScalarFieldGrid, t: float) -> ScalarFieldGrid:
    """``|grad_h F^t(D_h^2 u)|`` on the grid stripped of two boundary layers.

    The composed scalar ``F^t(D^2 u)`` is differentiated directly, so the
    result is basis-free and unaffected by eigenvalue crossings.
    """
    mc = metric_constants(t)
    dom = u.domain
    if min(dom.resolution) < 5:
        raise PreconditionError("need two interior layers for the residual")
    H = hessian_field(u)
    lam = np.linalg.eigvalsh(H)
    den = mc.sin_t * (1.0 + lam * lam) + 2.0 * mc.cos_t * lam
    bad = np.any(den <= ADMISSIBILITY_MARGIN, axis=-1)
    if bad.any():
        inner = dom.interior(1)
        loc = _location(inner, int(np.flatnonzero(bad)[0]))
        raise NotSpacelikeError(f"graph of grad u not space-like in g_t at x={loc}", location=loc)
    Fv = f_t(lam, mc)
    inner = dom.interior(1)
    grads = [
        (_shift(Fv, [1 if k == i else 0 for k in range(dom.n)])
         - _shift(Fv, [-1 if k == i else 0 for k in range(dom.n)])) / (2 * inner.spacing[i])
        for i in range(dom.n)
    ]
    norm = np.sqrt(sum(g * g for g in grads))
    return ScalarFieldGrid(dom.interior(2), norm)


def null_lagrangian_integral(F: VectorFieldGrid) -> float:
    """Quadrature of ``det DF`` over the (masked) domain."""
    return integrate(np.linalg.det(jacobian_field(F)), F.domain, F.mask)


def calibration_integral(F: VectorFieldGrid, c: float) -> float:
    """Integral of ``(c dx + dy / c) / 2`` over the graph of ``F``:
    ``(c |Omega| + (1/c) int det DF) / 2``."""
    if not c > 0:
        raise PreconditionError(f"c must be positive, got {c!r}")
    weights = cell_weights(F.domain, F.mask)
    area = float(np.sum(weights))
    det_int = float(np.sum(weights * np.linalg.det(jacobian_field(F))))
    return 0.5 * (c * area + det_int / c)


# --------------------------------------------------------------------------
# perturbations vanishing near the boundary
# --------------------------------------------------------------------------


def _bump1d(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _bump1d_prime(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si**2)) * (-2.0 * si / (1.0 - si**2) ** 2)
    return out


def smooth_bump(coords, center, width, derivative: int | None = None) -> np.ndarray:
    """Tensor-product C-infinity bump with peak 1, supported in the box
    ``|x_i - center_i| < width_i``; ``derivative=i`` returns d/dx_i."""
    val = 1.0
    for i, (x, c, w) in enumerate(zip(coords, center, width)):
        s = (x - c) / w
        val = val * (_bump1d_prime(s) / w if derivative == i else _bump1d(s))
    return val


def random_perturbation(domain: GridDomain, rng: np.random.Generator, kind: str = "generic",
                        amplitude: float = 0.1, n_bumps: int = 3) -> VectorFieldGrid:
    """Smooth vector field compactly supported inside the domain.

    ``kind="gradient"`` returns ``grad psi`` for a sum of bumps ``psi``;
    ``kind="generic"`` draws independent bump sums per component, so the
    Jacobian is not symmetric.  The field is scaled so that the largest
    spectral norm of its sampled Jacobian equals ``amplitude``; any
    ``amplitude < 1`` therefore keeps ``x + G(x)`` space-like in ``dxdy``.
    """
    coords = domain.mesh()
    n = domain.n
    lo = np.array([b[0] for b in domain.bounds])
    hi = np.array([b[1] for b in domain.bounds])
    span = hi - lo
    # keep supports off the one-sided edge stencils so det DF stays a discrete null Lagrangian
    margin = np.maximum(3 * np.array(domain.spacing), 0.02 * span)
    comps = [np.zeros(domain.resolution) for _ in range(n)]
    for _ in range(n_bumps):
        width = span * rng.uniform(0.15, 0.35, n)
        center = lo + margin + width + rng.uniform(0, 1, n) * (span - 2 * width - 2 * margin)
        if kind == "gradient":
            amp = rng.uniform(-1, 1) * float(np.min(width))
            for i in range(n):
                comps[i] += amp * smooth_bump(coords, center, width, derivative=i)
        elif kind == "generic":
            for i in range(n):
                comps[i] += rng.uniform(-1, 1) * smooth_bump(coords, center, width)
        else:
            raise ValueError(f"unknown perturbation kind {kind!r}")
    G = VectorFieldGrid(domain, np.stack(comps, axis=-1))
    peak = float(np.max(np.linalg.norm(jacobian_field(G), ord=2, axis=(-2, -1))))
    if peak == 0.0:
        return G
    return VectorFieldGrid(domain, G.values * (amplitude / peak))
