import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slaglab.equation_family import eigenvalue_transform
from slaglab.errors import DomainError, PreconditionError
from slaglab.graph_geometry import gradient_field, hessian_field, smooth_bump
from slaglab.grids import GridDomain, ScalarFieldGrid, VectorFieldGrid
from slaglab.lab.scenarios import expcos_potential, observed_orders
from slaglab.lewy_transforms import (
    apply_phi_t,
    degenerate_conformal_factor,
    degenerate_projection_volume,
    hat_potential_closed_form,
    injectivity_check,
    measure_conformal_factor,
    projection_p,
    pushforward_grams,
    reconstruct_hat_potential,
)
from slaglab.metric_planes import MetricSpec, graph_grams, metric_constants

UNIT = ((0.0, 1.0), (0.0, 1.0))
T6 = math.atan(0.5)


def quadratic_field(dom, c=1.0):
    return ScalarFieldGrid.from_function(dom, lambda x, y: 0.5 * c * (x * x + y * y))


def expcos_field(bounds, res, k, t=T6):
    u_fn, _ = expcos_potential(metric_constants(t).a, k)
    return ScalarFieldGrid.from_function(GridDomain(bounds, res), u_fn)


# --------------------------------------------------------------------------
# conformal factor
# --------------------------------------------------------------------------


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.1, 0.4, 0.7, 0.9, 1.3, math.pi / 2]))
def test_pullback_proportional(seed, t):
    mc = metric_constants(t)
    rng = np.random.default_rng(seed)
    Q = 0.3 * rng.standard_normal((16, 2, 2))
    Q = Q + np.swapaxes(Q, -1, -2)
    src = graph_grams(Q, MetricSpec.family(t))
    img = pushforward_grams(Q, mc)
    kappa = measure_conformal_factor(Q, mc)
    assert kappa == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(img, kappa * src, rtol=1e-8, atol=1e-12)


def test_phi_t_undefined_at_quarter_pi():
    with pytest.raises(DomainError):
        apply_phi_t(quadratic_field(GridDomain.box(UNIT, 9)), math.pi / 4)


# --------------------------------------------------------------------------
# apply_phi_t
# --------------------------------------------------------------------------


def test_phi_t_near_zero_is_identity():
    u = quadratic_field(GridDomain.box(UNIT, 9), 1.3)
    tg = apply_phi_t(u, 1e-12)
    inner = (slice(1, -1), slice(1, -1))
    x = u.domain.points()[inner].reshape(-1, 2)
    g = gradient_field(u).values[inner].reshape(-1, 2)
    assert np.allclose(tg.samples, np.hstack([x, g]), atol=1e-10)


@pytest.mark.parametrize("t", [0.2, 0.6, 1.0, 1.4])
@pytest.mark.parametrize("c", [1.0, 2.5])
def test_quadratic_maps_to_linear_graph(t, c):
    u = quadratic_field(GridDomain.box(UNIT, 9), c)
    mc = metric_constants(t)
    tg = apply_phi_t(u, t)
    lam_hat = (mc.tau + mc.sigma * c) / (mc.sigma + mc.tau * c)
    assert np.allclose(tg.tangents, lam_hat * np.eye(2), atol=1e-12)
    # closed-form image: p = (sigma + tau c) x, q = (tau + sigma c) x
    P, Qimg = tg.samples[:, :2], tg.samples[:, 2:]
    assert np.allclose(Qimg, lam_hat * P, atol=1e-12)


def test_expcos_transport():
    k = 3.0
    mc = metric_constants(T6)
    u = expcos_field(((0.1, 1.0), (0.0, 1.0)), (65, 65), k)
    tg = apply_phi_t(u, T6)
    x1 = u.domain.interior(1).mesh()[0].ravel()
    exact = np.stack([-mc.a - k * np.exp(x1), -mc.a + k * np.exp(x1)], -1)
    expected = np.sort(eigenvalue_transform(exact, mc), -1)
    assert np.max(np.abs(np.sort(tg.tangent_eigenvalues(), -1) - expected)) < 1e-3


def test_transformed_graph_write(tmp_path):
    tg = apply_phi_t(quadratic_field(GridDomain.box(UNIT, 7)), 0.5)
    csv, sidecar = tg.write(tmp_path / "img.csv", {"run": "unit"})
    rows = np.loadtxt(csv, delimiter=",", skiprows=1)
    assert rows.shape == (25, 4)
    assert csv.read_text().splitlines()[0] == "x_1,x_2,y_1,y_2"
    meta = json.loads(sidecar.read_text())
    assert meta["t"] == 0.5 and meta["kappa"] == pytest.approx(1.0)
    assert meta["provenance"] == {"run": "unit"}


# --------------------------------------------------------------------------
# projection p
# --------------------------------------------------------------------------


def test_projection_of_quadratic():
    t = 0.5
    mc = metric_constants(t)
    proj = projection_p(quadratic_field(GridDomain.box(UNIT, 9)), t)
    assert np.allclose(proj.dp, (mc.sigma + mc.tau) * np.eye(2))
    assert proj.positive


@pytest.mark.parametrize("t", [0.2, 0.5, 0.7])
def test_projection_lower_bound_from_hessian_bound(t):
    mc = metric_constants(t)
    # D^2 u >= -a on the grid
    u = ScalarFieldGrid.from_function(GridDomain.box(UNIT, 17),
                                      lambda x, y: -0.5 * mc.a * x * x + 0.2 * y * y + 0.1 * x**4)
    assert np.min(np.linalg.eigvalsh(hessian_field(u))) >= -mc.a - 1e-9
    proj = projection_p(u, t)
    assert proj.min_sym_eigenvalue >= mc.sigma - mc.tau * mc.a - 1e-9
    assert mc.sigma - mc.tau * mc.a > 0


def test_projection_indefinite_for_large_k():
    proj = projection_p(expcos_field(((0.1, 3.0), (0.0, 2 * math.pi)), (33, 65), 50.0), T6)
    assert not proj.positive


# --------------------------------------------------------------------------
# injectivity
# --------------------------------------------------------------------------


def test_injectivity_certificate_for_quadratic():
    v = injectivity_check(projection_p(quadratic_field(GridDomain.box(UNIT, 17)), 0.5).p)
    assert v.injective and v.certificate == "monotone map"


def test_expcos_strip_of_height_two_pi_has_no_witness():
    # p(z) = (sigma - tau a) z + tau k e^{conj z} is injective on this strip;
    # see the decisions ledger for the analytic argument
    bounds = ((0.1, 3.0), (0.0, 2 * math.pi))
    for res in ((65, 129), (129, 257)):
        v = injectivity_check(projection_p(expcos_field(bounds, res, 50.0), T6).p)
        assert v.injective
        assert v.certificate == "no collision found"


@pytest.mark.parametrize("x1", [0.1, 0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("x2", [0.0, 0.05, 0.2])
def test_expcos_collision_partners_lie_above_the_strip(x1, x2):
    # p(z) = tau (b z + k exp(conj z)) in complex notation: the partner of z
    # sits near z + 2 pi i, and strictly more than 2 pi higher
    from scipy.optimize import fsolve

    mc = metric_constants(T6)
    k = 50.0

    def p(z):
        return mc.tau * (mc.b * z + k * np.exp(np.conj(z)))

    z = complex(x1, x2)

    def gap(v):
        d = p(z + 2j * math.pi + complex(*v)) - p(z)
        return [d.real, d.imag]

    v = fsolve(gap, [0.0, 0.01])
    assert abs(p(z + 2j * math.pi + complex(*v)) - p(z)) < 1e-10 * abs(p(z))
    assert v[1] > 0.005


def test_expcos_taller_strip_has_witness():
    mc = metric_constants(T6)
    k = 50.0
    bounds = ((0.1, 3.0), (0.0, 2.2 * math.pi))
    v = injectivity_check(projection_p(expcos_field(bounds, (65, 129), k), T6).p)
    assert not v.injective
    # confirm the witness with the analytic map
    _, grad = expcos_potential(mc.a, k)

    def p(x):
        g = grad(*x)
        return np.array([mc.sigma * x[0] + mc.tau * g[0], mc.sigma * x[1] + mc.tau * g[1]])

    x1, x2 = np.array(v.x1), np.array(v.x2)
    h = max(GridDomain(bounds, (65, 129)).spacing)
    assert np.linalg.norm(x1 - x2) > 2 * h
    assert np.linalg.norm(p(x1) - p(x2)) < 0.05 * np.linalg.norm(p(x1))


def test_small_k_small_domain_injective():
    mc = metric_constants(T6)
    v = injectivity_check(projection_p(expcos_field(((0.1, 0.5), (0.0, 0.5)), (33, 33), mc.b * 1.05), T6).p)
    assert v.injective


def test_injectivity_node_collision():
    # a fold: x -> (|x_1 - 1/2|, x_2) identifies mirrored nodes
    dom = GridDomain.box(UNIT, 17)
    F = VectorFieldGrid.from_function(dom, lambda x, y: (np.abs(x - 0.5), y))
    v = injectivity_check(F)
    assert not v.injective and v.certificate == "node collision"
    assert v.distance < v.tolerance


# --------------------------------------------------------------------------
# hat potential
# --------------------------------------------------------------------------


def test_hat_potential_of_quadratic_is_unit_quadratic():
    t = 0.5
    hp = reconstruct_hat_potential(quadratic_field(GridDomain.box(((-1.0, 1.0), (-1.0, 1.0)), 33)), t)
    H = hessian_field(hp.uhat)
    assert np.allclose(H, np.eye(2), atol=1e-8)
    assert hp.path_residual < 1e-10


@pytest.mark.parametrize("t, c", [(0.3, 2.0), (0.6, 0.5), (1.1, 3.0)])
def test_hat_potential_scaled_quadratic(t, c):
    mc = metric_constants(t)
    hp = reconstruct_hat_potential(quadratic_field(GridDomain.box(UNIT, 33), c), t)
    lam_hat = (mc.tau + mc.sigma * c) / (mc.sigma + mc.tau * c)
    assert np.allclose(np.linalg.eigvalsh(hessian_field(hp.uhat)), lam_hat, atol=1e-7)


def test_hat_potential_matches_closed_form():
    t = 0.4
    mc = metric_constants(t)
    f = lambda x, y: 0.6 * x * x + 0.4 * y * y + 0.1 * np.sin(2 * x) * np.cos(y)

    def grad(x, y):
        return np.stack([1.2 * x + 0.2 * np.cos(2 * x) * np.cos(y), 0.8 * y - 0.1 * np.sin(2 * x) * np.sin(y)], -1)

    errors = []
    for r in (17, 33, 65):
        u = ScalarFieldGrid.from_function(GridDomain.box(UNIT, r), f)
        hp = reconstruct_hat_potential(u, t)
        x = hp.preimages
        closed = hat_potential_closed_form(x, f(x[..., 0], x[..., 1]), grad(x[..., 0], x[..., 1]), mc)
        diff = hp.uhat.values - closed
        errors.append(np.max(np.abs(diff - diff.mean())))
        assert hp.path_residual < 50 * max(u.domain.spacing) ** 2
    assert min(observed_orders(errors)) > 1.7


def test_reconstruction_refuses_non_monotone_p():
    u = expcos_field(((0.1, 3.0), (0.0, 2 * math.pi)), (33, 65), 50.0)
    with pytest.raises(PreconditionError):
        reconstruct_hat_potential(u, T6)


def test_reconstruction_two_dimensional_only():
    dom = GridDomain.box([(0, 1)] * 3, 7)
    u = ScalarFieldGrid.from_function(dom, lambda x, y, z: (x * x + y * y + z * z) / 2)
    with pytest.raises(PreconditionError):
        reconstruct_hat_potential(u, 0.5)


# --------------------------------------------------------------------------
# degenerate projection t = pi/4
# --------------------------------------------------------------------------


def test_degenerate_conformal_factor():
    rng = np.random.default_rng(3)
    Q = rng.standard_normal((20, 3, 3))
    assert degenerate_conformal_factor(Q) == pytest.approx(2 * math.sqrt(2), rel=1e-12)


def test_degenerate_identity_graph():
    dom = GridDomain.box(UNIT, 17)
    F = VectorFieldGrid.from_function(dom, lambda x, y: (x, y))
    vol = degenerate_projection_volume(F)
    # P = (x + F)/2 = x maps onto the unit square
    assert vol.direct == pytest.approx(1.0, rel=1e-12)
    assert vol.boundary == pytest.approx(1.0, rel=1e-12)


def interior_bump(dom, amplitude):
    w = 0.25 * np.array([hi - lo for lo, hi in dom.bounds])
    b = smooth_bump(dom.mesh(), dom.center, w)
    return np.stack([amplitude * b] + [0.5 * amplitude * b] * (dom.n - 1), -1)


def test_degenerate_stokes_consistency():
    f = lambda x, y: (x + 0.2 * np.sin(y), y + 0.3 * x * x)
    diffs = []
    for r in (17, 33, 65):
        dom = GridDomain.box(UNIT, r)
        vol = degenerate_projection_volume(VectorFieldGrid.from_function(dom, f))
        P = 0.5 * (dom.points() + VectorFieldGrid.from_function(dom, f).values)
        bound = 5 * max(dom.spacing) * dom.perimeter * np.max(np.abs(P[..., -1]))
        assert abs(vol.direct - vol.boundary) <= bound
        diffs.append(abs(vol.direct - vol.boundary))
    assert min(observed_orders(diffs)) > 1.5


def test_degenerate_same_boundary_same_volume():
    dom = GridDomain.box(UNIT, 65)
    base = dom.points() + 0.1 * dom.points() ** 2
    F1 = VectorFieldGrid(dom, base)
    F2 = VectorFieldGrid(dom, base + interior_bump(dom, 0.15))
    v1, v2 = degenerate_projection_volume(F1), degenerate_projection_volume(F2)
    assert v1.boundary == v2.boundary
    h = max(dom.spacing)
    assert abs(v1.direct - v2.direct) <= h


def test_degenerate_three_dimensional():
    dom = GridDomain.box([(0, 1)] * 3, 17)
    F = VectorFieldGrid(dom, dom.points() * (1 + 0.1 * dom.points()) + interior_bump(dom, 0.1))
    vol = degenerate_projection_volume(F)
    exact = np.prod([0.5 * (2 + 0.1) for _ in range(3)])  # P_i = x_i + 0.05 x_i^2 on [0, 1]
    assert vol.boundary == pytest.approx(exact, rel=1e-3)
    assert vol.direct == pytest.approx(exact, rel=1e-3)


def test_degenerate_rejects_eigenvalue_minus_one():
    dom = GridDomain.box(UNIT, 9)
    F = VectorFieldGrid.from_function(dom, lambda x, y: (-x, y))
    with pytest.raises(PreconditionError):
        degenerate_projection_volume(F)
