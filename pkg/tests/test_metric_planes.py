import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from slaglab.errors import DomainError, NotSpacelikeError, PreconditionError
from slaglab.metric_planes import (
    MetricSpec,
    TangentPlane,
    alpha_theta,
    beta_theta,
    graph_grams,
    graph_phi_c,
    graph_volumes,
    induced_gram,
    is_lagrangian,
    is_spacelike,
    metric_constants,
    orthonormal_basis,
    phi_c,
    pk_decomposition,
    plane_volume,
    pseudo_phase,
    sym_det_bound,
)

ROT = np.array([[1.0, 1.0], [-1.0, 1.0]])


def random_positive_sym_part(rng, n, antisym_scale=1.0):
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    S = V @ np.diag(rng.uniform(0.2, 3.0, n)) @ V.T
    A = rng.standard_normal((n, n)) * antisym_scale
    return S + 0.5 * (A - A.T)


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


def test_constants_quarter_pi():
    mc = metric_constants(math.pi / 4)
    assert mc.a == 1.0 and mc.b == 0.0
    assert mc.regime == "degenerate"


def test_constants_sixth_pi_against_symbolic():
    t = sp.pi / 6
    a = sp.cot(t)
    b = sp.sqrt(sp.Abs(sp.cot(t) ** 2 - 1))
    assert sp.simplify(a - sp.sqrt(3)) == 0
    assert sp.simplify(b - sp.sqrt(2)) == 0
    mc = metric_constants(math.pi / 6)
    assert mc.a == pytest.approx(float(sp.sqrt(3)), abs=1e-14)
    assert mc.b == pytest.approx(float(sp.sqrt(2)), abs=1e-14)
    assert mc.sigma / mc.tau == pytest.approx(float(sp.sqrt(3) + sp.sqrt(2)), rel=1e-12)
    assert mc.regime == "pseudo"


def test_constants_half_pi():
    mc = metric_constants(math.pi / 2)
    assert mc.a == 0.0 and mc.b == 1.0
    assert mc.regime == "euclidean"


def test_constants_tiny_t_snaps_to_zero():
    mc = metric_constants(1e-43)
    assert math.isinf(mc.a) and mc.t == 0.0


def test_constants_zero_flags_infinite():
    mc = metric_constants(0.0)
    assert math.isinf(mc.a) and math.isinf(mc.b)
    assert mc.sigma == pytest.approx(1.0) and mc.tau == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("t", [-0.1, math.pi / 2 + 1e-9, math.nan])
def test_constants_out_of_range(t):
    with pytest.raises(DomainError):
        metric_constants(t)


# below t ~ 0.02 the product (a+b)(a-b) loses ~2 a^2 eps to cancellation in a-b
@given(st.floats(0.02, math.pi / 4 - 1e-3))
def test_pseudo_identities(t):
    mc = metric_constants(t)
    assert (mc.a + mc.b) * (mc.a - mc.b) == pytest.approx(1.0, rel=1e-12)
    assert mc.sigma / mc.tau == pytest.approx(mc.a + mc.b, rel=1e-12)
    assert mc.sigma >= mc.tau >= 0


@given(st.floats(1e-3, math.pi / 2))
def test_sigma_tau_squares(t):
    mc = metric_constants(t)
    c, s = math.cos(t), math.sin(t)
    # sigma, tau = (sqrt(c + s) +- sqrt|c - s|) / 2
    assert (mc.sigma + mc.tau) ** 2 == pytest.approx(c + s, abs=1e-12)
    assert mc.sigma**2 + mc.tau**2 == pytest.approx(max(c, s), abs=1e-12)
    assert 2 * mc.sigma * mc.tau == pytest.approx(min(c, s), abs=1e-12)
    assert mc.C_t == pytest.approx(math.atan2(mc.tau, mc.sigma) - math.atan2(mc.a, mc.b), abs=1e-15)


# --------------------------------------------------------------------------
# metrics and Grams
# --------------------------------------------------------------------------


def test_dxdy_signature():
    ev = np.linalg.eigvalsh(MetricSpec.dxdy().matrix(3))
    assert np.allclose(ev, [-0.5] * 3 + [0.5] * 3)


@given(st.floats(0, math.pi / 2), st.integers(1, 4))
def test_family_matrix_is_blend(t, n):
    g0 = 2 * MetricSpec.dxdy().matrix(n)
    expected = math.cos(t) * g0 + math.sin(t) * np.eye(2 * n)
    assert np.allclose(MetricSpec.family(t).matrix(n), expected, atol=1e-15)


def test_family_endpoints():
    assert np.array_equal(MetricSpec.family(0.0).matrix(2), 2 * MetricSpec.dxdy().matrix(2))
    assert np.allclose(MetricSpec.family(math.pi / 2).matrix(2), MetricSpec.euclidean().matrix(2), atol=1e-16)


def test_gram_identity_and_rotation():
    assert np.array_equal(induced_gram(TangentPlane.graph(np.eye(2)), MetricSpec.dxdy()), np.eye(2))
    assert np.allclose(induced_gram(TangentPlane.graph(ROT), MetricSpec.dxdy()), np.eye(2))


@given(st.floats(0.01, math.pi / 2), st.lists(st.floats(-5, 5), min_size=1, max_size=4))
def test_gram_diagonal_family(t, lam):
    G = induced_gram(TangentPlane.graph(np.diag(lam)), MetricSpec.family(t))
    lam = np.array(lam)
    expected = np.diag(math.sin(t) * (1 + lam**2) + 2 * math.cos(t) * lam)
    assert np.allclose(G, expected, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.floats(0, math.pi / 2))
def test_graph_gram_closed_form_matches_bilinear(seed, n, t):
    Q = np.random.default_rng(seed).standard_normal((n, n))
    metric = MetricSpec.family(t)
    assert np.allclose(graph_grams(Q, metric), induced_gram(TangentPlane.graph(Q), metric), atol=1e-12)


# --------------------------------------------------------------------------
# volumes and causal character
# --------------------------------------------------------------------------


@pytest.mark.parametrize("Q", [np.diag([2.0, 0.5]), np.eye(2), ROT])
def test_volume_examples(Q):
    assert plane_volume(TangentPlane.graph(Q), MetricSpec.dxdy()) == pytest.approx(1.0, abs=1e-15)


def test_volume_rejects_timelike():
    with pytest.raises(NotSpacelikeError) as info:
        plane_volume(TangentPlane.graph(-np.eye(2)), MetricSpec.dxdy())
    assert info.value.min_eigenvalue == pytest.approx(-1.0)


def test_is_lagrangian_examples():
    assert is_lagrangian(TangentPlane.graph(np.eye(2)))
    assert not is_lagrangian(TangentPlane.graph(ROT))
    assert is_lagrangian(TangentPlane.graph([[2, 0.5], [0.5, 1]]))


def test_is_lagrangian_basis_rep_uses_symplectic_form():
    Q = np.array([[2.0, 0.5], [0.5, 1.0]])
    M = np.array([[1.0, 2.0], [0.0, 1.0]])
    B = M @ np.hstack([np.eye(2), Q])
    assert is_lagrangian(TangentPlane.basis(B))
    assert not is_lagrangian(TangentPlane.basis(M @ np.hstack([np.eye(2), ROT])))


def test_is_spacelike_examples():
    t = math.pi / 6
    mc = metric_constants(t)
    assert is_spacelike(TangentPlane.graph(np.eye(2)), MetricSpec.dxdy())
    assert not is_spacelike(TangentPlane.graph(-np.eye(2)), MetricSpec.dxdy())
    K = mc.b + 0.5
    Q = np.diag([-mc.a - K, -mc.a + K])
    assert is_spacelike(TangentPlane.graph(Q), MetricSpec.family(t))
    # the Gram entries factor as sin t (K^2 - b^2)
    G = induced_gram(TangentPlane.graph(Q), MetricSpec.family(t))
    assert np.allclose(np.diag(G), math.sin(t) * (K**2 - mc.b**2))


def test_basis_rep_rejects_dependent_vectors():
    with pytest.raises(PreconditionError):
        TangentPlane.basis([[1, 0, 0, 0], [2, 0, 0, 0]])


def test_plane_json_roundtrip():
    plane = TangentPlane.graph(ROT)
    back = TangentPlane.from_json(plane.to_json())
    assert back.rep == "graph" and np.array_equal(back.data, plane.data)


# --------------------------------------------------------------------------
# calibration forms
# --------------------------------------------------------------------------


def test_phi_c_examples():
    assert phi_c(TangentPlane.graph(np.diag([2.0, 0.5])), 1.0) == pytest.approx(1.0)
    assert phi_c(TangentPlane.graph(ROT), math.sqrt(2)) == pytest.approx(math.sqrt(2))
    assert phi_c(TangentPlane.graph(np.eye(2)), 1.0) == 1.0


def test_phi_c_basis_rep_matches_graph_rep():
    Q = np.array([[1.5, 0.3], [-0.2, 0.8]])
    B = np.array([[2.0, 0.0], [0.0, 1.0]]) @ np.hstack([np.eye(2), Q])
    # scaling the basis scales the form by the same determinant as the volume
    assert phi_c(TangentPlane.basis(B), 0.7) == pytest.approx(2.0 * phi_c(TangentPlane.graph(Q), 0.7))


def test_phi_c_rejects_nonpositive_level():
    with pytest.raises(DomainError):
        phi_c(TangentPlane.graph(np.eye(2)), 0.0)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.floats(0.2, 5.0))
def test_calibration_inequality(seed, n, c):
    Q = random_positive_sym_part(np.random.default_rng(seed), n)
    plane = TangentPlane.graph(Q)
    value = phi_c(plane, c)
    if value > 0:
        assert value >= plane_volume(plane, MetricSpec.dxdy()) - 1e-10


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.floats(0.2, 5.0))
def test_calibration_equality_on_symmetric_level_set(seed, n, c):
    rng = np.random.default_rng(seed)
    S = random_positive_sym_part(rng, n, antisym_scale=0.0)
    S *= (c * c / np.linalg.det(S)) ** (1.0 / n)
    assert float(graph_phi_c(S, c)) == pytest.approx(float(graph_volumes(S, MetricSpec.dxdy())), abs=1e-10)


def test_alpha_theta_examples():
    assert alpha_theta(TangentPlane.graph(np.zeros((2, 2))), 0.0) == pytest.approx(1.0)
    assert alpha_theta(TangentPlane.graph(np.eye(2)), math.pi / 2) == pytest.approx(1.0)


@pytest.mark.parametrize("n, theta", [(1, 0.3), (1, -1.0), (2, 0.3), (2, 2.0), (3, -1.0), (3, 4.0)])
def test_alpha_theta_on_phase_plane(n, theta):
    plane = TangentPlane.graph(math.tan(theta / n) * np.eye(n))
    assert alpha_theta(plane, theta) == pytest.approx(1.0, abs=1e-12)
    assert beta_theta(plane, theta) == pytest.approx(0.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.floats(-math.pi, math.pi), st.booleans())
def test_hadamard_chain(seed, n, theta, lagrangian):
    rng = np.random.default_rng(seed)
    Q = rng.standard_normal((n, n))
    if lagrangian:
        Q = 0.5 * (Q + Q.T)
    plane = TangentPlane.graph(Q)
    total = alpha_theta(plane, theta) ** 2 + beta_theta(plane, theta) ** 2
    assert total <= 1 + 1e-10
    if lagrangian:
        assert total == pytest.approx(1.0, abs=1e-10)


def test_orthonormal_basis_preserves_orientation():
    plane = TangentPlane.graph([[1.0, 0.2], [0.2, 3.0]])
    E = orthonormal_basis(plane, MetricSpec.dxdy())
    M = MetricSpec.dxdy().matrix(2)
    assert np.allclose(E @ M @ E.T, np.eye(2), atol=1e-12)
    assert np.linalg.det(plane.basis_matrix() @ M @ E.T) > 0


# --------------------------------------------------------------------------
# determinant inequality and its expansion
# --------------------------------------------------------------------------


def test_sym_det_bound_examples():
    r = sym_det_bound([[1, 2], [-2, 1]])
    assert (r.det_q, r.det_sym, r.gap) == pytest.approx((5, 1, 4))
    r = sym_det_bound([[1, 1, 0], [-1, 2, 0], [0, 0, 3]])
    assert (r.det_q, r.det_sym, r.gap) == pytest.approx((9, 6, 3))
    assert sym_det_bound([[2, 0.5], [0.5, 1]]).gap == pytest.approx(0.0, abs=1e-15)


def test_sym_det_bound_requires_positive_symmetric_part():
    with pytest.raises(PreconditionError):
        sym_det_bound([[1, 0], [0, -1]])


def symbolic_pk(Q):
    """Coefficients of det(s S + A) in s, exact in rationals."""
    s = sp.Symbol("s")
    M = sp.Matrix(Q).applyfunc(sp.nsimplify)
    S = (M + M.T) / 2
    A = (M - M.T) / 2
    poly = sp.Poly(sp.expand((s * S + A).det()), s)
    n = M.shape[0]
    return [float(poly.coeff_monomial(s**k)) for k in range(n + 1)]


@pytest.mark.parametrize("Q, expected", [
    ([[1, 2], [-2, 1]], [4, 0, 1]),
    ([[1, 1, 0], [-1, 2, 0], [0, 0, 3]], [0, 3, 0, 6]),
])
def test_pk_examples(Q, expected):
    assert np.allclose(pk_decomposition(Q), expected, atol=1e-12)
    assert np.allclose(symbolic_pk(Q), expected)


def test_pk_symmetric_only_top_term():
    Q = np.array([[2.0, 0.5, 0.1], [0.5, 1.0, 0.2], [0.1, 0.2, 1.5]])
    P = pk_decomposition(Q)
    assert np.allclose(P[:-1], 0, atol=1e-14)
    assert P[-1] == pytest.approx(np.linalg.det(Q))


@pytest.mark.parametrize("seed", range(4))
def test_pk_against_symbolic_expansion(seed):
    rng = np.random.default_rng(seed)
    n = 3 + seed % 2
    Q = np.round(random_positive_sym_part(rng, n), 3)
    assert np.allclose(pk_decomposition(Q), symbolic_pk(Q), atol=1e-10)


def test_pk_rejects_large_dimension():
    with pytest.raises(DomainError):
        pk_decomposition(np.eye(7))


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_pk_invariants(seed, n):
    rng = np.random.default_rng(seed)
    Q = random_positive_sym_part(rng, n)
    P = pk_decomposition(Q)
    assert P.sum() == pytest.approx(np.linalg.det(Q), rel=1e-10)
    assert abs(P[n - 1]) <= 1e-12
    assert np.all(P[: n - 1] >= -1e-12)
    # P_{n-2} = sum_{i<j} a_ij^2 prod_{m != i,j} lam_m in the eigenbasis
    lam, V = np.linalg.eigh(0.5 * (Q + Q.T))
    A = V.T @ (0.5 * (Q - Q.T)) @ V
    closed = sum(A[i, j] ** 2 * np.prod(np.delete(lam, [i, j]))
                 for i in range(n) for j in range(i + 1, n))
    assert P[n - 2] == pytest.approx(closed, rel=1e-9, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_determinant_gap_nonnegative(seed, n):
    Q = random_positive_sym_part(np.random.default_rng(seed), n)
    assert sym_det_bound(Q).gap >= -1e-10


# --------------------------------------------------------------------------
# pseudo-phase
# --------------------------------------------------------------------------


@pytest.mark.parametrize("Q, expected", [
    (np.diag([4.0, 1.0]), (0.5, 2.0)),
    (np.eye(2), (1.0, 1.0)),
    (np.array([[9.0]]), (1 / 3, 3.0)),
])
def test_pseudo_phase_examples(Q, expected):
    s, t = pseudo_phase(TangentPlane.graph(Q))
    assert (s, t) == pytest.approx(expected, rel=1e-12)
    assert s * t == pytest.approx(1.0, abs=1e-10)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_pseudo_phase_on_pseudo_circle(seed, n):
    S = random_positive_sym_part(np.random.default_rng(seed), n, antisym_scale=0.0)
    s, t = pseudo_phase(TangentPlane.graph(S))
    assert t > 0
    assert s * t == pytest.approx(1.0, abs=1e-10)
    assert t == pytest.approx(math.sqrt(np.linalg.det(S)), rel=1e-10)


def test_pseudo_phase_errors():
    with pytest.raises(PreconditionError):
        pseudo_phase(TangentPlane.graph(ROT))
    with pytest.raises(PreconditionError):
        pseudo_phase(TangentPlane.graph(-np.eye(2)))
