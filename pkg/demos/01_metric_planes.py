"""
Metrics, graph planes and the calibration inequality
=====================================================

The family ``g_t = cos t * 2 dxdy + sin t * delta_0`` on R^n x R^n, the
induced Gram matrix of a graph plane, and the calibration form ``Phi_c``
that bounds the volume of every space-like plane.
"""

import math

import numpy as np

from slaglab.metric_planes import (
    MetricSpec,
    TangentPlane,
    graph_grams,
    graph_phi_c,
    graph_volumes,
    is_spacelike,
    metric_constants,
    pk_decomposition,
    sym_det_bound,
)

rng = np.random.default_rng(0)

# constants of the family at t = pi/6: the pseudo regime
mc = metric_constants(math.pi / 6)
print(f"t = pi/6: a = {mc.a:.6f}, b = {mc.b:.6f}, sigma = {mc.sigma:.6f}, tau = {mc.tau:.6f}")
print(f"sigma/tau = {mc.sigma / mc.tau:.6f} equals a + b = {mc.a + mc.b:.6f}")

# a symmetric graph matrix Q spans a Lagrangian plane; its dxdy Gram is Q
Q = np.array([[2.0, 0.3], [0.3, 0.5]])
print("dxdy Gram of a symmetric Q:\n", graph_grams(Q, MetricSpec.dxdy()))
print("space-like:", is_spacelike(TangentPlane.graph(Q), MetricSpec.dxdy()))

# Phi_c bounds the volume; equality needs symmetric Q with det Q = c^2
c = math.sqrt(np.linalg.det(Q))
print(f"Phi_c - Vol at the calibrated level: {graph_phi_c(Q, c) - graph_volumes(Q, MetricSpec.dxdy()):.2e}")
A = np.array([[0.0, 0.4], [-0.4, 0.0]])
gap = graph_phi_c(Q + A, c) - graph_volumes(Q + A, MetricSpec.dxdy())
print(f"adding an antisymmetric part opens the gap: {gap:.4f}")

# the determinant inequality det Q >= det sym(Q) behind that gap
S = np.eye(4) + 0.2 * rng.standard_normal((4, 4))
S = S @ S.T
K = rng.standard_normal((4, 4))
K = K - K.T
det_q, det_s, g = sym_det_bound(S + K)
print(f"det Q = {det_q:.4f} >= det sym Q = {det_s:.4f}")
print("subset expansion indexed by the number of symmetric eigenvalue factors:", np.round(pk_decomposition(S + K), 4))
