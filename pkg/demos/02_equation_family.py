"""
One equation per angle: the operator family and the Lewy rotation
=================================================================

``F^t(D^2 u) = c`` takes five forms as ``t`` sweeps from 0 to pi/2.  The
rotation ``phi_t`` maps Hessian eigenvalues by a Moebius map and carries
one form into another.
"""

import math

import numpy as np

from slaglab.equation_family import (
    FamilyPoint,
    classify_regime,
    ct_identity_residual,
    eigenvalue_transform,
    equation_form,
    f_t,
    f_t_gradient,
    limit_quarter_pi_check,
)
from slaglab.metric_planes import metric_constants

lam = np.array([0.5, 3.0])
for t in (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2):
    form = equation_form(t)
    print(f"t = {t:.4f} {form:>13}: F = {f_t(lam, FamilyPoint(t)):+.6f}, "
          f"grad = {np.round(f_t_gradient(lam, t), 6)}, regime = {classify_regime(lam, t)}")

# below pi/4 the transformed eigenvalues multiply to (sigma/tau)^n e^c
t = math.pi / 8
mc = metric_constants(t)
hat = eigenvalue_transform(lam, mc)
print(f"prod lam_hat = {np.prod(hat):.10f}, (sigma/tau)^2 e^F = {(mc.sigma / mc.tau) ** 2 * math.exp(f_t(lam, t)):.10f}")

# above pi/4 the arctan identity holds with the constant C_t
mc = metric_constants(1.2)
print(f"arctan identity residual at t = 1.2: {np.max(np.abs(ct_identity_residual(np.array([0.3, 4.0]), mc))):.2e}")

# the log-ratio form, rescaled, tends to the resolvent form at pi/4
out = limit_quarter_pi_check(np.array([0.5, 3.0]), math.pi / 4 - np.geomspace(1e-2, 1e-4, 5))
print(f"limit at pi/4: converged = {out.converged}, observed order = {out.observed_order:.3f}")
