"""
Dirichlet problems for the family
=================================

Newton solves of ``det D^2 u = c`` and ``F^t(D^2 u) = c`` on a square, a
cross-check against the linear ``c = 0`` form, and the transport of the
solution through ``phi_t`` into a Monge-Ampere solution.
"""

import math

import numpy as np

from slaglab.equation_family import f_t
from slaglab.graph_geometry import hessian_field
from slaglab.grids import GridDomain
from slaglab.lab.scenarios import expcos_potential
from slaglab.lewy_transforms import reconstruct_hat_potential
from slaglab.metric_planes import metric_constants
from slaglab.solvers import BoundaryData, solve_family, solve_monge_ampere, solve_poisson

# radial Monge-Ampere: u' = sqrt(r^2 + C) solves det D^2 u = 1
C = 0.5
exact = lambda x, y: 0.5 * (np.hypot(x, y) * np.sqrt(x * x + y * y + C) + C * np.arcsinh(np.hypot(x, y) / math.sqrt(C)))
for r in (17, 33, 65):
    dom = GridDomain.box(((0.2, 1.2), (0.1, 1.1)), r)
    res = solve_monge_ampere(dom, 1.0, BoundaryData.from_function(dom, exact))
    err = np.max(np.abs(res.u.values - exact(*dom.mesh())))
    print(f"MA {r:>3}^2: {res.iterations} Newton steps, residual {res.residual:.1e}, error {err:.2e}")

# at c = 0 the family equation is the Poisson equation Laplace u = -2a
t = math.pi / 8
mc = metric_constants(t)
u_fn, _ = expcos_potential(mc.a, 3.0)
dom = GridDomain(((0.1, 1.0), (0.0, 1.0)), (33, 33))
bc = BoundaryData.from_function(dom, u_fn)
diff = np.max(np.abs(solve_family(dom, t, 0.0, bc).u.values - solve_poisson(dom, mc.a, bc).u.values))
print(f"family at c = 0 versus Poisson: {diff:.1e}")

# transport: det D^2 u_hat = (sigma/tau)^2 e^c for the rotated potential
mu = 0.5
c = f_t([mu, mu], t)
for r in (65, 129):
    dom = GridDomain.box(((0.0, 1.0), (0.0, 1.0)), r)
    bc = BoundaryData.from_function(dom, lambda x, y: 0.5 * mu * (x * x + y * y) + 0.1 * np.exp(x) * np.cos(y))
    sol = solve_family(dom, t, c, bc)
    hp = reconstruct_hat_potential(sol.u, t, shrink=0.6)
    det = np.linalg.det(hessian_field(hp.uhat))
    print(f"{r:>3}^2: max |det D^2 u_hat - target| = {np.max(np.abs(det - (mc.sigma / mc.tau) ** 2 * math.exp(c))):.2e}")
