"""
An explicit solution and the projection p
=========================================

``u = -(a/2)|x|^2 + k e^{x_1} cos x_2`` solves the ``c = 0`` equation for
``0 < t < pi/4``.  Its Hessian eigenvalues are ``-a -+ k e^{x_1}``; for large
``k`` the map ``p = sigma x + tau grad u`` is no longer monotone.  On the
strip of height 2 pi it stays injective; a slightly taller strip produces a
collision.
"""

import math

from slaglab.grids import GridDomain, ScalarFieldGrid
from slaglab.lab.scenarios import expcos_potential, run_expcos_example
from slaglab.lewy_transforms import injectivity_check, projection_p
from slaglab.metric_planes import metric_constants

t = math.atan(0.5)
rep = run_expcos_example(t=t, k=50.0, refinements=2)
q = rep.quantities
print("laplacian error by level:", ["%.2e" % e for e in q["laplacian_error"]])
print("observed orders:", ["%.3f" % o for o in q["laplacian_order"]])
print("min sym eigenvalue of Dp:", f"{q['dp_min_sym_eigenvalue']:.3f}")
print("2 pi strip:", q["injectivity"]["certificate"])

u_fn, _ = expcos_potential(metric_constants(t).a, 50.0)
for height in (2.0, 2.05, 2.2):
    dom = GridDomain(((0.1, 3.0), (0.0, height * math.pi)), (65, 129))
    v = injectivity_check(projection_p(ScalarFieldGrid.from_function(dom, u_fn), t).p)
    where = f" x1 = {v.x1}, x2 = {v.x2}" if not v.injective else ""
    print(f"height {height:.2f} pi: injective = {v.injective} ({v.certificate}){where}")
