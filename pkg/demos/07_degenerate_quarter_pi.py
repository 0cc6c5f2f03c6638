"""
The degenerate rotation at t = pi/4
===================================

``phi_t`` is not defined at pi/4, but ``P(x, y) = (x + y)/2`` pulls the
Euclidean metric back to a constant multiple of ``g_{pi/4}``.  The volume of
a graph then depends only on its boundary.
"""

import numpy as np

from slaglab.graph_geometry import smooth_bump
from slaglab.grids import GridDomain, VectorFieldGrid
from slaglab.lewy_transforms import degenerate_projection_volume

dom = GridDomain.box(((0.0, 1.0), (0.0, 1.0)), 65)
x = dom.points()
base = x + 0.1 * x**2
bump = smooth_bump(dom.mesh(), dom.center, np.array([0.25, 0.25]))
for amplitude in (0.0, 0.1, 0.2):
    F = VectorFieldGrid(dom, base + amplitude * np.stack([bump, -0.5 * bump], -1))
    vol = degenerate_projection_volume(F)
    print(f"bump {amplitude:.1f}: direct {vol.direct:.12f}, boundary {vol.boundary:.12f}, kappa {vol.kappa:.6f}")
