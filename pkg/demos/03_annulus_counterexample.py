"""
A disconnected competitor with larger volume
============================================

Over the annulus ``1 <= |x|^2 <= 1 + eps`` the gradient graph of
``|x|^2/2`` has volume close to ``pi eps``, while a disconnected surface
with the same boundary has volume close to ``2 pi``.  Volume maximality
needs connected competitors.
"""

import math

from slaglab.lab.scenarios import run_counterexample_annulus

for resolution in (64, 128, 256):
    rep = run_counterexample_annulus(eps=0.01, resolution=resolution)
    q = rep.quantities
    print(f"{resolution:>4}^2: Vol(Gamma) = {q['vol_gamma']:.6f} (pi eps = {math.pi * 0.01:.6f}), "
          f"Vol(Sigma) = {q['vol_sigma']:.4f}")
print(rep.summary())
