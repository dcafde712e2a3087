"""
A direct system over scales
===========================

Three circles of radius 1, 4 and 9 through a common origin. As the scale
grows each circle first closes up and then fills in, so H_1 rises to rank 3
and falls back to 0 by the time the scale reaches the diameter.
Each rung is computed on the dominated-vertex core of its proximity graph.
"""

from dhom.constructions import coarse_hawaiian
from dhom.scan import scale_scan

X = coarse_hawaiian(3)
rep = scale_scan(X, 1, core=True)
prev = None
for s, g, core in zip(rep.scales, rep.groups[1], rep.core_sizes):
    if str(g) != prev:
        print(f"scale {float(s):10.6f}  core {core:3d} points  H_1 = {g}")
        prev = str(g)
print("eventual image rank:", rep.eventual_rank)
for note in rep.notes:
    print("note:", note)
