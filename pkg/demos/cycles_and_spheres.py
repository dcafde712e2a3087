"""
Homology of small discrete spaces
=================================

Cycles of length 5 and more carry a one-dimensional hole at scale 1;
shorter ones are filled in by degenerate squares.
"""

from dhom.constructions import cycle, sphere_space, torus_grid
from dhom.homology import homology

for k in range(3, 9):
    print(f"C{k}: H_1 at scale 1 =", homology(cycle(k), 1, 1).group)

# Raising the scale collapses the hole once r * 4 reaches the cycle length
for r in (1, 2, 3):
    print(f"C8 at scale {r}: H_1 =", homology(cycle(8), r, 1).group)

# Discrete spheres are iterated suspensions of two points at infinite distance
for n in range(3):
    S = sphere_space(n)
    groups = [str(homology(S, 1, k, "reduced").group) for k in range(n + 1)]
    print(f"sphere_space({n}), {len(S)} points: reduced H_0..H_{n} = {groups}")

print("torus 5x5: H_1 =", homology(torus_grid(5, 5), 1, 1).group)
