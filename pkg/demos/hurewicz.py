"""
Loops and the Hurewicz map
==========================

A loop on C4 contracts through a homotopy matrix; a loop on C5 does not, and
its image under phi generates H_1. The abelianized fundamental group,
computed from the proximity graph alone, agrees with H_1.
"""

from dhom.constructions import cycle, torus_grid
from dhom.homology import homology
from dhom.homotopy import (RLoop, abelianized_A1_oracle, loop_homotopy_search, phi_class,
                           surjectivity_witness)

C4 = cycle(4)
loop = RLoop((0, 1, 2, 3, 0), 1)
cert = loop_homotopy_search(C4, 1, loop, RLoop((0,), 1), max_len=6)
print("C4 contraction rows:")
for row in cert.to_json(C4)["rows"]:
    print("   ", row)
print("certificate verifies:", cert.verify(C4).ok)

C5 = cycle(5)
H = homology(C5, 1, 1)
print("phi of the C5 loop:", phi_class(RLoop((0, 1, 2, 3, 4, 0), 1), H), "in", H.group)

T = torus_grid(5, 5)
H = homology(T, 1, 1)
print("torus H_1 =", H.group, " oracle =", abelianized_A1_oracle(T, 1).group)
for g, ok in surjectivity_witness(H):
    print("generator realized by a loop of", len(g), "points:", ok)
