"""
Mayer-Vietoris on the 6-cycle
=============================

Cover C6 by two closed 1-balls, check that the cover is a discrete cover,
then check exactness of the long sequence node by node.
"""

from dhom.constructions import cycle
from dhom.verify import excision_check, is_discrete_cover, mayer_vietoris_check

X = cycle(6)
A = ["5", "0", "1", "2", "3"]
B = ["2", "3", "4", "5", "0"]

for n_max in (2, 3):
    print(is_discrete_cover(X, [A, B], 1, n_max).status)

rep = mayer_vietoris_check(X, A, B, 1, 2, cover_dim=2)
for node in rep.nodes:
    print(f"{node.name:>14}  {node.group:<8} im={node.rank_im} ker={node.rank_ker} "
          f"{'exact' if node.exact else 'NOT exact'}")
print("connecting map H_1(X) -> H_0(A n B):", rep.maps["conn_1"].matrix)

ex = excision_check(X, A, B, 1, 2, cover_dim=2)
for d in ex.degrees:
    print(f"excision in degree {d['n']}: {d['source']} -> {d['target']} iso={d['iso']}")

# A cover that misses an edge is refused with the edge as witness
bad = mayer_vietoris_check(cycle(5), ["0"], ["1", "2", "3", "4"], 1, 1)
print("C5 split:", bad.reason, bad.cover.witness())
