"""Shortest lattice vectors in norms other than l2.

The same lattice has different shortest vectors under l1, l2, l_inf and a
polytope norm.  Each search covers sK by translates of an ellipsoid and
enumerates inside every translate; the single-ball path is shown alongside.
"""

import math

import numpy as np

from ellsvp import LatticeBasis, LpBall, SvpConfig, SymPolytope, shortest_vector_l2, svp

B = LatticeBasis.from_columns([[7, 2, 1], [3, -5, 2], [1, 1, 6]])
print("Euclidean shortest vector:", shortest_vector_l2(B).tolist())

bodies = {
    "l1": LpBall(3, 1.0),
    "l2": LpBall(3, 2.0),
    "linf": LpBall(3, math.inf),
    "polytope": SymPolytope(np.array([[1.0, 0.2, 0.0], [0.0, 1.0, -0.5], [0.3, 0.0, 1.0]])),
}
for name, body in bodies.items():
    res = svp(B, body)
    alt = svp(B, body, SvpConfig(fallback_ball=True))
    assert alt.norm_value == res.norm_value
    print(f"{name:8s} v={res.vector.tolist()}  ||v||={res.norm_value:.4f}  "
          f"scale {res.scale_used:.3f} after {res.rounds} round(s), "
          f"{res.translates_enumerated} translates, {res.points_examined} points")
