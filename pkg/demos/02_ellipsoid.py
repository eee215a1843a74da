"""An l-type ellipsoid for a skewed polytope, and how well it covers the body.

The body is rounded so that B2 <= K <= n B2, the convex program picks a
determinant-one matrix A, and E = (sqrt(n) / f~(A)) A B2.  The volume-ratio
diagnostics then bound the covering numbers N(K, E) and N(E, K).
"""

import numpy as np

from ellsvp import (
    GridParams,
    SolverConfig,
    SymPolytope,
    build_ellipsoid,
    enumerate_grid,
    half_volume_radius,
    normalize,
    solve_ell_program,
    volume_ratio_diag,
)

rows = np.array([[1.0, 0.0, 0.0], [0.0, 4.0, 0.0], [1.0, 1.0, 3.0], [0.5, -1.0, 0.2]])
body = SymPolytope(rows)
rounded, T = normalize(body)
print("sandwich ratio before / after rounding:",
      f"{body.sandwich_R / body.sandwich_r:.3f} / {rounded.sandwich_R / rounded.sandwich_r:.3f}")

grid = enumerate_grid(GridParams.for_dim(3))
res = solve_ell_program(rounded, grid, SolverConfig(epsilon=0.1))
print(f"status {res.status.value}, {res.iterations} iterations, certified gap {res.certified_gap:.4f}")
print("A =\n", np.array2string(res.A_opt, precision=4))

E = build_ellipsoid(res.A_opt, res.value, 3)
rep = volume_ratio_diag(rounded, E)
print(f"vol(E) = {rep.vol_E:.3f}, vol(K) ~ {rep.vol_K_est:.3f}, vol(K n E) ~ {rep.vol_intersection_est:.3f}")
print(f"N(K, E) <= {rep.bound_N_K_E:.1f}   N(E, K) <= {rep.bound_N_E_K:.1f}")
hv = half_volume_radius(rounded, E.unit())
print(f"half-volume radius {hv.radius:.4f} vs ellipsoid radius {E.radius:.4f}")
