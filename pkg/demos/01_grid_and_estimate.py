"""The discretised Gaussian and the l-estimate it induces.

A standard Gaussian in R^n is replaced by a finite weighted grid.  Averaging
a norm over that grid gives a deterministic stand-in for E||X||_K, and the
same average of ||A X||_K is a convex function of the matrix A.
"""

import math

import numpy as np

from ellsvp import GridMode, GridParams, LpBall, enumerate_grid, f_tilde, l_tilde, mc_f_estimate

for n in range(1, 7):
    sizes = [enumerate_grid(GridParams.for_dim(n, m)).size for m in GridMode]
    print(f"n={n}  s={GridParams.for_dim(n).s:.5f}  |D| theorem/ball3 = {sizes[0]}/{sizes[1]}")

n = 3
grid = enumerate_grid(GridParams.for_dim(n))
print(f"\ngrid mass for n={n}: {grid.total_mass():.6f}")

for name, body in [("l1", LpBall(n, 1.0)), ("l2", LpBall(n, 2.0)), ("linf", LpBall(n, math.inf))]:
    mc = mc_f_estimate(body, np.eye(n), 400_000, seed=1)
    print(f"{name:5s} grid estimate {l_tilde(body, grid):.4f}   Monte Carlo {mc.mean:.4f} +- {mc.std_error:.4f}")

# stretching the Euclidean ball along one axis costs more than it saves
ball = LpBall(n, 2.0)
for t in (1.0, 1.5, 2.0):
    A = np.diag([t, 1.0, 1.0 / t])
    print(f"f~(diag({t}, 1, {1 / t:.3f})) = {f_tilde(ball, grid, A):.4f}")
