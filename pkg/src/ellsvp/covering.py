"""Volume-ratio covering diagnostics and explicit translate coverings.

Volumes other than ``vol(E)`` are estimates: a midpoint grid (n <= 4) or an
unscrambled Sobol sequence.  Both are deterministic.  The reported covering
numbers are the upper bounds ``N(A, B) <= 3^n vol(A) / vol(A n B)``.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import qmc

from .bodies import ConvexBody
from .errors import CapExceededError, DimensionMismatchError, ResolutionError
from .solver import Ellipsoid

DEFAULT_TRANSLATE_CAP = 10_000_000
_GRID_MAX_DIM = 4
_BATCH = 1 << 18


class VolumeMethod(str, enum.Enum):
    GRID_2D_3D = "GRID_2D_3D"
    QUASI_MC = "QUASI_MC"


_DEFAULT_RESOLUTION = {
    VolumeMethod.GRID_2D_3D: {1: 4096, 2: 1024, 3: 128, 4: 40},
    VolumeMethod.QUASI_MC: 1 << 18,
}


@dataclass(frozen=True)
class CoveringReport:
    vol_E: float
    vol_K_est: float
    vol_intersection_est: float
    bound_N_K_E: float
    bound_N_E_K: float
    method: VolumeMethod
    points_used: int

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["method"] = self.method.value
        return d


def _resolve(method, resolution, n):
    method = VolumeMethod(method)
    if method is VolumeMethod.GRID_2D_3D and n > _GRID_MAX_DIM:
        raise DimensionMismatchError(f"grid volume method supports n <= {_GRID_MAX_DIM}, got {n}")
    if resolution is None:
        table = _DEFAULT_RESOLUTION[method]
        resolution = table[n] if isinstance(table, dict) else table
    return method, int(resolution)


def _unit_cube_points(method: VolumeMethod, resolution: int, n: int):
    """Yield batches of points in ``[0, 1)^n`` and the total count."""
    if method is VolumeMethod.GRID_2D_3D:
        ticks = (np.arange(resolution) + 0.5) / resolution
        # iterate over the leading coordinate to bound memory
        inner = np.array(list(itertools.product(range(resolution), repeat=n - 1)), dtype=float)
        inner = ticks[inner.astype(int)] if n > 1 else np.zeros((1, 0))
        per = max(1, _BATCH // max(len(inner), 1))
        for start in range(0, resolution, per):
            lead = ticks[start:start + per]
            pts = np.hstack([np.repeat(lead, len(inner))[:, None], np.tile(inner, (len(lead), 1))])
            yield pts
        return
    sob = qmc.Sobol(d=n, scramble=False)
    done = 0
    with warnings.catch_warnings():
        # balance warnings for non power-of-two counts are irrelevant here
        warnings.simplefilter("ignore", UserWarning)
        while done < resolution:
            m = min(_BATCH, resolution - done)
            yield sob.random(m)
            done += m


def _box_counts(body: ConvexBody, E: Ellipsoid, method, resolution):
    n = body.dim
    half = max(body.sandwich_R, E.radius * float(np.linalg.norm(E.shape, 2)))
    count = in_K = in_both = 0
    for U in _unit_cube_points(method, resolution, n):
        X = (2.0 * U - 1.0) * half
        k = np.asarray(body.contains(X))
        e = E.contains(X)
        count += len(X)
        in_K += int(k.sum())
        in_both += int((k & e).sum())
    box_vol = (2.0 * half) ** n
    return count, box_vol * in_K / count, box_vol * in_both / count


def volume_ratio_diag(body: ConvexBody, E: Ellipsoid, method=VolumeMethod.QUASI_MC,
                      resolution: int | None = None) -> CoveringReport:
    if body.dim != E.dim:
        raise DimensionMismatchError("body and ellipsoid dimensions differ")
    n = body.dim
    method, resolution = _resolve(method, resolution, n)
    used, vol_K, vol_both = _box_counts(body, E, method, resolution)
    if vol_both <= 0 or vol_K <= 0:
        raise ResolutionError("no sample point fell in K n E; raise the resolution")
    vol_E = E.volume
    return CoveringReport(
        vol_E=vol_E,
        vol_K_est=vol_K,
        vol_intersection_est=vol_both,
        bound_N_K_E=3.0 ** n * vol_K / vol_both,
        bound_N_E_K=3.0 ** n * vol_E / vol_both,
        method=method,
        points_used=used,
    )


def _unit_ball_samples(method: VolumeMethod, resolution: int, n: int) -> np.ndarray:
    pts = [2.0 * U - 1.0 for U in _unit_cube_points(method, resolution, n)]
    U = np.vstack(pts)
    return U[(U * U).sum(axis=1) <= 1.0]


class HalfVolume(NamedTuple):
    radius: float
    fraction: float
    saturated: bool


def half_volume_radius(body: ConvexBody, E_direction: Ellipsoid, method=VolumeMethod.QUASI_MC,
                       resolution: int | None = None, rtol: float = 1e-3,
                       max_doublings: int = 60) -> HalfVolume:
    """Largest ``r`` with ``vol(r E' n K) >= vol(r E') / 2`` for the unit-radius ``E'``.

    The fraction is estimated on a fixed sample of the unit ball pushed through
    ``r * shape``; since K is star-shaped, each sample's membership is monotone
    in ``r`` and so is the estimated fraction.
    """
    if body.dim != E_direction.dim:
        raise DimensionMismatchError("body and ellipsoid dimensions differ")
    n = body.dim
    method, resolution = _resolve(method, resolution, n)
    U = _unit_ball_samples(method, resolution, n)
    if len(U) < 64:
        raise ResolutionError(f"only {len(U)} samples in the unit ball; raise the resolution")
    Y = U @ E_direction.shape.T

    def fraction(r):
        return float(np.count_nonzero(np.asarray(body.contains(r * Y)))) / len(Y)

    svals = np.linalg.svd(E_direction.shape, compute_uv=False)
    lo = body.sandwich_r / svals[0]
    hi = body.sandwich_R / svals[-1]
    f_hi = fraction(hi)
    doublings = 0
    while f_hi >= 0.5:
        if doublings == max_doublings:
            return HalfVolume(hi, f_hi, True)
        lo, hi = hi, 2.0 * hi
        f_hi = fraction(hi)
        doublings += 1
    if fraction(lo) < 0.5:
        raise ResolutionError("fraction already below 1/2 at the inner sandwich radius")
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        if fraction(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return HalfVolume(lo, fraction(lo), False)


def _principal_frame(shape: np.ndarray):
    d = np.diag(shape)
    if np.array_equal(shape, np.diag(d)) and np.all(d > 0):
        return d.copy(), np.eye(len(d))
    return np.linalg.eigh(0.5 * (shape + shape.T))


def covering_translates(E: Ellipsoid, outer_radius: float,
                        cap: int = DEFAULT_TRANSLATE_CAP) -> np.ndarray:
    """Centres ``c`` such that ``{c + E}`` covers ``outer_radius * B2``.

    In the principal frame of ``E`` the centres form the grid with spacing
    ``lambda_i rho / sqrt(n)``; each centre's grid cell lies inside its
    ellipsoid translate.  Every centre whose cell meets the ball is returned,
    sorted lexicographically on the integer grid index.
    """
    n = E.dim
    lam, Q = _principal_frame(E.shape)
    if np.any(lam <= 0):
        raise ValueError("ellipsoid must be nondegenerate")
    h = E.radius / math.sqrt(n) * lam
    kmax = np.floor(outer_radius / h + 0.5).astype(int)
    est = float(np.prod(2 * kmax + 1.0))
    if est > cap:
        raise CapExceededError(f"translate box holds {est:.3g} > cap {cap} candidates", estimate=est)
    axes = [np.arange(-k, k + 1) for k in kmax]
    Z = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1).T
    gap = np.maximum(np.abs(Z) - 0.5, 0.0) * h
    Z = Z[(gap * gap).sum(axis=1) <= outer_radius * outer_radius]
    return (Z * h) @ Q.T
