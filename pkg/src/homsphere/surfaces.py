"""The horizontal two-sphere and its left translates.

The reference sphere is ``{(z, w) in S^3 : w real}``, charted from the
north pole ``(0, 0, 1, 0)`` by

    (s, theta) -> (sin(s) e^{i theta}, cos(s)),   0 < s < pi.

A translate ``L_a`` of it uses the chart ``a . chart(s, theta)``. Left
translations are isometries of every left-invariant metric, so a translate
has the same area element as the reference sphere at the same ``(s, theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .fields import ConformalFactor, ScalarField
from .group import IDENTITY, UnitQuaternion, multiply, qmul, qmul_raw
from .metric import HomogeneousMetric, metric_form
from .quadrature import QuadratureError, SurfaceGrid

DEFAULT_GRID = SurfaceGrid(64, 64)


def _chart0(s, theta):
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sin_s = np.sin(s)
    return np.stack(np.broadcast_arrays(sin_s * np.cos(theta), sin_s * np.sin(theta),
                                        np.cos(s), np.zeros_like(s)), axis=-1)


def _chart0_derivatives(s, theta):
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sin_s, cos_s = np.sin(s), np.cos(s)
    zero = np.zeros(np.broadcast(s, theta).shape)
    d_s = np.stack(np.broadcast_arrays(cos_s * np.cos(theta), cos_s * np.sin(theta),
                                       -sin_s, zero), axis=-1)
    d_theta = np.stack(np.broadcast_arrays(-sin_s * np.sin(theta), sin_s * np.cos(theta),
                                           zero, zero), axis=-1)
    return d_s, d_theta


@dataclass(frozen=True)
class ParametrizedSphere:
    """``L_translation`` applied to the horizontal sphere."""

    translation: UnitQuaternion = field(default=IDENTITY)

    def chart(self, s, theta):
        return qmul(self.translation.coords, _chart0(s, theta))

    def chart_derivatives(self, s, theta):
        """Analytic ``(d/ds, d/dtheta)`` of the chart as ambient vectors."""
        a = self.translation.coords
        d_s, d_theta = _chart0_derivatives(s, theta)
        return qmul_raw(a, d_s), qmul_raw(a, d_theta)

    def points(self, grid: SurfaceGrid = DEFAULT_GRID) -> np.ndarray:
        S, T, _ = grid.mesh
        return self.chart(S, T)


def sigma0() -> ParametrizedSphere:
    return ParametrizedSphere(IDENTITY)


def translate_sphere(a: UnitQuaternion, sphere: ParametrizedSphere) -> ParametrizedSphere:
    return ParametrizedSphere(multiply(a, sphere.translation))


def area_element(sphere: ParametrizedSphere, m: HomogeneousMetric, s, theta):
    """``sqrt(det)`` of the pulled-back metric at chart coordinates (vectorized)."""
    p = sphere.chart(s, theta)
    d_s, d_theta = sphere.chart_derivatives(s, theta)
    lam = m.array
    gss = metric_form(lam, p, d_s, d_s)
    gst = metric_form(lam, p, d_s, d_theta)
    gtt = metric_form(lam, p, d_theta, d_theta)
    return np.sqrt(np.maximum(gss * gtt - gst * gst, 0.0))


def area_weights(sphere: ParametrizedSphere, m: HomogeneousMetric,
                 grid: SurfaceGrid = DEFAULT_GRID) -> np.ndarray:
    """Quadrature weights times area element, shape ``(n_s, n_theta)``."""
    S, T, W = grid.mesh
    return W * area_element(sphere, m, S, T)


def _area_on(sphere, m, grid, conformal):
    weights = area_weights(sphere, m, grid)
    if conformal is None:
        return math.fsum(weights.ravel())
    phi = conformal(sphere.points(grid))
    return math.fsum((weights * phi).ravel())


def area(sphere: ParametrizedSphere, m: HomogeneousMetric, grid: SurfaceGrid = DEFAULT_GRID,
         conformal: ConformalFactor | None = None, tol: float | None = None) -> float:
    """Area of ``sphere`` under ``m``, or under ``conformal * m`` if given.

    With ``tol`` set, the result is compared with a doubled grid and
    :class:`QuadratureError` is raised if they differ by more than ``tol``
    relative.
    """
    value = _area_on(sphere, m, grid, conformal)
    if tol is not None:
        fine = _area_on(sphere, m, grid.refined(), conformal)
        if abs(fine - value) > tol * abs(fine):
            raise QuadratureError("area changed by %.3g (relative) under grid doubling"
                                  % (abs(fine - value) / abs(fine)))
    return value


def surface_average(sphere: ParametrizedSphere, m: HomogeneousMetric,
                    grid: SurfaceGrid, f: ScalarField) -> float:
    weights = area_weights(sphere, m, grid)
    vals = f(sphere.points(grid))
    return math.fsum((weights * vals).ravel()) / math.fsum(weights.ravel())


def translated_averages(translations: np.ndarray, m: HomogeneousMetric,
                        grid: SurfaceGrid, f: ScalarField,
                        reference: ParametrizedSphere | None = None) -> np.ndarray:
    """Surface averages of ``f`` over ``L_a(reference)`` for a batch of ``a``.

    ``translations`` has shape ``(n, 4)``. Uses that every translate shares
    the reference sphere's area weights.
    """
    reference = reference or sigma0()
    weights = area_weights(reference, m, grid).ravel()
    weights = weights / weights.sum()
    base = reference.points(grid).reshape(-1, 4)
    a = np.asarray(translations, dtype=float)
    return f(qmul(a[:, None, :], base[None, :, :])) @ weights


def sphere_set_distance(s1: ParametrizedSphere, s2: ParametrizedSphere,
                        grid: SurfaceGrid = DEFAULT_GRID) -> float:
    """Symmetric sample Hausdorff distance (ambient chord) between two spheres."""
    p1 = s1.points(grid).reshape(-1, 4)
    p2 = s2.points(grid).reshape(-1, 4)
    d12 = cKDTree(p2).query(p1)[0].max()
    d21 = cKDTree(p1).query(p2)[0].max()
    return float(max(d12, d21))


def covering_radius(grid: SurfaceGrid = DEFAULT_GRID, densify: int = 4) -> float:
    """Largest distance from a point of the sphere to the nearest grid sample.

    Estimated by probing a grid ``densify`` times finer in each direction
    plus both poles, then padded by 25% for the unprobed points. This is the
    mesh size below which two sample sets of one sphere cannot be told apart.
    """
    sphere = sigma0()
    fine = SurfaceGrid(grid.n_s * densify, grid.n_theta * densify)
    probes = np.concatenate([sphere.points(fine).reshape(-1, 4),
                             [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, -1.0, 0.0]]])
    dist = cKDTree(sphere.points(grid).reshape(-1, 4)).query(probes)[0]
    return 1.25 * float(dist.max())
