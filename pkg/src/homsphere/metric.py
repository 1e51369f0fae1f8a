"""Left-invariant metrics on S^3, diagonal in the standard frame.

The standard left-invariant frame is ``X_k(p) = p . e_k`` with
``e_1 = (i, 0)``, ``e_2 = (0, 1)``, ``e_3 = (0, i)``. ``X_1`` is the Hopf
field ``(iz, iw)``. A :class:`HomogeneousMetric` with eigenvalues
``(l1, l2, l3)`` declares ``g(X_j, X_k) = l_k delta_jk``; the Berger metric
``g_rho`` is ``(rho^2, 1, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group import TangentVector, qinv, qmul_raw

ROUND_VOLUME = 2.0 * math.pi ** 2

# e_1, e_2, e_3 in ambient coordinates
FRAME_AT_IDENTITY = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])


@dataclass(frozen=True)
class HomogeneousMetric:
    lambdas: tuple

    def __post_init__(self):
        lams = tuple(float(x) for x in self.lambdas)
        if len(lams) != 3:
            raise ValueError("a homogeneous metric needs exactly three eigenvalues")
        if not all(np.isfinite(x) and x > 0.0 for x in lams):
            raise ValueError("metric eigenvalues must be positive and finite, got %r" % (lams,))
        object.__setattr__(self, "lambdas", lams)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.lambdas)

    def is_berger(self) -> bool:
        _, l2, l3 = self.lambdas
        return l2 == 1.0 and l3 == 1.0

    @property
    def rho(self) -> float:
        """Hopf-fibre length parameter; only defined for Berger metrics."""
        if not self.is_berger():
            raise ValueError("not a Berger metric: %r" % (self.lambdas,))
        return math.sqrt(self.lambdas[0])


@dataclass(frozen=True)
class RicciSpectrum:
    r1: float
    r2: float
    r3: float

    @property
    def values(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    @property
    def scalar(self) -> float:
        return self.r1 + self.r2 + self.r3

    @property
    def positive(self) -> bool:
        return min(self.r1, self.r2, self.r3) > 0.0


def berger(rho: float) -> HomogeneousMetric:
    rho = float(rho)
    if not (np.isfinite(rho) and rho > 0.0):
        raise ValueError("Berger parameter must be positive, got %r" % rho)
    return HomogeneousMetric((rho * rho, 1.0, 1.0))


def round_metric() -> HomogeneousMetric:
    return HomogeneousMetric((1.0, 1.0, 1.0))


def frame_coefficients(base, v):
    """Coefficients of ambient tangent vectors ``v`` at ``base`` in the X-frame.

    Vectorized over leading axes; pulls back to the identity by left
    translation with ``base^{-1}``.
    """
    return qmul_raw(qinv(base), v)[..., 1:]


def frame_vectors(base):
    """The frame ``X_1, X_2, X_3`` at ``base``, shape ``(..., 3, 4)``."""
    base = np.asarray(base, dtype=float)
    return qmul_raw(base[..., None, :], FRAME_AT_IDENTITY)


def metric_form(lambdas, base, v1, v2):
    """Array version of :func:`evaluate_metric`."""
    a = frame_coefficients(base, v1)
    b = frame_coefficients(base, v2)
    return np.sum(np.asarray(lambdas, dtype=float) * a * b, axis=-1)


def evaluate_metric(m: HomogeneousMetric, t1: TangentVector, t2: TangentVector) -> float:
    if not t1.base.isclose(t2.base, atol=1e-12):
        raise ValueError("tangent vectors live at different base points")
    return float(metric_form(m.array, t1.base.coords, t1.vector, t2.vector))


def volume(m: HomogeneousMetric) -> float:
    l1, l2, l3 = m.lambdas
    return math.sqrt(l1 * l2 * l3) * ROUND_VOLUME


def structure_constants(m: HomogeneousMetric) -> tuple:
    """``c_k = 2 l_k / sqrt(l1 l2 l3)``, with ``[E_2, E_3] = c_1 E_1`` cyclically.

    The orientation is chosen so that all three are positive.
    """
    l1, l2, l3 = m.lambdas
    root = math.sqrt(l1 * l2 * l3)
    return (2.0 * l1 / root, 2.0 * l2 / root, 2.0 * l3 / root)


def ricci_eigenvalues(m: HomogeneousMetric) -> RicciSpectrum:
    """Ricci curvatures of the orthonormal Milnor frame ``E_k = X_k / sqrt(l_k)``.

    ``Ric(E_k) = 2 mu_i mu_j`` for ``(i, j, k)`` cyclic, where
    ``mu_k = (c1 + c2 + c3) / 2 - c_k``. The frame diagonalizes the Ricci
    tensor, so these are its eigenvalues.
    """
    c = structure_constants(m)
    half = 0.5 * sum(c)
    mu = [half - ck for ck in c]
    return RicciSpectrum(2.0 * mu[1] * mu[2], 2.0 * mu[2] * mu[0], 2.0 * mu[0] * mu[1])


def scalar_curvature(m: HomogeneousMetric) -> float:
    return ricci_eigenvalues(m).scalar
