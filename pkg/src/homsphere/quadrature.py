"""Quadrature rules: adaptive Gauss-Kronrod in 1D, product rules on spheres."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class QuadratureError(RuntimeError):
    """Raised when a rule cannot reach its requested tolerance.

    ``best`` holds the best available estimate (a :class:`QuadResult`) when
    there is one.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at the odd positions of the Kronrod set
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def gauss_kronrod(f, a: float, b: float):
    """One G7/K15 panel on ``[a, b]``: ``(kronrod_value, |kronrod - gauss|)``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * KRONROD_NODES), dtype=float)
    k = half * float(KRONROD_WEIGHTS @ fx)
    g = half * float(GAUSS_WEIGHTS @ fx)
    return k, abs(k - g)


def composite_gauss_kronrod(f, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    return math.fsum(gauss_kronrod(f, lo, hi)[0] for lo, hi in zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int


def adaptive_quad(f, a: float, b: float, tol: float = 1e-12, breakpoints=(),
                  max_panels: int = 4000) -> QuadResult:
    """Globally adaptive G7/K15 quadrature to absolute tolerance ``tol``.

    ``f`` must accept a numpy array. The panel with the largest error
    estimate is bisected until the summed estimate drops below ``tol``.
    Raises :class:`QuadratureError` if ``max_panels`` is reached first or a
    panel becomes too narrow to split.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    edges = [a, *sorted(p for p in breakpoints if a < p < b), b]
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = gauss_kronrod(f, lo, hi)
        heap.append((-err, lo, hi, val))
    heapq.heapify(heap)
    while True:
        total_err = math.fsum(-e for e, *_ in heap)
        if total_err <= tol:
            break
        if len(heap) >= max_panels:
            raise QuadratureError(
                "adaptive quadrature stalled at error %.3g > tol %.3g" % (total_err, tol),
                _summarize(heap, total_err))
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_err, lo, hi, val))
            raise QuadratureError("panel at %.17g cannot be split further" % lo,
                                  _summarize(heap, total_err))
        for x0, x1 in ((lo, mid), (mid, hi)):
            val, err = gauss_kronrod(f, x0, x1)
            heapq.heappush(heap, (-err, x0, x1, val))
    return _summarize(heap, total_err)


def _summarize(heap, total_err):
    return QuadResult(math.fsum(v for *_, v in heap), total_err, len(heap))


def gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


@dataclass(frozen=True)
class SurfaceGrid:
    """Product rule on the polar chart ``(s, theta)`` in ``(0, pi) x [0, 2 pi)``.

    In ``s``: Gauss-Legendre on the two panels ``(0, pi/2)`` and
    ``(pi/2, pi)`` with ``n_s / 2`` nodes each, which clusters nodes near
    the equator where area elements of strongly squashed Berger metrics
    vary fastest. In ``theta``: the periodic trapezoid rule.
    """

    n_s: int = 64
    n_theta: int = 64

    def __post_init__(self):
        if self.n_s < 8 or self.n_theta < 8:
            raise ValueError("grid needs n_s >= 8 and n_theta >= 8")
        if self.n_s % 2:
            raise ValueError("n_s must be even (two Gauss-Legendre panels)")

    @cached_property
    def s_rule(self):
        s1, w1 = gauss_legendre(self.n_s // 2, 0.0, 0.5 * math.pi)
        s2, w2 = gauss_legendre(self.n_s // 2, 0.5 * math.pi, math.pi)
        return np.concatenate([s1, s2]), np.concatenate([w1, w2])

    @cached_property
    def theta_rule(self):
        theta = 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta
        return theta, np.full(self.n_theta, 2.0 * math.pi / self.n_theta)

    @cached_property
    def mesh(self):
        """``(s, theta, weight)`` arrays of shape ``(n_s, n_theta)``."""
        s, ws = self.s_rule
        t, wt = self.theta_rule
        S, T = np.meshgrid(s, t, indexing="ij")
        return S, T, np.outer(ws, wt)

    def refined(self) -> "SurfaceGrid":
        return SurfaceGrid(2 * self.n_s, 2 * self.n_theta)


@dataclass(frozen=True)
class VolumeGrid:
    """Product rule on S^3 in Hopf coordinates.

    ``z = cos(eta) e^{i a}``, ``w = sin(eta) e^{i b}`` with round volume
    element ``sin(eta) cos(eta) d eta da db``. Gauss-Legendre in ``eta``,
    trapezoid in both angles.
    """

    n_eta: int = 32
    n_angle: int = 48

    @cached_property
    def points_and_weights(self):
        eta, we = gauss_legendre(self.n_eta, 0.0, 0.5 * math.pi)
        ang = 2.0 * math.pi * np.arange(self.n_angle) / self.n_angle
        wa = 2.0 * math.pi / self.n_angle
        E, A, B = np.meshgrid(eta, ang, ang, indexing="ij")
        pts = np.stack([np.cos(E) * np.cos(A), np.cos(E) * np.sin(A),
                        np.sin(E) * np.cos(B), np.sin(E) * np.sin(B)], axis=-1)
        wts = (we * np.sin(eta) * np.cos(eta))[:, None, None] * wa * wa
        wts = np.broadcast_to(wts, E.shape)
        return pts.reshape(-1, 4), wts.reshape(-1)


def richardson_table(estimate, h: float, levels: int, ratio: float = 2.0, order: int = 2):
    """Richardson extrapolation of ``estimate(h)`` whose error expands in ``h^order``.

    Step sizes ``h, h/ratio, ...`` (``levels`` of them). Returns the last
    diagonal entry and an error estimate: its difference from the previous
    diagonal entry.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    table = [[estimate(h / ratio ** k)] for k in range(levels)]
    for k in range(1, levels):
        for j in range(1, k + 1):
            fac = ratio ** (order * j)
            prev, coarse = table[k][j - 1], table[k - 1][j - 1]
            table[k].append(prev + (prev - coarse) / (fac - 1.0))
    best = table[-1][-1]
    err = abs(best - table[-2][-2]) if levels > 1 else math.inf
    return best, err
