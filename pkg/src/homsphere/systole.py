"""Berger two-systole curve and the conformal area experiment.

For the Berger metric ``g_rho`` the horizontal sphere has area

    2 pi * I(rho),   I(rho) = int_0^pi sin(s) sqrt(cos(s)^2 + rho^2 sin(s)^2) ds,

its quotient in RP^3 has half that area, and ``vol(RP^3, g_rho) = pi^2 rho``.
The scale-free systole is therefore ``F(rho) / pi^(1/3)`` with
``F(rho) = rho^(-2/3) I(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .fields import ConformalFactor
from .group import haar_samples, qmul
from .integral_geometry import STREAM_TRANSLATIONS, STREAM_VOLUME, sample_chunks
from .metric import HomogeneousMetric, volume
from .quadrature import QuadratureError, SurfaceGrid, VolumeGrid, adaptive_quad, richardson_table
from .surfaces import area_weights, sigma0

CUBE_ROOT_PI = math.pi ** (1.0 / 3.0)
ROUND_NORMALIZED_SYSTOLE = 2.0 / CUBE_ROOT_PI
DEFAULT_TOL = 1e-13


def _check_rho(rho):
    rho = float(rho)
    if not (math.isfinite(rho) and rho > 0.0):
        raise ValueError("rho must be positive, got %r" % rho)
    return rho


def _profile_integral(rho: float, tol: float):
    """``I(rho)`` by adaptive quadrature, split at the equator ``s = pi/2``."""
    r2 = rho * rho
    integrand = lambda s: np.sin(s) * np.sqrt(np.cos(s) ** 2 + r2 * np.sin(s) ** 2)
    return adaptive_quad(integrand, 0.0, math.pi, tol=tol, breakpoints=(0.5 * math.pi,))


def berger_minimal_area(rho: float, tol: float = DEFAULT_TOL) -> float:
    """Area of the horizontal sphere under ``g_rho``, to absolute error ``tol``."""
    rho = _check_rho(rho)
    return 2.0 * math.pi * _profile_integral(rho, tol / (2.0 * math.pi)).value


def two_systole_rp3(rho: float, tol: float = DEFAULT_TOL) -> float:
    return 0.5 * berger_minimal_area(rho, 2.0 * tol)


def rp3_volume(rho: float) -> float:
    return math.pi ** 2 * _check_rho(rho)


def F(rho: float, tol: float = DEFAULT_TOL) -> float:
    """Systole curve ``rho^(-2/3) I(rho)``; ``tol`` bounds the error of ``I``."""
    rho = _check_rho(rho)
    return rho ** (-2.0 / 3.0) * _profile_integral(rho, tol).value


def normalized_systole(rho: float, tol: float = DEFAULT_TOL) -> float:
    return F(rho, tol) / CUBE_ROOT_PI


@dataclass(frozen=True)
class DerivativeEstimate:
    first: float
    second: float
    first_error: float
    second_error: float


def F_derivatives_at_one(h: float = 1e-2, richardson_levels: int = 4,
                         tol: float = 1e-15) -> DerivativeEstimate:
    """``F'(1)`` and ``F''(1)`` from Richardson-extrapolated central differences.

    The reported errors add the extrapolation error estimate and the
    quadrature error amplified by the smallest step.
    """
    if not 0.0 < h <= 0.1:
        raise ValueError("step must satisfy 0 < h <= 0.1")
    cache = {}

    def val(r):
        if r not in cache:
            cache[r] = F(r, tol)
        return cache[r]

    d1 = lambda hh: (val(1.0 + hh) - val(1.0 - hh)) / (2.0 * hh)
    d2 = lambda hh: (val(1.0 + hh) - 2.0 * val(1.0) + val(1.0 - hh)) / (hh * hh)
    first, e1 = richardson_table(d1, h, richardson_levels)
    second, e2 = richardson_table(d2, h, richardson_levels)
    h_min = h / 2.0 ** (richardson_levels - 1)
    # each F value carries up to ~tol of quadrature error
    q1 = 2.0 * tol / (2.0 * h_min)
    q2 = 4.0 * tol / (h_min * h_min)
    return DerivativeEstimate(first, second, e1 + q1, e2 + q2)


@dataclass(frozen=True)
class SystoleCurvePoint:
    rho: float
    area_sigma0: float
    volume: float
    F: float
    normalized_systole: float
    converged: bool = True


def systole_point(rho: float, tol: float = DEFAULT_TOL) -> SystoleCurvePoint:
    rho = _check_rho(rho)
    converged = True
    try:
        integral = _profile_integral(rho, tol).value
    except QuadratureError as exc:
        if exc.best is None:
            raise
        integral, converged = exc.best.value, False
    f_val = rho ** (-2.0 / 3.0) * integral
    return SystoleCurvePoint(rho, 2.0 * math.pi * integral, 2.0 * math.pi ** 2 * rho,
                             f_val, f_val / CUBE_ROOT_PI, converged)


def rho_grid(rho_min: float, rho_max: float, n_points: int, spacing: str = "log") -> np.ndarray:
    rho_min, rho_max = _check_rho(rho_min), _check_rho(rho_max)
    if n_points < 1:
        raise ValueError("need at least one point")
    if n_points > 1 and not rho_min < rho_max:
        raise ValueError("need rho_min < rho_max")
    if spacing == "linear":
        return np.linspace(rho_min, rho_max, n_points)
    if spacing == "log":
        return np.geomspace(rho_min, rho_max, n_points)
    raise ValueError("spacing must be 'linear' or 'log', got %r" % spacing)


def systole_curve(rho_min: float, rho_max: float, n_points: int, spacing: str = "log",
                  tol: float = DEFAULT_TOL) -> list:
    return [systole_point(float(r), tol) for r in rho_grid(rho_min, rho_max, n_points, spacing)]


# --------------------------------------------------------------------------
# conformal experiment
# --------------------------------------------------------------------------

EQUALITY_TOL = 1e-6

_UNIT_IMAGINARY = np.array([[0.0, 1.0, 0.0, 0.0],
                            [0.0, 0.0, 1.0, 0.0],
                            [0.0, 0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class ConformalExperimentReport:
    min_area: float
    bound: float
    ratio: float
    equality: bool
    mean_area: float
    reference_area: float
    volume_conformal: float
    volume_reference: float
    bound_rel_se: float
    best_translation: tuple
    n_translations: int
    optimizer_converged: bool
    seed: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["best_translation"] = list(self.best_translation)
        return d


def _areas_of_translates(nodes, weights, phi, translations, budget=1 << 19):
    batch = max(1, budget // len(nodes))
    out = np.empty(len(translations))
    for i in range(0, len(translations), batch):
        blk = translations[i:i + batch]
        out[i:i + batch] = phi(qmul(blk[:, None, :], nodes[None])) @ weights
    return out


def _compass_search(fun, start, step, min_step=1e-7, max_evals=2000):
    """Minimize ``fun`` over ``a . exp(t e_k)`` moves, halving steps on failure."""
    best_a = np.asarray(start, dtype=float)
    best = float(fun(best_a[None])[0])
    evals = 1
    while step > min_step:
        if evals >= max_evals:
            return best_a, best, False
        c, s = math.cos(step), math.sin(step)
        moves = np.concatenate([c * np.eye(4)[:1] + s * _UNIT_IMAGINARY,
                                c * np.eye(4)[:1] - s * _UNIT_IMAGINARY])
        cand = qmul(best_a[None], moves)
        vals = fun(cand)
        evals += len(cand)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, best_a = float(vals[k]), cand[k]
        else:
            step *= 0.5
    return best_a, best, True


def conformal_experiment(gbar: HomogeneousMetric, phi: ConformalFactor,
                         grid: SurfaceGrid = SurfaceGrid(64, 64), tol: float = EQUALITY_TOL,
                         n_translations: int = 2000, sampler: str = "haar",
                         refine: int = 4, n_volume: int = 10_000, volume_method: str = "mc",
                         seed: int = 0) -> ConformalExperimentReport:
    """Minimum area of translates of the horizontal sphere under ``phi * gbar``.

    The minimum runs over ``n_translations`` sampled translations (Haar
    draws, or a Hopf-coordinate lattice with ``sampler="grid"``), after
    which the ``refine`` best are polished by compass search. It is compared
    with ``w * (vol(phi gbar) / vol(gbar))^(2/3)``, ``w`` being the
    unweighted area of the horizontal sphere on the same grid and
    ``vol(phi gbar) = int phi^(3/2) dV_gbar`` (Monte Carlo with ``n_volume``
    samples, or a product rule with ``volume_method="quadrature"``).
    """
    if not gbar.is_berger():
        raise ValueError("the conformal experiment needs a Berger background metric")
    ref = sigma0()
    weights = area_weights(ref, gbar, grid).ravel()
    nodes = ref.points(grid).reshape(-1, 4)
    w_ref = math.fsum(weights)
    fun = lambda a: _areas_of_translates(nodes, weights, phi, np.atleast_2d(a))

    if sampler == "haar":
        translations = np.concatenate([haar_samples(rng, k) for rng, k in
                                       sample_chunks(seed, n_translations, STREAM_TRANSLATIONS)])
    elif sampler == "grid":
        side = max(2, round((n_translations / 2) ** (1.0 / 3.0)))
        translations = VolumeGrid(n_eta=side, n_angle=2 * side).points_and_weights[0]
    else:
        raise ValueError("sampler must be 'haar' or 'grid', got %r" % sampler)
    areas = fun(translations)
    mean_area = float(np.mean(areas))
    order = np.argsort(areas, kind="stable")
    best_idx = int(order[0])
    best_a, min_area = translations[best_idx], float(areas[best_idx])
    converged = True
    if refine:
        step = 0.5 * (2.0 * math.pi ** 2 / len(translations)) ** (1.0 / 3.0)
        for idx in order[:refine]:
            a, v, ok = _compass_search(fun, translations[idx], step)
            converged &= ok
            if v < min_area:
                best_a, min_area = a, v

    vol_ref = volume(gbar)
    phi32 = lambda p: phi(p) ** 1.5
    if volume_method == "mc":
        vals = np.concatenate([phi32(haar_samples(rng, k)) for rng, k in
                               sample_chunks(seed, n_volume, STREAM_VOLUME)])
        mean = float(np.mean(vals))
        rel_se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)) / mean) if len(vals) > 1 else 0.0
        vol_phi = vol_ref * mean
    elif volume_method == "quadrature":
        pts, wts = VolumeGrid().points_and_weights
        vol_phi = vol_ref / (2.0 * math.pi ** 2) * math.fsum(wts * phi32(pts))
        rel_se = 0.0
    else:
        raise ValueError("volume_method must be 'mc' or 'quadrature'")
    bound = w_ref * (vol_phi / vol_ref) ** (2.0 / 3.0)
    ratio = min_area / bound
    return ConformalExperimentReport(
        min_area=min_area, bound=bound, ratio=ratio, equality=abs(ratio - 1.0) < tol,
        mean_area=mean_area, reference_area=w_ref, volume_conformal=vol_phi,
        volume_reference=vol_ref, bound_rel_se=2.0 / 3.0 * rel_se,
        best_translation=tuple(float(x) for x in best_a), n_translations=len(translations),
        optimizer_converged=bool(converged), seed=int(seed))
