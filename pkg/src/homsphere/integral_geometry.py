"""Monte Carlo checks of the translation-averaging formula on S^3.

The space of translates ``L_a(reference)`` is coordinatized by ``a in S^3``
and carries the Riemannian volume ``dV_g`` of the metric itself, so

    lhs = vol(g) * E_a[ average of f over L_a(reference) ]
    rhs = vol(g) * E_p[ f(p) ]

with ``a`` and ``p`` Haar-uniform. Every left-invariant volume form is a
constant multiple of the round one, which makes both estimators unbiased.

Sampling is split into fixed-size chunks, each drawing from its own
``SeedSequence`` child, so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .fields import ScalarField
from .group import UnitQuaternion, haar_samples, qmul
from .metric import HomogeneousMetric, volume
from .quadrature import SurfaceGrid
from .surfaces import ParametrizedSphere, area_weights, sigma0

SAMPLE_CHUNK = 4096
REL_FLOOR = 1e-12
_POINT_BUDGET = 1 << 19  # max (translation, node) pairs evaluated at once

# independent substreams derived from one user seed
STREAM_TRANSLATIONS = 0
STREAM_VOLUME = 1


@dataclass(frozen=True)
class MonteCarloReport:
    lhs: float
    rhs: float
    rel_error: float
    n: int
    standard_error: float
    seed: int
    se_lhs: float = 0.0
    se_rhs: float = 0.0

    @property
    def abs_error(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def sigmas(self) -> float:
        """Discrepancy in units of the standard error of ``lhs - rhs``."""
        if self.abs_error <= REL_FLOOR * max(1.0, abs(self.rhs)):
            return 0.0
        if self.standard_error == 0.0:
            return math.inf
        return self.abs_error / self.standard_error

    def consistent(self, k: float = 3.0) -> bool:
        return self.sigmas < k

    def to_dict(self) -> dict:
        d = asdict(self)
        d["abs_error"] = self.abs_error
        d["sigmas"] = self.sigmas
        return d


def make_report(lhs, rhs, n, se_lhs, se_rhs, seed, se_diff=None) -> MonteCarloReport:
    se = math.hypot(se_lhs, se_rhs) if se_diff is None else se_diff
    rel = abs(lhs - rhs) / max(abs(rhs), REL_FLOOR)
    return MonteCarloReport(float(lhs), float(rhs), float(rel), int(n), float(se),
                            int(seed), float(se_lhs), float(se_rhs))


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        x = np.asarray(x, dtype=float)
        mu = float(np.mean(x))
        return cls(len(x), mu, float(np.sum((x - mu) ** 2)))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2)

    @property
    def sem(self) -> float:
        """Standard error of the mean."""
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def _reduce(parts):
    # pairwise merge in a fixed order
    parts = list(parts)
    while len(parts) > 1:
        nxt = [parts[i].merge(parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _chunk_sizes(n: int):
    full, rest = divmod(n, SAMPLE_CHUNK)
    return [SAMPLE_CHUNK] * full + ([rest] if rest else [])


def sample_chunks(seed: int, n: int, stream: int):
    """Deterministic list of ``(rng, size)`` covering ``n`` Haar draws."""
    sizes = _chunk_sizes(n)
    root = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return [(np.random.default_rng(child), size) for child, size in zip(root.spawn(len(sizes)), sizes)]


def _map_chunks(fn, seed, n, stream, workers):
    """Evaluate ``fn(points)`` per chunk of Haar samples, in chunk order."""
    chunks = sample_chunks(seed, n, stream)
    job = lambda item: fn(haar_samples(item[0], item[1]))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, chunks))
    return [job(c) for c in chunks]


def _mean_of(fn, seed, n, stream, workers):
    return _reduce(_Moments.of(v) for v in _map_chunks(fn, seed, n, stream, workers))


def _check_n(n, minimum=1):
    if int(n) < minimum:
        raise ValueError("sample count must be at least %d, got %r" % (minimum, n))
    return int(n)


def integrate_volume_with_error(m: HomogeneousMetric, f: ScalarField, n: int, seed: int,
                                stream: int = STREAM_VOLUME, workers: int = 1):
    """``(estimate, standard_error)`` of the integral of ``f`` against ``dV_g``."""
    n = _check_n(n)
    mom = _mean_of(f, seed, n, stream, workers)
    vol = volume(m)
    return vol * mom.mean, vol * mom.sem


def integrate_volume(m: HomogeneousMetric, f: ScalarField, n: int, seed: int,
                     stream: int = STREAM_VOLUME, workers: int = 1) -> float:
    return integrate_volume_with_error(m, f, n, seed, stream, workers)[0]


class _TranslatedAverager:
    """Callable mapping translations ``(k, 4)`` to surface averages of ``f``."""

    def __init__(self, m, f, reference, grid):
        w = area_weights(reference, m, grid).ravel()
        self.weights = w / math.fsum(w)
        self.nodes = reference.points(grid).reshape(-1, 4)
        self.f = f
        self.batch = max(1, _POINT_BUDGET // len(self.nodes))

    def __call__(self, a):
        out = np.empty(len(a))
        for i in range(0, len(a), self.batch):
            blk = a[i:i + self.batch]
            out[i:i + self.batch] = self.f(qmul(blk[:, None, :], self.nodes[None])) @ self.weights
        return out


def verify_averaging_formula(m: HomogeneousMetric, f: ScalarField,
                             reference: ParametrizedSphere | None = None, n: int = 10_000,
                             grid: SurfaceGrid = SurfaceGrid(64, 64), seed: int = 0,
                             shared_seed: bool = False, workers: int = 1) -> MonteCarloReport:
    """Compare the average over translates of surface means with the volume integral.

    By default the two sides use independent substreams of ``seed``. With
    ``shared_seed`` the volume integral reuses the translation samples and
    the standard error is taken from the paired differences.
    """
    n = _check_n(n, 1000)
    reference = reference or sigma0()
    vol = volume(m)
    averager = _TranslatedAverager(m, f, reference, grid)
    if shared_seed:
        pairs = _map_chunks(lambda a: (averager(a), f(a)), seed, n, STREAM_TRANSLATIONS, workers)
        lhs_m = _reduce(_Moments.of(h) for h, _ in pairs)
        rhs_m = _reduce(_Moments.of(v) for _, v in pairs)
        diff_m = _reduce(_Moments.of(h - v) for h, v in pairs)
        return make_report(vol * lhs_m.mean, vol * rhs_m.mean, n, vol * lhs_m.sem,
                           vol * rhs_m.sem, seed, se_diff=vol * diff_m.sem)
    lhs_m = _mean_of(averager, seed, n, STREAM_TRANSLATIONS, workers)
    rhs, se_rhs = integrate_volume_with_error(m, f, n, seed, STREAM_VOLUME, workers)
    return make_report(vol * lhs_m.mean, rhs, n, vol * lhs_m.sem, se_rhs, seed)


def verify_fubini_exchange(m: HomogeneousMetric, f: ScalarField,
                           reference: ParametrizedSphere | None = None, n: int = 10_000,
                           grid: SurfaceGrid = SurfaceGrid(64, 64), seed: int = 0,
                           workers: int = 1):
    """Average over the reference sphere of the volume integrals ``∫ f(a . p) dV(a)``.

    Uses the same translation samples as :func:`verify_averaging_formula`
    (same ``seed``), so the two summation orders must agree to rounding.
    Returns ``(report_vs_volume_integral, per_node_integrals)``.
    """
    n = _check_n(n, 1000)
    reference = reference or sigma0()
    vol = volume(m)
    w = area_weights(reference, m, grid).ravel()
    w = w / math.fsum(w)
    nodes = reference.points(grid).reshape(-1, 4)
    batch = max(1, _POINT_BUDGET // len(nodes))

    def node_sums(a):
        acc = np.zeros(len(nodes))
        for i in range(0, len(a), batch):
            acc += f(qmul(a[i:i + batch, None, :], nodes[None])).sum(axis=0)
        return acc

    sums = _map_chunks(node_sums, seed, n, STREAM_TRANSLATIONS, workers)
    per_node = vol * np.sum(sums, axis=0) / n
    exchanged = float(per_node @ w)
    # spread of the inner integrals over the sphere is not the MC error, so
    # reuse the standard error of the translation-first estimator
    ref = verify_averaging_formula(m, f, reference, n, grid, seed, workers=workers)
    report = make_report(exchanged, ref.rhs, n, ref.se_lhs, ref.se_rhs, seed)
    return report, per_node


def verify_unimodularity(m: HomogeneousMetric, f: ScalarField, q: UnitQuaternion,
                         n: int = 10_000, seed: int = 0, shared_seed: bool = True,
                         workers: int = 1) -> MonteCarloReport:
    """Compare ``∫ f dV_g`` with ``∫ f(p . q) dV_g(p)``.

    With ``shared_seed`` both integrals see the same samples (the second
    right-translated) and the standard error is that of the paired
    differences.
    """
    n = _check_n(n)
    vol = volume(m)
    qc = np.asarray(q.coords, dtype=float)
    shifted = lambda p: f(qmul(p, qc))
    if shared_seed:
        pairs = _map_chunks(lambda p: (f(p), shifted(p)), seed, n, STREAM_VOLUME, workers)
        a = _reduce(_Moments.of(x) for x, _ in pairs)
        b = _reduce(_Moments.of(y) for _, y in pairs)
        d = _reduce(_Moments.of(y - x) for x, y in pairs)
        return make_report(vol * b.mean, vol * a.mean, n, vol * b.sem, vol * a.sem, seed,
                           se_diff=vol * d.sem)
    rhs, se_r = integrate_volume_with_error(m, f, n, seed, STREAM_VOLUME, workers)
    lhs, se_l = integrate_volume_with_error(m, ScalarField(shifted, f.name + " o R_q"), n,
                                            seed, STREAM_TRANSLATIONS, workers)
    return make_report(lhs, rhs, n, se_l, se_r, seed)
