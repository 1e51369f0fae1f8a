"""Independent Ricci curvature check in a stereographic chart.

Builds the metric tensor ``g_ij(x)`` in the chart by evaluating the metric on
the analytic chart derivatives, differentiates it numerically (sixth-order
central differences, nested for second derivatives), and contracts the
coordinate Christoffel symbols to the Ricci tensor. Nothing here uses the
structure-constant formula, so it can validate :func:`ricci_eigenvalues`.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .metric import HomogeneousMetric, frame_vectors, metric_form

_STENCIL = ((1, 45.0), (2, -9.0), (3, 1.0))
_DENOM = 60.0


def stereographic(x):
    """Inverse stereographic chart ``R^3 -> S^3`` sending 0 to the identity.

    Returns the point ``(4,)`` and its Jacobian ``(4, 3)``.
    """
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    d = 1.0 + r2
    p = np.concatenate([[1.0 - r2], 2.0 * x]) / d
    jac = np.empty((4, 3))
    jac[0] = -4.0 * x / d ** 2
    jac[1:] = 2.0 * np.eye(3) / d - 4.0 * np.outer(x, x) / d ** 2
    return p, jac


def chart_metric(m: HomogeneousMetric, x) -> np.ndarray:
    p, jac = stereographic(x)
    cols = jac.T  # chart basis vectors as ambient vectors
    return metric_form(m.array, p, cols[:, None, :], cols[None, :, :])


def _d(fun, x, k, h):
    acc = 0.0
    for j, c in _STENCIL:
        e = np.zeros(3)
        e[k] = j * h
        acc = acc + c * (fun(x + e) - fun(x - e))
    return acc / (_DENOM * h)


def chart_ricci(m: HomogeneousMetric, x, h: float = 1e-2):
    """Ricci tensor ``R_ij`` and metric ``g_ij`` at chart point ``x``."""
    x = np.asarray(x, dtype=float)
    g_at = lambda y: chart_metric(m, y)
    g = g_at(x)
    dg = np.array([_d(g_at, x, k, h) for k in range(3)])  # dg[k, i, j]
    ddg = np.array([[_d(lambda y, l=l: _d(g_at, y, l, h), x, k, h) for l in range(3)]
                    for k in range(3)])  # ddg[k, l, i, j]
    ginv = np.linalg.inv(g)
    # Gamma_{m,ij} = 1/2 (d_i g_jm + d_j g_im - d_m g_ij); gamma[a, i, j] = Gamma^a_ij
    gam_low = 0.5 * (np.einsum("ijm->mij", dg) + np.einsum("jim->mij", dg) - dg)
    gamma = np.einsum("am,mij->aij", ginv, gam_low)
    # derivatives: d_l Gamma_{m,ij} = 1/2 (dd_li g_jm + dd_lj g_im - dd_lm g_ij)
    dgam_low = 0.5 * (np.einsum("lijm->lmij", ddg) + np.einsum("ljim->lmij", ddg)
                      - np.einsum("lmij->lmij", ddg))
    dginv = -np.einsum("ab,lbc,cd->lad", ginv, dg, ginv)
    dgamma = (np.einsum("lam,mij->laij", dginv, gam_low)
              + np.einsum("am,lmij->laij", ginv, dgam_low))  # [l, a, i, j]
    ric = (np.einsum("kkij->ij", dgamma)
           - np.einsum("jkik->ij", dgamma)
           + np.einsum("kkl,lij->ij", gamma, gamma)
           - np.einsum("kjl,lik->ij", gamma, gamma))
    return 0.5 * (ric + ric.T), g


def ricci_by_finite_differences(m: HomogeneousMetric, x=(0.1, -0.2, 0.15), h: float = 1e-2):
    """Ricci curvatures of the orthonormal frame ``X_k / sqrt(l_k)`` at chart point ``x``.

    Returns ``(frame_values, eigenvalues)``; the eigenvalues are those of
    ``g^{-1} Ric`` in ascending order.
    """
    ric, g = chart_ricci(m, x, h)
    p, jac = stereographic(x)
    frame = frame_vectors(p)  # (3, 4)
    coeff, *_ = np.linalg.lstsq(jac, frame.T, rcond=None)  # chart components, (3, 3)
    vals = np.einsum("ik,ij,jk->k", coeff, ric, coeff) / m.array
    eig = scipy.linalg.eigh(ric, g, eigvals_only=True)
    return vals, np.sort(eig)
