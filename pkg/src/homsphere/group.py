"""The three-sphere as the group SU(2) of unit quaternions.

A point is a pair of complex numbers ``(z, w)`` with ``|z|^2 + |w|^2 = 1``,
stored in ambient real coordinates ordered ``(Re z, Im z, Re w, Im w)``.
The product is

    (z, w) . (u, v) = (z u - conj(w) v,  w u + conj(z) v)

which is real-linear in each argument, so the differential of a left (or
right) translation is the same 4x4 orthogonal map acting on ambient vectors.

Two layers are provided: the value types :class:`UnitQuaternion` and
:class:`TangentVector` for single points, and array functions (``qmul``,
``qinv``, ``haar_samples``...) operating on ``(..., 4)`` float arrays for
the sampling and quadrature code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12
TANGENT_TOL = 1e-10
_MIN_GAUSS_NORM = 1e-8


# --------------------------------------------------------------------------
# array layer
# --------------------------------------------------------------------------

def to_complex(p):
    """Split ``(..., 4)`` ambient coordinates into complex ``(z, w)``."""
    p = np.asarray(p, dtype=float)
    return p[..., 0] + 1j * p[..., 1], p[..., 2] + 1j * p[..., 3]


def from_complex(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.stack(np.broadcast_arrays(z.real, z.imag, w.real, w.imag), axis=-1)


def qmul_raw(p, q):
    """Group-law product without renormalization.

    Also valid when ``q`` is an arbitrary ambient vector (tangent vectors),
    since the law is real-linear in each factor.
    """
    z, w = to_complex(p)
    u, v = to_complex(q)
    return from_complex(z * u - np.conj(w) * v, w * u + np.conj(z) * v)


def normalize(p):
    p = np.asarray(p, dtype=float)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def qmul(p, q):
    """Product of unit quaternions, renormalized onto S^3."""
    return normalize(qmul_raw(p, q))


def qinv(p):
    """Inverse ``(conj z, -w)``; the SU(2) matrix inverse is its adjoint."""
    p = np.asarray(p, dtype=float)
    return p * np.array([1.0, -1.0, -1.0, -1.0])


def left_matrix(a):
    """4x4 matrix of ``x -> a . x`` for a single element ``a``."""
    return qmul_raw(np.asarray(a, dtype=float), np.eye(4)).T


def right_matrix(a):
    """4x4 matrix of ``x -> x . a`` for a single element ``a``."""
    return qmul_raw(np.eye(4), np.asarray(a, dtype=float)).T


def haar_samples(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points uniformly distributed on S^3, shape ``(n, 4)``.

    Normalized standard Gaussians; draws with norm below 1e-8 are redrawn.
    """
    g = rng.standard_normal((n, 4))
    norms = np.linalg.norm(g, axis=1)
    bad = norms < _MIN_GAUSS_NORM
    while bad.any():
        g[bad] = rng.standard_normal((int(bad.sum()), 4))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms < _MIN_GAUSS_NORM
    return g / norms[:, None]


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitQuaternion:
    """A point of S^3 = SU(2); renormalized on construction."""

    z: complex
    w: complex

    def __post_init__(self):
        z, w = complex(self.z), complex(self.w)
        r = np.sqrt(abs(z) ** 2 + abs(w) ** 2)
        if not np.isfinite(r) or r == 0.0:
            raise ValueError("cannot normalize (z, w) = (%r, %r)" % (z, w))
        object.__setattr__(self, "z", z / r)
        object.__setattr__(self, "w", w / r)

    @classmethod
    def from_coords(cls, x) -> "UnitQuaternion":
        x = np.asarray(x, dtype=float)
        return cls(complex(x[0], x[1]), complex(x[2], x[3]))

    @classmethod
    def identity(cls) -> "UnitQuaternion":
        return cls(1.0, 0.0)

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.z.real, self.z.imag, self.w.real, self.w.imag])

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return multiply(self, other)

    def inverse(self) -> "UnitQuaternion":
        return inverse(self)

    def isclose(self, other: "UnitQuaternion", atol: float = UNIT_TOL) -> bool:
        return bool(np.allclose(self.coords, other.coords, rtol=0.0, atol=atol))


IDENTITY = UnitQuaternion(1.0, 0.0)
ANTIPODAL = UnitQuaternion(-1.0, 0.0)


@dataclass(frozen=True)
class TangentVector:
    """Ambient 4-vector ``v`` tangent to S^3 at ``base``."""

    base: UnitQuaternion
    v: tuple

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(4)
        if abs(float(v @ self.base.coords)) > TANGENT_TOL * max(1.0, float(np.linalg.norm(v))):
            raise ValueError("vector is not tangent to S^3 at its base point")
        object.__setattr__(self, "v", tuple(float(c) for c in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.v)


@dataclass(frozen=True)
class LieAlgebraVector:
    """Coefficients in the standard frame at the identity.

    ``a1`` multiplies the Hopf direction ``(i, 0)``; ``a2`` and ``a3``
    multiply ``(0, 1)`` and ``(0, i)``.
    """

    a1: float
    a2: float
    a3: float

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def at_identity(self) -> TangentVector:
        return TangentVector(IDENTITY, (0.0, self.a1, self.a2, self.a3))


def multiply(p: UnitQuaternion, q: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(p.z * q.z - p.w.conjugate() * q.w,
                          p.w * q.z + p.z.conjugate() * q.w)


def inverse(p: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(p.z.conjugate(), -p.w)


def left_translate(a: UnitQuaternion, p: UnitQuaternion) -> UnitQuaternion:
    return multiply(a, p)


def right_translate(p: UnitQuaternion, a: UnitQuaternion) -> UnitQuaternion:
    return multiply(p, a)


def antipode(p: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(-p.z, -p.w)


def differential_left_translate(a: UnitQuaternion, t: TangentVector) -> TangentVector:
    """Push ``t`` forward by left translation by ``a``."""
    return TangentVector(multiply(a, t.base), tuple(qmul_raw(a.coords, t.vector)))


def haar_sample(rng: np.random.Generator) -> UnitQuaternion:
    return UnitQuaternion.from_coords(haar_samples(rng, 1)[0])
