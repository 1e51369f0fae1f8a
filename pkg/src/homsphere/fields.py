"""Scalar test functions and conformal factors on S^3.

Both wrap a vectorized rule mapping ``(..., 4)`` ambient coordinates to
``(...)`` values. The textual forms accepted by :func:`parse_field` and
:func:`parse_factor` are what the command line uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .group import UnitQuaternion, qmul

COORD_NAMES = ("re_z", "im_z", "re_w", "im_w")


@dataclass(frozen=True)
class ScalarField:
    rule: Callable
    name: str

    def __call__(self, p):
        if isinstance(p, UnitQuaternion):
            return float(self.rule(p.coords))
        return np.asarray(self.rule(np.asarray(p, dtype=float)), dtype=float)

    def compose_left(self, a) -> "ScalarField":
        """``p -> f(a . p)``."""
        a = np.asarray(a.coords if isinstance(a, UnitQuaternion) else a, dtype=float)
        return ScalarField(lambda p: self.rule(qmul(a, p)), "%s o L_a" % self.name)

    def compose_right(self, a) -> "ScalarField":
        """``p -> f(p . a)``."""
        a = np.asarray(a.coords if isinstance(a, UnitQuaternion) else a, dtype=float)
        return ScalarField(lambda p: self.rule(qmul(p, a)), "%s o R_a" % self.name)


def constant(c: float) -> ScalarField:
    c = float(c)
    return ScalarField(lambda p: np.full(np.shape(p)[:-1], c), "constant:%r" % c)


def coordinate(i: int) -> ScalarField:
    return ScalarField(lambda p: p[..., i], COORD_NAMES[i])


def coordinate_product(i: int, j: int) -> ScalarField:
    return ScalarField(lambda p: p[..., i] * p[..., j],
                       "%s*%s" % (COORD_NAMES[i], COORD_NAMES[j]))


def bump(center=(1.0, 0.0, 0.0, 0.0), k: float = 1.0) -> ScalarField:
    """``exp(-k |p - center|^2)``, smooth and positive."""
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    k = float(k)
    return ScalarField(lambda p: np.exp(-k * np.sum((p - c) ** 2, axis=-1)),
                       "bump:%r" % k)


@dataclass(frozen=True)
class ConformalFactor:
    """Strictly positive function ``phi``; the conformal metric is ``phi * g``."""

    rule: Callable
    name: str

    def __call__(self, p):
        vals = np.asarray(self.rule(np.asarray(p, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise ValueError("conformal factor %s is not strictly positive" % self.name)
        return vals

    def scaled(self, c: float) -> "ConformalFactor":
        c = float(c)
        if c <= 0:
            raise ValueError("scale must be positive")
        return ConformalFactor(lambda p: c * self.rule(p), "%r*%s" % (c, self.name))


def constant_factor(c: float) -> ConformalFactor:
    c = float(c)
    if c <= 0:
        raise ValueError("constant conformal factor must be positive")
    return ConformalFactor(lambda p: np.full(np.shape(p)[:-1], c), "constant:%r" % c)


def coord_square_factor(amplitude: float = 0.5, i: int = 0) -> ConformalFactor:
    """``1 + amplitude * x_i^2``; positive for ``amplitude > -1``."""
    amplitude = float(amplitude)
    if amplitude <= -1.0:
        raise ValueError("1 + a x^2 is not positive on S^3 for a <= -1")
    return ConformalFactor(lambda p: 1.0 + amplitude * p[..., i] ** 2,
                           "coord-square:%r,%d" % (amplitude, i))


def bump_factor(amplitude: float = 1.0, k: float = 1.0) -> ConformalFactor:
    """``1 + amplitude * bump``; the bump lies in (0, 1] so this needs ``amplitude > -1``."""
    amplitude = float(amplitude)
    b = bump(k=k)
    if amplitude <= -1.0:
        raise ValueError("bump factor amplitude must exceed -1")
    return ConformalFactor(lambda p: 1.0 + amplitude * b.rule(p),
                           "bump:%r,%r" % (amplitude, float(k)))


def _args(text: str):
    return [a for a in text.split(",") if a != ""]


def parse_field(text: str) -> ScalarField:
    """``constant:c``, ``coord:i``, ``product:i,j`` or ``bump[:k]``."""
    kind, _, rest = text.partition(":")
    args = _args(rest)
    try:
        if kind == "constant":
            return constant(float(args[0]) if args else 1.0)
        if kind == "coord":
            return coordinate(int(args[0]))
        if kind == "product":
            return coordinate_product(int(args[0]), int(args[1]))
        if kind == "bump":
            return bump(k=float(args[0]) if args else 1.0)
    except (IndexError, ValueError) as exc:
        raise ValueError("bad field specification %r: %s" % (text, exc)) from None
    raise ValueError("unknown field %r (use constant, coord, product, bump)" % text)


def parse_factor(text: str) -> ConformalFactor:
    """``constant:c``, ``coord-square:a[,i]`` or ``bump:a[,k]``."""
    kind, _, rest = text.partition(":")
    args = _args(rest)
    try:
        if kind == "constant":
            return constant_factor(float(args[0]) if args else 1.0)
        if kind == "coord-square":
            return coord_square_factor(float(args[0]) if args else 0.5,
                                       int(args[1]) if len(args) > 1 else 0)
        if kind == "bump":
            return bump_factor(float(args[0]) if args else 1.0,
                               float(args[1]) if len(args) > 1 else 1.0)
    except (IndexError, ValueError) as exc:
        raise ValueError("bad factor specification %r: %s" % (text, exc)) from None
    raise ValueError("unknown factor %r (use constant, coord-square, bump)" % text)
