"""Confinement potentials, gas parameters, and particle configurations.

Potentials are callables over planar points.  All evaluators accept arrays of
shape (..., 2) and broadcast; a single point may be passed as a pair.  Builtin
potentials carry closed-form derivatives, user potentials fall back to central
finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError, InvalidPointError

# Finite-difference step for user-supplied potentials (value-only closures).
FD_STEP = 1e-5


def _as_points(p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    if pts.shape[-1] != 2:
        raise InvalidPointError(f"points must have a trailing axis of size 2, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InvalidPointError("non-finite coordinates in point input")
    return pts


def _fd_gradient(value: Callable, pts: np.ndarray, h: float) -> np.ndarray:
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    gx = (value(pts + ex) - value(pts - ex)) / (2 * h)
    gy = (value(pts + ey) - value(pts - ey)) / (2 * h)
    return np.stack([gx, gy], axis=-1)


def _fd_laplacian(value: Callable, pts: np.ndarray, h: float) -> np.ndarray:
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    return (
        value(pts + ex) + value(pts - ex) + value(pts + ey) + value(pts - ey) - 4.0 * value(pts)
    ) / (h * h)


@dataclass(frozen=True)
class ConfinementPotential:
    """A confining potential with value, gradient, and Laplacian evaluation.

    Immutable and pure; safe to share across threads.
    """

    kind: str
    _value: Callable = field(repr=False)
    _gradient: Optional[Callable] = field(default=None, repr=False)
    _laplacian: Optional[Callable] = field(default=None, repr=False)

    def value(self, p) -> np.ndarray:
        return np.asarray(self._value(_as_points(p)), dtype=float)

    def gradient(self, p) -> np.ndarray:
        pts = _as_points(p)
        if self._gradient is not None:
            return np.asarray(self._gradient(pts), dtype=float)
        return _fd_gradient(self._value, pts, FD_STEP)

    def laplacian(self, p) -> np.ndarray:
        pts = _as_points(p)
        if self._laplacian is not None:
            return np.asarray(self._laplacian(pts), dtype=float)
        return _fd_laplacian(self._value, pts, FD_STEP)


def quadratic() -> ConfinementPotential:
    """V(x) = |x|^2 / 2."""
    return ConfinementPotential(
        kind="quadratic",
        _value=lambda p: 0.5 * (p * p).sum(axis=-1),
        _gradient=lambda p: p.copy(),
        _laplacian=lambda p: np.full(p.shape[:-1], 2.0),
    )


def quartic() -> ConfinementPotential:
    """V(x) = |x|^4 / 4."""
    return ConfinementPotential(
        kind="quartic",
        _value=lambda p: 0.25 * ((p * p).sum(axis=-1)) ** 2,
        _gradient=lambda p: (p * p).sum(axis=-1)[..., None] * p,
        _laplacian=lambda p: 4.0 * (p * p).sum(axis=-1),
    )


def from_callable(fn: Callable, kind: str = "user",
                  gradient: Optional[Callable] = None,
                  laplacian: Optional[Callable] = None) -> ConfinementPotential:
    """Wrap a value closure; derivatives default to finite differences.

    ``fn`` must accept arrays of shape (..., 2) and return shape (...).
    """
    return ConfinementPotential(kind=kind, _value=fn, _gradient=gradient, _laplacian=laplacian)


def builtin_potential(tag: str) -> ConfinementPotential:
    """Resolve a potential named by its config-file tag."""
    if tag == "quadratic":
        return quadratic()
    if tag == "quartic":
        return quartic()
    raise ConfigurationError(f"unknown potential tag {tag!r} (expected quadratic, quartic, or grid:<path>)")


def evaluate_confinement(V: ConfinementPotential, p, order: str = "value"):
    """Evaluate V, its gradient, or its Laplacian at p."""
    if order == "value":
        return V.value(p)
    if order == "gradient":
        return V.gradient(p)
    if order == "laplacian":
        return V.laplacian(p)
    raise DomainError(f"order must be value, gradient, or laplacian, got {order!r}")


def check_growth_condition(V: ConfinementPotential, radii, n_angles: int = 64) -> list[float]:
    """Sample V(x)/log|x| on circles and return the min-over-angle ratio per radius.

    Confinement requires every ratio to exceed 1; the caller asserts.  Radii
    below 2 are rejected since log|x| is too small there for the ratio to
    mean anything.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 2.0):
        raise DomainError("growth-check radii must be >= 2")
    if np.any(np.diff(radii) <= 0) and radii.size > 1:
        raise DomainError("growth-check radii must be increasing")
    theta = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    ring = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    out = []
    for r in radii:
        vals = V.value(r * ring)
        out.append(float(np.min(vals) / np.log(r)))
    return out


@dataclass(frozen=True)
class GasParams:
    """Particle count and inverse temperature of the gas."""

    N: int
    beta: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if not (self.beta > 0):
            raise DomainError(f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class Configuration:
    """N planar particle positions together with the gas parameters."""

    points: np.ndarray
    params: GasParams

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidPointError(f"points must have shape (N, 2), got {pts.shape}")
        if pts.shape[0] != self.params.N:
            raise InvalidPointError(f"expected {self.params.N} points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvalidPointError("non-finite coordinates in configuration")
        object.__setattr__(self, "points", pts.copy())
        self.points.setflags(write=False)
