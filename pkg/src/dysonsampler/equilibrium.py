"""Limiting (large-N) eigenvalue densities for quartic potentials.

For q = 1 the density is (1/2pi)(1 + 2ga^2 + gs^2) sqrt(4a^2 - s^2) on
[-2a, 2a]; for q = 0 the constant 1 drops out and a = (3g)^(-1/4). Other
q > 0 are mapped onto q = 1 by x -> sqrt(q) x, which sends g to g/q^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import QuarticPotential

CDF_ORDER = 128
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(CDF_ORDER)


def _unit_edge(g: float) -> float:
    # a^2 = (sqrt(1+12g) - 1)/(6g), rationalised to avoid cancellation at small g
    return math.sqrt(2.0 / (1.0 + math.sqrt(1.0 + 12.0 * g)))


def edge(p: QuarticPotential) -> float:
    """Half-edge ``a``; the support is [-2a, 2a]."""
    if p.q == 0:
        return (3.0 * p.g) ** -0.25
    return _unit_edge(p.g / p.q**2) / math.sqrt(p.q)


@dataclass(frozen=True)
class EquilibriumLaw:
    potential: QuarticPotential

    @property
    def a(self) -> float:
        return edge(self.potential)

    def density(self, s):
        return density(self.potential, s)

    def cdf(self, s):
        return cdf(self.potential, s)


def _poly_factor(p: QuarticPotential, a: float, s):
    # density = poly_factor(s) * sqrt(4a^2 - s^2) / (2 pi), valid for the scaled law
    return p.q + 2.0 * p.g * a * a + p.g * s * s


def density(p: QuarticPotential, s):
    """Equilibrium density; vectorised over ``s``.

    Written directly in unscaled variables: q + 2 g a^2 + g s^2 reproduces both
    the q = 1 and q = 0 closed forms and agrees with the sqrt(q) rescaling.
    """
    s = np.asarray(s, dtype=float)
    a = edge(p)
    inside = np.abs(s) <= 2.0 * a
    root = np.sqrt(np.clip(4.0 * a * a - s * s, 0.0, None))
    out = _poly_factor(p, a, s) * root / (2.0 * np.pi)
    return np.where(inside, out, 0.0)


def cdf(p: QuarticPotential, s):
    """Equilibrium distribution function via Gauss-Legendre in the angle u, s = 2a sin u."""
    s = np.asarray(s, dtype=float)
    a = edge(p)
    r = 2.0 * a
    upper = np.arcsin(np.clip(s / r, -1.0, 1.0))
    lo = -0.5 * np.pi
    half = 0.5 * (upper - lo)
    u = lo + half[..., None] * (_GL_NODES + 1.0)
    x = r * np.sin(u)
    # ds = r cos u du and sqrt(r^2 - x^2) = r cos u
    integrand = _poly_factor(p, a, x) * (r * np.cos(u)) ** 2 / (2.0 * np.pi)
    val = half * (integrand @ _GL_WEIGHTS)
    val = np.where(s <= -r, 0.0, np.where(s >= r, 1.0, val))
    return np.clip(val, 0.0, 1.0)
