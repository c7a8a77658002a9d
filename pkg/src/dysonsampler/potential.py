"""Quartic confining potential V(x) = q x^2/2 + g x^4/4."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuarticPotential:
    q: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.q) and np.isfinite(self.g)):
            raise ValueError("potential coefficients must be finite")
        if self.q < 0 or self.g < 0:
            raise ValueError(f"need q >= 0 and g >= 0, got q={self.q}, g={self.g}")
        if self.q == 0 and self.g == 0:
            raise ValueError("q and g cannot both be zero (no confinement)")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        return 0.5 * self.q * x2 + 0.25 * self.g * x2 * x2

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.q * x + self.g * x * x * x

    def tamed_drift(self, x, dt: float):
        """-V'(x) / (2 + dt |V'(x)|); bounded by 1/dt in magnitude."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        dv = self.derivative(x)
        return -dv / (2.0 + dt * np.abs(dv))

    def hamiltonian(self, lam) -> float:
        """Coulomb-gas energy (1/2) sum V - (1/N) sum_{j<k} log(lam_k - lam_j)."""
        lam = np.asarray(lam, dtype=float)
        n = lam.size
        confinement = 0.5 * float(np.sum(self.value(lam)))
        if n < 2:
            return confinement
        gaps = lam[None, :] - lam[:, None]
        upper = gaps[np.triu_indices(n, k=1)]
        if np.any(upper == 0):
            raise ValueError("coincident particles: logarithmic singularity")
        # sorted input gives positive upper entries; abs keeps unordered input meaningful
        return confinement - float(np.sum(np.log(np.abs(upper)))) / n


def value(p: QuarticPotential, x):
    return p.value(x)


def derivative(p: QuarticPotential, x):
    return p.derivative(x)


def tamed_drift(p: QuarticPotential, x, dt: float):
    return p.tamed_drift(x, dt)


def hamiltonian(p: QuarticPotential, lam) -> float:
    return p.hamiltonian(lam)
