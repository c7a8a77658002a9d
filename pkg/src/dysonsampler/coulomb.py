"""Coulomb drift d_k = sum_{j != k} 1/(x_k - x_j): direct sum and a 1D treecode."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import coulomb_sum, tree_drift, tree_moments

# relative gap below which two particles count as coincident
COINCIDENCE_TOL = 1e-14


class CoincidentParticles(ValueError):
    pass


@dataclass(frozen=True)
class CoulombMethod:
    """``kind`` is "naive" or "treecode"; the remaining fields tune the treecode.

    A far cluster with half-width r and centre c is replaced by its truncated
    Taylor series in (y - c) whenever r / |x - c| < mac_theta. Per-cluster
    relative truncation error is at most mac_theta**(expansion_order + 1).
    """

    kind: str = "naive"
    mac_theta: float = 0.5
    expansion_order: int = 30
    leaf_size: int = 16

    def __post_init__(self):
        if self.kind not in ("naive", "treecode"):
            raise ValueError(f"unknown Coulomb method {self.kind!r}")
        if not 0.0 < self.mac_theta < 1.0:
            raise ValueError("mac_theta must lie in (0, 1)")
        if self.expansion_order < 2:
            raise ValueError("expansion_order must be >= 2")
        if self.leaf_size < 4:
            raise ValueError("leaf_size must be >= 4")

    @classmethod
    def treecode(cls, mac_theta=0.5, expansion_order=30, leaf_size=16):
        return cls("treecode", mac_theta, expansion_order, leaf_size)


NAIVE = CoulombMethod()


def _validated(lam) -> np.ndarray:
    x = np.ascontiguousarray(lam, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1D configuration")
    if not np.all(np.isfinite(x)):
        raise ValueError("configuration has non-finite entries")
    if x.size > 1:
        gaps = np.diff(x)
        scale = max(float(np.max(np.abs(x))), float(x[-1] - x[0]))
        if np.any(gaps <= COINCIDENCE_TOL * scale):
            if np.any(gaps < 0):
                raise ValueError("configuration must be strictly increasing")
            raise CoincidentParticles("coincident particles in configuration")
    return x


def coulomb_drift_naive(lam) -> np.ndarray:
    """Direct O(N^2) summation."""
    x = _validated(lam)
    out = np.empty_like(x)
    coulomb_sum(x, out)
    return out


def coulomb_drift_treecode(lam, method: CoulombMethod | None = None) -> np.ndarray:
    """O(N log N) approximation of :func:`coulomb_drift_naive`.

    The tree is a balanced binary split of the sorted index range. Every
    target walks it depth-first: accepted clusters contribute through their
    moments, rejected leaves are summed directly. Summation order per target
    is fixed, so results are reproducible.
    """
    if method is None:
        method = CoulombMethod.treecode()
    x = _validated(lam)
    n = x.size
    if n <= 2 * method.leaf_size:
        out = np.empty_like(x)
        coulomb_sum(x, out)
        return out

    nlev = math.ceil(math.log2(n / method.leaf_size))
    nleaf = 1 << nlev
    bounds = (np.arange(nleaf + 1, dtype=np.int64) * n) // nleaf
    center, radius, mom = tree_moments(x, bounds, nlev, method.expansion_order)
    out = np.empty_like(x)
    tree_drift(x, bounds, nlev, center, radius, mom, method.mac_theta, out)
    return out


def coulomb_drift(lam, method: CoulombMethod = NAIVE) -> np.ndarray:
    if method.kind == "naive":
        return coulomb_drift_naive(lam)
    return coulomb_drift_treecode(lam, method)
