"""Initial configurations for the gas."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal


def sample_gue_eigenvalues(n: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues of the tridiagonal beta-ensemble, scaled to the semicircle on [-2, 2].

    Diagonal entries are Normal(0, 2/(beta n)) and the k-th off-diagonal entry
    is chi_{beta (n-k)} / sqrt(beta n), which gives joint density proportional
    to |Vandermonde|^beta * exp(-beta n sum x^2 / 4). For beta = 2 this is
    the GUE with weight exp(-n tr M^2 / 2).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    diag = rng.standard_normal(n) * np.sqrt(2.0 / (beta * n))
    if n == 1:
        return diag
    dof = beta * np.arange(n - 1, 0, -1)
    # chi_k as the square root of a Gamma(k/2, scale=2) draw
    off = np.sqrt(rng.gamma(dof / 2.0, 2.0)) / np.sqrt(beta * n)
    try:
        lam = eigvalsh_tridiagonal(diag, off)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"tridiagonal eigensolver failed: {exc}") from exc
    return np.sort(lam)


def sample_iid(n: int, width: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted i.i.d. Normal(0, width^2) draws; ties are redrawn."""
    if width <= 0:
        raise ValueError("width must be positive")
    lam = np.sort(rng.standard_normal(n) * width)
    while n > 1 and np.any(np.diff(lam) == 0):
        lam = np.sort(rng.standard_normal(n) * width)
    return lam


@dataclass(frozen=True)
class InitSpec:
    kind: str = "gaussian_spectrum"
    width: float = 1.0
    values: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("gaussian_spectrum", "iid", "explicit"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.kind == "iid" and self.width <= 0:
            raise ValueError("iid width must be positive")
        if self.kind == "explicit":
            v = np.asarray(self.values, dtype=float)
            if v.ndim != 1 or v.size == 0 or np.any(np.diff(v) <= 0) or not np.all(np.isfinite(v)):
                raise ValueError("explicit initial values must be finite and strictly increasing")

    @classmethod
    def explicit(cls, values):
        return cls("explicit", values=tuple(float(v) for v in values))

    def sample(self, n: int, beta: float, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian_spectrum":
            return sample_gue_eigenvalues(n, beta, rng)
        if self.kind == "iid":
            return sample_iid(n, self.width, rng)
        if len(self.values) != n:
            raise ValueError(f"explicit init has {len(self.values)} values, need {n}")
        return np.array(self.values, dtype=float)
