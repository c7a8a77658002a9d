"""Empirical distributions, Kolmogorov-Smirnov distances and decay-rate fits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

KS_95 = 1.36


class InsufficientDecay(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if s.size < 1:
            raise ValueError("need at least one sample")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @classmethod
    def pooled(cls, trials) -> "EmpiricalDistribution":
        """Pool all coordinates of all trials into a single sample."""
        return cls(np.concatenate([np.ravel(t) for t in trials]))

    @property
    def n(self) -> int:
        return self.samples.size

    def __call__(self, s):
        return empirical_cdf(self, s)


@dataclass(frozen=True)
class KsSeries:
    times: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        d = np.asarray(self.distances, dtype=float)
        if t.shape != d.shape or t.ndim != 1:
            raise ValueError("times and distances must be 1D of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be increasing")
        if np.any((d < 0) | (d > 1)):
            raise ValueError("KS distances lie in [0, 1]")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "distances", d)


def empirical_cdf(e: EmpiricalDistribution, s):
    return np.searchsorted(e.samples, s, side="right") / e.n


def ks_distance(e: EmpiricalDistribution, F: Callable) -> float:
    """sup_s |F_n(s) - F(s)|, evaluated exactly at the jumps of F_n."""
    x = e.samples
    n = e.n
    f = np.asarray(F(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f))))


def ks_series(times, samples_per_time, F: Callable) -> KsSeries:
    d = [ks_distance(EmpiricalDistribution(s), F) for s in samples_per_time]
    return KsSeries(np.asarray(times, dtype=float), np.asarray(d))


def empirical_gap(trial_snapshots, theta: float) -> float:
    """Fraction of configurations with no coordinate in the open interval (-theta, theta)."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    snaps = [np.asarray(t, dtype=float) for t in trial_snapshots]
    if not snaps:
        raise ValueError("no snapshots")
    clear = [not np.any(np.abs(t) < theta) for t in snaps]
    return float(np.mean(clear))


def plateau_level(n_samples: int) -> float:
    """Finite-sample KS noise floor, 1.36/sqrt(n)."""
    return KS_95 / np.sqrt(n_samples)


class DecayFit(NamedTuple):
    rate: float
    intercept: float
    r_squared: float
    points: int


def decay_fit(series: KsSeries, plateau: float) -> DecayFit:
    """Least-squares fit of log D against t over the points with D > 2 * plateau."""
    mask = series.distances > 2.0 * plateau
    if np.count_nonzero(mask) < 4:
        raise InsufficientDecay(f"only {np.count_nonzero(mask)} points above twice the plateau")
    t = series.times[mask]
    y = np.log(series.distances[mask])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(-slope), float(intercept), float(r2), int(t.size))


def smooth(values, width: int = 5) -> np.ndarray:
    """Centred moving average; the window shrinks at the ends."""
    v = np.asarray(values, dtype=float)
    half = width // 2
    c = np.concatenate([[0.0], np.cumsum(v)])
    lo = np.clip(np.arange(v.size) - half, 0, v.size)
    hi = np.clip(np.arange(v.size) + half + 1, 0, v.size)
    return (c[hi] - c[lo]) / (hi - lo)
