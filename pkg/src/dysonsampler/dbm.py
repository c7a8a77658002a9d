"""Tamed explicit Euler scheme for Dyson Brownian motion and the trial driver."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import rng as rngmod
from ._kernels import tamed_euler_batch
from .coulomb import NAIVE, CoulombMethod, coulomb_drift
from .initcond import InitSpec
from .potential import QuarticPotential

# steps of noise drawn per generator call; any value gives the same stream
NOISE_BLOCK = 256


class CoulombScaling(str, Enum):
    SDE_CONSISTENT = "sde_consistent"  # (1/N) sum 1/(x_k - x_j), as in the SDE
    PAPER_LITERAL = "paper_literal"  # unscaled sum


class SimulationError(RuntimeError):
    def __init__(self, message, step_index, trial_index=None):
        where = f"step {step_index}" if trial_index is None else f"trial {trial_index}, step {step_index}"
        super().__init__(f"{message} at {where}")
        self.step_index = step_index
        self.trial_index = trial_index


class BlowUp(SimulationError):
    pass


class Collision(SimulationError):
    pass


class EnsembleFailure(RuntimeError):
    def __init__(self, failures):
        self.failures = list(failures)
        lines = "; ".join(str(f) for f in self.failures)
        super().__init__(f"{len(self.failures)} trial(s) failed: {lines}")


@dataclass(frozen=True)
class GasState:
    lam: np.ndarray
    t: float = 0.0
    step_index: int = 0

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("state must be a non-empty 1D vector")
        if not np.all(np.isfinite(lam)):
            raise ValueError("state has non-finite entries")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("state must be strictly increasing")
        lam.flags.writeable = False
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.lam.size


@dataclass(frozen=True)
class SchemeParams:
    dt: float
    beta: float = 2.0
    coulomb_scaling: CoulombScaling = CoulombScaling.SDE_CONSISTENT
    method: CoulombMethod = NAIVE

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "coulomb_scaling", CoulombScaling(self.coulomb_scaling))

    def coulomb_scale(self, n: int) -> float:
        return 1.0 / n if self.coulomb_scaling is CoulombScaling.SDE_CONSISTENT else 1.0

    def noise_scale(self, n: int) -> float:
        return math.sqrt(2.0 * self.dt / (self.beta * n))


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    potential: QuarticPotential
    scheme: SchemeParams
    t_end: float
    trials: int = 1
    init: InitSpec = InitSpec()
    snapshot_times: tuple = ()
    master_seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t_end < 0 or not math.isfinite(self.t_end):
            raise ValueError("t_end must be finite and >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        times = tuple(float(t) for t in self.snapshot_times) or (float(self.t_end),)
        if any(t < 0 or t > self.t_end for t in times):
            raise ValueError("snapshot times must lie in [0, t_end]")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot times must be non-decreasing")
        object.__setattr__(self, "snapshot_times", times)

    @property
    def n_steps(self) -> int:
        return _steps_for(self.t_end, self.scheme.dt, ceil=True)

    @property
    def snapshot_steps(self) -> list[int]:
        return [_steps_for(t, self.scheme.dt, ceil=False) for t in self.snapshot_times]


def _steps_for(t, dt, ceil):
    # tolerance absorbs roundoff in t/dt for times that are exact multiples of dt
    ratio = t / dt
    if ceil:
        return max(0, math.ceil(ratio - 1e-9))
    return max(0, math.floor(ratio + 1e-9))


def _advance(lam, noise, potential, params):
    """Advance every row of ``lam`` one step. Returns (new rows, status per row)."""
    m, n = lam.shape
    out = np.empty_like(lam)
    status = np.zeros(m, dtype=np.int64)
    cs = params.coulomb_scale(n)
    ns = params.noise_scale(n)
    if params.method.kind == "naive":
        tamed_euler_batch(lam, noise, potential.q, potential.g, params.dt, cs, ns, out, status)
        return out, status
    for r in range(m):
        row = lam[r]
        drift = cs * coulomb_drift(row, params.method) + potential.tamed_drift(row, params.dt)
        new = np.sort(row + drift * params.dt + ns * noise[r])
        if not np.all(np.isfinite(new)):
            status[r] = 1
        elif np.any(np.diff(new) == 0):
            status[r] = 2
        out[r] = new
    return out, status


def _raise_for(code, step_index, trial_index=None):
    if code == 1:
        raise BlowUp("non-finite coordinate", step_index, trial_index)
    raise Collision("coincident coordinates", step_index, trial_index)


def step(state: GasState, potential: QuarticPotential, params: SchemeParams, noise) -> GasState:
    """One tamed Euler step driven by the given standard-normal ``noise``."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (state.n,):
        raise ValueError(f"noise must have shape ({state.n},)")
    out, status = _advance(state.lam[None, :].copy(), noise[None, :], potential, params)
    if status[0]:
        _raise_for(status[0], state.step_index + 1)
    return GasState(out[0], state.t + params.dt, state.step_index + 1)


def euler_step(state: GasState, potential: QuarticPotential, params: SchemeParams, noise) -> GasState:
    """Untamed explicit Euler step, kept as a reference for the tamed scheme."""
    noise = np.asarray(noise, dtype=float)
    n = state.n
    drift = params.coulomb_scale(n) * coulomb_drift(state.lam, params.method) - 0.5 * potential.derivative(state.lam)
    new = np.sort(state.lam + drift * params.dt + params.noise_scale(n) * noise)
    return GasState(new, state.t + params.dt, state.step_index + 1)


@dataclass
class _TrialBatch:
    """Trials advanced in lock-step; every trial keeps its own noise stream."""

    config: SimulationConfig
    trial_indices: list
    snapshots: np.ndarray = field(init=False)
    failures: list = field(default_factory=list)

    def run(self):
        cfg = self.config
        n = cfg.n
        idx = list(self.trial_indices)
        snap_steps = cfg.snapshot_steps
        self.snapshots = np.full((len(snap_steps), len(idx), n), np.nan)
        lam = np.empty((len(idx), n))
        for r, i in enumerate(idx):
            g = rngmod.trial_generator(cfg.master_seed, i, rngmod.INIT)
            lam[r] = cfg.init.sample(n, cfg.scheme.beta, g)
        gens = [rngmod.trial_generator(cfg.master_seed, i, rngmod.NOISE) for i in idx]
        rows = np.arange(len(idx))  # positions of live trials within the batch
        total = cfg.n_steps
        self._record(0, lam, rows, snap_steps)
        block = None
        for s in range(total):
            if s % NOISE_BLOCK == 0:
                nb = min(NOISE_BLOCK, total - s)
                block = np.stack([g.standard_normal((nb, n)) for g in gens], axis=0)
            noise = np.ascontiguousarray(block[:, s % NOISE_BLOCK, :])
            lam, status = _advance(lam, noise, cfg.potential, cfg.scheme)
            if np.any(status):
                keep = status == 0
                for r in np.flatnonzero(~keep):
                    err = BlowUp if status[r] == 1 else Collision
                    msg = "non-finite coordinate" if status[r] == 1 else "coincident coordinates"
                    self.failures.append(err(msg, s + 1, idx[rows[r]]))
                lam, rows, block = lam[keep], rows[keep], block[keep]
                gens = [g for g, k in zip(gens, keep) if k]
                if rows.size == 0:
                    break
            self._record(s + 1, lam, rows, snap_steps)
        return self

    def _record(self, step_index, lam, rows, snap_steps):
        for j, ss in enumerate(snap_steps):
            if ss == step_index:
                self.snapshots[j, rows] = lam


def run_trial(config: SimulationConfig, trial_index: int) -> list[tuple[float, GasState]]:
    """Run one trial and return ``(requested_time, state)`` per snapshot."""
    batch = _TrialBatch(config, [trial_index]).run()
    if batch.failures:
        raise batch.failures[0]
    dt = config.scheme.dt
    return [
        (t, GasState(batch.snapshots[j, 0], ss * dt, ss))
        for j, (t, ss) in enumerate(zip(config.snapshot_times, config.snapshot_steps))
    ]


@dataclass
class EnsembleResult:
    times: tuple
    snapshots: np.ndarray  # (snapshot, trial, particle), trials in index order

    @property
    def pooled(self) -> list[np.ndarray]:
        """Sorted N*M samples per snapshot."""
        return [np.sort(s.ravel()) for s in self.snapshots]

    @property
    def trial_moments(self) -> np.ndarray:
        """Per-snapshot, per-trial (mean, mean square) of the coordinates."""
        return np.stack([self.snapshots.mean(axis=2), (self.snapshots**2).mean(axis=2)], axis=-1)


def _chunks(seq, k):
    k = max(1, min(k, len(seq)))
    size = math.ceil(len(seq) / k)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def run_ensemble(config: SimulationConfig, threads: int = 1) -> EnsembleResult:
    """Run ``config.trials`` independent trials, optionally on a thread pool.

    Output is independent of ``threads``: trial streams are keyed by trial
    index and results are reassembled in index order.
    """
    indices = list(range(config.trials))
    parts = _chunks(indices, threads)
    if len(parts) == 1:
        batches = [_TrialBatch(config, parts[0]).run()]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            batches = list(pool.map(lambda p: _TrialBatch(config, p).run(), parts))
    failures = [f for b in batches for f in b.failures]
    if failures:
        raise EnsembleFailure(sorted(failures, key=lambda f: f.trial_index))
    snaps = np.concatenate([b.snapshots for b in batches], axis=1)
    return EnsembleResult(config.snapshot_times, snaps)
