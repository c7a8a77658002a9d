"""Haar unitary sampling and assembly of invariant-ensemble Hermitian matrices."""
from __future__ import annotations

import io

import numpy as np

from . import rng as rngmod
from .dbm import SimulationConfig, run_ensemble, run_trial

UNITARY_TOL = 1e-8


def householder_qr(a: np.ndarray):
    """Complex Householder QR. Returns (Q, R) with R upper triangular.

    The reflector for column j maps x to alpha e_1 with
    alpha = -exp(i arg x_0) |x|, so diag(R) is generally complex.
    """
    r = np.array(a, dtype=complex)
    n, m = r.shape
    q = np.eye(n, dtype=complex)
    for j in range(min(n - 1, m)):
        x = r[j:, j]
        norm = np.linalg.norm(x)
        if norm == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        r[j:, j:] -= 2.0 * np.outer(v, v.conj() @ r[j:, j:])
        q[:, j:] -= 2.0 * np.outer(q[:, j:] @ v, v.conj())
        r[j + 1:, j] = 0.0
    return q, np.triu(r)


def ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix of independent standard complex Gaussians (E|z|^2 = 1)."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def sample_haar_unitary(n: int, rng: np.random.Generator, phase_correction: bool = True) -> np.ndarray:
    """Haar-distributed element of U(n): QR of a Ginibre matrix, then Q diag(R_jj/|R_jj|).

    ``phase_correction=False`` returns the raw Q factor, which is *not*
    Haar distributed; it exists only to demonstrate that fact.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q, r = householder_qr(ginibre(n, rng))
    d = np.diagonal(r)
    if np.any(d == 0):
        raise RuntimeError("singular Gaussian matrix; the random source is broken")
    if not phase_correction:
        return q
    return q * (d / np.abs(d))[None, :]


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> float:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square matrix")
    err = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
    if err > tol:
        raise ValueError(f"matrix is not unitary: |UU* - I|_max = {err:.2e}")
    return err


def assemble_matrix(lam, u: np.ndarray) -> np.ndarray:
    """Hermitian matrix U diag(lam) U*."""
    lam = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise ValueError("eigenvalues must be finite")
    if u.shape != (lam.size, lam.size):
        raise ValueError("dimension mismatch between eigenvalues and U")
    check_unitary(u)
    m = (u * lam[None, :]) @ u.conj().T
    return 0.5 * (m + m.conj().T)


def _require_beta2(config: SimulationConfig):
    if config.scheme.beta != 2:
        raise ValueError(
            f"matrix assembly needs beta = 2 (Hermitian eigenvalue law); got beta = {config.scheme.beta}")


def sample_invariant_matrix(config: SimulationConfig, rng: np.random.Generator | None = None,
                            trial_index: int = 0) -> np.ndarray:
    """Run one trial to t_end and rotate its final configuration by an independent Haar U."""
    _require_beta2(config)
    final = run_trial(config, trial_index)[-1][1]
    if rng is None:
        rng = rngmod.trial_generator(config.master_seed, trial_index, rngmod.HAAR)
    return assemble_matrix(final.lam, sample_haar_unitary(config.n, rng))


def sample_invariant_matrices(config: SimulationConfig, count: int, threads: int = 1) -> list[np.ndarray]:
    """``count`` matrices; matrix i equals ``sample_invariant_matrix(config, trial_index=i)``."""
    _require_beta2(config)
    if count == 0:
        return []
    cfg = SimulationConfig(config.n, config.potential, config.scheme, config.t_end, count,
                           config.init, (config.t_end,), config.master_seed)
    finals = run_ensemble(cfg, threads=threads).snapshots[-1]
    out = []
    for i, lam in enumerate(finals):
        g = rngmod.trial_generator(config.master_seed, i, rngmod.HAAR)
        out.append(assemble_matrix(lam, sample_haar_unitary(config.n, g)))
    return out


def format_matrix(m: np.ndarray) -> str:
    """Text form: ``N <dim>`` then one ``row col real imag`` line per entry (0-based, row-major)."""
    n = m.shape[0]
    buf = io.StringIO()
    buf.write(f"N {n}\n")
    for i in range(n):
        for j in range(n):
            z = m[i, j]
            buf.write(f"{i} {j} {z.real:.17g} {z.imag:.17g}\n")
    return buf.getvalue()


def parse_matrix(text: str) -> np.ndarray:
    lines = text.strip().splitlines()
    head = lines[0].split()
    if len(head) != 2 or head[0] != "N":
        raise ValueError("matrix file must start with 'N <dim>'")
    n = int(head[1])
    if len(lines) != 1 + n * n:
        raise ValueError(f"expected {n * n} entries, found {len(lines) - 1}")
    m = np.empty((n, n), dtype=complex)
    for line in lines[1:]:
        i, j, re, im = line.split()
        m[int(i), int(j)] = complex(float(re), float(im))
    return m
