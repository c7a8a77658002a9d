"""Orthonormal polynomials for the weight exp(-N V(s)) and the finite-N kernel.

Everything is carried in the orthonormal, weight-damped basis
psi_k(s) = exp(-N V(s)/2) p_k(s); monic polynomials and their norms are
never formed because the norms overflow long before N = 30.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .potential import QuarticPotential

# exp(-750) is below the smallest normal double
TAIL_EXPONENT = 750.0
PANEL_ORDER = 32
MAX_NODES = 1 << 20
REL_TOL = 1e-12

CDF_PANELS = 128
CDF_ORDER = 24


class NonConvergence(RuntimeError):
    pass


class PrecisionLossWarning(RuntimeWarning):
    pass


def truncation_radius(p: QuarticPotential, n_matrix: int) -> float:
    """Smallest L with n_matrix * V(L) >= TAIL_EXPONENT."""
    c = TAIL_EXPONENT / n_matrix
    # (g/4) y^2 + (q/2) y - c = 0 in y = L^2, written without cancellation
    y = 2.0 * c / (0.5 * p.q + math.sqrt(0.25 * p.q * p.q + p.g * c))
    return math.sqrt(y)


def composite_gauss_legendre(a: float, b: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _stieltjes(nodes, weights, k_max):
    """Recurrence coefficients of the discrete measure sum_i weights_i delta(nodes_i).

    Returns (alpha[0..k_max], beta[0..k_max], orthogonality defect).
    """
    alpha = np.zeros(k_max + 1)
    beta = np.zeros(k_max + 1)
    beta[0] = weights.sum()
    p_prev = np.zeros_like(nodes)
    p = np.full_like(nodes, 1.0 / math.sqrt(beta[0]))
    basis = [p]
    for k in range(k_max + 1):
        wp = weights * p
        alpha[k] = np.dot(wp, nodes * p)
        if k == k_max:
            break
        r = (nodes - alpha[k]) * p - math.sqrt(beta[k]) * p_prev if k else (nodes - alpha[k]) * p
        beta[k + 1] = np.dot(weights, r * r)
        if not beta[k + 1] > 0:
            raise NonConvergence(f"recurrence broke down at k={k + 1}")
        p_prev, p = p, r / math.sqrt(beta[k + 1])
        basis.append(p)
    P = np.array(basis)
    gram = (P * weights) @ P.T
    defect = float(np.max(np.abs(gram - np.eye(len(basis)))))
    return alpha, beta, defect


@dataclass(frozen=True)
class RecurrenceTable:
    """Three-term recurrence sqrt(b_{k+1}) p_{k+1} = (s - a_k) p_k - sqrt(b_k) p_{k-1}.

    ``beta[0]`` is the total mass of exp(-n_matrix V); the squared monic norm
    c_k^2 equals beta[0] * ... * beta[k] (see :meth:`log_norm_sq`).
    """

    n_matrix: int
    potential: QuarticPotential
    alpha: np.ndarray
    beta: np.ndarray
    k_max: int
    radius: float
    nodes_used: int = 0
    warnings: tuple = field(default=())

    def log_norm_sq(self, k: int) -> float:
        return float(np.sum(np.log(self.beta[: k + 1])))

    def weight_sqrt(self, s):
        # V overflows to inf far out, where the weight is exactly 0
        with np.errstate(over="ignore"):
            return np.exp(-0.5 * self.n_matrix * self.potential.value(s))

    @cached_property
    def _cdf_grid(self):
        edges = np.linspace(-self.radius, self.radius, CDF_PANELS + 1)
        x, w = np.polynomial.legendre.leggauss(CDF_ORDER)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = mid[:, None] + half[:, None] * x
        dens = density_diag(self, nodes.ravel()).reshape(nodes.shape)
        panel_mass = (dens * (half[:, None] * w)).sum(axis=1)
        cum = np.concatenate([[0.0], np.cumsum(panel_mass)])
        return edges, cum


def compute_recurrence(p: QuarticPotential, n_matrix: int, k_max: int | None = None,
                       panels: int = 8) -> RecurrenceTable:
    """Stieltjes procedure on a composite Gauss-Legendre discretisation of exp(-n V).

    The panel count doubles until every coefficient up to ``k_max`` moves by
    less than REL_TOL (relative to its own size for beta, to sqrt(beta) for alpha).
    """
    if n_matrix < 1:
        raise ValueError("n_matrix must be >= 1")
    if k_max is None:
        k_max = n_matrix
    if k_max < n_matrix:
        raise ValueError("k_max must be >= n_matrix")
    L = truncation_radius(p, n_matrix)

    def discretise(npan):
        x, w = composite_gauss_legendre(-L, L, npan, PANEL_ORDER)
        return _stieltjes(x, w * np.exp(-n_matrix * p.value(x)), k_max)

    alpha, beta, defect = discretise(panels)
    while True:
        panels *= 2
        if panels * PANEL_ORDER > MAX_NODES:
            raise NonConvergence(f"no convergence with {MAX_NODES} nodes")
        a2, b2, defect = discretise(panels)
        da = np.abs(a2 - alpha) <= REL_TOL * np.sqrt(b2)
        db = np.abs(b2 - beta) <= REL_TOL * b2
        alpha, beta = a2, b2
        if np.all(da) and np.all(db):
            break
    notes = []
    if defect > 1e-10:
        msg = f"orthogonality defect {defect:.1e}: more than 6 digits lost"
        warnings.warn(msg, PrecisionLossWarning, stacklevel=2)
        notes.append(msg)
    return RecurrenceTable(n_matrix, p, alpha, beta, k_max, L, panels * PANEL_ORDER, tuple(notes))


def phi_all(table: RecurrenceTable, s, count: int | None = None) -> np.ndarray:
    """Array of phi_0(s), ..., phi_{count-1}(s), shape (count, *s.shape)."""
    if count is None:
        count = table.n_matrix
    if count > table.k_max + 1:
        raise ValueError("table too short for requested functions")
    s = np.asarray(s, dtype=float)
    out = np.empty((count,) + s.shape)
    prev = np.zeros_like(s)
    cur = table.weight_sqrt(s) / math.sqrt(table.beta[0])
    for k in range(count):
        out[k] = cur
        if k + 1 < count:
            nxt = ((s - table.alpha[k]) * cur - math.sqrt(table.beta[k]) * prev) / math.sqrt(table.beta[k + 1])
            prev, cur = cur, nxt
    return out


def phi(table: RecurrenceTable, k: int, s):
    if k < 0 or k > table.k_max:
        raise ValueError(f"k must be in [0, {table.k_max}]")
    return phi_all(table, s, k + 1)[k]


def kernel(table: RecurrenceTable, r, s):
    """K_N(r, s) = sum_{k<N} phi_k(r) phi_k(s), broadcasting r against s."""
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    return np.sum(phi_all(table, r) * phi_all(table, s), axis=0)


def kernel_matrix(table: RecurrenceTable, x, y=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    px = phi_all(table, x)
    py = px if y is None else phi_all(table, np.asarray(y, dtype=float))
    return px.T @ py


def density_diag(table: RecurrenceTable, s):
    """K_N(s, s); integrates to N."""
    return np.sum(phi_all(table, s) ** 2, axis=0)


def finite_cdf(table: RecurrenceTable, s):
    """F_N(s) = (1/N) int_{-inf}^s K_N(u, u) du, by panelled Gauss-Legendre."""
    s = np.asarray(s, dtype=float)
    edges, cum = table._cdf_grid
    sc = np.clip(s, edges[0], edges[-1])
    j = np.clip(np.searchsorted(edges, sc, side="right") - 1, 0, CDF_PANELS - 1)
    x, w = np.polynomial.legendre.leggauss(CDF_ORDER)
    left = edges[j]
    half = 0.5 * (sc - left)
    nodes = left[..., None] + half[..., None] * (x + 1.0)
    partial = half * (density_diag(table, nodes.reshape(-1)).reshape(nodes.shape) @ w)
    val = (cum[j] + partial) / table.n_matrix
    return np.clip(val, 0.0, 1.0)


def correlation(table: RecurrenceTable, points) -> float:
    """m-point correlation ((N-m)!/N!) det[K_N(x_j, x_k)]."""
    x = np.atleast_1d(np.asarray(points, dtype=float))
    m = x.size
    n = table.n_matrix
    if m > n:
        raise ValueError("at most N points")
    det = np.linalg.det(kernel_matrix(table, x))
    factor = math.exp(math.lgamma(n - m + 1) - math.lgamma(n + 1))
    return max(0.0, float(det) * factor)
