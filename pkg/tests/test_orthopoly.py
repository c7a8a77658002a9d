import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from dysonsampler import orthopoly
from dysonsampler.equilibrium import cdf
from dysonsampler.orthopoly import (NonConvergence, compute_recurrence, correlation, density_diag,
                                    finite_cdf, kernel, phi, phi_all)
from dysonsampler.potential import QuarticPotential

GAUSS = QuarticPotential(1, 0)
QUARTIC = QuarticPotential(1, 1)
PURE = QuarticPotential(0, 1)


def fine_grid(table, nodes=4000):
    # independent dense quadrature over the truncated line
    x, w = np.polynomial.legendre.leggauss(nodes)
    return table.radius * x, table.radius * w


@pytest.mark.parametrize("n", [1, 2, 6, 20, 30])
def test_hermite_oracle(n):
    t = compute_recurrence(GAUSS, n, k_max=2 * n)
    k = np.arange(1, 2 * n + 1)
    assert np.max(np.abs(t.alpha)) < 1e-10
    np.testing.assert_allclose(t.beta[1:], k / n, atol=1e-10)
    assert t.beta[0] == pytest.approx(math.sqrt(2 * math.pi / n), rel=1e-12)


@pytest.mark.parametrize("p", [QUARTIC, PURE, QuarticPotential(1, 10)])
def test_even_potentials_have_zero_alpha(p):
    t = compute_recurrence(p, 12)
    assert np.max(np.abs(t.alpha)) < 1e-12 * np.sqrt(np.max(t.beta[1:]))
    assert np.all(t.beta > 0)


def test_self_convergence():
    a = compute_recurrence(QUARTIC, 6)
    b = compute_recurrence(QUARTIC, 6, panels=4 * a.nodes_used // orthopoly.PANEL_ORDER)
    assert b.nodes_used > a.nodes_used
    assert abs(a.beta[1] - b.beta[1]) < 1e-12 * b.beta[1]
    np.testing.assert_allclose(a.beta, b.beta, rtol=1e-12)


def test_nonconvergence_cap(monkeypatch):
    monkeypatch.setattr(orthopoly, "MAX_NODES", 300)
    with pytest.raises(NonConvergence):
        compute_recurrence(QUARTIC, 10)


def test_k_max_precondition():
    with pytest.raises(ValueError):
        compute_recurrence(QUARTIC, 10, k_max=5)


def test_quartic_log_norm_consistent():
    t = compute_recurrence(QUARTIC, 5)
    # c_1^2 = int s^2 e^{-nV} by monic normalisation pi_1(s) = s
    f = lambda s: s * s * math.exp(-5 * QUARTIC.value(s))
    assert math.exp(t.log_norm_sq(1)) == pytest.approx(quad(f, -10, 10, epsabs=0, epsrel=1e-13)[0], rel=1e-10)


@pytest.mark.parametrize("p,n", [(QUARTIC, 6), (PURE, 20), (GAUSS, 30)])
def test_orthonormality(p, n):
    t = compute_recurrence(p, n)
    x, w = fine_grid(t)
    ph = phi_all(t, x)
    gram = (ph * w) @ ph.T
    np.testing.assert_allclose(gram, np.eye(n), atol=1e-8)


def test_phi0_gaussian_value():
    t = compute_recurrence(GAUSS, 2)
    assert phi(t, 0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-12)
    assert phi(t, 0, 0.0) == pytest.approx(0.7511255444649425, rel=1e-12)


def test_phi_finite_everywhere():
    t = compute_recurrence(QUARTIC, 20)
    s = np.array([-1e300, -1e10, -50.0, 0.0, 50.0, 1e10, 1e300])
    assert np.all(np.isfinite(phi_all(t, s)))
    with pytest.raises(ValueError):
        phi(t, t.k_max + 1, 0.0)


@pytest.mark.parametrize("p", [QUARTIC, PURE])
@pytest.mark.parametrize("n", [6, 20, 30])
def test_trace_identity(p, n):
    t = compute_recurrence(p, n)
    x, w = fine_grid(t)
    assert abs(np.sum(w * density_diag(t, x)) - n) < 1e-8


def test_kernel_symmetry_and_reproducing(rng):
    t = compute_recurrence(PURE, 8)
    r, s = rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10)
    assert np.array_equal(kernel(t, r, s), kernel(t, s, r))
    x, w = fine_grid(t)
    for ri, si in zip(r, s):
        repro = np.sum(w * kernel(t, ri, x) * kernel(t, x, si))
        assert repro == pytest.approx(kernel(t, ri, si), abs=1e-6)
    assert np.all(density_diag(t, np.linspace(-3, 3, 101)) >= 0)


@pytest.mark.parametrize("p", [GAUSS, QUARTIC, PURE])
def test_finite_cdf_limits(p):
    t = compute_recurrence(p, 10)
    assert finite_cdf(t, 1e6) == pytest.approx(1.0, abs=1e-9)
    assert finite_cdf(t, -1e6) == pytest.approx(0.0, abs=1e-9)
    assert finite_cdf(t, 0.0) == pytest.approx(0.5, abs=1e-9)
    s = np.linspace(-3, 3, 601)
    assert np.all(np.diff(finite_cdf(t, s)) >= -1e-15)


def test_finite_cdf_against_quad():
    t = compute_recurrence(PURE, 6)
    for s in [-0.9, -0.2, 0.4, 1.1]:
        ref, _ = quad(lambda u: float(density_diag(t, u)) / 6, -t.radius, s, epsabs=1e-13, limit=400)
        assert finite_cdf(t, s) == pytest.approx(ref, abs=1e-9)


def test_finite_vs_limiting_gap_n30():
    t = compute_recurrence(QUARTIC, 30)
    s = np.linspace(-2, 2, 8001)
    gap = np.max(np.abs(finite_cdf(t, s) - cdf(QUARTIC, s)))
    assert 2e-4 <= gap <= 5e-3


def test_correlation_examples(rng):
    t = compute_recurrence(QUARTIC, 5)
    for x in [-0.7, 0.0, 0.3]:
        assert correlation(t, [x]) == pytest.approx(kernel(t, x, x) / 5, rel=1e-12)
    assert correlation(t, [0.2, 0.2]) == pytest.approx(0.0, abs=1e-14)
    t2 = compute_recurrence(QUARTIC, 2)
    for x, y in rng.uniform(-1.5, 1.5, (100, 2)):
        kxx, kyy, kxy = kernel(t2, x, x), kernel(t2, y, y), kernel(t2, x, y)
        val = correlation(t2, [x, y])
        assert val >= 0
        assert val == pytest.approx((kxx * kyy - kxy**2) / 2, rel=1e-9, abs=1e-15)
    with pytest.raises(ValueError):
        correlation(t2, [0.0, 0.1, 0.2])


def test_two_point_correlation_normalised():
    # with the (N-m)!/N! convention rho_2 integrates to one
    t = compute_recurrence(PURE, 3)
    x, w = np.polynomial.legendre.leggauss(120)
    x, w = 2.5 * x, 2.5 * w
    total = sum(wi * wj * correlation(t, [xi, xj]) for xi, wi in zip(x, w) for xj, wj in zip(x, w))
    assert total == pytest.approx(1.0, abs=1e-8)


def test_no_precision_warning_for_paper_sizes():
    with warnings.catch_warnings():
        warnings.simplefilter("error", orthopoly.PrecisionLossWarning)
        for p in [QUARTIC, PURE]:
            assert compute_recurrence(p, 30).warnings == ()
