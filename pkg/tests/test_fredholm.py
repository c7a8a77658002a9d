import numpy as np
import pytest
from scipy.integrate import quad

from dysonsampler import fredholm
from dysonsampler.equilibrium import edge
from dysonsampler.fredholm import GapQuery, InsufficientPrecision, gap_curve, gap_probability, nystrom_determinant
from dysonsampler.orthopoly import compute_recurrence, phi
from dysonsampler.potential import QuarticPotential

PURE = QuarticPotential(0, 1)


@pytest.fixture(scope="module")
def table20():
    return compute_recurrence(PURE, 20)


def test_empty_interval(table20):
    assert gap_probability(table20, GapQuery(1e-12)) == pytest.approx(1.0, abs=1e-10)


def test_whole_support(table20):
    assert 2 * edge(PURE) < 3
    assert gap_probability(table20, GapQuery(3.0)) < 1e-6


@pytest.mark.parametrize("theta", [0.05, 0.1, 0.2])
def test_self_convergence(table20, theta):
    assert abs(nystrom_determinant(table20, theta, 40) - nystrom_determinant(table20, theta, 80)) < 1e-10


def test_gram_determinant_oracle():
    # det(I - K) on (-t, t) equals det(I_N - G) with G_jk = int_{-t}^{t} phi_j phi_k
    n, theta = 4, 0.6
    t = compute_recurrence(QuarticPotential(1, 1), n)
    g = np.array([[quad(lambda s: phi(t, j, s) * phi(t, k, s), -theta, theta, epsabs=1e-14)[0]
                   for k in range(n)] for j in range(n)])
    assert gap_probability(t, GapQuery(theta)) == pytest.approx(np.linalg.det(np.eye(n) - g), abs=1e-12)


def test_geometric_convergence(table20):
    for theta in [0.2, 0.5, 1.0]:
        ref = nystrom_determinant(table20, theta, 160)
        errs = [abs(nystrom_determinant(table20, theta, m) - ref) for m in (10, 20, 40, 80)]
        for a, b in zip(errs, errs[1:]):
            assert b <= 0.5 * a or b < 1e-14


def test_curve_monotone_and_bounded(table20):
    thetas = np.linspace(2 * edge(PURE) / 50, 2 * edge(PURE), 50)
    vals = gap_curve(table20, thetas)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.all(np.diff(vals) <= 1e-10)
    assert gap_curve(table20, [0.1])[0] == gap_probability(table20, GapQuery(0.1))


def test_insufficient_precision(table20, monkeypatch):
    with pytest.raises(InsufficientPrecision):
        gap_probability(table20, GapQuery(1.0, quad_order=4))
    monkeypatch.setattr(fredholm, "nystrom_determinant", lambda *a: 1.5)
    with pytest.raises(InsufficientPrecision):
        gap_probability(table20, GapQuery(0.1), check=False)


def test_query_validation(table20):
    with pytest.raises(ValueError):
        GapQuery(0.0)
    with pytest.raises(ValueError):
        GapQuery(0.1, quad_order=3)
    with pytest.raises(ValueError):
        gap_curve(table20, [0.2, 0.1])
