import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from irsuplink import sensing
from irsuplink.sensing import (
    DetectorSpec,
    chi_square_cdf,
    chi_square_quantile,
    draw_noise_energy,
    energy_statistic,
    exact_threshold,
    gaussian_threshold,
    regularized_gamma_p,
    regularized_gamma_q,
)


def bisect_quantile(p, dof):
    """Independent oracle: bisection on scipy's regularized incomplete gamma."""
    lo, hi = 0.0, 10.0 * dof + 100.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if special.gammainc(dof / 2, mid / 2) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("a", [0.5, 1.0, 4.0, 64.0, 1024.0])
@pytest.mark.parametrize("x", [1e-3, 0.7, 3.0, 60.0, 1000.0, 1100.0])
def test_incomplete_gamma_against_scipy(a, x):
    assert regularized_gamma_p(a, x) == pytest.approx(special.gammainc(a, x), rel=1e-12, abs=1e-300)
    assert regularized_gamma_q(a, x) == pytest.approx(special.gammaincc(a, x), rel=1e-10, abs=1e-300)


def test_quantile_closed_forms():
    assert chi_square_quantile(0.9, 2) == pytest.approx(-2 * math.log(0.1), rel=1e-12)
    assert chi_square_quantile(0.9, 2) == pytest.approx(4.605170186, rel=1e-9)
    assert chi_square_quantile(0.5, 2) == pytest.approx(1.386294361, rel=1e-9)


def test_quantile_dof256_against_bisection():
    ref = bisect_quantile(0.9, 256)
    assert chi_square_quantile(0.9, 256) == pytest.approx(ref, rel=1e-10)
    # mpmath findroot, 40 digits
    assert chi_square_quantile(0.9, 256) == pytest.approx(285.39266666914095, rel=1e-12)


@pytest.mark.parametrize("dof", [2, 16, 256, 2048])
@pytest.mark.parametrize("p", [0.01, 0.1, 0.5, 0.9, 0.99])
def test_cdf_inverts_quantile(dof, p):
    assert chi_square_cdf(chi_square_quantile(p, dof), dof) == pytest.approx(p, abs=1e-9)


@pytest.mark.parametrize("dof", [1, 3, 100, 10_000, 1_000_000])
@pytest.mark.parametrize("p", [1e-12, 1e-4, 0.3, 0.999, 1 - 1e-12])
def test_quantile_extremes_converge(dof, p):
    assert chi_square_quantile(p, dof) == pytest.approx(stats.chi2.ppf(p, dof), rel=1e-9)


def test_quantile_domain():
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            chi_square_quantile(p, 4)


def test_threshold_examples():
    s2 = 3.7e-14
    assert exact_threshold(s2, 1, 0.1) == pytest.approx(2.302585093 * s2, rel=1e-9)
    assert exact_threshold(s2, 1, 0.5) == pytest.approx(0.693147181 * s2, rel=1e-9)
    assert exact_threshold(1.0, 128, 0.1) == pytest.approx(142.69633333457048, rel=1e-10)
    assert gaussian_threshold(1.0, 128, 0.1) == pytest.approx(142.49910083898917, rel=1e-10)
    assert gaussian_threshold(s2, 128, 0.5) == pytest.approx(128 * s2, rel=1e-15)
    gap = abs(gaussian_threshold(1.0, 128, 0.1) - exact_threshold(1.0, 128, 0.1)) / exact_threshold(1.0, 128, 0.1)
    assert gap < 0.01


def test_threshold_monotonicity_and_gaussian_convergence():
    assert exact_threshold(1.0, 8, 0.1) < exact_threshold(1.0, 9, 0.1) < exact_threshold(1.0, 128, 0.1)
    assert exact_threshold(1.0, 64, 0.2) < exact_threshold(1.0, 64, 0.1) < exact_threshold(1.0, 64, 0.01)
    assert exact_threshold(1.0, 64, 0.1) < exact_threshold(2.0, 64, 0.1)
    gaps = [abs(gaussian_threshold(1, m, 0.1) - exact_threshold(1, m, 0.1)) / exact_threshold(1, m, 0.1)
            for m in (8, 128, 1024)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_detector_spec():
    spec = DetectorSpec.exact(128, 0.1, 2.0)
    assert spec.threshold == pytest.approx(2.0 * 142.69633333457048, rel=1e-10)


def test_energy_statistic():
    assert energy_statistic(np.zeros(16, complex)) == 0.0
    assert energy_statistic(np.exp(1j * np.linspace(0, 3, 128))) == pytest.approx(128.0, rel=1e-14)


def test_direct_draws_match_explicit_samples_in_law():
    rng = np.random.default_rng(21)
    m, s2 = 16, 2.5
    y = (rng.standard_normal((50_000, m)) + 1j * rng.standard_normal((50_000, m))) * math.sqrt(s2 / 2)
    explicit = np.array([energy_statistic(row) for row in y])
    shortcut = draw_noise_energy(rng, m, s2, size=50_000)
    assert explicit.mean() == pytest.approx(m * s2, rel=0.02)
    assert shortcut.mean() == pytest.approx(m * s2, rel=0.02)
    assert stats.ks_2samp(explicit, shortcut).pvalue > 1e-3


def test_noise_energy_mean_and_false_alarm():
    rng = np.random.default_rng(1)
    assert draw_noise_energy(rng, 128, 0.0) == 0.0
    energies = draw_noise_energy(rng, 128, 1e-13, size=100_000)
    assert energies.mean() == pytest.approx(128e-13, rel=0.02)
    rate = np.mean(energies > exact_threshold(1e-13, 128, 0.1))
    assert 0.095 <= rate <= 0.105


@settings(max_examples=200)
@given(st.floats(1e-6, 1 - 1e-6), st.integers(1, 4000))
def test_quantile_cdf_roundtrip_property(p, dof):
    x = chi_square_quantile(p, dof)
    assert chi_square_cdf(x, dof) == pytest.approx(p, abs=1e-9)


def test_nonconvergence_surfaces_as_error(monkeypatch):
    monkeypatch.setattr(sensing, "_MAX_NEWTON", 1)
    with pytest.raises(sensing.NumericalError):
        chi_square_quantile(0.9, 256)
