"""Energy detection: test statistic, noise-only draws and chi-square thresholds.

Under noise only, ``2 T / sigma^2`` is chi-square with ``2M`` degrees of
freedom, so the threshold for a false-alarm target is a chi-square
quantile. The regularized incomplete gamma function and its inverse are
computed here rather than borrowed, since threshold accuracy is gated.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

_EPS = sys.float_info.epsilon
_TINY = 1e-300
_MAX_SERIES_TERMS = 100_000
_MAX_CF_TERMS = 100_000
_MAX_NEWTON = 200


class NumericalError(ArithmeticError):
    pass


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _gamma_p_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_SERIES_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(_log_prefactor(a, x))
    raise NumericalError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_CF_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise NumericalError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x)."""
    if a <= 0:
        raise ValueError(f"shape must be positive, got {a}")
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x), without cancellation."""
    if a <= 0:
        raise ValueError(f"shape must be positive, got {a}")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def chi_square_cdf(x: float, dof: float) -> float:
    return regularized_gamma_p(dof / 2.0, x / 2.0)


def chi_square_sf(x: float, dof: float) -> float:
    return regularized_gamma_q(dof / 2.0, x / 2.0)


def chi_square_pdf(x: float, dof: float) -> float:
    if x <= 0:
        return 0.0
    a = dof / 2.0
    return 0.5 * math.exp((a - 1.0) * math.log(x / 2.0) - x / 2.0 - math.lgamma(a))


def normal_quantile(p: float) -> float:
    return NormalDist().inv_cdf(p)


def _initial_guess(p: float, dof: float) -> float:
    # Wilson-Hilferty; falls back to the small-x power law when it goes non-positive
    h = 2.0 / (9.0 * dof)
    x0 = dof * (1.0 - h + normal_quantile(p) * math.sqrt(h)) ** 3
    if x0 <= 0.0:
        a = dof / 2.0
        x0 = 2.0 * math.exp((math.log(p) + math.lgamma(a + 1.0)) / a)
    return x0


def chi_square_quantile(p: float, dof: float) -> float:
    """x such that the chi-square CDF with ``dof`` degrees of freedom equals p.

    Newton iteration from a Wilson-Hilferty start, kept inside a shrinking
    bracket. Works on the smaller tail so that p near 1 keeps full accuracy.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if dof <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    upper = p > 0.5
    target = 1.0 - p if upper else p

    def residual(x: float) -> float:
        # increasing in x in both branches
        return target - chi_square_sf(x, dof) if upper else chi_square_cdf(x, dof) - target

    lo, hi = 0.0, math.inf
    x = _initial_guess(p, dof)
    for _ in range(_MAX_NEWTON):
        f = residual(x)
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        pdf = chi_square_pdf(x, dof)
        step = f / pdf if pdf > 0.0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * max(x, 1.0)
        if abs(x_new - x) <= 4.0 * _EPS * x_new:
            return x_new
        x = x_new
    raise NumericalError(f"chi-square quantile did not converge (p={p}, dof={dof})")


def exact_threshold(noise_power: float, samples: int, pfa: float) -> float:
    return 0.5 * noise_power * chi_square_quantile(1.0 - pfa, 2 * samples)


def gaussian_threshold(noise_power: float, samples: int, pfa: float) -> float:
    return noise_power * (samples + math.sqrt(samples) * normal_quantile(1.0 - pfa))


@dataclass(frozen=True)
class DetectorSpec:
    samples: int
    target_pfa: float
    noise_power: float
    threshold: float

    @classmethod
    def exact(cls, samples: int, target_pfa: float, noise_power: float) -> "DetectorSpec":
        return cls(samples, target_pfa, noise_power, exact_threshold(noise_power, samples, target_pfa))


def energy_statistic(samples) -> float:
    y = np.asarray(samples)
    return float(np.sum(y.real**2 + y.imag**2))


def draw_noise_energy(rng: np.random.Generator, samples: int, noise_power: float, size: int | None = None):
    """Noise-only energy: (sigma^2 / 2) times a sum of 2M squared standard normals.

    Same law as summing |y|^2 over M draws of CN(0, sigma^2).
    """
    n = 1 if size is None else size
    z = rng.standard_normal((n, 2 * samples))
    energy = 0.5 * noise_power * np.sum(z * z, axis=1)
    return float(energy[0]) if size is None else energy
