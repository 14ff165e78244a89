"""Quick self-checks behind ``irsuplink validate``.

Each check returns ``(passed, detail)``. Implementations under test are
injectable so that a deliberately broken one can be shown to fail.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import sensing
from .allocation import ChannelEnergyLedger, assign_channels
from .config import SimConfig, derive_constants
from .fading import complex_normal
from .irs_control import random_phases
from .propagation import irs_terms, mean_reflected_power_oracle

Check = Callable[[], tuple[bool, str]]


def _bisect_quantile(p: float, dof: float, cdf) -> float:
    lo, hi = 0.0, max(1.0, dof)
    while cdf(hi, dof) < p:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid, dof) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def check_quantile(quantile=sensing.chi_square_quantile, cdf=sensing.chi_square_cdf) -> tuple[bool, str]:
    """Closed form at dof 2, and agreement with CDF bisection over a grid."""
    closed = -2.0 * math.log(0.1)
    got = quantile(0.9, 2)
    worst = abs(got - closed) / closed
    for dof in (2, 16, 256, 2048):
        for p in (0.01, 0.1, 0.5, 0.9, 0.99):
            ref = _bisect_quantile(p, dof, cdf)
            worst = max(worst, abs(quantile(p, dof) - ref) / ref)
    return worst < 1e-9, f"max relative error {worst:.2e}"


def check_mean_reflected_power(trials: int = 2000, seed: int = 7) -> tuple[bool, str]:
    """Monte Carlo |h_IRS|^2 against rho^2 * sum(beta12) at the reference geometry."""
    cfg = SimConfig()
    const = derive_constants(cfg)
    rng = np.random.default_rng(seed)
    user = np.array([10.0, -5.0, 1.5])
    phases = random_phases(rng, cfg.num_elements)
    base = irs_terms(user, const.element_positions, const.irs_to_bs_distances,
                     np.ones(cfg.num_elements), np.ones(cfg.num_elements), phases,
                     const.wavelength, const.L0, const.d0, cfg.pathloss_exponent)
    g_kn = complex_normal(rng, (trials, cfg.num_elements))
    g_nb = complex_normal(rng, (trials, cfg.num_elements))
    power = np.abs(cfg.reflection_efficiency * np.sum(base * g_kn * g_nb, axis=1)) ** 2
    oracle = mean_reflected_power_oracle(user, const.element_positions, const.irs_to_bs_distances,
                                         cfg.reflection_efficiency, const.L0, const.d0, cfg.pathloss_exponent)
    rel = abs(power.mean() - oracle) / oracle
    # standard error of the mean is about 1/sqrt(trials) relative; allow ~4 sigma
    return rel < 4.0 / math.sqrt(trials), f"relative gap {rel:.3f} over {trials} draws"


def reference_assignment(energies, powers, threshold, samples):
    """Plain-loop restatement of the first-below-threshold / argmin rule."""
    energies = list(energies)
    out = []
    for p in powers:
        chosen = None
        for c, e in enumerate(energies):
            if e < threshold:
                chosen = c
                break
        if chosen is None:
            chosen = 0
            for c in range(1, len(energies)):
                if energies[c] < energies[chosen]:
                    chosen = c
        out.append(chosen)
        energies[chosen] = energies[chosen] + samples * p
    return out, energies


def check_allocation(instances: int = 1000, seed: int = 11, assign=assign_channels) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for i in range(instances):
        k = int(rng.integers(1, 5))
        c = int(rng.integers(1, 4))
        samples = int(rng.integers(1, 9))
        # coarse integer grids make exact ties and threshold hits common
        energies = rng.integers(0, 20, c).astype(float)
        powers = rng.integers(0, 5, k).astype(float)
        threshold = float(rng.integers(0, 25))
        expected, expected_e = reference_assignment(energies, powers, threshold, samples)
        ledger = ChannelEnergyLedger(energies.copy(), threshold)
        got = assign(ledger, powers, samples)
        if list(got) != expected or list(ledger.energies) != expected_e:
            return False, f"mismatch on instance {i}"
    return True, f"{instances} instances match"


CHECKS: dict[str, Check] = {
    "chi-square quantile": check_quantile,
    "mean reflected power": check_mean_reflected_power,
    "allocation reference": check_allocation,
}


def run_checks(checks: dict[str, Check] | None = None) -> list[tuple[str, bool, str]]:
    results = []
    for name, check in (checks or CHECKS).items():
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
