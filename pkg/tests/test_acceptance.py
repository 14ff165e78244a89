"""Exit criteria for the build. Each test records one PASS/FAIL line, shown in the terminal summary."""

import functools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from irsuplink.allocation import ChannelEnergyLedger, assign_channels, init_channel_energies
from irsuplink.config import SimConfig, derive_constants, element_grid
from irsuplink.engine import run_batch, run_simulation
from irsuplink.fading import complex_normal
from irsuplink.irs_control import quantization_levels, quantize_phases
from irsuplink.metrics import avg_sinr_db
from irsuplink.mobility import NodeKinematics, step_kinematics
from irsuplink.propagation import compose_irs, mean_reflected_power_oracle
from irsuplink.report import bundle
from irsuplink.scheduler import priority_weights, sampling_probs
from irsuplink.sensing import (
    chi_square_cdf,
    chi_square_quantile,
    draw_noise_energy,
    exact_threshold,
    gaussian_threshold,
)

REFERENCE_SUM_RATE_BPS = 42.47e6


@pytest.mark.slow
def test_c1_energy_detector_calibration(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    trials = 100_000
    lines, ok = [], True
    for samples, pfa in ((128, 0.1), (8, 0.1), (128, 0.01)):
        gamma = exact_threshold(1.0, samples, pfa)
        rate = float(np.mean(draw_noise_energy(rng, samples, 1.0, size=trials) > gamma))
        sd = math.sqrt(pfa * (1 - pfa) / trials)
        within = abs(rate - pfa) <= 3 * sd
        if (samples, pfa) == (128, 0.1):
            within = within and 0.095 <= rate <= 0.105
        ok &= within
        lines.append(f"M={samples},Pfa={pfa}: {rate:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10.0
    acceptance(1, "energy-detector false-alarm calibration", ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert ok


def test_c2_quantile_numerics(acceptance):
    closed = chi_square_quantile(0.9, 2)
    rel_closed = abs(closed - 4.605170186) / 4.605170186
    exact_closed = abs(closed + 2 * math.log(0.1)) / closed
    worst = 0.0
    for dof in (2, 16, 256, 2048):
        for p in (0.01, 0.1, 0.5, 0.9, 0.99):
            worst = max(worst, abs(chi_square_cdf(chi_square_quantile(p, dof), dof) - p))
            # independent CDF implementation as a second reference
            worst = max(worst, abs(special.gammainc(dof / 2, chi_square_quantile(p, dof) / 2) - p))
    ex, ga = exact_threshold(1.0, 128, 0.1), gaussian_threshold(1.0, 128, 0.1)
    gap = abs(ga - ex) / ex
    ok = rel_closed < 1e-9 and exact_closed < 1e-9 and worst < 1e-9 and gap < 0.01
    acceptance(2, "chi-square quantile numerics", ok,
               f"closed-form rel err {exact_closed:.1e}, CDF(quantile) err {worst:.1e}, Gaussian gap {gap:.4%}")
    assert ok


def _mc_reflected_power(n_rows, n_cols, trials, rng):
    cfg = SimConfig(irs_rows=n_rows, irs_cols=n_cols)
    const = derive_constants(cfg)
    user = np.array([12.0, -7.0, 1.5])
    phases = rng.uniform(-np.pi, np.pi, cfg.num_elements)
    args = (const.wavelength, const.L0, const.d0, cfg.pathloss_exponent)
    power = np.empty(trials)
    for i in range(trials):
        g_kn = complex_normal(rng, cfg.num_elements)
        g_nb = complex_normal(rng, cfg.num_elements)
        h = compose_irs(user, const.element_positions, const.irs_to_bs_distances, g_kn, g_nb, phases,
                        cfg.reflection_efficiency, *args)
        power[i] = abs(h) ** 2
    oracle = mean_reflected_power_oracle(user, const.element_positions, const.irs_to_bs_distances,
                                         cfg.reflection_efficiency, *args[1:])
    return power.mean(), oracle


def test_c3_mean_reflected_power(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(15)
    details, ok = [], True
    for rows, cols in ((2, 2), (8, 8)):
        mc, oracle = _mc_reflected_power(rows, cols, 10_000, rng)
        rel = abs(mc - oracle) / oracle
        ok &= rel < 0.05
        details.append(f"N={rows * cols}: rel gap {rel:.3f}")
    # replicated per-element geometry: every element at the same place
    const = derive_constants(SimConfig())
    user = np.array([12.0, -7.0, 1.5])
    same = element_grid((30.0, 0.0, 8.0), (0, 1, 0), (0, 0, 1), 1, 1, 0.0)
    d_nb = np.linalg.norm(same - const.bs_position, axis=1)
    args = (0.98, const.L0, const.d0, 2.2)
    o4 = mean_reflected_power_oracle(user, np.repeat(same, 4, axis=0), np.repeat(d_nb, 4), *args)
    o64 = mean_reflected_power_oracle(user, np.repeat(same, 64, axis=0), np.repeat(d_nb, 64), *args)
    ratio = o64 / o4
    ok &= abs(ratio - 16.0) < 1e-12 * 16
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    acceptance(3, "mean reflected power vs rho^2 sum(beta12)", ok,
               ", ".join(details) + f", oracle ratio 64/4 = {ratio:.12f}, {elapsed:.1f}s")
    assert ok


def _reference_slot(noise, prev, powers, samples, threshold):
    """Loop-by-loop restatement of initial energies plus sequential assignment."""
    energies = []
    for c in range(len(noise)):
        occupied = 0.0
        for j in range(len(prev)):
            if prev[j] == c:
                occupied += powers[j]
        energies.append(noise[c] + samples * occupied)
    chosen_all = []
    for k in range(len(powers)):
        chosen = -1
        for c in range(len(energies)):
            if energies[c] < threshold:
                chosen = c
                break
        if chosen < 0:
            chosen = 0
            for c in range(len(energies)):
                if energies[c] < energies[chosen]:
                    chosen = c
        chosen_all.append(chosen)
        energies[chosen] += samples * powers[k]
    return chosen_all, energies


def test_c4_allocation_reference_equivalence(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    mismatches = 0
    for i in range(1000):
        k = int(rng.integers(1, 5))
        c = int(rng.integers(1, 4))
        samples = int(rng.integers(1, 16))
        noise_power = float(rng.choice([0.0, 0.5, 2.0]))
        prev = rng.integers(0, c, k)
        powers = rng.choice([0.0, 0.25, 0.5, 1.0, 3.0], k)
        threshold = float(rng.uniform(0, 40))
        noise_rng = np.random.default_rng(i)
        noise = [draw_noise_energy(noise_rng, samples, noise_power) for _ in range(c)]
        expected, expected_e = _reference_slot(noise, prev, powers, samples, threshold)
        ledger = init_channel_energies(np.random.default_rng(i), samples, noise_power, prev, powers, c, threshold)
        got = assign_channels(ledger, powers, samples)
        if list(got) != expected or list(ledger.energies) != expected_e:
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 5.0
    acceptance(4, "allocation matches reference interpreter", ok, f"{mismatches} mismatches / 1000, {elapsed:.2f}s")
    assert ok


def test_c5_determinism(acceptance):
    cfg = SimConfig()
    t0 = time.perf_counter()
    first = bundle(run_simulation(cfg))
    t1 = time.perf_counter()
    second = bundle(run_simulation(cfg))
    t2 = time.perf_counter()
    results, _ = run_batch(cfg, [cfg.seed])
    batched = bundle(results[0])
    slowest = max(t1 - t0, t2 - t1)
    ok = first == second and batched == first and slowest < 10.0
    acceptance(5, "byte-identical bundles, batch-of-one equals run", ok,
               f"{len(first)} files, slowest run {slowest:.2f}s")
    assert ok


@pytest.fixture(scope="module")
def default_runs():
    return {seed: run_simulation(SimConfig(seed=seed)) for seed in range(1, 11)}


def test_c6_magnitudes(acceptance, default_runs):
    sums = np.array([r.network.avg_sum_rate_bps for r in default_runs.values()])
    jains = np.array([r.network.jain_index for r in default_runs.values()])
    ok = bool(np.all((sums > REFERENCE_SUM_RATE_BPS / 5) & (sums < REFERENCE_SUM_RATE_BPS * 5))
              and np.all((jains > 0) & (jains < 0.8)))
    acceptance(6, "sum rate within 5x of 42.47 Mbps, Jain < 0.8", ok,
               f"sum rate {sums.min() / 1e6:.1f}..{sums.max() / 1e6:.1f} Mbps, Jain {jains.min():.3f}..{jains.max():.3f}")
    assert ok


def test_c7_fairness_aware_focusing(acceptance, default_runs):
    negative, lowest_ok, rhos = 0, True, []
    for seed in range(1, 6):
        r = default_runs[seed]
        rates = np.array([n.avg_rate_bps for n in r.nodes])
        focus = np.array([n.focus_fraction for n in r.nodes])
        rho = stats.spearmanr(rates, focus).statistic
        rhos.append(rho)
        negative += rho < 0
        lowest_ok &= focus[np.argmin(rates)] > 1 / len(rates)
    ok = negative >= 4 and lowest_ok
    acceptance(7, "low-rate nodes get more focus", ok,
               f"Spearman {', '.join(f'{x:.2f}' for x in rhos)}; lowest-rate node above 1/K: {lowest_ok}")
    assert ok


def test_c8_focusing_gain_vs_random_phases(acceptance, default_runs):
    wins, ratios = 0, []
    for seed in range(1, 6):
        focused = default_runs[seed]
        control = run_simulation(SimConfig(seed=seed, phase_mode="random"))
        user = int(np.argmax(np.bincount(focused.focus, minlength=focused.config.num_nodes)))
        ratio = focused.stack("irs_power")[:, user].mean() / control.stack("irs_power")[:, user].mean()
        ratios.append(ratio)
        wins += ratio > 1.0
    ok = wins >= 4
    acceptance(8, "geometric b=3 focusing beats random-phase control", ok,
               f"{wins}/5 wins, focused/control |h_IRS|^2 = {', '.join(f'{x:.2f}' for x in ratios)}")
    assert ok


def _count_run(prop):
    """Run a hypothesis property and return how many examples it executed."""
    calls = {"n": 0}

    @functools.wraps(prop)
    def counted(*args, **kwargs):
        calls["n"] += 1
        prop(*args, **kwargs)

    return counted, calls


@pytest.mark.slow
def test_c9_invariant_suites(acceptance):
    counts = {}
    lo, hi = np.array([-50.0, -50.0, 0.0]), np.array([50.0, 50.0, 3.0])

    def speed(x, y, heading, s):
        n = NodeKinematics(np.array([x, y, 1.0]), np.array([s * math.cos(heading), s * math.sin(heading), 0.0]))
        out = step_kinematics(n, 0.005, lo, hi)
        assert abs(out.speed - n.speed) <= 1e-12
        assert np.all(out.position >= lo) and np.all(out.position <= hi)

    def quant(psi, bits):
        q = quantize_phases(np.array([psi]), bits)[0]
        d = abs(q - psi) % (2 * math.pi)
        assert min(d, 2 * math.pi - d) <= math.pi / 2**bits + 1e-12
        assert q in quantization_levels(bits)

    def probs(rates):
        p = sampling_probs(priority_weights(rates, 1e3, 2.0))
        assert abs(p.sum() - 1.0) <= 1e-12 and np.all(p > 0)

    def conservation(energies, powers):
        ledger = ChannelEnergyLedger(np.array(energies), 50.0)
        before = ledger.energies.sum()
        assign_channels(ledger, powers, 128)
        assert ledger.energies.sum() == pytest.approx(before + 128 * sum(powers), rel=1e-12, abs=1e-9)

    def linear_avg(trace):
        assert avg_sinr_db(trace) >= float(np.mean(10 * np.log10(trace))) - 1e-9

    suites = {
        "speed preservation": (speed, [st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 2 * math.pi), st.floats(0, 3)]),
        "quantization bound": (quant, [st.floats(-math.pi, math.pi, exclude_max=True), st.integers(1, 12)]),
        "probability normalization": (probs, [st.lists(st.floats(0, 1e9), min_size=1, max_size=20)]),
        "allocation conservation": (conservation, [st.lists(st.floats(0, 1e3), min_size=1, max_size=4),
                                                   st.lists(st.floats(0, 1.0), max_size=6)]),
        "linear-domain SINR averaging": (linear_avg, [st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=40)]),
    }
    failures = []
    for name, (prop, strategies) in suites.items():
        counted, calls = _count_run(prop)
        try:
            settings(max_examples=1000, database=None)(given(*strategies)(counted))()
        except Exception as exc:  # record and report below
            failures.append(f"{name}: {type(exc).__name__}")
        counts[name] = calls["n"]
    ok = not failures and all(n >= 1000 for n in counts.values())
    acceptance(9, "module invariant suites (>= 1000 cases each)", ok,
               ", ".join(f"{k} {v}" for k, v in counts.items()) + ("; " + "; ".join(failures) if failures else ""))
    assert ok
