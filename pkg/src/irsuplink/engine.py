"""Slot-by-slot orchestration of one run, plus multi-seed batches."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .allocation import assign_channels, init_channel_energies, round_robin_assignment
from .config import SimConfig, derive_constants
from .fading import draw_fading, draw_irs_bs, update_fading
from .irs_control import csi_phases, geometric_phases, quantize_phases, random_phases
from .metrics import NetworkSummary, NodeSummary, compute_rate, compute_sinr, summarize
from .mobility import init_nodes, step_kinematics
from .propagation import compose_direct, compose_irs, received_power
from .scheduler import RateHistory, priority_weights, sampling_probs, select_focus, sliding_avg_rates
from .sensing import exact_threshold

BATCH_METRICS = ("avg_sum_rate_bps", "jain_index", "min_max_ratio", "num_below_threshold")


@dataclass(frozen=True, eq=False)
class SlotRecord:
    slot: int  # 1-based
    focus: int  # 0-based user index
    probs: np.ndarray | None  # distribution the focus was drawn from; None during warm-up
    assignment: np.ndarray  # (K,) 0-based channels
    rx_power: np.ndarray  # (K,) W
    irs_power: np.ndarray  # (K,) |h_IRS|^2
    sinr: np.ndarray  # (K,) linear
    rate: np.ndarray  # (K,) bit/s
    initial_energies: np.ndarray  # (C,) before assignment
    final_energies: np.ndarray  # (C,) after assignment
    threshold: float


@dataclass(eq=False)
class RunResult:
    config: SimConfig
    config_digest: str
    slots: list[SlotRecord]
    nodes: list[NodeSummary]
    network: NetworkSummary
    wall_clock_s: float = field(default=0.0, compare=False)

    def stack(self, name: str) -> np.ndarray:
        """Per-slot field stacked over time, e.g. ``stack("rate")`` -> (T, K)."""
        return np.stack([getattr(s, name) for s in self.slots])

    @property
    def focus(self) -> np.ndarray:
        return np.array([s.focus for s in self.slots])

    def network_metrics(self) -> dict[str, float]:
        n = self.network
        return {
            "avg_sum_rate_bps": n.avg_sum_rate_bps,
            "jain_index": n.jain_index,
            "min_max_ratio": n.min_max_ratio,
            "num_below_threshold": float(len(n.below_threshold_nodes)),
        }


def run_simulation(cfg: SimConfig) -> RunResult:
    started = time.perf_counter()
    const = derive_constants(cfg)
    streams = rngmod.RngDiscipline(cfg.seed)
    K, C, N, M = cfg.num_nodes, cfg.num_channels, cfg.num_elements, cfg.sensing_samples
    dt = cfg.slot_duration_s
    lam, L0, d0, alpha = const.wavelength, const.L0, const.d0, cfg.pathloss_exponent
    elements, d_nb = const.element_positions, const.irs_to_bs_distances

    nodes = init_nodes(streams.get(rngmod.INIT), K, cfg.region_min, cfg.region_max, cfg.v_max_mps)
    fading_rngs = [streams.fading(k) for k in range(K)]
    fading = [draw_fading(fading_rngs[k], N, 0.0) for k in range(K)]
    irs_bs = draw_irs_bs(streams.get(rngmod.IRS_BS), N).irs_bs_coeffs
    sensing_rng = streams.get(rngmod.SENSING)
    sched_rng = streams.get(rngmod.SCHEDULER)
    control_rng = streams.get(rngmod.CONTROL_PHASES)

    history = RateHistory(K, cfg.window)
    prev_assignment = round_robin_assignment(K, C)
    probs = None
    threshold = exact_threshold(const.noise_power, M, cfg.target_pfa)
    records = []

    for t in range(1, cfg.num_slots + 1):
        now = t * dt
        nodes = [step_kinematics(n, dt, cfg.region_min, cfg.region_max) for n in nodes]
        fading = [
            update_fading(fading[k], nodes[k], now, dt, lam, cfg.coherence_floor_s,
                          const.bs_position, const.irs_center, fading_rngs[k])
            for k in range(K)
        ]

        decision = select_focus(t, cfg.window, K, probs, sched_rng)
        focus_pos = nodes[decision.user].position
        if cfg.phase_mode == "geometric":
            phases = geometric_phases(focus_pos, elements, d_nb, lam)
        elif cfg.phase_mode == "csi":
            phases = csi_phases(focus_pos, elements, d_nb, lam,
                                fading[decision.user].user_irs_coeffs, irs_bs)
        else:
            phases = random_phases(control_rng, N)
        phases = quantize_phases(phases, cfg.phase_bits)

        h_direct = np.array([
            compose_direct(nodes[k].position, const.bs_position, fading[k].direct_coeff, lam, L0, d0, alpha)
            for k in range(K)
        ])
        h_irs = np.array([
            compose_irs(nodes[k].position, elements, d_nb, fading[k].user_irs_coeffs, irs_bs, phases,
                        cfg.reflection_efficiency, lam, L0, d0, alpha)
            for k in range(K)
        ])
        rx_power = received_power(const.tx_power, h_direct + h_irs)

        ledger = init_channel_energies(sensing_rng, M, const.noise_power, prev_assignment,
                                       rx_power, C, threshold)
        initial_energies = ledger.energies.copy()
        assignment = assign_channels(ledger, rx_power, M)
        sinr = compute_sinr(rx_power, assignment, const.noise_power)
        rate = compute_rate(sinr, cfg.bandwidth_hz, const.decode_threshold_linear)

        records.append(SlotRecord(
            slot=t, focus=decision.user, probs=decision.probs, assignment=assignment,
            rx_power=rx_power, irs_power=np.abs(h_irs) ** 2, sinr=sinr, rate=rate,
            initial_energies=initial_energies, final_energies=ledger.energies.copy(),
            threshold=threshold,
        ))

        history.push(rate)
        probs = sampling_probs(priority_weights(sliding_avg_rates(history), cfg.rate_epsilon,
                                                cfg.priority_exponent))
        prev_assignment = assignment

    sinr_tk = np.stack([r.sinr for r in records])
    rate_tk = np.stack([r.rate for r in records])
    focus = np.array([r.focus for r in records])
    node_summaries, network = summarize(sinr_tk, rate_tk, focus, const.decode_threshold_linear)
    return RunResult(cfg, cfg.digest(), records, node_summaries, network,
                     wall_clock_s=time.perf_counter() - started)


class BatchError(RuntimeError):
    def __init__(self, seed: int, cause: BaseException):
        super().__init__(f"run with seed {seed} failed: {cause}")
        self.seed = seed


@dataclass(frozen=True)
class BatchAggregate:
    seeds: tuple[int, ...]
    mean: dict[str, float]
    std: dict[str, float]  # population standard deviation


def aggregate(results: list[RunResult]) -> BatchAggregate:
    ordered = sorted(results, key=lambda r: r.config.seed)
    table = np.array([[r.network_metrics()[m] for m in BATCH_METRICS] for r in ordered])
    return BatchAggregate(
        seeds=tuple(r.config.seed for r in ordered),
        mean=dict(zip(BATCH_METRICS, (float(v) for v in table.mean(axis=0)))),
        std=dict(zip(BATCH_METRICS, (float(v) for v in table.std(axis=0)))),
    )


def _run_seed(cfg: SimConfig, seed: int) -> RunResult:
    try:
        return run_simulation(cfg.replace(seed=seed))
    except Exception as exc:
        raise BatchError(seed, exc) from exc


def run_batch(cfg: SimConfig, seeds, workers: int = 1) -> tuple[list[RunResult], BatchAggregate]:
    """One independent run per seed. Results come back in the order of ``seeds``."""
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("seed list is empty")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_seed, [cfg] * len(seeds), seeds))
    else:
        results = [_run_seed(cfg, s) for s in seeds]
    return results, aggregate(results)
