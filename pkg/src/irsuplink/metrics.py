"""Per-slot SINR and rate, and end-of-run node and network summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NodeSummary:
    node: int  # 0-based
    avg_sinr_db: float  # may be -inf
    avg_rate_bps: float
    focus_fraction: float


@dataclass(frozen=True)
class NetworkSummary:
    avg_sum_rate_bps: float
    jain_index: float
    min_max_ratio: float
    below_threshold_nodes: tuple[int, ...]  # 0-based


def compute_sinr(rx_power, assignment, noise_power: float) -> np.ndarray:
    """SINR of every user; interferers are the other users on the same channel."""
    p = np.asarray(rx_power, dtype=float)
    c = np.asarray(assignment)
    out = np.empty_like(p)
    for k in range(p.size):
        mask = c == c[k]
        mask[k] = False
        out[k] = p[k] / (float(np.sum(p[mask])) + noise_power)
    return out


def compute_rate(sinr, bandwidth: float, decode_threshold_linear: float):
    s = np.asarray(sinr, dtype=float)
    out = np.where(s >= decode_threshold_linear, bandwidth * np.log2(1.0 + s), 0.0)
    return out if out.ndim else float(out)


def to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return out if out.ndim else float(out)


def avg_sinr_db(sinr_trace) -> float:
    """Average in the linear domain first, then convert."""
    return to_db(float(np.mean(np.asarray(sinr_trace, dtype=float))))


def jain_index(rates) -> float:
    r = np.asarray(rates, dtype=float)
    sq = float(np.sum(r * r))
    if sq == 0.0:
        return 0.0
    return float(np.sum(r)) ** 2 / (r.size * sq)


def min_max_ratio(rates) -> float:
    r = np.asarray(rates, dtype=float)
    hi = float(np.max(r))
    return float(np.min(r)) / hi if hi > 0 else 0.0


def summarize(sinr: np.ndarray, rate: np.ndarray, focus: np.ndarray,
              decode_threshold_linear: float) -> tuple[list[NodeSummary], NetworkSummary]:
    """Fold a run trace. ``sinr`` and ``rate`` are (T, K); ``focus`` is (T,) user indices."""
    sinr = np.asarray(sinr, dtype=float)
    rate = np.asarray(rate, dtype=float)
    num_slots, num_users = sinr.shape
    mean_sinr = sinr.mean(axis=0)
    mean_rate = rate.mean(axis=0)
    counts = np.bincount(np.asarray(focus), minlength=num_users)
    nodes = [
        NodeSummary(k, to_db(float(mean_sinr[k])), float(mean_rate[k]), counts[k] / num_slots)
        for k in range(num_users)
    ]
    network = NetworkSummary(
        avg_sum_rate_bps=float(rate.sum(axis=1).mean()),
        jain_index=jain_index(mean_rate),
        min_max_ratio=min_max_ratio(mean_rate),
        below_threshold_nodes=tuple(int(k) for k in np.flatnonzero(mean_sinr < decode_threshold_linear)),
    )
    return nodes, network


def format_db(x: float) -> str:
    return "-inf" if x == -math.inf else f"{x:.2f}"
