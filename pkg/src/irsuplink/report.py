"""Output bundle: summary JSON, per-slot trace, per-node table and plot-data CSVs.

Nodes and channels are 1-based in every file. Floats in CSVs use 17
significant digits; ``-inf`` dB is written literally.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .config import derive_constants
from .engine import BATCH_METRICS, BatchAggregate, RunResult
from .metrics import format_db, to_db

SUMMARY = "summary.json"
TRACE = "trace.csv"
NODES = "nodes.csv"
PLOT_SUM_RATE = "plot_sum_rate.csv"
PLOT_NODE_RATES = "plot_node_rates.csv"
PLOT_SINR_FOCUS = "plot_node_sinr_focus.csv"
AGGREGATE = "aggregate.json"

BUNDLE_FILES = (SUMMARY, TRACE, NODES, PLOT_SUM_RATE, PLOT_NODE_RATES, PLOT_SINR_FOCUS)


def fmt(x) -> str:
    return "%.17g" % x


def _json_float(x: float):
    return x if math.isfinite(x) else ("-inf" if x < 0 else ("inf" if x > 0 else "nan"))


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trace_header(num_users: int) -> list[str]:
    cols = ["slot", "focus_user"]
    for k in range(1, num_users + 1):
        cols += [f"u{k}_channel", f"u{k}_sinr_db", f"u{k}_rate_bps"]
    return cols


def trace_csv(result: RunResult) -> str:
    rows = []
    for s in result.slots:
        row = [s.slot, s.focus + 1]
        for c, snr_db, r in zip(s.assignment, to_db(s.sinr), s.rate):
            row += [int(c) + 1, fmt(snr_db), fmt(r)]
        rows.append(row)
    return _csv(trace_header(result.config.num_nodes), rows)


def read_trace(text: str) -> dict[str, np.ndarray]:
    """Parse a trace CSV back into arrays: slot, focus_user, channel, sinr_db, rate_bps."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    num_users = (len(header) - 2) // 3
    if header != trace_header(num_users):
        raise ValueError("unexpected trace header")
    data = np.array([[float(v) for v in row] for row in body]) if body else np.empty((0, len(header)))
    per_user = data[:, 2:].reshape(len(body), num_users, 3)
    return {
        "slot": data[:, 0].astype(int),
        "focus_user": data[:, 1].astype(int),
        "channel": per_user[:, :, 0].astype(int),
        "sinr_db": per_user[:, :, 1],
        "rate_bps": per_user[:, :, 2],
    }


def nodes_csv(result: RunResult) -> str:
    rows = [[n.node + 1, fmt(n.avg_sinr_db), fmt(n.avg_rate_bps / 1e6), fmt(100.0 * n.focus_fraction)]
            for n in result.nodes]
    return _csv(["node", "avg_sinr_db", "avg_rate_mbps", "focus_pct"], rows)


def summary_dict(result: RunResult) -> dict:
    cfg = result.config
    net = result.network
    return {
        "config_digest": result.config_digest,
        "seed": cfg.seed,
        "num_slots": len(result.slots),
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.to_dict().items()},
        "network": {
            "avg_sum_rate_bps": net.avg_sum_rate_bps,
            "jain_index": net.jain_index,
            "min_max_ratio": net.min_max_ratio,
            "below_threshold_nodes": [k + 1 for k in net.below_threshold_nodes],
        },
        "nodes": [
            {"node": n.node + 1, "avg_sinr_db": _json_float(n.avg_sinr_db),
             "avg_rate_bps": n.avg_rate_bps, "focus_fraction": n.focus_fraction}
            for n in result.nodes
        ],
    }


def plot_files(result: RunResult) -> dict[str, str]:
    rate = result.stack("rate")
    k = result.config.num_nodes
    sum_rows = [[s.slot, fmt(v)] for s, v in zip(result.slots, rate.sum(axis=1))]
    node_rows = [[s.slot] + [fmt(v) for v in row] for s, row in zip(result.slots, rate)]
    dec_db = result.config.decode_threshold_db
    bar_rows = [[n.node + 1, fmt(n.avg_sinr_db), fmt(n.focus_fraction), fmt(dec_db)] for n in result.nodes]
    return {
        PLOT_SUM_RATE: _csv(["slot", "sum_rate_bps"], sum_rows),
        PLOT_NODE_RATES: _csv(["slot"] + [f"node_{i}_rate_bps" for i in range(1, k + 1)], node_rows),
        PLOT_SINR_FOCUS: _csv(["node", "avg_sinr_db", "focus_fraction", "decode_threshold_db"], bar_rows),
    }


def bundle(result: RunResult) -> dict[str, str]:
    files = {
        SUMMARY: json.dumps(summary_dict(result), indent=2) + "\n",
        TRACE: trace_csv(result),
        NODES: nodes_csv(result),
    }
    files.update(plot_files(result))
    return files


def write_bundle(result: RunResult, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in bundle(result).items():
        (out / name).write_text(text, encoding="utf-8")
    return out


def aggregate_dict(agg: BatchAggregate, results: list[RunResult]) -> dict:
    by_seed = {r.config.seed: r for r in results}
    return {
        "seeds": list(agg.seeds),
        "metrics": {m: {"mean": agg.mean[m], "std": agg.std[m]} for m in BATCH_METRICS},
        "per_seed": {str(s): by_seed[s].network_metrics() for s in agg.seeds},
    }


def render_text(result: RunResult) -> str:
    """Human-readable per-node and network tables for stdout."""
    cfg = result.config
    const = derive_constants(cfg)
    lines = [f"seed {cfg.seed}, {len(result.slots)} slots, {cfg.num_nodes} nodes, "
             f"{cfg.num_channels} channels, phase mode {cfg.phase_mode}", "",
             f"{'Node':>4}  {'Avg SINR (dB)':>13}  {'Avg Rate (Mbps)':>15}  {'IRS Focus (%)':>13}"]
    for n in result.nodes:
        lines.append(f"{n.node + 1:>4}  {format_db(n.avg_sinr_db):>13}  "
                     f"{n.avg_rate_bps / 1e6:>15.2f}  {100 * n.focus_fraction:>13.1f}")
    net = result.network
    below = ", ".join(f"node {k + 1}" for k in net.below_threshold_nodes) or "none"
    lines += [
        "",
        f"Average sum rate            {net.avg_sum_rate_bps / 1e6:.2f} Mbps",
        f"Jain's fairness index       {net.jain_index:.3f}",
        f"Min/max rate ratio          {net.min_max_ratio:.3f}",
        f"Below decode threshold ({to_db(const.decode_threshold_linear):.0f} dB)  "
        f"{len(net.below_threshold_nodes)} ({below})",
    ]
    return "\n".join(lines) + "\n"
