"""Sensing-guided sequential channel assignment.

Channels are 0-based here (reports add 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sensing import draw_noise_energy


@dataclass
class ChannelEnergyLedger:
    energies: np.ndarray  # (C,) running energy per channel
    threshold: float


def round_robin_assignment(num_nodes: int, num_channels: int) -> np.ndarray:
    """Stand-in for the previous-slot assignment before the first slot."""
    return np.arange(num_nodes) % num_channels


def init_channel_energies(rng: np.random.Generator, samples: int, noise_power: float,
                          prev_assignment, rx_power, num_channels: int, threshold: float) -> ChannelEnergyLedger:
    """Noise-only draw per channel (index order) plus M times the power of last slot's occupants."""
    prev = np.asarray(prev_assignment, dtype=np.int64)
    power = np.asarray(rx_power, dtype=float)
    energies = np.empty(num_channels)
    for c in range(num_channels):
        energies[c] = draw_noise_energy(rng, samples, noise_power)
    for c in range(num_channels):
        energies[c] += samples * float(np.sum(power[prev == c]))
    return ChannelEnergyLedger(energies, threshold)


def assign_channels(ledger: ChannelEnergyLedger, rx_power, samples: int) -> np.ndarray:
    """Users in index order take the first channel below threshold, else the least-loaded one.

    Mutates ``ledger.energies`` as each user is added.
    """
    energies = ledger.energies
    power = np.asarray(rx_power, dtype=float)
    assignment = np.empty(power.size, dtype=np.int64)
    for k, p in enumerate(power):
        below = np.flatnonzero(energies < ledger.threshold)
        c = int(below[0]) if below.size else int(np.argmin(energies))
        assignment[k] = c
        energies[c] += samples * p
    return assignment
