"""Focus-user selection: round-robin warm-up, then inverse-rate weighted sampling.

Users are 0-based here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RateHistory:
    """Ring buffer of the last ``window`` per-user rates."""

    def __init__(self, num_users: int, window: int):
        self.window = window
        self._buf = np.zeros((window, num_users))
        self.t = 0

    def push(self, rates) -> None:
        rates = np.asarray(rates, dtype=float)
        if np.any(rates < 0):
            raise ValueError("rates must be non-negative")
        self._buf[self.t % self.window] = rates
        self.t += 1

    def __len__(self) -> int:
        return min(self.t, self.window)

    def rows(self) -> np.ndarray:
        """Stored rates, oldest first, shape (len, K)."""
        n = len(self)
        if self.t <= self.window:
            return self._buf[:n].copy()
        start = self.t % self.window
        return np.concatenate([self._buf[start:], self._buf[:start]])


def sliding_avg_rates(history: RateHistory) -> np.ndarray:
    if len(history) == 0:
        raise ValueError("no rates recorded yet")
    return history.rows().mean(axis=0)


def priority_weights(avg_rates, epsilon: float, beta: float) -> np.ndarray:
    return (np.asarray(avg_rates, dtype=float) + epsilon) ** (-beta)


def sampling_probs(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return w / np.sum(w)


@dataclass(frozen=True, eq=False)
class FocusDecision:
    user: int
    probs: np.ndarray | None = None  # only set once the adaptive phase starts


def sample_index(probs, u: float) -> int:
    """Inverse CDF over cumulative sums in index order for a single uniform u in [0, 1)."""
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(idx, len(cdf) - 1)


def select_focus(t: int, window: int, num_users: int, prev_probs, rng: np.random.Generator) -> FocusDecision:
    """Slot ``t`` is 1-based; warm-up covers t <= window and consumes no randomness."""
    if t <= window:
        return FocusDecision((t - 1) % num_users)
    probs = np.asarray(prev_probs, dtype=float)
    return FocusDecision(sample_index(probs, rng.random()), probs)
