"""Large-scale gains and direct / IRS / composite channel assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ChannelSnapshot:
    direct: np.ndarray  # (K,) complex
    irs: np.ndarray  # (K,) complex
    composite: np.ndarray  # (K,) complex, direct + irs
    rx_power: np.ndarray  # (K,) W


def direct_gain(d, L0: float, d0: float, alpha: float):
    """Single-hop gain: 1 inside the near-field radius d0 (inclusive), else 1 / (L0 d^alpha)."""
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        far = 1.0 / (L0 * d**alpha)
    out = np.where(d <= d0, 1.0, far)
    return out if out.ndim else float(out)


def cascaded_gain(d1, d2, L0: float, d0: float, alpha: float):
    """Two-hop gain with L0^2 scaling; clamped to 1 when d1*d2 <= d0^2."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    with np.errstate(divide="ignore"):
        far = 1.0 / (L0 * L0 * d1**alpha * d2**alpha)
    out = np.where(d1 * d2 <= d0 * d0, 1.0, far)
    return out if out.ndim else float(out)


def compose_direct(position, bs_position, coeff: complex, wavelength: float,
                   L0: float, d0: float, alpha: float) -> complex:
    d = float(np.linalg.norm(np.asarray(bs_position, float) - np.asarray(position, float)))
    return math.sqrt(direct_gain(d, L0, d0, alpha)) * coeff * np.exp(-2j * math.pi * d / wavelength)


def _sequential_sum(terms: np.ndarray) -> complex:
    # cumsum accumulates strictly n = 1..N; np.sum would use pairwise blocks
    return complex(np.cumsum(terms)[-1]) if terms.size else 0j


def irs_terms(position, element_positions, irs_bs_distances, user_irs_coeffs, irs_bs_coeffs,
              phases, wavelength: float, L0: float, d0: float, alpha: float) -> np.ndarray:
    """Per-element summands of the reflected channel, before the efficiency factor."""
    phases = np.asarray(phases, dtype=float)
    n = len(element_positions)
    if phases.shape != (n,) or np.shape(user_irs_coeffs) != (n,) or np.shape(irs_bs_coeffs) != (n,):
        raise ValueError(f"expected {n} phases and coefficients per element")
    d_kn = np.linalg.norm(element_positions - np.asarray(position, float), axis=1)
    amp = np.sqrt(cascaded_gain(d_kn, irs_bs_distances, L0, d0, alpha))
    path = np.exp(-2j * math.pi * (d_kn + irs_bs_distances) / wavelength)
    return amp * user_irs_coeffs * irs_bs_coeffs * path * np.exp(1j * phases)


def compose_irs(position, element_positions, irs_bs_distances, user_irs_coeffs, irs_bs_coeffs,
                phases, efficiency: float, wavelength: float, L0: float, d0: float, alpha: float) -> complex:
    terms = irs_terms(position, element_positions, irs_bs_distances, user_irs_coeffs,
                      irs_bs_coeffs, phases, wavelength, L0, d0, alpha)
    return efficiency * _sequential_sum(terms)


def mean_reflected_power_oracle(position, element_positions, irs_bs_distances, efficiency: float,
                                L0: float, d0: float, alpha: float) -> float:
    """Expected |h_IRS|^2 over independent unit-variance fading: rho^2 * sum of cascaded gains."""
    d_kn = np.linalg.norm(element_positions - np.asarray(position, float), axis=1)
    return efficiency**2 * float(np.sum(cascaded_gain(d_kn, irs_bs_distances, L0, d0, alpha)))


def received_power(tx_power: float, h) -> np.ndarray:
    return tx_power * np.abs(h) ** 2
