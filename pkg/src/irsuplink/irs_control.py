"""IRS phase profiles (geometric / CSI alignment) and b-bit quantization."""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_phase(x):
    """Map angles into [-pi, pi); pi itself maps to -pi."""
    x = np.asarray(x, dtype=float)
    out = x - TWO_PI * np.floor((x + math.pi) / TWO_PI)
    # rounding in the subtraction can land exactly on the open end
    out = np.where(out >= math.pi, out - TWO_PI, out)
    out = np.where(out < -math.pi, out + TWO_PI, out)
    return out if out.ndim else float(out)


def _path_phase(focus_position, element_positions, irs_bs_distances, wavelength):
    d_kn = np.linalg.norm(element_positions - np.asarray(focus_position, float), axis=1)
    return TWO_PI * (d_kn + irs_bs_distances) / wavelength


def geometric_phases(focus_position, element_positions, irs_bs_distances, wavelength: float) -> np.ndarray:
    return wrap_phase(_path_phase(focus_position, element_positions, irs_bs_distances, wavelength))


def csi_phases(focus_position, element_positions, irs_bs_distances, wavelength: float,
               user_irs_coeffs, irs_bs_coeffs) -> np.ndarray:
    """Geometric alignment plus cancellation of the focus user's small-scale phases."""
    raw = (_path_phase(focus_position, element_positions, irs_bs_distances, wavelength)
           - np.angle(user_irs_coeffs) - np.angle(irs_bs_coeffs))
    return wrap_phase(raw)


def quantization_levels(bits: int) -> np.ndarray:
    n = 2**bits
    return -math.pi + TWO_PI * np.arange(n) / n


def quantize_phases(phases, bits: int) -> np.ndarray:
    """Nearest of 2^bits levels anchored at -pi, measured circularly.

    Exact ties go to the lower level index, including the wrap-around tie
    between the top level and -pi.
    """
    if bits < 1:
        raise ValueError(f"phase quantization needs at least 1 bit, got {bits}")
    n = 2**bits
    step = TWO_PI / n
    levels = quantization_levels(bits)
    psi = wrap_phase(np.asarray(phases, dtype=float))
    lower = np.clip(np.floor((psi + math.pi) / step).astype(np.int64), 0, n - 1)
    d_lower = psi - levels[lower]
    d_upper = levels[lower] + step - psi
    wraps = lower == n - 1  # the upper neighbour is level 0
    take_upper = np.where(wraps, d_upper <= d_lower, d_upper < d_lower)
    return levels[np.where(take_upper, (lower + 1) % n, lower)]


def random_phases(rng: np.random.Generator, num_elements: int) -> np.ndarray:
    return -math.pi + TWO_PI * rng.random(num_elements)
