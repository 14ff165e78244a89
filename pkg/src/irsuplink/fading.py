"""Small-scale fading: coherence-gated CN(0,1) redraws with Doppler rotation in between."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mobility import NodeKinematics

# Clarke-spectrum rule of thumb: T_coh ~ 0.423 / f_D,max
COHERENCE_CONSTANT = 0.423


@dataclass(frozen=True, eq=False)
class FadingState:
    direct_coeff: complex
    user_irs_coeffs: np.ndarray  # (N,) complex
    last_redraw_time: float


@dataclass(frozen=True, eq=False)
class StaticIrsBsFading:
    irs_bs_coeffs: np.ndarray  # (N,) complex, fixed for the whole run


def complex_normal(rng: np.random.Generator, size=None):
    """CN(0,1): independent real and imaginary parts, each N(0, 1/2)."""
    if size is None:
        re, im = rng.standard_normal(2)
        return complex(re, im) * math.sqrt(0.5)
    z = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return (z[0] + 1j * z[1]) * math.sqrt(0.5)


def draw_fading(rng: np.random.Generator, num_elements: int, now: float = 0.0) -> FadingState:
    direct = complex_normal(rng)
    return FadingState(direct, complex_normal(rng, num_elements), now)


def draw_irs_bs(rng: np.random.Generator, num_elements: int) -> StaticIrsBsFading:
    return StaticIrsBsFading(complex_normal(rng, num_elements))


def coherence_time(speed: float, wavelength: float, floor: float) -> float:
    if speed == 0.0:
        return math.inf
    f_d_max = speed / wavelength
    return max(floor, COHERENCE_CONSTANT / f_d_max)


def doppler_shift(velocity, unit_dir, wavelength: float) -> float:
    k = np.asarray(unit_dir, dtype=float)
    if abs(np.linalg.norm(k) - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit vector, |k| = {np.linalg.norm(k)}")
    return float(np.dot(np.asarray(velocity, dtype=float), k)) / wavelength


def doppler_advance(coeff, f_d: float, dt: float):
    return coeff * np.exp(2j * math.pi * f_d * dt)


def _link_doppler(velocity: np.ndarray, offset: np.ndarray, wavelength: float) -> float:
    dist = np.linalg.norm(offset)
    if dist == 0.0:
        return 0.0
    return doppler_shift(velocity, offset / dist, wavelength)


def update_fading(
    state: FadingState,
    node: NodeKinematics,
    now: float,
    dt: float,
    wavelength: float,
    floor: float,
    bs_position: np.ndarray,
    irs_center: np.ndarray,
    rng: np.random.Generator,
) -> FadingState:
    """Redraw everything if the coherence time has elapsed, else rotate phases by Doppler.

    The direct coefficient uses the node->BS direction; all user->IRS
    coefficients share one shift along the node->IRS-center direction.
    """
    speed = node.speed
    if now - state.last_redraw_time > coherence_time(speed, wavelength, floor):
        return draw_fading(rng, state.user_irs_coeffs.size, now)
    if speed == 0.0:
        return state
    f_direct = _link_doppler(node.velocity, bs_position - node.position, wavelength)
    f_irs = _link_doppler(node.velocity, irs_center - node.position, wavelength)
    return FadingState(
        complex(doppler_advance(state.direct_coeff, f_direct, dt)),
        doppler_advance(state.user_irs_coeffs, f_irs, dt),
        state.last_redraw_time,
    )
