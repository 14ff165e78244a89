"""Planar node kinematics inside an axis-aligned box with specular walls."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MAX_REFLECTIONS = 64


@dataclass(frozen=True, eq=False)
class NodeKinematics:
    position: np.ndarray  # (3,) m
    velocity: np.ndarray  # (3,) m/s, z component always 0

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.velocity))

    def __eq__(self, other):
        if not isinstance(other, NodeKinematics):
            return NotImplemented
        return np.array_equal(self.position, other.position) and np.array_equal(self.velocity, other.velocity)


def init_nodes(rng: np.random.Generator, num_nodes: int, region_min, region_max, v_max: float) -> list[NodeKinematics]:
    """Uniform positions over the region, uniform heading, speed uniform in [0, v_max].

    Draw order per node: position (x, y, z), heading, speed.
    """
    lo = np.asarray(region_min, dtype=float)
    hi = np.asarray(region_max, dtype=float)
    nodes = []
    for _ in range(num_nodes):
        position = lo + (hi - lo) * rng.random(3)
        heading = 2.0 * math.pi * rng.random()
        speed = v_max * rng.random()
        velocity = np.array([speed * math.cos(heading), speed * math.sin(heading), 0.0])
        nodes.append(NodeKinematics(position, velocity))
    return nodes


def step_kinematics(node: NodeKinematics, dt: float, region_min, region_max) -> NodeKinematics:
    """Advance one slot; mirror any coordinate that leaves the box and flip that velocity component."""
    lo = np.asarray(region_min, dtype=float)
    hi = np.asarray(region_max, dtype=float)
    pos = node.position + dt * node.velocity
    vel = node.velocity.copy()
    for _ in range(_MAX_REFLECTIONS):
        above = pos > hi
        below = pos < lo
        if not (above.any() or below.any()):
            break
        pos = np.where(above, 2.0 * hi - pos, pos)
        pos = np.where(below, 2.0 * lo - pos, pos)
        vel = np.where(above | below, -vel, vel)
    else:
        raise RuntimeError("step too large for region: reflection did not converge")
    return NodeKinematics(pos, vel)
