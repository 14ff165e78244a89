"""Named random substreams derived from one master seed.

Every stream is a Philox4x64 generator keyed by ``SeedSequence(seed,
spawn_key=(label_id, index))``. Streams are pure functions of
``(seed, label, index)``, so drawing from one never shifts another and
per-node streams can be consumed in any order.
"""

from __future__ import annotations

import zlib

import numpy as np

INIT = "init-positions"
FADING = "fading"
IRS_BS = "irs-bs-fading"
SENSING = "sensing-noise"
SCHEDULER = "scheduler"
CONTROL_PHASES = "control-phases"


def _label_id(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def stream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(_label_id(label), index))
    return np.random.Generator(np.random.Philox(seq))


class RngDiscipline:
    """Hands out the substreams used by one run."""

    def __init__(self, seed: int):
        self.seed = seed

    def get(self, label: str, index: int = 0) -> np.random.Generator:
        return stream(self.seed, label, index)

    def fading(self, node: int) -> np.random.Generator:
        return self.get(FADING, node)
