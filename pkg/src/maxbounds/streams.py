"""Counter-based random streams keyed by ``(seed, path index)``.

Each path draws from its own Philox stream whose 128-bit key is
``(seed, path_index)`` with the counter starting at zero, so a path's values
never depend on which worker generated it or in what order.
"""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1
# Auxiliary (non-path) streams use path slots counted down from the top of the
# 64-bit range so they cannot collide with any realistic path index.
_AUX_BASE = _MASK64


def normalize_seed(seed: int) -> int:
    """Reduce any Python integer to the unsigned 64-bit seed actually used."""
    return int(seed) & _MASK64


def derive_seed(seed: int, label: str) -> int:
    """Deterministic sub-seed for a named experiment or component."""
    return normalize_seed(seed) ^ (zlib.crc32(label.encode("utf-8")) << 32 | zlib.crc32(label[::-1].encode("utf-8")))


class PathStreams:
    """Factory of per-path generators sharing one re-keyed Philox.

    Not thread-safe: use one instance per worker.
    """

    def __init__(self, seed: int):
        self.seed = normalize_seed(seed)
        self._bitgen = np.random.Philox(key=0)
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state

    def stream(self, path_index: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"][:] = 0
        st["state"]["key"][0] = self.seed
        st["state"]["key"][1] = int(path_index) & _MASK64
        st["buffer"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen


def path_generator(seed: int, path_index: int) -> np.random.Generator:
    """Fresh generator for one path (slow path; equal to ``PathStreams(seed).stream(i)``)."""
    key = (int(path_index) & _MASK64) << 64 | normalize_seed(seed)
    return np.random.Generator(np.random.Philox(key=key))


def aux_generator(seed: int, slot: int = 0) -> np.random.Generator:
    """Generator for experiment-level randomness (bootstrap, random times)."""
    return path_generator(seed, _AUX_BASE - int(slot))
