"""Counter-based random substreams.

Every simulated path draws from its own Philox stream whose key is the master
seed and whose counter starts at ``path_index << 192``.  A path is therefore a
pure function of ``(master_seed, path_index)``, whatever order or batch it is
run in.
"""
from __future__ import annotations

import numpy as np

_KEY_MASK = (1 << 128) - 1


def substream(master_seed: int, path_index: int) -> np.random.Generator:
    if path_index < 0:
        raise ValueError("path_index must be nonnegative")
    bitgen = np.random.Philox(key=int(master_seed) & _KEY_MASK, counter=[0, 0, 0, int(path_index)])
    return np.random.Generator(bitgen)


def derive_seed(master_seed: int, *labels: int) -> int:
    """Independent 64-bit seed for a labelled sub-experiment."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(x) for x in labels))
    return int(ss.generate_state(1, np.uint64)[0])
