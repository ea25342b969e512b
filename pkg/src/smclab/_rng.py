"""Seeded random generators.

Every sampling operation in the package takes an explicit 64-bit seed and
builds a counter-based Philox generator from it, so runs replay exactly and
concurrent samplers never share state.  Substreams (Monte Carlo chunks,
per-trial channel noise) get independent keys by folding a stream index into
the upper 64 bits of the 128-bit Philox key.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); distinct streams are independent."""
    key = (int(seed) & _MASK64) | ((int(stream) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))
