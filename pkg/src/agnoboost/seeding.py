"""Counter-based 64-bit seed derivation.

Every random draw in the package flows from a root seed through
:func:`derive_seed`, so any pool entry or experiment row can be replayed on
its own without re-running what came before it.
"""

import hashlib
import struct

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(root: int, *counters: int) -> int:
    """Hash ``(root, *counters)`` to a 64-bit unsigned seed."""
    h = hashlib.blake2b(digest_size=8, person=b"agnoboost")
    h.update(struct.pack("<Q", root & MASK64))
    h.update(struct.pack("<Q", len(counters)))
    for c in counters:
        h.update(struct.pack("<q", int(c)))
    return int.from_bytes(h.digest(), "little")


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))
