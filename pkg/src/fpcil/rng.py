"""Seeded randomness for the whole harness.

Every random draw flows from an explicit 64-bit seed through the Philox
counter-based generator.  Independent streams are derived from a root seed
plus a *derivation path*: a tuple of small integers and/or ASCII tags fed
into ``numpy.random.SeedSequence`` as the spawn key.  The same
(seed, path) pair therefore yields the same stream on any platform, and
distinct paths yield statistically independent streams.  No module in this
package touches numpy's global RNG state.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "fisher_yates"]


def _path_component(part: int | str) -> int:
    if isinstance(part, str):
        # stable 32-bit tag for a named purpose
        return zlib.crc32(part.encode("ascii"))
    if part < 0:
        raise ValueError(f"derivation path components must be >= 0, got {part}")
    return int(part)


def stream(seed: int, *path: int | str) -> np.random.Generator:
    """Philox generator for ``seed`` at the given derivation path."""
    key = tuple(_path_component(p) for p in path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def fisher_yates(items, rng: np.random.Generator) -> list:
    """Uniform shuffle of ``items`` (returned as a new list).

    Explicit Fisher-Yates so the permutation depends only on the documented
    generator output, not on library shuffle internals.
    """
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out
