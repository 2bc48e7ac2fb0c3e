"""Seeded random sources.

Everything stochastic in the package draws from a Philox (counter-based)
bit generator keyed by an explicit 64-bit seed, so that results are
reproducible across platforms and independent of execution order.
"""
import numpy as np

_TWO53 = float(2**53)


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed) % 2**64))


def open_uniform(rng, size):
    """Uniform draws strictly inside (0, 1) on a 2**-53 lattice."""
    k = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (k + 0.5) / _TWO53


def child_seed(master, *keys):
    """Derive a 64-bit seed from a master seed and integer keys."""
    ss = np.random.SeedSequence(int(master) % 2**64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
