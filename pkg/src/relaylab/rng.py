"""Seed derivation for reproducible experiments.

Every random stream is addressed by a path of integers below the master
seed: ``(experiment, point, replication, role)``. The path becomes the
``spawn_key`` of a :class:`numpy.random.SeedSequence`, so a stream depends
only on its address and never on how many other streams were created
before it or on which worker thread consumed it.
"""

import numpy as np

EXPERIMENT_CODES = {"custom": 0, "simulate": 1, "fig2": 2, "fig3": 3, "fig4": 4}

# roles inside one replication
SLOTS, COIN, POLICY, REWARDS = 0, 1, 2, 3


def experiment_code(experiment):
    try:
        return EXPERIMENT_CODES[experiment]
    except KeyError:
        raise ValueError(f"unknown experiment {experiment!r}") from None


def seed_sequence(master_seed, *path):
    """SeedSequence at ``path`` below ``master_seed`` (all nonnegative ints)."""
    if master_seed is None:
        raise ValueError("a master seed is required")
    if int(master_seed) < 0 or any(int(p) < 0 for p in path):
        raise ValueError("seeds and stream indices must be nonnegative")
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(p) for p in path))


def generator(master_seed, *path):
    """PCG64 generator for the stream at ``path``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *path)))
