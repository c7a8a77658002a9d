"""Seeded random streams.

Every trial owns independent generators derived from the entropy tuple
``(master_seed, trial_index, stream)`` through :class:`numpy.random.SeedSequence`,
so a trial's draws do not depend on how trials are batched or threaded.
"""
import numpy as np

INIT = 0
NOISE = 1
HAAR = 2


def trial_generator(master_seed: int, trial_index: int, stream: int) -> np.random.Generator:
    if master_seed < 0 or trial_index < 0:
        raise ValueError("seeds and trial indices must be non-negative")
    seq = np.random.SeedSequence([int(master_seed), int(trial_index), int(stream)])
    return np.random.Generator(np.random.PCG64(seq))
