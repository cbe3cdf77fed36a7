from typing import Union

import numpy as np

RandomState = Union[None, int, np.random.Generator]


def random_substream(seed: int, *key: int) -> np.random.Generator:
    """
    Independent generator for (master seed, key...).

    Streams depend only on the seed and the key, never on the order or thread
    in which they are requested.
    """
    entropy = int(seed) % (2 ** 64)
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=tuple(int(k) for k in key)))


def as_generator(rng: RandomState) -> np.random.Generator:
    return np.random.default_rng(rng)
