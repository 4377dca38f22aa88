import numpy as np

# Seed used whenever a caller does not pass one. Identical seeds give identical results and files.
DEFAULT_SEED = 20190101


def make_rng(seed=None, *stream):
    """
    Creates an independent generator for (seed, *stream). Trials, checks and samplers use their own stream key
    so that the mapping seed -> trial stays deterministic regardless of the order of evaluation.
    :param seed: base seed, DEFAULT_SEED if None
    :param stream: additional non negative integers identifying the stream
    :return: numpy Generator
    """
    if seed is None:
        seed = DEFAULT_SEED
    return np.random.default_rng([int(seed)] + [int(s) for s in stream])


def random_symmetric(rng, n, radius=None):
    """
    Random symmetric n x n matrix. If radius is given the matrix is rescaled to spectral radius radius.
    """
    a = rng.standard_normal((n, n))
    s = (a + a.T) / 2.0
    if radius is not None:
        current = np.max(np.abs(np.linalg.eigvalsh(s)))
        if current > 0:
            s = s * (radius / current)
    return s
