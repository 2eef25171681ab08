import numpy as np


def chunk_rngs(seed: int, n: int, chunk: int):
    """Yield ``(rng, size)`` per chunk; each chunk's stream depends only on (seed, chunk index)."""
    for i, start in enumerate(range(0, n, chunk)):
        yield np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), i])), min(chunk, n - start)
