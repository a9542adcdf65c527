"""Deterministic random streams.

All sampling goes through :func:`substream`, which builds a Philox-4x64
counter-based generator keyed by ``numpy.random.SeedSequence(seed,
spawn_key=keys)``. A restart with index ``i`` under seed ``s`` always sees
the same stream, whatever order restarts are executed in.
"""

import numpy as np


def substream(seed: int, *keys: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                 spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def haar_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    # QR of a Ginibre matrix with the diagonal phase fix (Mezzadri 2007)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
