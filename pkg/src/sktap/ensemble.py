"""Symmetric Gaussian interaction matrices and the normalized vector algebra.

Inner products are normalized by the dimension, ``<x, y> = (1/N) sum x_i y_i``,
so ``||1||`` is one regardless of ``N``.
"""

from dataclasses import dataclass
import struct

import numpy as np

MAGIC = b"SKTAPMAT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIQQI")  # magic, version, n, seed, generation

# purpose tags for derived seeds
TAG_MATRIX = 1
TAG_LLN = 2


class DimensionError(ValueError):
    pass


@dataclass
class InteractionMatrix:
    n: int
    entries: np.ndarray
    seed: int
    generation: int = 1


def derive_seed(master_seed: int, *key: int) -> int:
    """64-bit seed for the stream identified by ``(master_seed, *key)``.

    Distinct keys give statistically independent streams regardless of the
    order in which they are requested.
    """
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), *[int(k) for k in key]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


def sample_matrix(n: int, seed: int) -> InteractionMatrix:
    """Sample ``g`` with iid ``N(0, 1/n)`` entries above the diagonal, ``g_ji = g_ij``, ``g_ii = 0``."""
    if n < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {n}")
    rng = rng_for(seed)
    iu = np.triu_indices(n, k=1)
    g = np.zeros((n, n))
    g[iu] = rng.standard_normal(iu[0].size) / np.sqrt(n)
    g += g.T
    return InteractionMatrix(n=n, entries=g, seed=int(seed), generation=1)


def _check_pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x, y


def inner(x, y) -> float:
    x, y = _check_pair(x, y)
    return float(np.dot(x, y)) / x.size


def norm(x) -> float:
    return float(np.sqrt(inner(x, x)))


def sym_outer(x, y) -> np.ndarray:
    """``(x (x)_s y)_ij = (x_i y_j + x_j y_i) / N``."""
    x, y = _check_pair(x, y)
    o = np.outer(x, y)
    return (o + o.T) / x.size


def outer(x, y) -> np.ndarray:
    """``(x (x) y)_ij = x_i y_j / N``."""
    x, y = _check_pair(x, y)
    return np.outer(x, y) / x.size


def save_matrix(path, mat: InteractionMatrix) -> None:
    """Flat binary dump: fixed header then ``n*n`` little-endian float64, row-major."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, mat.n, mat.seed & (2**64 - 1), mat.generation))
        fh.write(np.ascontiguousarray(mat.entries, dtype="<f8").tobytes())


def load_matrix(path) -> InteractionMatrix:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, seed, generation = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        data = fh.read()
    if len(data) != 8 * n * n:
        raise ValueError(f"{path}: expected {8 * n * n} payload bytes, found {len(data)}")
    entries = np.frombuffer(data, dtype="<f8").reshape(n, n).astype(float)
    return InteractionMatrix(n=n, entries=entries, seed=seed, generation=generation)
