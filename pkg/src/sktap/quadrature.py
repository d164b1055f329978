"""Gauss-Hermite expectations under the standard normal measure.

Nodes come from the probabilists' Hermite rule (weight ``exp(-x**2/2)``);
weights are rescaled so they sum to one, which turns the quadrature sum
directly into an expectation ``E f(Z)``.
"""

from functools import lru_cache

import numpy as np


class InvalidDimensionError(ValueError):
    pass


@lru_cache(maxsize=32)
def normal_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and normalized weights for ``E f(Z)``, ``Z ~ N(0, 1)``."""
    if order < 2:
        raise ValueError(f"quadrature order must be >= 2, got {order}")
    with np.errstate(all="ignore"):
        x, w = np.polynomial.hermite_e.hermegauss(order)
        w = w / w.sum()
    if not np.all(np.isfinite(w)):
        # numpy's weight recursion overflows somewhere above ~360 nodes
        raise ValueError(f"quadrature order {order} is too large for a stable rule")
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_expect(f, d: int = 1, order: int = 80) -> float:
    """Tensor-product approximation of ``E f(Z_1, ..., Z_d)``.

    ``f`` must accept ``d`` broadcastable numpy arrays and return an array
    of the broadcast shape.
    """
    if d not in (1, 2, 3):
        raise InvalidDimensionError(f"dimension must be 1, 2 or 3, got {d}")
    x, w = normal_nodes(order)
    if d == 1:
        return float(np.dot(w, f(x)))
    grids = np.meshgrid(*([x] * d), indexing="ij", sparse=True)
    weights = np.ones([order] * d)
    for g in np.meshgrid(*([w] * d), indexing="ij", sparse=True):
        weights = weights * g
    vals = np.broadcast_to(f(*grids), weights.shape)
    return float(np.sum(weights * vals))
