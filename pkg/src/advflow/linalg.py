"""Dense float64 matrix helpers and seeded randomness.

Everything numeric in the pipeline flows through 2-D float64 arrays;
the helpers here enforce that shape discipline and give every stochastic
operation an explicitly owned, reproducible generator.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError


def as_matrix(values) -> np.ndarray:
    """Coerce to a non-empty 2-D float64 array, rejecting anything else."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {m.ndim}-D shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"empty matrix {m.shape} is not allowed")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}: inner dimensions differ")
    return a @ b


def elementwise(a, f) -> np.ndarray:
    """Apply a scalar function entrywise, preserving shape."""
    a = as_matrix(a)
    return np.vectorize(f, otypes=[np.float64])(a)


def sign(a) -> np.ndarray:
    """Entrywise sign: negative -> -1, zero -> 0, positive -> +1."""
    return np.sign(as_matrix(a))


class Rng:
    """Seeded PCG64 generator; single owner, threaded through explicitly.

    Equal seeds produce equal draw sequences on every platform. There is
    deliberately no module-level default instance.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size)

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def choice(self, a, size=None, replace=True):
        return self._gen.choice(a, size=size, replace=replace)

    def __repr__(self):
        return f"Rng(seed={self.seed})"
