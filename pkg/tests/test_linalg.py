import math

import numpy as np
import pytest

from advflow.errors import ShapeError
from advflow.linalg import Rng, as_matrix, elementwise, matmul, sign


def naive_matmul(a, b):
    out = np.zeros((len(a), len(b[0])))
    for i in range(len(a)):
        for j in range(len(b[0])):
            for k in range(len(b)):
                out[i][j] += a[i][k] * b[k][j]
    return out


class TestMatmul:
    def test_identity(self):
        assert np.array_equal(
            matmul([[1, 0], [0, 1]], [[3, 4], [5, 6]]), [[3, 4], [5, 6]]
        )

    def test_hand_computed(self):
        assert np.array_equal(matmul([[1, 2]], [[3], [4]]), [[11]])

    def test_against_triple_loop_oracle(self):
        rng = Rng(7)
        a = rng.uniform(-5, 5, (7, 5))
        b = rng.uniform(-5, 5, (5, 3))
        assert np.allclose(matmul(a, b), naive_matmul(a, b), rtol=1e-12, atol=1e-12)

    def test_dimension_mismatch_names_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
            matmul(np.ones((2, 3)), np.ones((2, 2)))

    def test_associativity(self):
        rng = Rng(11)
        for _ in range(10):
            a = rng.uniform(-1, 1, (4, 6))
            b = rng.uniform(-1, 1, (6, 3))
            c = rng.uniform(-1, 1, (3, 5))
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            assert np.allclose(left, right, rtol=1e-9)


class TestElementwise:
    def test_sign_definition(self):
        assert np.array_equal(sign([[-0.3, 0.0, 2.5]]), [[-1, 0, 1]])

    def test_identity_function(self):
        a = Rng(3).uniform(-2, 2, (4, 4))
        assert np.array_equal(elementwise(a, lambda v: v), a)

    def test_tanh_matches_scalar_library(self):
        a = Rng(5).uniform(-3, 3, (6, 6))
        out = elementwise(a, math.tanh)
        for i in range(6):
            for j in range(6):
                assert abs(out[i, j] - math.tanh(a[i, j])) < 1e-12

    def test_sign_scale_invariance(self):
        m = Rng(9).uniform(-1, 1, (5, 5))
        for eps in (1e-9, 0.5, 3.0, 1e6):
            assert np.array_equal(sign(eps * m), sign(m))


class TestMatrixValidation:
    def test_rejects_empty(self):
        with pytest.raises(ShapeError):
            as_matrix(np.empty((0, 3)))

    def test_rejects_1d(self):
        with pytest.raises(ShapeError):
            as_matrix([1.0, 2.0])


class TestRng:
    def test_equal_seeds_equal_sequences(self):
        a = Rng(123456).uniform(size=10_000)
        b = Rng(123456).uniform(size=10_000)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(Rng(1).uniform(size=100), Rng(2).uniform(size=100))

    def test_permutation_reproducible(self):
        assert np.array_equal(Rng(42).permutation(1000), Rng(42).permutation(1000))
