import numpy as np
import pytest

from augdual.linop import (
    BlockSum,
    Dense,
    Point,
    SamplingMask,
    adjoint_consistency_check,
    random_point,
)


def test_point_vector_roundtrip():
    p = Point.vector([1.0, -2.0, 3.0])
    assert p.tag == ("vector", 3)
    assert np.array_equal(p.as_vector(), [1.0, -2.0, 3.0])
    assert not p.data.flags.writeable


def test_point_matrix_roundtrip():
    m = np.arange(6.0).reshape(2, 3)
    p = Point.matrix(m)
    assert p.tag == ("matrix", (2, 3))
    assert np.array_equal(p.as_matrix(), m)


def test_point_pair_roundtrip():
    a = np.ones((2, 2))
    b = -np.ones((2, 2))
    p = Point.pair(a, b)
    la, sb = p.as_pair()
    assert np.array_equal(la, a)
    assert np.array_equal(sb, b)


def test_point_arithmetic_and_norm():
    p = Point.vector([3.0, 4.0])
    q = Point.vector([1.0, 0.0])
    assert (p + q).as_vector()[0] == 4.0
    assert (p - q).as_vector()[0] == 2.0
    assert (2.0 * p).norm() == 10.0
    assert p.dot(q) == 3.0
    assert p.norm() == 5.0


def test_point_tag_mismatch_raises():
    p = Point.vector([1.0, 2.0])
    q = Point.vector([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        _ = p + q
    with pytest.raises(ValueError):
        p.as_matrix()


def test_dense_apply_adjoint():
    a = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    op = Dense(a)
    x = Point.vector([1.0, -1.0])
    assert np.allclose(op.apply(x).as_vector(), a @ [1.0, -1.0])
    y = np.array([1.0, 0.0, 2.0])
    assert np.allclose(op.adjoint(Point.vector(y)).as_vector(), a.T @ y)


def test_sampling_mask_apply_adjoint():
    op = SamplingMask((2, 3), ((0, 1), (1, 2)))
    m = np.arange(6.0).reshape(2, 3)
    out = op.apply(Point.matrix(m))
    assert np.array_equal(out.as_vector(), [1.0, 5.0])
    back = op.adjoint(Point.vector([7.0, 9.0])).as_matrix()
    expected = np.zeros((2, 3))
    expected[0, 1] = 7.0
    expected[1, 2] = 9.0
    assert np.array_equal(back, expected)


def test_sampling_mask_rejects_duplicates_and_bounds():
    with pytest.raises(ValueError):
        SamplingMask((2, 2), ((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        SamplingMask((2, 2), ((2, 0),))


def test_blocksum_apply_adjoint():
    op = BlockSum((2, 2))
    l = np.eye(2)
    s = np.array([[0.0, 1.0], [0.0, 0.0]])
    out = op.apply(Point.pair(l, s))
    assert np.array_equal(out.as_matrix(), l + s)
    y = np.arange(4.0).reshape(2, 2)
    la, sa = op.adjoint(Point.matrix(y)).as_pair()
    assert np.array_equal(la, y)
    assert np.array_equal(sa, y)


@pytest.mark.parametrize(
    "op",
    [
        Dense(np.random.default_rng(0).standard_normal((4, 6))),
        SamplingMask((3, 4), ((0, 0), (1, 1), (2, 3), (0, 3))),
        BlockSum((3, 3)),
    ],
    ids=["dense", "mask", "blocksum"],
)
def test_adjoint_identity(op):
    gap = adjoint_consistency_check(op, trials=50, seed=123)
    assert gap <= 1e-12


def test_random_point_shapes():
    rng = np.random.default_rng(0)
    assert random_point(("vector", 4), rng).tag == ("vector", 4)
    assert random_point(("matrix", (2, 5)), rng).tag == ("matrix", (2, 5))
    assert random_point(("pair", (3, 3)), rng).tag == ("pair", (3, 3))


def test_apply_shape_check():
    op = Dense(np.eye(3))
    with pytest.raises(ValueError):
        op.apply(Point.vector([1.0, 2.0]))
    with pytest.raises(ValueError):
        op.adjoint(Point.vector(np.zeros(2)))
