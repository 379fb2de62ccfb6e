import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pisierlab.cube import (
    BiCubeFunction,
    CoordSet,
    CubeFunction,
    CubePoint,
    SizingError,
    caps,
    check_n,
    cube_mean,
    fwht,
    inverse_walsh,
    walsh_matrix,
    walsh_transform,
    walsh_value,
)

from conftest import brute_walsh


def test_bit_convention():
    p = CubePoint.from_signs((1, -1, -1))
    assert p.index == 0b110
    assert p.signs == (1, -1, -1)
    assert p.flip(1).signs == (-1, -1, -1)
    assert p.flip(1).index == p.index ^ 1


@given(st.integers(1, 10), st.data())
def test_point_index_bijection(n, data):
    idx = data.draw(st.integers(0, (1 << n) - 1))
    p = CubePoint(n, idx)
    assert CubePoint.from_signs(p.signs).index == idx
    j = data.draw(st.integers(1, n))
    assert p.flip(j).index ^ idx == 1 << (j - 1)


def test_coordset():
    A = CoordSet.of(5, [1, 3, 4])
    assert A.mask == 0b1101
    assert A.size == 3
    assert A.coords == (1, 3, 4)
    with pytest.raises(ValueError):
        CoordSet(2, 4)


def test_transform_two_point_example():
    f = CubeFunction(1, [1.0, 0.0])
    c = walsh_transform(f).values[:, 0]
    assert c.tolist() == [0.5, 0.5]


def test_transform_of_constant():
    c = np.array([2.0, -1.0, 3.5])
    coef = walsh_transform(CubeFunction.constant(4, c)).values
    np.testing.assert_allclose(coef[0], c, atol=1e-15)
    np.testing.assert_allclose(coef[1:], 0.0, atol=1e-15)


@pytest.mark.parametrize("coords", [(), (1,), (2, 3), (1, 2, 3, 4)])
def test_transform_of_character(coords):
    n = 4
    f = CubeFunction.character(n, coords).point()
    coef = walsh_transform(f).values[:, 0]
    expected = np.zeros(1 << n)
    expected[CoordSet.of(n, coords).mask] = 1.0
    np.testing.assert_allclose(coef, expected, atol=1e-15)


def test_transform_matches_direct_summation(rng):
    n, d = 5, 2
    f = CubeFunction.random(n, d, rng)
    np.testing.assert_allclose(walsh_transform(f).values, brute_walsh(f.values, n), atol=1e-14)


def test_inverse_of_zero_and_single_coefficient():
    n = 3
    zero = CubeFunction(n, np.zeros((8, 2)), "walsh")
    assert not inverse_walsh(zero).values.any()
    x = np.array([1.5, -2.0])
    g = inverse_walsh(CubeFunction.character(n, (1, 3), x)).values
    for e in range(8):
        s = CubePoint(n, e).signs
        np.testing.assert_allclose(g[e], s[0] * s[2] * x, atol=1e-15)


def test_roundtrip_n10_d3(rng):
    f = CubeFunction.random(10, 3, rng)
    back = inverse_walsh(walsh_transform(f)).values
    assert np.linalg.norm(back - f.values) / np.linalg.norm(f.values) <= 1e-12


@given(st.integers(1, 8), st.integers(1, 3), st.integers(0, 2 ** 31))
def test_roundtrip_property(n, d, seed):
    f = CubeFunction.random(n, d, seed)
    back = f.walsh().point().values
    assert np.linalg.norm(back - f.values) <= 1e-12 * np.linalg.norm(f.values)


@given(st.integers(1, 9), st.integers(0, 2 ** 31))
def test_parseval(n, seed):
    f = CubeFunction.random(n, 1, seed)
    lhs = float(np.mean(f.values ** 2))
    rhs = float(np.sum(f.walsh().values ** 2))
    assert abs(lhs - rhs) <= 1e-10 * lhs


@given(st.integers(1, 7), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 31))
def test_linearity(n, a, b, seed):
    rng = np.random.default_rng(seed)
    f, g = CubeFunction.random(n, 2, rng), CubeFunction.random(n, 2, rng)
    lhs = walsh_transform(a * f + b * g).values
    rhs = a * walsh_transform(f).values + b * walsh_transform(g).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(a) + abs(b)) * 4)


def test_walsh_value_examples():
    assert walsh_value(CoordSet(3, 0), CubePoint(3, 5)) == 1
    assert walsh_value(CoordSet.of(3, [1]), CubePoint.from_signs((-1, 1, 1))) == -1
    assert walsh_value(CoordSet.of(3, [1, 2]), CubePoint.from_signs((-1, -1, 1))) == 1


@given(st.integers(1, 6), st.data())
def test_walsh_value_matches_inverse_indicator(n, data):
    A = data.draw(st.integers(0, (1 << n) - 1))
    table = inverse_walsh(CubeFunction.character(n, CoordSet(n, A).coords)).values[:, 0]
    for e in range(1 << n):
        assert walsh_value(CoordSet(n, A), CubePoint(n, e)) == table[e]


def test_walsh_matrix_is_orthogonal():
    H = walsh_matrix(4)
    np.testing.assert_array_equal(H @ H.T, 16 * np.eye(16))


def test_fwht_along_axis(rng):
    x = rng.standard_normal((3, 8, 2))
    y = fwht(x, axis=1)
    np.testing.assert_allclose(y, np.einsum("ae,bek->bak", walsh_matrix(3), x), atol=1e-13)
    assert x.shape == y.shape


def test_cube_mean_examples():
    assert cube_mean(CubeFunction.constant(3, [1.0, 2.0])).tolist() == [1.0, 2.0]
    assert abs(cube_mean(CubeFunction.character(3, (2,)))[0]) < 1e-15
    f = CubeFunction(1, [[1.0, 0.0], [0.0, 1.0]])
    assert cube_mean(f).tolist() == [0.5, 0.5]


def test_shape_validation():
    with pytest.raises(ValueError):
        CubeFunction(3, np.zeros((7, 1)))
    with pytest.raises(ValueError):
        CubeFunction(2, np.zeros((4, 1)), "fourier")
    with pytest.raises(ValueError):
        BiCubeFunction(2, np.zeros((15, 1)))


def test_values_are_read_only(rng):
    f = CubeFunction.random(3, 1, rng)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_caps_and_env_override(monkeypatch):
    assert caps() == {"cube": 14, "bicube": 10, "perm": 6}
    with pytest.raises(SizingError):
        check_n(15, "cube")
    with pytest.raises(SizingError):
        BiCubeFunction(11, np.zeros((1, 1)))
    monkeypatch.setenv("PISIERLAB_MAX_N", "bicube=2")
    assert caps()["bicube"] == 2
    assert caps()["cube"] == 14
    with pytest.raises(SizingError):
        BiCubeFunction(3, np.zeros((64, 1)))


def test_bicube_layout():
    n = 2
    F = BiCubeFunction.from_callable(n, lambda e, dl: 10 * CubePoint.from_signs(dl).index
                                     + CubePoint.from_signs(e).index)
    for dl in range(4):
        for e in range(4):
            assert F.values[e + 4 * dl, 0] == 10 * dl + e
            assert F.grid()[dl, e, 0] == 10 * dl + e


@given(st.integers(1, 5), st.integers(0, 2 ** 31))
def test_bicube_roundtrip_per_variable(n, seed):
    F = BiCubeFunction(n, np.random.default_rng(seed).standard_normal((1 << 2 * n, 2)))
    for bases in [("walsh", "point"), ("point", "walsh"), ("walsh", "walsh")]:
        back = F.with_bases(*bases).point().values
        assert np.linalg.norm(back - F.values) <= 1e-12 * np.linalg.norm(F.values)


def test_bicube_walsh_of_product_character():
    n = 3
    F = BiCubeFunction.from_callable(n, lambda e, dl: e[0] * e[2] * dl[1])
    W = F.with_bases("walsh", "walsh").grid()[..., 0]
    expected = np.zeros((8, 8))
    expected[0b010, 0b101] = 1.0
    np.testing.assert_allclose(W, expected, atol=1e-15)
    assert math.isclose(np.abs(F.values).max(), 1.0)
