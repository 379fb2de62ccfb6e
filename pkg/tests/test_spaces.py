import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pisierlab.cube import BiCubeFunction, CubeFunction
from pisierlab.spaces import (
    INF,
    format_exponent,
    l1cube,
    lp_bicube_norm,
    lp_cube_norm,
    lr,
    mean_p,
    parse_exponent,
    parse_space,
    pointwise_norms,
    space_norm,
)

exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, 7.5, INF])


def naive_norm(x, r, w):
    a = np.abs(np.asarray(x, dtype=float))
    w = np.asarray(w, dtype=float)
    if math.isinf(r):
        return float((w * a).max())
    return float(np.sum(w * a ** r) ** (1 / r))


def test_space_norm_examples():
    assert space_norm(lr(2, 2), [3, 4]) == 5.0
    assert space_norm(lr(1, 2, [0.5, 0.5]), [1, 1]) == 1.0
    assert space_norm(lr(INF, 2), [-2, 1]) == 2.0


@given(exponents, st.integers(1, 6), st.data())
def test_space_norm_matches_definition(r, d, data):
    # the naive oracle underflows for tiny entries, the rescaled library code does not
    coord = st.floats(-1e3, 1e3).filter(lambda v: v == 0 or abs(v) > 1e-50)
    x = data.draw(st.lists(coord, min_size=d, max_size=d))
    w = data.draw(st.lists(st.floats(0.1, 5.0), min_size=d, max_size=d))
    expected = naive_norm(x, r, w)
    assert math.isclose(space_norm(lr(r, d, w), x), expected, rel_tol=1e-12, abs_tol=1e-300)


@given(exponents, st.floats(-50, 50), st.integers(0, 2 ** 31))
def test_homogeneity_and_triangle(r, alpha, seed):
    rng = np.random.default_rng(seed)
    X = lr(r, 4, rng.uniform(0.2, 3.0, 4))
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    assert math.isclose(space_norm(X, alpha * x), abs(alpha) * space_norm(X, x), rel_tol=1e-12, abs_tol=1e-300)
    assert space_norm(X, x + y) <= (space_norm(X, x) + space_norm(X, y)) * (1 + 1e-12)


def test_large_exponent_does_not_overflow():
    X = lr(400, 3)
    assert math.isclose(space_norm(X, [1e200, 1e200, 0]), 1e200 * 2 ** (1 / 400), rel_tol=1e-12)


def test_parse_space():
    X = parse_space("lr:1.5:3")
    assert (X.r, X.d, X.unit_weights) == (1.5, 3, True)
    Y = parse_space("lr:inf:2:weights=1,2")
    assert math.isinf(Y.r) and Y.weights.tolist() == [1.0, 2.0]
    Z = parse_space("l1cube:3")
    assert Z == l1cube(3)
    assert Z.d == 8 and Z.r == 1.0 and np.all(Z.weights == 1 / 8)
    assert parse_space(Y.descriptor()) == Y
    for bad in ["lr:0.5:2", "lr:2", "lr:2:0", "l2:2:2", "lr:2:2:w=1,1", "lr:2:2:weights=1,-1"]:
        with pytest.raises(ValueError):
            parse_space(bad)


def test_exponent_parsing():
    assert parse_exponent("inf") == INF == parse_exponent("∞")
    assert parse_exponent(" 2.5 ") == 2.5
    assert format_exponent(INF) == "inf" and format_exponent(2.0) == "2"
    with pytest.raises(ValueError):
        parse_exponent("0.9")
    with pytest.raises(ValueError):
        parse_exponent("nan")


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, INF])
def test_cube_norm_examples(p):
    c = np.array([3.0, -4.0])
    assert math.isclose(lp_cube_norm(CubeFunction.constant(3, c), p, lr(2, 2)), 5.0, rel_tol=1e-14)
    assert math.isclose(lp_cube_norm(CubeFunction.character(4, (1, 3)), p, lr(2, 1)), 1.0, rel_tol=1e-14)
    F = BiCubeFunction.from_callable(3, lambda e, dl: e[0] * dl[1] * dl[2])
    assert math.isclose(lp_bicube_norm(F, p, lr(1, 1)), 1.0, rel_tol=1e-14)
    G = BiCubeFunction.from_grid(2, np.full((4, 4, 2), 1.0))
    assert math.isclose(lp_bicube_norm(G, p, lr(INF, 2)), 1.0, rel_tol=1e-14)


def test_cube_norm_derived_examples():
    assert math.isclose(lp_cube_norm(CubeFunction(1, [2.0, 0.0]), 2, lr(2, 1)), math.sqrt(2))
    F = BiCubeFunction.from_callable(1, lambda e, dl: e[0] + dl[0])
    assert sorted(F.values[:, 0].tolist()) == [-2.0, 0.0, 0.0, 2.0]
    assert math.isclose(lp_bicube_norm(F, 2, lr(2, 1)), math.sqrt(2))


@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_norm_monotone_in_p(n, seed):
    f = CubeFunction.random(n, 3, seed)
    X = lr(3, 3)
    ps = [1.0, 1.25, 2.0, 3.0, 8.0, INF]
    norms = [lp_cube_norm(f, p, X) for p in ps]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


@given(exponents, st.floats(-100, 100), st.integers(0, 2 ** 31))
def test_cube_norm_scaling(p, alpha, seed):
    f = CubeFunction.random(4, 2, seed)
    X = lr(1.5, 2)
    assert math.isclose(lp_cube_norm(alpha * f, p, X), abs(alpha) * lp_cube_norm(f, p, X),
                        rel_tol=1e-13, abs_tol=1e-300)


def test_norm_of_walsh_basis_input_uses_points(rng):
    f = CubeFunction.random(4, 2, rng)
    assert math.isclose(lp_cube_norm(f.walsh(), 3, lr(2, 2)), lp_cube_norm(f, 3, lr(2, 2)), rel_tol=1e-13)


def test_mean_p_axis():
    v = np.array([[1.0, 2.0], [3.0, 0.0]])
    np.testing.assert_allclose(mean_p(v, 1, axis=0), [2.0, 1.0])
    np.testing.assert_allclose(mean_p(v, INF, axis=1), [2.0, 3.0])
    assert math.isclose(float(mean_p(v, 3)), ((1 + 8 + 27) / 4) ** (1 / 3))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        pointwise_norms(lr(2, 3), np.zeros((4, 2)))
    with pytest.raises(ValueError):
        lp_cube_norm(CubeFunction.constant(2, [1.0]), 2, lr(2, 2))
