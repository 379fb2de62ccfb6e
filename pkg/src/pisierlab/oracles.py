"""Independent reference computations used to cross-check the fast paths.

Nothing here goes through the Walsh-multiplier machinery of
:mod:`pisierlab.operators`: derivatives flip coordinates in the point table,
the inverse Laplacian is a dense least-squares solve, transforms use the dense
character table, and t-integrals use adaptive quadrature.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate

from .cube import BiCubeFunction, CubeFunction, sign_matrix, walsh_matrix
from .operators import Permutation, build_G_t, build_V_t


def dense_walsh_coefficients(f: CubeFunction) -> np.ndarray:
    return walsh_matrix(f.n) @ f.point().values / (1 << f.n)


def flip_index(n: int, j: int) -> np.ndarray:
    return np.arange(1 << n) ^ (1 << (j - 1))


def partial_derivative_pointwise(f: CubeFunction, j: int) -> CubeFunction:
    v = f.point().values
    return CubeFunction(f.n, (v - v[flip_index(f.n, j)]) / 2)


def conditional_expectation_flip(f: CubeFunction, j: int) -> CubeFunction:
    """Average of f over coordinate j (the other coordinates held fixed)."""
    v = f.point().values
    return CubeFunction(f.n, (v + v[flip_index(f.n, j)]) / 2)


def laplacian_matrix(n: int) -> np.ndarray:
    """Dense matrix of the Laplacian acting on point tables."""
    N = 1 << n
    L = np.zeros((N, N))
    rows = np.arange(N)
    for j in range(1, n + 1):
        L[rows, rows] += 0.5
        L[rows, flip_index(n, j)] -= 0.5
    return L


def inverse_laplacian_dense(f: CubeFunction) -> CubeFunction:
    """Minimum-norm solution of ``L x = f - mean(f)``; the minimizer is mean-zero."""
    v = f.point().values
    x, *_ = np.linalg.lstsq(laplacian_matrix(f.n), v - v.mean(axis=0), rcond=None)
    return CubeFunction(f.n, x)


def inv_lap_partial_dense(f: CubeFunction, j: int) -> CubeFunction:
    return inverse_laplacian_dense(partial_derivative_pointwise(f, j))


def martingale_step_averaging(g: CubeFunction, sigma: Permutation, k: int) -> CubeFunction:
    """``g_k^sigma`` as the average of g over the coordinates not yet revealed."""
    out = g.point()
    for i in range(k, g.n):
        out = conditional_expectation_flip(out, sigma.inverse[i])
    return out


def adjoint_S_star_dense(g: CubeFunction) -> BiCubeFunction:
    S = sign_matrix(g.n)
    terms = np.stack([inv_lap_partial_dense(g, j).values for j in range(1, g.n + 1)])
    grid = np.einsum("dj,jek->dek", S, terms)
    return BiCubeFunction.from_grid(g.n, grid)


def integrate_G_quadrature(g: CubeFunction, epsabs: float = 1e-13, epsrel: float = 1e-12) -> BiCubeFunction:
    """``int_0^1 G_t dt`` by adaptive quadrature of :func:`build_G_t`."""
    def integrand(t):
        return build_G_t(g, t).values

    val, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel)
    return BiCubeFunction(g.n, val)


def harmonic_quadrature(n: int) -> float:
    val, _ = integrate.quad(lambda t: (1 - t ** n) / (1 - t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return val


def vt_matrix(n: int, t: float) -> np.ndarray:
    """Matrix of scalar V_t from point tables (2**n) to bi-cube tables (4**n).

    Column ``e`` is V_t applied to the indicator of point ``e``.
    """
    basis = CubeFunction(n, np.eye(1 << n))
    return build_V_t(basis, t).values


def vt_operator_norm_dense(n: int, t: float) -> float:
    """``||V_t||_{L_2 -> L_2(L_2)}`` from the assembled matrix.

    With the probability normalizations the norm is ``sigma_max(M) 2**-n / 2**(-n/2)``.
    """
    M = vt_matrix(n, t)
    gram = M.T @ M
    top = np.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(top, 0.0)) * 2.0 ** (-n / 2))


def s_star_map_matrix(n: int, d: int = 1) -> np.ndarray:
    """Dense matrix of ``(g_1, ..., g_n) -> sum_j Delta^{-1} d_j g_j`` on point tables.

    Built column by column from :func:`inv_lap_partial_dense`; a block of the
    identity on R^d is tensored in so the vector-valued case is exercised.
    """
    N = 1 << n
    eye = CubeFunction(n, np.eye(N))
    blocks = [inv_lap_partial_dense(eye, j).values for j in range(1, n + 1)]
    M = np.hstack(blocks)
    return np.kron(M, np.eye(d))


def hilbert_constant_dense(n: int, d: int = 1) -> float:
    """Largest singular value of :func:`s_star_map_matrix`.

    The L_2(mu) normalizations on both sides share the factor ``2**-n``, so the
    plain Euclidean singular value is the operator norm.
    """
    return float(np.linalg.svd(s_star_map_matrix(n, d), compute_uv=False)[0])
