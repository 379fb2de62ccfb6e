"""Linear operators and auxiliary constructions on cube functions.

Everything that acts diagonally on Walsh coefficients is applied as a multiplier
on the Walsh table (O(2**n d) after the transform). Point-basis definitions of
the same operators live in :mod:`pisierlab.oracles` and are used to check these.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cube import (
    BiCubeFunction,
    CubeFunction,
    SizingError,
    caps,
    check_n,
    popcounts,
    sign_matrix,
)


@dataclass(frozen=True)
class Permutation:
    """sigma as a tuple of 1-based images: ``sigma[j-1] = sigma(j)``."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(v) for v in self.sigma)
        if sorted(s) != list(range(1, len(s) + 1)):
            raise ValueError(f"{self.sigma!r} is not a permutation of 1..{len(s)}")
        object.__setattr__(self, "sigma", s)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for j, s in enumerate(self.sigma, start=1):
            inv[s - 1] = j
        return tuple(inv)

    def __call__(self, j: int) -> int:
        return self.sigma[j - 1]

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))


def all_permutations(n: int):
    for s in itertools.permutations(range(1, n + 1)):
        yield Permutation(s)


def sample_permutations(n: int, count: int, rng=None):
    rng = np.random.default_rng(rng)
    for _ in range(count):
        yield Permutation(tuple(rng.permutation(n) + 1))


def permutations_for(n: int, samples: int | None = None, rng=None):
    """All of S_n when ``n`` is within the enumeration cap, else ``samples`` uniform draws.

    Returns ``(permutations, monte_carlo)``.
    """
    if n <= caps()["perm"]:
        return list(all_permutations(n)), False
    if samples is None:
        raise SizingError(f"n={n} exceeds the permutation enumeration cap of {caps()['perm']}; "
                          "pass samples= for a Monte Carlo average")
    return list(sample_permutations(n, samples, rng)), True


@dataclass(frozen=True)
class HarmonicTable:
    H: tuple[float, ...]

    @classmethod
    def up_to(cls, n: int) -> HarmonicTable:
        acc = Fraction(0)
        out = [0.0]
        for k in range(1, n + 1):
            acc += Fraction(1, k)
            out.append(float(acc))
        return cls(tuple(out))

    def __getitem__(self, k: int) -> float:
        return self.H[k]


def harmonic(n: int) -> float:
    return HarmonicTable.up_to(n)[n]


def _check_coord(n: int, j: int) -> None:
    if not 1 <= j <= n:
        raise ValueError(f"coordinate j={j} out of range 1..{n}")


def apply_multiplier(f: CubeFunction, m: np.ndarray) -> CubeFunction:
    """Scale the Walsh coefficient at each mask A by ``m[A]``; result in f's basis."""
    c = f.walsh()
    out = CubeFunction(f.n, c.values * np.asarray(m, dtype=float)[:, None], "walsh")
    return out.in_basis(f.basis)


def contains_mask(n: int, j: int) -> np.ndarray:
    """Indicator of ``j in A`` over all masks A."""
    return ((np.arange(1 << n) >> (j - 1)) & 1).astype(float)


def inverse_size(n: int) -> np.ndarray:
    """``1/|A|`` for A nonempty, 0 at the empty set."""
    pc = popcounts(n).astype(float)
    out = np.zeros_like(pc)
    out[1:] = 1.0 / pc[1:]
    return out


def partial_derivative(f: CubeFunction, j: int) -> CubeFunction:
    _check_coord(f.n, j)
    return apply_multiplier(f, contains_mask(f.n, j))


def laplacian(f: CubeFunction) -> CubeFunction:
    return apply_multiplier(f, popcounts(f.n))


def inverse_laplacian(f: CubeFunction) -> CubeFunction:
    """Inverse of the Laplacian on mean-zero functions; the mean of f is discarded."""
    return apply_multiplier(f, inverse_size(f.n))


def rademacher_projection(f: CubeFunction) -> CubeFunction:
    return apply_multiplier(f, (popcounts(f.n) == 1).astype(float))


def inv_lap_partial(f: CubeFunction, j: int) -> CubeFunction:
    """``Delta^{-1} d_j f``: multiplier ``1{j in A}/|A|``."""
    _check_coord(f.n, j)
    return apply_multiplier(f, contains_mask(f.n, j) * inverse_size(f.n))


# --- bi-cube helpers -------------------------------------------------------

def extract_Fj(F: BiCubeFunction, j: int) -> CubeFunction:
    """``F_j(eps) = int delta_j F(eps, delta) dmu(delta)``; returned in F's eps basis."""
    _check_coord(F.n, j)
    g = F.with_bases(F.eps_basis, "point").grid()
    s = sign_matrix(F.n)[:, j - 1]
    return CubeFunction(F.n, np.tensordot(s, g, axes=(0, 0)) / (1 << F.n), F.eps_basis)


def rademacher_in_delta(F: BiCubeFunction) -> BiCubeFunction:
    """Keep only the delta-Walsh coefficients with ``|C| = 1``."""
    W = F.with_bases(F.eps_basis, "walsh")
    keep = (popcounts(F.n) == 1).astype(float)
    g = W.grid() * keep[:, None, None]
    return BiCubeFunction.from_grid(F.n, g, F.eps_basis, "walsh").with_bases(F.eps_basis, F.delta_basis)


def operator_S(F: BiCubeFunction) -> CubeFunction:
    """``S(F) = sum_j Delta^{-1} d_j F_j`` (point basis)."""
    n = F.n
    G = F.with_bases("walsh", "walsh").grid()
    # delta-coefficient at {j} sits at row 1 << (j-1)
    inv = inverse_size(n)
    acc = np.zeros((1 << n, F.dim))
    for j in range(1, n + 1):
        acc += (contains_mask(n, j) * inv)[:, None] * G[1 << (j - 1)]
    return CubeFunction(n, acc, "walsh").point()


def _delta_sum_over_A(n: int) -> np.ndarray:
    """``M[delta, A] = sum_{j in A} delta_j`` = ``|A| - 2 popcount(A & delta)``."""
    pc = popcounts(n)
    idx = np.arange(1 << n)
    return (pc[None, :] - 2 * pc[idx[:, None] & idx[None, :]]).astype(float)


def adjoint_S_star(g: CubeFunction) -> BiCubeFunction:
    """``S*(g)(delta) = sum_j delta_j Delta^{-1} d_j g`` (point basis in both variables)."""
    n = g.n
    check_n(n, "bicube")
    c = g.walsh().values
    M = _delta_sum_over_A(n) * inverse_size(n)[None, :]
    grid = M[:, :, None] * c[None, :, :]
    return BiCubeFunction.from_grid(n, grid, "walsh", "point").point()


# --- martingale filtration -------------------------------------------------

def prefix_mask(sigma: Permutation, k: int) -> int:
    """Bitmask of ``{sigma^{-1}(1), ..., sigma^{-1}(k)}``."""
    inv = sigma.inverse
    mask = 0
    for i in range(k):
        mask |= 1 << (inv[i] - 1)
    return mask


def martingale_step(g: CubeFunction, sigma: Permutation, k: int) -> CubeFunction:
    """``g_k^sigma``: the Walsh coefficients of g supported inside the first k revealed coordinates."""
    if sigma.n != g.n:
        raise ValueError(f"permutation of size {sigma.n} for n={g.n}")
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range 0..{g.n}")
    mask = prefix_mask(sigma, k)
    keep = ((np.arange(1 << g.n) & ~mask) == 0).astype(float)
    return apply_multiplier(g, keep)


def permutation_averaged_difference(g: CubeFunction, j: int, samples: int | None = None,
                                    rng=None) -> CubeFunction:
    """``(1/n!) sum_sigma (g^sigma_{sigma(j)} - g^sigma_{sigma(j)-1})``, summed literally.

    Above the enumeration cap the average runs over ``samples`` uniform
    permutations instead (and raises ``SizingError`` if ``samples`` is None).
    """
    _check_coord(g.n, j)
    perms, _ = permutations_for(g.n, samples, rng)
    gw = g.walsh()
    acc = np.zeros_like(gw.values)
    for sigma in perms:
        k = sigma(j)
        acc += martingale_step(gw, sigma, k).values - martingale_step(gw, sigma, k - 1).values
    return CubeFunction(g.n, acc / len(perms), "walsh").point()


def permutation_average_transform(g: CubeFunction, samples: int | None = None,
                                  rng=None) -> BiCubeFunction:
    """``(delta, eps) -> (1/n!) sum_sigma sum_j delta_j (g^sigma_{sigma(j)} - g^sigma_{sigma(j)-1})(eps)``."""
    n = g.n
    check_n(n, "bicube")
    perms, _ = permutations_for(n, samples, rng)
    gw = g.walsh()
    S = sign_matrix(n)
    acc = np.zeros((1 << n, 1 << n, g.dim))
    for sigma in perms:
        steps = [martingale_step(gw, sigma, k).point().values for k in range(n + 1)]
        for j in range(1, n + 1):
            k = sigma(j)
            acc += S[:, j - 1, None, None] * (steps[k] - steps[k - 1])[None]
    return BiCubeFunction.from_grid(n, acc / len(perms))


# --- G_t, V_t and the t-integral --------------------------------------------

def _check_t(t: float) -> None:
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie strictly inside (0, 1), got {t}")


def product_table(n: int, t: float) -> np.ndarray:
    """``P[delta, A] = prod_{i in A} (t + (1-t) delta_i)``, evaluated factor by factor."""
    S = sign_matrix(n)
    factors = t + (1.0 - t) * S  # (delta, i)
    P = np.ones((1 << n, 1 << n))
    for i in range(n):
        inA = ((np.arange(1 << n) >> i) & 1).astype(bool)
        P[:, inA] *= factors[:, i, None]
    return P


def build_G_t(g: CubeFunction, t: float) -> BiCubeFunction:
    r"""``G_t(delta)(eps) = (1/(1-t)) sum_A g^(A) W_A(eps) prod_{i in A}(t+(1-t)delta_i) - t^n/(1-t) g(eps)``."""
    _check_t(t)
    n = g.n
    check_n(n, "bicube")
    c = g.walsh().values
    P = product_table(n, t) - t ** n
    grid = P[:, :, None] * c[None, :, :] / (1.0 - t)
    return BiCubeFunction.from_grid(n, grid, "walsh", "point").point()


def build_V_t(g: CubeFunction, t: float) -> BiCubeFunction:
    """``V_t(g)(delta) = G_t(delta) - (mean over delta of G_t)``."""
    _check_t(t)
    n = g.n
    check_n(n, "bicube")
    c = g.walsh().values
    P = product_table(n, t) - t ** popcounts(n)[None, :].astype(float)
    grid = P[:, :, None] * c[None, :, :] / (1.0 - t)
    return BiCubeFunction.from_grid(n, grid, "walsh", "point").point()


def integral_weights(n: int) -> np.ndarray:
    """``w[a, c]``: joint Walsh weight of ``W_A(eps) W_C(delta)`` in the t-integral of G_t.

    ``(a-c)! (c-1)! / a!`` for ``1 <= c <= a`` and ``H_n - H_a`` for ``c = 0``.
    """
    H = HarmonicTable.up_to(n)
    w = np.zeros((n + 1, n + 1))
    for a in range(n + 1):
        w[a, 0] = H[n] - H[a]
        for c in range(1, a + 1):
            w[a, c] = float(Fraction(math.factorial(a - c) * math.factorial(c - 1), math.factorial(a)))
    return w


def integrate_G(g: CubeFunction) -> BiCubeFunction:
    """Closed form of ``int_0^1 G_t dt`` (both variables in Walsh basis)."""
    n = g.n
    check_n(n, "bicube")
    c = g.walsh().values
    pc = popcounts(n)
    idx = np.arange(1 << n)
    w = integral_weights(n)
    # rows C (delta), columns A (eps)
    subset = (idx[:, None] & ~idx[None, :]) == 0
    W = np.where(subset, w[pc[None, :], pc[:, None]], 0.0)
    grid = W[:, :, None] * c[None, :, :]
    return BiCubeFunction.from_grid(n, grid, "walsh", "walsh")


def phi_remainder(g: CubeFunction) -> BiCubeFunction:
    """``int G_t dt`` minus its delta-Rademacher part."""
    I = integrate_G(g)
    return I - rademacher_in_delta(I)
