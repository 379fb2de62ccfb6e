"""Indexing of {-1,1}^n and the Walsh-Fourier transform for vector-valued data.

Conventions shared by the whole package:

* a point eps is stored as an integer index; bit ``j-1`` is 0 when ``eps_j = +1``
  and 1 when ``eps_j = -1``;
* a coordinate set A is a bitmask with bit ``j-1`` set iff ``j`` is in A;
* the forward transform carries the probabilist's ``2**-n`` factor, so the
  coefficient at A is the integral of ``f * W_A`` against the uniform measure.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal

import numpy as np

Basis = Literal["point", "walsh"]

CAPS_ENV = "PISIERLAB_MAX_N"
DEFAULT_CAPS = {"cube": 14, "bicube": 10, "perm": 6}


class SizingError(ValueError):
    """Raised when a dimension exceeds the configured memory/enumeration cap."""


def caps() -> dict[str, int]:
    """Current caps, with overrides from ``PISIERLAB_MAX_N="cube=14,bicube=10,perm=6"``."""
    out = dict(DEFAULT_CAPS)
    raw = os.environ.get(CAPS_ENV, "").strip()
    if not raw:
        return out
    for item in raw.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in out:
            raise ValueError(f"{CAPS_ENV}: bad entry {item!r}; expected cube=N,bicube=N,perm=N")
        out[key] = int(value)
    return out


def check_n(n: int, kind: str = "cube") -> None:
    cap = caps()[kind]
    if n < 1:
        raise ValueError(f"dimension n must be >= 1, got {n}")
    if n > cap:
        raise SizingError(f"n={n} exceeds the {kind} cap of {cap} (set {CAPS_ENV} to raise it)")


def popcounts(n: int) -> np.ndarray:
    """``popcounts(n)[m]`` is the number of set bits of ``m`` for ``m < 2**n``."""
    pc = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pc[1 << b : 1 << (b + 1)] = pc[: 1 << b] + 1
    return pc


def sign_matrix(n: int) -> np.ndarray:
    """``(2**n, n)`` array whose row ``i`` is the sign vector of point ``i``."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def walsh_matrix(n: int) -> np.ndarray:
    """Dense character table ``W[A, eps] = W_A(eps)``. Only for tests and small n."""
    idx = np.arange(1 << n)
    pc = popcounts(n)
    return 1.0 - 2.0 * (pc[idx[:, None] & idx[None, :]] & 1)


def fwht(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along ``axis`` (length must be 2**k).

    Returns ``sum_i (-1)**popcount(A & i) * values[i]`` for each A. The input is
    not modified.
    """
    # C-contiguous copy so the reshapes below are views into the scratch buffer
    x = np.array(np.moveaxis(np.asarray(values, dtype=float), axis, 0), order="C", copy=True)
    size = x.shape[0]
    if size & (size - 1):
        raise ValueError(f"transform length {size} is not a power of two")
    rest = x.shape[1:]
    h = 1
    while h < size:
        y = x.reshape(size // (2 * h), 2, h, *rest)
        a = y[:, 0].copy()
        y[:, 0] += y[:, 1]
        y[:, 1] = a - y[:, 1]
        h *= 2
    return np.moveaxis(x, 0, axis)


@dataclass(frozen=True)
class CubePoint:
    n: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for n={self.n}")

    @classmethod
    def from_signs(cls, signs) -> CubePoint:
        signs = list(signs)
        if any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        return cls(len(signs), sum(1 << j for j, s in enumerate(signs) if s == -1))

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(-1 if (self.index >> j) & 1 else 1 for j in range(self.n))

    def flip(self, j: int) -> CubePoint:
        """Point with coordinate ``j`` (1-based) negated."""
        if not 1 <= j <= self.n:
            raise ValueError(f"coordinate {j} out of range 1..{self.n}")
        return CubePoint(self.n, self.index ^ (1 << (j - 1)))


@dataclass(frozen=True)
class CoordSet:
    n: int
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} out of range for n={self.n}")

    @classmethod
    def of(cls, n: int, coords) -> CoordSet:
        mask = 0
        for j in coords:
            if not 1 <= j <= n:
                raise ValueError(f"coordinate {j} out of range 1..{n}")
            mask |= 1 << (j - 1)
        return cls(n, mask)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(j + 1 for j in range(self.n) if (self.mask >> j) & 1)


def walsh_value(A: CoordSet, eps: CubePoint) -> int:
    """``W_A(eps)``, the product of the coordinates of eps indexed by A."""
    if A.n != eps.n:
        raise ValueError(f"dimension mismatch: set has n={A.n}, point has n={eps.n}")
    return -1 if bin(A.mask & eps.index).count("1") & 1 else 1


def _as_rows(values, n: int, rows: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != rows:
        raise ValueError(f"expected {rows} rows of vectors for n={n}, got shape {arr.shape}")
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A map {-1,1}^n -> R^d stored as ``2**n`` rows, in point or Walsh basis."""

    n: int
    values: np.ndarray
    basis: Basis = "point"

    def __post_init__(self):
        check_n(self.n, "cube")
        if self.basis not in ("point", "walsh"):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "values", _as_rows(self.values, self.n, 1 << self.n))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def point(self) -> CubeFunction:
        return self if self.basis == "point" else inverse_walsh(self)

    def walsh(self) -> CubeFunction:
        return self if self.basis == "walsh" else walsh_transform(self)

    def in_basis(self, basis: Basis) -> CubeFunction:
        return self.point() if basis == "point" else self.walsh()

    # small algebra used throughout the tests and drivers
    def __add__(self, other: CubeFunction) -> CubeFunction:
        other = other.in_basis(self.basis)
        return CubeFunction(self.n, self.values + other.values, self.basis)

    def __sub__(self, other: CubeFunction) -> CubeFunction:
        other = other.in_basis(self.basis)
        return CubeFunction(self.n, self.values - other.values, self.basis)

    def __mul__(self, alpha: float) -> CubeFunction:
        return CubeFunction(self.n, alpha * self.values, self.basis)

    __rmul__ = __mul__

    @classmethod
    def constant(cls, n: int, c) -> CubeFunction:
        c = np.atleast_1d(np.asarray(c, dtype=float))
        return cls(n, np.tile(c, (1 << n, 1)))

    @classmethod
    def character(cls, n: int, coords, x=1.0) -> CubeFunction:
        """``x * W_A`` for A given by 1-based coordinates."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        coef = np.zeros((1 << n, x.size))
        coef[CoordSet.of(n, coords).mask] = x
        return cls(n, coef, "walsh")

    @classmethod
    def from_callable(cls, n: int, func) -> CubeFunction:
        """Tabulate ``func(signs)`` where ``signs`` is a tuple of +-1 values."""
        S = sign_matrix(n).astype(int)
        return cls(n, np.array([np.atleast_1d(func(tuple(s))) for s in S], dtype=float))

    @classmethod
    def random(cls, n: int, d: int = 1, rng=None) -> CubeFunction:
        rng = np.random.default_rng(rng)
        return cls(n, rng.standard_normal((1 << n, d)))


def walsh_transform(f: CubeFunction) -> CubeFunction:
    """Walsh coefficients ``2**-n * sum_eps f(eps) W_A(eps)``."""
    if f.basis != "point":
        raise ValueError("walsh_transform expects a point-basis function")
    return CubeFunction(f.n, fwht(f.values) / (1 << f.n), "walsh")


def inverse_walsh(c: CubeFunction) -> CubeFunction:
    """Point values ``sum_A c(A) W_A(eps)``."""
    if c.basis != "walsh":
        raise ValueError("inverse_walsh expects a Walsh-basis function")
    return CubeFunction(c.n, fwht(c.values), "point")


def cube_mean(f: CubeFunction) -> np.ndarray:
    if f.basis == "walsh":
        return f.values[0].copy()
    return f.values.mean(axis=0)


@dataclass(frozen=True, eq=False)
class BiCubeFunction:
    """A map (eps, delta) -> R^d on {-1,1}^n x {-1,1}^n.

    ``values`` has ``4**n`` rows; row ``eps + 2**n * delta``. Each variable has
    its own basis flag. :meth:`grid` exposes the ``(delta, eps, d)`` view.
    """

    n: int
    values: np.ndarray
    eps_basis: Basis = "point"
    delta_basis: Basis = "point"

    def __post_init__(self):
        check_n(self.n, "bicube")
        for b in (self.eps_basis, self.delta_basis):
            if b not in ("point", "walsh"):
                raise ValueError(f"unknown basis {b!r}")
        object.__setattr__(self, "values", _as_rows(self.values, self.n, 1 << (2 * self.n)))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def grid(self) -> np.ndarray:
        N = 1 << self.n
        return self.values.reshape(N, N, self.dim)

    @classmethod
    def from_grid(cls, n: int, grid: np.ndarray, eps_basis: Basis = "point",
                  delta_basis: Basis = "point") -> BiCubeFunction:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim == 2:
            grid = grid[..., None]
        return cls(n, grid.reshape(1 << (2 * n), grid.shape[-1]), eps_basis, delta_basis)

    @classmethod
    def from_callable(cls, n: int, func) -> BiCubeFunction:
        """Tabulate ``func(eps_signs, delta_signs)``."""
        S = sign_matrix(n).astype(int)
        rows = [np.atleast_1d(func(tuple(S[e]), tuple(S[dl])))
                for dl in range(1 << n) for e in range(1 << n)]
        return cls(n, np.array(rows, dtype=float))

    def with_bases(self, eps_basis: Basis, delta_basis: Basis) -> BiCubeFunction:
        if (eps_basis, delta_basis) == (self.eps_basis, self.delta_basis):
            return self
        g = self.grid()
        N = 1 << self.n
        if eps_basis != self.eps_basis:
            g = fwht(g, axis=1) / (N if eps_basis == "walsh" else 1)
        if delta_basis != self.delta_basis:
            g = fwht(g, axis=0) / (N if delta_basis == "walsh" else 1)
        return BiCubeFunction.from_grid(self.n, g, eps_basis, delta_basis)

    def point(self) -> BiCubeFunction:
        return self.with_bases("point", "point")

    def __add__(self, other: BiCubeFunction) -> BiCubeFunction:
        other = other.with_bases(self.eps_basis, self.delta_basis)
        return BiCubeFunction(self.n, self.values + other.values, self.eps_basis, self.delta_basis)

    def __sub__(self, other: BiCubeFunction) -> BiCubeFunction:
        other = other.with_bases(self.eps_basis, self.delta_basis)
        return BiCubeFunction(self.n, self.values - other.values, self.eps_basis, self.delta_basis)
