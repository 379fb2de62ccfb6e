"""Weighted finite-dimensional l_r norms and the cube L_p norms built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube import BiCubeFunction, CubeFunction

INF = math.inf


def parse_exponent(text: str | float) -> float:
    """Parse an exponent in [1, inf]; ``inf``/``∞`` map to ``math.inf``."""
    if isinstance(text, (int, float)):
        value = float(text)
    else:
        t = text.strip().lower()
        value = INF if t in ("inf", "infinity", "∞") else float(t)
    if not (value >= 1):
        raise ValueError(f"exponent must lie in [1, inf], got {text!r}")
    return value


def format_exponent(r: float) -> str:
    if math.isinf(r):
        return "inf"
    return f"{r:g}"


@dataclass(frozen=True, eq=False)
class NormedSpace:
    """``x -> (sum_i w_i |x_i|^r)^(1/r)``; at ``r = inf`` it is ``max_i w_i |x_i|``."""

    d: int
    r: float = 2.0
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"space dimension must be >= 1, got {self.d}")
        object.__setattr__(self, "r", parse_exponent(self.r))
        w = np.ones(self.d) if self.weights is None else np.asarray(self.weights, dtype=float)
        if w.shape != (self.d,) or np.any(w <= 0):
            raise ValueError(f"need {self.d} positive weights, got {w!r}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    @property
    def is_hilbert(self) -> bool:
        return self.r == 2.0

    def descriptor(self) -> str:
        s = f"lr:{format_exponent(self.r)}:{self.d}"
        if not self.unit_weights:
            s += ":weights=" + ",".join(repr(float(w)) for w in self.weights)
        return s

    def __repr__(self):
        return f"NormedSpace({self.descriptor()!r})"

    def __eq__(self, other):
        return (isinstance(other, NormedSpace) and self.d == other.d and self.r == other.r
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.descriptor())


def lr(r, d: int, weights=None) -> NormedSpace:
    return NormedSpace(d, r, weights)


def l1cube(m: int) -> NormedSpace:
    """L_1 of the m-cube with its uniform probability measure."""
    return NormedSpace(1 << m, 1.0, np.full(1 << m, 2.0 ** -m))


def parse_space(text: str) -> NormedSpace:
    """Parse ``lr:<r>:<d>[:weights=<csv>]`` or ``l1cube:<m>``."""
    parts = text.strip().split(":")
    try:
        if parts[0] == "lr" and len(parts) in (3, 4):
            weights = None
            if len(parts) == 4:
                key, _, csv = parts[3].partition("=")
                if key != "weights":
                    raise ValueError(f"unknown option {parts[3]!r}")
                weights = [float(w) for w in csv.split(",")]
            return NormedSpace(int(parts[2]), parse_exponent(parts[1]), weights)
        if parts[0] == "l1cube" and len(parts) == 2:
            return l1cube(int(parts[1]))
    except ValueError as exc:
        raise ValueError(f"bad space descriptor {text!r}: {exc}") from None
    raise ValueError(f"bad space descriptor {text!r}; expected lr:<r>:<d>[:weights=...] or l1cube:<m>")


def pointwise_norms(space: NormedSpace, x: np.ndarray) -> np.ndarray:
    """Norms of the vectors along the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.d:
        raise ValueError(f"vector length {x.shape[-1]} does not match space dimension {space.d}")
    a = np.abs(x)
    if math.isinf(space.r):
        return (a * space.weights).max(axis=-1)
    if space.r == 1.0:
        return a @ space.weights
    if space.r == 2.0:
        return np.sqrt((a * a) @ space.weights)
    # scale by the row max first so large r does not overflow
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return m[..., 0] * (((a / safe) ** space.r) @ space.weights) ** (1.0 / space.r)


def space_norm(space: NormedSpace, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("space_norm expects a single vector")
    return float(pointwise_norms(space, x))


def mean_p(values: np.ndarray, p: float, axis=None) -> np.ndarray:
    """``(mean |v|^p)^(1/p)`` under the uniform probability measure; max at ``p = inf``."""
    v = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return v.max(axis=axis)
    if p == 1.0:
        return v.mean(axis=axis)
    if p == 2.0:
        return np.sqrt((v * v).mean(axis=axis))
    m = v.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return np.squeeze(m, axis=axis) * ((v / safe) ** p).mean(axis=axis) ** (1.0 / p)


def lp_cube_norm(f: CubeFunction, p, space: NormedSpace) -> float:
    """``(2**-n sum_eps ||f(eps)||^p)^(1/p)``."""
    p = parse_exponent(p)
    if f.dim != space.d:
        raise ValueError(f"function has dim {f.dim}, space has d={space.d}")
    return float(mean_p(pointwise_norms(space, f.point().values), p))


def lp_bicube_norm(F: BiCubeFunction, p, space: NormedSpace) -> float:
    """L_p norm over the product measure on cube x cube."""
    p = parse_exponent(p)
    if F.dim != space.d:
        raise ValueError(f"function has dim {F.dim}, space has d={space.d}")
    return float(mean_p(pointwise_norms(space, F.point().values), p))
