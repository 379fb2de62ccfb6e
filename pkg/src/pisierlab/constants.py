"""Ratio objectives, extremal-constant estimation and closed-form bounds.

Two families of constants are estimated from below:

* the generalized Pisier constant, the best ``P`` in
  ``||sum_j d_j f_j||_p <= P ||sum_j delta_j Delta f_j||_{L_p(L_p)}``;
* the constant ``Q`` in ``||sum_j Delta^{-1} d_j f_j||_p <= Q (sum_j ||f_j||_p^p)^(1/p)``.

Estimates are lower bounds carried with their witness. Only the p = 2 Hilbert
case is computed exactly, by block-diagonalizing over Walsh levels.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cube import CubeFunction, check_n, popcounts, sign_matrix, walsh_matrix
from .operators import (
    contains_mask,
    harmonic,
    inv_lap_partial,
    inverse_laplacian,
    inverse_size,
    laplacian,
    partial_derivative,
)
from .spaces import (
    NormedSpace,
    format_exponent,
    lp_cube_norm,
    mean_p,
    parse_exponent,
    pointwise_norms,
)

_DEGENERATE = 1e-300


@dataclass(frozen=True, eq=False)
class PisierInstance:
    n: int
    p: float
    space: NormedSpace
    functions: tuple[CubeFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        fs = tuple(self.functions)
        object.__setattr__(self, "functions", fs)
        if len(fs) != self.n:
            raise ValueError(f"need {self.n} functions, got {len(fs)}")
        for f in fs:
            if f.n != self.n or f.dim != self.space.d:
                raise ValueError(f"function with (n={f.n}, d={f.dim}) does not match "
                                 f"(n={self.n}, d={self.space.d})")

    def coefficients(self) -> np.ndarray:
        """Walsh tables stacked as ``(n, 2**n, d)``."""
        return np.stack([f.walsh().values for f in self.functions])

    @classmethod
    def from_coefficients(cls, p, space: NormedSpace, coef: np.ndarray) -> PisierInstance:
        n = coef.shape[0]
        return cls(n, p, space, tuple(CubeFunction(n, c, "walsh") for c in coef))

    def scaled(self, alpha: float) -> PisierInstance:
        return PisierInstance(self.n, self.p, self.space, tuple(alpha * f for f in self.functions))


def _lp_over_family(norms: np.ndarray, p: float) -> float:
    """``(sum_j x_j^p)^(1/p)``; max at p = inf."""
    norms = np.asarray(norms, dtype=float)
    if math.isinf(p):
        return float(norms.max())
    return float((norms ** p).sum() ** (1.0 / p))


def pisier_sides(inst: PisierInstance) -> tuple[float, float]:
    """``(||sum_j d_j f_j||_p, ||(eps, delta) -> sum_j delta_j Delta f_j(eps)||_p)``."""
    n, p, space = inst.n, inst.p, inst.space
    lhs_f = partial_derivative(inst.functions[0], 1).point()
    for j in range(2, n + 1):
        lhs_f = lhs_f + partial_derivative(inst.functions[j - 1], j).point()
    lhs = lp_cube_norm(lhs_f, p, space)
    lap = np.stack([laplacian(f).point().values for f in inst.functions])  # (j, eps, d)
    S = sign_matrix(n)
    rhs_vals = np.einsum("dj,jek->dek", S, lap)
    rhs = float(mean_p(pointwise_norms(space, rhs_vals), p))
    return lhs, rhs


def _check_degenerate(num: float, den: float, what: str) -> None:
    if den <= _DEGENERATE and num > 1e-12:
        raise ArithmeticError(f"{what}: zero denominator with numerator {num!r}")


def pisier_ratio(inst: PisierInstance) -> float:
    """LHS/RHS of the generalized Pisier inequality; 0 when the RHS vanishes."""
    lhs, rhs = pisier_sides(inst)
    _check_degenerate(lhs, rhs, "pisier_ratio")
    return 0.0 if rhs <= _DEGENERATE else lhs / rhs


def classical_pisier_ratio(f: CubeFunction, p, space: NormedSpace) -> float:
    """``||f - mean f||_p / ||sum_j delta_j d_j f||_{L_p(L_p)}``."""
    p = parse_exponent(p)
    fp = f.point()
    centered = CubeFunction(f.n, fp.values - fp.values.mean(axis=0))
    num = lp_cube_norm(centered, p, space)
    parts = np.stack([partial_derivative(fp, j).values for j in range(1, f.n + 1)])
    vals = np.einsum("dj,jek->dek", sign_matrix(f.n), parts)
    den = float(mean_p(pointwise_norms(space, vals), p))
    return 0.0 if den <= _DEGENERATE else num / den


def _check_family(fs, space: NormedSpace) -> int:
    fs = list(fs)
    n = fs[0].n
    if len(fs) != n:
        raise ValueError(f"need n={n} functions, got {len(fs)}")
    for f in fs:
        if f.n != n or f.dim != space.d:
            raise ValueError("inconsistent family")
    return n


def q_ratio(fs, p, space: NormedSpace) -> float:
    """``||sum_j Delta^{-1} d_j f_j||_p / (sum_j ||f_j||_p^p)^(1/p)``; 0 for a zero denominator."""
    p = parse_exponent(p)
    fs = list(fs)
    n = _check_family(fs, space)
    acc = inv_lap_partial(fs[0], 1).point()
    for j in range(2, n + 1):
        acc = acc + inv_lap_partial(fs[j - 1], j).point()
    num = lp_cube_norm(acc, p, space)
    den = _lp_over_family([lp_cube_norm(f, p, space) for f in fs], p)
    _check_degenerate(num, den, "q_ratio")
    return 0.0 if den <= _DEGENERATE else num / den


def dual_q_ratio(g: CubeFunction, q, space: NormedSpace) -> float:
    """``(sum_j ||Delta^{-1} d_j g||_q^q)^(1/q) / ||g||_q``."""
    q = parse_exponent(q)
    den = lp_cube_norm(g, q, space)
    if den <= _DEGENERATE:
        raise ValueError("dual_q_ratio is undefined for g = 0")
    num = _lp_over_family([lp_cube_norm(inv_lap_partial(g, j), q, space)
                           for j in range(1, g.n + 1)], q)
    return num / den


def rademacher_ratio(xs, p, space: NormedSpace) -> float:
    """``(E ||sum_j eps_j x_j||^p)^(1/p) / (sum_j ||x_j||^p)^(1/p)``."""
    p = parse_exponent(p)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    n = xs.shape[0]
    check_n(n, "cube")
    num = float(mean_p(pointwise_norms(space, sign_matrix(n) @ xs), p))
    den = _lp_over_family(pointwise_norms(space, xs), p)
    return 0.0 if den <= _DEGENERATE else num / den


def enflo_ratio(f: CubeFunction, p, space: NormedSpace) -> float:
    """``(E ||f(eps) - f(-eps)||^p / 2^p)^(1/p) / (sum_j ||d_j f||_p^p)^(1/p)``."""
    p = parse_exponent(p)
    v = f.point().values
    antipodal = v[::-1]  # index N-1-i flips every coordinate
    num = float(mean_p(pointwise_norms(space, (v - antipodal) / 2), p))
    den = _lp_over_family([lp_cube_norm(partial_derivative(f, j), p, space)
                           for j in range(1, f.n + 1)], p)
    return 0.0 if den <= _DEGENERATE else num / den


def q_type_decomposition(fs, p, space: NormedSpace) -> dict:
    """Split ``q_ratio`` through the Pisier inequality and pointwise Rademacher type.

    For mean-zero ``f_j`` and ``h_j = Delta^{-1} f_j`` one has exactly
    ``q_ratio(f) = pisier_ratio(h) * radem_factor`` with
    ``radem_factor = ||sum_j delta_j f_j|| / (sum_j ||f_j||^p)^(1/p)``, and
    ``radem_factor <= max_eps rademacher_ratio(f_1(eps), ..., f_n(eps))``.
    """
    p = parse_exponent(p)
    fs = [f.point() for f in fs]
    n = _check_family(fs, space)
    hs = tuple(inverse_laplacian(f) for f in fs)
    inst = PisierInstance(n, p, space, hs)
    pis = pisier_ratio(inst)
    vals = np.einsum("dj,jek->dek", sign_matrix(n), np.stack([f.values for f in fs]))
    rhs = float(mean_p(pointwise_norms(space, vals), p))
    den = _lp_over_family([lp_cube_norm(f, p, space) for f in fs], p)
    stacked = np.stack([f.values for f in fs], axis=1)  # (eps, j, d)
    rad_max = max(rademacher_ratio(stacked[e], p, space) for e in range(1 << n))
    return {
        "q_ratio": q_ratio(fs, p, space),
        "pisier_ratio": pis,
        "radem_factor": rhs / den if den > _DEGENERATE else 0.0,
        "rademacher_max": rad_max,
    }


# --- closed forms -----------------------------------------------------------

def harmonic_bound(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return harmonic(n)


def interpolation_bound(p: float, theta: float) -> float:
    """``2 max{p, p/(p-1)} / (1 - theta)`` for p in (1, inf), theta in (0, 1)."""
    if not (1 < p < math.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if not (0 < theta < 1):
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    return 2.0 * max(p, p / (p - 1.0)) / (1.0 - theta)


def lr_interpolation_theta(r: float) -> float:
    """theta with ``1/r = (1-theta)/2``, i.e. l_r between l_2 and l_inf, for r > 2."""
    if not (2 < r < math.inf):
        raise ValueError(f"need 2 < r < inf, got {r}")
    return 1.0 - 2.0 / r


def vt_level_norm(t: float, a: int) -> float:
    return math.sqrt(max((t * t + (1 - t) ** 2) ** a - t ** (2 * a), 0.0)) / (1 - t)


def vt_norm_formula(t: float, n: int) -> float:
    """Exact ``L_2(H) -> L_2(L_2(H))`` norm of V_t: max over levels a = 1..n."""
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(vt_level_norm(t, a) for a in range(1, n + 1))


def hilbert_block_norms(n: int, d: int = 1) -> np.ndarray:
    """Largest singular value of each Walsh-level block of ``(g_j) -> sum_j Delta^{-1} d_j g_j``.

    At level A the map sends ``(c_1(A), ..., c_n(A))`` in ``(R^d)^n`` to
    ``sum_{j in A} c_j(A) / |A|``. Entry 0 (A empty) is 0.
    """
    out = np.zeros(1 << n)
    inv = inverse_size(n)
    for A in range(1, 1 << n):
        row = np.array([inv[A] if (A >> j) & 1 else 0.0 for j in range(n)])
        block = np.kron(row[None, :], np.eye(d))
        out[A] = np.linalg.svd(block, compute_uv=False)[0]
    return out


def exact_pisier_constant_hilbert_p2(n: int, d: int = 1) -> float:
    """Exact Pisier constant for p = 2 and X = l_2^d.

    With ``g_j = Delta f_j`` the right-hand side squared is ``sum_j ||g_j||^2``
    and the left-hand side is ``||sum_j Delta^{-1} d_j g_j||``, so the constant is
    the operator norm of that map, which splits over Walsh levels.
    """
    check_n(n, "cube")
    return float(hilbert_block_norms(n, d).max())


def exact_q_constant_hilbert_p2(n: int, d: int = 1) -> float:
    """Exact Q constant for p = 2 and l_2^d: the same level-block operator norm."""
    check_n(n, "cube")
    return float(hilbert_block_norms(n, d).max())


def q_trivial_bound(n: int, p: float) -> float:
    """``2 n^(1-1/p)``: each ``Delta^{-1} d_j`` has norm <= 2, then Hoelder."""
    p = parse_exponent(p)
    return 2.0 * n ** (1.0 - (0.0 if math.isinf(p) else 1.0 / p))


# --- optimizer ----------------------------------------------------------------

@dataclass
class OptimizerConfig:
    restarts: int = 50
    max_iter: int = 500
    fd_step: float = 1e-6
    tol: float = 1e-7
    sharpness: float = 200.0
    seed: int = 0
    gradient: str = "analytic"  # or "fd"
    patience: int = 5

    def __post_init__(self):
        for name in ("restarts", "max_iter", "fd_step", "tol", "sharpness", "patience"):
            if not getattr(self, name) > 0:
                raise ValueError(f"OptimizerConfig.{name} must be positive")
        if self.gradient not in ("analytic", "fd"):
            raise ValueError(f"unknown gradient mode {self.gradient!r}")


class _Norm:
    """``(sum_i m ||y_i||_r^p)^(1/p)`` over rows of y, optionally with smoothed maxima.

    Smoothing replaces an infinite exponent by the power mean with exponent
    ``sharpness``, i.e. a log-sum-exp of log-magnitudes, which keeps the value
    positively homogeneous.
    """

    def __init__(self, space: NormedSpace, p: float, mass: float, sharpness: float | None):
        self.w = np.asarray(space.weights)
        self.r_inf = math.isinf(space.r)
        self.p_inf = math.isinf(p)
        self.smooth = sharpness is not None
        self.r = sharpness if (self.r_inf and self.smooth) else space.r
        self.p = sharpness if (self.p_inf and self.smooth) else p
        self.mass = mass
        self.space = space

    def _inner(self, y):
        a = np.abs(y)
        if self.r_inf and not self.smooth:
            return (a * self.w).max(axis=-1), None
        if self.r_inf:
            a = a * self.w  # weights enter linearly at r = inf
            wr = 1.0
        else:
            wr = self.w
        if self.r == 2.0:
            rho = np.sqrt((a * a) @ (wr * np.ones(a.shape[-1])))
            safe = np.where(rho > 0, rho, 1.0)[..., None]
            dr = wr * y / safe
        elif self.r == 1.0:
            rho = a @ (wr * np.ones(a.shape[-1]))
            dr = wr * np.sign(y)
        else:
            m = a.max(axis=-1, keepdims=True)
            ms = np.where(m > 0, m, 1.0)
            core = ((a / ms) ** self.r) @ (wr * np.ones(a.shape[-1]))
            rho = m[..., 0] * core ** (1.0 / self.r)
            safe = np.where(rho > 0, rho, 1.0)[..., None]
            dr = wr * (a / safe) ** (self.r - 1.0) * np.sign(y)
        if self.r_inf:
            dr = dr * self.w
        dr = np.where(rho[..., None] > 0, dr, 0.0)
        return rho, dr

    def value(self, y) -> float:
        rho, _ = self._inner(y)
        return self._outer(rho)[0]

    def _outer(self, rho):
        rho = rho.ravel()
        if self.p_inf and not self.smooth:
            return float(rho.max()), None
        m = rho.max()
        if m <= 0:
            return 0.0, np.zeros_like(rho)
        s = rho / m
        N = m * float((self.mass * s ** self.p).sum() ** (1.0 / self.p))
        dN = self.mass * (rho / N) ** (self.p - 1.0)
        return N, dN

    def value_grad(self, y):
        rho, dr = self._inner(y)
        N, dN = self._outer(rho)
        return N, dN.reshape(rho.shape)[..., None] * dr


class _RatioObjective:
    """Log of a norm ratio as a function of the stacked Walsh tables ``x`` of shape (n, 2**n, d)."""

    kind = ""

    def __init__(self, n: int, p: float, space: NormedSpace, sharpness: float | None):
        self.n, self.p, self.space = n, p, space
        self.N = 1 << n
        self.masks = np.stack([contains_mask(n, j) for j in range(1, n + 1)])  # (j, A)
        self.signs = sign_matrix(n)  # (delta, j)
        self.sizes = popcounts(n).astype(float)
        # dense symmetric character table; the objectives only run at small n
        self.H = walsh_matrix(n)
        self.sharpness = sharpness
        self._norm_cache = {}

    def _H(self, a):
        """Unnormalized Walsh synthesis along the point axis (second to last)."""
        return np.matmul(self.H, a)

    def _mix(self, S, z):
        """``out[a] = sum_j S[a, j] z[j]`` for z of shape (n, N, d)."""
        return (S @ z.reshape(self.n, -1)).reshape(S.shape[0], *z.shape[1:])

    def ratio(self, x) -> float:
        num, den = self.sides(x, smooth=False)
        _check_degenerate(num, den, self.kind)
        return 0.0 if den <= _DEGENERATE else num / den

    def log_ratio_grad(self, x):
        num, gnum, den, gden = self.sides_grad(x)
        _check_degenerate(num, den, self.kind)
        if den <= _DEGENERATE or num <= _DEGENERATE:
            return -math.inf, np.zeros_like(x)
        return math.log(num) - math.log(den), gnum / num - gden / den

    def log_ratio(self, x, smooth=True) -> float:
        num, den = self.sides(x, smooth=smooth)
        _check_degenerate(num, den, self.kind)
        if den <= _DEGENERATE or num <= _DEGENERATE:
            return -math.inf
        return math.log(num) - math.log(den)

    def _norms(self, smooth: bool):
        if smooth not in self._norm_cache:
            sharp = self.sharpness if smooth else None
            self._norm_cache[smooth] = (self.num_norm(sharp), self.den_norm(sharp))
        return self._norm_cache[smooth]


class PisierObjective(_RatioObjective):
    kind = "pisier"

    def num_norm(self, sharp):
        return _Norm(self.space, self.p, 1.0 / self.N, sharp)

    def den_norm(self, sharp):
        return _Norm(self.space, self.p, 1.0 / self.N ** 2, sharp)

    def _points(self, x):
        lhs = self._H((self.masks[:, :, None] * x).sum(axis=0))
        z = self._H(self.sizes[None, :, None] * x)  # (j, eps, d)
        rhs = self._mix(self.signs, z)
        return lhs, rhs

    def sides(self, x, smooth=True):
        nn, dn = self._norms(smooth)
        lhs, rhs = self._points(x)
        return nn.value(lhs), dn.value(rhs)

    def sides_grad(self, x):
        nn, dn = self._norms(True)
        lhs, rhs = self._points(x)
        num, g_lhs = nn.value_grad(lhs)
        den, g_rhs = dn.value_grad(rhs)
        # adjoints of the linear maps; the unnormalized butterfly is symmetric
        gnum = self.masks[:, :, None] * self._H(g_lhs)[None]
        gz = (self.signs.T @ g_rhs.reshape(self.N, -1)).reshape(self.n, self.N, -1)
        gden = self.sizes[None, :, None] * self._H(gz)
        return num, gnum, den, gden

    def instance(self, x) -> PisierInstance:
        return PisierInstance.from_coefficients(self.p, self.space, x)

    def exact_check(self, x) -> float:
        return pisier_ratio(self.instance(x))


class QObjective(_RatioObjective):
    kind = "q"

    def num_norm(self, sharp):
        return _Norm(self.space, self.p, 1.0 / self.N, sharp)

    def den_norm(self, sharp):
        # (sum_j ||f_j||_p^p)^(1/p): every (j, eps) row carries mass 2**-n
        return _Norm(self.space, self.p, 1.0 / self.N, sharp)

    def _mult(self):
        return self.masks * inverse_size(self.n)[None, :]

    def _points(self, x):
        lhs = self._H((self._mult()[:, :, None] * x).sum(axis=0))
        vals = self._H(x)
        return lhs, vals

    def sides(self, x, smooth=True):
        nn, dn = self._norms(smooth)
        lhs, vals = self._points(x)
        return nn.value(lhs), dn.value(vals)

    def sides_grad(self, x):
        nn, dn = self._norms(True)
        lhs, vals = self._points(x)
        num, g_lhs = nn.value_grad(lhs)
        den, g_vals = dn.value_grad(vals)
        gnum = self._mult()[:, :, None] * self._H(g_lhs)[None]
        gden = self._H(g_vals)
        return num, gnum, den, gden

    def exact_check(self, x) -> float:
        fs = [CubeFunction(self.n, c, "walsh") for c in x]
        return q_ratio(fs, self.p, self.space)


def fd_gradient(obj: _RatioObjective, x: np.ndarray, step: float) -> np.ndarray:
    """Central finite differences of the smoothed log ratio, step relative to ``||x||``."""
    h = step * max(float(np.linalg.norm(x)), 1.0)
    g = np.zeros_like(x)
    flat, gflat = x.reshape(-1), g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = obj.log_ratio(x)
        flat[i] = orig - h
        down = obj.log_ratio(x)
        flat[i] = orig
        gflat[i] = (up - down) / (2 * h)
    return g


@dataclass
class ConstantEstimate:
    kind: str
    value: float
    bound: float
    n: int
    p: float
    space: str
    seed: int
    iterations: int
    restarts: int
    best_restart: int
    converged_restarts: int
    monte_carlo: bool = False
    restart_values: list = field(default_factory=list)
    witness: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("witness")
        d["p"] = format_exponent(self.p)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def witness_functions(self) -> list[CubeFunction]:
        return [CubeFunction(self.n, c, "walsh") for c in self.witness]


def _normalize(x: np.ndarray) -> np.ndarray:
    x = np.array(x, copy=True)
    x[:, 0, :] = 0.0  # the constant term is invisible to both ratios
    return x / np.linalg.norm(x)


def _ascend(obj: _RatioObjective, x: np.ndarray, cfg: OptimizerConfig):
    """Projected ascent of the smoothed log ratio on the unit sphere of Walsh tables."""
    smooth = math.isinf(obj.p) or math.isinf(obj.space.r)
    x = _normalize(x)

    def evaluate(z):
        if cfg.gradient == "fd":
            return obj.log_ratio(z), fd_gradient(obj, z, cfg.fd_step)
        return obj.log_ratio_grad(z)

    val, grad = evaluate(x)
    best_exact, best_x = obj.ratio(x), x
    eta, calm, it, converged = 0.3, 0, 0, False
    for it in range(1, cfg.max_iter + 1):
        tangent = grad - float(np.vdot(grad, x)) * x
        tangent[:, 0, :] = 0.0
        gnorm = float(np.linalg.norm(tangent))
        if gnorm < 1e-14:
            converged = True
            break
        trial = _normalize(x + eta * tangent / gnorm)
        tval, tgrad = evaluate(trial)
        if tval > val:
            gain = tval - val
            x, val, grad = trial, tval, tgrad
            eta = min(1.5 * eta, 1.0)
            if smooth:
                exact = obj.ratio(x)
                if exact > best_exact:
                    best_exact, best_x = exact, x
            else:
                best_exact, best_x = math.exp(val), x
            calm = calm + 1 if gain < cfg.tol else 0
            if calm >= cfg.patience:
                converged = True
                break
        else:
            eta *= 0.5
            if eta < 1e-10:
                converged = True
                break
    if not smooth:
        best_exact = obj.ratio(best_x)
    return best_x, best_exact, it, converged


def lift_witness(x: np.ndarray, n: int) -> np.ndarray:
    """Embed Walsh tables for dimension m < n into dimension n.

    The lifted functions ignore the new coordinates and the extra ``f_j`` are 0,
    which leaves both ratios unchanged.
    """
    m, N, d = x.shape
    if m > n:
        raise ValueError(f"cannot lift a witness from n={m} down to n={n}")
    out = np.zeros((n, 1 << n, d))
    out[:m, :N] = x
    return out


def _initial_point(rng, n: int, d: int, restart: int) -> np.ndarray:
    x0 = rng.standard_normal((n, 1 << n, d))
    if restart % 2:
        # odd restarts favour low Walsh degree
        x0 *= rng.uniform(0.05, 1.0) ** popcounts(n)[None, :, None]
    return x0


def _estimate(obj: _RatioObjective, kind: str, bound: float, cfg: OptimizerConfig,
              warm_start: np.ndarray | None = None) -> ConstantEstimate:
    n, d = obj.n, obj.space.d
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    starts = [(i, None) for i in range(cfg.restarts)]
    if warm_start is not None:
        starts.append((cfg.restarts, lift_witness(np.asarray(warm_start, dtype=float), n)))
    values, best, best_x, best_i, iters, conv = [], -1.0, None, -1, 0, 0
    for i, x0 in starts:
        if x0 is None:
            x0 = _initial_point(np.random.default_rng(children[i]), n, d, i)
        x, value, it, ok = _ascend(obj, x0, cfg)
        values.append(value)
        iters += it
        conv += int(ok)
        if value > best + 1e-9:  # ties go to the first restart found
            best, best_x, best_i = value, x, i
    check = obj.exact_check(best_x)
    if abs(check - best) > 1e-9 * max(1.0, best):
        raise ArithmeticError(f"{kind}: optimizer value {best} disagrees with direct ratio {check}")
    return ConstantEstimate(kind=kind, value=float(best), bound=float(bound), n=n, p=obj.p,
                            space=obj.space.descriptor(), seed=cfg.seed, iterations=iters,
                            restarts=len(starts), best_restart=best_i, converged_restarts=conv,
                            restart_values=[float(v) for v in values], witness=best_x)


def pisier_upper_bound(n: int, p: float, space: NormedSpace) -> float:
    if p == 2.0 and space.is_hilbert:
        return min(1.0, harmonic_bound(n))
    return harmonic_bound(n)


def q_upper_bound(n: int, p: float, space: NormedSpace) -> float:
    if p == 2.0 and space.is_hilbert:
        return 1.0
    return q_trivial_bound(n, p)


def estimate_pisier_constant(n: int, p, space: NormedSpace, cfg: OptimizerConfig | None = None,
                             warm_start: np.ndarray | None = None) -> ConstantEstimate:
    """Multi-start lower bound on the n-dimensional Pisier constant of ``space``.

    ``warm_start`` is an optional witness (Walsh tables, possibly of a smaller
    dimension) run as one extra start after the random ones.
    """
    cfg = cfg or OptimizerConfig()
    p = parse_exponent(p)
    check_n(n, "bicube")
    obj = PisierObjective(n, p, space, cfg.sharpness)
    return _estimate(obj, "pisier", pisier_upper_bound(n, p, space), cfg, warm_start)


def estimate_q_constant(n: int, p, space: NormedSpace, cfg: OptimizerConfig | None = None,
                        warm_start: np.ndarray | None = None) -> ConstantEstimate:
    """Multi-start lower bound on the Q constant of ``space``."""
    cfg = cfg or OptimizerConfig()
    p = parse_exponent(p)
    check_n(n, "cube")
    obj = QObjective(n, p, space, cfg.sharpness)
    return _estimate(obj, "q", q_upper_bound(n, p, space), cfg, warm_start)
