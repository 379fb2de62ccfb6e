"""Experiment drivers: identity suite, bound sweeps, constants sweep, lower bound.

Every driver returns a :class:`BoundReport`. Random inputs for a row are drawn
from ``default_rng(row.seed)``, and the row seed is derived from the run seed and
the row label, so a failing row can be replayed by calling its ``*_row``
function with the recorded seed.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import oracles
from .config import ExperimentConfig, row_seed
from .constants import (
    OptimizerConfig,
    estimate_pisier_constant,
    estimate_q_constant,
    harmonic_bound,
    interpolation_bound,
    lr_interpolation_theta,
    vt_level_norm,
    vt_norm_formula,
)
from .cube import (
    BiCubeFunction,
    CoordSet,
    CubeFunction,
    CubePoint,
    caps,
    inverse_walsh,
    popcounts,
    walsh_transform,
    walsh_value,
)
from .operators import (
    HarmonicTable,
    adjoint_S_star,
    all_permutations,
    build_G_t,
    build_V_t,
    integrate_G,
    inverse_laplacian,
    martingale_step,
    operator_S,
    partial_derivative,
    permutation_average_transform,
    permutation_averaged_difference,
    phi_remainder,
    rademacher_in_delta,
)
from .report import BoundReport, Row
from .spaces import l1cube, lp_bicube_norm, lp_cube_norm, mean_p, parse_space, pointwise_norms


def rel_err(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(float(np.abs(b).max()), 1e-300)
    return float(np.abs(a - b).max() / scale)


def abs_err(a, b) -> float:
    return float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).max())


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.t0) * 1e3 if self.enabled else 0.0


def _identity(cfg, label, n, check, tol, p=None, space=""):
    """Run ``check(rng) -> max error`` and wrap it as an identity row."""
    seed = row_seed(cfg.seed, label)
    with _Timer(cfg.timing) as tm:
        err = check(np.random.default_rng(seed))
    return Row(label, n, p, space, err, tol, seed=seed, runtime_ms=tm.ms)


# --- identity suite -------------------------------------------------------------

def _roundtrip(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            f = CubeFunction.random(n, d, rng)
            worst = max(worst, rel_err(inverse_walsh(walsh_transform(f)).values, f.values))
        return worst
    return check


def _parseval(n, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            f = CubeFunction.random(n, 1, rng)
            lhs = float((f.values ** 2).mean())
            rhs = float((f.walsh().values ** 2).sum())
            worst = max(worst, abs(lhs - rhs) / rhs)
        return worst
    return check


def _linearity(n, d):
    def check(rng):
        f, g = CubeFunction.random(n, d, rng), CubeFunction.random(n, d, rng)
        a, b = rng.standard_normal(2)
        lhs = walsh_transform(CubeFunction(n, a * f.values + b * g.values)).values
        rhs = a * walsh_transform(f).values + b * walsh_transform(g).values
        return rel_err(lhs, rhs)
    return check


def _walsh_value_check(n):
    def check(rng):
        worst = 0.0
        for A in range(1 << n):
            table = CubeFunction(n, np.eye(1 << n)[A], "walsh").point().values[:, 0]
            direct = [walsh_value(CoordSet(n, A), CubePoint(n, e)) for e in range(1 << n)]
            worst = max(worst, abs_err(table, direct))
        return worst
    return check


def _multiplier_vs_pointwise(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            f = CubeFunction.random(n, d, rng)
            for j in range(1, n + 1):
                worst = max(worst, rel_err(partial_derivative(f, j).point().values,
                                           oracles.partial_derivative_pointwise(f, j).values))
            worst = max(worst, rel_err(inverse_laplacian(f).point().values,
                                       oracles.inverse_laplacian_dense(f).values))
        return worst
    return check


def _commutation(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            f = CubeFunction.random(n, d, rng)
            f = f - CubeFunction.constant(n, f.values.mean(axis=0))
            for j in range(1, n + 1):
                a = partial_derivative(inverse_laplacian(f), j).point().values
                b = inverse_laplacian(partial_derivative(f, j)).point().values
                worst = max(worst, abs_err(a, b))
        return worst
    return check


def _martingale_property(n):
    def check(rng):
        g = CubeFunction.random(n, 1, rng)
        worst = 0.0
        for sigma in all_permutations(n):
            for k in range(1, n + 1):
                gk = martingale_step(g, sigma, k)
                cond = oracles.conditional_expectation_flip(gk, sigma.inverse[k - 1])
                worst = max(worst, abs_err(cond.values, martingale_step(g, sigma, k - 1).point().values))
                avg = oracles.martingale_step_averaging(g, sigma, k)
                worst = max(worst, abs_err(avg.values, gk.point().values))
        return worst
    return check


def _permutation_identity(n, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, 1, rng)
            worst = max(worst, abs_err(permutation_average_transform(g).values,
                                       oracles.adjoint_S_star_dense(g).values))
        return worst
    return check


def _permutation_difference(n, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, 1, rng)
            for j in range(1, n + 1):
                worst = max(worst, abs_err(permutation_averaged_difference(g, j).values,
                                           oracles.inv_lap_partial_dense(g, j).values))
        return worst
    return check


def _adjointness(n, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            F = BiCubeFunction(n, rng.standard_normal((1 << (2 * n), 1)))
            g = CubeFunction.random(n, 1, rng)
            lhs = float((operator_S(F).values * g.values).mean())
            rhs = float((F.values * adjoint_S_star(g).values).mean())
            worst = max(worst, abs(lhs - rhs))
        return worst
    return check


def _s_star_vs_dense(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, d, rng)
            worst = max(worst, abs_err(adjoint_S_star(g).values, oracles.adjoint_S_star_dense(g).values))
        return worst
    return check


def _integrated_identity(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, d, rng)
            rad = rademacher_in_delta(integrate_G(g)).point().values
            worst = max(worst, abs_err(rad, adjoint_S_star(g).values))
        return worst
    return check


def _phi_rad_zero(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, d, rng)
            worst = max(worst, float(np.abs(rademacher_in_delta(phi_remainder(g)).point().values).max()))
        return worst
    return check


def _phi_plus_s_star(n, d, samples):
    def check(rng):
        worst = 0.0
        for _ in range(samples):
            g = CubeFunction.random(n, d, rng)
            lhs = (phi_remainder(g) + adjoint_S_star(g)).point().values
            worst = max(worst, abs_err(lhs, integrate_G(g).point().values))
        return worst
    return check


def _integrate_quadrature(n, d):
    def check(rng):
        g = CubeFunction.random(n, d, rng)
        return abs_err(integrate_G(g).point().values, oracles.integrate_G_quadrature(g).values)
    return check


def _rad_of_G_t(n, t, d):
    def check(rng):
        g = CubeFunction.random(n, d, rng)
        rad = rademacher_in_delta(build_G_t(g, t)).point().grid()
        c = g.walsh().values
        pc = popcounts(n)
        # sum_{A nonempty} t^{|A|-1} (sum_{j in A} delta_j) g^(A) W_A
        idx = np.arange(1 << n)
        M = (pc[None, :] - 2 * pc[idx[:, None] & idx[None, :]]).astype(float)
        weight = np.where(pc > 0, t ** (pc - 1.0), 0.0)
        expected_w = (M * weight[None, :])[:, :, None] * c[None]
        expected = BiCubeFunction.from_grid(n, expected_w, "walsh", "point").point().grid()
        return abs_err(rad, expected)
    return check


def _vt_vs_gt(n, t, d):
    def check(rng):
        g = CubeFunction.random(n, d, rng)
        G = build_G_t(g, t).grid()
        V = build_V_t(g, t).grid()
        # V_t subtracts the delta-mean of G_t, so the Rademacher parts agree
        worst = abs_err(V, G - G.mean(axis=0, keepdims=True))
        rv = rademacher_in_delta(build_V_t(g, t)).point().values
        rg = rademacher_in_delta(build_G_t(g, t)).point().values
        return max(worst, abs_err(rv, rg))
    return check


def _harmonic_checks(n):
    def check(rng):
        H = HarmonicTable.up_to(n)
        worst = max(abs(H[k] - H[k - 1] - 1.0 / k) for k in range(1, n + 1))
        return worst
    return check


def _harmonic_quadrature(n):
    def check(rng):
        return max(abs(oracles.harmonic_quadrature(k) - harmonic_bound(k)) for k in range(1, n + 1))
    return check


def run_identity_suite(cfg: ExperimentConfig) -> BoundReport:
    """Every exact identity of the transform and operator layers, on random inputs."""
    rep = BoundReport()
    perm_ns = [k for k in cfg.n if k <= caps()["perm"]]
    small = [k for k in cfg.n if k <= 4] or [min(cfg.n)]
    s = cfg.samples
    items = [
        ("walsh_roundtrip[n=12;d=3]", 12, _roundtrip(12, 3, 5), 1e-12),
        ("walsh_roundtrip[n=10;d=4]", 10, _roundtrip(10, 4, 5), 1e-12),
        ("parseval[n=12]", 12, _parseval(12, 5), 1e-10),
        ("walsh_linearity[n=10;d=3]", 10, _linearity(10, 3), 1e-12),
        ("walsh_value_vs_inverse[n=6]", 6, _walsh_value_check(6), 0.0),
        ("harmonic_telescoping[n=14]", 14, _harmonic_checks(14), 1e-15),
        ("harmonic_vs_quadrature[n=14]", 14, _harmonic_quadrature(14), 1e-12),
    ]
    for n in cfg.n:
        items += [
            (f"multiplier_vs_pointwise[n={n}]", n, _multiplier_vs_pointwise(n, 2, s), 1e-10),
            (f"derivative_commutation[n={n}]", n, _commutation(n, 2, s), 1e-12),
            (f"adjointness[n={n}]", n, _adjointness(n, s), 1e-10),
            (f"s_star_vs_dense[n={n}]", n, _s_star_vs_dense(n, 2, s), 1e-10),
            (f"integrated_identity[n={n}]", n, _integrated_identity(n, 2, s), 1e-10),
            (f"phi_rad_zero[n={n}]", n, _phi_rad_zero(n, 2, s), 1e-12),
            (f"phi_plus_s_star[n={n}]", n, _phi_plus_s_star(n, 2, s), 1e-10),
            (f"rad_of_G_t[n={n};t=0.3]", n, _rad_of_G_t(n, 0.3, 2), 1e-10),
            (f"v_t_vs_g_t[n={n};t=0.6]", n, _vt_vs_gt(n, 0.6, 2), 1e-12),
        ]
    for n in perm_ns:
        items += [
            (f"martingale_property[n={n}]", n, _martingale_property(n), 1e-12),
            (f"permutation_identity[n={n}]", n, _permutation_identity(n, s), 1e-10),
            (f"permutation_difference[n={n}]", n, _permutation_difference(n, max(1, s // 4)), 1e-10),
        ]
    for n in small:
        items.append((f"integrate_G_vs_quadrature[n={n}]", n, _integrate_quadrature(n, 1), 1e-8))
    for label, n, check, tol in items:
        rep.add(_identity(cfg, "verify/" + label, n, check, tol))
    return rep


# --- sqrt(n) lower bound --------------------------------------------------------

def khintchine_l1(n: int) -> float:
    """``E |eta_1 + ... + eta_n|`` by exact enumeration over the number of minus signs."""
    return sum(math.comb(n, k) * abs(n - 2 * k) for k in range(n + 1)) / 2.0 ** n


def product_F(n: int) -> BiCubeFunction:
    """``F(eps, delta)(eta) = prod_i (1 + eps_i delta_i eta_i)`` with values in L_1 of the n-cube."""
    # prod_i (1 + x_i eta_i) = 2^n * [eta == x] for sign vectors x = eps * delta
    xi = (np.arange(1 << n)[None, :] ^ np.arange(1 << n)[:, None])  # index of eps*delta
    grid = np.zeros((1 << n, 1 << n, 1 << n))
    di, ei = np.meshgrid(np.arange(1 << n), np.arange(1 << n), indexing="ij")
    grid[di, ei, xi] = 2.0 ** n
    return BiCubeFunction.from_grid(n, grid)


def sqrt_n_direct(n: int, p) -> float:
    F = product_F(n)
    X = l1cube(n)
    return lp_cube_norm(operator_S(F), p, X) / lp_bicube_norm(F, p, X)


def sqrt_n_lower_bound(n: int, p=2.0, direct: bool | None = None) -> tuple[float, float | None]:
    """Ratio ``||S F||_p / ||F||_p`` for the product function F.

    Returns ``(reduced, direct)``; ``direct`` is None when the bi-cube table
    (``4**n`` rows of width ``2**n``) is skipped. By default it runs for n <= 5.
    """
    reduced = khintchine_l1(n)
    if direct is None:
        direct = n <= min(5, caps()["bicube"])
    return reduced, (sqrt_n_direct(n, p) if direct else None)


SQRT_N_EXACT = {1: 1.0, 2: 1.0, 3: 1.5}


def lowerbound_experiment(cfg: ExperimentConfig) -> BoundReport:
    rep = BoundReport()
    for p in cfg.p:
        for n in cfg.n:
            label = f"lowerbound[n={n}]"
            seed = row_seed(cfg.seed, label)
            with _Timer(cfg.timing) as tm:
                reduced, direct = sqrt_n_lower_bound(n, p)
            if n in SQRT_N_EXACT:
                rep.add(Row(f"lowerbound/exact_error[n={n}]", n, p, "l1cube:%d" % n,
                            abs(reduced - SQRT_N_EXACT[n]), 1e-12, seed=seed, runtime_ms=tm.ms))
            rep.add(Row(f"lowerbound/ratio[n={n}]", n, p, "l1cube:%d" % n, reduced, None, seed=seed))
            if n >= 4:
                rep.add(Row(f"lowerbound/ratio_over_sqrt_n[n={n}]", n, p, "l1cube:%d" % n,
                            reduced / math.sqrt(n), 1.0, lower=0.75, seed=seed))
            if direct is not None:
                rep.add(Row(f"lowerbound/direct_vs_reduced[n={n}]", n, p, "l1cube:%d" % n,
                            abs(direct - reduced), 1e-10, seed=seed))
    return rep


# --- G_t and V_t sweeps ----------------------------------------------------------

def gt_norm_row(n, t, q, space, samples, seed):
    """Worst ``||G_t(g)||`` over ``samples`` random g normalized to ``||g||_q = 1``."""
    rng = np.random.default_rng(seed)
    d = space.d
    gs = rng.standard_normal((samples, 1 << n, d))
    # G_t is linear, so the whole batch goes through one call with width samples*d
    batch = CubeFunction(n, gs.transpose(1, 0, 2).reshape(1 << n, samples * d))
    G = build_G_t(batch, t).values.reshape(-1, samples, d)
    gn = mean_p(pointwise_norms(space, gs), q, axis=1)
    Gn = mean_p(pointwise_norms(space, G), q, axis=0)
    return float((Gn / gn).max())


def gt_norm_bound_sweep(cfg: ExperimentConfig) -> BoundReport:
    rep = BoundReport()
    for n in cfg.n:
        for desc in cfg.spaces:
            space = parse_space(desc)
            for q in cfg.p:
                for t in cfg.t:
                    label = f"sweep-gt[n={n};t={t:g}]"
                    seed = row_seed(cfg.seed, f"{label}|{desc}|{q}")
                    bound = (1 - t ** n) / (1 - t)
                    with _Timer(cfg.timing) as tm:
                        worst = gt_norm_row(n, t, q, space, cfg.samples, seed)
                    rep.add(Row(f"sweep-gt/norm_bound[n={n};t={t:g}]", n, q, desc, worst, bound, tol=1e-9, seed=seed, runtime_ms=tm.ms))
                    c = CubeFunction.constant(n, np.arange(1, space.d + 1, dtype=float))
                    eq = abs(lp_bicube_norm(build_G_t(c, t), q, space) - bound * lp_cube_norm(c, q, space))
                    rep.add(Row(f"sweep-gt/constant_equality[n={n};t={t:g}]", n, q, desc, eq, 1e-12, seed=seed))
    return rep


def vt_lq_row(n, t, qs, samples, seed):
    """Worst ``||V_t(g)||_{L_q(L_q)}`` per q over random scalar g with ``||g||_q = 1``."""
    rng = np.random.default_rng(seed)
    gs = rng.standard_normal((1 << n, samples))
    V = build_V_t(CubeFunction(n, gs), t).values
    return {q: float((mean_p(V, q, axis=0) / mean_p(gs, q, axis=0)).max()) for q in qs}


def vt_norm_sweep(cfg: ExperimentConfig) -> BoundReport:
    rep = BoundReport()
    for n in cfg.n:
        for t in cfg.t:
            label = f"sweep-vt[n={n};t={t:g}]"
            seed = row_seed(cfg.seed, label)
            formula = vt_norm_formula(t, n)
            if n <= 8:
                with _Timer(cfg.timing) as tm:
                    dense = oracles.vt_operator_norm_dense(n, t)
                rep.add(Row(f"sweep-vt/formula_vs_dense[n={n};t={t:g}]", n, 2.0, "scalar",
                            abs(formula - dense), 1e-8, seed=seed, runtime_ms=tm.ms))
            rep.add(Row(f"sweep-vt/root_bound[n={n};t={t:g}]", n, 2.0, "scalar",
                        formula, 1 / math.sqrt(1 - t * t), seed=seed))
            with _Timer(cfg.timing) as tm:
                worst = vt_lq_row(n, t, cfg.p, cfg.samples, seed)
            for q in cfg.p:
                expo = max(1 / q, 1 - 1 / q)
                rep.add(Row(f"sweep-vt/lq_bound[n={n};t={t:g}]", n, q, "scalar", worst[q],
                            2 / (1 - t) ** expo, tol=1e-9, seed=seed, runtime_ms=tm.ms))
                rep.add(Row(f"sweep-vt/trivial_bound[n={n};t={t:g}]", n, q, "scalar", worst[q],
                            2 / (1 - t), tol=1e-9, seed=seed))
    return rep


# --- closed-form bounds ----------------------------------------------------------

def bounds_experiment(cfg: ExperimentConfig) -> BoundReport:
    rep = BoundReport()
    for n in cfg.n:
        rep.add(Row(f"bounds/harmonic[n={n}]", n, None, "", harmonic_bound(n), 1 + math.log(n), tol=1e-15))
    for p in cfg.p:
        if 1 < p < math.inf:
            for th in cfg.theta:
                rep.add(Row(f"bounds/interpolation[theta={th:g}]", 0, p, "", interpolation_bound(p, th), None))
    for n in cfg.n:
        for t in cfg.t:
            rep.add(Row(f"bounds/vt_formula[n={n};t={t:g}]", n, 2.0, "", vt_norm_formula(t, n),
                        1 / math.sqrt(1 - t * t), tol=1e-15))
            rep.add(Row(f"bounds/geometric_sum[a={n};t={t:g}]", n, None, "",
                        vt_level_norm(t, n) ** 2 * (1 - t) ** 2, (1 - t) / (1 + t), tol=1e-15))
    return rep


# --- constants sweep ------------------------------------------------------------

def _constants_chain(args):
    """Rows for one (p, space) over ascending n, with lifted warm starts."""
    ns, p, desc, ocfg, seed, timing = args
    space = parse_space(desc)
    rows, warm_p, warm_q = [], None, None
    for n in ns:
        label = f"constants[n={n}]"
        rs = row_seed(seed, f"{label}|{desc}|{p}")
        cfg = replace(ocfg, seed=rs)
        with _Timer(timing) as tm:
            est = estimate_pisier_constant(n, p, space, cfg, warm_start=warm_p)
        warm_p = est.witness
        H = harmonic_bound(n)
        rows.append(Row(f"constants/pisier_vs_harmonic[n={n}]", n, p, desc, est.value, H,
                        tol=1e-6, seed=rs, runtime_ms=tm.ms))
        if p == 2.0 and space.is_hilbert:
            rows.append(Row(f"constants/pisier_hilbert_exact[n={n}]", n, p, desc, est.value, 1.0,
                            lower=0.99, tol=1e-6, seed=rs))
        if p == 2.0 and 2 < space.r < math.inf:
            theta = lr_interpolation_theta(space.r)
            rows.append(Row(f"constants/pisier_vs_interpolation[n={n}]", n, p, desc, est.value,
                            interpolation_bound(p, theta), tol=1e-6, seed=rs))
        with _Timer(timing) as tm:
            qest = estimate_q_constant(n, p, space, cfg, warm_start=warm_q)
        warm_q = qest.witness
        rows.append(Row(f"constants/q_estimate[n={n}]", n, p, desc, qest.value, qest.bound,
                        tol=1e-6, seed=rs, runtime_ms=tm.ms))
    return rows


def constants_sweep(cfg: ExperimentConfig) -> BoundReport:
    cap = caps()["perm"]
    if max(cfg.n) > cap:
        raise ValueError(f"constants runs need n <= {cap}; got n={max(cfg.n)}")
    ns = sorted(cfg.n)
    ocfg = OptimizerConfig(restarts=cfg.restarts, max_iter=cfg.max_iter)
    tasks = [(ns, p, desc, ocfg, cfg.seed, cfg.timing) for p in cfg.p for desc in cfg.spaces]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chains = list(pool.map(_constants_chain, tasks))
    else:
        chains = [_constants_chain(t) for t in tasks]
    rep = BoundReport()
    for rows in chains:
        rep.extend(rows)
    return rep


DRIVERS = {
    "verify": run_identity_suite,
    "constants": constants_sweep,
    "bounds": bounds_experiment,
    "lowerbound": lowerbound_experiment,
    "sweep-gt": gt_norm_bound_sweep,
    "sweep-vt": vt_norm_sweep,
}


def run_experiment(cfg: ExperimentConfig) -> BoundReport:
    return DRIVERS[cfg.validate().experiment](cfg)
