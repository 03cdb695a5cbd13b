"""Acceptance criteria: one callable per criterion, each self-contained.

Every criterion states its tolerance inline and returns a CriterionResult
with the measured numbers.  Grid sizes are chosen per criterion so the
measurement window respects the wrap-safety rule (contamination from the
periodic images well below the tolerance); tail/constant criteria therefore
use boxes larger than the generic N=2^16, L=400 default, which at x = 200
already suffers ~15% image contamination for a 1/x^2 tail.  eta is a free
model parameter and is chosen per experiment where the asymptotic regime
must be numerically reachable (rationale in comments).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .analysis import (dichotomy_experiment, growth_envelope, lower_bound_check,
                       mean, tail_exponent, weighted_persistence_experiment)
from .errors import ExcludedParameters
from .kernel import (asymptotic_coefficient, kernel_derivative_field,
                     kernel_field, kernel_hat)
from .model import DispersionSymbol, preset, validate_params
from .solver import (DatumSpec, SolverConfig, make_datum, picard_solve, solve)
from .spectral import Field, Grid, convolve


@dataclass
class CriterionResult:
    cid: str
    passed: bool
    expected: str
    measured: Dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        meas = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in self.measured.items())
        return f"[{status}] {self.cid:14s} expected {self.expected}; measured {meas} ({self.seconds:.1f}s)"


KDV = DispersionSymbol.kdv()


def _both_side_exponents(fieldv, window):
    left, right = tail_exponent(fieldv, window)
    return left.exponent, right.exponent


def crit_k_mod_even() -> CriterionResult:
    """|Khat| == exp(-eta |xi|^2 t) exactly for n even (m=2, n=2, t=0.5)."""
    grid = Grid(2 ** 16, 400.0)
    params = validate_params(2, 2, 1, 1.0)
    khat = kernel_hat(0.5, grid.xi, KDV, params)
    diff = float(np.max(np.abs(np.abs(khat) - np.exp(-np.abs(grid.xi) ** 2 * 0.5))))
    return CriterionResult("K-MOD-EVEN", diff <= 1e-12, "max diff <= 1e-12",
                           {"max_diff": diff})


def crit_k_mass() -> CriterionResult:
    """Discrete integral of K equals 1 for all five presets, t in {0.2, 1, 3}."""
    grid = Grid(2 ** 16, 400.0)
    worst = 0.0
    for name in ("ost", "gost", "bo_perturbed", "chen_lee", "dgbo_perturbed"):
        sym, params = preset(name)
        for t in (0.2, 1.0, 3.0):
            kf = kernel_field(t, grid, sym, params)
            worst = max(worst, abs(kf.mass - 1.0))
    return CriterionResult("K-MASS", worst <= 1e-8, "|mass - 1| <= 1e-8",
                           {"worst_mass_error": worst})


def crit_k_semi() -> CriterionResult:
    """Semigroup: K(0.3) * K(0.7) = K(1.0) to 1e-8 relative sup norm."""
    grid = Grid(2 ** 16, 400.0)
    sym, params = preset("ost")
    k3 = kernel_field(0.3, grid, sym, params).field
    k7 = kernel_field(0.7, grid, sym, params).field
    k10 = kernel_field(1.0, grid, sym, params).field
    conv = convolve(k3, k7)
    rel = float(np.max(np.abs(conv.samples - k10.samples))
                / np.max(np.abs(k10.samples)))
    return CriterionResult("K-SEMI", rel <= 1e-8, "rel sup error <= 1e-8",
                           {"rel_error": rel})


def crit_k_tail_1() -> CriterionResult:
    """Kernel tail exponent n+1 = 2 for (m=3, n=1, t=1), +-0.1.

    L = 3200 keeps image contamination at x = 200 near 0.2% (the wrap rule).
    """
    grid = Grid(2 ** 19, 3200.0)
    kf = kernel_field(1.0, grid, KDV, validate_params(3, 1, 1, 1.0))
    lo, hi = _both_side_exponents(kf.field, (20.0, 200.0))
    ok = abs(lo - 2.0) <= 0.1 and abs(hi - 2.0) <= 0.1
    return CriterionResult("K-TAIL-1", ok, "exponent 2.0 +- 0.1",
                           {"left": lo, "right": hi})


def crit_k_tail_2() -> CriterionResult:
    """Kernel tail exponent 3 for (m=3, n=2, t=1), +-0.15 (smooth symbol)."""
    grid = Grid(2 ** 18, 1600.0)
    kf = kernel_field(1.0, grid, KDV, validate_params(3, 2, 1, 1.0))
    lo, hi = _both_side_exponents(kf.field, (30.0, 250.0))
    ok = abs(lo - 3.0) <= 0.15 and abs(hi - 3.0) <= 0.15
    return CriterionResult("K-TAIL-2", ok, "exponent 3.0 +- 0.15",
                           {"left": lo, "right": hi})


def crit_k_tail_4() -> CriterionResult:
    """Kernel tail exponent 5 for (m=2, n=4, t=0.5), +-0.25.

    For n even the H d_x^n symbol is purely imaginary, so its stationary-phase
    contribution exp(-c x^{2/3}) masks the x^-5 jump term until far x when
    damping is weak.  eta = 4 (free parameter) moves the crossover to
    x ~ 500; window [600, 1400] on an L = 3200 box measures the true power
    law a decade above the FFT noise floor.
    """
    grid = Grid(2 ** 19, 3200.0)
    kf = kernel_field(0.5, grid, KDV, validate_params(2, 4, 1, 4.0))
    lo, hi = _both_side_exponents(kf.field, (600.0, 1400.0))
    ok = abs(lo - 5.0) <= 0.25 and abs(hi - 5.0) <= 0.25
    return CriterionResult("K-TAIL-4", ok, "exponent 5.0 +- 0.25",
                           {"left": lo, "right": hi})


def crit_k_const() -> CriterionResult:
    """|x|^2 |K(1, x)| within 5% of 1/pi for (m=3, n=1, eta=1) on [50, 200]."""
    grid = Grid(2 ** 19, 3200.0)
    params = validate_params(3, 1, 1, 1.0)
    kf = kernel_field(1.0, grid, KDV, params)
    target = asymptotic_coefficient(1.0, params)  # = 1/pi
    x = grid.x
    msk = (np.abs(x) >= 50.0) & (np.abs(x) <= 200.0)
    vals = np.abs(x[msk]) ** 2 * np.abs(kf.field.samples[msk])
    dev = float(np.max(np.abs(vals - target)) / target)
    return CriterionResult("K-CONST", dev <= 0.05,
                           "x^2|K| within 5% of 1/pi = 0.31831",
                           {"max_rel_dev": dev, "target": target})


def crit_k_deriv() -> CriterionResult:
    """d_x K tail exponent n+2 = 3 for (m=3, n=1, t=1), +-0.15."""
    grid = Grid(2 ** 19, 3200.0)
    dk = kernel_derivative_field(1.0, grid, KDV, validate_params(3, 1, 1, 1.0))
    lo, hi = _both_side_exponents(dk, (20.0, 150.0))
    ok = abs(lo - 3.0) <= 0.15 and abs(hi - 3.0) <= 0.15
    return CriterionResult("K-DERIV", ok, "exponent 3.0 +- 0.15",
                           {"left": lo, "right": hi})


def crit_s_conv() -> CriterionResult:
    """ETD2 self-convergence order >= 1.9 on the OST preset (Richardson)."""
    sym, params = preset("ost")
    grid = Grid(2 ** 12, 64.0)
    u0 = make_datum(DatumSpec(kind="gaussian", sigma0=2.0, amp=0.5), grid)
    finals = []
    for dt in (1e-3, 5e-4, 2.5e-4):
        cfg = SolverConfig(dt=dt, T=0.25, snapshot_times=(0.25,))
        finals.append(solve(sym, params, u0, cfg).snapshots[-1])
    d12 = float(np.sqrt(np.sum(np.abs(finals[0].samples - finals[1].samples) ** 2)
                        * grid.dx))
    d23 = float(np.sqrt(np.sum(np.abs(finals[1].samples - finals[2].samples) ** 2)
                        * grid.dx))
    order = math.log2(d12 / d23)
    return CriterionResult("S-CONV", order >= 1.9, "observed order >= 1.9",
                           {"order": order, "d12": d12, "d23": d23})


def crit_s_xcheck() -> CriterionResult:
    """Picard and ETD agree to 1e-6 in L2 at T = 0.1 (small Gaussian, OST)."""
    sym, params = preset("ost")
    grid = Grid(2 ** 12, 64.0)
    u0 = make_datum(DatumSpec(kind="gaussian", sigma0=1.0, amp=0.01), grid)
    cfg = SolverConfig(dt=1e-3, T=0.1, snapshot_times=(0.1,))
    u_etd = solve(sym, params, u0, cfg).snapshots[-1]
    u_pic, report = picard_solve(sym, params, u0,
                                 SolverConfig(dt=1e-3, T=0.1, mode="picard",
                                              picard_tol=1e-12))
    diff = float(np.sqrt(np.sum(np.abs(u_etd.samples - u_pic.samples) ** 2)
                         * grid.dx))
    return CriterionResult("S-XCHECK", diff <= 1e-6, "||picard - etd||_2 <= 1e-6",
                           {"l2_diff": diff, "picard_iterations": report["iterations"]})


def crit_e_mono() -> CriterionResult:
    """Energy non-increasing per step (slack 1e-10) for (2,2) and (2,3)."""
    grid = Grid(2 ** 12, 64.0)
    u0 = make_datum(DatumSpec(kind="gaussian", sigma0=2.0, amp=0.5), grid)
    worst = -np.inf
    for n in (2, 3):
        params = validate_params(2, n, 1, 1.0)
        traj = solve(KDV, params, u0, SolverConfig(dt=1e-3, T=1.0))
        worst = max(worst, float(np.max(np.diff(traj.energy_series))))
    return CriterionResult("E-MONO", worst <= 1e-10,
                           "max per-step energy increase <= 1e-10",
                           {"max_increase": worst})


def crit_e_grow() -> CriterionResult:
    """OST energy bound ||u(t)|| <= ||u0|| e^{eta t} * 1.01 on [0, 1]."""
    sym, params = preset("ost")
    grid = Grid(2 ** 12, 64.0)
    u0 = make_datum(DatumSpec(kind="gaussian", sigma0=2.0, amp=0.5), grid)
    traj = solve(sym, params, u0, SolverConfig(dt=1e-3, T=1.0))
    bound = traj.energy_series[0] * np.exp(params.eta * traj.energy_times) * 1.01
    ratio = float(np.max(traj.energy_series / bound))
    return CriterionResult("E-GROW", ratio <= 1.0,
                           "energy within e^{eta t} * 1.01 envelope",
                           {"max_ratio": ratio,
                            "peak_energy": float(np.max(traj.energy_series))})


def _t2_run(gamma: float) -> tuple:
    # eta = 0.5: at eta*t = pi c2/mass = 1 the x^-2 tail coefficient of the
    # evolved Lorentzian datum crosses zero (spectral-kink cancellation), so
    # the (eta=1, t=1) combination is degenerate; half strength keeps the
    # coefficient measurable.  L = 800 suppresses the periodized-datum
    # background (~6e-7) below 4% of the signal at x = 120.
    sym, params = preset("ost", eta=0.5)
    grid = Grid(2 ** 17, 800.0)
    u0 = make_datum(DatumSpec(kind="algebraic", gamma=gamma, c=0.5), grid)
    cfg = SolverConfig(dt=1e-3, T=1.0, snapshot_times=(1.0,))
    traj = solve(sym, params, u0, cfg)
    return _both_side_exponents(traj.snapshots[-1], (20.0, 120.0))


def crit_t2_decay() -> CriterionResult:
    """Solution tail saturates at n+1 = 2 (+-0.15) for gamma = 2 and 5."""
    lo2, hi2 = _t2_run(2.0)
    lo5, hi5 = _t2_run(5.0)
    ok = all(abs(v - 2.0) <= 0.15 for v in (lo2, hi2, lo5, hi5))
    return CriterionResult("T2-DECAY", ok, "exponent 2.0 +- 0.15 (gamma 2 and 5)",
                           {"gamma2_left": lo2, "gamma2_right": hi2,
                            "gamma5_left": lo5, "gamma5_right": hi5})


def crit_t3_dichotomy() -> CriterionResult:
    """OST, gamma = 3: nonzero-mean tail 2.0 +- 0.15; zero-mean >= 2.7."""
    sym, params = preset("ost")
    grid = Grid(2 ** 16, 400.0)
    report = dichotomy_experiment(sym, params, gamma_datum=3.0, T=1.0,
                                  grid=grid, dt=1e-3, window=(20.0, 120.0))
    return CriterionResult(
        "T3-DICHOTOMY", report["passed"],
        "nonzero-mean 2.0 +- 0.15, zero-mean >= 2.7, ordered",
        {"exp_nonzero": report["exponent_nonzero_mean"],
         "exp_zero": report["exponent_zero_mean"]})


def crit_t3_lower() -> CriterionResult:
    """Lower bound: linear-only ratio 1 +- 0.05 outermost; nonlinear in [0.5, 2]."""
    from .spectral import SpectralField, to_physical, to_spectral

    sym, params = preset("ost")
    grid = Grid(2 ** 17, 800.0)
    u0 = make_datum(DatumSpec(kind="algebraic", gamma=3.0, c=1.0), grid)
    khat = kernel_hat(1.0, grid.xi, sym, params)
    ulin = to_physical(SpectralField(grid, khat * to_spectral(u0).coefficients))
    windows = [(40.0, 80.0), (60.0, 120.0), (100.0, 200.0)]
    rep_lin = lower_bound_check(ulin, 1.0, params, mean(u0), windows=windows)
    lin_ok = abs(rep_lin["outer_ratio_median"] - 1.0) <= 0.05

    u0n = make_datum(DatumSpec(kind="algebraic", gamma=3.0, c=0.1), grid)
    traj = solve(sym, params, u0n, SolverConfig(dt=1e-3, T=1.0, snapshot_times=(1.0,)))
    rep_nl = lower_bound_check(traj.snapshots[-1], 1.0, params, mean(u0n),
                               windows=windows)
    ok = lin_ok and rep_nl["passes"]
    return CriterionResult(
        "T3-LOWER", ok, "linear ratio 1.0 +- 0.05; nonlinear in [0.5, 2]",
        {"linear_outer_ratio": rep_lin["outer_ratio_median"],
         "nonlinear_outer_ratio": rep_nl["outer_ratio_median"],
         "nonlinear_min": rep_nl["outer_ratio_min"],
         "nonlinear_max": rep_nl["outer_ratio_max"]})


def crit_t4_weighted() -> CriterionResult:
    """t^alpha ||u||_{L2_w} bounded on (0, 1] with t->0 log-slope >= -0.05."""
    sym, params = preset("ost")
    grid = Grid(2 ** 14, 100.0)
    u0 = make_datum(DatumSpec(kind="gaussian", sigma0=1.0, amp=1.0), grid)
    rep = weighted_persistence_experiment(sym, params, u0, p=2.0, gamma=0.5,
                                          T=1.0, dt=1e-3)
    return CriterionResult("T4-WEIGHTED", rep["bounded"],
                           "sup finite, low-t slope >= -0.05",
                           {"sup": rep["sup_t_weighted"],
                            "low_t_slope": rep["low_t_slope"]})


def crit_t5_growth() -> CriterionResult:
    """Growth datum gamma = 0.3, C0 = 1e-2: envelope <= 2 C0 up to T = 0.5."""
    sym, params = preset("ost")
    grid = Grid(2 ** 16, 400.0)
    u0 = make_datum(DatumSpec(kind="growth", gamma=0.3, c0=1e-2), grid)
    cfg = SolverConfig(dt=1e-3, T=0.5, snapshot_times=(0.125, 0.25, 0.375, 0.5))
    traj = solve(sym, params, u0, cfg)
    envs = [growth_envelope(u0, 0.3)] + [growth_envelope(s, 0.3)
                                         for s in traj.snapshots]
    worst = float(np.max(envs))
    return CriterionResult("T5-GROWTH", worst <= 2e-2,
                           "envelope <= 2 C0 = 0.02 on all snapshots",
                           {"max_envelope": worst})


def crit_cl_guard() -> CriterionResult:
    """chen_lee (m=2, n=1) must be rejected by the dichotomy experiment."""
    sym, params = preset("chen_lee")
    grid = Grid(2 ** 14, 400.0)
    try:
        dichotomy_experiment(sym, params, gamma_datum=3.0, T=0.5, grid=grid)
    except ExcludedParameters:
        return CriterionResult("CL-GUARD", True, "raises ExcludedParameters",
                               {"raised": 1.0})
    return CriterionResult("CL-GUARD", False, "raises ExcludedParameters",
                           {"raised": 0.0})


CRITERIA: Dict[str, Callable[[], CriterionResult]] = {
    "K-MOD-EVEN": crit_k_mod_even,
    "K-MASS": crit_k_mass,
    "K-SEMI": crit_k_semi,
    "K-TAIL-1": crit_k_tail_1,
    "K-TAIL-2": crit_k_tail_2,
    "K-TAIL-4": crit_k_tail_4,
    "K-CONST": crit_k_const,
    "K-DERIV": crit_k_deriv,
    "S-CONV": crit_s_conv,
    "S-XCHECK": crit_s_xcheck,
    "E-MONO": crit_e_mono,
    "E-GROW": crit_e_grow,
    "T2-DECAY": crit_t2_decay,
    "T3-DICHOTOMY": crit_t3_dichotomy,
    "T3-LOWER": crit_t3_lower,
    "T4-WEIGHTED": crit_t4_weighted,
    "T5-GROWTH": crit_t5_growth,
    "CL-GUARD": crit_cl_guard,
}


def run_criterion(cid: str) -> CriterionResult:
    start = time.time()
    result = CRITERIA[cid]()
    result.seconds = time.time() - start
    return result


def run_acceptance(ids: Optional[List[str]] = None, threads: int = 1,
                   quiet: bool = False) -> tuple:
    """Run the requested criteria; returns (results, skipped_ids)."""
    wanted = list(CRITERIA.keys()) if ids is None else list(ids)
    skipped = [cid for cid in wanted if cid not in CRITERIA]
    torun = [cid for cid in wanted if cid in CRITERIA]
    results: List[CriterionResult] = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_criterion, torun))
    else:
        for cid in torun:
            res = run_criterion(cid)
            if not quiet:
                print(res.line(), flush=True)
            results.append(res)
    if threads > 1 and not quiet:
        for res in results:
            print(res.line(), flush=True)
    return results, skipped
