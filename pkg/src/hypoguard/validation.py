"""Empirical certification experiments.

Each experiment simulates replicas of a sampler at desk scale and asserts a
proven inequality against the empirical data, with an explicit Monte-Carlo
slack term: the inequalities are theorems, so a violation beyond slack
indicates an implementation bug rather than bad luck.

Reports are replayable ((config, seed) -> identical report) and flag
vacuous bounds: an asserted bound weaker than the trivial bound implied by
boundedness of the observable never counts as a pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .bernstein import BernsteinPair, psi, psi_star_inv
from .guarantees import concentration_bound, confidence_radius
from .hypocoercivity import HypoParams, bernstein_from_hypo
from .samplers import (
    replica_seed,
    simulate_bps,
    simulate_hhmc,
    simulate_langevin,
    simulate_zigzag,
    stream_rng,
    time_average,
)
from .targets import MomentumModel, Observable, TargetModel, gaussian_chi_square_norm

__all__ = [
    "ExperimentConfig",
    "ValidationReport",
    "run_replicas",
    "coverage_experiment",
    "tail_experiment",
    "mgf_experiment",
    "girsanov_entropy_rate_langevin",
    "jump_entropy_rate_zigzag",
    "uq_experiment",
]


@dataclass
class ExperimentConfig:
    """Everything needed to replay a validation experiment."""

    sampler: str  # zigzag | bps | hhmc | langevin
    target: TargetModel
    observable: Observable
    hypo: HypoParams
    T: float
    delta: float
    replicas: int
    seed: int
    refresh_rate: float = 1.0
    mass: float = 1.0
    gamma: float = 1.0
    step: float = 0.01
    reflection_factor: float = 2.0
    # initial distribution: None = stationary start; otherwise a 1-D Gaussian
    # (mean, var) on the position with momentum drawn from rho*
    initial: Optional[tuple[float, float]] = None

    def momentum(self) -> MomentumModel:
        kind = "rademacher" if self.sampler == "zigzag" else "gaussian"
        return MomentumModel(kind=kind, mass=self.mass, beta=self.target.beta)

    def dmu_norm(self) -> float:
        if self.initial is None:
            return 1.0
        if self.target.dim != 1:
            raise ValueError("non-stationary starts are supported in 1-D only")
        mu0, s2 = self.initial
        return gaussian_chi_square_norm(mu0, s2, self.target.marginal_var(0))


@dataclass
class ValidationReport:
    kind: str
    passed: bool
    vacuous: bool
    seed: int
    details: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": bool(self.passed),
            "vacuous": bool(self.vacuous),
            "seed": self.seed,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# replica engine


def _simulate_one(config: ExperimentConfig, seed: int):
    target = config.target
    q0 = p0 = None
    if config.initial is not None:
        rng = stream_rng(seed, "init")
        mu0, s2 = config.initial
        q0 = np.array([mu0 + math.sqrt(s2) * rng.standard_normal()])
        p0 = config.momentum().sample(rng, target.dim)
    if config.sampler == "zigzag":
        return simulate_zigzag(target, config.T, seed, refresh_rate=config.refresh_rate,
                               q0=q0, v0=p0)
    if config.sampler == "bps":
        return simulate_bps(target, config.momentum(), config.refresh_rate, config.T,
                            seed, q0=q0, p0=p0,
                            reflection_factor=config.reflection_factor)
    if config.sampler == "hhmc":
        return simulate_hhmc(target, config.momentum(), config.refresh_rate, config.T,
                             seed, integrator="exact" if target.is_quadratic else "leapfrog",
                             step=config.step, q0=q0, p0=p0)
    if config.sampler == "langevin":
        return simulate_langevin(target, config.momentum(), config.gamma, config.T,
                                 config.step, seed, q0=q0, p0=p0)
    raise ValueError(f"unknown sampler '{config.sampler}'")


def run_replicas(config: ExperimentConfig) -> dict:
    """Simulate all replicas; returns per-replica ergodic averages of the
    observable and of q, q^2 (first coordinate, used as a stationarity gate)."""
    f = config.observable
    q1 = lambda q: np.asarray(q)[..., 0]
    q2 = lambda q: np.asarray(q)[..., 0] ** 2
    F = np.empty(config.replicas)
    A1 = np.empty(config.replicas)
    A2 = np.empty(config.replicas)
    for i in range(config.replicas):
        traj = _simulate_one(config, replica_seed(config.seed, i))
        F[i] = time_average(traj, f)
        A1[i] = time_average(traj, q1)
        A2[i] = time_average(traj, q2)
    return {"F": F, "q_avg": A1, "q2_avg": A2}


def _stationarity_gate(config: ExperimentConfig, reps: dict) -> dict:
    """Compare pooled time averages of q and q^2 with the closed-form
    stationary moments (Gaussian targets, stationary starts only).

    3-sigma Monte-Carlo gate; a failure indicates the simulated dynamics do
    not preserve the target and poisons the whole report.
    """
    if config.initial is not None or not config.target.is_quadratic:
        return {"checked": False, "passed": True}
    var = config.target.marginal_var(0)
    M = config.replicas
    checks = {}
    ok = True
    for name, data, expected in (("q_mean", reps["q_avg"], 0.0),
                                 ("q_second_moment", reps["q2_avg"], var)):
        se = float(np.std(data, ddof=1)) / math.sqrt(M)
        dev = abs(float(np.mean(data)) - expected)
        passed = dev <= 3.0 * se + 1e-12
        ok &= passed
        checks[name] = {"observed": float(np.mean(data)), "expected": expected,
                        "std_error": se, "passed": passed}
    return {"checked": True, "passed": ok, "checks": checks}


# ---------------------------------------------------------------------------
# experiments


def coverage_experiment(config: ExperimentConfig) -> ValidationReport:
    """Empirical coverage of the two-sided confidence interval.

    Counts hits of F_T - mu*[f] in (-r_minus, r_plus) over the replicas and
    requires empirical coverage >= 1 - delta - 3 sqrt(delta(1-delta)/M).
    """
    stats = config.observable.stats
    pair, N, der = bernstein_from_hypo(config.hypo, stats, config.dmu_norm())
    r_minus, r_plus = confidence_radius(pair, pair, N, config.delta, config.T)
    reps = run_replicas(config)
    dev = reps["F"] - stats.mean
    hits = np.logical_and(dev > -r_minus, dev < r_plus)
    coverage = float(np.mean(hits))
    M = config.replicas
    slack = 3.0 * math.sqrt(config.delta * (1.0 - config.delta) / M)
    required = 1.0 - config.delta - slack
    vacuous = r_plus >= 2.0 * stats.sup_norm and r_minus >= 2.0 * stats.sup_norm
    gate = _stationarity_gate(config, reps)
    passed = (coverage >= required) and not vacuous and gate["passed"]
    return ValidationReport(
        kind="coverage", passed=passed, vacuous=vacuous, seed=config.seed,
        details={
            "coverage": coverage, "required": required, "delta": config.delta,
            "replicas": M, "r_minus": r_minus, "r_plus": r_plus,
            "N": N, "v": pair.v, "b": pair.b, "Lambda": der.Lambda,
            "T": config.T, "sup_norm": stats.sup_norm,
            "stationarity": gate,
            "F_T": [float(x) for x in reps["F"]],
        },
    )


def tail_experiment(config: ExperimentConfig, r_grid=None) -> ValidationReport:
    """Tail domination: empirical P(+-(F_T - mu*[f]) >= r) must stay below
    the theoretical bound plus 3 binomial standard errors at every r."""
    stats = config.observable.stats
    pair, N, der = bernstein_from_hypo(config.hypo, stats, config.dmu_norm())
    if r_grid is None:
        r_minus, r_plus = confidence_radius(pair, pair, N, config.delta, config.T)
        r_grid = np.linspace(0.0, max(r_plus, r_minus), 10)
    reps = run_replicas(config)
    dev = reps["F"] - stats.mean
    M = config.replicas
    rows = []
    violations = 0
    for r in r_grid:
        bound = concentration_bound(pair, der.c, config.dmu_norm(), float(r), config.T)
        for sign, data in (("+", dev), ("-", -dev)):
            emp = float(np.mean(data >= r))
            se = math.sqrt(emp * (1.0 - emp) / M)
            ok = emp <= bound + 3.0 * se
            violations += not ok
            rows.append({"r": float(r), "sign": sign, "empirical": emp,
                         "bound": bound, "std_error": se, "passed": ok})
    gate = _stationarity_gate(config, reps)
    passed = violations == 0 and gate["passed"]
    return ValidationReport(
        kind="tail", passed=passed, vacuous=False, seed=config.seed,
        details={"grid": rows, "violations": violations, "replicas": M,
                 "v": pair.v, "b": pair.b, "stationarity": gate},
    )


def mgf_experiment(config: ExperimentConfig, lambda_grid=None) -> ValidationReport:
    """Exponential-moment bound: the empirical scaled cumulant

        (1/T) log E[exp(lam T (F_T - mu*[f]))]

    must stay below psi(lam) + (1/T) log(||dmu/dmu*|| / c) + MC slack for
    every lam in the grid (all grid points must satisfy lam b < 1)."""
    stats = config.observable.stats
    pair, _, der = bernstein_from_hypo(config.hypo, stats, config.dmu_norm())
    if lambda_grid is None:
        hi = 0.5 / pair.b if pair.b > 0 else 1.0
        lambda_grid = np.linspace(0.0, hi, 5)
    for lam in lambda_grid:
        if pair.b > 0 and lam * pair.b >= 1.0:
            raise ValueError(f"grid point lambda={lam} violates lambda*b < 1")
    reps = run_replicas(config)
    dev = reps["F"] - stats.mean
    T, M = config.T, config.replicas
    prefactor = math.log(config.dmu_norm() / der.c) / T
    rows = []
    violations = 0
    for lam in lambda_grid:
        y = np.exp(lam * T * dev)
        mean_y = float(np.mean(y))
        se_log = float(np.std(y, ddof=1)) / math.sqrt(M) / mean_y
        empirical = math.log(mean_y) / T
        bound = psi(pair, float(lam)) + prefactor
        ok = empirical <= bound + 3.0 * se_log / T
        violations += not ok
        rows.append({"lambda": float(lam), "empirical": empirical, "bound": bound,
                     "std_error_log": se_log, "passed": ok})
    gate = _stationarity_gate(config, reps)
    passed = violations == 0 and gate["passed"]
    return ValidationReport(
        kind="mgf", passed=passed, vacuous=False, seed=config.seed,
        details={"grid": rows, "violations": violations, "replicas": M,
                 "v": pair.v, "b": pair.b, "stationarity": gate},
    )


# ---------------------------------------------------------------------------
# relative entropy rates


def _stationary_density_1d(target: TargetModel, lim: float = 40.0):
    beta = target.beta

    def raw(x: float) -> float:
        return math.exp(-beta * float(target.potential(np.array([x]))))

    Z, _ = integrate.quad(raw, -lim, lim)
    return lambda x: raw(x) / Z, lim


def girsanov_entropy_rate_langevin(
    base: TargetModel, alt: TargetModel, gamma: float, lim: float = 40.0
) -> float:
    """Relative entropy rate between the Langevin path measures driven by
    the alternative and baseline potentials, the alternative started in its
    own steady state:

        eta_inf = (beta / (4 gamma)) E_{nu_alt}[ |grad V_alt - grad V|^2 ].

    This is the drift-perturbation (Girsanov) rate for momentum diffusion
    coefficient 2 gamma / beta; the expectation is computed by adaptive
    quadrature against the alternative stationary density (1-D).
    """
    if base.dim != 1 or alt.dim != 1:
        raise ValueError("entropy rates are implemented in 1-D only")
    if base.beta != alt.beta:
        raise ValueError("baseline and alternative must share beta")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    dens, lim = _stationary_density_1d(alt, lim)

    def integrand(x: float) -> float:
        d = float(alt.gradient(np.array([x]))[0] - base.gradient(np.array([x]))[0])
        return d * d * dens(x)

    val, _ = integrate.quad(integrand, -lim, lim, limit=200)
    return base.beta / (4.0 * gamma) * val


def jump_entropy_rate_zigzag(
    base: TargetModel, alt: TargetModel, lim: float = 40.0
) -> float:
    """Relative entropy rate between 1-D zig-zag path measures with flip
    rates r = beta [v V']^+ (baseline) and r_alt (alternative), alternative
    started in its own steady state:

        eta_inf = E_{nu_alt x unif(+-1)}[ r_alt log(r_alt / r) - r_alt + r ].

    Returns inf when absolute continuity fails, i.e. the alternative jumps
    (r_alt > 0) on a set of positive measure where the baseline cannot
    (r = 0).
    """
    if base.dim != 1 or alt.dim != 1:
        raise ValueError("entropy rates are implemented in 1-D only")
    if base.beta != alt.beta:
        raise ValueError("baseline and alternative must share beta")
    beta = base.beta
    dens, lim = _stationary_density_1d(alt, lim)

    def rates(x: float, v: float) -> tuple[float, float]:
        r = beta * max(0.0, v * float(base.gradient(np.array([x]))[0]))
        rt = beta * max(0.0, v * float(alt.gradient(np.array([x]))[0]))
        return r, rt

    # absolute-continuity scan: r = 0 while r_alt > 0 on a set of positive mass
    grid = np.linspace(-lim, lim, 40001)
    for v in (-1.0, 1.0):
        gb = beta * np.maximum(0.0, v * base.gradient(grid[:, None]).ravel())
        ga = beta * np.maximum(0.0, v * alt.gradient(grid[:, None]).ravel())
        bad = (gb <= 1e-14) & (ga > 1e-10)
        if np.any(bad) and np.sum(np.vectorize(dens)(grid[bad])) * (grid[1] - grid[0]) > 1e-12:
            return math.inf

    total = 0.0
    for v in (-1.0, 1.0):
        def integrand(x: float) -> float:
            r, rt = rates(x, v)
            if rt <= 1e-300:
                contrib = r
            elif r <= 1e-300:
                # measure-zero boundary point: AC scan above already ruled
                # out positive-measure support violations
                contrib = 0.0
            else:
                contrib = rt * math.log(rt / r) - rt + r
            return contrib * dens(x)

        val, _ = integrate.quad(integrand, -lim, lim, limit=400,
                                points=[0.0])
        total += 0.5 * val
    return total


# ---------------------------------------------------------------------------
# UQ experiment


def _expectation_1d(f, target: TargetModel, lim: float = 40.0) -> float:
    dens, lim = _stationary_density_1d(target, lim)
    val, _ = integrate.quad(lambda x: float(f(np.array([[x]]))[0]) * dens(x), -lim, lim,
                            limit=200)
    return val


def uq_experiment(
    config: ExperimentConfig,
    alt_target: TargetModel,
    entropy_rate: Optional[float] = None,
) -> ValidationReport:
    """Steady-state bias bound check against an exactly computable bias.

    The baseline starts at mu* (so the chi-square prefactor is 1); the
    alternative is a 1-D target with computable stationary expectation.  The
    exact bias |E_alt[f] - E_base[f]| must be dominated by
    sqrt(2 v eta_inf) + b eta_inf, with eta_inf from the applicable entropy
    rate (Girsanov for Langevin constants, jump rate for zig-zag).
    """
    stats = config.observable.stats
    pair, _, _ = bernstein_from_hypo(config.hypo, stats, dmu_norm=1.0)
    if entropy_rate is None:
        if config.sampler == "zigzag":
            entropy_rate = jump_entropy_rate_zigzag(config.target, alt_target)
        elif config.sampler == "langevin":
            entropy_rate = girsanov_entropy_rate_langevin(
                config.target, alt_target, config.gamma)
        else:
            raise ValueError(
                f"no entropy-rate formula for sampler '{config.sampler}'")
    alt_mean = _expectation_1d(config.observable.f, alt_target)
    bias = abs(alt_mean - stats.mean)
    if math.isinf(entropy_rate):
        return ValidationReport(
            kind="uq", passed=False, vacuous=True, seed=config.seed,
            details={"entropy_rate": "inf", "bias": bias,
                     "note": "path measures not absolutely continuous; bound vacuous"},
        )
    bound = psi_star_inv(pair, entropy_rate)
    vacuous = bound >= 2.0 * stats.sup_norm
    passed = (bias <= bound + 1e-12) and not vacuous
    return ValidationReport(
        kind="uq", passed=passed, vacuous=vacuous, seed=config.seed,
        details={"bias": bias, "bound": bound, "entropy_rate": entropy_rate,
                 "alt_mean": alt_mean, "base_mean": stats.mean,
                 "v": pair.v, "b": pair.b, "sup_norm": stats.sup_norm},
    )
