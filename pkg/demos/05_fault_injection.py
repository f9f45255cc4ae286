"""The validation suite catches real dynamics bugs.

The bouncy particle sampler must reflect momentum elastically:
p -> p - 2 (p . n) n with n the unit gradient direction.  Dropping the
factor 2 (projecting out the normal component instead of flipping it)
produces a dynamics that still runs happily but no longer preserves the
target.  The stationarity gate inside every validation experiment detects
the drift in the second moment and fails the run.
"""

import dataclasses

from hypoguard import (
    ExperimentConfig,
    HypoParams,
    builtin_observable,
    builtin_target,
    coverage_experiment,
    lambda_q_from_target,
    optimal_eps,
)

target = builtin_target("gaussian_iso", dim=1, h=1.0, beta=1.0)
observable = builtin_observable("cos", target, omega=1.0)
lambda_q = lambda_q_from_target(C_nu=target.poincare_const, kappa_p=1.0)
hypo = HypoParams(lambda_p=1.0, lambda_q=lambda_q, R0=1.0,
                  eps=optimal_eps(lambda_q, 1.0, 1.0))

good = ExperimentConfig(
    sampler="bps", target=target, observable=observable, hypo=hypo,
    T=150.0, delta=0.1, replicas=60, seed=42,
)
bad = dataclasses.replace(good, reflection_factor=1.0)

for label, cfg in (("factor 2 (correct)", good), ("factor 1 (buggy)", bad)):
    rep = coverage_experiment(cfg)
    gate = rep.details["stationarity"]["checks"]["q_second_moment"]
    print(f"{label}:")
    print(f"  E[q^2] observed {gate['observed']:.3f}, expected {gate['expected']:.3f} "
          f"(+-{3 * gate['std_error']:.3f})")
    print(f"  stationarity gate: {'PASS' if gate['passed'] else 'FAIL'}, "
          f"experiment: {'PASS' if rep.passed else 'FAIL'}\n")
