"""Event-driven simulation of PDMP samplers and a discretized Langevin
integrator, with exact-in-time trajectory averaging.

All samplers share the same RNG discipline: a root seed is split into named
streams (initial condition, bounce/flip clocks, refresh clock, diffusion
noise) through counter-based ``SeedSequence`` keys, so adding a clock never
perturbs an existing stream and identical (config, seed) pairs give
bit-identical trajectories.

For quadratic potentials every event clock is inverted in closed form; for
general potentials the inhomogeneous clocks are simulated by thinning
against a caller-certified rate bound on a sliding window.  A violated
bound is a hard error, never a silent acceptance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .targets import MomentumModel, TargetModel

__all__ = [
    "PhasePoint",
    "Segment",
    "EventRecord",
    "Trajectory",
    "ThinningBoundError",
    "stream_rng",
    "replica_seed",
    "reflect",
    "flip",
    "invert_affine_rate",
    "sample_by_thinning",
    "simulate_bps",
    "simulate_zigzag",
    "simulate_hhmc",
    "simulate_langevin",
    "time_average",
    "export_csv",
]

_STREAMS = {"init": 0, "bounce": 1, "refresh": 2, "flip": 3, "noise": 4, "duration": 5}


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Independent named RNG stream derived from a root seed."""
    key = _STREAMS[name]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(key,))))


def replica_seed(root_seed: int, replica: int) -> int:
    """Derived root seed for an independent replica."""
    ss = np.random.SeedSequence(root_seed, spawn_key=(1000 + replica,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class ThinningBoundError(RuntimeError):
    """The caller-supplied thinning bound was violated; the simulation is not
    exact and must be aborted."""


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray
    t: float


@dataclass(frozen=True)
class Segment:
    """Deterministic flow piece starting at (q0, p0) at time t0."""

    t0: float
    duration: float
    q0: np.ndarray
    p0: np.ndarray
    kind: str  # linear | hamiltonian | diffusive-step


@dataclass(frozen=True)
class EventRecord:
    time: float
    kind: str  # bounce | flip | refresh | hhmc-resample
    component: int  # flipped component, -1 otherwise
    p_before: np.ndarray
    p_after: np.ndarray


class HamiltonianFlow:
    """Exact flow of H(q, p) = q^T H q / 2 + |p|^2 / (2m), per eigenmode."""

    def __init__(self, hessian: np.ndarray, mass: float):
        self.mass = mass
        evals, self.U = np.linalg.eigh(hessian)
        self.omega = np.sqrt(np.maximum(evals, 0.0) / mass)

    def __call__(self, q0: np.ndarray, p0: np.ndarray, t) -> tuple[np.ndarray, np.ndarray]:
        """Advance by time t; q0, p0 of shape (d,) or (n, d), t scalar or (n,)."""
        y = q0 @ self.U
        w = p0 @ self.U
        t = np.asarray(t, dtype=float)
        th = np.multiply.outer(t, self.omega) if t.ndim else t * self.omega
        c, s = np.cos(th), np.sin(th)
        m = self.mass
        with np.errstate(invalid="ignore", divide="ignore"):
            so = np.where(self.omega > 0, s / np.where(self.omega > 0, self.omega, 1.0), 0.0)
        # omega == 0 modes are free flight
        free = self.omega == 0
        yt = y * c + w / m * so
        wt = -y * (m * self.omega) * s + w * c
        if np.any(free):
            tt = th[..., free] * 0 + (t[..., None] if t.ndim else t)
            yt[..., free] = y[..., free] + (w[..., free] / m) * tt
            wt[..., free] = w[..., free]
        return yt @ self.U.T, wt @ self.U.T


@dataclass
class Trajectory:
    """Seed-reproducible record of a simulated path on [0, horizon].

    PDMP / exact-flow trajectories store flow segments that tile the time
    horizon plus the event log; discretized trajectories store the step grid
    in ``times``/``qs``/``ps`` and set ``discretized``.
    """

    sampler: str
    horizon: float
    seed: int
    mass: float
    segments: list[Segment] = field(default_factory=list)
    events: list[EventRecord] = field(default_factory=list)
    final_q: Optional[np.ndarray] = None
    final_p: Optional[np.ndarray] = None
    flow: Optional[HamiltonianFlow] = None
    discretized: bool = False
    times: Optional[np.ndarray] = None
    qs: Optional[np.ndarray] = None
    ps: Optional[np.ndarray] = None

    def state_at(self, seg_index: int, s: float) -> tuple[np.ndarray, np.ndarray]:
        """State s time units into segment ``seg_index``."""
        seg = self.segments[seg_index]
        if seg.kind == "linear":
            return seg.q0 + (s / self.mass) * seg.p0, seg.p0
        if seg.kind == "hamiltonian":
            return self.flow(seg.q0, seg.p0, s)
        raise ValueError(f"no interior state for segment kind '{seg.kind}'")


# ---------------------------------------------------------------------------
# velocity updates


def reflect(p: np.ndarray, grad: np.ndarray, factor: float = 2.0) -> np.ndarray:
    """Elastic reflection of p on the hyperplane orthogonal to grad:

        p -> p - factor * (p . grad / |grad|^2) grad.

    factor = 2 is the norm-preserving involution used by the bouncy particle
    sampler; other values exist only for fault-injection experiments.
    """
    g2 = float(np.dot(grad, grad))
    if g2 == 0.0:
        raise ValueError("degenerate gradient: reflection undefined")
    return p - factor * (float(np.dot(p, grad)) / g2) * grad


def flip(p: np.ndarray, i: int) -> np.ndarray:
    """Negate component i, leaving all others untouched."""
    if not 0 <= i < len(p):
        raise IndexError(f"component {i} out of range for dimension {len(p)}")
    out = p.copy()
    out[i] = -out[i]
    return out


# ---------------------------------------------------------------------------
# event clocks


def invert_affine_rate(a: float, b: float, e: float) -> float:
    """First arrival of an inhomogeneous Poisson clock with rate [a + b t]^+.

    Solves int_0^tau [a + b s]^+ ds = e exactly for a unit-exponential draw
    ``e``; returns inf when the total mass is below ``e``.
    """
    if e < 0.0:
        raise ValueError("exponential draw must be >= 0")
    if b > 0.0:
        if a >= 0.0:
            return (-a + math.sqrt(a * a + 2.0 * b * e)) / b
        # rate is zero until t0 = -a/b, then grows linearly from 0
        return -a / b + math.sqrt(2.0 * e / b)
    if b == 0.0:
        return e / a if a > 0.0 else math.inf
    # b < 0: rate decays to zero at t1 = -a/b with finite total mass
    if a <= 0.0:
        return math.inf
    total = a * a / (-2.0 * b)
    if e >= total:
        return math.inf
    return (-a + math.sqrt(a * a + 2.0 * b * e)) / b


def sample_by_thinning(
    rate: Callable[[float], float],
    bound: Callable[[float, float], float],
    window: float,
    rng: np.random.Generator,
    horizon: float,
) -> float:
    """First arrival of the clock with intensity ``rate`` by thinning.

    ``bound(t, w)`` must dominate the rate on [t, t + w]; a proposal at which
    the actual rate exceeds the bound raises :class:`ThinningBoundError`
    (exactness is certified, never assumed).  Returns inf if no event occurs
    before ``horizon``.
    """
    if window <= 0.0:
        raise ValueError("thinning window must be > 0")
    t = 0.0
    while t < horizon:
        m = bound(t, window)
        if m < 0.0:
            raise ValueError("thinning bound must be >= 0")
        if m == 0.0:
            t += window
            continue
        s = rng.exponential() / m
        if s > window:
            t += window
            continue
        t += s
        r = rate(t)
        if r > m * (1.0 + 1e-9):
            raise ThinningBoundError(
                f"rate {r} exceeds certified bound {m} at t = {t}"
            )
        if rng.random() * m < r:
            return t
    return math.inf


# ---------------------------------------------------------------------------
# samplers


def _initial_state(
    target: TargetModel,
    momentum: MomentumModel,
    rng: np.random.Generator,
    q0: Optional[np.ndarray],
    p0: Optional[np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    if q0 is None:
        q0 = target.sample_position(rng)
    if p0 is None:
        p0 = momentum.sample(rng, target.dim)
    return np.array(q0, dtype=float), np.array(p0, dtype=float)


def _bps_bounce_time(
    target: TargetModel,
    q: np.ndarray,
    v: np.ndarray,
    rng: np.random.Generator,
    horizon: float,
    window: float,
) -> float:
    """Bounce clock along the linear flight q + s v, rate beta [v . grad V]^+."""
    beta = target.beta
    if target.is_quadratic:
        a = beta * float(np.dot(v, target.gradient(q)))
        slope = beta * float(v @ target.hessian @ v)
        return invert_affine_rate(a, slope, rng.exponential())
    if target.hessian_bound is None:
        raise ValueError(
            f"target '{target.name}' needs a hessian_bound for thinning"
        )
    speed2 = float(np.dot(v, v))
    speed = math.sqrt(speed2)

    def rate(s: float) -> float:
        return beta * max(0.0, float(np.dot(v, target.gradient(q + s * v))))

    def bound(t: float, w: float) -> float:
        hb = target.hessian_bound(q + t * v, speed * w)
        return rate(t) + beta * speed2 * hb * w

    return sample_by_thinning(rate, bound, window, rng, horizon)


def simulate_bps(
    target: TargetModel,
    momentum: MomentumModel,
    refresh_rate: float,
    T: float,
    seed: int,
    q0: Optional[np.ndarray] = None,
    p0: Optional[np.ndarray] = None,
    reflection_factor: float = 2.0,
    thinning_window: float = 0.5,
) -> Trajectory:
    """Bouncy particle sampler: free flight, gradient bounces, refreshes.

    Flight is q(t) = q + t p/m; bounces arrive at rate beta [(p/m).grad V]^+
    and reflect the momentum elastically in the gradient direction;
    refreshes arrive at rate ``refresh_rate`` and redraw p from rho*.
    """
    if T <= 0.0 or refresh_rate < 0.0:
        raise ValueError("need T > 0 and refresh_rate >= 0")
    rng_init = stream_rng(seed, "init")
    rng_bounce = stream_rng(seed, "bounce")
    rng_refresh = stream_rng(seed, "refresh")
    q, p = _initial_state(target, momentum, rng_init, q0, p0)
    m = momentum.mass
    traj = Trajectory(sampler="bps", horizon=T, seed=seed, mass=m)
    t = 0.0
    while t < T:
        v = p / m
        tau_b = _bps_bounce_time(target, q, v, rng_bounce, T - t, thinning_window)
        tau_r = rng_refresh.exponential() / refresh_rate if refresh_rate > 0 else math.inf
        tau = min(tau_b, tau_r, T - t)
        traj.segments.append(Segment(t0=t, duration=tau, q0=q, p0=p, kind="linear"))
        q = q + tau * v
        t += tau
        if t >= T:
            break
        if tau_b <= tau_r:
            grad = target.gradient(q)
            if not np.any(grad):
                p_new = momentum.sample(rng_refresh, target.dim)
                kind = "refresh"
            else:
                p_new = reflect(p, grad, factor=reflection_factor)
                kind = "bounce"
        else:
            p_new = momentum.sample(rng_refresh, target.dim)
            kind = "refresh"
        traj.events.append(EventRecord(time=t, kind=kind, component=-1,
                                       p_before=p, p_after=p_new))
        p = p_new
    traj.final_q, traj.final_p = q, p
    return traj


def _zigzag_flip_time(
    target: TargetModel,
    q: np.ndarray,
    v: np.ndarray,
    i: int,
    rng: np.random.Generator,
    horizon: float,
    window: float,
) -> float:
    """Component-i flip clock along q + s v, rate beta [v_i d_i V]^+."""
    beta = target.beta
    if target.is_quadratic:
        H = target.hessian
        a = beta * v[i] * float(target.gradient(q)[i])
        slope = beta * v[i] * float(H[i] @ v)
        return invert_affine_rate(a, slope, rng.exponential())
    if target.hessian_bound is None:
        raise ValueError(f"target '{target.name}' needs a hessian_bound for thinning")
    speed = math.sqrt(float(np.dot(v, v)))

    def rate(s: float) -> float:
        return beta * max(0.0, v[i] * float(target.gradient(q + s * v)[i]))

    def bound(t: float, w: float) -> float:
        hb = target.hessian_bound(q + t * v, speed * w)
        return rate(t) + beta * speed * hb * w

    return sample_by_thinning(rate, bound, window, rng, horizon)


def simulate_zigzag(
    target: TargetModel,
    T: float,
    seed: int,
    refresh_rate: float = 0.0,
    q0: Optional[np.ndarray] = None,
    v0: Optional[np.ndarray] = None,
    thinning_window: float = 0.5,
) -> Trajectory:
    """Zig-zag sampler: unit-speed flight with per-component velocity flips.

    Component i flips at rate beta [v_i d_i V(q)]^+; an optional refresh
    clock (off by default) redraws v uniformly on {-1, +1}^d.
    """
    if T <= 0.0 or refresh_rate < 0.0:
        raise ValueError("need T > 0 and refresh_rate >= 0")
    momentum = MomentumModel(kind="rademacher", beta=target.beta)
    rng_init = stream_rng(seed, "init")
    rng_flip = stream_rng(seed, "flip")
    rng_refresh = stream_rng(seed, "refresh")
    q, v = _initial_state(target, momentum, rng_init, q0, v0)
    if not np.all(np.abs(v) == 1.0):
        raise ValueError("zig-zag velocity components must be +-1")
    d = target.dim
    traj = Trajectory(sampler="zigzag", horizon=T, seed=seed, mass=1.0)
    t = 0.0
    while t < T:
        taus = [
            _zigzag_flip_time(target, q, v, i, rng_flip, T - t, thinning_window)
            for i in range(d)
        ]
        tau_r = rng_refresh.exponential() / refresh_rate if refresh_rate > 0 else math.inf
        i_min = int(np.argmin(taus))
        tau = min(taus[i_min], tau_r, T - t)
        traj.segments.append(Segment(t0=t, duration=tau, q0=q, p0=v, kind="linear"))
        q = q + tau * v
        t += tau
        if t >= T:
            break
        if taus[i_min] <= tau_r:
            v_new = flip(v, i_min)
            traj.events.append(EventRecord(time=t, kind="flip", component=i_min,
                                           p_before=v, p_after=v_new))
        else:
            v_new = momentum.sample(rng_refresh, d)
            traj.events.append(EventRecord(time=t, kind="refresh", component=-1,
                                           p_before=v, p_after=v_new))
        v = v_new
    traj.final_q, traj.final_p = q, v
    return traj


def simulate_hhmc(
    target: TargetModel,
    momentum: MomentumModel,
    resample_rate: float,
    T: float,
    seed: int,
    integrator: str = "exact",
    step: float = 0.01,
    q0: Optional[np.ndarray] = None,
    p0: Optional[np.ndarray] = None,
) -> Trajectory:
    """Hybrid HMC: Hamiltonian flow for Exp(resample_rate) durations, then
    full momentum resample from rho*.

    The flow is exact (phase-space rotation) for quadratic potentials; for
    general potentials a leapfrog integrator with the given step is used and
    the trajectory is marked discretized.
    """
    if T <= 0.0 or resample_rate <= 0.0:
        raise ValueError("need T > 0 and resample_rate > 0")
    if integrator not in ("exact", "leapfrog"):
        raise ValueError(f"unknown integrator '{integrator}'")
    if integrator == "exact" and not target.is_quadratic:
        raise ValueError("exact flow requires a quadratic potential")
    rng_init = stream_rng(seed, "init")
    rng_dur = stream_rng(seed, "duration")
    rng_refresh = stream_rng(seed, "refresh")
    q, p = _initial_state(target, momentum, rng_init, q0, p0)
    m = momentum.mass

    if integrator == "exact":
        traj = Trajectory(sampler="hhmc", horizon=T, seed=seed, mass=m,
                          flow=HamiltonianFlow(target.hessian, m))
        t = 0.0
        while t < T:
            tau = min(rng_dur.exponential() / resample_rate, T - t)
            traj.segments.append(Segment(t0=t, duration=tau, q0=q, p0=p, kind="hamiltonian"))
            q, p = traj.flow(q, p, tau)
            t += tau
            if t >= T:
                break
            p_new = momentum.sample(rng_refresh, target.dim)
            traj.events.append(EventRecord(time=t, kind="hhmc-resample", component=-1,
                                           p_before=p, p_after=p_new))
            p = p_new
        traj.final_q, traj.final_p = q, p
        return traj

    # leapfrog route: discretized step grid with resamples snapped to steps
    n_steps = int(math.ceil(T / step))
    times = np.linspace(0.0, n_steps * step, n_steps + 1)
    qs = np.empty((n_steps + 1, target.dim))
    ps = np.empty((n_steps + 1, target.dim))
    qs[0], ps[0] = q, p
    next_resample = rng_dur.exponential() / resample_rate
    events: list[EventRecord] = []
    for k in range(n_steps):
        if times[k] >= next_resample:
            p_new = momentum.sample(rng_refresh, target.dim)
            events.append(EventRecord(time=times[k], kind="hhmc-resample", component=-1,
                                      p_before=p, p_after=p_new))
            p = p_new
            next_resample += rng_dur.exponential() / resample_rate
        p = p - 0.5 * step * target.gradient(q)
        q = q + step * p / m
        p = p - 0.5 * step * target.gradient(q)
        qs[k + 1], ps[k + 1] = q, p
    traj = Trajectory(sampler="hhmc", horizon=float(times[-1]), seed=seed, mass=m,
                      discretized=True, times=times, qs=qs, ps=ps, events=events)
    traj.final_q, traj.final_p = q, p
    return traj


def simulate_langevin(
    target: TargetModel,
    momentum: MomentumModel,
    gamma: float,
    T: float,
    step: float,
    seed: int,
    q0: Optional[np.ndarray] = None,
    p0: Optional[np.ndarray] = None,
) -> Trajectory:
    """Underdamped Langevin dynamics via a kick/drift/OU splitting.

    One step is half kick, half drift, exact Ornstein-Uhlenbeck momentum
    update over the full step, half drift, half kick (second-order weak
    splitting).  The output is discretized: its O(step^2) bias is not
    covered by the exact-process guarantees.
    """
    if T <= 0.0 or step <= 0.0 or gamma <= 0.0:
        raise ValueError("need T > 0, step > 0, gamma > 0")
    rng_init = stream_rng(seed, "init")
    rng_noise = stream_rng(seed, "noise")
    q, p = _initial_state(target, momentum, rng_init, q0, p0)
    m, beta = momentum.mass, momentum.beta
    n_steps = int(math.ceil(T / step))
    times = np.linspace(0.0, n_steps * step, n_steps + 1)
    qs = np.empty((n_steps + 1, target.dim))
    ps = np.empty((n_steps + 1, target.dim))
    qs[0], ps[0] = q, p
    c1 = math.exp(-gamma * step / m)
    c2 = math.sqrt(m / beta * (1.0 - c1 * c1))
    for k in range(n_steps):
        p = p - 0.5 * step * target.gradient(q)
        q = q + 0.5 * step * p / m
        p = c1 * p + c2 * rng_noise.standard_normal(target.dim)
        q = q + 0.5 * step * p / m
        p = p - 0.5 * step * target.gradient(q)
        qs[k + 1], ps[k + 1] = q, p
    traj = Trajectory(sampler="langevin", horizon=float(times[-1]), seed=seed, mass=m,
                      discretized=True, times=times, qs=qs, ps=ps)
    traj.final_q, traj.final_p = q, p
    return traj


# ---------------------------------------------------------------------------
# time averaging


def time_average(traj: Trajectory, f, order: int = 5) -> float:
    """Time average (1/T) int_0^T f(Q_t) dt.

    Flow segments are integrated with fixed-order Gauss-Legendre quadrature
    (exact for polynomial f along linear flight up to degree 2*order-1);
    discretized trajectories use the trapezoid rule on the step grid.  ``f``
    must map position arrays of shape (n, d) to shape (n,).
    """
    func = f.f if hasattr(f, "f") else f
    T = traj.horizon
    if traj.discretized:
        vals = np.asarray(func(traj.qs), dtype=float)
        return float(np.trapezoid(vals, traj.times) / traj.times[-1])

    nodes, weights = np.polynomial.legendre.leggauss(order)
    # map from [-1, 1] to [0, 1]
    nodes01 = 0.5 * (nodes + 1.0)
    w01 = 0.5 * weights

    def subdivide(segments, max_len=0.5):
        """Split each segment into panels of length <= max_len so the
        fixed-order rule stays accurate on long flights."""
        q0 = np.array([s.q0 for s in segments])
        p0 = np.array([s.p0 for s in segments])
        dur = np.array([s.duration for s in segments])
        k = np.maximum(np.ceil(dur / max_len).astype(int), 1)
        sub = np.repeat(dur / k, k)
        start = np.concatenate([d / n * np.arange(n) for d, n in zip(dur, k)])
        return np.repeat(q0, k, axis=0), np.repeat(p0, k, axis=0), start, sub

    total = 0.0
    linear = [s for s in traj.segments if s.kind == "linear"]
    if linear:
        q0, p0, start, sub = subdivide(linear)
        v = p0 / traj.mass
        for x, w in zip(nodes01, w01):
            q = q0 + (start + x * sub)[:, None] * v
            total += w * float(np.dot(sub, np.asarray(func(q), dtype=float)))
    ham = [s for s in traj.segments if s.kind == "hamiltonian"]
    if ham:
        q0, p0, start, sub = subdivide(ham)
        for x, w in zip(nodes01, w01):
            q, _ = traj.flow(q0, p0, start + x * sub)
            total += w * float(np.dot(sub, np.asarray(func(q), dtype=float)))
    return total / T


def export_csv(traj: Trajectory, path) -> None:
    """Write the trajectory skeleton as CSV rows (t, q..., p..., event kind).

    Flow trajectories emit one row per segment start plus the final state;
    discretized trajectories emit one row per step.
    """
    def fmt(x):
        return repr(float(x))

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if traj.discretized:
            d = traj.qs.shape[1]
            writer.writerow(["t", *[f"q{i}" for i in range(d)],
                             *[f"p{i}" for i in range(d)], "event"])
            ev_by_time = {e.time: e.kind for e in traj.events}
            for t, q, p in zip(traj.times, traj.qs, traj.ps):
                writer.writerow([fmt(t), *map(fmt, q), *map(fmt, p),
                                 ev_by_time.get(float(t), "")])
            return
        d = len(traj.segments[0].q0)
        writer.writerow(["t", *[f"q{i}" for i in range(d)],
                         *[f"p{i}" for i in range(d)], "event"])
        ev_by_time = {e.time: e.kind for e in traj.events}
        for seg in traj.segments:
            writer.writerow([fmt(seg.t0), *map(fmt, seg.q0), *map(fmt, seg.p0),
                             ev_by_time.get(seg.t0, "")])
        writer.writerow([fmt(traj.horizon), *map(fmt, traj.final_q),
                         *map(fmt, traj.final_p), ""])
