"""High-accuracy time integration: flow, time-2*pi map, tangent flow.

The adaptive path drives scipy's eighth-order embedded Runge-Kutta
(DOP853) step by step so that endpoints are hit exactly by clamping the
final step, never by interpolation -- map iterates feed Newton solvers
downstream.  Dense output is used only to *sample* trajectories between
steps, where interpolation error is harmless.

All states are propagated in lifted (unwrapped) coordinates.  Batched
helpers integrate many orbits as one stacked system; the adaptive error
control then couples the ensemble, which is fine for the statistics
they serve (and still deterministic).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from . import models
from .errors import StepLimitExceeded
from .models import ModelSpec, PhaseState

TWO_PI = 2.0 * math.pi


class Method(enum.Enum):
    ADAPTIVE_EMBEDDED = "dop853"     # order 8(5,3) embedded pair
    FIXED_STEP_CLASSIC = "rk4"       # classic order 4, fixed step


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.ADAPTIVE_EMBEDDED
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_step: float = math.inf
    max_steps_per_period: int = 1_000_000
    rk4_step: float = 1e-3

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0 or self.max_steps_per_period <= 0:
            raise ValueError("step caps must be positive")
        if self.rk4_step <= 0:
            raise ValueError("rk4_step must be positive")


DEFAULT_CONFIG = IntegratorConfig()

# Looser tolerances for large orbit ensembles (regime statistics); still
# far below any classification scale.
ENSEMBLE_CONFIG = IntegratorConfig(abs_tol=1e-11, rel_tol=1e-9)


def model_rhs(spec: ModelSpec):
    """Right-hand side for N stacked orbits, z = (x_1..x_N, y_1..y_N).

    Hand-inlined (rather than going through models.velocity) because
    ensemble sweeps spend nearly all their time here.
    """
    cubic = spec.family is models.Family.CUBIC
    eps12 = spec.epsilon / 12.0
    eps = spec.epsilon
    c = spec.forcing_factor
    terms = spec.perturbation.terms if c else ()

    def rhs(t, z):
        n = z.shape[0] // 2
        x = z[:n]
        y = z[n:]
        out = np.empty_like(z)
        if cubic:
            out[:n] = y - y * y
            out[n:] = -eps12 * np.sin(x)
        else:
            out[:n] = -np.sin(y)
            out[n:] = -eps * np.sin(x)
        for tm in terms:
            s = np.sin(tm.a * x + tm.b * y + (tm.m * t + tm.phi))
            if tm.b:
                out[:n] -= (c * tm.c * tm.b) * s
            if tm.a:
                out[n:] += (c * tm.c * tm.a) * s
        return out

    return rhs


def variational_rhs(spec: ModelSpec):
    """Orbit plus 2x2 tangent map, z = (x, y, J11, J12, J21, J22)."""

    def rhs(t, z):
        x, y = z[0], z[1]
        xd, yd = models.velocity(spec, x, y, t)
        hxx, hxy, hyy = models.hessian(spec, x, y, t)
        j11, j12, j21, j22 = z[2], z[3], z[4], z[5]
        # d/dt J = A J with A = [[H_xy, H_yy], [-H_xx, -H_xy]]
        return np.array([
            xd, yd,
            hxy * j11 + hyy * j21,
            hxy * j12 + hyy * j22,
            -hxx * j11 - hxy * j21,
            -hxx * j12 - hxy * j22,
        ])

    return rhs


class _Partial:
    """Samples accumulated before a step-budget failure."""

    def __init__(self, ts, zs):
        self.ts = np.asarray(ts)
        self.zs = np.asarray(zs)


def _drive(rhs, t0, z0, t1, config: IntegratorConfig,
           t_samples=None, collect_steps=False):
    """Integrate z' = rhs(t, z) from t0 to t1 (either direction).

    Returns (z_end, sample_ts, sample_zs).  ``t_samples`` are interior
    sample times filled via dense output; the endpoint itself comes from
    the final clamped step.  With ``collect_steps`` every accepted step
    is returned instead.
    """
    z0 = np.asarray(z0, dtype=float)
    if t1 == t0:
        return z0.copy(), np.array([t0]), z0[None, :].copy()

    if config.method is Method.FIXED_STEP_CLASSIC:
        return _drive_rk4(rhs, t0, z0, t1, config, t_samples, collect_steps)

    periods = max(1, int(math.ceil(abs(t1 - t0) / TWO_PI)))
    max_steps = config.max_steps_per_period * periods
    solver = DOP853(rhs, t0, z0, t1, rtol=config.rel_tol, atol=config.abs_tol,
                    max_step=config.max_step)
    want = None
    if t_samples is not None:
        want = np.asarray(t_samples, dtype=float)
        pos = 0
    ts, zs = [t0], [z0.copy()]
    nsteps = 0
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise RuntimeError(f"integrator failed: {msg}")
        nsteps += 1
        if nsteps > max_steps:
            raise StepLimitExceeded(
                f"step budget exceeded ({max_steps} steps) at t={solver.t}",
                partial=_Partial(ts, zs))
        if want is not None and pos < want.size:
            lo, hi = sorted((solver.t_old, solver.t))
            sel = []
            while pos < want.size and lo <= want[pos] <= hi:
                sel.append(want[pos])
                pos += 1
            if sel:
                dense = solver.dense_output()
                for tq in sel:
                    ts.append(tq)
                    zs.append(dense(tq))
        elif collect_steps:
            ts.append(solver.t)
            zs.append(solver.y.copy())
    z_end = solver.y.copy()
    if want is not None:
        # endpoint sample, exact (not interpolated)
        if ts[-1] != t1:
            ts.append(t1)
            zs.append(z_end)
        else:
            zs[-1] = z_end
    elif collect_steps:
        zs[-1] = z_end
    return z_end, np.asarray(ts), np.asarray(zs)


def _drive_rk4(rhs, t0, z0, t1, config, t_samples=None, collect_steps=False):
    span = t1 - t0
    nsteps = max(1, int(math.ceil(abs(span) / config.rk4_step)))
    periods = max(1, int(math.ceil(abs(span) / TWO_PI)))
    if nsteps > config.max_steps_per_period * periods:
        raise StepLimitExceeded(
            f"fixed-step count {nsteps} exceeds budget",
            partial=_Partial([t0], [z0]))
    h = span / nsteps
    want = np.asarray(t_samples, dtype=float) if t_samples is not None else None
    pos = 0
    ts, zs = [t0], [np.asarray(z0, dtype=float).copy()]
    t, z = t0, np.asarray(z0, dtype=float).copy()
    for k in range(nsteps):
        zs_prev = z
        k1 = rhs(t, z)
        k2 = rhs(t + h / 2, z + h / 2 * k1)
        k3 = rhs(t + h / 2, z + h / 2 * k2)
        k4 = rhs(t + h, z + h * k3)
        z = z + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (k + 1) * h
        if want is not None:
            while pos < want.size and min(t - h, t) <= want[pos] <= max(t - h, t):
                # linear interpolation; rk4 has no dense output
                frac = (want[pos] - (t - h)) / h
                ts.append(want[pos])
                zs.append(zs_prev + frac * (z - zs_prev))
                pos += 1
        elif collect_steps:
            ts.append(t)
            zs.append(z.copy())
    return z.copy(), np.asarray(ts), np.asarray(zs)


# -- public operations -------------------------------------------------


@dataclass
class Trajectory:
    """Sampled orbit in lifted coordinates, with its provenance."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    spec: ModelSpec
    config: IntegratorConfig
    initial: PhaseState

    def __post_init__(self):
        if self.t.size and not np.all(np.diff(self.t) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def x_wrapped(self):
        return models.wrap_angle(self.x)

    @property
    def y_wrapped(self):
        return models.wrap_angle(self.y)

    def energy(self):
        return np.asarray(models.energy(self.spec, self.x, self.y, self.t))

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.x[i]), float(self.y[i]), float(self.t[i]))

    def rows(self, stride: int = 1):
        """Rows for the ``t,x,y,x_lift,y_lift,energy`` export schema."""
        idx = np.arange(0, self.t.size, stride)
        if idx.size == 0 or idx[-1] != self.t.size - 1:
            idx = np.append(idx, self.t.size - 1)
        e = models.energy(self.spec, self.x[idx], self.y[idx], self.t[idx])
        xw = models.wrap_angle(self.x[idx])
        yw = (models.wrap_angle(self.y[idx])
              if self.spec.family is models.Family.TORUS else self.y[idx])
        return np.column_stack([self.t[idx], xw, yw, self.x[idx], self.y[idx],
                                np.asarray(e)])


def advance(spec: ModelSpec, s0: PhaseState, t_final: float,
            config: IntegratorConfig = DEFAULT_CONFIG,
            sample_dt: float | None = None) -> Trajectory:
    """Integrate the flow from s0 up to t_final (> s0.t)."""
    if t_final <= s0.t:
        raise ValueError("t_final must exceed the initial time")
    rhs = model_rhs(spec)
    z0 = np.array([s0.x, s0.y])
    if sample_dt is None:
        t_samples = None
        collect = True
    else:
        n = int(math.floor((t_final - s0.t) / sample_dt))
        t_samples = s0.t + sample_dt * np.arange(1, n + 1)
        t_samples = t_samples[t_samples < t_final]
        collect = False
    try:
        _, ts, zs = _drive(rhs, s0.t, z0, t_final, config,
                           t_samples=t_samples, collect_steps=collect)
    except StepLimitExceeded as err:
        if err.partial is not None:
            err.partial = Trajectory(err.partial.ts, err.partial.zs[:, 0],
                                     err.partial.zs[:, 1], spec, config, s0)
        raise
    return Trajectory(ts, zs[:, 0], zs[:, 1], spec, config, s0)


def flow_map(spec: ModelSpec, xy, t0: float, t1: float,
             config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Endpoint of the flow from (xy, t0) to t1; exact endpoint hit."""
    rhs = model_rhs(spec)
    z_end, _, _ = _drive(rhs, t0, np.asarray(xy, dtype=float), t1, config)
    return z_end


def strobe(spec: ModelSpec, s0: PhaseState, n: int,
           config: IntegratorConfig = DEFAULT_CONFIG) -> list[PhaseState]:
    """Iterate the time-2*pi map n times starting at s0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rhs = model_rhs(spec)
    z = np.array([s0.x, s0.y])
    out = []
    for k in range(n):
        t_a = s0.t + TWO_PI * k
        t_b = s0.t + TWO_PI * (k + 1)
        z, _, _ = _drive(rhs, t_a, z, t_b, config)
        out.append(PhaseState(float(z[0]), float(z[1]), t_b))
    return out


def strobe_map_many(spec: ModelSpec, pts, config: IntegratorConfig = DEFAULT_CONFIG,
                    inverse: bool = False, phase: float = 0.0) -> np.ndarray:
    """Apply the time-2*pi map (or its inverse) to a batch of points.

    ``pts`` has shape (N, 2); the result matches.  The batch is stacked
    into one system so the whole set costs a single integration.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n = pts.shape[0]
    z0 = np.concatenate([pts[:, 0], pts[:, 1]])
    t1 = phase + (-TWO_PI if inverse else TWO_PI)
    z_end, _, _ = _drive(model_rhs(spec), phase, z0, t1, config)
    return np.column_stack([z_end[:n], z_end[n:]])


def strobe_map(spec: ModelSpec, xy, config: IntegratorConfig = DEFAULT_CONFIG,
               inverse: bool = False, phase: float = 0.0) -> np.ndarray:
    return strobe_map_many(spec, np.asarray(xy)[None, :], config,
                           inverse=inverse, phase=phase)[0]


def strobe_with_jacobian(spec: ModelSpec, xy,
                         config: IntegratorConfig = DEFAULT_CONFIG,
                         phase: float = 0.0, inverse: bool = False):
    """One strobe-map application together with its 2x2 Jacobian.

    The Jacobian comes from the variational equations integrated along
    the orbit with exact second derivatives of H.
    """
    xy = np.asarray(xy, dtype=float)
    z0 = np.array([xy[0], xy[1], 1.0, 0.0, 0.0, 1.0])
    t1 = phase + (-TWO_PI if inverse else TWO_PI)
    z_end, _, _ = _drive(variational_rhs(spec), phase, z0, t1, config)
    return z_end[:2], z_end[2:].reshape(2, 2)


def strobe_jacobian(spec: ModelSpec, s0: PhaseState,
                    config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Jacobian of the time-2*pi map at s0 (phase = s0.t)."""
    _, jac = strobe_with_jacobian(spec, (s0.x, s0.y), config, phase=s0.t)
    return jac


def ensemble_strobe(spec: ModelSpec, pts, n: int,
                    config: IntegratorConfig = ENSEMBLE_CONFIG,
                    callback=None, phase: float = 0.0,
                    chunk: int = 16) -> np.ndarray:
    """n strobe iterates of a batch of points; shape (n+1, N, 2).

    Integration proceeds in chunks of ``chunk`` periods per solver run
    to amortize setup; interior strobe samples within a chunk come from
    dense output (the chunk endpoint is exact).  ``callback(k, pts_k)``
    runs after each iterate, in order, and may return False to stop
    early (the returned array is then truncated).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    nm = pts.shape[0]
    rhs = model_rhs(spec)
    z = np.concatenate([pts[:, 0], pts[:, 1]])
    out = np.empty((n + 1, nm, 2))
    out[0] = pts
    k = 0
    while k < n:
        k_next = min(n, k + chunk)
        t_a = phase + TWO_PI * k
        t_b = phase + TWO_PI * k_next
        interior = phase + TWO_PI * np.arange(k + 1, k_next)
        z, ts, zs = _drive(rhs, t_a, z, t_b, config, t_samples=interior)
        for row, kk in zip(range(1, len(ts)), range(k + 1, k_next + 1)):
            out[kk, :, 0] = zs[row, :nm]
            out[kk, :, 1] = zs[row, nm:]
            if callback is not None and callback(kk, out[kk]) is False:
                return out[:kk + 1]
        k = k_next
    return out


def ensemble_advance(spec: ModelSpec, pts, t_final: float, sample_dt: float,
                     config: IntegratorConfig = ENSEMBLE_CONFIG,
                     phase: float = 0.0):
    """Batch trajectory sampling on a uniform grid; returns (ts, X, Y)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    nm = pts.shape[0]
    nsamp = int(math.floor((t_final - phase) / sample_dt))
    t_samples = phase + sample_dt * np.arange(1, nsamp + 1)
    t_samples = t_samples[t_samples < t_final]
    z0 = np.concatenate([pts[:, 0], pts[:, 1]])
    _, ts, zs = _drive(model_rhs(spec), phase, z0, t_final, config,
                       t_samples=t_samples)
    return ts, zs[:, :nm], zs[:, nm:]
