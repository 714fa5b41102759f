"""Unperturbed separatrices and first-order (Melnikov) splitting.

The splitting function

    M(t0) = integral over tau of {h0, F}(x(tau), y(tau), tau + t0) dtau

is the first-order variation of the energy difference between the
perturbed unstable and stable manifolds along an unperturbed connection
z(tau), with {.,.} the Poisson bracket, h0 the unperturbed Hamiltonian
and F the first-order perturbing Hamiltonian.  Simple zeros of M
certify transversal intersections.

A connection is built from two half-orbits: forward from the source
saddle along its unstable eigenvector and backward from the target
saddle along its stable eigenvector.  The halves are aligned at the
point of maximal speed (tau = 0, which pins the t0 phase convention)
and must agree there, which simultaneously validates that the
requested connection exists.  Tails therefore stay exponentially
accurate on both ends instead of degrading where a single forward
orbit would veer off along the target's unstable direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import integrate, models
from .errors import NoSuchConnection, TailTruncationError
from .integrate import DEFAULT_CONFIG, IntegratorConfig
from .models import Family, ModelSpec, PhaseState
from .trig import TrigSum

TWO_PI = 2.0 * math.pi

TAIL_THRESHOLD = 1e-12
SEED_OFFSET = 1e-8
GLUE_TOL = 1e-6
LEVEL_TOL = 1e-12

# separatrix samples feed 1e-9 quadratures; keep energy drift well below
SEP_CONFIG = IntegratorConfig(abs_tol=1e-13, rel_tol=1e-12)


@dataclass
class SeparatrixOrbit:
    """A sampled heteroclinic orbit of the mu = 0 system.

    Samples sit on a uniform tau grid over [-t_cut, t_cut] with tau = 0
    at the maximal-speed (symmetry) point.
    """

    spec: ModelSpec                      # unperturbed parameters
    connection: tuple[PhaseState, PhaseState]   # source, resolved target
    tau: np.ndarray
    x: np.ndarray
    y: np.ndarray
    decay_rate: float
    t_cut: float
    dtau: float
    glue_error: float

    @property
    def arclength(self) -> np.ndarray:
        seg = np.hypot(np.diff(self.x), np.diff(self.y))
        return np.concatenate([[0.0], np.cumsum(seg)])

    def point_at(self, tau0: float) -> np.ndarray:
        xx = np.interp(tau0, self.tau, self.x)
        yy = np.interp(tau0, self.tau, self.y)
        return np.array([xx, yy])

    def gradient_norm_at(self, tau0: float) -> float:
        p = self.point_at(tau0)
        gx, gy = _grad_h0(self.spec, p[0], p[1])
        return float(math.hypot(gx, gy))

    def arclength_at(self, tau0: float) -> float:
        return float(np.interp(tau0, self.tau, self.arclength))


def _grad_h0(spec: ModelSpec, x, y):
    """Gradient of the unperturbed Hamiltonian."""
    base = spec.unperturbed()
    xd, yd = models.velocity(base, x, y, 0.0)
    return -np.asarray(yd), np.asarray(xd)     # (H_x, H_y) = (-ydot, xdot)


def _lattice_saddles_near(spec: ModelSpec, x: float, y: float):
    """Unperturbed saddles within one cell of (x, y), as lift points."""
    out = []
    if spec.family is Family.CUBIC:
        for k in range(int(math.floor(x / TWO_PI)) - 1,
                       int(math.ceil(x / TWO_PI)) + 2):
            out.append(PhaseState((2 * k + 1) * math.pi, 0.0))
            out.append(PhaseState(2 * k * math.pi, 1.0))
    else:
        for i in range(int(round(x / math.pi)) - 2, int(round(x / math.pi)) + 3):
            for j in range(int(round(y / math.pi)) - 2,
                           int(round(y / math.pi)) + 3):
                if (i + j) % 2 == 0:
                    out.append(PhaseState(i * math.pi, j * math.pi))
    return out


def _same_saddle(spec: ModelSpec, a: PhaseState, b: PhaseState,
                 modulo: bool) -> bool:
    if not modulo:
        return abs(a.x - b.x) < 1e-6 and abs(a.y - b.y) < 1e-6
    dx = (a.x - b.x) / TWO_PI
    ok_x = abs(dx - round(dx)) < 1e-6
    if spec.family is Family.CUBIC:
        return ok_x and abs(a.y - b.y) < 1e-6
    dy = (a.y - b.y) / TWO_PI
    return ok_x and abs(dy - round(dy)) < 1e-6


def _shoot_branch(spec: ModelSpec, saddle: PhaseState, direction: np.ndarray,
                  config: IntegratorConfig, t_guard: float):
    """Follow a separatrix branch until it settles near another saddle.

    Returns (target, t_hit) where target is the lattice saddle whose
    0.05-neighborhood the branch enters, or (None, None).
    """
    base = spec.unperturbed()
    z = saddle.xy() + 1e-4 * direction     # coarse probe offset
    rhs = integrate.model_rhs(base)
    t, dt = 0.0, 0.5
    while t < t_guard:
        z, _, _ = integrate._drive(rhs, t, z, t + dt, config)
        t += dt
        if math.hypot(z[0] - saddle.x, z[1] - saddle.y) < 0.04:
            continue
        for cand in _lattice_saddles_near(spec, float(z[0]), float(z[1])):
            if _same_saddle(spec, cand, saddle, modulo=False):
                continue
            if math.hypot(z[0] - cand.x, z[1] - cand.y) < 0.04:
                return cand, t
    return None, None


def _half_orbit(spec: ModelSpec, saddle: PhaseState, direction: np.ndarray,
                duration: float, dtau: float, config: IntegratorConfig,
                backward: bool, seed_offset: float):
    """Sample a separatrix half starting ``seed_offset`` along ``direction``.

    Forward halves ride the unstable eigenvector, backward halves the
    stable one; transverse errors contract in the direction travelled,
    so both halves stay pinned to the manifold.
    """
    base = spec.unperturbed()
    z0 = saddle.xy() + seed_offset * direction
    sign = -1.0 if backward else 1.0
    n = int(math.ceil(duration / dtau))
    t_samples = sign * dtau * np.arange(1, n + 1)
    _, ts, zs = integrate._drive(integrate.model_rhs(base), 0.0, z0,
                                 sign * (duration + dtau), config,
                                 t_samples=t_samples)
    keep = slice(None, -1)  # drop the endpoint helper sample
    return ts[keep], zs[keep, 0], zs[keep, 1]


def separatrix(spec: ModelSpec, connection, t_cut: float | None = None,
               dtau: float = 2e-3,
               config: IntegratorConfig = SEP_CONFIG,
               seed_offset: float = SEED_OFFSET) -> SeparatrixOrbit:
    """Construct the unperturbed connection between two saddles.

    ``connection`` is an ordered pair of saddle-grid points; the target
    is matched modulo 2*pi cells and resolved to its lift location.
    Raises NoSuchConnection when the levels differ or no branch of the
    source's unstable manifold reaches the target.

    Sample layout: the numeric half-orbits cover |tau| up to roughly
    log(1/seed_offset)/nu; beyond that the deep tails are synthesized
    from the exact saddle asymptotics z = saddle + w*exp(-nu*|tau-ref|),
    whose error is O(|w|^2) ~ 1e-16 and which keeps the quadrature
    envelope decaying all the way to the truncation point.
    """
    src, dst = connection
    base = spec.unperturbed()
    lvl_a = models.separatrix_level(base, src)
    lvl_b = models.separatrix_level(base, dst)
    if abs(lvl_a - lvl_b) > LEVEL_TOL:
        raise NoSuchConnection(
            f"no such connection: separatrix levels differ "
            f"({lvl_a:.12g} vs {lvl_b:.12g})")
    nu, v_u, _ = models.saddle_linearization(base, src)
    if t_cut is None:
        t_cut = 31.0 / nu

    # resolve the branch that actually reaches dst (modulo full cells)
    target, t_hit, branch = None, None, None
    for s in (+1.0, -1.0):
        cand, t_c = _shoot_branch(spec, src, s * v_u, config,
                                  t_guard=40.0 / nu + 40.0)
        if cand is not None and _same_saddle(spec, cand, dst, modulo=True):
            target, t_hit, branch = cand, t_c, s
            break
    if target is None:
        raise NoSuchConnection(
            "no such connection: unstable branches of the source do not "
            "reach the target saddle")

    # numeric half length: covers seed-to-symmetry plus an overhang that
    # still stops well before the orbit could veer off along the
    # target's unstable manifold and grow a second speed peak
    half_len = math.log(1.0 / seed_offset) / nu + t_hit + 5.0
    tf, xf, yf = _half_orbit(spec, src, branch * v_u, half_len, dtau, config,
                             backward=False, seed_offset=seed_offset)
    speed_f = _speed(base, xf, yf)
    i_f = int(np.argmax(speed_f))
    if i_f in (0, len(tf) - 1):
        raise NoSuchConnection(
            "no such connection: could not bracket the symmetry point")
    t0_f = _refine_peak(tf, speed_f, i_f)   # symmetry point, forward clock

    # incoming direction probed mid-tail, where the displacement from
    # the target still towers over the integration noise floor
    _, _, v_s_b = models.saddle_linearization(base, target)
    t_probe = t0_f + min(10.0 / nu, 0.8 * (tf[-1] - t0_f))
    incoming = np.array([np.interp(t_probe, tf, xf) - target.x,
                         np.interp(t_probe, tf, yf) - target.y])
    s2 = 1.0 if float(incoming @ v_s_b) >= 0 else -1.0
    tb, xb, yb = _half_orbit(spec, target, s2 * v_s_b, half_len, dtau, config,
                             backward=True, seed_offset=seed_offset)
    # the backward half's symmetry clock comes from matching the forward
    # symmetry point (speed maxima need not be unique, e.g. on eye arcs)
    pivot = np.array([np.interp(t0_f, tf, xf), np.interp(t0_f, tf, yf)])
    d2 = (xb - pivot[0]) ** 2 + (yb - pivot[1]) ** 2
    i_b = int(np.argmin(d2))
    if i_b in (0, len(tb) - 1):
        raise NoSuchConnection(
            "no such connection: could not match the symmetry point on "
            "the backward half")
    t0_b = _refine_trough(tb, d2, i_b)      # symmetry point, backward clock

    order_b = np.argsort(tb)
    glue = math.hypot(
        np.interp(t0_b, tb[order_b], xb[order_b]) - pivot[0],
        np.interp(t0_b, tb[order_b], yb[order_b]) - pivot[1])
    if glue > GLUE_TOL:
        raise NoSuchConnection(
            f"no such connection: half-orbits disagree at the symmetry "
            f"point (mismatch {glue:.3g})")

    # uniform grid [-t_cut, t_cut]: tau <= 0 served by the forward half,
    # tau > 0 by the backward half; each resampled at exact clock times.
    n_side = int(round(t_cut / dtau))
    tau = dtau * np.arange(-n_side, n_side + 1)
    neg, pos = tau[tau <= 0], tau[tau > 0]

    lo_num = 2.0 * dtau - t0_f           # numeric reach of the forward half
    neg_num, neg_syn = neg[neg >= lo_num], neg[neg < lo_num]
    xs_n, ys_n = _resample(spec, src, branch * v_u, t0_f + neg_num, dtau,
                           config, seed_offset, backward=False)
    hi_num = -t0_b - 2.0 * dtau          # numeric reach of the backward half
    pos_num, pos_syn = pos[pos <= hi_num], pos[pos > hi_num]
    xs_p, ys_p = _resample(spec, target, s2 * v_s_b, t0_b + pos_num, dtau,
                           config, seed_offset, backward=True)

    x_tail_n, y_tail_n = _synthetic_tail(src, nu, neg_syn, neg_num[0],
                                         xs_n[0], ys_n[0], toward=False)
    x_tail_p, y_tail_p = _synthetic_tail(target, nu, pos_syn, pos_num[-1],
                                         xs_p[-1], ys_p[-1], toward=True)
    x = np.concatenate([x_tail_n, xs_n, xs_p, x_tail_p])
    y = np.concatenate([y_tail_n, ys_n, ys_p, y_tail_p])

    sep = SeparatrixOrbit(
        spec=base, connection=(src, target), tau=tau, x=x, y=y,
        decay_rate=nu, t_cut=float(t_cut), dtau=float(dtau),
        glue_error=float(glue))
    _assert_endpoints(sep)
    return sep


def _synthetic_tail(saddle: PhaseState, nu: float, taus, tau_ref: float,
                    x_ref: float, y_ref: float, toward: bool):
    """Deep-tail samples from the linearized saddle dynamics.

    ``toward`` selects decay for growing tau (approach to the target);
    otherwise displacement shrinks as tau decreases toward the source.
    """
    if len(taus) == 0:
        return np.empty(0), np.empty(0)
    sign = -1.0 if toward else 1.0
    factor = np.exp(sign * nu * (np.asarray(taus) - tau_ref))
    return (saddle.x + (x_ref - saddle.x) * factor,
            saddle.y + (y_ref - saddle.y) * factor)


def _assert_endpoints(sep: SeparatrixOrbit, c_bound: float = 100.0):
    """Tail criterion: endpoints within C*exp(-nu*t_cut) of the saddles."""
    src, dst = sep.connection
    d0 = math.hypot(sep.x[0] - src.x, sep.y[0] - src.y)
    d1 = math.hypot(sep.x[-1] - dst.x, sep.y[-1] - dst.y)
    bound = c_bound * math.exp(-sep.decay_rate * sep.t_cut)
    if not (d0 <= max(bound, 1e-7) and d1 <= max(bound, 1e-7)):
        raise NoSuchConnection(
            f"no such connection: endpoints miss the saddles "
            f"({d0:.3g}, {d1:.3g})")


def _speed(spec: ModelSpec, x, y):
    """L1 speed |xdot| + |ydot|; its maximum pins the tau = 0 phase."""
    xd, yd = models.velocity(spec, x, y, 0.0)
    return np.abs(np.asarray(xd)) + np.abs(np.asarray(yd))


def _refine_peak(t, v, i):
    """Quadratic refinement of a sampled maximum."""
    t1, t2, t3 = t[i - 1], t[i], t[i + 1]
    v1, v2, v3 = v[i - 1], v[i], v[i + 1]
    denom = (v1 - 2 * v2 + v3)
    if denom == 0:
        return float(t2)
    return float(t2 - 0.5 * (t3 - t2) * (v3 - v1) / denom)


_refine_trough = _refine_peak   # same parabola, applied to a minimum


def _resample(spec, saddle, direction, clock_times, dtau, config,
              seed_offset, backward):
    """Re-integrate a half-orbit sampling it at exact clock times."""
    base = spec.unperturbed()
    z0 = saddle.xy() + seed_offset * direction
    times = np.asarray(clock_times, dtype=float)
    sign = -1.0 if backward else 1.0
    order = np.argsort(sign * times)
    t_sorted = times[order]
    t_end = t_sorted[-1] + sign * dtau
    _, ts, zs = integrate._drive(integrate.model_rhs(base), 0.0, z0, t_end,
                                 config, t_samples=t_sorted)
    # _drive returns [t0, samples..., t_end]; strip the bookends
    xs, ys = zs[1:-1, 0], zs[1:-1, 1]
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return xs[inv], ys[inv]


def _pert_gradient_bound(pert: TrigSum) -> float:
    return sum(abs(tm.c) * (abs(tm.a) + abs(tm.b)) for tm in pert.terms)


def _check_tails(sep: SeparatrixOrbit, pert: TrigSum | None = None):
    bound = _pert_gradient_bound(pert) if pert is not None else 1.0
    if bound == 0.0:
        return
    for idx in (0, -1):
        gx, gy = _grad_h0(sep.spec, sep.x[idx], sep.y[idx])
        env = math.hypot(float(gx), float(gy)) * bound
        if env > TAIL_THRESHOLD:
            raise TailTruncationError(
                f"integrand envelope {env:.3g} at |tau| = {sep.t_cut:.3g} "
                f"exceeds {TAIL_THRESHOLD:g}; increase t_cut")


@dataclass
class MelnikovProfile:
    """M(t0) on a phase grid plus its exact harmonic decomposition."""

    t0: np.ndarray
    values: np.ndarray
    zeros: list[tuple[float, float]]        # (t0*, slope), simple zeros
    harmonics: dict[int, tuple[float, float]]  # m -> (A_m, B_m)
    amplitude: float
    gradient_norm: float                    # |grad h0| at the symmetry point
    t_cut: float
    dtau: float
    tail_bound: float

    def __call__(self, t0):
        t0 = np.asarray(t0, dtype=float)
        out = np.zeros_like(t0)
        for m, (a, b) in self.harmonics.items():
            out = out + a * np.cos(m * t0) + b * np.sin(m * t0)
        return out if out.shape else float(out)

    def slope(self, t0):
        t0 = np.asarray(t0, dtype=float)
        out = np.zeros_like(t0)
        for m, (a, b) in self.harmonics.items():
            out = out + m * (-a * np.sin(m * t0) + b * np.cos(m * t0))
        return out if out.shape else float(out)


def melnikov_profile(spec: ModelSpec, sep: SeparatrixOrbit,
                     perturbation: TrigSum, n_t0: int = 64,
                     slope_tol: float = 1e-9) -> MelnikovProfile:
    """Evaluate M(t0) for a trig-sum perturbing Hamiltonian.

    Each term c*cos(a x + b y + m t + phi) contributes the pure m-th
    harmonic in t0; the two quadratures per term are composite-Simpson
    sums over the separatrix samples (linearity makes this identical to
    quadrature at fixed t0).
    """
    if n_t0 < 64:
        raise ValueError("need at least 64 phase samples")
    _check_tails(sep, perturbation)
    h0x, h0y = _grad_h0(sep.spec, sep.x, sep.y)
    harmonics: dict[int, tuple[float, float]] = {}
    for tm in perturbation.terms:
        w = tm.c * (tm.a * h0y - tm.b * h0x)
        theta0 = tm.a * sep.x + tm.b * sep.y + tm.m * sep.tau + tm.phi
        a_part = float(simpson(w * np.sin(theta0), dx=sep.dtau))
        b_part = float(simpson(w * np.cos(theta0), dx=sep.dtau))
        # c*(a h0y - b h0x) sin(theta0 + m t0)
        a_m, b_m = harmonics.get(tm.m, (0.0, 0.0))
        harmonics[tm.m] = (a_m + a_part, b_m + b_part)

    t0 = np.linspace(0.0, TWO_PI, n_t0, endpoint=False)
    gx, gy = _grad_h0(sep.spec, sep.point_at(0.0)[0], sep.point_at(0.0)[1])
    tail_env = sep.gradient_norm_at(sep.t_cut) * _pert_gradient_bound(perturbation)
    prof = MelnikovProfile(
        t0=t0, values=np.zeros_like(t0), zeros=[], harmonics=harmonics,
        amplitude=0.0, gradient_norm=float(math.hypot(float(gx), float(gy))),
        t_cut=sep.t_cut, dtau=sep.dtau,
        tail_bound=float(tail_env / max(sep.decay_rate, 1e-12)))
    prof.values = prof(t0)

    fine = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
    vals = prof(fine)
    prof.amplitude = float(np.max(np.abs(vals))) if vals.size else 0.0
    if prof.amplitude > 0.0:
        prof.zeros = _find_zeros(prof, fine, vals, slope_tol)
    return prof


def _find_zeros(prof: MelnikovProfile, grid, vals, slope_tol):
    zeros = []
    n = grid.size
    for i in range(n):
        va, vb = vals[i], vals[(i + 1) % n]
        if va == 0.0:
            slope = prof.slope(grid[i])
            if abs(slope) > slope_tol:
                zeros.append((float(grid[i]), float(slope)))
            continue
        if va * vb < 0.0:
            a = grid[i]
            b = grid[i] + (TWO_PI / n)
            root = brentq(prof, a, b, xtol=1e-13)
            slope = prof.slope(root)
            if abs(slope) > slope_tol:
                zeros.append((float(root % TWO_PI), float(slope)))
    return zeros


def melnikov_value_direct(sep: SeparatrixOrbit, perturbation: TrigSum,
                          t0: float) -> float:
    """Direct quadrature of the bracket at a single phase (test oracle)."""
    h0x, h0y = _grad_h0(sep.spec, sep.x, sep.y)
    total = 0.0
    for tm in perturbation.terms:
        w = tm.c * (tm.a * h0y - tm.b * h0x)
        theta = tm.a * sep.x + tm.b * sep.y + tm.m * (sep.tau + t0) + tm.phi
        total += float(simpson(w * np.sin(theta), dx=sep.dtau))
    return total


def predict_splitting(profile: MelnikovProfile, mu: float) -> float:
    """First-order splitting distance: mu * max|M| / |grad h0| at tau=0."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if profile.gradient_norm == 0.0:
        raise ValueError("degenerate section gradient")
    return mu * profile.amplitude / profile.gradient_norm
