"""The two model Hamiltonian families and their closed-form structure.

Family CUBIC lives on T x R x T:

    H(x, y, t) = y^2/2 - y^3/3 - (eps/12) cos x + [coupling] * mu * f(x, y, t)

Family TORUS lives on T^3:

    H(x, y, t) = cos y - eps cos x + [coupling] * mu * f(x, y, t)

with ``coupling`` either ``eps * mu * f`` (the product form in which the
non-integrable part rides on the resonance strength) or plain ``mu * f``.
All derivatives used anywhere in the toolkit are exact; there is no
numerical differentiation outside of test oracles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .trig import TrigSum

TWO_PI = 2.0 * math.pi


class Family(enum.Enum):
    CUBIC = "cubic"
    TORUS = "torus"


class Coupling(enum.Enum):
    EPS_MU = "eps-mu"   # H = H0 + eps*(-V + mu f): forcing scaled by eps*mu
    MU_ONLY = "mu-only"  # forcing scaled by mu alone


def wrap_angle(v):
    """Wrap to [-pi, pi)."""
    return (np.asarray(v) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class PhaseState:
    """A point (x, y, t) in extended phase space.

    Coordinates are stored unwrapped (the lift); wrapped views are
    computed on demand so wrapped and lifted values agree mod 2*pi by
    construction.
    """

    x: float
    y: float
    t: float = 0.0

    @property
    def x_wrapped(self) -> float:
        return float(wrap_angle(self.x))

    @property
    def y_wrapped(self) -> float:
        return float(wrap_angle(self.y))

    @property
    def t_wrapped(self) -> float:
        return float(np.asarray(self.t) % TWO_PI)

    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class ModelSpec:
    """Which family, its parameters, and the perturbation."""

    family: Family
    epsilon: float
    mu: float = 0.0
    perturbation: TrigSum = TrigSum.default()
    coupling: Coupling = Coupling.MU_ONLY

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 2.0):
            raise ValueError(f"epsilon must lie in (0, 2], got {self.epsilon}")
        if self.mu < 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")

    @property
    def forcing_factor(self) -> float:
        """Prefactor multiplying f: eps*mu or mu depending on coupling."""
        base = self.epsilon if self.coupling is Coupling.EPS_MU else 1.0
        return base * self.mu

    def unperturbed(self) -> "ModelSpec":
        return replace(self, mu=0.0)


def energy(spec: ModelSpec, x, y, t=0.0):
    """H(x, y, t); time-independent when mu = 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spec.family is Family.CUBIC:
        h0 = y * y / 2.0 - y ** 3 / 3.0 - (spec.epsilon / 12.0) * np.cos(x)
    else:
        h0 = np.cos(y) - spec.epsilon * np.cos(x)
    c = spec.forcing_factor
    if c:
        h0 = h0 + c * spec.perturbation.value(x, y, t)
    return h0 if h0.shape else float(h0)


def velocity(spec: ModelSpec, x, y, t=0.0):
    """Hamiltonian vector field (dx/dt, dy/dt) = (dH/dy, -dH/dx)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = spec.forcing_factor
    if spec.family is Family.CUBIC:
        xdot = y - y * y
        ydot = -(spec.epsilon / 12.0) * np.sin(x)
    else:
        xdot = -np.sin(y)
        ydot = -spec.epsilon * np.sin(x)
    if c:
        f = spec.perturbation
        xdot = xdot + c * f.dy(x, y, t)
        ydot = ydot - c * f.dx(x, y, t)
    return xdot, ydot


def vector_field(spec: ModelSpec, s: PhaseState) -> tuple[float, float]:
    xdot, ydot = velocity(spec, s.x, s.y, s.t)
    return float(xdot), float(ydot)


def hessian(spec: ModelSpec, x, y, t=0.0):
    """Second partials (H_xx, H_xy, H_yy) of the full Hamiltonian."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = spec.forcing_factor
    if spec.family is Family.CUBIC:
        hxx = (spec.epsilon / 12.0) * np.cos(x)
        hyy = 1.0 - 2.0 * y
    else:
        hxx = spec.epsilon * np.cos(x)
        hyy = -np.cos(y)
    hxy = np.zeros(np.broadcast(x, y).shape)
    if c:
        f = spec.perturbation
        hxx = hxx + c * f.dxx(x, y, t)
        hxy = hxy + c * f.dxy(x, y, t)
        hyy = hyy + c * f.dyy(x, y, t)
    return hxx, hxy, hyy


def saddle_grid(spec: ModelSpec, k_range, kp_range=None) -> list[PhaseState]:
    """Hyperbolic critical points of the mu = 0 system.

    CUBIC: ((2k+1) pi, 0) and (2k pi, 1) for k in ``k_range``.
    TORUS: (2k pi, 2k' pi) and ((2k+1) pi, (2k'+1) pi) over both ranges.
    """
    ks = list(k_range)
    if spec.family is Family.CUBIC:
        first = [PhaseState((2 * k + 1) * math.pi, 0.0) for k in ks]
        second = [PhaseState(2 * k * math.pi, 1.0) for k in ks]
        return first + second
    kps = ks if kp_range is None else list(kp_range)
    first = [PhaseState(2 * k * math.pi, 2 * kp * math.pi)
             for k in ks for kp in kps]
    second = [PhaseState((2 * k + 1) * math.pi, (2 * kp + 1) * math.pi)
              for k in ks for kp in kps]
    return first + second


def center_grid(spec: ModelSpec, k_range, kp_range=None) -> list[PhaseState]:
    """Elliptic critical points of the mu = 0 system (eye centers)."""
    ks = list(k_range)
    if spec.family is Family.CUBIC:
        return ([PhaseState(2 * k * math.pi, 0.0) for k in ks]
                + [PhaseState((2 * k + 1) * math.pi, 1.0) for k in ks])
    kps = ks if kp_range is None else list(kp_range)
    return ([PhaseState((2 * k + 1) * math.pi, 2 * kp * math.pi)
             for k in ks for kp in kps]
            + [PhaseState(2 * k * math.pi, (2 * kp + 1) * math.pi)
               for k in ks for kp in kps])


def _is_unperturbed_saddle(spec: ModelSpec, s: PhaseState, tol: float = 1e-9) -> bool:
    kx = s.x / math.pi
    if abs(kx - round(kx)) > tol:
        return False
    kx = int(round(kx))
    if spec.family is Family.CUBIC:
        if kx % 2 == 1:
            return abs(s.y) <= tol
        return abs(s.y - 1.0) <= tol
    ky = s.y / math.pi
    if abs(ky - round(ky)) > tol:
        return False
    ky = int(round(ky))
    return (kx % 2) == (ky % 2)


def separatrix_level(spec: ModelSpec, saddle: PhaseState) -> float:
    """Energy of the separatrix attached to an unperturbed saddle."""
    if not _is_unperturbed_saddle(spec, saddle):
        raise ValueError("not an unperturbed saddle")
    return float(energy(spec.unperturbed(), saddle.x, saddle.y, 0.0))


def saddle_levels(spec: ModelSpec) -> tuple[float, float]:
    """Separatrix levels of the two saddle families.

    CUBIC: (eps/12, 1/6 - eps/12); TORUS: (1 - eps, eps - 1).  The two
    values coincide exactly at eps = 1 (the heteroclinic reconnection).
    """
    if spec.family is Family.CUBIC:
        return spec.epsilon / 12.0, 1.0 / 6.0 - spec.epsilon / 12.0
    return 1.0 - spec.epsilon, spec.epsilon - 1.0


def saddle_linearization(spec: ModelSpec, saddle: PhaseState):
    """Eigenstructure of the mu = 0 flow linearized at a saddle.

    Returns (nu, v_unstable, v_stable): nu > 0 is the expansion rate
    (sqrt(eps/12) for CUBIC, sqrt(eps) for TORUS) and the vectors are
    unit eigenvectors of [[0, H_yy], [-H_xx, 0]].
    """
    if not _is_unperturbed_saddle(spec, saddle):
        raise ValueError("not an unperturbed saddle")
    base = spec.unperturbed()
    hxx, _, hyy = hessian(base, saddle.x, saddle.y, 0.0)
    hxx, hyy = float(hxx), float(hyy)
    prod = -hxx * hyy
    if prod <= 0.0:
        raise ValueError("not an unperturbed saddle")
    nu = math.sqrt(prod)
    v_u = np.array([1.0, nu / hyy])
    v_s = np.array([1.0, -nu / hyy])
    return nu, v_u / np.linalg.norm(v_u), v_s / np.linalg.norm(v_s)
