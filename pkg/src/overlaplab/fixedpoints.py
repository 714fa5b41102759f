"""Hyperbolic fixed points of the stroboscopic map.

For mu > 0 the unperturbed saddles continue to hyperbolic periodic
orbits of the flow, i.e. fixed points of the time-2*pi map that stay
O(mu)-close to the saddle grid.  A damped Newton iteration on
P(s) - s refines them, with the Jacobian of P supplied by the
variational equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import integrate, models
from .errors import NoConvergence, NotHyperbolic
from .integrate import DEFAULT_CONFIG, IntegratorConfig
from .models import ModelSpec, PhaseState

RESIDUAL_TOL = 1e-10
MAX_ITER = 25
HYPERBOLIC_MARGIN = 1e-8


@dataclass(frozen=True)
class HyperbolicOrbit:
    """A hyperbolic fixed point of the time-2*pi map at phase t0 = 0."""

    base: PhaseState
    eigenvalues: tuple[float, float]          # (lambda_u, lambda_s)
    eigenvectors: np.ndarray                  # columns: unstable, stable
    residual: float
    parent_saddle: PhaseState
    spec: ModelSpec

    @property
    def lambda_u(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda_s(self) -> float:
        return self.eigenvalues[1]

    @property
    def unstable_direction(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def stable_direction(self) -> np.ndarray:
        return self.eigenvectors[:, 1]

    def saddle_distance(self) -> float:
        return float(math.hypot(self.base.x - self.parent_saddle.x,
                                self.base.y - self.parent_saddle.y))

    def to_dict(self) -> dict:
        return {
            "base": {"x": self.base.x, "y": self.base.y, "t": self.base.t},
            "eigenvalues": {"unstable": self.eigenvalues[0],
                            "stable": self.eigenvalues[1]},
            "eigenvectors": {
                "unstable": list(map(float, self.eigenvectors[:, 0])),
                "stable": list(map(float, self.eigenvectors[:, 1])),
            },
            "residual": self.residual,
            "parent_saddle": {"x": self.parent_saddle.x,
                              "y": self.parent_saddle.y},
            "saddle_distance": self.saddle_distance(),
            "spec": {
                "family": self.spec.family.value,
                "epsilon": self.spec.epsilon,
                "mu": self.spec.mu,
                "coupling": self.spec.coupling.value,
                "perturbation": self.spec.perturbation.to_text(),
            },
        }


def _eigendata(jac: np.ndarray):
    """Real eigen-decomposition of a 2x2 strobe-map Jacobian.

    Returns (lambda_u, lambda_s, v_u, v_s) or raises NotHyperbolic when
    the spectrum sits on the unit circle (within the margin).
    """
    tr = jac[0, 0] + jac[1, 1]
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    disc = tr * tr - 4.0 * det
    if disc <= 0.0:
        raise NotHyperbolic(
            f"complex multipliers (trace {tr:.6g}, det {det:.6g})")
    root = math.sqrt(disc)
    lam1 = (tr + root) / 2.0
    lam2 = (tr - root) / 2.0
    lam_u, lam_s = (lam1, lam2) if abs(lam1) >= abs(lam2) else (lam2, lam1)
    if abs(lam_u) <= 1.0 + HYPERBOLIC_MARGIN:
        raise NotHyperbolic(
            f"largest multiplier {lam_u:.12g} not off the unit circle")

    def eigvec(lam):
        a = np.array([jac[0, 0] - lam, jac[0, 1]])
        b = np.array([jac[1, 0], jac[1, 1] - lam])
        # null direction of (J - lam I): orthogonal to the larger row
        row = a if np.linalg.norm(a) >= np.linalg.norm(b) else b
        v = np.array([-row[1], row[0]])
        v = v / np.linalg.norm(v)
        if v[0] < 0 or (v[0] == 0 and v[1] < 0):
            v = -v
        return v

    return lam_u, lam_s, eigvec(lam_u), eigvec(lam_s)


def _nearest_saddle(spec: ModelSpec, x: float, y: float) -> PhaseState:
    if spec.family is models.Family.CUBIC:
        if abs(y - 1.0) < abs(y):
            k = round(x / (2 * math.pi))
            return PhaseState(2 * k * math.pi, 1.0)
        k = round((x - math.pi) / (2 * math.pi))
        return PhaseState((2 * k + 1) * math.pi, 0.0)
    i = round(x / math.pi)
    j = round(y / math.pi)
    if (i + j) % 2 != 0:
        # snap to the closer saddle parity along the dominant offset
        if abs(x - i * math.pi) > abs(y - j * math.pi):
            i += 1 if x > i * math.pi else -1
        else:
            j += 1 if y > j * math.pi else -1
    return PhaseState(i * math.pi, j * math.pi)


def refine_fixed_point(spec: ModelSpec, guess: PhaseState,
                       config: IntegratorConfig = DEFAULT_CONFIG,
                       parent: Optional[PhaseState] = None,
                       tol: float = RESIDUAL_TOL,
                       max_iter: int = MAX_ITER) -> HyperbolicOrbit:
    """Newton-refine a fixed point of the time-2*pi map near ``guess``.

    Damping halves the step whenever the residual fails to decrease.
    Raises NoConvergence if the residual stagnates above ``tol`` and
    NotHyperbolic if the converged point is elliptic/parabolic.
    """
    s = np.array([guess.x, guess.y], dtype=float)
    img, jac = integrate.strobe_with_jacobian(spec, s, config)
    res = float(np.linalg.norm(img - s))
    history = [res]
    for _ in range(max_iter):
        if res <= tol:
            break
        try:
            step = np.linalg.solve(jac - np.eye(2), -(img - s))
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Newton system: {exc}",
                                history) from exc
        lam = 1.0
        while lam >= 1.0 / 64.0:
            trial = s + lam * step
            img_t, jac_t = integrate.strobe_with_jacobian(spec, trial, config)
            res_t = float(np.linalg.norm(img_t - trial))
            if res_t < res:
                break
            lam /= 2.0
        else:
            raise NoConvergence(
                f"residual stagnated at {res:.3e} (target {tol:.1e})",
                history)
        s, img, jac, res = trial, img_t, jac_t, res_t
        history.append(res)
    if res > tol:
        raise NoConvergence(
            f"no convergence after {max_iter} iterations "
            f"(residual {res:.3e})", history)
    lam_u, lam_s, v_u, v_s = _eigendata(jac)
    base = PhaseState(float(s[0]), float(s[1]), 0.0)
    parent_saddle = parent if parent is not None else _nearest_saddle(
        spec, base.x, base.y)
    return HyperbolicOrbit(
        base=base,
        eigenvalues=(lam_u, lam_s),
        eigenvectors=np.column_stack([v_u, v_s]),
        residual=res,
        parent_saddle=parent_saddle,
        spec=spec,
    )


def continue_from_saddle(spec: ModelSpec, saddle: PhaseState,
                         config: IntegratorConfig = DEFAULT_CONFIG,
                         ) -> HyperbolicOrbit:
    """Refine the periodic orbit continuing a grid saddle at spec.mu.

    Strong hyperbolicity (multipliers of order exp(2*pi*sqrt(eps)))
    shrinks the Newton basin well below the O(mu) displacement, so the
    forcing strength is ramped up in steps; a step is rejected and
    halved when the iterate jumps further than continuation could
    justify, which catches convergence to some other fixed point.
    """
    orbit = refine_fixed_point(spec.unperturbed(), saddle, config,
                               parent=saddle)
    if spec.mu == 0.0:
        return orbit
    mu_now, step = 0.0, spec.mu
    while mu_now < spec.mu:
        mu_try = min(spec.mu, mu_now + step)
        d_mu = mu_try - mu_now
        try:
            cand = refine_fixed_point(replace(spec, mu=mu_try), orbit.base,
                                      config, parent=saddle)
            jump = float(np.linalg.norm(
                np.array([cand.base.x - orbit.base.x,
                          cand.base.y - orbit.base.y])))
            if jump > max(0.02, 10.0 * d_mu):
                raise NoConvergence(
                    f"iterate jumped {jump:.3g} at mu={mu_try:.3g}; "
                    "likely left the continuation branch")
        except (NoConvergence, NotHyperbolic):
            step = d_mu / 2.0
            if step < 1e-6 * max(spec.mu, 1.0):
                raise
            continue
        orbit, mu_now = cand, mu_try
    return orbit


@dataclass
class ContinuationResult:
    orbits: list[HyperbolicOrbit]
    failure: Optional[tuple[float, Exception]] = None  # (param value, error)


def continue_orbit(spec: ModelSpec, orbit: HyperbolicOrbit, target: float,
                   n_steps: int, parameter: str = "mu",
                   config: IntegratorConfig = DEFAULT_CONFIG,
                   ) -> ContinuationResult:
    """Naive parameter continuation: linear steps, previous base as seed.

    ``parameter`` is "mu" or "epsilon".  Returns the chain including the
    starting orbit; stops early (recording the failure) if a step does
    not converge.
    """
    if parameter not in ("mu", "epsilon"):
        raise ValueError("parameter must be 'mu' or 'epsilon'")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    chain = [orbit]
    if n_steps == 0:
        return ContinuationResult(chain)
    start = getattr(spec, parameter)
    values = np.linspace(start, target, n_steps + 1)[1:]
    current = orbit
    for value in values:
        step_spec = replace(spec, **{parameter: float(value)})
        try:
            current = refine_fixed_point(step_spec, current.base, config,
                                         parent=current.parent_saddle)
        except (NoConvergence, NotHyperbolic) as err:
            return ContinuationResult(chain, (float(value), err))
        chain.append(current)
    return ContinuationResult(chain)
