"""Regime classification in the (eps, mu) plane and transport statistics.

A cell is CONFINED when an ensemble seeded between the two resonance
rows never leaves the probe band *and* a rotational invariant circle
separating the rows is exhibited (positive evidence); it is OVERLAPPED
when some tested orbit escapes the band (the escape orbit is the
witness).  Budget exhaustion without either outcome is UNDETERMINED.

Seeding respects the unperturbed geometry: orbits in the stochastic
layer of an eye circulate around it (through y below the saddle row)
even deep in the confined regime, so confinement seeds sit on
unperturbed rotational levels strictly between the two separatrix
levels.  When that level gap is empty (eps >= 1) the rows are probed
with layer seeds riding the saddles' unstable directions instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import integrate, models
from .integrate import ENSEMBLE_CONFIG, IntegratorConfig
from .models import Family, ModelSpec, PhaseState

TWO_PI = 2.0 * math.pi


class Verdict(enum.Enum):
    CONFINED = "confined"
    OVERLAPPED = "overlapped"
    UNDETERMINED = "undetermined"


# -- seeding on the unperturbed geometry --------------------------------


def _saddle_rows(spec: ModelSpec, band) -> list[float]:
    """Saddle-family y-values inside the band, ascending."""
    y_lo, y_hi = band
    if spec.family is Family.CUBIC:
        rows = [y for y in (0.0, 1.0) if y_lo <= y <= y_hi]
    else:
        k_lo = int(math.floor(y_lo / math.pi))
        k_hi = int(math.ceil(y_hi / math.pi))
        rows = [k * math.pi for k in range(k_lo, k_hi + 1)
                if y_lo <= k * math.pi <= y_hi]
    if len(rows) < 2:
        raise ValueError("band must contain both saddle families' y-values")
    return rows


def _row_saddle(spec: ModelSpec, row_y: float) -> PhaseState:
    if spec.family is Family.CUBIC:
        return (PhaseState(math.pi, 0.0) if row_y == 0.0
                else PhaseState(0.0, 1.0))
    k = int(round(row_y / math.pi))
    x = 0.0 if k % 2 == 0 else math.pi
    return PhaseState(x, row_y)


def _gap_level_range(spec: ModelSpec) -> tuple[float, float]:
    """Unperturbed energy levels of rotational curves between the rows."""
    lvl_a, lvl_b = models.saddle_levels(spec)
    return (min(lvl_a, lvl_b), max(lvl_a, lvl_b))


def _gap_curve_y(spec: ModelSpec, c: float, x: float,
                 gap: tuple[float, float]) -> float:
    """y on the unperturbed rotational curve of level c at abscissa x."""
    if spec.family is Family.TORUS:
        arg = c + spec.epsilon * math.cos(x)
        arg = min(1.0, max(-1.0, arg))
        y_lo, y_hi = gap
        if int(round(y_lo / math.pi)) % 2 == 0:
            return y_lo + math.acos(arg)
        return y_hi - math.acos(arg)
    rhs = c + (spec.epsilon / 12.0) * math.cos(x)
    g = lambda y: y * y / 2.0 - y ** 3 / 3.0 - rhs
    lo, hi = 1e-12, 1.0 - 1e-12
    if g(lo) > 0 or g(hi) < 0:
        return float("nan")
    return float(brentq(g, lo, hi, xtol=1e-13))


def gap_seeds(spec: ModelSpec, gap: tuple[float, float], n: int,
              margin: float = 0.12) -> np.ndarray:
    """Seeds stratified over rotational levels strictly inside the gap."""
    lvl_lo, lvl_hi = _gap_level_range(spec)
    width = lvl_hi - lvl_lo
    if width <= 0:
        return np.empty((0, 2))
    n_c = max(2, int(round(math.sqrt(n / 2))))
    n_x = max(2, int(math.ceil(n / n_c)))
    levels = np.linspace(lvl_lo + margin * width, lvl_hi - margin * width, n_c)
    xs = np.linspace(-math.pi, math.pi, n_x, endpoint=False)
    pts = []
    for c in levels:
        for x in xs:
            y = _gap_curve_y(spec, float(c), float(x), gap)
            if math.isfinite(y):
                pts.append((x, y))
    return np.asarray(pts[:n]) if pts else np.empty((0, 2))


def layer_seeds(spec: ModelSpec, rows, n: int) -> np.ndarray:
    """Seeds probing the rows when no rotational gap levels exist.

    Most seeds ride the unstable directions of the row saddles across
    several offset scales (the stochastic layer); the remainder fill
    the zone between the extreme rows on a grid.
    """
    offsets = np.geomspace(1e-3, 5e-2, max(2, n // (2 * len(rows) * 2)))
    pts = []
    for row_y in rows:
        saddle = _row_saddle(spec, row_y)
        try:
            _, v_u, _ = models.saddle_linearization(spec, saddle)
        except ValueError:
            continue
        for sign in (+1.0, -1.0):
            for d in offsets:
                pts.append(saddle.xy() + sign * d * v_u)
    missing = n - len(pts)
    if missing > 0 and len(rows) >= 2:
        y_lo, y_hi = min(rows), max(rows)
        pad = 0.15 * (y_hi - y_lo)
        n_x = max(2, int(math.ceil(math.sqrt(missing))))
        n_y = max(2, int(math.ceil(missing / n_x)))
        xs = np.linspace(-math.pi, math.pi, n_x, endpoint=False)
        ys = np.linspace(y_lo + pad, y_hi - pad, n_y)
        for y in ys:
            for x in xs:
                pts.append(np.array([x, y]))
    return np.asarray(pts[:n]) if pts else np.empty((0, 2))


# -- rotational-circle detection ----------------------------------------


def _trig_design(x: np.ndarray, order: int) -> np.ndarray:
    cols = [np.ones_like(x)]
    for j in range(1, order + 1):
        cols.append(np.cos(j * x))
        cols.append(np.sin(j * x))
    return np.column_stack(cols)


def _graph_fit_residual(xs, ys, order: int = 8):
    """Best trig-polynomial fit of y over wrapped x; max |residual|."""
    xw = np.asarray(xs) % TWO_PI
    design = _trig_design(xw, order)
    coef, *_ = np.linalg.lstsq(design, np.asarray(ys), rcond=None)
    resid = np.asarray(ys) - design @ coef
    return float(np.max(np.abs(resid))), coef


def _winding_coverage(xs) -> float:
    """Largest angular gap left uncovered by the wrapped iterates."""
    xw = np.sort(np.asarray(xs) % TWO_PI)
    if xw.size < 2:
        return TWO_PI
    gaps = np.diff(xw)
    wrap = xw[0] + TWO_PI - xw[-1]
    return float(max(np.max(gaps), wrap))


@dataclass
class CurveEvidence:
    seed: PhaseState
    points: np.ndarray            # strobe iterates (n, 2), lift
    fit_coefficients: np.ndarray
    residual: float
    gap: tuple[float, float]


def _find_rotational_curve(spec: ModelSpec, gap, n_candidates: int,
                           n_strobe: int, curve_tol: float,
                           config: IntegratorConfig,
                           margin: float = 0.08) -> Optional[CurveEvidence]:
    lvl_lo, lvl_hi = _gap_level_range(spec)
    width = lvl_hi - lvl_lo
    if width <= 0:
        return None
    levels = np.linspace(lvl_lo + margin * width, lvl_hi - margin * width,
                         n_candidates)
    seeds = []
    for c in levels:
        y = _gap_curve_y(spec, float(c), math.pi, gap)
        if math.isfinite(y):
            seeds.append((math.pi, y))
    if not seeds:
        return None
    seeds = np.asarray(seeds)
    iters = integrate.ensemble_strobe(spec, seeds, n_strobe, config)
    best: Optional[CurveEvidence] = None
    y_lo, y_hi = gap
    for i in range(seeds.shape[0]):
        xs = iters[:, i, 0]
        ys = iters[:, i, 1]
        if ys.min() <= y_lo or ys.max() >= y_hi:
            continue
        if _winding_coverage(xs) > TWO_PI / 16.0:
            continue
        resid, coef = _graph_fit_residual(xs, ys)
        if resid > curve_tol:
            continue
        if best is None or resid < best.residual:
            best = CurveEvidence(
                seed=PhaseState(float(seeds[i, 0]), float(seeds[i, 1])),
                points=iters[:, i, :].copy(), fit_coefficients=coef,
                residual=resid, gap=(y_lo, y_hi))
    return best


# -- confinement test ----------------------------------------------------


@dataclass
class CrossingEvidence:
    seed: PhaseState
    exit_iterate: int
    exit_time: float
    iterates: np.ndarray          # strobe iterates up to the exit


@dataclass
class ConfinementResult:
    verdict: Verdict
    band: tuple[float, float]
    spec: ModelSpec
    crossing: Optional[CrossingEvidence]
    curves: list[CurveEvidence]
    orbits_run: int
    strobes_run: int
    budget: dict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "band": list(self.band),
            "epsilon": self.spec.epsilon,
            "mu": self.spec.mu,
            "orbits_run": self.orbits_run,
            "strobes_run": self.strobes_run,
            "budget": self.budget,
            "crossing": None if self.crossing is None else {
                "seed": {"x": self.crossing.seed.x, "y": self.crossing.seed.y},
                "exit_iterate": self.crossing.exit_iterate,
                "exit_time": self.crossing.exit_time,
            },
            "curves": [{
                "seed": {"x": c.seed.x, "y": c.seed.y},
                "residual": c.residual,
                "gap": list(c.gap),
            } for c in self.curves],
        }


def confinement_test(spec: ModelSpec, band, n_orbits: int = 64,
                     n_strobe: int = 10_000,
                     config: IntegratorConfig = ENSEMBLE_CONFIG,
                     n_candidates: int = 12, candidate_strobes: int = 1024,
                     curve_tol: float = 0.05,
                     seed_margin: float = 0.12) -> ConfinementResult:
    """Classify one (eps, mu) cell against a vertical probe band.

    CONFINED demands positive evidence (a rotational circle found in
    every inter-row gap), never mere absence of crossings.
    """
    y_lo, y_hi = float(band[0]), float(band[1])
    rows = _saddle_rows(spec, (y_lo, y_hi))
    gaps = list(zip(rows[:-1], rows[1:]))
    budget = {
        "n_orbits": n_orbits, "n_strobe": n_strobe,
        "n_candidates": n_candidates, "candidate_strobes": candidate_strobes,
        "curve_tol": curve_tol, "seed_margin": seed_margin,
        "abs_tol": config.abs_tol, "rel_tol": config.rel_tol,
    }

    seeds = []
    per_gap = max(4, n_orbits // max(1, len(gaps)))
    for gap in gaps:
        pts = gap_seeds(spec, gap, per_gap, seed_margin)
        if pts.size:
            seeds.append(pts)
    if seeds:
        seeds = np.concatenate(seeds)[:n_orbits]
    else:
        seeds = layer_seeds(spec, rows, n_orbits)
    seeds = seeds[(seeds[:, 1] > y_lo) & (seeds[:, 1] < y_hi)]

    crossing: Optional[CrossingEvidence] = None
    strobes_run = 0
    if seeds.shape[0]:
        state = {}

        def watch(k, pts):
            out = (pts[:, 1] < y_lo) | (pts[:, 1] > y_hi)
            if np.any(out):
                state["hit"] = (int(np.argmax(out)), k)
                return False
            return True

        iters = integrate.ensemble_strobe(spec, seeds, n_strobe, config,
                                          callback=watch)
        strobes_run = iters.shape[0] - 1
        if "hit" in state:
            idx, k = state["hit"]
            crossing = CrossingEvidence(
                seed=PhaseState(float(seeds[idx, 0]), float(seeds[idx, 1])),
                exit_iterate=k, exit_time=k * TWO_PI,
                iterates=iters[:, idx, :].copy())
            return ConfinementResult(Verdict.OVERLAPPED, (y_lo, y_hi), spec,
                                     crossing, [], seeds.shape[0],
                                     strobes_run, budget)

    curves = []
    for gap in gaps:
        ev = _find_rotational_curve(spec, gap, n_candidates,
                                    candidate_strobes, curve_tol, config)
        if ev is None:
            return ConfinementResult(Verdict.UNDETERMINED, (y_lo, y_hi),
                                     spec, None, curves, seeds.shape[0],
                                     strobes_run, budget)
        curves.append(ev)
    return ConfinementResult(Verdict.CONFINED, (y_lo, y_hi), spec, None,
                             curves, seeds.shape[0], strobes_run, budget)


# -- rotation number -----------------------------------------------------


@dataclass
class RotationResult:
    value: Optional[float]        # mean lifted-x advance per strobe
    is_circle: bool
    librational: bool
    y_spread: float               # detrended spread of y over wrapped x
    convergence_error: float

    @property
    def not_circle(self) -> bool:
        return not self.is_circle


def _birkhoff_weights(n: int) -> np.ndarray:
    u = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (u * (1.0 - u)))
    return w / w.sum()


def rotation_number(spec: ModelSpec, s0: PhaseState, n_strobe: int = 2048,
                    config: IntegratorConfig = integrate.DEFAULT_CONFIG,
                    curve_tol: float = 0.05) -> RotationResult:
    """Weighted-Birkhoff average of the x-advance per strobe iterate.

    The exponential bump weights give super-algebraic convergence on
    Diophantine circles; the full-length and half-length averages are
    compared as the convergence check.  Tight tolerances are the
    default here: energy drift over thousands of periods shifts the
    level curve and with it the rotation number.
    """
    if n_strobe < 16:
        raise ValueError("n_strobe too small for an average")
    iters = integrate.ensemble_strobe(spec, s0.xy()[None, :], n_strobe,
                                      config)
    xs = iters[:, 0, 0]
    ys = iters[:, 0, 1]
    dx = np.diff(xs)
    rho_full = float(_birkhoff_weights(dx.size) @ dx)
    half = dx[:dx.size // 2]
    rho_half = float(_birkhoff_weights(half.size) @ half)
    librational = bool(xs.max() - xs.min() < TWO_PI)
    y_spread, _ = _graph_fit_residual(xs, ys)
    is_circle = (y_spread <= curve_tol) and not librational
    return RotationResult(
        value=rho_full if is_circle or librational else None,
        is_circle=is_circle, librational=librational,
        y_spread=float(y_spread),
        convergence_error=float(abs(rho_full - rho_half)))


# -- excursions and first passages ---------------------------------------


@dataclass
class ExcursionRecord:
    seed: PhaseState
    first_passage: Optional[float]   # time of arrival at y+ after arming
    armed_time: Optional[float]      # first time at or below y-
    amplitude: float                 # max |y(t) - y(0)| over the run
    t_max: float


def excursion_stats(spec: ModelSpec, seeds, t_max: float,
                    thresholds: tuple[float, float],
                    config: IntegratorConfig = ENSEMBLE_CONFIG,
                    sample_dt: float = 0.5) -> list[ExcursionRecord]:
    """First-passage times from y- to y+ for a seed ensemble."""
    y_minus, y_plus = thresholds
    if y_plus <= y_minus:
        raise ValueError("need y+ > y-")
    pts = np.asarray([[s.x, s.y] if isinstance(s, PhaseState) else s
                      for s in seeds], dtype=float)
    ts, xs, ys = integrate.ensemble_advance(spec, pts, t_max, sample_dt,
                                            config)
    out = []
    for i in range(pts.shape[0]):
        y = ys[:, i]
        armed_idx = np.nonzero(y <= y_minus)[0]
        armed_time = float(ts[armed_idx[0]]) if armed_idx.size else None
        passage = None
        if armed_idx.size:
            fired = np.nonzero((ts >= armed_time) & (y >= y_plus))[0]
            if fired.size:
                passage = float(ts[fired[0]])
        out.append(ExcursionRecord(
            seed=PhaseState(float(pts[i, 0]), float(pts[i, 1])),
            first_passage=passage, armed_time=armed_time,
            amplitude=float(np.max(np.abs(y - y[0]))), t_max=float(t_max)))
    return out


def diagonal_layer_seeds(n: int, reach: float = 0.05,
                         closest: float = 0.002) -> np.ndarray:
    """Seeds on the lower-right separatrix diagonal near the origin.

    Exactly on the unperturbed level through (0,0), hence inside the
    stochastic layer for every mu > 0; y0 < 0 so a passage with
    y- = 0 is armed from the start.
    """
    xs = np.linspace(closest, reach, n)
    return np.column_stack([xs, -xs])


# -- symbolic itineraries -------------------------------------------------


@dataclass
class Itinerary:
    symbols: list[tuple[int, int]]   # saddle lattice labels (x, y)/pi
    entries: list[float]
    exits: list[float]
    r_cell: float
    violations: list[int]            # indices of non-diagonal transitions
    opposite_corner_count: int

    def __len__(self):
        return len(self.symbols)

    def transitions(self):
        return list(zip(self.symbols[:-1], self.symbols[1:]))

    def to_dict(self) -> dict:
        return {
            "symbols": [list(s) for s in self.symbols],
            "entries": self.entries,
            "exits": self.exits,
            "r_cell": self.r_cell,
            "violations": self.violations,
            "opposite_corner_count": self.opposite_corner_count,
        }


def itinerary_from_samples(ts, xs, ys, r_cell: float) -> Itinerary:
    """Symbol sequence of saddle-ball visits from lifted samples."""
    ts = np.asarray(ts)
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    gi = np.round(xs / math.pi).astype(int)
    gj = np.round(ys / math.pi).astype(int)
    dist = np.hypot(xs - gi * math.pi, ys - gj * math.pi)
    inside = ((gi + gj) % 2 == 0) & (dist <= r_cell)
    symbols: list[tuple[int, int]] = []
    entries: list[float] = []
    exits: list[float] = []
    for k in np.nonzero(inside)[0]:
        sym = (int(gi[k]), int(gj[k]))
        if symbols and symbols[-1] == sym:
            exits[-1] = float(ts[k])
        else:
            symbols.append(sym)
            entries.append(float(ts[k]))
            exits.append(float(ts[k]))
    violations = []
    corners = 0
    for idx in range(1, len(symbols)):
        di = abs(symbols[idx][0] - symbols[idx - 1][0])
        dj = abs(symbols[idx][1] - symbols[idx - 1][1])
        if not (di == 1 and dj == 1):
            violations.append(idx)
            if di == 2 and dj == 2:
                corners += 1
    return Itinerary(symbols, entries, exits, float(r_cell), violations,
                     corners)


def itinerary(spec: ModelSpec, s0: PhaseState, t_max: float,
              r_cell: float = math.pi / 8.0,
              config: IntegratorConfig = ENSEMBLE_CONFIG,
              sample_dt: float = 0.25) -> Itinerary:
    """Track visits to r_cell-balls around the saddle lattice."""
    if spec.family is not Family.TORUS:
        raise ValueError("itineraries are defined for the torus family")
    if not (0 < r_cell < math.pi / 4.0):
        raise ValueError("r_cell must lie in (0, pi/4)")
    ts, xs, ys = integrate.ensemble_advance(spec, s0.xy()[None, :], t_max,
                                            sample_dt, config)
    return itinerary_from_samples(ts, xs[:, 0], ys[:, 0], r_cell)


# -- the (eps, mu) sweep --------------------------------------------------


@dataclass(frozen=True)
class SweepBudget:
    n_orbits: int = 24
    n_strobe: int = 1500
    n_candidates: int = 10
    candidate_strobes: int = 800
    curve_tol: float = 0.05
    seed_margin: float = 0.12


@dataclass
class RegimeMap:
    eps_values: np.ndarray
    mu_values: np.ndarray
    verdicts: np.ndarray            # (n_mu, n_eps) of Verdict
    results: list                   # flat list of ConfinementResult
    band: tuple[float, float]
    boundary: list[tuple[float, Optional[float]]]   # (mu, eps*)
    c2_hat: Optional[float]
    c2_stderr: Optional[float]
    monotonicity_violations: list[tuple[float, float]]  # (mu, eps) flags
    budget: SweepBudget

    def cell(self, i_mu: int, i_eps: int) -> Verdict:
        return self.verdicts[i_mu, i_eps]


def _cell_worker(args):
    spec, band, budget, config = args
    try:
        return confinement_test(
            spec, band, budget.n_orbits, budget.n_strobe, config,
            n_candidates=budget.n_candidates,
            candidate_strobes=budget.candidate_strobes,
            curve_tol=budget.curve_tol, seed_margin=budget.seed_margin)
    except Exception:
        return ConfinementResult(Verdict.UNDETERMINED, tuple(band), spec,
                                 None, [], 0, 0, {"error": True})


def sweep(spec: ModelSpec, eps_values, mu_values,
          band=(0.0, math.pi), budget: SweepBudget = SweepBudget(),
          config: IntegratorConfig = ENSEMBLE_CONFIG, jobs: int = 1,
          progress=None) -> RegimeMap:
    """Classify a grid of (eps, mu) cells and fit the overlap boundary.

    The per-mu boundary eps*(mu) is the smallest eps with an OVERLAPPED
    verdict; 1 - eps*(mu) ~ C2 * mu is fitted through the origin.  The
    sweep never aborts: failing cells come back UNDETERMINED.
    """
    eps_values = np.asarray(sorted(eps_values), dtype=float)
    mu_values = np.asarray(sorted(mu_values), dtype=float)
    cells = [(replace(spec, epsilon=float(e), mu=float(m)), band, budget,
              config)
             for m in mu_values for e in eps_values]
    if jobs > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_worker, cells, chunksize=1))
    else:
        results = []
        for k, cell in enumerate(cells):
            results.append(_cell_worker(cell))
            if progress is not None:
                progress(k + 1, len(cells), results[-1])
    verdicts = np.array([r.verdict for r in results],
                        dtype=object).reshape(mu_values.size, eps_values.size)

    boundary = []
    for i, m in enumerate(mu_values):
        over = [eps_values[j] for j in range(eps_values.size)
                if verdicts[i, j] is Verdict.OVERLAPPED]
        boundary.append((float(m), float(min(over)) if over else None))

    pairs = [(m, 1.0 - e) for m, e in boundary if e is not None]
    c2_hat = c2_err = None
    if pairs:
        mus = np.array([p[0] for p in pairs])
        ds = np.array([p[1] for p in pairs])
        c2_hat = float(mus @ ds / (mus @ mus))
        if mus.size > 1:
            resid = ds - c2_hat * mus
            c2_err = float(math.sqrt(
                (resid @ resid) / (mus.size - 1) / (mus @ mus)))

    violations = []
    for i, m in enumerate(mu_values):
        seen_overlap = False
        for j, e in enumerate(eps_values):
            if verdicts[i, j] is Verdict.OVERLAPPED:
                seen_overlap = True
            elif verdicts[i, j] is Verdict.CONFINED and seen_overlap:
                violations.append((float(m), float(e)))
    return RegimeMap(eps_values, mu_values, verdicts, results,
                     tuple(band), boundary, c2_hat, c2_err, violations,
                     budget)
