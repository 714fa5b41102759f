"""Command-line interface: every operation as a subcommand.

Each run writes its data files plus a JSON manifest carrying the full
model/integrator configuration and the argv, so any output can be
reproduced from its manifest alone.  Exit codes: 0 success, 1 usage
error, 2 domain error (the module's message is printed verbatim).
"""

from __future__ import annotations

import argparse
import logging
import math
import platform
import sys
from dataclasses import replace

import numpy as np

from . import __version__, exports, integrate, manifolds, melnikov, models
from . import fixedpoints, regimes
from .errors import DomainError
from .integrate import IntegratorConfig, Method
from .models import Coupling, Family, ModelSpec, PhaseState
from .trig import TrigSum, parse_trig_sum

log = logging.getLogger("overlaplab")

TWO_PI = 2.0 * math.pi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_pi_value(text: str) -> float:
    """Numbers with an optional pi factor: '0.5', 'pi', '-pi/2', '2pi'."""
    t = text.strip().lower().replace(" ", "")
    sign = 1.0
    if t.startswith(("-", "+")):
        sign = -1.0 if t[0] == "-" else 1.0
        t = t[1:]
    if "pi" in t:
        head, _, tail = t.partition("pi")
        value = float(head) if head else 1.0
        value *= math.pi
        if tail.startswith("/"):
            value /= float(tail[1:])
        elif tail:
            raise ValueError(f"cannot parse {text!r}")
        return sign * value
    return sign * float(t)


def parse_point(text: str) -> PhaseState:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return PhaseState(parse_pi_value(parts[0]), parse_pi_value(parts[1]))


def parse_range(text: str) -> np.ndarray:
    """Grids 'start:stop:step' (inclusive) or 'start:stop:logN'."""
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([parse_pi_value(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step or start:stop:logN, "
                         f"got {text!r}")
    start, stop = parse_pi_value(parts[0]), parse_pi_value(parts[1])
    if parts[2].startswith("log"):
        n = int(parts[2][3:])
        if start <= 0 or stop <= 0:
            raise ValueError("log spacing needs positive endpoints")
        return np.geomspace(start, stop, n)
    step = parse_pi_value(parts[2])
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _spec_from_args(args) -> ModelSpec:
    if args.f_file:
        with open(args.f_file) as fh:
            pert = TrigSum.from_text(fh.read())
    elif args.f:
        pert = parse_trig_sum(args.f)
    else:
        pert = TrigSum.default()
    return ModelSpec(
        family=Family(args.family), epsilon=args.eps, mu=args.mu,
        perturbation=pert,
        coupling=Coupling(args.coupling))


def _config_from_args(args) -> IntegratorConfig:
    return IntegratorConfig(
        method=Method.ADAPTIVE_EMBEDDED if args.method == "dop853"
        else Method.FIXED_STEP_CLASSIC,
        abs_tol=args.abs_tol, rel_tol=args.rel_tol,
        rk4_step=args.rk4_step)


def _spec_dict(spec: ModelSpec) -> dict:
    return {
        "family": spec.family.value,
        "epsilon": spec.epsilon,
        "mu": spec.mu,
        "coupling": spec.coupling.value,
        "perturbation": spec.perturbation.to_text(),
    }


def _config_dict(config: IntegratorConfig) -> dict:
    return {
        "method": config.method.value,
        "abs_tol": config.abs_tol,
        "rel_tol": config.rel_tol,
        "max_step": config.max_step if math.isfinite(config.max_step)
        else None,
        "max_steps_per_period": config.max_steps_per_period,
        "rk4_step": config.rk4_step,
    }


def _write_manifest(args, spec, config, params, outputs) -> str:
    manifest = {
        "tool": "overlaplab",
        "version": __version__,
        "platform": f"{platform.python_implementation()} "
                    f"{platform.python_version()} on {platform.machine()}",
        "argv": sys.argv[1:],
        "command": args.command,
        "spec": _spec_dict(spec),
        "integrator": _config_dict(config),
        "params": params,
        "outputs": outputs,
    }
    path = f"{args.out_dir}/{args.prefix}_manifest.json"
    exports.write_json(path, manifest)
    return path


def _out(args, suffix: str) -> str:
    return f"{args.out_dir}/{args.prefix}_{suffix}"


def _emit_trajectory(args, traj, stride: int) -> list[str]:
    header = ["t", "x", "y", "x_lift", "y_lift", "energy"]
    rows = traj.rows(stride)
    if args.stdout:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(exports.fmt(v) for v in row) + "\n")
        return []
    return [exports.write_csv(_out(args, "trajectory.csv"), header, rows)]


# -- subcommand implementations -----------------------------------------


def _cmd_portrait(args, spec, config):
    from contourpy import contour_generator

    window = [parse_pi_value(v) for v in args.window.split(":")]
    if len(window) != 4:
        raise ValueError("window must be xlo:xhi:ylo:yhi")
    xlo, xhi, ylo, yhi = window
    xs = np.linspace(xlo, xhi, args.grid)
    ys = np.linspace(ylo, yhi, args.grid)
    xg, yg = np.meshgrid(xs, ys)
    base = spec.unperturbed()
    hg = np.asarray(models.energy(base, xg, yg, 0.0))
    lvl_a, lvl_b = models.saddle_levels(base)
    if args.levels == "auto":
        lo, hi = float(hg.min()), float(hg.max())
        fill = np.linspace(lo, hi, 13)[1:-1]
        levels = sorted(set(np.concatenate([[lvl_a, lvl_b], fill])))
    else:
        levels = [parse_pi_value(v) for v in args.levels.split(",")]
    gen = contour_generator(x=xg, y=yg, z=hg)
    rows = []
    for lvl in levels:
        for branch, line in enumerate(gen.lines(float(lvl))):
            for px, py in line:
                rows.append((lvl, branch, px, py))
    outputs = [exports.write_csv(_out(args, "levels.csv"),
                                 ["level", "branch", "x", "y"], rows)]

    k_lo = int(math.floor(xlo / TWO_PI)) - 1
    k_hi = int(math.ceil(xhi / TWO_PI)) + 1
    kp_lo = int(math.floor(ylo / TWO_PI)) - 1
    kp_hi = int(math.ceil(yhi / TWO_PI)) + 1
    krange = range(k_lo, k_hi + 1)
    kprange = range(kp_lo, kp_hi + 1)
    inside = lambda p: xlo <= p.x <= xhi and ylo <= p.y <= yhi
    saddles = [p for p in models.saddle_grid(base, krange, kprange)
               if inside(p)]
    centers = [p for p in models.center_grid(base, krange, kprange)
               if inside(p)]
    outputs.append(exports.write_json(_out(args, "critical_points.json"), {
        "saddles": [{"x": p.x, "y": p.y,
                     "level": models.separatrix_level(base, p)}
                    for p in saddles],
        "centers": [{"x": p.x, "y": p.y} for p in centers],
        "separatrix_levels": [lvl_a, lvl_b],
        "reconnected": bool(abs(lvl_a - lvl_b) < 1e-14),
        "window": window,
    }))
    params = {"window": window, "grid": args.grid,
              "levels": [float(l) for l in levels]}
    return params, outputs


def _cmd_orbit(args, spec, config):
    s0 = PhaseState(parse_pi_value(args.x0), parse_pi_value(args.y0),
                    parse_pi_value(args.t0))
    traj = integrate.advance(spec, s0, s0.t + args.tmax, config,
                             sample_dt=args.sample_dt)
    outputs = _emit_trajectory(args, traj, args.stride)
    params = {"x0": s0.x, "y0": s0.y, "t0": s0.t, "tmax": args.tmax,
              "sample_dt": args.sample_dt, "stride": args.stride}
    return params, outputs


def _cmd_strobe(args, spec, config):
    s0 = PhaseState(parse_pi_value(args.x0), parse_pi_value(args.y0),
                    parse_pi_value(args.t0))
    states = integrate.strobe(spec, s0, args.n, config)
    header = ["t", "x", "y", "x_lift", "y_lift", "energy"]
    rows = []
    for s in [s0] + states:
        e = models.energy(spec, s.x, s.y, s.t)
        ywrap = (s.y_wrapped if spec.family is Family.TORUS else s.y)
        rows.append((s.t, s.x_wrapped, ywrap, s.x, s.y, e))
    outputs = [exports.write_csv(_out(args, "strobe.csv"), header, rows)]
    params = {"x0": s0.x, "y0": s0.y, "t0": s0.t, "n": args.n}
    return params, outputs


def _cmd_saddle(args, spec, config):
    seed = parse_point(args.seed)
    if args.direct:
        orbit = fixedpoints.refine_fixed_point(spec, seed, config)
    else:
        orbit = fixedpoints.continue_from_saddle(spec, seed, config)
    outputs = [exports.write_json(_out(args, "orbit.json"), orbit.to_dict())]
    params = {"seed": [seed.x, seed.y], "direct": args.direct}
    return params, outputs


def _cmd_manifold(args, spec, config):
    seed = parse_point(args.saddle)
    orbit = fixedpoints.continue_from_saddle(spec, seed, config)
    kind = manifolds.Kind(args.kind)
    arc = manifolds.grow_manifold(
        spec, orbit, kind, args.branch, args.arclength, config,
        max_spacing=args.max_spacing, seed_offset=args.seed_offset)
    rows = np.column_stack([arc.arclength, arc.points])
    outputs = [exports.write_csv(_out(args, "arc.csv"), ["s", "x", "y"],
                                 rows)]
    params = {"saddle": [seed.x, seed.y], "kind": kind.value,
              "branch": args.branch, "arclength": args.arclength,
              "max_spacing": args.max_spacing,
              "seed_offset": args.seed_offset,
              "budget_exceeded": arc.budget_exceeded,
              "points": int(arc.points.shape[0])}
    return params, outputs


def _parse_connection(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError("connection must be 'x1,y1:x2,y2'")
    return parse_point(parts[0]), parse_point(parts[1])


def _cmd_melnikov(args, spec, config):
    conn = _parse_connection(args.connection)
    sep = melnikov.separatrix(spec, conn, t_cut=args.tcut, dtau=args.dtau)
    prof = melnikov.melnikov_profile(spec, sep, spec.perturbation,
                                     n_t0=args.n_t0)
    outputs = [exports.write_csv(_out(args, "profile.csv"), ["t0", "M"],
                                 np.column_stack([prof.t0, prof.values]))]
    outputs.append(exports.write_json(_out(args, "zeros.json"), {
        "zeros": [{"t0": z, "slope": s, "simple": True}
                  for z, s in prof.zeros],
        "amplitude": prof.amplitude,
        "gradient_norm": prof.gradient_norm,
        "t_cut": prof.t_cut,
        "dtau": prof.dtau,
        "tail_bound": prof.tail_bound,
        "predicted_splitting_at_mu": {
            "mu": spec.mu,
            "value": melnikov.predict_splitting(prof, spec.mu)},
    }))
    params = {"connection": [[conn[0].x, conn[0].y], [conn[1].x, conn[1].y]],
              "t_cut": sep.t_cut, "dtau": sep.dtau, "n_t0": args.n_t0,
              "decay_rate": sep.decay_rate, "glue_error": sep.glue_error}
    return params, outputs


def _cmd_splitting(args, spec, config):
    conn = _parse_connection(args.connection)
    window = tuple(parse_pi_value(v) for v in args.window.split(":"))
    result = manifolds.splitting_distance(spec, conn, config=config,
                                          window=window,
                                          return_profile=True)
    dist, prof = result
    outputs = []
    payload = {"splitting": dist,
               "connection": [[conn[0].x, conn[0].y],
                              [conn[1].x, conn[1].y]],
               "window": list(window), "mode": "normal-bundle"}
    if prof is not None:
        rows = np.column_stack([prof.tau0, prof.phase, prof.energy_gap,
                                prof.normal_gap])
        outputs.append(exports.write_csv(
            _out(args, "gap.csv"),
            ["tau0", "phase", "energy_gap", "normal_gap"], rows))
        payload.update({
            "zeros": [{"tau0": a, "phase": b} for a, b in prof.zeros],
            "gradient_norm": prof.gradient_norm,
            "section_point": list(prof.section_point),
        })
    else:
        payload["mode"] = "vertical-line"
    outputs.append(exports.write_json(_out(args, "splitting.json"), payload))
    params = {"connection": payload["connection"], "window": list(window)}
    return params, outputs


def _cmd_confine(args, spec, config):
    band = tuple(parse_pi_value(v) for v in args.band.split(":"))
    res = regimes.confinement_test(
        spec, band, n_orbits=args.orbits, n_strobe=args.strobes,
        config=config, n_candidates=args.candidates,
        candidate_strobes=args.candidate_strobes)
    outputs = [exports.write_json(_out(args, "verdict.json"), res.to_dict())]
    if res.crossing is not None:
        rows = [(k * TWO_PI, p[0], p[1]) for k, p in
                enumerate(res.crossing.iterates)]
        outputs.append(exports.write_csv(_out(args, "crossing.csv"),
                                         ["t", "x_lift", "y_lift"], rows))
    for i, curve in enumerate(res.curves):
        rows = np.column_stack([TWO_PI * np.arange(curve.points.shape[0]),
                                curve.points])
        outputs.append(exports.write_csv(_out(args, f"curve{i}.csv"),
                                         ["t", "x_lift", "y_lift"], rows))
    params = {"band": list(band), "orbits": args.orbits,
              "strobes": args.strobes, "verdict": res.verdict.value}
    return params, outputs


def _cmd_excursion(args, spec, config):
    seeds = regimes.diagonal_layer_seeds(args.n_seeds, reach=args.reach)
    recs = regimes.excursion_stats(
        spec, seeds, args.tmax, (parse_pi_value(args.ymin),
                                 parse_pi_value(args.ymax)),
        config=config, sample_dt=args.sample_dt)
    header = ["x0", "y0", "armed_time", "first_passage", "amplitude"]
    rows = [(r.seed.x, r.seed.y,
             r.armed_time if r.armed_time is not None else math.nan,
             r.first_passage if r.first_passage is not None else math.nan,
             r.amplitude) for r in recs]
    outputs = [exports.write_csv(_out(args, "excursions.csv"), header, rows)]
    passed = [r.first_passage for r in recs if r.first_passage is not None]
    outputs.append(exports.write_json(_out(args, "excursions.json"), {
        "n_seeds": args.n_seeds, "t_max": args.tmax,
        "thresholds": [parse_pi_value(args.ymin), parse_pi_value(args.ymax)],
        "n_passed": len(passed),
        "median_first_passage": (float(np.median(passed)) if passed
                                 else None),
        "max_amplitude": max(r.amplitude for r in recs),
    }))
    params = {"n_seeds": args.n_seeds, "tmax": args.tmax,
              "ymin": parse_pi_value(args.ymin),
              "ymax": parse_pi_value(args.ymax),
              "sample_dt": args.sample_dt, "reach": args.reach}
    return params, outputs


def _cmd_itinerary(args, spec, config):
    s0 = PhaseState(parse_pi_value(args.x0), parse_pi_value(args.y0))
    iti = regimes.itinerary(spec, s0, args.tmax, r_cell=args.r_cell,
                            config=config, sample_dt=args.sample_dt)
    outputs = [exports.write_json(_out(args, "itinerary.json"),
                                  iti.to_dict())]
    params = {"x0": s0.x, "y0": s0.y, "tmax": args.tmax,
              "r_cell": args.r_cell, "length": len(iti)}
    return params, outputs


def _parse_budget(text: str) -> regimes.SweepBudget:
    if text == "default":
        return regimes.SweepBudget()
    fields = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        fields[key.strip()] = value
    mapping = {"orbits": "n_orbits", "strobes": "n_strobe",
               "candidates": "n_candidates",
               "cstrobes": "candidate_strobes",
               "curve_tol": "curve_tol", "margin": "seed_margin"}
    kwargs = {}
    for key, value in fields.items():
        if key not in mapping:
            raise ValueError(f"unknown budget field {key!r}")
        attr = mapping[key]
        kwargs[attr] = float(value) if "tol" in attr or "margin" in attr \
            else int(value)
    return regimes.SweepBudget(**kwargs)


def _cmd_sweep(args, spec, config):
    eps_values = parse_range(args.eps_range)
    mu_values = parse_range(args.mu_range)
    band = tuple(parse_pi_value(v) for v in args.band.split(":"))
    budget = _parse_budget(args.budget)

    def progress(k, n, res):
        log.info("cell %d/%d: eps=%.4g mu=%.4g -> %s", k, n,
                 res.spec.epsilon, res.spec.mu, res.verdict.value)

    rmap = regimes.sweep(spec, eps_values, mu_values, band=band,
                         budget=budget, config=config, jobs=args.jobs,
                         progress=progress if args.jobs == 1 else None)
    rows = []
    outputs = []
    evidence_id = 0
    for i, m in enumerate(rmap.mu_values):
        for j, e in enumerate(rmap.eps_values):
            res = rmap.results[i * rmap.eps_values.size + j]
            eid = ""
            if res.crossing is not None:
                eid = f"crossing{evidence_id:04d}"
                traj_rows = [(k * TWO_PI, p[0], p[1]) for k, p in
                             enumerate(res.crossing.iterates)]
                outputs.append(exports.write_csv(
                    _out(args, f"evidence_{eid}.csv"),
                    ["t", "x_lift", "y_lift"], traj_rows))
                evidence_id += 1
            elif res.curves:
                eid = f"curve{evidence_id:04d}"
                curve_rows = np.column_stack([
                    TWO_PI * np.arange(res.curves[0].points.shape[0]),
                    res.curves[0].points])
                outputs.append(exports.write_csv(
                    _out(args, f"evidence_{eid}.csv"),
                    ["t", "x_lift", "y_lift"], curve_rows))
                evidence_id += 1
            rows.append((e, m, rmap.verdicts[i, j].value, eid))
    outputs.insert(0, exports.write_csv(
        _out(args, "regimemap.csv"), ["eps", "mu", "verdict", "evidence_id"],
        rows))
    outputs.append(exports.write_json(_out(args, "summary.json"), {
        "c2_hat": rmap.c2_hat,
        "c2_stderr": rmap.c2_stderr,
        "boundary": [{"mu": m, "eps_star": e} for m, e in rmap.boundary],
        "monotonicity_violations": [
            {"mu": m, "eps": e} for m, e in rmap.monotonicity_violations],
        "band": list(rmap.band),
        "budget": {
            "n_orbits": rmap.budget.n_orbits,
            "n_strobe": rmap.budget.n_strobe,
            "n_candidates": rmap.budget.n_candidates,
            "candidate_strobes": rmap.budget.candidate_strobes,
            "curve_tol": rmap.budget.curve_tol,
            "seed_margin": rmap.budget.seed_margin,
        },
    }))
    params = {"eps_range": args.eps_range, "mu_range": args.mu_range,
              "band": list(band), "budget": args.budget, "jobs": args.jobs}
    return params, outputs


# -- argument wiring -----------------------------------------------------


def _add_common(sub):
    sub.add_argument("--family", required=True, choices=["cubic", "torus"])
    sub.add_argument("--eps", type=float, required=True)
    sub.add_argument("--mu", type=float, default=0.0)
    sub.add_argument("--coupling", choices=["eps-mu", "mu-only"],
                     default="mu-only")
    sub.add_argument("--f", default=None,
                     help="perturbation, e.g. '1.0*cos(x+2y+t)'")
    sub.add_argument("--f-file", default=None,
                     help="perturbation term file: lines 'c a b m phi'")
    sub.add_argument("--method", choices=["dop853", "rk4"],
                     default="dop853")
    sub.add_argument("--abs-tol", type=float, default=1e-12)
    sub.add_argument("--rel-tol", type=float, default=1e-10)
    sub.add_argument("--rk4-step", type=float, default=1e-3)
    sub.add_argument("--out-dir", default=".")
    sub.add_argument("--prefix", default=None)
    sub.add_argument("--stdout", action="store_true",
                     help="write the primary CSV to standard output")
    sub.add_argument("--quiet", action="store_true")
    sub.add_argument("--verbose", action="store_true")


def build_parser() -> _Parser:
    parser = _Parser(prog="overlaplab",
                     description="resonance-overlap laboratory")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("portrait", help="level curves of the mu=0 system")
    _add_common(p)
    p.add_argument("--window", default="-pi:pi:-pi:pi")
    p.add_argument("--grid", type=int, default=481)
    p.add_argument("--levels", default="auto")

    p = subs.add_parser("orbit", help="integrate one trajectory")
    _add_common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)
    p.add_argument("--t0", default="0")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--sample-dt", type=float, default=None)
    p.add_argument("--stride", type=int, default=1)

    p = subs.add_parser("strobe", help="iterate the time-2pi map")
    _add_common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)
    p.add_argument("--t0", default="0")
    p.add_argument("--n", type=int, required=True)

    p = subs.add_parser("saddle", help="refine a hyperbolic fixed point")
    _add_common(p)
    p.add_argument("--seed", required=True, help="e.g. 'pi,0'")
    p.add_argument("--direct", action="store_true",
                   help="Newton from the seed without mu-ramping")

    p = subs.add_parser("manifold", help="grow a stable/unstable arc")
    _add_common(p)
    p.add_argument("--saddle", required=True)
    p.add_argument("--kind", choices=["unstable", "stable"],
                   default="unstable")
    p.add_argument("--branch", type=int, choices=[1, -1], default=1)
    p.add_argument("--arclength", type=float, required=True)
    p.add_argument("--max-spacing", type=float, default=1e-3)
    p.add_argument("--seed-offset", type=float, default=1e-7)

    p = subs.add_parser("melnikov", help="separatrix splitting profile")
    _add_common(p)
    p.add_argument("--connection", required=True,
                   help="source:target, e.g. '0,0:pi,-pi'")
    p.add_argument("--tcut", type=float, default=None)
    p.add_argument("--dtau", type=float, default=2e-3)
    p.add_argument("--n-t0", type=int, default=64)

    p = subs.add_parser("splitting", help="measured manifold splitting")
    _add_common(p)
    p.add_argument("--connection", required=True)
    p.add_argument("--window", default="-pi:pi")

    p = subs.add_parser("confine", help="confinement verdict for a band")
    _add_common(p)
    p.add_argument("--band", required=True, help="ylo:yhi, e.g. '0:pi'")
    p.add_argument("--orbits", type=int, default=64)
    p.add_argument("--strobes", type=int, default=10_000)
    p.add_argument("--candidates", type=int, default=12)
    p.add_argument("--candidate-strobes", type=int, default=1024)

    p = subs.add_parser("excursion", help="first-passage statistics")
    _add_common(p)
    p.add_argument("--n-seeds", type=int, default=32)
    p.add_argument("--reach", type=float, default=0.05)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--ymin", default="0")
    p.add_argument("--ymax", default="4pi")
    p.add_argument("--sample-dt", type=float, default=1.0)

    p = subs.add_parser("itinerary", help="saddle-neighborhood symbols")
    _add_common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--r-cell", type=float, default=math.pi / 8)
    p.add_argument("--sample-dt", type=float, default=0.25)

    p = subs.add_parser("sweep", help="classify an (eps, mu) grid")
    _add_common(p)
    p.add_argument("--eps-range", required=True,
                   help="start:stop:step or start:stop:logN")
    p.add_argument("--mu-range", required=True)
    p.add_argument("--band", default="0:pi")
    p.add_argument("--budget", default="default",
                   help="e.g. 'orbits=24,strobes=1500'")
    p.add_argument("--jobs", type=int, default=1)
    return parser


_COMMANDS = {
    "portrait": _cmd_portrait,
    "orbit": _cmd_orbit,
    "strobe": _cmd_strobe,
    "saddle": _cmd_saddle,
    "manifold": _cmd_manifold,
    "melnikov": _cmd_melnikov,
    "splitting": _cmd_splitting,
    "confine": _cmd_confine,
    "excursion": _cmd_excursion,
    "itinerary": _cmd_itinerary,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = (logging.ERROR if args.quiet
             else logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(message)s")
    if args.prefix is None:
        args.prefix = args.command
    try:
        spec = _spec_from_args(args)
        config = _config_from_args(args)
    except (ValueError, OSError) as err:
        parser.error(str(err))
    try:
        params, outputs = _COMMANDS[args.command](args, spec, config)
    except DomainError as err:
        print(str(err), file=sys.stderr)
        return 2
    except ValueError as err:
        parser.error(str(err))
    manifest = _write_manifest(args, spec, config, params, outputs)
    log.info("wrote %s", manifest)
    for path in outputs:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
