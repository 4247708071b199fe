"""Command-line interface for the lens-shrinker pipeline.

Subcommands: ``solve`` (one profile), ``shoot`` (locate the junction
height), ``table`` (sample the angle map), ``mesh`` (export the cluster
geometry), ``verify`` (run the invariant suite).  Every JSON output embeds
the configuration that produced it, so outputs are reproducible bit for
bit; no timestamps are written.

Exit codes: 0 success, 2 configuration error, 3 bracket failure,
4 monitor violation or failed verification.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from .arclength import polar_monitors, profile_summary, profile_to_csv
from .cluster import build_cluster, write_metadata, write_obj
from .errors import BracketFailure, LensError, MonitorViolation
from .graph_profile import integrate_graph, seed_from_series, trajectory_to_csv
from .series import picard_analytic
from .shooting import (A_CIRCLE, PipelineConfig, angle_of, angle_table_to_csv,
                       find_lens, sample_angle_table)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BRACKET = 3
EXIT_MONITOR = 4


@dataclass
class RunConfig:
    """Validated CLI run configuration; echoed into every JSON output."""

    command: str
    a: float | None = None
    bracket: tuple[float, float] = (0.05, A_CIRCLE)
    tol_a: float = 1e-10
    order: int = 64
    series_tol: float = 1e-14
    ode_abs: float = 1e-12
    ode_rel: float = 1e-12
    event_tol: float = 1e-12
    x_seed: float = 1e-3
    output_dir: str = "."
    json_output: bool = False
    jobs: int = 1
    table_range: tuple[float, float, float] | None = None
    n_theta: int = 64
    annulus_outer: float | None = None
    extras: dict = field(default_factory=dict)

    def validate(self) -> None:
        positive = {"tol_a": self.tol_a, "series_tol": self.series_tol,
                    "ode_abs": self.ode_abs, "ode_rel": self.ode_rel,
                    "event_tol": self.event_tol, "x_seed": self.x_seed}
        for name, value in positive.items():
            if not value > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.a is not None and not 0.0 < self.a <= A_CIRCLE + 1e-12:
            raise ValueError("a must lie in (0, sqrt(2)]")
        lo, hi = self.bracket
        if not 0.0 < lo < hi <= A_CIRCLE:
            raise ValueError("bracket must be ordered inside (0, sqrt(2)]")
        if self.order < 8 or self.order % 2:
            raise ValueError("order must be an even integer >= 8")

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(order=self.order, series_tol=self.series_tol,
                              ode_rtol=self.ode_rel, ode_atol=self.ode_abs,
                              event_tol=self.event_tol, x_seed=self.x_seed,
                              tol_a=self.tol_a, jobs=self.jobs)

    def to_dict(self) -> dict:
        d = {"command": self.command, "a": self.a,
             "bracket": list(self.bracket),
             "tolerances": {"series_tol": self.series_tol,
                            "ode_abs": self.ode_abs, "ode_rel": self.ode_rel,
                            "event_tol": self.event_tol, "tol_a": self.tol_a},
             "order": self.order, "x_seed": self.x_seed,
             "output_dir": self.output_dir, "jobs": self.jobs,
             "n_theta": self.n_theta, "annulus_outer": self.annulus_outer}
        if self.table_range is not None:
            d["table_range"] = list(self.table_range)
        return d


def _write_json(path: Path, payload: dict, cfg: RunConfig) -> None:
    payload = {**payload, "config": cfg.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.json_output:
        print(json.dumps({**payload, "config": cfg.to_dict()}, sort_keys=True))
    else:
        print(text)


def cmd_solve(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    a = cfg.a
    pipeline = cfg.pipeline()
    alpha, profile = angle_of(a, pipeline)
    tag = f"a{a:.8g}"
    h = picard_analytic(a, pipeline.series_radius, order=pipeline.order,
                        tol=pipeline.series_tol)
    seed = seed_from_series(h, a, pipeline.x_seed)
    traj = integrate_graph(seed, a, step_ctl=pipeline.step_control(), series=h)
    trajectory_to_csv(traj, out / f"graph_{tag}.csv")
    _write_json(out / f"series_{tag}.json", h.to_dict(a), cfg)
    profile_to_csv(profile, out / f"profile_{tag}.csv")
    summary = profile_summary(profile)
    summary["alpha_deg"] = math.degrees(alpha)
    summary["polar_monitors"] = polar_monitors(profile, a).to_json_list()
    _write_json(out / f"profile_{tag}.json", summary, cfg)
    _say(cfg, summary,
         f"a={a:.12g}: s_bar={profile.s_bar:.12g}, xi={profile.xi:.12g}, "
         f"alpha={math.degrees(alpha):.8f} deg "
         f"(files profile_{tag}.csv/.json, series_{tag}.json in {out})")
    return EXIT_OK


def cmd_shoot(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    report = find_lens(cfg.bracket[0], cfg.bracket[1], cfg.tol_a,
                       cfg.pipeline())
    payload = report.to_dict()
    profile = report.profile
    payload["profile"] = profile_summary(profile)
    _write_json(out / "shoot_report.json", payload, cfg)
    profile_to_csv(profile, out / "profile_lens.csv")
    _say(cfg, payload,
         f"a* = {report.a_star:.12f} "
         f"(|u'(s_bar) - 1/2| = {report.alpha_residual:.3e}, "
         f"alpha = {math.degrees(profile.alpha):.9f} deg, "
         f"report in {out / 'shoot_report.json'})")
    return EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    lo, hi, step = cfg.table_range
    values = list(np.arange(lo, hi + 0.5 * step, step))
    report = sample_angle_table(values, cfg.pipeline())
    angle_table_to_csv(report, out / "angle_table.csv")
    _write_json(out / "angle_table.json", report.to_dict(), cfg)
    n_err = sum(1 for r in report.table if r.error is not None)
    _say(cfg, report.to_dict(),
         f"{len(report.table)} rows ({n_err} failed), sign changes on "
         f"{report.sign_change_brackets}; files in {out}")
    return EXIT_OK


def cmd_mesh(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    if cfg.a is not None:
        a = cfg.a
    else:
        a = find_lens(cfg.bracket[0], cfg.bracket[1], cfg.tol_a,
                      cfg.pipeline()).a_star
    _, profile = angle_of(a, cfg.pipeline())
    mesh = build_cluster(profile, n_theta=cfg.n_theta,
                         annulus_outer=cfg.annulus_outer)
    write_obj(mesh, out / "lens.obj")
    write_metadata(mesh, out / "lens.json", cfg.to_dict())
    _say(cfg, mesh.metadata,
         f"mesh for a={a:.12g}: {len(mesh.vertices)} vertices, "
         f"{len(mesh.triangles)} triangles -> {out / 'lens.obj'}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = checks.run_all(cfg.pipeline(), verbose=not cfg.json_output)
    payload = {"results": [{"name": r.name, "pass": r.passed,
                            "detail": r.detail} for r in results]}
    if cfg.json_output:
        print(json.dumps({**payload, "config": cfg.to_dict()}, sort_keys=True))
    n_fail = sum(1 for r in results if not r.passed)
    if not cfg.json_output:
        print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_MONITOR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lensshrinker",
        description="Lens-shaped self-shrinker profiles: solve, shoot, export.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output-dir", default=None,
                       help="output directory (fallback: $LENS_OUTPUT_DIR, then '.')")
        p.add_argument("--json", action="store_true", dest="json_output",
                       help="machine-readable stdout")
        p.add_argument("--order", type=int, default=64)
        p.add_argument("--series-tol", type=float, default=1e-14)
        p.add_argument("--ode-abs", type=float, default=1e-12)
        p.add_argument("--ode-rel", type=float, default=1e-12)
        p.add_argument("--event-tol", type=float, default=1e-12)
        p.add_argument("--x-seed", type=float, default=1e-3)

    p = sub.add_parser("solve", help="compute one profile")
    common(p)
    p.add_argument("--a", type=float, required=True)

    p = sub.add_parser("shoot", help="locate the 120-degree junction height")
    common(p)
    p.add_argument("--a-lo", type=float, default=0.05)
    p.add_argument("--a-hi", type=float, default=A_CIRCLE)
    p.add_argument("--tol-a", type=float, default=1e-10)

    p = sub.add_parser("table", help="tabulate the angle map")
    common(p)
    p.add_argument("--from", dest="a_from", type=float, required=True)
    p.add_argument("--to", dest="a_to", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("mesh", help="export the three-sheet cluster mesh")
    common(p)
    p.add_argument("--a", type=float, default=None,
                   help="profile height (default: shoot for the junction height)")
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--annulus-outer", type=float, default=None)
    p.add_argument("--tol-a", type=float, default=1e-10)

    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    return ap


def config_from_args(args) -> RunConfig:
    out_dir = args.output_dir or os.environ.get("LENS_OUTPUT_DIR") or "."
    cfg = RunConfig(command=args.command, output_dir=out_dir,
                    json_output=args.json_output, order=args.order,
                    series_tol=args.series_tol, ode_abs=args.ode_abs,
                    ode_rel=args.ode_rel, event_tol=args.event_tol,
                    x_seed=args.x_seed)
    if args.command == "solve":
        cfg.a = args.a
    elif args.command == "shoot":
        cfg.bracket = (args.a_lo, args.a_hi)
        cfg.tol_a = args.tol_a
    elif args.command == "table":
        cfg.table_range = (args.a_from, args.a_to, args.step)
        cfg.jobs = args.jobs
        if not (0.0 < args.a_from <= args.a_to <= A_CIRCLE and args.step > 0.0):
            raise ValueError("table range must be ordered inside (0, sqrt(2)]")
    elif args.command == "mesh":
        cfg.a = args.a
        cfg.n_theta = args.n_theta
        cfg.annulus_outer = args.annulus_outer
        cfg.tol_a = args.tol_a
    cfg.validate()
    return cfg


COMMANDS = {"solve": cmd_solve, "shoot": cmd_shoot, "table": cmd_table,
            "mesh": cmd_mesh, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except BracketFailure as exc:
        print(f"bracket failure: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except MonitorViolation as exc:
        print(f"monitor violation: {exc}", file=sys.stderr)
        return EXIT_MONITOR
    except (LensError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
