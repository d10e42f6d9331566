"""Command-line interface.

Subcommands tie the constructors, rigidity analysis, cone computation, star
analysis, and motion continuation into reproducible runs that emit JSON, CSV,
and OBJ artifacts.  Numeric output is full precision in JSON and 12
significant digits in CSV; identical configurations produce byte-identical
files.  Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O
error.  PERIGID_TOL_RANK and PERIGID_TOL_NEWTON override the default
tolerances.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import constructions, expansive, motion
from .cones import analyze_star, star_report_json, vertex_star
from .errors import FrameworkError, NumericalError, PerigidError, StressError, UnknownOrbitError
from .framework import dumps_framework, load_framework, save_framework
from .rigidity import DEFAULT_RANK_TOL, analyze, report_to_json

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    radius: int = expansive.DEFAULT_RADIUS
    rank_tol: float = DEFAULT_RANK_TOL
    newton_tol: float = motion.DEFAULT_NEWTON_TOL
    audit_tol: float = motion.DEFAULT_AUDIT_TOL
    outdir: str = "."
    seed: int = 0

    def validate(self) -> None:
        if self.radius < 1:
            raise UsageError("radius must be at least 1")
        for name in ("rank_tol", "newton_tol", "audit_tol"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name.replace('_', ' ')} must be positive")


class UsageError(Exception):
    pass


def _env_tol(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{name} must be a number, got {raw!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perigid",
        description="Rigidity, expansive cones, and motion continuation for "
        "periodic bar-and-joint frameworks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a built-in framework as JSON")
    gen.add_argument("family", choices=["stressed", "simplex"])
    gen.add_argument("--dim", type=int, default=3)
    gen.add_argument("--variant", default="base", help="base | enhanced | removed:K")
    gen.add_argument("--regular", action="store_true", help="regular-simplex lattice")
    gen.add_argument("-o", "--out", default=None, help="output path (default: stdout)")

    ana = sub.add_parser("analyze", help="rigidity report for a framework file")
    ana.add_argument("framework")
    ana.add_argument("-o", "--out", default=None)

    cone = sub.add_parser("cone", help="expansive cone report")
    cone.add_argument("framework")
    cone.add_argument("--radius", type=int, default=expansive.DEFAULT_RADIUS)
    cone.add_argument("-o", "--out", default=None)
    cone.add_argument("--pairs", default=None, help="also write the pair audit CSV here")

    star = sub.add_parser("star", help="vertex star cone analysis")
    star.add_argument("framework")
    star.add_argument("--orbit", required=True)
    star.add_argument("-o", "--out", default=None)

    sim = sub.add_parser("simulate", help="continue a flex and audit expansiveness")
    sim.add_argument("framework")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--ray", type=int, default=None, help="extremal ray index to follow")
    group.add_argument("--direction", default=None, help="JSON file with a motion vector")
    sim.add_argument("--steps", type=int, default=motion.DEFAULT_STEPS)
    sim.add_argument("--h", type=float, default=motion.DEFAULT_STEP)
    sim.add_argument("--radius", type=int, default=expansive.DEFAULT_RADIUS)
    sim.add_argument("--supercell", type=int, default=1)
    sim.add_argument("--format", choices=["obj", "csv"], default="obj")
    sim.add_argument("--outdir", default=".")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_gen(args, cfg: RunConfig) -> int:
    if args.family == "stressed":
        fw = constructions.stressed_framework()
    else:
        variant = constructions.SimplexVariant.parse(args.variant)
        fw = constructions.simplex_framework(args.dim, variant, regular=args.regular)
    if args.out is None:
        sys.stdout.write(dumps_framework(fw))
    else:
        save_framework(fw, args.out)
    return EXIT_OK


def _cmd_analyze(args, cfg: RunConfig) -> int:
    fw = load_framework(args.framework)
    report = analyze(fw, cfg.rank_tol)
    _emit(report_to_json(report), args.out)
    return EXIT_OK


def _cmd_cone(args, cfg: RunConfig) -> int:
    fw = load_framework(args.framework)
    report = analyze(fw, cfg.rank_tol)
    cone = expansive.expansive_cone(fw, report, cfg.radius)
    if report.dof == 0:
        stable = cfg.radius
    else:
        stable = expansive.find_stable_radius(
            fw, report, start=cfg.radius, max_radius=cfg.radius + 3
        )
    _emit(expansive.cone_report_json(cone, stable), args.out)
    if args.pairs is not None:
        expansive.write_pair_audit_csv(fw, report, cfg.radius, args.pairs)
    return EXIT_OK


def _cmd_star(args, cfg: RunConfig) -> int:
    fw = load_framework(args.framework)
    analysis = analyze_star(vertex_star(fw, args.orbit), fw.dimension)
    _emit(star_report_json(analysis), args.out)
    return EXIT_OK


def _cmd_simulate(args, cfg: RunConfig) -> int:
    fw = load_framework(args.framework)
    report = analyze(fw, cfg.rank_tol)
    if args.ray is not None:
        cone = expansive.expansive_cone(fw, report, cfg.radius)
        if not 0 <= args.ray < len(cone.rays):
            raise UsageError(
                f"ray index {args.ray} out of range; cone has {len(cone.rays)} rays"
            )
        direction = cone.ray_motion(args.ray)
    else:
        with open(args.direction) as fh:
            direction = np.asarray(json.load(fh), dtype=float)
    path = motion.continue_motion(
        fw, direction, n_steps=args.steps, h=args.h, newton_tol=cfg.newton_tol,
        rank_tol=cfg.rank_tol,
    )
    os.makedirs(args.outdir, exist_ok=True)
    frames = motion.export_frames(path, supercell=args.supercell, fmt=args.format, outdir=args.outdir)
    audit = motion.audit_expansiveness(path, radius=cfg.radius, audit_tol=cfg.audit_tol)
    audit_path = os.path.join(args.outdir, "audit.csv")
    motion.write_audit_csv(audit, audit_path)
    summary = {
        "steps": path.n_steps,
        "h": args.h,
        "step_size": path.step_size,
        "max_residual": float(path.residuals.max()),
        "passed": audit.passed,
        "num_violations": len(audit.violations),
        "frames": [os.path.basename(p) for p in frames],
        "audit": os.path.basename(audit_path),
    }
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_OK


_HANDLERS = {
    "gen": _cmd_gen,
    "analyze": _cmd_analyze,
    "cone": _cmd_cone,
    "star": _cmd_star,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            command=args.command,
            target=getattr(args, "framework", None),
            radius=getattr(args, "radius", expansive.DEFAULT_RADIUS),
            rank_tol=_env_tol("PERIGID_TOL_RANK", DEFAULT_RANK_TOL),
            newton_tol=_env_tol("PERIGID_TOL_NEWTON", motion.DEFAULT_NEWTON_TOL),
            outdir=getattr(args, "outdir", "."),
        )
        cfg.validate()
        return _HANDLERS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrameworkError, UnknownOrbitError, json.JSONDecodeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, StressError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except PerigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
