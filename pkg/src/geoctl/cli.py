"""``geoctl`` command line.

Every subcommand writes ``report.json`` (plus CSV artifacts) into
``--out-dir`` and exits 0 iff all of its checks pass.  JSON inputs may be
given inline or as a path to a file.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cases import BALL_RADIUS, CASE_IDS, run_case
from .convex import SphericalRegion
from .errors import GeoctlError
from .export import TRAJECTORY_COLUMNS, all_pass, dumps, export, new_report
from .fields import FieldSpec
from .flow import DEFAULT_HORIZON, DEFAULT_STEP, integrate, integrate_switched
from .lie_so14 import bracket_closure, larc_rank
from .lie_so14 import from_json as matrix_from_json
from .lie_so14 import to_json as matrix_to_json
from .orbits import ICSCandidate, attractor_sweep, sample_positive_orbit, verify_ics
from .projective import (build_example, default_w, example_attractor_sweep, larc_check_example,
                         rotated_boundary, verify_example_ics)
from .quaternion import project_to_sphere
from .system import ControlSystem
from .tolerances import CLOUD_DELTA

log = logging.getLogger("geoctl")


def load_json(text: str):
    """Parse ``text`` as JSON, or read it from the file it names."""
    path = Path(text)
    try:
        is_file = path.is_file()
    except OSError:
        is_file = False
    if is_file:
        return json.loads(path.read_text())
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GeoctlError(f"not a JSON value or readable file: {text[:60]!r}") from exc


def load_system(text: str) -> ControlSystem:
    data = load_json(text)
    if isinstance(data, dict) and "drift" not in data and "q" in data:
        return ControlSystem(FieldSpec.from_json(data))
    return ControlSystem.from_json(data)


def point_arg(text: str) -> np.ndarray:
    return project_to_sphere(load_json(text)).array


# --- subcommands ------------------------------------------------------------------

def cmd_simulate(args):
    system = load_system(args.system)
    x0 = point_arg(args.x0)
    if args.schedule:
        sched = [(float(d), u) for d, u in load_json(args.schedule)]
        traj = integrate_switched(system, x0, sched, args.h)
    else:
        traj = integrate(system.drift, x0, args.t_final, args.h)
    report = new_report("simulate", system=system.to_json(), x0=x0,
                        end=traj.end, steps=len(traj) - 1)
    report["checks"]["norm_preserved"] = {"pass": traj.norm_error() <= 1e-9,
                                          "norm_error": traj.norm_error()}
    return report, {_artifact_name(args.out, "trajectory"): (traj.to_rows(), TRAJECTORY_COLUMNS)}


def cmd_attractors(args):
    system = load_system(args.system)
    controls = np.asarray(load_json(args.controls), dtype=float)
    sweep = attractor_sweep(system, controls)
    pts = np.array([s.point.array for s in sweep]).reshape(-1, 4)
    report = new_report("attractors", system=system.to_json(), count=len(sweep),
                        skipped=int(len(np.atleast_2d(controls)) - len(sweep)))
    return report, {"attractors": pts}


def cmd_reachable(args):
    system = load_system(args.system)
    x0 = point_arg(args.x0)
    cloud = sample_positive_orbit(system, x0, args.horizon, args.samples, args.seed)
    report = new_report("reachable", system=system.to_json(), x0=x0, horizon=args.horizon,
                        samples=args.samples, seed=args.seed, points=len(cloud.points))
    return report, {_artifact_name(args.out, "cloud"): cloud.points}


def cmd_verify_ics(args):
    system = load_system(args.system)
    region = SphericalRegion.from_json(load_json(args.candidate))
    result = verify_ics(system, ICSCandidate(region), grid=args.grid, horizon=args.horizon,
                        samples=args.samples, seed=args.seed, delta=args.tol)
    report = new_report("verify-ics", system=system.to_json(), **result)
    report["checks"] = result["conditions"]
    return report, {"boundary": region.boundary_sample(200)}


def cmd_larc(args):
    gens = [matrix_from_json(g) for g in load_json(args.generators)]
    rank = larc_rank(gens)
    basis = bracket_closure(gens, max_dim=10)
    report = new_report("larc", rank=rank, dimension=10, basis=[matrix_to_json(b) for b in basis])
    report["checks"]["larc"] = {"pass": rank == 10, "rank": rank}
    return report, {}


def cmd_example_pn(args):
    w = default_w(args.n) if args.w is None else np.asarray(load_json(args.w), dtype=float)
    system = build_example(args.n, w)
    result = verify_example_ics(system, horizon=args.horizon, samples=args.samples,
                                seed=args.seed, delta=args.tol)
    rank = larc_check_example(system)
    report = new_report("example-pn", larc_rank=rank, **result)
    report["checks"] = dict(result["conditions"])
    report["checks"]["larc"] = {"pass": rank == args.n ** 2 - 1, "rank": rank}
    grid = np.linspace(-1.0, 1.0, 21)
    controls = np.stack(np.meshgrid(*[grid] * system.m, indexing="ij"), -1).reshape(-1, system.m) \
        if system.m <= 2 else system.range.sample(np.random.default_rng(args.seed), 200)
    return report, {"attractors": example_attractor_sweep(system, controls),
                    "boundary": rotated_boundary(system, 200, args.seed)}


def cmd_case(args):
    report, artifacts = run_case(args.id, z=_opt(args.z), z1=_opt(args.z1), z2=_opt(args.z2),
                                 horizon=args.horizon, samples=args.samples, seed=args.seed,
                                 grid=args.grid, radius=args.radius, delta=args.tol)
    full = new_report("case", **report)
    full["checks"] = report["conditions"]
    return full, artifacts


def _artifact_name(out, default):
    return Path(out).stem if out else default


def _opt(text):
    return None if text is None else load_json(text)


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=CLOUD_DELTA,
                        help="closeness radius for cloud comparisons (default 5e-2)")
    common.add_argument("--out-dir", default="geoctl-out", help="directory for report.json and CSVs")
    common.add_argument("--json", action="store_true", help="print the full report as JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="geoctl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"geoctl {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="integrate one field or a switched schedule")
    s.add_argument("--system", "--field", dest="system", required=True,
                   help="system JSON (or a single field {q,z,w})")
    s.add_argument("--x0", required=True, help="start point, JSON [w,x,y,z] (normalized)")
    s.add_argument("--t-final", "--t", dest="t_final", type=float, default=DEFAULT_HORIZON)
    s.add_argument("--h", type=float, default=DEFAULT_STEP)
    s.add_argument("--schedule", help="JSON [[duration, [u...]], ...]; drift only if omitted")
    s.add_argument("--out", help="trajectory CSV file name inside --out-dir (default trajectory.csv)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("attractors", parents=[common], help="attractors of frozen symmetric fields")
    s.add_argument("--system", required=True)
    s.add_argument("--controls", required=True, help="JSON list of control vectors")
    s.set_defaults(func=cmd_attractors)

    s = sub.add_parser("reachable", parents=[common], help="sampled positive orbit cloud")
    s.add_argument("--system", required=True)
    s.add_argument("--x0", required=True)
    s.add_argument("--horizon", type=float, default=10.0)
    s.add_argument("--samples", type=int, default=500)
    s.add_argument("--out", help="cloud CSV file name inside --out-dir (default cloud.csv)")
    s.set_defaults(func=cmd_reachable)

    s = sub.add_parser("verify-ics", parents=[common], help="check an invariant control set candidate")
    s.add_argument("--system", required=True)
    s.add_argument("--candidate", required=True, help="region JSON, e.g. {\"kind\": \"dome\", ...}")
    s.add_argument("--horizon", type=float, default=30.0)
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--grid", type=int, default=12)
    s.set_defaults(func=cmd_verify_ics)

    s = sub.add_parser("larc", parents=[common], help="rank of the generated Lie algebra")
    s.add_argument("--generators", required=True,
                   help="JSON list; 4 entries embed a quaternion, 25 give a 5x5 matrix")
    s.set_defaults(func=cmd_larc)

    s = sub.add_parser("example-pn", parents=[common], help="projective example checks")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--w", help="JSON vector with 1/n + |w|^2 = 1 (default along (1,...,1))")
    s.add_argument("--horizon", type=float, default=20.0)
    s.add_argument("--samples", type=int, default=500)
    s.set_defaults(func=cmd_example_pn)

    s = sub.add_parser("case", parents=[common], help="run one case study")
    s.add_argument("id", choices=CASE_IDS)
    s.add_argument("--z", help="pure quaternion JSON [x,y,z] (cases i, i_prime)")
    s.add_argument("--z1")
    s.add_argument("--z2")
    s.add_argument("--horizon", type=float, default=30.0)
    s.add_argument("--samples", type=int, default=None, help="schedules per cloud")
    s.add_argument("--grid", type=int, default=12)
    s.add_argument("--radius", type=float, default=BALL_RADIUS, help="control ball radius (case iii)")
    s.set_defaults(func=cmd_case)
    return p


def _summary(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if all_pass(report) else 'FAIL'}"]
    for name, check in sorted(report.get("checks", {}).items()):
        lines.append(f"  {name}: {'PASS' if check.get('pass') else 'FAIL'}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report, artifacts = args.func(args)
        written = export(report, args.out_dir, artifacts)
    except (GeoctlError, ValueError) as exc:
        print(f"geoctl: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"geoctl: cannot write output: {exc}", file=sys.stderr)
        return 3
    print(dumps(report) if args.json else _summary(report), end="" if args.json else "\n")
    log.info("wrote %s", ", ".join(str(p) for p in written.values()))
    return 0 if all_pass(report) else 1


if __name__ == "__main__":
    sys.exit(main())
