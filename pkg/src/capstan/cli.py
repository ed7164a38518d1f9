"""Command-line interface.

Subcommands: fit, route, plan, simulate, sense. Exit codes: 0 success,
1 usage or file-format error, 2 infeasible request, 3 numeric/domain error.
Angles on the command line and in files are degrees unless suffixed 'rad'.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from importlib import resources

from . import io as capstan_io
from .errors import (
    DegenerateDataError,
    DomainError,
    FormatError,
    GeometryError,
    InfeasibleError,
    UnknownSurfaceClassError,
)
from .estimation import (
    MuPolicy,
    aggregate_class,
    baseline_holding,
    default_library,
    fit_friction,
)
from .geometry import route_tether, validate_path
from .mechanics import Wrap, amplification_factor, sensitivity
from .planner import AnchorAgent, ManeuverRequest, plan_anchor
from .simulator import LoweringScenario, simulate_lowering, simulate_pull

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_DOMAIN = 3

FMT = ".8g"


def _fmt(x: float) -> str:
    return format(float(x), FMT)


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; this toolkit reserves 2
    for infeasible requests, so usage errors are remapped to 1. Also treats
    tokens like '-2,0' as values, so coordinates may be negative."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d+[\d.,e+-]*$|^-\.\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_point(text: str) -> tuple[float, float]:
    bits = text.split(",")
    if len(bits) != 2:
        raise DomainError(f"expected 'X,Y', got {text!r}")
    try:
        return (float(bits[0]), float(bits[1]))
    except ValueError:
        raise DomainError(f"expected numeric 'X,Y', got {text!r}") from None


def _parse_angle(text: str) -> float:
    """Angle argument in radians; bare numbers are degrees, 'rad' suffix
    opts into radians, 'deg' suffix is explicit degrees."""
    t = text.strip().lower()
    if t.endswith("rad"):
        return float(t[:-3])
    if t.endswith("deg"):
        return math.radians(float(t[:-3]))
    return math.radians(float(t))


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capstan",
                     description="Planar tether-anchoring toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit friction coefficients from slip tests")
    p_fit.add_argument("--measurements", required=True,
                       help="CSV: object_id,wrap_angle_deg,slip_tension_N")
    p_fit.add_argument("--baselines", required=True,
                       help="CSV: object_id,peak_force_N")
    p_fit.add_argument("--out", help="write aggregated library JSON here "
                                     "(default: print to stdout)")
    p_fit.add_argument("--class-name", default="field",
                       help="surface class name for the aggregate (default: field)")

    p_route = sub.add_parser("route", help="realize a winding as a taut path")
    p_route.add_argument("--scene", required=True, help="scene JSON file")
    p_route.add_argument("--anchor", required=True, help="anchor point 'X,Y' (m)")
    p_route.add_argument("--load", required=True, help="load point 'X,Y' (m)")
    p_route.add_argument("--winding", default="",
                         help="winding 'id:cw|ccw[:turns],...' (empty = straight)")

    p_plan = sub.add_parser("plan", help="plan a minimum-wrap anchoring maneuver")
    p_plan.add_argument("--scene", required=True, help="scene JSON file")
    p_plan.add_argument("--library",
                        help="friction library JSON (default: shipped library)")
    p_plan.add_argument("--anchor", required=True,
                        help="anchor agent position 'X,Y' (m)")
    p_plan.add_argument("--load", required=True, help="load point 'X,Y' (m)")
    p_plan.add_argument("--t0", required=True, type=float,
                        help="anchor agent holding force (N)")
    p_plan.add_argument("--tension", required=True, type=float,
                        help="required load tension (N)")
    p_plan.add_argument("--fos", type=float, default=1.0,
                        help="factor of safety (default 1)")
    p_plan.add_argument("--policy", choices=["min", "mean", "lower95"],
                        default="min", help="friction selection policy")
    p_plan.add_argument("--reversible", action="store_true",
                        help="require a reversible (non-crossing) path")
    p_plan.add_argument("--max-capstans", type=int, default=3)
    p_plan.add_argument("--max-turns", type=int, default=2)

    p_sim = sub.add_parser("simulate", help="run a slip or lowering scenario")
    p_sim.add_argument("--scenario", required=True, help="scenario JSON file")
    p_sim.add_argument("--out", required=True, help="trace CSV output path")
    p_sim.add_argument("--events",
                       help="events JSON output path (default: <out>.events.json)")

    p_sense = sub.add_parser("sense",
                             help="amplification factor and its sensitivities")
    p_sense.add_argument("--mu", required=True, type=float,
                         help="friction coefficient")
    p_sense.add_argument("--theta", required=True,
                         help="wrap angle; degrees unless suffixed 'rad'")
    return parser


def _cmd_fit(args) -> int:
    measurements = capstan_io.load_measurements(args.measurements)
    baselines = {b.object_id: b for b in capstan_io.load_baselines(args.baselines)}
    by_object: dict[str, list] = {}
    for m in measurements:
        by_object.setdefault(m.object_id, []).append(m)

    fits = []
    print("object_id mu_hat ci95_lo ci95_hi residual_rms n")
    for oid in sorted(by_object):
        if oid not in baselines:
            raise DegenerateDataError(f"no baseline rows for object {oid!r}")
        t0_mean, _ = baseline_holding(baselines[oid])
        fit = fit_friction(by_object[oid], t0_mean)
        fits.append(fit)
        print(f"{oid} {_fmt(fit.mu_hat)} {_fmt(fit.ci95[0])} "
              f"{_fmt(fit.ci95[1])} {_fmt(fit.residual_rms)} {fit.n_points}")

    stats = aggregate_class(fits, args.class_name,
                            note=f"aggregated from {len(fits)} fitted object(s)")
    library = default_library().with_entry(args.class_name, stats)
    if args.out:
        capstan_io.save_library(library, args.out)
        print(f"library written to {args.out}")
    else:
        _print_json(capstan_io.library_to_dict(library))
    return EXIT_OK


def _cmd_route(args) -> int:
    scene = capstan_io.load_scene(args.scene)
    winding = capstan_io.parse_winding(args.winding)
    path = route_tether(_parse_point(args.anchor), _parse_point(args.load),
                        winding, scene)
    report = validate_path(path, scene)
    print("capstan_id wrap_deg")
    for cid, wrap in sorted(path.wrap_angles.items()):
        print(f"{cid} {_fmt(math.degrees(wrap))}")
    print(f"total_length_m {_fmt(path.total_length)}")
    print(f"reversible {'true' if report.reversible else 'false'}")
    _print_json(capstan_io.path_to_dict(path))
    return EXIT_OK


def _default_library_path():
    return resources.files("capstan").joinpath("data/friction_library.json")


def _cmd_plan(args) -> int:
    scene = capstan_io.load_scene(args.scene)
    if args.library:
        library = capstan_io.load_library(args.library)
    else:
        with resources.as_file(_default_library_path()) as p:
            library = capstan_io.load_library(p)
    request = ManeuverRequest(
        anchor_agent=AnchorAgent(_parse_point(args.anchor), args.t0),
        load_point=_parse_point(args.load),
        required_tension=args.tension,
        factor_of_safety=args.fos,
        mu_policy=MuPolicy(args.policy),
        require_reversible=args.reversible,
        max_capstans=args.max_capstans,
        max_turns_per_capstan=args.max_turns,
    )
    plan = plan_anchor(scene, library, request)
    _print_json(capstan_io.plan_to_dict(plan, args.tension))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = capstan_io.load_scenario(args.scenario)
    if isinstance(scenario, LoweringScenario):
        trace = simulate_lowering(scenario)
    else:
        trace = simulate_pull(scenario)
    capstan_io.save_trace_csv(trace, args.out)
    events_path = args.events or f"{args.out}.events.json"
    capstan_io.save_events_json(trace, events_path)
    for e in trace.events:
        print(f"{e.kind.value} t={_fmt(e.time)}")
    print(f"trace written to {args.out}")
    print(f"events written to {events_path}")
    return EXIT_OK


def _cmd_sense(args) -> int:
    wrap = Wrap(args.mu, _parse_angle(args.theta))
    d_mu, d_theta = sensitivity(wrap)
    print(f"A_F = {_fmt(amplification_factor(wrap))}")
    print(f"dAF_dmu = {_fmt(d_mu)}")
    print(f"dAF_dtheta_per_rad = {_fmt(d_theta)}")
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "route": _cmd_route,
    "plan": _cmd_plan,
    "simulate": _cmd_simulate,
    "sense": _cmd_sense,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, GeometryError, DegenerateDataError,
            UnknownSurfaceClassError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
