"""File formats: scene JSON, measurement/baseline CSV, friction-library JSON,
simulation scenario JSON, trace CSV, and serializers for paths and plans.

Angles in files are degrees (field convention); everything internal is
radians. Conversion happens here and nowhere else.
"""

from __future__ import annotations

import csv
import json
import math
from typing import Any, Iterable, Mapping, Sequence, Union

from .errors import SceneFormatError, TableFormatError
from .estimation import BaselineSet, FrictionLibrary, SlipMeasurement, SurfaceClassStats
from .geometry import (
    CapstanObject,
    ContactArc,
    Rect,
    Scene,
    StraightSegment,
    TetherPath,
    Winding,
    WindingSpec,
    WindingStep,
)
from .mechanics import Wrap
from .planner import ManeuverPlan
from .simulator import (
    LoadProfile,
    LoweringScenario,
    PayoutPolicy,
    SlipScenario,
    SlipTrace,
    SnagSpec,
    Substrate,
)

MEASUREMENT_HEADER = ["object_id", "wrap_angle_deg", "slip_tension_N"]
BASELINE_HEADER = ["object_id", "peak_force_N"]
TRACE_HEADER = ["t", "applied_N", "effective_T0_N", "capacity_N", "slipping",
                "slip_distance_m"]

FLOAT_FMT = ".10g"


def _fmt(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def _require_keys(obj: Mapping[str, Any], allowed: set[str], required: set[str],
                  where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SceneFormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SceneFormatError(f"{where}: missing field(s) {sorted(missing)}")


# ---------------------------------------------------------------------------
# Scene JSON
# ---------------------------------------------------------------------------

def scene_from_dict(doc: Mapping[str, Any]) -> Scene:
    _require_keys(doc, {"capstans", "bounds"}, {"capstans"}, "scene")
    capstans = []
    for i, entry in enumerate(doc["capstans"]):
        where = f"capstans[{i}]"
        _require_keys(
            entry,
            {"id", "x_m", "y_m", "radius_m", "surface_class", "upheaval_limit_N"},
            {"id", "x_m", "y_m", "radius_m", "surface_class"},
            where)
        try:
            capstans.append(CapstanObject(
                id=str(entry["id"]),
                center=(float(entry["x_m"]), float(entry["y_m"])),
                radius=float(entry["radius_m"]),
                surface_class=str(entry["surface_class"]),
                upheaval_limit=float(entry.get("upheaval_limit_N", math.inf)),
            ))
        except (TypeError, ValueError) as exc:
            raise SceneFormatError(f"{where}: {exc}") from exc
    bounds = None
    if "bounds" in doc and doc["bounds"] is not None:
        b = doc["bounds"]
        _require_keys(b, {"x_min", "y_min", "x_max", "y_max"},
                      {"x_min", "y_min", "x_max", "y_max"}, "bounds")
        bounds = Rect(float(b["x_min"]), float(b["y_min"]),
                      float(b["x_max"]), float(b["y_max"]))
    try:
        return Scene(tuple(capstans), bounds)
    except Exception as exc:
        raise SceneFormatError(str(exc)) from exc


def scene_to_dict(scene: Scene) -> dict:
    doc: dict[str, Any] = {"capstans": []}
    for c in scene.capstans:
        entry: dict[str, Any] = {
            "id": c.id, "x_m": c.center[0], "y_m": c.center[1],
            "radius_m": c.radius, "surface_class": c.surface_class,
        }
        if math.isfinite(c.upheaval_limit):
            entry["upheaval_limit_N"] = c.upheaval_limit
        doc["capstans"].append(entry)
    if scene.bounds is not None:
        b = scene.bounds
        doc["bounds"] = {"x_min": b.x_min, "y_min": b.y_min,
                         "x_max": b.x_max, "y_max": b.y_max}
    return doc


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(
                f"malformed JSON at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
    return scene_from_dict(doc)


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Measurement / baseline CSV
# ---------------------------------------------------------------------------

def _read_rows(path, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise TableFormatError(f"empty file; expected header "
                                   f"{','.join(header)!r}") from None
        if [h.strip() for h in got] != header:
            raise TableFormatError(
                f"bad header {','.join(got)!r}; expected {','.join(header)!r}")
        for i, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise TableFormatError(
                    f"row {i}: expected {len(header)} columns, got {len(row)}",
                    row=i)
            yield i, [cell.strip() for cell in row]


def load_measurements(path) -> list[SlipMeasurement]:
    out = []
    for i, (object_id, angle_deg, tension) in _read_rows(path, MEASUREMENT_HEADER):
        try:
            angle = float(angle_deg)
            tension_n = float(tension)
        except ValueError as exc:
            raise TableFormatError(f"row {i}: {exc}", row=i) from exc
        if angle < 0.0:
            raise TableFormatError(f"row {i}: wrap_angle_deg must be >= 0, "
                                   f"got {angle}", row=i)
        if tension_n <= 0.0:
            raise TableFormatError(f"row {i}: slip_tension_N must be > 0, "
                                   f"got {tension_n}", row=i)
        out.append(SlipMeasurement(object_id, math.radians(angle), tension_n))
    return out


def load_baselines(path) -> list[BaselineSet]:
    forces: dict[str, list[float]] = {}
    order: list[str] = []
    for i, (object_id, force) in _read_rows(path, BASELINE_HEADER):
        try:
            force_n = float(force)
        except ValueError as exc:
            raise TableFormatError(f"row {i}: {exc}", row=i) from exc
        if force_n <= 0.0:
            raise TableFormatError(f"row {i}: peak_force_N must be > 0, "
                                   f"got {force_n}", row=i)
        if object_id not in forces:
            forces[object_id] = []
            order.append(object_id)
        forces[object_id].append(force_n)
    return [BaselineSet(oid, tuple(forces[oid])) for oid in order]


def save_measurements(measurements: Sequence[SlipMeasurement], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(MEASUREMENT_HEADER) + "\n")
        for m in measurements:
            fh.write(f"{m.object_id},{_fmt(math.degrees(m.wrap_angle))},"
                     f"{_fmt(m.slip_tension)}\n")


def save_baselines(baselines: Sequence[BaselineSet], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(BASELINE_HEADER) + "\n")
        for b in baselines:
            for f in b.peak_forces:
                fh.write(f"{b.object_id},{_fmt(f)}\n")


# ---------------------------------------------------------------------------
# Friction library JSON
# ---------------------------------------------------------------------------

def library_to_dict(library: FrictionLibrary) -> dict:
    return {
        name: {
            "mu_mean": s.mu_mean, "mu_std": s.mu_std,
            "mu_min": s.mu_min, "mu_max": s.mu_max,
            "n_objects": s.n_objects, "note": s.note,
        }
        for name, s in sorted(library.items())
    }


def library_from_dict(doc: Mapping[str, Any]) -> FrictionLibrary:
    classes = {}
    for name, s in doc.items():
        _require_keys(
            s, {"mu_mean", "mu_std", "mu_min", "mu_max", "n_objects", "note"},
            {"mu_mean", "mu_std", "mu_min", "mu_max", "n_objects"},
            f"library[{name!r}]")
        classes[name] = SurfaceClassStats(
            mu_mean=float(s["mu_mean"]), mu_std=float(s["mu_std"]),
            mu_min=float(s["mu_min"]), mu_max=float(s["mu_max"]),
            n_objects=int(s["n_objects"]), note=str(s.get("note", "")))
    return FrictionLibrary(classes)


def load_library(path) -> FrictionLibrary:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(
                f"malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    return library_from_dict(doc)


def save_library(library: FrictionLibrary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(library_to_dict(library), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Simulation scenarios and traces
# ---------------------------------------------------------------------------

def _wraps_from(doc: Sequence[Mapping[str, Any]], where: str) -> tuple[Wrap, ...]:
    wraps = []
    for i, w in enumerate(doc):
        _require_keys(w, {"mu", "theta_deg"}, {"mu", "theta_deg"},
                      f"{where}[{i}]")
        wraps.append(Wrap(float(w["mu"]), math.radians(float(w["theta_deg"]))))
    return tuple(wraps)


def scenario_from_dict(doc: Mapping[str, Any]) -> Union[SlipScenario, LoweringScenario]:
    kind = doc.get("kind")
    if kind == "pull":
        _require_keys(
            doc,
            {"kind", "wraps", "t0_base_N", "load_profile", "substrate", "snag",
             "dt_s", "duration_s"},
            {"kind", "wraps", "t0_base_N", "load_profile", "dt_s", "duration_s"},
            "scenario")
        substrate = Substrate()
        if doc.get("substrate") is not None:
            s = doc["substrate"]
            _require_keys(
                s,
                {"stick_slip_fraction", "mounding_gain",
                 "mounding_saturation_distance_m", "stick_slip_wavelength_m"},
                set(), "substrate")
            substrate = Substrate(
                stick_slip_fraction=float(s.get("stick_slip_fraction", 0.0)),
                mounding_gain=float(s.get("mounding_gain", 0.0)),
                mounding_saturation_distance=float(
                    s.get("mounding_saturation_distance_m", 1.0)),
                stick_slip_wavelength=float(
                    s.get("stick_slip_wavelength_m", 0.05)),
            )
        snag = None
        if doc.get("snag") is not None:
            sn = doc["snag"]
            _require_keys(sn, {"at_slip_distance_m", "multiplier"},
                          {"at_slip_distance_m"}, "snag")
            snag = SnagSpec(at_slip_distance=float(sn["at_slip_distance_m"]),
                            multiplier=float(sn.get("multiplier", 3.0)))
        return SlipScenario(
            wraps=_wraps_from(doc["wraps"], "wraps"),
            t0_base=float(doc["t0_base_N"]),
            load_profile=LoadProfile(tuple(
                (float(t), float(v)) for t, v in doc["load_profile"])),
            substrate=substrate,
            snag=snag,
            dt=float(doc["dt_s"]),
            duration=float(doc["duration_s"]),
        )
    if kind == "lowering":
        _require_keys(
            doc,
            {"kind", "payload_weight_N", "wraps", "agent_t0_max_N",
             "payout_policy", "dt_s", "duration_s"},
            {"kind", "payload_weight_N", "wraps", "agent_t0_max_N",
             "payout_policy", "dt_s", "duration_s"},
            "scenario")
        return LoweringScenario(
            payload_weight=float(doc["payload_weight_N"]),
            wraps=_wraps_from(doc["wraps"], "wraps"),
            agent_t0_max=float(doc["agent_t0_max_N"]),
            payout_policy=PayoutPolicy(tuple(
                (float(t), float(v)) for t, v in doc["payout_policy"])),
            dt=float(doc["dt_s"]),
            duration=float(doc["duration_s"]),
        )
    raise SceneFormatError(
        f"scenario kind must be 'pull' or 'lowering', got {kind!r}")


def load_scenario(path) -> Union[SlipScenario, LoweringScenario]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(
                f"malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


def trace_to_csv_text(trace: SlipTrace) -> str:
    lines = [",".join(TRACE_HEADER)]
    for s in trace.samples:
        lines.append(",".join([
            _fmt(s.t), _fmt(s.applied_tension), _fmt(s.effective_t0),
            _fmt(s.capacity), "true" if s.slipping else "false",
            _fmt(s.slip_distance)]))
    return "\n".join(lines) + "\n"


def save_trace_csv(trace: SlipTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_to_csv_text(trace))


def events_to_dict(trace: SlipTrace) -> dict:
    return {"events": [{"t_s": e.time, "kind": e.kind.value}
                       for e in trace.events]}


def save_events_json(trace: SlipTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(events_to_dict(trace), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Winding strings, path and plan documents
# ---------------------------------------------------------------------------

def parse_winding(text: str) -> WindingSpec:
    """Parse 'id:ccw:1,id2:cw' into a WindingSpec (turns default 0)."""
    text = text.strip()
    if not text:
        return WindingSpec()
    steps = []
    for part in text.split(","):
        bits = part.strip().split(":")
        if len(bits) == 2:
            cid, direction = bits
            turns = "0"
        elif len(bits) == 3:
            cid, direction, turns = bits
        else:
            raise TableFormatError(
                f"bad winding entry {part!r}; expected 'id:cw|ccw[:turns]'")
        try:
            n = int(turns)
        except ValueError:
            raise TableFormatError(
                f"bad turn count {turns!r} in winding entry {part!r}") from None
        steps.append(WindingStep(cid.strip(), Winding.parse(direction), n))
    return WindingSpec(tuple(steps))


def winding_to_string(winding: WindingSpec) -> str:
    return ",".join(f"{s.capstan_id}:{s.direction.value}:{s.extra_turns}"
                    for s in winding.sequence)


def path_to_dict(path: TetherPath) -> dict:
    elements = []
    for e in path.elements:
        if isinstance(e, StraightSegment):
            elements.append({
                "type": "segment",
                "p0_m": [e.p0[0], e.p0[1]], "p1_m": [e.p1[0], e.p1[1]],
                "length_m": e.length,
            })
        else:
            assert isinstance(e, ContactArc)
            elements.append({
                "type": "arc",
                "capstan_id": e.capstan_id,
                "center_m": [e.center[0], e.center[1]],
                "radius_m": e.radius,
                "entry_angle_deg": math.degrees(e.entry_angle),
                "exit_angle_deg": math.degrees(e.exit_angle),
                "direction": e.direction.value,
                "turns": e.turns,
                "wrap_angle_deg": math.degrees(e.wrap_angle),
                "length_m": e.length,
            })
    return {
        "anchor_m": [path.anchor[0], path.anchor[1]],
        "load_m": [path.load[0], path.load[1]],
        "total_length_m": path.total_length,
        "wrap_angles_deg": {cid: math.degrees(a)
                            for cid, a in sorted(path.wrap_angles.items())},
        "elements": elements,
    }


def plan_to_dict(plan: ManeuverPlan, required_tension: float) -> dict:
    return {
        "winding": [
            {"capstan_id": s.capstan_id, "direction": s.direction.value,
             "extra_turns": s.extra_turns}
            for s in plan.winding.sequence
        ],
        "wrap_angles_deg": {cid: math.degrees(a)
                            for cid, a in sorted(plan.path.wrap_angles.items())},
        "total_length_m": plan.path.total_length,
        "predicted_AF": plan.predicted_af,
        "margin": plan.margin,
        "required_holding_force_N": required_tension / plan.predicted_af,
        "per_capstan_reaction_N": dict(sorted(plan.per_capstan_reaction.items())),
        "reversible": plan.reversible,
    }
