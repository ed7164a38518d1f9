"""Taut tether paths around disk capstans.

A tether path is an alternating chain of straight tangent segments and
contact arcs, fully determined by the anchor point, the load point, and a
declared winding sequence. Angles are radians; coordinates are meters.

Winding convention
------------------
``Winding.CCW`` routes the tether so the capstan center lies to the RIGHT
of the anchor-to-load direction of travel: a path entering from the left
and leaving to the right passes over the top of the capstan. ``Winding.CW``
is the mirror image. Along the path, contact-arc polar angles decrease for
CCW wraps and increase for CW wraps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .errors import DomainError, GeometryError, InfeasibleError, RoutingError
from .estimation import FrictionLibrary, MuPolicy, design_mu
from .mechanics import Wrap, serial_amplification

Vec = tuple[float, float]

TWO_PI = 2.0 * math.pi
SWEEP_TOL = 1e-9         # arc sweeps closer than this to 0 (mod 2*pi) are errors
ANGLE_TOL = 1e-9         # angular tolerance for arc-coverage tests
EPS = 1e-12


# ---------------------------------------------------------------------------
# Small vector helpers
# ---------------------------------------------------------------------------

def _sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def _dist(a: Vec, b: Vec) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1]


def _cross(a: Vec, b: Vec) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _perp(v: Vec) -> Vec:
    return (-v[1], v[0])


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

class Winding(enum.Enum):
    """Wrap chirality; see the module docstring for the geometric meaning."""

    CW = "cw"
    CCW = "ccw"

    @classmethod
    def parse(cls, text: str) -> "Winding":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DomainError(f"winding must be 'cw' or 'ccw', got {text!r}") from None

    @property
    def reversed(self) -> "Winding":
        return Winding.CW if self is Winding.CCW else Winding.CCW


def _march(direction: Winding) -> int:
    """Sign of d(angle)/d(path) on a contact arc: +1 for CW, -1 for CCW."""
    return 1 if direction is Winding.CW else -1


@dataclass(frozen=True)
class CapstanObject:
    """A fixed disk obstacle the tether may wrap.

    ``upheaval_limit`` is the net force (N) that dislodges the object itself;
    +inf means effectively immovable.
    """

    id: str
    center: Vec
    radius: float
    surface_class: str
    upheaval_limit: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.radius <= 0.0:
            raise DomainError(f"capstan {self.id!r}: radius must be > 0")
        if self.upheaval_limit <= 0.0:
            raise DomainError(f"capstan {self.id!r}: upheaval_limit must be > 0")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used only as optional scene bounds metadata."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise DomainError("rectangle min must not exceed max")


@dataclass(frozen=True)
class Scene:
    """A set of non-overlapping capstans with unique ids."""

    capstans: tuple[CapstanObject, ...]
    bounds: Optional[Rect] = None

    def __post_init__(self):
        object.__setattr__(self, "capstans", tuple(self.capstans))
        ids = [c.id for c in self.capstans]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise GeometryError(f"duplicate capstan ids: {dupes}")
        for i, a in enumerate(self.capstans):
            for b in self.capstans[i + 1:]:
                if _dist(a.center, b.center) <= a.radius + b.radius:
                    raise GeometryError(f"capstan disks overlap: {a.id!r} and {b.id!r}")

    def capstan(self, capstan_id: str) -> CapstanObject:
        for c in self.capstans:
            if c.id == capstan_id:
                return c
        raise GeometryError(f"no capstan with id {capstan_id!r} in scene")


@dataclass(frozen=True)
class WindingStep:
    capstan_id: str
    direction: Winding
    extra_turns: int = 0

    def __post_init__(self):
        if self.extra_turns < 0 or int(self.extra_turns) != self.extra_turns:
            raise DomainError("extra_turns must be a nonnegative integer")


@dataclass(frozen=True)
class WindingSpec:
    """Ordered wrap sequence; consecutive entries must name distinct capstans."""

    sequence: tuple[WindingStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))
        for prev, nxt in zip(self.sequence, self.sequence[1:]):
            if prev.capstan_id == nxt.capstan_id:
                raise DomainError(
                    f"consecutive winding entries reference {prev.capstan_id!r}")

    def reversed(self) -> "WindingSpec":
        """The same physical winding traversed load-to-anchor."""
        return WindingSpec(tuple(
            WindingStep(s.capstan_id, s.direction.reversed, s.extra_turns)
            for s in reversed(self.sequence)))


@dataclass(frozen=True)
class StraightSegment:
    p0: Vec
    p1: Vec

    @property
    def length(self) -> float:
        return _dist(self.p0, self.p1)


@dataclass(frozen=True)
class ContactArc:
    """Tether contact on one capstan, from entry_angle to exit_angle.

    Angles are polar angles on the capstan circle. The sweep runs from entry
    to exit in the winding's angular march and lies in (0, 2*pi); full extra
    turns add to the wrap angle without changing the footprint beyond the
    full circle.
    """

    capstan_id: str
    center: Vec
    radius: float
    entry_angle: float
    exit_angle: float
    direction: Winding
    turns: int = 0
    surface_class: str = ""

    @property
    def sweep(self) -> float:
        return (_march(self.direction) * (self.exit_angle - self.entry_angle)) % TWO_PI

    @property
    def wrap_angle(self) -> float:
        return self.sweep + TWO_PI * self.turns

    @property
    def length(self) -> float:
        return self.radius * self.wrap_angle

    def point_at(self, angle: float) -> Vec:
        return (self.center[0] + self.radius * math.cos(angle),
                self.center[1] + self.radius * math.sin(angle))

    @property
    def entry_point(self) -> Vec:
        return self.point_at(self.entry_angle)

    @property
    def exit_point(self) -> Vec:
        return self.point_at(self.exit_angle)

    @property
    def is_full_circle(self) -> bool:
        return self.turns >= 1

    def covers_angle(self, angle: float, tol: float = ANGLE_TOL) -> bool:
        """Whether the arc footprint includes the given polar angle."""
        if self.is_full_circle:
            return True
        rel = (_march(self.direction) * (angle - self.entry_angle)) % TWO_PI
        return rel <= self.sweep + tol or rel >= TWO_PI - tol


PathElement = Union[StraightSegment, ContactArc]


@dataclass(frozen=True)
class TetherPath:
    """Taut path realized from a winding: segments and arcs, end to end."""

    anchor: Vec
    load: Vec
    elements: tuple[PathElement, ...]
    wrap_angles: Mapping[str, float]
    total_length: float

    @property
    def arcs(self) -> tuple[ContactArc, ...]:
        return tuple(e for e in self.elements if isinstance(e, ContactArc))

    @property
    def segments(self) -> tuple[StraightSegment, ...]:
        return tuple(e for e in self.elements if isinstance(e, StraightSegment))


@dataclass(frozen=True)
class PathReport:
    """Validity findings for a path; reversible iff clean on both counts."""

    self_crossing: bool
    collisions: tuple[str, ...]
    reversible: bool


# ---------------------------------------------------------------------------
# Tangent construction
# ---------------------------------------------------------------------------

CircleSpec = tuple[Vec, float, Winding]   # (center, radius, winding); radius 0 = point


def _tangent_endpoints(ca: Vec, ra: float, sa: int,
                       cb: Vec, rb: float, sb: int) -> tuple[Vec, Vec]:
    """Directed common tangent endpoints between two winding-signed circles.

    Signs follow :func:`_march`: +1 means the path's arc angles increase on
    that circle (CW winding), -1 means they decrease (CCW). A circle of
    radius 0 is a free endpoint. The unique tangent consistent with both
    windings touches circle X at c_X - s_X * r_X * n, where n is the unit
    left-normal of the direction of travel.
    """
    d = _dist(ca, cb)
    if d <= EPS:
        raise GeometryError("coincident circle centers admit no tangent")
    if ra > 0.0 and rb > 0.0 and d <= ra + rb:
        if sa != sb:
            raise InfeasibleError(
                f"internal tangent infeasible: center distance {d:.6g} <= "
                f"radius sum {ra + rb:.6g}")
        raise GeometryError(f"disks overlap: center distance {d:.6g} <= "
                            f"radius sum {ra + rb:.6g}")
    if (ra == 0.0) != (rb == 0.0):
        r = max(ra, rb)
        if d <= r:
            raise GeometryError("endpoint lies on or inside the disk")

    dhat = ((cb[0] - ca[0]) / d, (cb[1] - ca[1]) / d)
    h = sb * rb - sa * ra
    under = 1.0 - (h / d) ** 2
    if under <= 0.0:
        raise GeometryError("no common tangent: one disk encloses the other")
    q = math.sqrt(under)
    pd = _perp(dhat)
    n = (h / d * dhat[0] + q * pd[0], h / d * dhat[1] + q * pd[1])
    pa = (ca[0] - sa * ra * n[0], ca[1] - sa * ra * n[1])
    pb = (cb[0] - sb * rb * n[0], cb[1] - sb * rb * n[1])
    return pa, pb


def tangent_segment(circle_a: CircleSpec, circle_b: CircleSpec) -> StraightSegment:
    """The common tangent consistent with both windings, oriented A to B.

    Equal windings yield the external tangent, opposite windings the internal
    one. A point is passed as a zero-radius circle (its winding is ignored).
    """
    (ca, ra, wa), (cb, rb, wb) = circle_a, circle_b
    if ra < 0.0 or rb < 0.0:
        raise DomainError("radius must be >= 0")
    pa, pb = _tangent_endpoints(ca, ra, _march(wa), cb, rb, _march(wb))
    return StraightSegment(pa, pb)


# ---------------------------------------------------------------------------
# Routing
# ---------------------------------------------------------------------------

def route_tether(anchor: Vec, load: Vec, winding: WindingSpec,
                 scene: Scene) -> TetherPath:
    """Realize a declared winding as a taut path from anchor to load.

    The path is the unique chain of common tangents and contact arcs
    consistent with the winding directions. Raises :class:`RoutingError`
    naming the capstan on an infeasible tangent or a zero-sweep contact
    (a declared wrap that never actually touches deviates the tether).
    """
    anchor = (float(anchor[0]), float(anchor[1]))
    load = (float(load[0]), float(load[1]))
    for c in scene.capstans:
        if _dist(anchor, c.center) <= c.radius:
            raise DomainError(f"anchor lies on or inside capstan {c.id!r}")
        if _dist(load, c.center) <= c.radius:
            raise DomainError(f"load lies on or inside capstan {c.id!r}")

    if not winding.sequence:
        seg = StraightSegment(anchor, load)
        return TetherPath(anchor, load, (seg,), {}, seg.length)

    steps = winding.sequence
    caps = [scene.capstan(s.capstan_id) for s in steps]

    # Chain nodes: free anchor, wrapped capstans, free load.
    nodes: list[tuple[Vec, float, int]] = [(anchor, 0.0, 0)]
    nodes += [(c.center, c.radius, _march(s.direction)) for c, s in zip(caps, steps)]
    nodes += [(load, 0.0, 0)]

    tangents: list[tuple[Vec, Vec]] = []
    for i in range(len(nodes) - 1):
        (ca, ra, sa), (cb, rb, sb) = nodes[i], nodes[i + 1]
        blame = steps[min(i, len(steps) - 1)].capstan_id
        try:
            tangents.append(_tangent_endpoints(ca, ra, sa, cb, rb, sb))
        except (GeometryError, InfeasibleError) as exc:
            raise RoutingError(f"infeasible tangent near capstan {blame!r}: {exc}",
                               capstan_id=blame) from exc

    elements: list[PathElement] = []
    wrap_angles: dict[str, float] = {}
    for k, (cap, step) in enumerate(zip(caps, steps)):
        elements.append(StraightSegment(tangents[k][0], tangents[k][1]))
        p_in, p_out = tangents[k][1], tangents[k + 1][0]
        entry = math.atan2(p_in[1] - cap.center[1], p_in[0] - cap.center[0])
        exit_ = math.atan2(p_out[1] - cap.center[1], p_out[0] - cap.center[0])
        sweep = (_march(step.direction) * (exit_ - entry)) % TWO_PI
        if sweep < SWEEP_TOL or sweep > TWO_PI - SWEEP_TOL:
            raise RoutingError(
                f"zero-sweep contact on capstan {step.capstan_id!r}: the tether "
                f"does not wrap under the requested winding",
                capstan_id=step.capstan_id)
        arc = ContactArc(
            capstan_id=cap.id, center=cap.center, radius=cap.radius,
            entry_angle=entry, exit_angle=exit_, direction=step.direction,
            turns=step.extra_turns, surface_class=cap.surface_class)
        elements.append(arc)
        wrap_angles[cap.id] = wrap_angles.get(cap.id, 0.0) + arc.wrap_angle
    elements.append(StraightSegment(tangents[-1][0], tangents[-1][1]))

    total = math.fsum(e.length for e in elements)
    return TetherPath(anchor, load, tuple(elements), wrap_angles, total)


# ---------------------------------------------------------------------------
# Intersection predicates
# ---------------------------------------------------------------------------

def _on_segment(p: Vec, q: Vec, r: Vec) -> bool:
    """Whether q lies on segment pr, assuming the three points are collinear."""
    return (min(p[0], r[0]) - EPS <= q[0] <= max(p[0], r[0]) + EPS
            and min(p[1], r[1]) - EPS <= q[1] <= max(p[1], r[1]) + EPS)


def _orient(p: Vec, q: Vec, r: Vec) -> int:
    v = _cross(_sub(q, p), _sub(r, p))
    if v > EPS:
        return 1
    if v < -EPS:
        return -1
    return 0


def _segments_intersect(a: StraightSegment, b: StraightSegment) -> bool:
    p1, p2, p3, p4 = a.p0, a.p1, b.p0, b.p1
    o1, o2 = _orient(p1, p2, p3), _orient(p1, p2, p4)
    o3, o4 = _orient(p3, p4, p1), _orient(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(p1, p3, p2):
        return True
    if o2 == 0 and _on_segment(p1, p4, p2):
        return True
    if o3 == 0 and _on_segment(p3, p1, p4):
        return True
    if o4 == 0 and _on_segment(p3, p2, p4):
        return True
    return False


def _segment_circle_hits(seg: StraightSegment, center: Vec,
                         radius: float) -> list[Vec]:
    """Points where the segment meets the circle (boundary), if any."""
    d = _sub(seg.p1, seg.p0)
    f = _sub(seg.p0, center)
    a = _dot(d, d)
    if a <= EPS:
        return []
    b = 2.0 * _dot(f, d)
    c = _dot(f, f) - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    hits = []
    for t in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)):
        if -EPS <= t <= 1.0 + EPS:
            hits.append((seg.p0[0] + t * d[0], seg.p0[1] + t * d[1]))
    return hits


def _segment_arc_intersect(seg: StraightSegment, arc: ContactArc) -> bool:
    for p in _segment_circle_hits(seg, arc.center, arc.radius):
        phi = math.atan2(p[1] - arc.center[1], p[0] - arc.center[0])
        if arc.covers_angle(phi):
            return True
    return False


def _circle_circle_points(c1: Vec, r1: float, c2: Vec, r2: float) -> list[Vec]:
    d = _dist(c1, c2)
    if d <= EPS or d > r1 + r2 + EPS or d < abs(r1 - r2) - EPS:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    under = r1 * r1 - a * a
    h = math.sqrt(max(0.0, under))
    ux, uy = (c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d
    mx, my = c1[0] + a * ux, c1[1] + a * uy
    if h <= EPS:
        return [(mx, my)]
    return [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]


def _arcs_intersect(a: ContactArc, b: ContactArc) -> bool:
    same_circle = (_dist(a.center, b.center) <= EPS
                   and abs(a.radius - b.radius) <= EPS)
    if same_circle:
        return (a.covers_angle(b.entry_angle) or a.covers_angle(b.exit_angle)
                or b.covers_angle(a.entry_angle) or b.covers_angle(a.exit_angle))
    for p in _circle_circle_points(a.center, a.radius, b.center, b.radius):
        pa = math.atan2(p[1] - a.center[1], p[0] - a.center[0])
        pb = math.atan2(p[1] - b.center[1], p[0] - b.center[0])
        if a.covers_angle(pa) and b.covers_angle(pb):
            return True
    return False


def _elements_intersect(e1: PathElement, e2: PathElement) -> bool:
    if isinstance(e1, StraightSegment) and isinstance(e2, StraightSegment):
        return _segments_intersect(e1, e2)
    if isinstance(e1, StraightSegment) and isinstance(e2, ContactArc):
        return _segment_arc_intersect(e1, e2)
    if isinstance(e1, ContactArc) and isinstance(e2, StraightSegment):
        return _segment_arc_intersect(e2, e1)
    return _arcs_intersect(e1, e2)


def _point_segment_distance(p: Vec, seg: StraightSegment) -> float:
    d = _sub(seg.p1, seg.p0)
    dd = _dot(d, d)
    if dd <= EPS:
        return _dist(p, seg.p0)
    t = _dot(_sub(p, seg.p0), d) / dd
    t = max(0.0, min(1.0, t))
    return _dist(p, (seg.p0[0] + t * d[0], seg.p0[1] + t * d[1]))


def _point_arc_distance(p: Vec, arc: ContactArc) -> float:
    phi = math.atan2(p[1] - arc.center[1], p[0] - arc.center[0])
    if arc.covers_angle(phi):
        return abs(_dist(p, arc.center) - arc.radius)
    return min(_dist(p, arc.entry_point), _dist(p, arc.exit_point))


def _element_hits_disk(e: PathElement, center: Vec, radius: float) -> bool:
    if isinstance(e, StraightSegment):
        return _point_segment_distance(center, e) < radius - EPS
    return _point_arc_distance(center, e) < radius - EPS


# ---------------------------------------------------------------------------
# Validation & amplification
# ---------------------------------------------------------------------------

def validate_path(path: TetherPath, scene: Scene) -> PathReport:
    """Check a path for self-crossing and collisions with unwrapped capstans.

    Self-crossing is any intersection between non-adjacent path elements
    (adjacent elements legitimately share a joint). Collisions list capstans
    that are not in the winding but whose open disk is entered by any
    element. The path is reversible iff it is clean on both counts.
    """
    elems = path.elements
    crossing = False
    for i in range(len(elems)):
        for j in range(i + 2, len(elems)):
            if _elements_intersect(elems[i], elems[j]):
                crossing = True
                break
        if crossing:
            break

    wrapped = {a.capstan_id for a in path.arcs}
    collisions = []
    for c in scene.capstans:
        if c.id in wrapped:
            continue
        if any(_element_hits_disk(e, c.center, c.radius) for e in elems):
            collisions.append(c.id)

    return PathReport(
        self_crossing=crossing,
        collisions=tuple(sorted(collisions)),
        reversible=not crossing and not collisions,
    )


def path_amplification(path: TetherPath, library: FrictionLibrary,
                       mu_policy: MuPolicy) -> float:
    """Serial amplification of a path under a friction-selection policy."""
    wraps = [Wrap(design_mu(library.get(a.surface_class), mu_policy), a.wrap_angle)
             for a in path.arcs]
    return serial_amplification(wraps)
