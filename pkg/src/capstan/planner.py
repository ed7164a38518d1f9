"""Anchoring-maneuver planning under factor-of-safety and upheaval constraints.

Sizes minimum wrap angles, searches winding specifications over a scene, and
allocates load among parallel tethered agents. The search is an exhaustive,
deterministic enumeration: scenes in this problem are small, and minimality
of the returned plan matters more than asymptotic speed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import lsq_linear

from .errors import DomainError, InfeasibleError, PlanInfeasibleError, RoutingError
from .estimation import FrictionLibrary, MuPolicy, design_mu
from .geometry import (
    ContactArc,
    Scene,
    StraightSegment,
    TetherPath,
    Winding,
    WindingSpec,
    WindingStep,
    path_amplification,
    route_tether,
    validate_path,
)
from .mechanics import ReactionInput, TensionBranch, capstan_reaction

Vec = tuple[float, float]


@dataclass(frozen=True)
class AnchorAgent:
    """The holding agent: where it sits and how hard it can hold."""

    position: Vec
    holding_force: float

    def __post_init__(self):
        if self.holding_force <= 0.0:
            raise DomainError("holding_force must be > 0")


@dataclass(frozen=True)
class ManeuverRequest:
    anchor_agent: AnchorAgent
    load_point: Vec
    required_tension: float
    factor_of_safety: float = 1.0
    mu_policy: MuPolicy = MuPolicy.MIN
    require_reversible: bool = False
    max_capstans: int = 3
    max_turns_per_capstan: int = 2

    def __post_init__(self):
        if self.required_tension <= 0.0:
            raise DomainError("required_tension must be > 0")
        if self.factor_of_safety < 1.0:
            raise DomainError("factor_of_safety must be >= 1")
        if self.max_capstans < 1:
            raise DomainError("max_capstans must be >= 1")
        if self.max_turns_per_capstan < 0:
            raise DomainError("max_turns_per_capstan must be >= 0")


@dataclass(frozen=True)
class ManeuverPlan:
    winding: WindingSpec
    path: TetherPath
    predicted_af: float
    margin: float
    per_capstan_reaction: dict[str, float]
    reversible: bool


def required_wrap(required_tension: float, t0: float, mu_design: float,
                  fos: float) -> float:
    """Minimum total wrap angle (rad) so the amplified holding force covers
    fos * required_tension: max(0, ln(fos*T/T0) / mu_design)."""
    if required_tension <= 0.0 or t0 <= 0.0:
        raise DomainError("required_tension and t0 must be > 0")
    if fos < 1.0:
        raise DomainError("fos must be >= 1")
    if mu_design < 0.0:
        raise DomainError("mu_design must be >= 0")
    ratio = fos * required_tension / t0
    if ratio <= 1.0:
        return 0.0
    if mu_design == 0.0:
        raise InfeasibleError(
            "zero design friction cannot amplify; no wrap angle suffices")
    return math.log(ratio) / mu_design


# ---------------------------------------------------------------------------
# Serial reaction propagation
# ---------------------------------------------------------------------------

def _arc_reactions(path: TetherPath, library: FrictionLibrary,
                   mu_policy: MuPolicy, load_tension: float) -> dict[str, float]:
    """Per-capstan reaction magnitudes at a given load-side tension.

    Tension attenuates through the serial chain from the load end: entering
    the k-th capstan from the load it is T * exp(-sum of earlier mu*theta).
    Each capstan reacts the vector sum of its two end tensions, taken along
    the tether away from the contact. Reactions of repeated visits to one
    capstan sum vectorially.
    """
    elems = path.elements
    totals: dict[str, Vec] = {}
    cum = 0.0
    for i in range(len(elems) - 2, 0, -2):   # arcs, load end first
        arc = elems[i]
        assert isinstance(arc, ContactArc)
        seg_out = elems[i + 1]
        seg_in = elems[i - 1]
        assert isinstance(seg_out, StraightSegment) and isinstance(seg_in, StraightSegment)
        t_load_side = load_tension * math.exp(-cum)
        mu = design_mu(library.get(arc.surface_class), mu_policy)
        cum += mu * arc.wrap_angle
        t_hold_side = load_tension * math.exp(-cum)
        d_load = _unit_from(seg_out.p0, seg_out.p1)
        d_hold = _unit_from(seg_in.p1, seg_in.p0)
        fx, fy = capstan_reaction(ReactionInput(
            tension_hold=t_hold_side, tension_load=t_load_side,
            dir_hold=d_hold, dir_load=d_load))
        px, py = totals.get(arc.capstan_id, (0.0, 0.0))
        totals[arc.capstan_id] = (px + fx, py + fy)
    return {cid: math.hypot(v[0], v[1]) for cid, v in totals.items()}


def _unit_from(a: Vec, b: Vec) -> Vec:
    d = math.dist(a, b)
    if d <= 0.0:
        raise DomainError("degenerate segment has no direction")
    return ((b[0] - a[0]) / d, (b[1] - a[1]) / d)


# ---------------------------------------------------------------------------
# Winding search
# ---------------------------------------------------------------------------

def _sequences(ids: Sequence[str], max_len: int):
    """All id sequences up to max_len with distinct consecutive entries,
    in a stable deterministic order."""
    yield ()
    frontier: list[tuple[str, ...]] = [()]
    for _ in range(max_len):
        nxt = []
        for seq in frontier:
            for cid in ids:
                if seq and seq[-1] == cid:
                    continue
                nxt.append(seq + (cid,))
        for seq in nxt:
            yield seq
        frontier = nxt


@dataclass
class _Candidate:
    winding: WindingSpec
    path: TetherPath
    af: float
    margin: float
    reactions: dict[str, float]
    reversible: bool

    def sort_key(self):
        max_reaction = max(self.reactions.values(), default=0.0)
        label = tuple((s.capstan_id, s.direction.value, s.extra_turns)
                      for s in self.winding.sequence)
        return (len(self.winding.sequence), self.path.total_length,
                max_reaction, label)


def _path_with_turns(base: TetherPath, turns: Sequence[int]) -> TetherPath:
    """The base route with per-arc extra turns; geometry is unchanged, only
    wrap angles and length grow by full circles."""
    elements = []
    arc_i = 0
    wrap_angles: dict[str, float] = {}
    for e in base.elements:
        if isinstance(e, ContactArc):
            e = replace(e, turns=turns[arc_i])
            arc_i += 1
            wrap_angles[e.capstan_id] = wrap_angles.get(e.capstan_id, 0.0) + e.wrap_angle
        elements.append(e)
    total = math.fsum(e.length for e in elements)
    return TetherPath(base.anchor, base.load, tuple(elements), wrap_angles, total)


def plan_anchor(scene: Scene, library: FrictionLibrary,
                request: ManeuverRequest) -> ManeuverPlan:
    """Find the best feasible winding for a maneuver request.

    Feasibility: the policy-amplified holding force covers the factor of
    safety (margin >= 1), no element passes through an unwrapped capstan,
    every capstan reaction stays within its upheaval limit, and the path is
    reversible when requested. Among feasible candidates the objective is
    lexicographic: fewest wraps, then shortest tether, then lowest maximum
    capstan reaction. Raises :class:`PlanInfeasibleError` carrying the best
    margin attained when nothing qualifies.
    """
    anchor = request.anchor_agent.position
    t0 = request.anchor_agent.holding_force
    fos_tension = request.factor_of_safety * request.required_tension
    ids = [c.id for c in scene.capstans]

    best: Optional[_Candidate] = None
    best_margin = -math.inf
    best_len: Optional[int] = None

    for seq in _sequences(ids, request.max_capstans):
        if best_len is not None and len(seq) > best_len:
            break   # sequences stream in nondecreasing length
        for dirs in itertools.product((Winding.CW, Winding.CCW), repeat=len(seq)):
            base_winding = WindingSpec(tuple(
                WindingStep(cid, d, 0) for cid, d in zip(seq, dirs)))
            try:
                base_path = route_tether(anchor, request.load_point,
                                         base_winding, scene)
            except RoutingError:
                continue
            turn_space = itertools.product(
                range(request.max_turns_per_capstan + 1), repeat=len(seq))
            for turns in turn_space:
                path = _path_with_turns(base_path, turns) if any(turns) else base_path
                report = validate_path(path, scene)
                if report.collisions:
                    continue
                if request.require_reversible and not report.reversible:
                    continue
                af = path_amplification(path, library, request.mu_policy)
                margin = af * t0 / fos_tension
                best_margin = max(best_margin, margin)
                if margin < 1.0:
                    continue
                reactions = _arc_reactions(path, library, request.mu_policy,
                                           request.required_tension)
                if any(reactions[cid] > scene.capstan(cid).upheaval_limit
                       for cid in reactions):
                    continue
                winding = WindingSpec(tuple(
                    WindingStep(cid, d, k)
                    for cid, d, k in zip(seq, dirs, turns)))
                cand = _Candidate(winding, path, af, margin, reactions,
                                  report.reversible)
                if best is None or cand.sort_key() < best.sort_key():
                    best = cand
                    best_len = len(seq)

    if best is None:
        raise PlanInfeasibleError(
            f"no feasible winding within {request.max_capstans} wraps and "
            f"{request.max_turns_per_capstan} extra turns; best margin "
            f"attained {best_margin:.6g}", best_margin=best_margin)
    return ManeuverPlan(
        winding=best.winding, path=best.path, predicted_af=best.af,
        margin=best.margin, per_capstan_reaction=best.reactions,
        reversible=best.reversible)


# ---------------------------------------------------------------------------
# Parallel allocation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParallelAllocation:
    """Result of distributing a target force over parallel branches."""

    tensions: tuple[float, ...]
    achieved: Vec
    residual: float
    feasible: bool


def branch_toward(payload_point: Vec, agent_position: Vec, holding_force: float,
                  wrap) -> TensionBranch:
    """Branch template for an agent pulling the payload toward itself."""
    return TensionBranch(holding_force, wrap,
                         _unit_from(payload_point, agent_position))


def allocate_parallel(branches: Sequence[TensionBranch], target: Vec,
                      tol: float = 1e-9) -> ParallelAllocation:
    """Distribute a target force among parallel branches.

    Minimizes |sum T_j t_j - target| over load-side tensions 0 <= T_j <=
    capacity_j (bounded least squares). The allocation is feasible only if
    the residual vanishes; otherwise the best attainable allocation and its
    residual are reported.
    """
    if not branches:
        raise DomainError("need at least one branch")
    a = np.array([[b.direction[0] for b in branches],
                  [b.direction[1] for b in branches]], dtype=float)
    caps = np.array([b.capacity for b in branches], dtype=float)
    b_vec = np.asarray(target, dtype=float)
    res = lsq_linear(a, b_vec, bounds=(np.zeros(len(branches)), caps),
                     method="bvls" if len(branches) <= 2 else "trf",
                     tol=1e-14)
    tensions = np.clip(res.x, 0.0, caps)
    achieved = a @ tensions
    residual = float(np.linalg.norm(achieved - b_vec))
    return ParallelAllocation(
        tensions=tuple(float(t) for t in tensions),
        achieved=(float(achieved[0]), float(achieved[1])),
        residual=residual,
        feasible=residual <= tol,
    )
