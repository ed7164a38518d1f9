"""Unit tests for maneuver planning and parallel force allocation."""

import itertools
import math

import numpy as np
import pytest

from capstan.errors import DomainError, InfeasibleError, PlanInfeasibleError
from capstan.estimation import MuPolicy, default_library
from capstan.geometry import (
    CapstanObject,
    Scene,
    Winding,
    WindingSpec,
    WindingStep,
    route_tether,
    validate_path,
)
from capstan.mechanics import (
    ReactionInput,
    TensionBranch,
    Wrap,
    capstan_reaction,
    serial_amplification,
)
from capstan.planner import (
    AnchorAgent,
    ManeuverRequest,
    allocate_parallel,
    branch_toward,
    plan_anchor,
    required_wrap,
)

LIB = default_library()


# ---------------------------------------------------------------------------
# required_wrap
# ---------------------------------------------------------------------------

def test_required_wrap_conservative_field_bound():
    # ln(100) / 0.336 = 13.70586 rad = 785.288 deg
    theta = required_wrap(100.0, 1.0, 0.336, 1.0)
    assert theta == pytest.approx(math.log(100.0) / 0.336, rel=1e-12)
    assert math.degrees(theta) == pytest.approx(785.288, abs=0.1)


def test_required_wrap_zero_when_holding_suffices():
    assert required_wrap(10.0, 42.0, 0.5, 1.0) == 0.0
    assert required_wrap(10.0, 10.0, 0.5, 1.0) == 0.0


def test_required_wrap_unit_exponent():
    assert required_wrap(math.e, 1.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_required_wrap_zero_mu_infeasible():
    with pytest.raises(InfeasibleError):
        required_wrap(10.0, 1.0, 0.0, 1.0)


def test_required_wrap_monotonicity():
    base = required_wrap(10.0, 1.0, 0.4, 2.0)
    assert required_wrap(10.0, 1.5, 0.4, 2.0) < base         # more holding
    assert required_wrap(10.0, 1.0, 0.5, 2.0) < base         # more friction
    assert required_wrap(12.0, 1.0, 0.4, 2.0) > base         # more load
    assert required_wrap(10.0, 1.0, 0.4, 2.5) > base         # more safety


# ---------------------------------------------------------------------------
# plan_anchor
# ---------------------------------------------------------------------------

def _request(anchor, load, t0, tension, fos=1.0, policy=MuPolicy.MIN, **kw):
    return ManeuverRequest(AnchorAgent(anchor, t0), load, tension, fos,
                           policy, **kw)


def test_single_redwood_plan_meets_wrap_bound():
    scene = Scene((CapstanObject("r1", (0.0, 3.0), 0.3, "redwood"),))
    req = _request((-4.0, 0.0), (4.0, 0.0), 2.0, 10.0, fos=2.0)
    plan = plan_anchor(scene, LIB, req)
    assert len(plan.winding.sequence) == 1
    assert plan.margin >= 1.0
    assert plan.path.wrap_angles["r1"] >= math.log(10.0) / 0.336 - 1e-9
    # independent recheck from the raw capstan equation
    af = serial_amplification([Wrap(0.336, a.wrap_angle) for a in plan.path.arcs])
    assert af * 2.0 >= 2.0 * 10.0 - 1e-9


def test_zero_capstans_when_holding_force_suffices():
    scene = Scene((CapstanObject("r1", (0.0, 3.0), 0.3, "redwood"),))
    req = _request((-4.0, 0.0), (4.0, 0.0), 50.0, 10.0, fos=2.0)
    plan = plan_anchor(scene, LIB, req)
    assert plan.winding.sequence == ()
    assert plan.predicted_af == 1.0
    assert plan.margin == pytest.approx(50.0 / 20.0)


def test_empty_scene_infeasible_carries_margin():
    req = _request((-4.0, 0.0), (4.0, 0.0), 2.0, 10.0, fos=2.0)
    with pytest.raises(PlanInfeasibleError) as err:
        plan_anchor(Scene(()), LIB, req)
    assert err.value.best_margin == pytest.approx(2.0 / 20.0)


def test_upheaval_limit_forces_load_splitting():
    # a single capstan carrying the whole amplification reacts at least
    # T - T_hold >= 7 N here, over the 6.9 N limit; adding a second capstan
    # lets the planner split the wrap so each reaction stays within bounds
    scene_one = Scene((
        CapstanObject("w1", (-2.0, 2.0), 0.3, "redwood", upheaval_limit=6.9),))
    scene_two = Scene((
        CapstanObject("w1", (-2.0, 2.0), 0.3, "redwood", upheaval_limit=6.9),
        CapstanObject("w2", (2.0, 2.0), 0.3, "redwood", upheaval_limit=6.9),
    ))
    req = _request((-5.0, 0.0), (5.0, 0.0), 1.0, 8.0, fos=1.0,
                   policy=MuPolicy.MEAN)
    with pytest.raises(PlanInfeasibleError):
        plan_anchor(scene_one, LIB, req)
    plan = plan_anchor(scene_two, LIB, req)
    assert len(plan.winding.sequence) == 2
    assert all(r <= 6.9 + 1e-9 for r in plan.per_capstan_reaction.values())
    assert plan.margin >= 1.0


def test_reversibility_constraint_respected():
    scene = Scene((CapstanObject("r1", (0.0, 3.0), 0.5, "redwood"),
                   CapstanObject("r2", (0.0, -3.0), 0.5, "redwood")))
    req = _request((-5.0, 0.0), (5.0, 0.0), 1.0, 5.0, fos=1.0,
                   policy=MuPolicy.MEAN, require_reversible=True)
    plan = plan_anchor(scene, LIB, req)
    assert plan.reversible
    report = validate_path(plan.path, scene)
    assert report.reversible


def test_anchor_inside_disk_rejected():
    scene = Scene((CapstanObject("r1", (0.0, 0.0), 1.0, "redwood"),))
    req = _request((0.2, 0.0), (4.0, 0.0), 2.0, 10.0)
    with pytest.raises(DomainError):
        plan_anchor(scene, LIB, req)


# ---------------------------------------------------------------------------
# Independent exhaustive oracle (soundness & minimality)
# ---------------------------------------------------------------------------

def _oracle_best(scene, library, request):
    """Exhaustive search written independently of the planner internals.

    Enumerates every winding (sequences with distinct consecutive ids up to
    max_capstans, both directions, all turn counts), routes it, applies the
    same feasibility semantics, and returns the minimal objective key."""
    ids = [c.id for c in scene.capstans]
    anchor = request.anchor_agent.position
    t0 = request.anchor_agent.holding_force
    need = request.factor_of_safety * request.required_tension

    seqs = [()]
    for n in range(1, request.max_capstans + 1):
        for combo in itertools.product(ids, repeat=n):
            if all(a != b for a, b in zip(combo, combo[1:])):
                seqs.append(combo)

    best_key = None
    for seq in seqs:
        for dirs in itertools.product((Winding.CW, Winding.CCW), repeat=len(seq)):
            for turns in itertools.product(
                    range(request.max_turns_per_capstan + 1), repeat=len(seq)):
                spec = WindingSpec(tuple(
                    WindingStep(c, d, k) for c, d, k in zip(seq, dirs, turns)))
                try:
                    path = route_tether(anchor, request.load_point, spec, scene)
                except Exception:
                    continue
                report = validate_path(path, scene)
                if report.collisions:
                    continue
                if request.require_reversible and not report.reversible:
                    continue
                wraps = [Wrap(_policy_mu(library, a.surface_class,
                                         request.mu_policy), a.wrap_angle)
                         for a in path.arcs]
                af = serial_amplification(wraps)
                if af * t0 < need:
                    continue
                reactions = _oracle_reactions(path, library, request)
                if any(reactions[cid] > scene.capstan(cid).upheaval_limit
                       for cid in reactions):
                    continue
                key = (len(seq), path.total_length,
                       max(reactions.values(), default=0.0))
                if best_key is None or key < best_key:
                    best_key = key
    return best_key


def _policy_mu(library, cls, policy):
    from capstan.estimation import design_mu
    return design_mu(library.get(cls), policy)


def _oracle_reactions(path, library, request):
    """Serial tension propagation re-derived from the capstan equation."""
    arcs = list(path.arcs)
    segs = list(path.segments)
    out = {}
    tension = request.required_tension
    for idx in range(len(arcs) - 1, -1, -1):
        arc = arcs[idx]
        mu = _policy_mu(library, arc.surface_class, request.mu_policy)
        t_load = tension
        t_hold = tension * math.exp(-mu * arc.wrap_angle)
        seg_in, seg_out = segs[idx], segs[idx + 1]
        li, lo = seg_in.length, seg_out.length
        d_hold = ((seg_in.p0[0] - seg_in.p1[0]) / li,
                  (seg_in.p0[1] - seg_in.p1[1]) / li)
        d_load = ((seg_out.p1[0] - seg_out.p0[0]) / lo,
                  (seg_out.p1[1] - seg_out.p0[1]) / lo)
        fx, fy = capstan_reaction(ReactionInput(t_hold, t_load, d_hold, d_load))
        px, py = out.get(arc.capstan_id, (0.0, 0.0))
        out[arc.capstan_id] = (px + fx, py + fy)
        tension = t_hold
    return {cid: math.hypot(*v) for cid, v in out.items()}


def _random_planning_case(rng):
    n = int(rng.integers(1, 4))
    capstans = []
    tries = 0
    while len(capstans) < n and tries < 300:
        tries += 1
        c = (rng.uniform(-4, 4), rng.uniform(-4, 4))
        r = rng.uniform(0.3, 0.9)
        if all(math.dist(c, o.center) > r + o.radius + 0.25 for o in capstans):
            cls = str(rng.choice(["redwood", "smooth_bark", "fire_hydrant"]))
            limit = math.inf if rng.random() < 0.5 else float(rng.uniform(5, 60))
            capstans.append(CapstanObject(
                f"c{len(capstans)}", c, r, cls, upheaval_limit=limit))
    scene = Scene(tuple(capstans))
    request = ManeuverRequest(
        anchor_agent=AnchorAgent((rng.uniform(-9, -7), rng.uniform(-2, 2)),
                                 float(rng.uniform(0.5, 4.0))),
        load_point=(rng.uniform(7, 9), rng.uniform(-2, 2)),
        required_tension=float(rng.uniform(2.0, 30.0)),
        factor_of_safety=float(rng.choice([1.0, 1.5, 2.0])),
        mu_policy=MuPolicy(rng.choice(["mean", "min", "lower95"])),
        require_reversible=bool(rng.random() < 0.3),
        max_capstans=3,
        max_turns_per_capstan=2,
    )
    return scene, request


def test_planner_soundness_and_minimality_sample():
    rng = np.random.default_rng(2024)
    for _ in range(25):
        scene, request = _random_planning_case(rng)
        try:
            plan = plan_anchor(scene, LIB, request)
        except PlanInfeasibleError:
            assert _oracle_best(scene, LIB, request) is None
            continue
        # soundness: margin and reactions re-derived from mechanics
        wraps = [Wrap(_policy_mu(LIB, a.surface_class, request.mu_policy),
                      a.wrap_angle) for a in plan.path.arcs]
        af = serial_amplification(wraps)
        assert af * request.anchor_agent.holding_force >= (
            request.factor_of_safety * request.required_tension) * (1 - 1e-9)
        reactions = _oracle_reactions(plan.path, LIB, request)
        for cid, r in reactions.items():
            assert r <= scene.capstan(cid).upheaval_limit + 1e-9
            assert r == pytest.approx(plan.per_capstan_reaction[cid], rel=1e-9)
        # minimality: the oracle finds nothing strictly better
        oracle_key = _oracle_best(scene, LIB, request)
        assert oracle_key is not None
        plan_key = (len(plan.winding.sequence), plan.path.total_length,
                    max(plan.per_capstan_reaction.values(), default=0.0))
        assert plan_key[0] == oracle_key[0]
        assert plan_key[1] <= oracle_key[1] + 1e-6


# ---------------------------------------------------------------------------
# allocate_parallel
# ---------------------------------------------------------------------------

def _branch(direction, t0=10.0, mu_theta=0.0):
    return TensionBranch(t0, Wrap(1.0, mu_theta), direction)


def test_single_agent_exact():
    alloc = allocate_parallel([_branch((1.0, 0.0))], (5.0, 0.0))
    assert alloc.feasible
    assert alloc.tensions == pytest.approx((5.0,))
    assert alloc.residual == pytest.approx(0.0, abs=1e-12)


def test_symmetric_pair_at_capacity():
    c = math.cos(math.pi / 4)
    alloc = allocate_parallel(
        [_branch((c, c)), _branch((c, -c))], (10.0 * math.sqrt(2.0), 0.0))
    assert alloc.feasible
    assert alloc.tensions == pytest.approx((10.0, 10.0), rel=1e-9)


def test_orthogonal_target_infeasible():
    alloc = allocate_parallel([_branch((1.0, 0.0)), _branch((1.0, 0.0))],
                              (0.0, 1.0))
    assert not alloc.feasible
    assert alloc.residual == pytest.approx(1.0, rel=1e-9)


def test_amplified_capacity_extends_reach():
    # capacity = t0 * e^(mu*theta); with ln(3) exponent a 1 N holder covers 3 N
    alloc = allocate_parallel([_branch((1.0, 0.0), t0=1.0, mu_theta=math.log(3.0))],
                              (3.0, 0.0))
    assert alloc.feasible
    assert alloc.tensions[0] == pytest.approx(3.0, rel=1e-9)


def test_interior_feasible_target_has_tiny_residual():
    rng = np.random.default_rng(77)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        angles = rng.uniform(0, 2 * math.pi, size=n)
        branches = [_branch((math.cos(a), math.sin(a)),
                            t0=float(rng.uniform(5, 20))) for a in angles]
        weights = rng.uniform(0.1, 0.9, size=n)
        tx = sum(w * b.capacity * b.direction[0]
                 for w, b in zip(weights, branches))
        ty = sum(w * b.capacity * b.direction[1]
                 for w, b in zip(weights, branches))
        alloc = allocate_parallel(branches, (tx, ty))
        assert alloc.residual < 1e-9


def test_branch_toward_builds_unit_direction():
    b = branch_toward((0.0, 0.0), (3.0, 4.0), 2.0, Wrap(0.0, 0.0))
    assert b.direction == pytest.approx((0.6, 0.8))


def test_empty_branches_rejected():
    with pytest.raises(DomainError):
        allocate_parallel([], (1.0, 0.0))
