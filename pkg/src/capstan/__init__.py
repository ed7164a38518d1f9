"""Planar tether-anchoring toolkit.

Routes taut tethers around fixed capstan objects, evaluates capstan force
amplification (single, serial, parallel), fits tether-object friction
coefficients from slip tests, plans minimum-wrap anchoring maneuvers under
safety and upheaval constraints, and simulates quasi-static slip behavior.

Modules:
- mechanics:  closed-form amplification, sensitivities, reaction forces
- geometry:   taut paths around disk capstans, wrap angles, validity
- estimation: friction fitting and surface-class statistics
- planner:    minimum-wrap winding search and parallel allocation
- simulator:  quasi-static slip / lowering simulation
- io:         scene/measurement/library/scenario file formats
- cli:        the `capstan` command-line tool
"""

from .estimation import (
    BaselineSet,
    FrictionFit,
    FrictionLibrary,
    MuPolicy,
    SlipMeasurement,
    SurfaceClassStats,
    aggregate_class,
    baseline_holding,
    default_library,
    design_mu,
    diameter_correlation,
    fit_friction,
)
from .geometry import (
    CapstanObject,
    ContactArc,
    PathReport,
    Scene,
    StraightSegment,
    TetherPath,
    Winding,
    WindingSpec,
    WindingStep,
    path_amplification,
    route_tether,
    tangent_segment,
    validate_path,
)
from .mechanics import (
    ReactionInput,
    TensionBranch,
    Wrap,
    amplification_factor,
    capstan_reaction,
    holding_requirement,
    parallel_net_tension,
    sensitivity,
    serial_amplification,
)
from .planner import (
    AnchorAgent,
    ManeuverPlan,
    ManeuverRequest,
    ParallelAllocation,
    allocate_parallel,
    branch_toward,
    plan_anchor,
    required_wrap,
)
from .simulator import (
    EventKind,
    LoadProfile,
    LoweringScenario,
    PayoutPolicy,
    SlipScenario,
    SlipTrace,
    SnagSpec,
    Substrate,
    simulate_lowering,
    simulate_pull,
)

__version__ = "0.1.0"

__all__ = [
    # mechanics
    "Wrap", "TensionBranch", "ReactionInput", "amplification_factor",
    "serial_amplification", "holding_requirement", "parallel_net_tension",
    "sensitivity", "capstan_reaction",
    # geometry
    "CapstanObject", "Scene", "Winding", "WindingStep", "WindingSpec",
    "StraightSegment", "ContactArc", "TetherPath", "PathReport",
    "tangent_segment", "route_tether", "validate_path", "path_amplification",
    # estimation
    "SlipMeasurement", "BaselineSet", "FrictionFit", "SurfaceClassStats",
    "FrictionLibrary", "MuPolicy", "design_mu", "baseline_holding",
    "fit_friction", "aggregate_class", "diameter_correlation",
    "default_library",
    # planner
    "AnchorAgent", "ManeuverRequest", "ManeuverPlan", "required_wrap",
    "plan_anchor", "ParallelAllocation", "allocate_parallel", "branch_toward",
    # simulator
    "SlipScenario", "LoweringScenario", "Substrate", "SnagSpec",
    "LoadProfile", "PayoutPolicy", "SlipTrace", "EventKind",
    "simulate_pull", "simulate_lowering",
]
