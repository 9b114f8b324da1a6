"""Risk-avoidance routing and relay-anchored path verification for LEO
satellite constellations: constellation propagation, per-slot network
snapshots, relay planning with detour-delay thresholds, a byte-exact
verification protocol, attack injection, and a scenario/metrics harness.
"""

from .constellation import (
    Direction,
    KUIPER_SHELL1,
    STARLINK_SHELL1,
    SatCoord,
    SatState,
    ShellConfig,
    direction_of,
    propagate,
    propagate_block,
)
from .topology import (
    GroundEntity,
    NoVisibleSatellite,
    Role,
    Snapshot,
    build_grid_isls,
    build_snapshot,
    grid_hop_distance,
    grid_snapshot,
    link_delay,
    snapshot_from_edges,
)
from .routing import Path, Unreachable, equal_cost_node_set, shortest_path
from .riskmap import (
    Nlrp,
    RiskArea,
    RiskSet,
    RiskTooLarge,
    compute_nlrp,
    risk_satellites,
)
from .drsa import (
    Frame,
    OverlapClass,
    PlanInfeasible,
    RelayPlan,
    ZeroThreshold,
    classify_overlap,
    detour_threshold,
    select_relays,
    transform_opposite_direction,
)
from .adversary import AttackKind, AttackSpec, InfeasibleAttack

__version__ = "0.1.0"
