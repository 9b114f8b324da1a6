"""Per-packet forwarding simulation.

A packet is walked hop by hop along its (possibly attacked) itinerary
with per-slot link delays plus per-hop processing draws; relays run the
segment check, the destination satellite stamps its arrival, and the
ground destination issues the final verdict. The traversal trace feeds
the ground-truth side of the metrics (did the packet actually touch a
risk satellite), independent of the verifier.
"""

from dataclasses import dataclass, replace

from ..adversary import (
    AttackKind,
    AttackSpec,
    InfeasibleAttack,
    forge_mac,
    forge_timestamp,
    modify_path_field,
    plan_hijack_detour,
    tamper_payload,
)
from ..constellation import SatCoord
from ..drsa import RelayPlan
from ..riskmap import RiskSet
from ..veriproto.codec import seconds_to_us, wrap_us
from ..veriproto.protocol import (
    DstContext,
    JitterModel,
    KeyTable,
    Packet,
    Reason,
    RelayState,
    Verdict,
    dst_verify,
    insert_dst_timestamp,
    relay_process,
    src_prepare,
)


@dataclass(frozen=True)
class FlightResult:
    delivered: bool
    verdict: Verdict | None       # None when dropped en route
    drop_reason: Reason | None
    dropped_at: SatCoord | None
    trace: tuple                  # satellite labels actually traversed
    risky: bool                   # trace intersects the risk set
    e2e_delay: float | None       # seconds, src ground to dst ground
    packet: Packet | None

    @property
    def accepted(self) -> bool:
        return self.delivered and self.verdict is not None and self.verdict.accept

    @property
    def rejected(self) -> bool:
        return not self.accepted


def _edge_delay(snapshot, a, b) -> float:
    ia, ib = snapshot.index_of(a), snapshot.index_of(b)
    nbrs, wts = snapshot.neighbors(ia)
    hit = nbrs == ib
    if not hit.any():
        raise KeyError(f"no edge {a} -> {b} at t={snapshot.t}")
    return float(wts[hit][0])


def _access_delay(snapshot, ground_id, sat_coord) -> float:
    return _edge_delay(snapshot, ground_id, sat_coord)


def fly_packet(snapshot, plan: RelayPlan, keys: KeyTable, probes,
               jitter: JitterModel, rng, t_send: float, *,
               risk_set: RiskSet, attack: AttackSpec | None = None,
               alpha_s: float = 0.0, payload_len: int = 256,
               freshness_us: int = 2_000_000) -> FlightResult:
    """Send one packet along the plan and verify it end to end.

    `probes` is the per-segment list of ProbeRecords currently held by
    the relays/destination for this flow.
    """
    sat_s, sat_d = plan.sat_s, plan.sat_d
    access_up = _access_delay(snapshot, plan.src, sat_s)
    access_down = _access_delay(snapshot, plan.dst, sat_d)
    packet = src_prepare(payload_len, plan, keys, t_send, access_up, alpha_s)

    itinerary = list(plan.path.nodes)
    relay_slot = {r: i + 1 for i, r in enumerate(plan.relays)}
    skip_relays: set = set()
    mutate_after: dict[int, list] = {}

    if attack is not None:
        itinerary, skip_relays, mutate_after = _apply_attack(
            attack, snapshot, plan, risk_set, itinerary)

    clock = t_send + access_up + alpha_s
    trace = [itinerary[0]]
    processed: set = set()
    for pos in range(1, len(itinerary)):
        a, b = itinerary[pos - 1], itinerary[pos]
        clock += _edge_delay(snapshot, a, b) + jitter.sample(rng)
        trace.append(b)
        for fn in mutate_after.get(pos, ()):
            packet = fn(packet)
        if b in relay_slot and b not in skip_relays and b not in processed:
            processed.add(b)
            i = relay_slot[b]
            state = RelayState(
                coord=b,
                key=keys.node_key(b),
                chain_index=i,
                delta_us=seconds_to_us(plan.thresholds[i - 1]),
                probe_dt_us=probes[i - 1].dt_us,
            )
            forward, packet, reason = relay_process(packet, state, clock)
            if not forward:
                risky = _trace_risky(trace, risk_set)
                return FlightResult(False, None, reason, b, tuple(trace),
                                    risky, None, None)

    # Destination satellite stamps arrival, then the ground host verifies.
    last_delta = seconds_to_us(plan.thresholds[-1])
    packet = insert_dst_timestamp(packet, sat_d, last_delta, clock)
    ts_d_us = wrap_us(seconds_to_us(clock))
    clock += access_down
    ctx = DstContext(
        src=plan.src, dst=plan.dst, keys=keys,
        expected_relays=plan.relays,
        expected_thresholds_us=tuple(seconds_to_us(d) for d in plan.thresholds),
        last_probe_dt_us=probes[-1].dt_us,
        now_us=wrap_us(seconds_to_us(clock)),
        freshness_us=freshness_us,
    )
    verdict = dst_verify(packet, ctx, ts_d_us)
    risky = _trace_risky(trace, risk_set)
    return FlightResult(True, verdict, None, None, tuple(trace), risky,
                        clock - t_send, packet)


def _trace_risky(trace, risk_set: RiskSet) -> bool:
    rs = risk_set.all_sats
    return any(node in rs for node in trace if isinstance(node, SatCoord))


def _apply_attack(attack: AttackSpec, snapshot, plan, risk_set, itinerary):
    """Translate an attack spec into itinerary edits and packet
    mutators keyed by itinerary position."""
    skip: set = set()
    mutate: dict[int, list] = {}
    kind = attack.kind

    if kind is AttackKind.HijackDetour:
        detour = plan_hijack_detour(snapshot, plan, risk_set, attack.target)
        at = itinerary.index(detour.at_node)
        itinerary = itinerary[:at + 1] + list(detour.via[1:]) + itinerary[at + 1:]
    elif kind is AttackKind.RelaySkip:
        if not plan.relays:
            raise InfeasibleAttack("no relay to skip")
        idx = attack.target if attack.target is not None else 0
        skip.add(plan.relays[idx % len(plan.relays)])
    elif kind is AttackKind.PathFieldModify:
        mutate.setdefault(1, []).append(modify_path_field)
    elif kind is AttackKind.PayloadTamper:
        mutate.setdefault(1, []).append(tamper_payload)
    elif kind is AttackKind.TimestampForge:
        if not plan.relays:
            raise InfeasibleAttack("no relay block to forge")
        pos = itinerary.index(plan.relays[0]) + 1
        if pos >= len(itinerary):
            pos = len(itinerary) - 1
        mutate.setdefault(pos, []).append(
            lambda p: forge_timestamp(p, 0, p.header.auth[0].ts_us + 123456))
    elif kind is AttackKind.MacForge:
        if not plan.relays:
            raise InfeasibleAttack("no relay block to forge")
        pos = itinerary.index(plan.relays[0]) + 1
        if pos >= len(itinerary):
            pos = len(itinerary) - 1
        mutate.setdefault(pos, []).append(lambda p: forge_mac(p, 0))
    elif kind is AttackKind.Replay:
        raise InfeasibleAttack("replay is orchestrated by the scenario runner")
    else:
        raise ValueError(f"unhandled attack kind {kind}")
    return itinerary, skip, mutate
