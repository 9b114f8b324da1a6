"""Attack injection: packet and itinerary mutations exercising every
rejection path of the verification pipeline.

Attackers control risk-area satellites only and hold no session keys;
each attack transforms either the forwarding itinerary (hijack, skip)
or the in-flight packet bytes (field/timestamp/MAC forgery, payload
tampering). Replays re-emit captured packets at a later slot.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

from .constellation import SatCoord
from .routing import distances_from, distances_to_set, shortest_path
from .veriproto.codec import AuthBlock, wrap_us
from .veriproto.protocol import Packet


class AttackKind(Enum):
    HijackDetour = "hijack-detour"
    PathFieldModify = "path-field-modify"
    RelaySkip = "relay-skip"
    TimestampForge = "timestamp-forge"
    MacForge = "mac-forge"
    Replay = "replay"
    PayloadTamper = "payload-tamper"


class InfeasibleAttack(Exception):
    pass


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind
    target: int | None = None        # segment index; None = attacker's pick
    slot_lo: int = 0
    slot_hi: int = 2 ** 31

    def active(self, slot: int) -> bool:
        return self.slot_lo <= slot <= self.slot_hi


@dataclass(frozen=True)
class Detour:
    """An out-and-back excursion from an on-path node to a risk node."""

    segment: int
    at_node: SatCoord
    via: tuple           # nodes of the excursion, at_node .. risk .. at_node
    extra_delay: float   # propagation only


def plan_hijack_detour(snapshot, plan, risk_set, segment: int | None = None) -> Detour:
    """Shortest in-and-out detour into the risk set.

    Picks the (on-path node, risk satellite) pair with minimal
    round-trip delay — the hardest detour to detect — restricted to the
    targeted segment when one is given.
    """
    if not risk_set:
        raise InfeasibleAttack("no risk satellites to detour through")
    segments = (plan.segments if segment is None
                else plan.segments[segment:segment + 1])
    if not segments:
        raise InfeasibleAttack(f"plan has no segment {segment}")
    best = None  # (delay, seg_idx, node)
    base = 0 if segment is None else segment
    rs_dist = distances_to_set(snapshot, sorted(risk_set.all_sats))
    for k, seg in enumerate(segments):
        for node in seg.nodes:
            if not isinstance(node, SatCoord):
                continue
            d = rs_dist[snapshot.index_of(node)]
            if best is None or d < best[0]:
                best = (d, base + k, node)
    if best is None or math.isinf(best[0]):
        raise InfeasibleAttack("risk satellites unreachable from the segment")
    _, seg_idx, node = best
    # Nearest risk satellite from the chosen node, lowest coord on ties.
    dn = distances_from(snapshot, node)
    target = min(risk_set.all_sats,
                 key=lambda c: (dn[snapshot.index_of(c)], c))
    leg = shortest_path(snapshot, node, target)
    via = leg.nodes + tuple(reversed(leg.nodes[:-1]))
    return Detour(seg_idx, node, via, 2.0 * leg.total_delay)


def tamper_payload(packet: Packet) -> Packet:
    flipped = bytes([packet.payload[0] ^ 0xFF]) + packet.payload[1:]
    return Packet(flipped, packet.header)


def modify_path_field(packet: Packet) -> Packet:
    """Counterfeit the recorded path (swap two hops, or rewrite one)."""
    path = list(packet.header.path)
    if len(path) >= 2:
        path[0], path[1] = path[1], path[0]
    else:
        path[0] = SatCoord((path[0].p + 1) % 256, path[0].n)
    header = replace(packet.header, path=tuple(path))
    return Packet(packet.payload, header)


def forge_timestamp(packet: Packet, block_index: int, new_ts_us: int) -> Packet:
    block = packet.header.auth[block_index]
    forged = AuthBlock(block.relay, block.delta_us, wrap_us(new_ts_us),
                       block.mac)
    return Packet(packet.payload,
                  packet.header.with_auth(block_index, forged))


def forge_mac(packet: Packet, block_index: int) -> Packet:
    block = packet.header.auth[block_index]
    fake = bytes(b ^ 0xA5 for b in block.mac)
    forged = AuthBlock(block.relay, block.delta_us, block.ts_us, fake)
    return Packet(packet.payload,
                  packet.header.with_auth(block_index, forged))
