"""Verification protocol steps: source preparation, relay-side segment
checks, destination verification, and segment probing.

Keys are pre-provisioned session keys (key establishment is outside the
simulation): one key per (src, dst) pair doubling as the source tag key,
and one per relay shared with the destination.
"""

import hashlib
import hmac
import math
import struct
from dataclasses import dataclass, field, replace
from enum import Enum

from ..constellation import SatCoord
from ..routing import Path
from .codec import (
    AuthBlock,
    VeriHeader,
    elapsed_us,
    pack_relay_id,
    path_bytes,
    seconds_to_us,
    wrap_us,
    US_MAX,
)

DEFAULT_FRESHNESS_US = 2_000_000  # 2 s


class PlanExpired(Exception):
    pass


class Reason(Enum):
    SourceAuthFail = "source-auth-fail"
    HashMismatch = "hash-mismatch"
    MacChainFail = "mac-chain-fail"
    MissingRelayUpdate = "missing-relay-update"
    SegmentDelayExceeded = "segment-delay-exceeded"
    StaleTimestamp = "stale-timestamp"


@dataclass(frozen=True)
class Verdict:
    accept: bool
    reason: Reason | None = None
    segment: int | None = None

    @classmethod
    def ok(cls):
        return cls(True)

    @classmethod
    def reject(cls, reason, segment=None):
        return cls(False, reason, segment)


@dataclass(frozen=True)
class Packet:
    payload: bytes
    header: VeriHeader

    def encode(self) -> bytes:
        return self.header.encode() + self.payload


@dataclass(frozen=True)
class KeyTable:
    pair_keys: dict  # (src_id, dst_id) -> bytes
    node_keys: dict  # SatCoord -> bytes

    @classmethod
    def derive(cls, seed: int, pairs, nodes) -> "KeyTable":
        """Deterministic provisioning from a scenario seed."""
        master = struct.pack(">Q", seed & (2 ** 64 - 1))

        def kdf(tag: str) -> bytes:
            return hmac.new(master, tag.encode(), hashlib.sha256).digest()

        return cls(
            pair_keys={(s, d): kdf(f"pair:{s}:{d}") for s, d in pairs},
            node_keys={c: kdf(f"node:{c.p}:{c.n}") for c in nodes},
        )

    def pair_key(self, src, dst):
        return self.pair_keys.get((src, dst))

    def node_key(self, coord):
        return self.node_keys.get(coord)


def make_payload(length: int) -> bytes:
    """Deterministic filler payload."""
    return bytes((7 + 31 * i) % 256 for i in range(length))


def compute_hash(pair_key: bytes, payload: bytes, path, thresholds_us,
                 ts0_us: int, relays) -> bytes:
    """Truncated keyed digest binding payload, path, thresholds,
    timestamp, and relay sequence."""
    msg = [payload, path_bytes(path)]
    for d in thresholds_us:
        msg.append(struct.pack(">I", d))
    msg.append(struct.pack(">I", wrap_us(ts0_us)))
    for r in relays:
        msg.append(pack_relay_id(r))
    return hmac.new(pair_key, b"".join(msg), hashlib.sha256).digest()[:4]


def compute_mac(node_key: bytes, hash4: bytes, ts_us: int,
                relay: SatCoord) -> bytes:
    msg = hash4 + struct.pack(">I", wrap_us(ts_us)) + pack_relay_id(relay)
    return hmac.new(node_key, msg, hashlib.sha256).digest()[:4]


def src_prepare(payload_len: int, plan, keys: KeyTable, clock_s: float,
                access_delay_s: float, alpha_s: float = 0.0,
                valid_until_s: float | None = None) -> Packet:
    """Build the outgoing packet: corrected timestamp, source tag, path
    field, and a zeroed auth chain."""
    if valid_until_s is not None and clock_s > valid_until_s:
        raise PlanExpired(f"plan for t={plan.t} expired at {valid_until_s}")
    pair_key = keys.pair_key(plan.src, plan.dst)
    if pair_key is None:
        raise KeyError(f"no session key for ({plan.src}, {plan.dst})")
    ts0 = wrap_us(seconds_to_us(clock_s) + seconds_to_us(access_delay_s)
                  + seconds_to_us(alpha_s))
    thresholds_us = tuple(seconds_to_us(d) for d in plan.thresholds)
    payload = make_payload(payload_len)
    hash4 = compute_hash(pair_key, payload, plan.path.nodes, thresholds_us,
                         ts0, plan.relays)
    auth = tuple(AuthBlock.zero() for _ in range(plan.relay_count + 1))
    header = VeriHeader(ts0, hash4, plan.path.nodes, auth)
    return Packet(payload, header)


@dataclass(frozen=True)
class RelayState:
    """What one relay knows: its chain slot, key, and segment bounds."""

    coord: SatCoord
    key: bytes
    chain_index: int      # 1-based position in the relay sequence
    delta_us: int         # detour threshold of its incoming segment
    probe_dt_us: int      # latest probed segment delay


def relay_process(packet: Packet, relay_state: RelayState, now_s: float):
    """Segment check at a relay.

    Returns (forward: bool, packet, reason). On success the relay's
    auth block is filled in and the packet moves on; on failure the
    packet is dropped with the reason recorded.
    """
    header = packet.header
    i = relay_state.chain_index
    if i == 1:
        prev_ts = header.ts0_us
    else:
        prev_block = header.auth[i - 2]
        if prev_block.is_zero:
            return False, packet, Reason.MissingRelayUpdate
        prev_ts = prev_block.ts_us
    now_us = wrap_us(seconds_to_us(now_s))
    bound = min(relay_state.delta_us + relay_state.probe_dt_us, US_MAX)
    if elapsed_us(now_us, prev_ts) > bound:
        return False, packet, Reason.SegmentDelayExceeded
    mac = compute_mac(relay_state.key, header.hash4, now_us, relay_state.coord)
    block = AuthBlock(relay_state.coord, relay_state.delta_us, now_us, mac)
    return True, Packet(packet.payload, header.with_auth(i - 1, block)), None


def insert_dst_timestamp(packet: Packet, sat_d: SatCoord, delta_us: int,
                         now_s: float) -> Packet:
    """Destination satellite stamps its arrival time in the last slot."""
    ts = wrap_us(seconds_to_us(now_s))
    block = AuthBlock(sat_d, delta_us, ts, b"\x00" * 4)
    header = packet.header.with_auth(packet.header.relay_count, block)
    return Packet(packet.payload, header)


@dataclass(frozen=True)
class DstContext:
    """Everything the destination holds out-of-band for one flow."""

    src: str
    dst: str
    keys: KeyTable
    expected_relays: tuple
    expected_thresholds_us: tuple  # one per segment
    last_probe_dt_us: int
    now_us: int
    freshness_us: int = DEFAULT_FRESHNESS_US


def dst_verify(packet: Packet, ctx: DstContext,
               ts_d_us: int | None = None) -> Verdict:
    """Final verification: source tag, digest, MAC chain, last segment."""
    header = packet.header

    pair_key = ctx.keys.pair_key(ctx.src, ctx.dst)
    if pair_key is None:
        return Verdict.reject(Reason.SourceAuthFail)

    expected = compute_hash(pair_key, packet.payload, header.path,
                            ctx.expected_thresholds_us, header.ts0_us,
                            ctx.expected_relays)
    if not hmac.compare_digest(expected, header.hash4):
        return Verdict.reject(Reason.HashMismatch)

    age = elapsed_us(ctx.now_us, header.ts0_us)
    if age > ctx.freshness_us:
        return Verdict.reject(Reason.StaleTimestamp)

    if header.relay_count != len(ctx.expected_relays):
        return Verdict.reject(Reason.MacChainFail)
    for i, relay in enumerate(ctx.expected_relays):
        block = header.auth[i]
        if block.is_zero:
            return Verdict.reject(Reason.MissingRelayUpdate, segment=i)
        key = ctx.keys.node_key(relay)
        if key is None:
            return Verdict.reject(Reason.MacChainFail, segment=i)
        mac = compute_mac(key, header.hash4, block.ts_us, relay)
        if block.relay != relay or not hmac.compare_digest(mac, block.mac):
            return Verdict.reject(Reason.MacChainFail, segment=i)

    last = header.auth[header.relay_count]
    ts_d = last.ts_us if ts_d_us is None else wrap_us(ts_d_us)
    if last.is_zero and ts_d_us is None:
        return Verdict.reject(Reason.MissingRelayUpdate,
                              segment=header.relay_count)
    prev_ts = (header.auth[header.relay_count - 1].ts_us
               if header.relay_count else header.ts0_us)
    delta = ctx.expected_thresholds_us[-1]
    bound = min(delta + ctx.last_probe_dt_us, US_MAX)
    if elapsed_us(ts_d, prev_ts) > bound:
        return Verdict.reject(Reason.SegmentDelayExceeded,
                              segment=header.relay_count)
    return Verdict.ok()


@dataclass(frozen=True)
class ProbeRecord:
    segment: tuple        # (from_label, to_label)
    dt: float             # seconds, propagation + per-hop processing
    measured_at: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("probed delay must be positive")

    @property
    def dt_us(self) -> int:
        return seconds_to_us(self.dt)


@dataclass(frozen=True)
class JitterModel:
    """Per-hop processing/jitter draw, seconds."""

    kind: str = "none"            # none | fixed | uniform | lognormal
    per_hop_s: float = 0.0        # fixed
    low_s: float = 0.0            # uniform
    high_s: float = 0.0
    mu: float = -9.0              # lognormal of exp(mu + sigma*Z)
    sigma: float = 0.5

    def sample(self, rng) -> float:
        if self.kind == "none":
            return 0.0
        if self.kind == "fixed":
            return self.per_hop_s
        if self.kind == "uniform":
            return rng.uniform(self.low_s, self.high_s)
        if self.kind == "lognormal":
            return math.exp(rng.gauss(self.mu, self.sigma))
        raise ValueError(f"unknown jitter kind {self.kind}")


def probe_segment(snapshot, segment_nodes, jitter_model: JitterModel,
                  rng) -> ProbeRecord:
    """Measure one segment along its planned node sequence: propagation
    plus one processing draw per hop."""
    from ..routing import path_delay

    nodes = tuple(segment_nodes)
    dt = path_delay(snapshot, nodes)
    for _ in range(len(nodes) - 1):
        dt += jitter_model.sample(rng)
    return ProbeRecord((nodes[0], nodes[-1]), dt, snapshot.t)
