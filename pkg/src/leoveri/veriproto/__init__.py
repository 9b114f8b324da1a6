"""Relay-anchored path verification protocol: wire codec and the
source / relay / destination processing steps."""

from .codec import (
    AUTH_BLOCK_LEN,
    AuthBlock,
    CodecError,
    TS_MOD,
    US_MAX,
    VeriHeader,
    elapsed_us,
    pack_relay_id,
    path_bytes,
    seconds_to_us,
    unpack_relay_id,
    wrap_us,
)
from .protocol import (
    DEFAULT_FRESHNESS_US,
    DstContext,
    JitterModel,
    KeyTable,
    Packet,
    PlanExpired,
    ProbeRecord,
    Reason,
    RelayState,
    Verdict,
    compute_hash,
    compute_mac,
    dst_verify,
    insert_dst_timestamp,
    make_payload,
    probe_segment,
    relay_process,
    src_prepare,
)

__all__ = [
    "AUTH_BLOCK_LEN", "AuthBlock", "CodecError", "TS_MOD", "US_MAX",
    "VeriHeader", "elapsed_us", "pack_relay_id", "path_bytes",
    "seconds_to_us", "unpack_relay_id", "wrap_us",
    "DEFAULT_FRESHNESS_US", "DstContext", "JitterModel", "KeyTable",
    "Packet", "PlanExpired", "ProbeRecord", "Reason", "RelayState",
    "Verdict", "compute_hash", "compute_mac", "dst_verify",
    "insert_dst_timestamp", "make_payload", "probe_segment",
    "relay_process", "src_prepare",
]
