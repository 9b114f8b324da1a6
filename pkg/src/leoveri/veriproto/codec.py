"""Byte-exact wire codec for the verification header.

Layout (big-endian throughout):

    offset  size  field
    0       4     ts0: corrected sending timestamp, microseconds mod 2^32
    4       4     hash: truncated keyed digest (source tag)
    8       1     relay_count
    9       1     path length L (number of satellite hops recorded)
    10      2*L   path: per node, packed (p: 1 byte, n: 1 byte)
    ...     16*(relay_count+1)  auth chain

Each 16-byte auth block:

    0       4     relay id, packed (p: 2 bytes, n: 2 bytes)
    4       4     segment detour threshold, microseconds (saturating)
    8       4     egress timestamp, microseconds mod 2^32
    12      4     truncated MAC

The final block is the destination-satellite timestamp slot (MAC zero).
A block of sixteen zero bytes means "not yet updated".
"""

import struct
from dataclasses import dataclass, replace

from ..constellation import SatCoord

TS_MOD = 2 ** 32
US_MAX = TS_MOD - 1
AUTH_BLOCK_LEN = 16
ZERO_MAC = b"\x00" * 4


class CodecError(ValueError):
    pass


def seconds_to_us(seconds: float) -> int:
    """Truncate to whole microseconds, saturating at the field maximum
    (the saturated value doubles as the +inf threshold sentinel)."""
    if seconds == float("inf"):
        return US_MAX
    return min(int(seconds * 1e6), US_MAX)


def wrap_us(value: int) -> int:
    return value % TS_MOD


def elapsed_us(later: int, earlier: int) -> int:
    """Wrap-aware difference (later - earlier) mod 2^32."""
    return (later - earlier) % TS_MOD


def pack_relay_id(coord: SatCoord) -> bytes:
    return struct.pack(">HH", coord.p, coord.n)


def unpack_relay_id(raw: bytes) -> SatCoord:
    p, n = struct.unpack(">HH", raw)
    return SatCoord(p, n)


@dataclass(frozen=True)
class AuthBlock:
    relay: SatCoord
    delta_us: int
    ts_us: int
    mac: bytes

    def __post_init__(self):
        if len(self.mac) != 4:
            raise CodecError("mac must be 4 bytes")

    @classmethod
    def zero(cls) -> "AuthBlock":
        return cls(SatCoord(0, 0), 0, 0, ZERO_MAC)

    @property
    def is_zero(self) -> bool:
        return self.encode() == b"\x00" * AUTH_BLOCK_LEN

    def encode(self) -> bytes:
        return (pack_relay_id(self.relay)
                + struct.pack(">II", self.delta_us, self.ts_us)
                + self.mac)

    @classmethod
    def decode(cls, raw: bytes) -> "AuthBlock":
        if len(raw) != AUTH_BLOCK_LEN:
            raise CodecError("auth block must be 16 bytes")
        relay = unpack_relay_id(raw[0:4])
        delta, ts = struct.unpack(">II", raw[4:12])
        return cls(relay, delta, ts, raw[12:16])


@dataclass(frozen=True)
class VeriHeader:
    ts0_us: int
    hash4: bytes
    path: tuple  # SatCoord sequence, sat_s .. sat_d
    auth: tuple  # relay_count + 1 AuthBlocks

    def __post_init__(self):
        if len(self.hash4) != 4:
            raise CodecError("hash must be 4 bytes")
        if not self.auth:
            raise CodecError("auth chain needs at least the dst slot")
        if len(self.path) > 255:
            raise CodecError("path too long to encode")

    @property
    def relay_count(self) -> int:
        return len(self.auth) - 1

    @property
    def auth_section_len(self) -> int:
        return AUTH_BLOCK_LEN * len(self.auth)

    def with_auth(self, index: int, block: AuthBlock) -> "VeriHeader":
        chain = list(self.auth)
        chain[index] = block
        return replace(self, auth=tuple(chain))

    def encode(self) -> bytes:
        out = [struct.pack(">I", wrap_us(self.ts0_us)), self.hash4,
               struct.pack(">BB", self.relay_count, len(self.path))]
        for node in self.path:
            if not (0 <= node.p <= 255 and 0 <= node.n <= 255):
                raise CodecError(f"path node {node} exceeds 1-byte packing")
            out.append(struct.pack(">BB", node.p, node.n))
        for block in self.auth:
            out.append(block.encode())
        return b"".join(out)

    @classmethod
    def decode(cls, raw: bytes) -> "VeriHeader":
        if len(raw) < 10:
            raise CodecError("truncated header")
        ts0, = struct.unpack(">I", raw[0:4])
        hash4 = raw[4:8]
        relay_count, path_len = struct.unpack(">BB", raw[8:10])
        need = 10 + 2 * path_len + AUTH_BLOCK_LEN * (relay_count + 1)
        if len(raw) != need:
            raise CodecError(f"header length {len(raw)} != expected {need}")
        path = []
        off = 10
        for _ in range(path_len):
            p, n = struct.unpack(">BB", raw[off:off + 2])
            path.append(SatCoord(p, n))
            off += 2
        auth = []
        for _ in range(relay_count + 1):
            auth.append(AuthBlock.decode(raw[off:off + AUTH_BLOCK_LEN]))
            off += AUTH_BLOCK_LEN
        return cls(ts0, hash4, tuple(path), tuple(auth))


def path_bytes(path) -> bytes:
    """Wire encoding of the path field (length prefix + packed nodes)."""
    out = [struct.pack(">B", len(path))]
    for node in path:
        out.append(struct.pack(">BB", node.p, node.n))
    return b"".join(out)
