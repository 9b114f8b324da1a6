"""Per-slot network snapshots: +Grid ISLs, ground attachment, delays.

A snapshot is an immutable value: satellite lattice states, ground
entities bound to access satellites, and an undirected edge set with
propagation delays (straight-line distance over light speed). Node
indices are satellites in (p, n) order followed by ground entities in
list order.
"""

import csv
import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

import numpy as np

from .constants import LIGHT_SPEED_KM_S
from .constellation import (
    SatCoord,
    ShellConfig,
    StateBlock,
    ground_position_eci,
    propagate_block,
)


class Role(Enum):
    Terminal = "Terminal"
    Station = "Station"


class NoVisibleSatellite(Exception):
    """No satellite clears the elevation mask for a ground entity."""

    def __init__(self, entity_id, min_elevation_deg):
        self.entity_id = entity_id
        super().__init__(
            f"no satellite above {min_elevation_deg} deg elevation for {entity_id}"
        )


@dataclass(frozen=True)
class GroundEntity:
    id: str
    lat_deg: float
    lon_deg: float
    role: Role

    def __post_init__(self):
        if abs(self.lat_deg) > 90.0:
            raise ValueError(f"latitude out of range for {self.id}")
        lon = (self.lon_deg + 180.0) % 360.0 - 180.0
        if lon == -180.0:
            lon = 180.0
        object.__setattr__(self, "lon_deg", lon)


def link_delay(a_position, b_position) -> float:
    """Propagation delay in seconds between two points (km)."""
    a = np.asarray(a_position, dtype=float)
    b = np.asarray(b_position, dtype=float)
    return float(np.linalg.norm(a - b)) / LIGHT_SPEED_KM_S


def grid_hop_distance(a: SatCoord, b: SatCoord, p_count: int, h: int,
                      wrap: bool = True) -> int:
    """Grid-hop (Manhattan) distance on the satellite lattice."""
    dp = abs(a.p - b.p)
    dn = abs(a.n - b.n)
    if wrap:
        dp = min(dp, p_count - dp)
        dn = min(dn, h - dn)
    return dp + dn


def build_grid_isls(block: StateBlock, cross_seam: bool = True):
    """+Grid ISL edge arrays (u, v, delay) for one shell.

    Each satellite links to its in-orbit neighbors (n +/- 1 mod H) and
    its same-index neighbors in the adjacent planes (p +/- 1 mod P).
    """
    p_count, h = block.config.orbit_count, block.config.sats_per_orbit
    n = p_count * h
    idx = np.arange(n)
    p_idx, n_idx = idx // h, idx % h

    us, vs = [], []
    if h > 1:
        nxt = p_idx * h + (n_idx + 1) % h
        keep = idx < nxt if h == 2 else np.ones(n, bool)
        us.append(idx[keep])
        vs.append(nxt[keep])
    if p_count > 1:
        nxt_p = (p_idx + 1) % p_count
        keep = np.ones(n, bool)
        if not cross_seam:
            keep &= p_idx + 1 < p_count
        if p_count == 2:
            keep &= p_idx < nxt_p
        us.append((p_idx * h + n_idx)[keep])
        vs.append((nxt_p * h + n_idx)[keep])
    if not us:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, float)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    d = np.linalg.norm(block.position[u] - block.position[v], axis=1)
    return u.astype(np.int64), v.astype(np.int64), d / LIGHT_SPEED_KM_S


def attach_ground(block: StateBlock, ground, min_elevation_deg: float = 25.0,
                  on_gap: str = "raise"):
    """Bind each ground entity to its nearest visible satellite.

    Returns (access map entity_id -> SatCoord, GSL edge arrays, gaps).
    The nearest satellite with elevation >= mask wins; exact distance
    ties go to the lower (p, n). With on_gap="skip", entities no
    satellite can serve are listed in `gaps` instead of raising.
    """
    access: dict[str, SatCoord] = {}
    us, vs, ds = [], [], []
    gaps: list[str] = []
    min_el = math.radians(min_elevation_deg)
    for k, ent in enumerate(ground):
        g = ground_position_eci(ent.lat_deg, ent.lon_deg, block.t)
        rel = block.position - g
        slant = np.linalg.norm(rel, axis=1)
        zenith = g / np.linalg.norm(g)
        elev = np.arcsin(np.clip(rel @ zenith / slant, -1.0, 1.0))
        visible = elev >= min_el
        if not visible.any():
            if on_gap == "raise":
                raise NoVisibleSatellite(ent.id, min_elevation_deg)
            gaps.append(ent.id)
            continue
        cand = np.where(visible)[0]
        best = cand[np.argmin(slant[cand])]  # first occurrence = lowest (p, n)
        access[ent.id] = block.coord_of(int(best))
        us.append(int(best))
        vs.append(len(block) + k)
        ds.append(float(slant[best]) / LIGHT_SPEED_KM_S)
    return access, (np.array(us, np.int64), np.array(vs, np.int64),
                    np.array(ds, float)), gaps


def _csr_from_edges(n, u, v, w):
    """Symmetric CSR adjacency from undirected edge arrays."""
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    wt = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    src, dst, wt = src[order], dst[order], wt[order]
    indptr = np.zeros(n + 1, np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64), wt.astype(float)


class Snapshot:
    """Immutable time-stamped network graph."""

    __slots__ = ("t", "p_count", "h", "wrap", "block", "ground", "access",
                 "edge_u", "edge_v", "edge_w", "indptr", "indices", "weights",
                 "node_count", "_ground_index")

    def __init__(self, t, p_count, h, wrap, block, ground, access, u, v, w):
        self.t = t
        self.p_count = p_count
        self.h = h
        self.wrap = wrap
        self.block = block
        self.ground = tuple(ground)
        self.access = MappingProxyType(dict(access))
        self.node_count = p_count * h + len(self.ground)
        self.edge_u, self.edge_v, self.edge_w = u, v, w
        self.indptr, self.indices, self.weights = _csr_from_edges(
            self.node_count, u, v, w)
        for arr in (self.edge_u, self.edge_v, self.edge_w,
                    self.indptr, self.indices, self.weights):
            arr.setflags(write=False)
        self._ground_index = {e.id: p_count * h + k
                              for k, e in enumerate(self.ground)}

    @property
    def sat_count(self) -> int:
        return self.p_count * self.h

    def index_of(self, label) -> int:
        if isinstance(label, SatCoord):
            if not (0 <= label.p < self.p_count and 0 <= label.n < self.h):
                raise KeyError(label)
            return label.p * self.h + label.n
        return self._ground_index[label]

    def label_of(self, idx: int):
        if idx < self.sat_count:
            return SatCoord(idx // self.h, idx % self.h)
        return self.ground[idx - self.sat_count].id

    def is_sat(self, idx: int) -> bool:
        return idx < self.sat_count

    def neighbors(self, idx: int):
        lo, hi = self.indptr[idx], self.indptr[idx + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def sat_isl_degree(self, idx: int) -> int:
        nbrs, _ = self.neighbors(idx)
        return int((nbrs < self.sat_count).sum())

    def edge_set(self):
        """Symmetric set of (label, label, delay) triples."""
        out = set()
        for a, b, d in zip(self.edge_u, self.edge_v, self.edge_w):
            la, lb = self.label_of(int(a)), self.label_of(int(b))
            out.add((la, lb, float(d)))
            out.add((lb, la, float(d)))
        return out


def build_snapshot(config: ShellConfig, t: float, ground=(),
                   min_elevation_deg: float = 25.0,
                   cross_seam: bool = True, on_gap: str = "raise"):
    """Propagate the shell and assemble the full per-slot graph.

    Returns the Snapshot; with on_gap="skip" returns (snapshot, gaps)
    where `gaps` lists entities left unattached this slot.
    """
    block = propagate_block(config, t)
    u, v, w = build_grid_isls(block, cross_seam=cross_seam)
    access: dict[str, SatCoord] = {}
    gaps: list[str] = []
    if ground:
        access, (gu, gv, gw), gaps = attach_ground(
            block, ground, min_elevation_deg, on_gap=on_gap)
        u = np.concatenate([u, gu])
        v = np.concatenate([v, gv])
        w = np.concatenate([w, gw])
    snap = Snapshot(t, config.orbit_count, config.sats_per_orbit, True,
                    block, ground, access, u, v, w)
    if on_gap == "skip":
        return snap, gaps
    return snap


def grid_snapshot(p_count: int, h: int, delay: float = 1.0, wrap: bool = True,
                  ne_mask=None, t: float = 0.0) -> Snapshot:
    """Synthetic lattice snapshot with uniform ISL delays (no geometry).

    Used by toy-scale planner and routing tests; `ne_mask` marks which
    satellites count as NE-bound (default: all).
    """
    n = p_count * h
    idx = np.arange(n)
    p_idx, n_idx = idx // h, idx % h
    us, vs = [], []
    if h > 1:
        if wrap:
            nxt = p_idx * h + (n_idx + 1) % h
            keep = idx < nxt if h == 2 else np.ones(n, bool)
        else:
            keep = n_idx + 1 < h
            nxt = p_idx * h + (n_idx + 1)
        us.append(idx[keep])
        vs.append(nxt[keep])
    if p_count > 1:
        if wrap:
            keep = np.ones(n, bool) if p_count > 2 else p_idx == 0
            nxt_p = (p_idx + 1) % p_count
        else:
            keep = p_idx + 1 < p_count
            nxt_p = p_idx + 1
        us.append(idx[keep])
        vs.append((nxt_p * h + n_idx)[keep])
    u = np.concatenate(us).astype(np.int64) if us else np.empty(0, np.int64)
    v = np.concatenate(vs).astype(np.int64) if vs else np.empty(0, np.int64)
    w = np.full(len(u), float(delay))

    block = _synthetic_block(p_count, h, ne_mask, t)
    return Snapshot(t, p_count, h, wrap, block, (), {}, u, v, w)


def _synthetic_block(p_count, h, ne_mask, t):
    n = p_count * h
    cfg = ShellConfig(p_count, h, 53.0, 550.0)
    pos = np.zeros((n, 3))
    lat = np.zeros(n)
    lon = np.zeros(n)
    ne = np.ones(n, bool) if ne_mask is None else np.asarray(ne_mask, bool).copy()
    return StateBlock(cfg, t, pos, lat, lon, ne)


def snapshot_from_edges(n_nodes: int, edges, t: float = 0.0) -> Snapshot:
    """Arbitrary graph as a snapshot (nodes = SatCoord(i, 0)).

    Oracle tests build small random graphs this way.
    """
    u = np.array([e[0] for e in edges], np.int64)
    v = np.array([e[1] for e in edges], np.int64)
    w = np.array([e[2] for e in edges], float)
    block = _synthetic_block(n_nodes, 1, None, t)
    return Snapshot(t, n_nodes, 1, False, block, (), {}, u, v, w)


def load_ground_csv(path) -> list[GroundEntity]:
    """Read `id,lat,lon,role` rows (a header row is skipped)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip() == "id":
                continue
            ident, lat, lon, role = (c.strip() for c in row[:4])
            out.append(GroundEntity(ident, float(lat), float(lon), Role(role)))
    return out


def load_pairs_csv(path) -> list[tuple[str, str]]:
    """Read `src_id,dst_id` rows (a header row is skipped)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip() == "src_id":
                continue
            out.append((row[0].strip(), row[1].strip()))
    return out
