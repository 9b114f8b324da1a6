"""Geographic risk areas, per-slot risk satellite sets, and the
low-risk plane frames that fence them.

Containment uses a gnomonic projection centered on each sub-satellite
point, so polygon edges are true great-circle arcs. Frames are wrapped
index intervals on the (p, n) lattice expanded by a hop margin.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .constellation import SatCoord
from .topology import Snapshot


class RiskTooLarge(Exception):
    """Expanding the risk hull by the hop margin covers a full index ring."""


@dataclass(frozen=True)
class RiskArea:
    name: str
    vertices: tuple  # ((lat_deg, lon_deg), ...)

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if _self_intersects(self.vertices):
            raise ValueError(f"polygon {self.name} self-intersects")


def _unwrap_lons(vertices):
    """Longitudes made continuous relative to the first vertex."""
    lon0 = vertices[0][1]
    out = []
    for lat, lon in vertices:
        d = (lon - lon0 + 180.0) % 360.0 - 180.0
        out.append((lat, lon0 + d))
    return out


def _segments_cross(p1, p2, p3, p4):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 != o2 and o3 != o4


def _self_intersects(vertices):
    pts = _unwrap_lons(vertices)
    k = len(pts)
    for i in range(k):
        a1, a2 = pts[i], pts[(i + 1) % k]
        for j in range(i + 1, k):
            if j == i or (j + 1) % k == i or j == (i + 1) % k:
                continue
            if _segments_cross(a1, a2, pts[j], pts[(j + 1) % k]):
                return True
    return False


def _unit_vectors(lat_deg, lon_deg):
    lat = np.radians(np.asarray(lat_deg, float))
    lon = np.radians(np.asarray(lon_deg, float))
    return np.stack(
        [np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)],
        axis=-1)


def points_in_area(lat_deg, lon_deg, area: RiskArea) -> np.ndarray:
    """Vectorized spherical point-in-polygon (great-circle edges).

    Each test point becomes the origin of its own gnomonic projection;
    great circles map to straight lines there, so a planar even-odd ray
    cast decides containment exactly for polygons within the local
    hemisphere.
    """
    pts = _unit_vectors(lat_deg, lon_deg)          # (N, 3)
    verts = _unit_vectors([v[0] for v in area.vertices],
                          [v[1] for v in area.vertices])  # (K, 3)

    # Local east/north basis per test point (poles get a fallback east).
    z = np.array([0.0, 0.0, 1.0])
    east = np.cross(z, pts)
    norm = np.linalg.norm(east, axis=1, keepdims=True)
    polar = norm[:, 0] < 1e-12
    east[polar] = np.array([1.0, 0.0, 0.0])
    norm[polar] = 1.0
    east /= norm
    north = np.cross(pts, east)

    dot_t = verts @ pts.T                          # (K, N)
    front = dot_t > 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        px = (verts @ east.T) / dot_t
        py = (verts @ north.T) / dot_t

    # Even-odd crossings of the +x ray from the origin.
    x1, y1 = px, py
    x2, y2 = np.roll(px, -1, axis=0), np.roll(py, -1, axis=0)
    straddle = (y1 > 0) != (y2 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x1 + (0.0 - y1) * (x2 - x1) / (y2 - y1)
    crossing = straddle & (xi > 0)
    inside = (crossing.sum(axis=0) % 2).astype(bool)
    # A vertex behind the tangent plane means the point is nowhere near
    # the (sub-hemisphere) polygon.
    inside &= front.all(axis=0)
    return inside


@dataclass(frozen=True)
class RiskSet:
    """Risk satellites at one slot, partitioned by orbital direction."""

    t: float
    ne: frozenset
    se: frozenset

    @property
    def all_sats(self) -> frozenset:
        return self.ne | self.se

    def __bool__(self):
        return bool(self.ne or self.se)

    def signature(self):
        return (tuple(sorted(self.ne)), tuple(sorted(self.se)))


def risk_satellites(snapshot: Snapshot, area: RiskArea) -> RiskSet:
    """Satellites whose sub-satellite point lies inside the area."""
    block = snapshot.block
    mask = points_in_area(block.lat_deg, block.lon_deg, area)
    ne, se = set(), set()
    for idx in np.where(mask)[0]:
        coord = block.coord_of(int(idx))
        (ne if block.ne_bound[idx] else se).add(coord)
    return RiskSet(snapshot.t, frozenset(ne), frozenset(se))


def _wrapped_between(x, lo, hi, modulus):
    return (x - lo) % modulus <= (hi - lo) % modulus


def _minimal_cover(values, modulus):
    """Smallest wrapped interval [start, end] covering `values`.

    The cover is the ring minus the largest circular gap; ties pick the
    lowest start index. Returns (start, end, covered_count).
    """
    vals = sorted(set(values))
    k = len(vals)
    if k == modulus:
        return vals[0], vals[-1], modulus
    best_gap, best_start_pos = -1, 0
    for i in range(k):
        nxt = vals[(i + 1) % k]
        gap = (nxt - vals[i]) % modulus
        if gap == 0:
            gap = modulus  # single distinct value
        if gap > best_gap or (gap == best_gap and nxt < vals[(best_start_pos) % k]):
            best_gap = gap
            best_start_pos = (i + 1) % k
    start = vals[best_start_pos]
    end = vals[(best_start_pos - 1) % k]
    return start, end, modulus - best_gap + 1


@dataclass(frozen=True)
class DirFrame:
    """Four fence planes for one orbital direction (wrapped intervals)."""

    p_l: int
    p_r: int
    n_b: int
    n_u: int

    def contains(self, coord: SatCoord, p_count: int, h: int) -> bool:
        return (_wrapped_between(coord.p, self.p_l, self.p_r, p_count)
                and _wrapped_between(coord.n, self.n_b, self.n_u, h))

    def interior(self, coord: SatCoord, p_count: int, h: int) -> bool:
        """Strictly inside: off all four fence planes."""
        span_p = (self.p_r - self.p_l) % p_count
        span_n = (self.n_u - self.n_b) % h
        dp = (coord.p - self.p_l) % p_count
        dn = (coord.n - self.n_b) % h
        return 0 < dp < span_p and 0 < dn < span_n


@dataclass(frozen=True)
class Nlrp:
    """Nearest low-risk planes: one fence frame per orbital direction."""

    theta: int
    p_count: int
    h: int
    ne: DirFrame | None
    se: DirFrame | None

    def frame(self, ne_bound: bool) -> DirFrame | None:
        return self.ne if ne_bound else self.se

    def contains(self, coord: SatCoord) -> bool:
        return any(f.contains(coord, self.p_count, self.h)
                   for f in (self.ne, self.se) if f is not None)

    def interior(self, coord: SatCoord) -> bool:
        return any(f.interior(coord, self.p_count, self.h)
                   for f in (self.ne, self.se) if f is not None)


def _dir_frame(coords, theta, p_count, h):
    p_start, p_end, p_cov = _minimal_cover([c.p for c in coords], p_count)
    n_start, n_end, n_cov = _minimal_cover([c.n for c in coords], h)
    if p_cov + 2 * theta >= p_count or n_cov + 2 * theta >= h:
        raise RiskTooLarge(
            f"margin {theta} around {len(coords)} risk satellites wraps a full ring")
    return DirFrame(
        p_l=(p_start - theta) % p_count,
        p_r=(p_end + theta) % p_count,
        n_b=(n_start - theta) % h,
        n_u=(n_end + theta) % h,
    )


def compute_nlrp(snapshot: Snapshot, risk_set: RiskSet, theta: int) -> Nlrp:
    """Fence each direction's risk hull with a theta-hop margin."""
    if not risk_set:
        raise ValueError("risk set empty in both directions")
    p_count, h = snapshot.p_count, snapshot.h
    ne = _dir_frame(risk_set.ne, theta, p_count, h) if risk_set.ne else None
    se = _dir_frame(risk_set.se, theta, p_count, h) if risk_set.se else None
    return Nlrp(theta, p_count, h, ne, se)


def load_risk_csv(path) -> RiskArea:
    """Vertex file: first a `name,<value>` row, then `lat,lon` rows."""
    name = None
    verts = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip() == "name":
                name = row[1].strip()
                continue
            verts.append((float(row[0]), float(row[1])))
    if name is None:
        raise ValueError(f"{path}: missing name row")
    return RiskArea(name, tuple(verts))
