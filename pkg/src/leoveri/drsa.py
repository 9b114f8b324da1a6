"""Relay planning: overlap classification, corner-relay selection,
detour thresholds, and planned-path assembly.

Planning works on the logical (p, n) lattice: the rectangle spanned by
the two access satellites is classified against the low-risk fence
frame, and relays are drawn from frame corners (or fence-border corner
pairs when the fence blocks every corner corridor). Every emitted plan
is validated against the full constraint suite — relay order, hop
margin to risk satellites, per-segment connectivity, equal-cost risk
disjointness, and the relay budget — before it leaves this module.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .constellation import SatCoord
from .riskmap import DirFrame, Nlrp, RiskSet, _minimal_cover, _wrapped_between
from .routing import Path, Unreachable, _sssp
from .topology import Snapshot, grid_hop_distance
from . import kernels


class PlanInfeasible(Exception):
    """No candidate relay set satisfies the planning constraints."""


class ZeroThreshold(Exception):
    """A planned segment node is itself a risk satellite."""


class OverlapClass(Enum):
    Disjoint = "disjoint"
    SemiOverlap = "semi-overlap"
    FullOverlap = "fully-overlap"
    Invalid = "invalid"


@dataclass(frozen=True)
class Frame:
    """Lattice rectangle spanned by the two access satellites."""

    s: SatCoord
    d: SatCoord
    p_count: int
    h: int

    @property
    def p_interval(self):
        lo, hi, _ = _minimal_cover([self.s.p, self.d.p], self.p_count)
        return lo, hi

    @property
    def n_interval(self):
        lo, hi, _ = _minimal_cover([self.s.n, self.d.n], self.h)
        return lo, hi

    @property
    def degenerate(self) -> bool:
        return self.s.p == self.d.p or self.s.n == self.d.n

    def corners(self):
        return SatCoord(self.s.p, self.d.n), SatCoord(self.d.p, self.s.n)


@dataclass(frozen=True)
class RelayPlan:
    """Relay sequence, per-segment detour thresholds, and planned path."""

    t: float
    src: str
    dst: str
    sat_s: SatCoord
    sat_d: SatCoord
    relays: tuple
    thresholds: tuple  # seconds, one per segment
    path: Path         # sat_s .. sat_d
    segments: tuple    # per-segment Paths

    @property
    def key_nodes(self):
        return (self.sat_s, *self.relays, self.sat_d)

    @property
    def relay_count(self) -> int:
        return len(self.relays)


def mirror_coord(coord: SatCoord, h: int) -> SatCoord:
    return SatCoord(coord.p, (h - coord.n) % h)


def mirror_frame(frame: DirFrame, h: int) -> DirFrame:
    return DirFrame(
        p_l=frame.p_l,
        p_r=frame.p_r,
        n_b=(h - frame.n_u) % h,
        n_u=(h - frame.n_b) % h,
    )


def transform_opposite_direction(sat_s_state, sat_d_state, nlrp: Nlrp):
    """Reflect an opposite-direction endpoint (and its fence sub-frame)
    into the reference endpoint's lattice plane.

    Returns (s_coord, aligned_d_coord, aligned_frames) where the frames
    are the fence rectangles relevant in the shared lattice.
    """
    s, d = sat_s_state.coord, sat_d_state.coord
    same = sat_s_state.direction == sat_d_state.direction
    s_ne = sat_s_state.direction.name == "NEBound"
    if same:
        frames = tuple(f for f in (nlrp.frame(s_ne),) if f is not None)
        return s, d, frames
    own = nlrp.frame(s_ne)
    other = nlrp.frame(not s_ne)
    frames = tuple(
        f for f in (own, mirror_frame(other, nlrp.h) if other else None)
        if f is not None)
    return s, mirror_coord(d, nlrp.h), frames


def _interval_indices(lo, hi, modulus):
    span = (hi - lo) % modulus
    return [(lo + k) % modulus for k in range(span + 1)]


def _bounding_frame(frames, p_count, h) -> DirFrame | None:
    """Minimal wrapped rectangle covering every given frame."""
    if not frames:
        return None
    ps, ns = [], []
    for f in frames:
        ps.extend(_interval_indices(f.p_l, f.p_r, p_count))
        ns.extend(_interval_indices(f.n_b, f.n_u, h))
    p_lo, p_hi, p_cov = _minimal_cover(ps, p_count)
    n_lo, n_hi, n_cov = _minimal_cover(ns, h)
    if p_cov >= p_count or n_cov >= h:
        return None  # fence fills a ring; nothing can be classified against it
    return DirFrame(p_lo, p_hi, n_lo, n_hi)


def _intervals_intersect(a, b, modulus):
    (a1, a2), (b1, b2) = a, b
    return (_wrapped_between(b1, a1, a2, modulus)
            or _wrapped_between(a1, b1, b2, modulus))


def _corridor_cells(frame: Frame, corner: SatCoord):
    """Cells of the L-shaped corridor through one frame corner."""
    cells = set()
    p_lo, p_hi = frame.p_interval
    n_lo, n_hi = frame.n_interval
    for n in _interval_indices(n_lo, n_hi, frame.h):
        cells.add(SatCoord(corner.p, n))
    for p in _interval_indices(p_lo, p_hi, frame.p_count):
        cells.add(SatCoord(p, corner.n))
    return cells


def classify_overlap(frame: Frame, nlrp_rect: DirFrame | None) -> OverlapClass:
    """Relationship between the endpoint rectangle and the fence frame."""
    p_count, h = frame.p_count, frame.h
    if nlrp_rect is None:
        return OverlapClass.Disjoint
    for endpoint in (frame.s, frame.d):
        if nlrp_rect.interior(endpoint, p_count, h):
            return OverlapClass.Invalid
    rect_p = (nlrp_rect.p_l, nlrp_rect.p_r)
    rect_n = (nlrp_rect.n_b, nlrp_rect.n_u)
    if not (_intervals_intersect(frame.p_interval, rect_p, p_count)
            and _intervals_intersect(frame.n_interval, rect_n, h)):
        return OverlapClass.Disjoint
    for corner in frame.corners():
        cells = _corridor_cells(frame, corner)
        if not any(nlrp_rect.interior(c, p_count, h) for c in cells):
            return OverlapClass.SemiOverlap
    return OverlapClass.FullOverlap


def _dist_to_rect(coord: SatCoord, rect: DirFrame | None, p_count, h) -> int:
    if rect is None:
        return 0
    dp = min((coord.p - rect.p_l) % p_count, (rect.p_l - coord.p) % p_count,
             (coord.p - rect.p_r) % p_count, (rect.p_r - coord.p) % p_count)
    dn = min((coord.n - rect.n_b) % h, (rect.n_b - coord.n) % h,
             (coord.n - rect.n_u) % h, (rect.n_u - coord.n) % h)
    return min(dp, dn)


def _candidate_relay_lists(frame: Frame, rect: DirFrame | None):
    """Ordered candidate relay lists for one working rectangle.

    Returns (overlap_class, candidates); in the fully-overlapped case
    all candidates are meant to be compared by delay, otherwise the
    first valid one wins.
    """
    cls = classify_overlap(frame, rect)
    p_count, h = frame.p_count, frame.h
    s, d = frame.s, frame.d

    def clean(relays):
        out = []
        for r in relays:
            if r in (s, d) or r in out:
                continue
            out.append(r)
        return out

    if cls is OverlapClass.Invalid:
        return cls, []
    if cls is OverlapClass.Disjoint:
        if frame.degenerate:
            return cls, [[]]
        c1, c2 = frame.corners()
        d1 = _dist_to_rect(c1, rect, p_count, h)
        d2 = _dist_to_rect(c2, rect, p_count, h)
        ordered = [c1, c2] if d1 >= d2 else [c2, c1]
        return cls, [[c] for c in ordered]
    if cls is OverlapClass.SemiOverlap:
        valid = []
        for corner in frame.corners():
            cells = _corridor_cells(frame, corner)
            if not any(rect.interior(c, p_count, h) for c in cells):
                valid.append(corner)
        valid.sort(key=lambda c: -_dist_to_rect(c, rect, p_count, h))
        cands = []
        for corner in valid:
            lst = clean([corner])
            if lst not in cands:
                cands.append(lst)
        return cls, cands
    # Fully overlapped: corner pairs on each fence border, on the
    # endpoints' planes.
    pairs = [
        [SatCoord(s.p, rect.n_b), SatCoord(d.p, rect.n_b)],
        [SatCoord(s.p, rect.n_u), SatCoord(d.p, rect.n_u)],
        [SatCoord(rect.p_l, s.n), SatCoord(rect.p_l, d.n)],
        [SatCoord(rect.p_r, s.n), SatCoord(rect.p_r, d.n)],
    ]
    return cls, [clean(p) for p in pairs]


class _SweepCache:
    """Per-snapshot cache of single-source sweeps and risk distances."""

    def __init__(self, snapshot: Snapshot, risk_set: RiskSet):
        self.snapshot = snapshot
        self.risk_set = risk_set
        self._sweeps = {}
        self._rs_dist = None

    def sweep(self, idx: int):
        if idx not in self._sweeps:
            self._sweeps[idx] = _sssp(self.snapshot, idx)
        return self._sweeps[idx]

    @property
    def rs_dist(self):
        if self._rs_dist is None:
            snap = self.snapshot
            srcs = [snap.index_of(c) for c in self.risk_set.all_sats]
            if srcs:
                self._rs_dist = kernels.multi_source_csr(
                    snap.indptr, snap.indices, snap.weights,
                    snap.node_count, srcs)
            else:
                self._rs_dist = [math.inf] * snap.node_count
        return self._rs_dist


def _segment_path(cache: _SweepCache, a: SatCoord, b: SatCoord) -> Path:
    snap = cache.snapshot
    ia, ib = snap.index_of(a), snap.index_of(b)
    if ia == ib:
        return Path((a,), 0.0)
    dist, pred = cache.sweep(ia)
    if math.isinf(dist[ib]):
        raise Unreachable(a, b)
    rev = [ib]
    while rev[-1] != ia:
        rev.append(pred[rev[-1]])
    return Path(tuple(snap.label_of(i) for i in reversed(rev)), dist[ib])


def _segment_threshold(cache: _SweepCache, seg: Path) -> float:
    snap = cache.snapshot
    rs_dist = cache.rs_dist
    if not cache.risk_set:
        return math.inf
    best = math.inf
    for node in seg.nodes:
        dv = rs_dist[snap.index_of(node)]
        if dv == 0.0:
            raise ZeroThreshold(f"segment node {node} is a risk satellite")
        best = min(best, dv)
    return 2.0 * best


def detour_threshold(snapshot: Snapshot, segment_path, risk_set: RiskSet) -> float:
    """Jitter budget for one segment: twice the minimum delay from any
    segment node to any risk satellite (+inf when no risk is up)."""
    nodes = segment_path.nodes if isinstance(segment_path, Path) else tuple(segment_path)
    cache = _SweepCache(snapshot, risk_set)
    return _segment_threshold(cache, Path(nodes, 0.0))


def _ep_indices(cache: _SweepCache, ia: int, ib: int, rel_tol: float):
    da, pa = cache.sweep(ia)
    db, _ = cache.sweep(ib)
    bound = da[ib] * (1.0 + rel_tol)
    out = {v for v in range(cache.snapshot.node_count)
           if da[v] + db[v] <= bound}
    v = ib
    while v != -1:
        out.add(v)
        v = pa[v]
    return out


def _try_candidate(cache: _SweepCache, sat_s, sat_d, relays, theta,
                   rel_tol, sigma):
    """Build and validate one candidate plan; None when it violates a
    constraint."""
    snap = cache.snapshot
    rs = cache.risk_set
    if len(relays) > sigma:
        return None
    for r in relays:
        if r in rs.all_sats or r in (sat_s, sat_d):
            return None
    key_nodes = [sat_s, *relays, sat_d]
    try:
        segs = [_segment_path(cache, a, b)
                for a, b in zip(key_nodes, key_nodes[1:])]
    except Unreachable:
        return None

    full = list(segs[0].nodes)
    for seg in segs[1:]:
        full.extend(seg.nodes[1:])
    if len(set(full)) != len(full):
        return None

    if rs:
        wrap = snap.wrap
        for node in full:
            if min(grid_hop_distance(node, r, snap.p_count, snap.h, wrap)
                   for r in rs.all_sats) < theta:
                return None
        risk_idx = {snap.index_of(c) for c in rs.all_sats}
        for a, b in zip(key_nodes, key_nodes[1:]):
            if a == b:
                continue
            ep = _ep_indices(cache, snap.index_of(a), snap.index_of(b), rel_tol)
            if ep & risk_idx:
                return None

    try:
        thresholds = tuple(_segment_threshold(cache, seg) for seg in segs)
    except ZeroThreshold:
        return None
    total = sum(seg.total_delay for seg in segs)
    return RelayPlan(
        t=snap.t, src="", dst="",
        sat_s=sat_s, sat_d=sat_d,
        relays=tuple(relays), thresholds=thresholds,
        path=Path(tuple(full), total), segments=tuple(segs))


def select_relays(snapshot: Snapshot, sat_s: SatCoord, sat_d: SatCoord,
                  nlrp: Nlrp | None, risk_set: RiskSet, *,
                  theta: int = 1, sigma: int = 2,
                  rel_tol: float = 0.0) -> RelayPlan:
    """Plan the relay sequence for one access-satellite pair.

    The working rectangle guiding corner selection is the fence frame
    matching the endpoints' shared direction; endpoints flying in
    opposite directions get the opposite frame mirrored into a shared
    lattice first. If no candidate from that rectangle validates, a
    second pass classifies against the union of both real fence frames
    before giving up.
    """
    block = snapshot.block
    idx_s, idx_d = snapshot.index_of(sat_s), snapshot.index_of(sat_d)
    if sat_s in risk_set.all_sats or sat_d in risk_set.all_sats:
        raise PlanInfeasible("an access satellite is a risk satellite")
    if nlrp is not None and (nlrp.interior(sat_s) or nlrp.interior(sat_d)):
        raise PlanInfeasible("an access satellite sits inside the fence frame")

    p_count, h = snapshot.p_count, snapshot.h
    s_ne = bool(block.ne_bound[idx_s])
    d_ne = bool(block.ne_bound[idx_d])

    passes = []
    if nlrp is None:
        passes.append((sat_d, None))
    elif s_ne == d_ne:
        passes.append((sat_d, nlrp.frame(s_ne)))
        union = _bounding_frame(
            [f for f in (nlrp.ne, nlrp.se) if f is not None], p_count, h)
        if union is not None and union != nlrp.frame(s_ne):
            passes.append((sat_d, union))
    else:
        own = nlrp.frame(s_ne)
        other = nlrp.frame(d_ne)
        work = [f for f in (own, mirror_frame(other, h) if other else None)
                if f is not None]
        passes.append((mirror_coord(sat_d, h),
                       _bounding_frame(work, p_count, h)))
        union = _bounding_frame(
            [f for f in (nlrp.ne, nlrp.se) if f is not None], p_count, h)
        passes.append((sat_d, union))

    cache = _SweepCache(snapshot, risk_set)
    saw_invalid = False
    for d_work, rect in passes:
        frame = Frame(sat_s, d_work, p_count, h)
        cls, candidates = _candidate_relay_lists(frame, rect)
        if cls is OverlapClass.Invalid:
            saw_invalid = True
            continue
        if cls is OverlapClass.FullOverlap:
            best = None
            for relays in candidates:
                plan = _try_candidate(cache, sat_s, sat_d, relays, theta,
                                      rel_tol, sigma)
                if plan and (best is None
                             or plan.path.total_delay < best.path.total_delay):
                    best = plan
            if best is not None:
                return best
        else:
            for relays in candidates:
                plan = _try_candidate(cache, sat_s, sat_d, relays, theta,
                                      rel_tol, sigma)
                if plan is not None:
                    return plan
    if saw_invalid:
        raise PlanInfeasible("endpoint rectangle invalid against the fence")
    raise PlanInfeasible("no candidate corner set satisfies the constraints")
