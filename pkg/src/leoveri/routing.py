"""Shortest paths, equal-cost node sets, and path delay over snapshots.

Dijkstra runs on the snapshot's CSR arrays through the kernel lane;
ties between equal-delay predecessors resolve to the lowest node index
so runs are reproducible across lanes and platforms.
"""

import math
from dataclasses import dataclass

from . import kernels
from .topology import Snapshot


class Unreachable(Exception):
    def __init__(self, a, b):
        self.a, self.b = a, b
        super().__init__(f"no path from {a} to {b}")


@dataclass(frozen=True)
class Path:
    """Ordered node sequence with its total propagation delay."""

    nodes: tuple
    total_delay: float

    def __len__(self):
        return len(self.nodes)

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


def _sssp(snapshot: Snapshot, src_idx: int):
    return kernels.dijkstra_csr(
        snapshot.indptr, snapshot.indices, snapshot.weights,
        snapshot.node_count, src_idx)


def shortest_path(snapshot: Snapshot, a, b) -> Path:
    """Minimal-delay path from a to b (labels: SatCoord or ground id)."""
    ia, ib = snapshot.index_of(a), snapshot.index_of(b)
    if ia == ib:
        return Path((a,), 0.0)
    dist, pred = _sssp(snapshot, ia)
    if math.isinf(dist[ib]):
        raise Unreachable(a, b)
    rev = [ib]
    while rev[-1] != ia:
        rev.append(pred[rev[-1]])
    nodes = tuple(snapshot.label_of(i) for i in reversed(rev))
    return Path(nodes, dist[ib])


def path_delay(snapshot: Snapshot, nodes) -> float:
    """Sum of edge delays along an explicit node sequence."""
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        ia, ib = snapshot.index_of(a), snapshot.index_of(b)
        nbrs, wts = snapshot.neighbors(ia)
        hit = nbrs == ib
        if not hit.any():
            raise Unreachable(a, b)
        total += float(wts[hit][0])
    return total


def distances_from(snapshot: Snapshot, a) -> list[float]:
    """Single-source delay vector, indexed by node index."""
    dist, _ = _sssp(snapshot, snapshot.index_of(a))
    return dist


def distances_to_set(snapshot: Snapshot, labels) -> list[float]:
    """Delay from every node to the nearest label in `labels`."""
    sources = [snapshot.index_of(x) for x in labels]
    if not sources:
        return [math.inf] * snapshot.node_count
    return kernels.multi_source_csr(
        snapshot.indptr, snapshot.indices, snapshot.weights,
        snapshot.node_count, sources)


def equal_cost_node_set(snapshot: Snapshot, a, b, rel_tol: float = 1e-9):
    """Nodes lying on a path whose delay is within (1+rel_tol) of optimal.

    Two single-source sweeps; node v qualifies iff
    dist(a, v) + dist(v, b) <= dist(a, b) * (1 + rel_tol).
    """
    ia, ib = snapshot.index_of(a), snapshot.index_of(b)
    if ia == ib:
        return {a}
    da, pa = _sssp(snapshot, ia)
    if math.isinf(da[ib]):
        raise Unreachable(a, b)
    db, _ = _sssp(snapshot, ib)
    bound = da[ib] * (1.0 + rel_tol)
    out = set()
    for v in range(snapshot.node_count):
        if da[v] + db[v] <= bound:
            out.add(snapshot.label_of(v))
    # The realized shortest path always qualifies; guard against the
    # forward+backward sums rounding a hair past the bound.
    v = ib
    while v != -1:
        out.add(snapshot.label_of(v))
        v = pa[v]
    return out
