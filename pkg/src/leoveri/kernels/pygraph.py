"""Pure-Python Dijkstra kernels over CSR adjacency arrays.

Semantics are pinned so the compiled lane can be swapped in without
changing any result bit: a node is settled once, edges relax in CSR
order, and among equal-delay predecessors the lowest node id wins.
"""

import heapq
import math


def dijkstra_csr(indptr, indices, weights, n, source):
    """Single-source shortest distances and predecessors.

    Returns (dist, pred) as Python lists; unreachable nodes have
    dist == inf and pred == -1 (the source also has pred == -1).
    """
    dist = [math.inf] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and v != source and (pred[v] == -1 or u < pred[v]):
                pred[v] = u
    return dist, pred


def multi_source_csr(indptr, indices, weights, n, sources):
    """Distance from every node to the nearest of `sources`."""
    dist = [math.inf] * n
    done = [False] * n
    heap = []
    for s in sorted(sources):
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist
