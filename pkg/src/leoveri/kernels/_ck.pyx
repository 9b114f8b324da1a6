# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dijkstra kernels over CSR adjacency arrays.

Bit-compatible with leoveri.kernels.pygraph: same settle-once policy,
same CSR relaxation order, same lowest-id predecessor tie-break, and a
binary heap keyed on (distance, node) so pops follow the identical
total order as the pure lane's heapq of tuples.
"""

from libc.stdlib cimport malloc, free

cdef double INF = float("inf")


cdef struct HeapItem:
    double d
    long   u


cdef inline bint _less(HeapItem a, HeapItem b) nogil:
    if a.d != b.d:
        return a.d < b.d
    return a.u < b.u


cdef struct Heap:
    HeapItem *items
    long size
    long cap


cdef inline void heap_push(Heap *h, double d, long u) nogil:
    cdef long i, parent
    cdef HeapItem it
    if h.size == h.cap:
        h.cap *= 2
        h.items = <HeapItem *> realloc_items(h.items, h.cap)
    it.d = d
    it.u = u
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(it, h.items[parent]):
            h.items[i] = h.items[parent]
            i = parent
        else:
            break
    h.items[i] = it


cdef HeapItem *realloc_items(HeapItem *old, long cap) nogil:
    cdef HeapItem *fresh = <HeapItem *> malloc(cap * sizeof(HeapItem))
    # caller guarantees old size == cap // 2
    cdef long i
    for i in range(cap // 2):
        fresh[i] = old[i]
    free(old)
    return fresh


cdef inline HeapItem heap_pop(Heap *h) nogil:
    cdef HeapItem top = h.items[0]
    cdef HeapItem last = h.items[h.size - 1]
    h.size -= 1
    cdef long i = 0, child
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _less(h.items[child + 1], h.items[child]):
            child += 1
        if _less(h.items[child], last):
            h.items[i] = h.items[child]
            i = child
        else:
            break
    h.items[i] = last
    return top


def dijkstra_csr(const long[::1] indptr, const long[::1] indices, const double[::1] weights,
                 long n, long source):
    """Single-source shortest distances and predecessors."""
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef long *pred = <long *> malloc(n * sizeof(long))
    cdef char *done = <char *> malloc(n)
    cdef Heap heap
    heap.cap = 64
    heap.size = 0
    heap.items = <HeapItem *> malloc(heap.cap * sizeof(HeapItem))

    cdef long i, u, v, k
    cdef double d, nd
    cdef HeapItem top
    for i in range(n):
        dist[i] = INF
        pred[i] = -1
        done[i] = 0
    dist[source] = 0.0
    heap_push(&heap, 0.0, source)

    while heap.size > 0:
        top = heap_pop(&heap)
        u = top.u
        d = top.d
        if done[u]:
            continue
        done[u] = 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heap_push(&heap, nd, v)
            elif nd == dist[v] and v != source and (pred[v] == -1 or u < pred[v]):
                pred[v] = u

    out_dist = [0.0] * n
    out_pred = [0] * n
    for i in range(n):
        out_dist[i] = dist[i]
        out_pred[i] = pred[i]
    free(dist)
    free(pred)
    free(done)
    free(heap.items)
    return out_dist, out_pred


def multi_source_csr(const long[::1] indptr, const long[::1] indices, const double[::1] weights,
                     long n, sources):
    """Distance from every node to the nearest source."""
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef char *done = <char *> malloc(n)
    cdef Heap heap
    heap.cap = 64
    heap.size = 0
    heap.items = <HeapItem *> malloc(heap.cap * sizeof(HeapItem))

    cdef long i, u, v, k, s
    cdef double d, nd
    cdef HeapItem top
    for i in range(n):
        dist[i] = INF
        done[i] = 0
    for s in sorted(sources):
        dist[s] = 0.0
        heap_push(&heap, 0.0, s)

    while heap.size > 0:
        top = heap_pop(&heap)
        u = top.u
        d = top.d
        if done[u]:
            continue
        done[u] = 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                heap_push(&heap, nd, v)

    out = [0.0] * n
    for i in range(n):
        out[i] = dist[i]
    free(dist)
    free(done)
    free(heap.items)
    return out
