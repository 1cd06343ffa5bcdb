"""Compiled inner loops."""

import numba
import numpy as np


@numba.njit(cache=True)
def brandes_unweighted(indptr, indices, n):
    """Exact directed betweenness by per-source BFS and dependency accumulation.

    Sources are processed in id order and each dependency is added in the
    same order every run, so the result is bit-reproducible.
    """
    bc = np.zeros(n)
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        # order[:tail] is nondecreasing in distance; walk it backwards
        for i in range(tail - 1, -1, -1):
            w = order[i]
            dw = dist[w]
            acc = 0.0
            for k in range(indptr[w], indptr[w + 1]):
                x = indices[k]
                if dist[x] == dw + 1:
                    acc += sigma[w] / sigma[x] * (1.0 + delta[x])
            delta[w] = acc
            if w != s:
                bc[w] += acc
        for i in range(tail):
            w = order[i]
            dist[w] = -1
            sigma[w] = 0.0
            delta[w] = 0.0
    return bc
