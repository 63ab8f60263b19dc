"""Small independent oracles shared by the tests."""

import numpy as np

from lerwray.graphs import neighbors


def kernel_matrix(g):
    """Dense lazy-walk transition matrix built from the neighbour lists."""
    N = g.vertex_count
    K = np.zeros((N, N))
    for v in range(N):
        K[v, v] += 0.5
        for w in neighbors(g, v):
            K[v, w] += 0.5 / g.degree
    return K


def sparse_kernel(g):
    from scipy.sparse import csr_matrix

    N, deg = g.vertex_count, g.degree
    rows, cols, vals = list(range(N)), list(range(N)), [0.5] * N
    for v in range(N):
        for w in neighbors(g, v):
            rows.append(v)
            cols.append(w)
            vals.append(0.5 / deg)
    return csr_matrix((vals, (rows, cols)), shape=(N, N))


def chronological_erase(seq):
    """Loop erasure by scanning and cutting at each revisit (stack form)."""
    out = []
    for v in seq:
        if v in out:
            del out[out.index(v) + 1:]
        else:
            out.append(v)
    return out
