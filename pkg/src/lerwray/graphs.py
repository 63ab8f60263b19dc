"""Finite vertex-transitive graphs with integer vertex encodings.

Three families are supported:

* ``torus``: the d-dimensional torus Z_n^d.  Vertex ids are mixed-radix
  integers, least-significant coordinate first.  For side n = 2 the two
  neighbours along a dimension coincide; both entries are kept so the
  degree stays 2d (multigraph semantics).
* ``complete``: the complete graph K_m, ids 0..m-1.
* ``hypercube``: Z_2^n, ids are bit masks.

Neighbours are produced by arithmetic, never from stored adjacency.
"""

from dataclasses import dataclass

import numba
import numpy as np

TORUS, COMPLETE, HYPERCUBE = 0, 1, 2
_KIND_CODES = {"torus": TORUS, "complete": COMPLETE, "hypercube": HYPERCUBE}
MAX_VERTICES = 2**62


class GraphSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GraphModel:
    kind: str
    d: int = 0  # torus dimension / hypercube dimension
    n: int = 0  # torus side length
    m: int = 0  # complete graph size

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def vertex_count(self) -> int:
        if self.kind == "torus":
            return self.n**self.d
        if self.kind == "complete":
            return self.m
        return 2**self.d

    @property
    def degree(self) -> int:
        if self.kind == "torus":
            return 2 * self.d
        if self.kind == "complete":
            return self.m - 1
        return self.d

    @property
    def side(self) -> int:
        """Size parameter used by the kernels (torus side, else unused)."""
        return self.n

    def spec(self) -> str:
        if self.kind == "torus":
            return f"torus:d={self.d},n={self.n}"
        if self.kind == "complete":
            return f"complete:m={self.m}"
        return f"hypercube:n={self.d}"

    def __str__(self):
        return self.spec()


def make_graph(kind: str, **params) -> GraphModel:
    """Build a graph model, validating parameter ranges.

    >>> make_graph("torus", d=4, n=10).vertex_count
    10000
    """
    if kind == "torus":
        d, n = int(params["d"]), int(params["n"])
        if d < 1:
            raise GraphSpecError("torus dimension must be >= 1")
        if n < 2:
            raise GraphSpecError("torus side must be >= 2")
        g = GraphModel("torus", d=d, n=n)
    elif kind == "complete":
        m = int(params["m"])
        if m < 2:
            raise GraphSpecError("complete graph needs m >= 2")
        g = GraphModel("complete", m=m)
    elif kind == "hypercube":
        n = int(params["n"])
        if n < 1:
            raise GraphSpecError("hypercube dimension must be >= 1")
        g = GraphModel("hypercube", d=n)
    else:
        raise GraphSpecError(f"unknown graph kind {kind!r}")
    if g.vertex_count > MAX_VERTICES:
        raise GraphSpecError(f"{g.spec()} has too many vertices for 64-bit ids")
    return g


_SPEC_KEYS = {"torus": {"d", "n"}, "complete": {"m"}, "hypercube": {"n"}}


def parse_graph_spec(text: str) -> GraphModel:
    """Parse ``kind:key=value,...``, e.g. ``torus:d=4,n=10``."""
    kind, sep, rest = text.strip().partition(":")
    if not sep or kind not in _SPEC_KEYS:
        raise GraphSpecError(f"malformed graph spec {text!r}")
    params = {}
    for item in rest.split(","):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in _SPEC_KEYS[kind] or key in params:
            raise GraphSpecError(f"malformed graph spec {text!r}")
        try:
            params[key] = int(value)
        except ValueError:
            raise GraphSpecError(f"malformed graph spec {text!r}") from None
    if set(params) != _SPEC_KEYS[kind]:
        raise GraphSpecError(f"graph spec {text!r} needs keys {sorted(_SPEC_KEYS[kind])}")
    return make_graph(kind, **params)


@numba.njit(cache=True)
def _neighbor(code, d, n, v, k):
    # k-th neighbour of v in the canonical order of `neighbors`
    if code == 0:
        dim = k // 2
        stride = 1
        for _ in range(dim):
            stride *= n
        coord = (v // stride) % n
        if k % 2 == 0:
            new = (coord + 1) % n
        else:
            new = (coord - 1 + n) % n
        return v + (new - coord) * stride
    elif code == 2:
        return v ^ (1 << k)
    else:
        return k if k < v else k + 1


def _check_vertex(g: GraphModel, v: int):
    if not 0 <= v < g.vertex_count:
        raise ValueError(f"vertex {v} out of range for {g}")


def neighbors(g: GraphModel, v: int) -> tuple:
    """Neighbours of ``v`` in a fixed order, with multiplicity.

    Torus: (+1, -1) along dimension 0, then dimension 1, ...
    Hypercube: flip bit 0, bit 1, ...  Complete: all other ids ascending.
    """
    v = int(v)
    _check_vertex(g, v)
    return tuple(int(_neighbor(g.code, g.d, g.n, v, k)) for k in range(g.degree))


def neighbor(g: GraphModel, v: int, k: int) -> int:
    return int(_neighbor(g.code, g.d, g.n, int(v), int(k)))


def uniform_vertex(g: GraphModel, rng) -> int:
    return int(rng.integers(0, g.vertex_count))


def torus_coords(g: GraphModel, v: int) -> tuple:
    out = []
    for _ in range(g.d):
        v, c = divmod(v, g.n)
        out.append(c)
    return tuple(out)


def torus_index(g: GraphModel, coords) -> int:
    v = 0
    for c in reversed(coords):
        v = v * g.n + (c % g.n)
    return v


def translate(g: GraphModel, v: int, shift: int) -> int:
    """Group translation by vertex ``shift`` (torus addition, hypercube XOR)."""
    if g.kind == "torus":
        a, b = torus_coords(g, v), torus_coords(g, shift)
        return torus_index(g, [x + y for x, y in zip(a, b)])
    if g.kind == "hypercube":
        return v ^ shift
    raise ValueError("translation is defined for torus and hypercube only")


def neighbor_table(g: GraphModel) -> np.ndarray:
    """Dense (vertex_count, degree) neighbour array; small graphs only."""
    if g.vertex_count * g.degree > 10**7:
        raise ValueError("graph too large for a dense neighbour table")
    return _table(g.code, g.d, g.n, g.vertex_count, g.degree)


@numba.njit(cache=True)
def _table(code, d, n, nv, deg):
    out = np.empty((nv, deg), dtype=np.int64)
    for v in range(nv):
        for k in range(deg):
            out[v, k] = _neighbor(code, d, n, v, k)
    return out
