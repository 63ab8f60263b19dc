"""The Rayleigh process and the discrete chains that approximate it.

Two constructions of the process are provided: the lower envelope of a
planar Poisson field, and an event-driven simulation with jump rate equal
to the current value and uniform multiplicative jumps.  Started from 0,
R(t) has the law of min(t, W) with W Rayleigh; `rayleigh_marginal_sf`
gives the survival function for any start.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .loop_erasure import _le_lengths


def rayleigh_survival(x):
    """P(W > x) = exp(-x^2/2)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


def rayleigh_cdf(x):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return -np.expm1(-0.5 * x * x)


def rayleigh_marginal_sf(x, t: float, y: float = 0.0, inclusive: bool = False):
    """P(R(t) > x) for the process started at y (P(R(t) >= x) if ``inclusive``).

    R(t) > x iff x < y + t and the field has no point in the region under
    the line of slope 1 ending at (t, x), whose area is x^2/2 for x <= t and
    t*x - t^2/2 for x > t.  The law has an atom at y + t (no jump yet).
    """
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    area = np.where(x <= t, 0.5 * x * x, t * x - 0.5 * t * t)
    below = x <= y + t if inclusive else x < y + t
    return np.where(below, np.exp(-area), 0.0)


def rayleigh_marginal_cdf(x, t: float, y: float = 0.0, left: bool = False):
    """P(R(t) <= x), or the left limit P(R(t) < x) if ``left``."""
    return 1.0 - rayleigh_marginal_sf(x, t, y, inclusive=left)


@dataclass
class PoissonField:
    horizon_t: float
    horizon_x: float
    points: np.ndarray  # (k, 2) array of (s, x), sorted by s

    def __len__(self):
        return len(self.points)

    def scaled(self, d: float) -> "PoissonField":
        """Coordinates divided by d (grid units for cell size d)."""
        return PoissonField(self.horizon_t / d, self.horizon_x / d, self.points / d)


def sample_poisson_field(horizon_t: float, horizon_x: float, rng) -> PoissonField:
    """Unit-intensity Poisson points on [0, horizon_t) x [0, horizon_x)."""
    if horizon_t <= 0 or horizon_x <= 0:
        raise ValueError("field horizons must be positive")
    k = rng.poisson(horizon_t * horizon_x)
    s = rng.uniform(0.0, horizon_t, size=k)
    x = rng.uniform(0.0, horizon_x, size=k)
    order = np.argsort(s, kind="stable")
    return PoissonField(horizon_t, horizon_x, np.column_stack([s[order], x[order]]))


@dataclass
class StepPath:
    """Right-continuous path: linear with ``slope`` between breakpoints.

    ``times[k]`` is a breakpoint and ``values[k]`` the value right after it;
    before the first breakpoint the path is y + slope * t.
    """

    y: float
    times: np.ndarray
    values: np.ndarray
    slope: float = 1.0
    horizon: float = math.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right") - 1
        base_t = np.where(idx >= 0, self.times[np.maximum(idx, 0)] if len(self.times) else 0.0, 0.0)
        base_v = np.where(idx >= 0, self.values[np.maximum(idx, 0)] if len(self.times) else self.y, self.y)
        out = base_v + self.slope * (t - base_t)
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="left") - 1
        base_t = np.where(idx >= 0, self.times[np.maximum(idx, 0)] if len(self.times) else 0.0, 0.0)
        base_v = np.where(idx >= 0, self.values[np.maximum(idx, 0)] if len(self.times) else self.y, self.y)
        out = base_v + self.slope * (t - base_t)
        return float(out) if out.ndim == 0 else out

    @property
    def breakpoints(self):
        return list(zip(self.times.tolist(), self.values.tolist()))


def rayleigh_from_field(field: PoissonField, y: float, T: float) -> StepPath:
    """R(t) = (y + t) min inf{x + (t - s) : (s, x) in field, s <= t} on [0, T].

    Points are scanned in time order; a point jumps the path iff it lies
    below the current left limit.  Requires field.horizon_x >= y + T, which
    loses nothing because R(s) <= y + s.
    """
    if field.horizon_t < T or field.horizon_x < y + T:
        raise ValueError("field horizons do not cover [0, T] x [0, y + T]")
    cur_t, cur_v = 0.0, float(y)
    times, values = [], []
    for s, x in field.points:
        if s > T:
            break
        if x < cur_v + (s - cur_t):
            cur_t, cur_v = float(s), float(x)
            times.append(cur_t)
            values.append(cur_v)
    return StepPath(float(y), np.array(times), np.array(values), 1.0, T)


def _wait(v, E):
    # root u >= 0 of v*u + u^2/2 = E, written to avoid cancellation
    with np.errstate(invalid="ignore"):
        u = 2.0 * E / (v + np.sqrt(v * v + 2.0 * E))
    return np.where(np.isinf(E), np.inf, u)


def rayleigh_event_driven(y: float, T: float, rng) -> StepPath:
    """Hazard-driven simulation: jump rate R(t-), jump multiplies by Uniform(0,1)."""
    if T <= 0:
        raise ValueError("T must be positive")
    t, v = 0.0, float(y)
    times, values = [], []
    while True:
        E = float(rng.standard_exponential())
        if math.isinf(E):
            break
        u = float(_wait(v, E))
        if t + u > T:
            break
        t += u
        v = (v + u) * float(rng.random())
        times.append(t)
        values.append(v)
    return StepPath(float(y), np.array(times), np.array(values), 1.0, T)


def rayleigh_values_at(times, replicates: int, rng, y: float = 0.0) -> np.ndarray:
    """R(t) at the given times for independent event-driven replicates.

    Same jump rule as `rayleigh_event_driven`, vectorised over replicates.
    Returns an array of shape (replicates, len(times)).
    """
    times = np.asarray(times, dtype=float)
    out = np.full((replicates, len(times)), np.nan)
    t = np.zeros(replicates)
    v = np.full(replicates, float(y))
    live = np.ones(replicates, dtype=bool)
    t_end = times.max() if len(times) else 0.0
    while live.any():
        idx = np.flatnonzero(live)
        E = rng.standard_exponential(idx.size)
        U = rng.random(idx.size)
        tt, vv = t[idx], v[idx]
        nxt = tt + _wait(vv, E)
        for k, tau in enumerate(times):
            hit = (tau >= tt) & (tau < nxt)
            out[idx[hit], k] = vv[hit] + (tau - tt[hit])
        t[idx] = nxt
        v[idx] = (vv + (nxt - tt)) * U
        live[idx] = nxt <= t_end
    return out


def rayleigh_from_fields(times, replicates: int, rng, y: float = 0.0) -> np.ndarray:
    """R(t) at the given times, one fresh Poisson field per replicate."""
    times = np.asarray(times, dtype=float)
    T = float(times.max())
    out = np.empty((replicates, len(times)))
    for k in range(replicates):
        path = rayleigh_from_field(sample_poisson_field(T, y + T, rng), y, T)
        out[k] = path(times)
    return out


# --- surrogate chain on the complete graph -----------------------------------


@dataclass
class SurrogateChain:
    m: int
    xi: np.ndarray  # xi_1..xi_J in {1..m}
    lengths: np.ndarray  # L_0..L_J
    retained: list = field(default_factory=list, repr=False)  # S~_0..S~_J


def surrogate_chain(m: int, J: int, rng, keep_sets: bool = True) -> SurrogateChain:
    """Retained-set recursion driven by i.i.d. uniform labels.

    Index i is erased at step j, together with every later retained index,
    when xi_i == xi_j.  Index 0 carries no label and is never erased.
    """
    if m < 1 or J < 0:
        raise ValueError("need m >= 1 and J >= 0")
    xi = rng.integers(1, m + 1, size=J)
    label_of = {}  # label value -> retained index carrying it
    current = [0]
    lengths = np.empty(J + 1, dtype=np.int64)
    lengths[0] = 1
    sets = [(0,)] if keep_sets else []
    for j in range(1, J + 1):
        lab = int(xi[j - 1])
        i = label_of.get(lab)
        if i is not None:
            cut = current.index(i)
            for k in current[cut:]:
                del label_of[int(xi[k - 1])]
            del current[cut:]
        current.append(j)
        label_of[lab] = j
        lengths[j] = len(current)
        if keep_sets:
            sets.append(tuple(current))
    return SurrogateChain(m, xi, lengths, sets)


def surrogate_lengths(m: int, J: int, replicates: int, rng) -> np.ndarray:
    """L_0..L_J for independent surrogate chains, shape (replicates, J+1).

    L_j is the loop-erased length of (*, xi_1, ..., xi_j) with * a label
    that never recurs, so the fast erasure kernel applies directly.
    """
    out = np.empty((replicates, J + 1), dtype=np.int64)
    seq = np.empty(J + 1, dtype=np.int64)
    seq[0] = m
    for k in range(replicates):
        seq[1:] = rng.integers(0, m, size=J)
        out[k] = _le_lengths(seq, m + 1)
    return out


# --- chain driven by Poisson rectangles --------------------------------------


@dataclass
class PrimeChain:
    d: float
    lengths: np.ndarray  # |S'_0|..|S'_J|
    retained: list = field(default_factory=list, repr=False)


def column_min_rows(field: PoissonField, d: float, J: int) -> np.ndarray:
    """For column j (times [d(j-1), dj)), the lowest occupied row index i
    (heights [d(i-1), di)); 0 when the column is empty.  Index 0 unused."""
    grid = field.points / d
    cols = np.floor(grid[:, 0]).astype(np.int64) + 1
    rows = np.floor(grid[:, 1]).astype(np.int64) + 1
    best = np.zeros(J + 1, dtype=np.int64)
    for c, rw in zip(cols, rows):
        if c <= J and (best[c] == 0 or rw < best[c]):
            best[c] = rw
    return best


def cell_indicator(field: PoissonField, d: float, i: int, j: int) -> bool:
    """At least one point in [d(j-1), dj) x [d(i-1), di)."""
    grid = field.points / d
    cols = np.floor(grid[:, 0]).astype(np.int64) + 1
    rows = np.floor(grid[:, 1]).astype(np.int64) + 1
    return bool(np.any((cols == j) & (rows == i)))


def prime_chain_from_field(field: PoissonField, d: float, J: int,
                           keep_sets: bool = True) -> PrimeChain:
    """Rank-based retained sets from the rectangle indicators.

    With S'_{j-1} = {l_1 < ... < l_q}, l_k survives step j iff no rectangle
    (i, j) with i <= k holds a point; then j is added.
    """
    if field.horizon_t < d * J * (1 - 1e-12) or field.horizon_x < d * J * (1 - 1e-12):
        raise ValueError("field does not cover the needed rectangles")
    best = column_min_rows(field, d, J)
    current = [0]
    lengths = np.empty(J + 1, dtype=np.int64)
    lengths[0] = 1
    sets = [(0,)] if keep_sets else []
    for j in range(1, J + 1):
        i = best[j]
        if 0 < i <= len(current):
            del current[i - 1:]
        current.append(j)
        lengths[j] = len(current)
        if keep_sets:
            sets.append(tuple(current))
    return PrimeChain(d, lengths, sets)


def sandwich_gaps(field: PoissonField, d: float, J: int) -> np.ndarray:
    """R(dj)/d - |S'_j| for j = 0..J, from one field (R started at 0).

    Evaluated in grid units (coordinates divided by d), where the path and
    the rectangles see identical coordinates and lattice times are exact.
    """
    g = field.scaled(d)
    path = rayleigh_from_field(g, 0.0, float(J))
    chain = prime_chain_from_field(field, d, J, keep_sets=False)
    return path(np.arange(J + 1, dtype=float)) - chain.lengths


# --- Bernoulli coupling -------------------------------------------------------


@dataclass
class CouplingLaw:
    """Joint law of (V, W) on (j+1) x 2^j outcomes.

    Row 0 is V = all zeros, row i (1..j) has a single one at position i.
    Column c is the bit pattern of W (bit i-1 is position i).
    """

    j: int
    p: float
    q: float
    joint: np.ndarray
    match_probability: float

    @property
    def bound(self) -> float:
        return 1 - self.j * abs(self.p - self.q) - self.j * (self.j - 1) * self.q**2

    def v_marginal(self):
        return self.joint.sum(axis=1)

    def w_marginal(self):
        return self.joint.sum(axis=0)


def v_law(p, j):
    return np.array([1 - j * p] + [p] * j)


def w_law(q, j):
    ones = np.array([bin(c).count("1") for c in range(2**j)])
    return q**ones * (1 - q) ** (j - ones)


def coupling_law(p: float, q: float, j: int) -> CouplingLaw:
    """Coupling with the largest mass on {V = W}.

    Diagonal cells get min of the two marginal masses; the residual masses
    are matched by a north-west corner fill, which never lands on a
    diagonal cell with residual mass on both sides.
    """
    if not (j >= 1 and 0 < p < 1 / j and 0 < q < 1):
        raise ValueError("need j >= 1, 0 < p < 1/j and 0 < q < 1")
    if j > 20:
        raise ValueError("j too large for an explicit joint law")
    pv, pw = v_law(p, j), w_law(q, j)
    joint = np.zeros((j + 1, 2**j))
    diag = [(0, 0)] + [(i, 1 << (i - 1)) for i in range(1, j + 1)]
    for a, c in diag:
        joint[a, c] = min(pv[a], pw[c])
    match = float(sum(joint[a, c] for a, c in diag))
    rv = pv - joint.sum(axis=1)
    rw = pw - joint.sum(axis=0)
    a, c = 0, 0
    while a <= j and c < 2**j:
        if rv[a] <= 0:
            a += 1
            continue
        if rw[c] <= 0:
            c += 1
            continue
        mass = min(rv[a], rw[c])
        joint[a, c] += mass
        rv[a] -= mass
        rw[c] -= mass
    return CouplingLaw(j, p, q, joint, match)


def v_pattern(row: int, j: int) -> int:
    return 0 if row == 0 else 1 << (row - 1)


def maximal_coupling(p: float, q: float, j: int, rng, size: int = 1):
    """Draw (V, W) pairs from `coupling_law`.

    Returns ``(V, W, law)`` with V and W 0/1 arrays of shape (size, j).
    """
    law = coupling_law(p, q, j)
    flat = law.joint.ravel()
    idx = rng.choice(flat.size, size=size, p=flat / flat.sum())
    rows, cols = np.divmod(idx, 2**j)
    bits = 1 << np.arange(j)
    vmask = np.where(rows == 0, 0, 1 << np.maximum(rows - 1, 0))
    V = ((vmask[:, None] & bits) > 0).astype(np.int8)
    W = ((cols[:, None] & bits) > 0).astype(np.int8)
    return V, W, law
