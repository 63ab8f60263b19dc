"""Goodness-of-fit tools, the rescaled length path and the Skorohod modulus."""

import math
from dataclasses import dataclass, field

import numpy as np

from .rayleigh import StepPath
from .segments import CASE1


def ks_statistic(samples, cdf, cdf_left=None) -> float:
    """sup_x |F_N(x) - F(x)| against the CDF ``cdf``.

    Both one-sided gaps are taken at every order statistic; with ties the
    maxima fall on the ends of each tie block, which is what the sup needs.
    For a law with atoms pass ``cdf_left`` (x -> P(X < x)) so the lower gap
    is measured against the left limit.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("KS statistic of an empty sample")
    F = np.asarray(cdf(x), dtype=float)
    F_left = F if cdf_left is None else np.asarray(cdf_left(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F_left - (i - 1) / n)))


def ks_2samp_statistic(a, b) -> float:
    """Two-sample KS distance sup_x |F_a(x) - F_b(x)| (exact with ties)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS statistic of an empty sample")
    z = np.concatenate([a, b])
    fa = np.searchsorted(a, z, side="right") / a.size
    fb = np.searchsorted(b, z, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_2samp(n1: int, n2: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value c(alpha) sqrt((n1+n2)/(n1 n2))."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c * math.sqrt((n1 + n2) / (n1 * n2))


# --- rescaled length process --------------------------------------------------


def time_scale(case: int, a: float, N: int = None, n: int = None) -> float:
    """Steps per unit of rescaled time (L_n)."""
    if case == CASE1:
        return a * math.sqrt(N)
    return a * n * n * math.sqrt(math.log(n))


def length_scale(case: int, b: float, N: int = None, n: int = None) -> float:
    """Loop-erased length per unit of rescaled length (M_n)."""
    if case == CASE1:
        return math.sqrt(N) / b
    return n * n * math.log(n) ** (1 / 6) / b


def time_index(t, case: int, a: float, N: int = None, n: int = None):
    """g(t) = floor(L_n t), the walk step read at rescaled time t."""
    return np.floor(time_scale(case, a, N, n) * np.asarray(t, dtype=float)).astype(np.int64)


@dataclass
class RescaledLengthPath:
    case: int
    a: float
    b: float
    N: int
    n: int
    times: np.ndarray
    Y: np.ndarray
    Z: np.ndarray = field(init=False)

    def __post_init__(self):
        self.Z = np.asarray(self.Y, dtype=float) / length_scale(self.case, self.b, self.N, self.n)

    @property
    def L_n(self) -> float:
        return time_scale(self.case, self.a, self.N, self.n)

    @property
    def M_n(self) -> float:
        return length_scale(self.case, self.b, self.N, self.n)

    def g(self, t):
        return time_index(t, self.case, self.a, self.N, self.n)


def rescale_lengths(Y, times, constants, case: int, N: int = None, n: int = None) -> RescaledLengthPath:
    """Z_n(t) = Y_{g(t)} / M_n with ``Y`` already read at g(t)."""
    a, b = (constants.a, constants.b) if hasattr(constants, "a") else constants
    if a <= 0 or b <= 0:
        raise ValueError("scaling constants must be positive")
    return RescaledLengthPath(case, a, b, N, n, np.asarray(times, dtype=float), np.asarray(Y))


# --- finite-dimensional comparison --------------------------------------------


@dataclass
class FddReport:
    times: list
    ks: list
    n_lerw: int
    n_rayleigh: int
    seeds: dict = field(default_factory=dict)

    def rows(self):
        return [(t, k, self.n_lerw, self.n_rayleigh) for t, k in zip(self.times, self.ks)]


def fdd_compare(lerw, rayleigh, times, seeds=None) -> FddReport:
    """Per-time two-sample KS between two (replicates, len(times)) arrays."""
    lerw = np.atleast_2d(np.asarray(lerw, dtype=float))
    rayleigh = np.atleast_2d(np.asarray(rayleigh, dtype=float))
    if lerw.shape[1] != len(times) or rayleigh.shape[1] != len(times):
        raise ValueError("sample columns do not match the time grid")
    ks = [ks_2samp_statistic(lerw[:, k], rayleigh[:, k]) for k in range(len(times))]
    return FddReport(list(map(float, times)), ks, lerw.shape[0], rayleigh.shape[0], dict(seeds or {}))


# --- Skorohod modulus ---------------------------------------------------------


class _Oscillation:
    """Range of a piecewise-linear cadlag path over half-open intervals."""

    def __init__(self, path: StepPath):
        self.path = path
        self.t = np.asarray(path.times, dtype=float)
        self.after = np.asarray(path.values, dtype=float)
        self.before = np.asarray(path.left_limit(self.t), dtype=float) if self.t.size else self.t

    def bounds(self, a: float, b: float) -> tuple:
        """(inf, sup) of the path over [a, b) together with its left limit at b."""
        lo = np.searchsorted(self.t, a, side="right")
        hi = np.searchsorted(self.t, b, side="left")
        vals = [self.path(a), self.path.left_limit(b)]
        if hi > lo:
            seg_b, seg_a = self.before[lo:hi], self.after[lo:hi]
            vals += [seg_b.max(), seg_b.min(), seg_a.max(), seg_a.min()]
        return float(min(vals)), float(max(vals))

    def __call__(self, a: float, b: float) -> float:
        lo, hi = self.bounds(a, b)
        return hi - lo


def modulus_candidates(path: StepPath, theta: float, T: float) -> np.ndarray:
    """Candidate partition points: jump times, jump times +- theta, a
    theta/4 grid, and equal subdivisions between consecutive anchors
    (0, jump times, T)."""
    jumps = [float(s) for s in path.times if 0 < s < T]
    cand = {0.0, float(T)}
    cand.update(jumps)
    cand.update(s + theta for s in jumps)
    cand.update(s - theta for s in jumps)
    step = theta / 4
    cand.update(k * step for k in range(int(T / step) + 1))
    anchors = [0.0] + jumps + [float(T)]
    spans = list(zip(anchors[:-1], anchors[1:])) + [(0.0, float(T))]
    for a, b in spans:
        for k in range(1, int((b - a) / theta + 1e-12) + 1):
            cand.update(a + i * (b - a) / k for i in range(1, k))
    return np.array(sorted(c for c in cand if 0 <= c <= T))


def modulus_w(path: StepPath, theta: float, T: float, free_tail: bool = False) -> float:
    """inf over partitions 0 = t_0 < ... < t_m = T with all gaps >= theta of
    the largest oscillation over a cell [t_{i-1}, t_i).

    Dynamic programming over `modulus_candidates`; exact whenever an optimal
    partition uses candidate points (the case for slope-only segments and
    isolated jumps), an upper bound otherwise.  ``free_tail=True`` lets the
    last cell be shorter than theta, as when the partition may end past T.
    """
    if not 0 < theta < T:
        raise ValueError("need 0 < theta < T")
    osc = _Oscillation(path)
    cand = modulus_candidates(path, theta, T)
    # inf and sup of the path over each elementary piece [c_k, c_{k+1}),
    # left limit at c_{k+1} included; a cell's range merges its pieces
    lo = np.empty(cand.size - 1)
    hi = np.empty(cand.size - 1)
    for k in range(cand.size - 1):
        lo[k], hi[k] = osc.bounds(cand[k], cand[k + 1])
    tol = 1e-12 * max(1.0, T)
    best = np.full(cand.size, np.inf)
    best[0] = 0.0
    tail = np.inf
    for c in range(1, cand.size):
        run_hi = np.maximum.accumulate(hi[c - 1::-1])[::-1]
        run_lo = np.minimum.accumulate(lo[c - 1::-1])[::-1]
        score = np.maximum(best[:c], run_hi - run_lo)
        ok = cand[c] - cand[:c] >= theta - tol
        if ok.any():
            best[c] = score[ok].min()
        if c == cand.size - 1:
            tail = score.min()
    return float(min(best[-1], tail) if free_tail else best[-1])


def path_from_series(times, values, slope: float = 0.0) -> StepPath:
    """StepPath through (time, value) samples; the first sample is t = 0."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size == 0 or times[0] != 0:
        raise ValueError("series must start at time 0")
    return StepPath(float(values[0]), times[1:], values[1:], slope)
