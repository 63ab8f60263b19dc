"""Segment decomposition of a walk, long-loop indicators and scaling constants.

Case 1 (graphs with fast mixing relative to sqrt(|G|)) uses segment length
r = floor(tau^(1/4) N^(3/8)), local window s = floor(tau^(3/4) N^(1/8)) and
windows {(i-1)r+2s+1, ..., ir-s}.  Case 2 (the 4-d torus) uses
r = floor(n^2 (log n)^(9/22)) and windows {(i-1)r, ..., ir-1}.  All
logarithms are natural.
"""

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .graphs import GraphModel, _neighbor
from .loop_erasure import local_loop_erasure, loop_erase
from .walk import walk_steps

CASE1, CASE2 = 1, 2


class ScheduleInfeasible(ValueError):
    """The case formulas give no usable segments for this graph size."""


def iroot(a: int, k: int) -> int:
    """floor(a ** (1/k)) for nonnegative integers, exact."""
    if a < 0:
        raise ValueError("negative radicand")
    x = int(round(a ** (1.0 / k)))
    while x**k > a:
        x -= 1
    while (x + 1) ** k <= a:
        x += 1
    return x


@dataclass
class SegmentSchedule:
    case: int
    r: int
    s: int = 0
    w: int = 0
    eta: float = 0.05
    windows: list = field(default_factory=list)  # list of range objects, A_1..A_J
    gaps: list = field(default_factory=list)
    exploratory: bool = False

    @property
    def J(self) -> int:
        return len(self.windows)

    @property
    def capacity_run_length(self) -> int:
        return self.r if self.case == CASE1 else self.r - 2 * self.w


def case1_lengths(tau: int, N: int) -> tuple:
    # r = floor((tau^2 N^3)^(1/8)), s = floor((tau^6 N)^(1/8))
    return iroot(tau**2 * N**3, 8), iroot(tau**6 * N, 8)


def case2_lengths(n: int, eta: float) -> tuple:
    logn = math.log(n)
    return math.floor(n * n * logn ** (9 / 22)), math.floor(n * n * logn**eta)


def build_schedule(case: int, g: GraphModel, tau: int | None = None, eta: float = 0.05,
                   horizon: int = 0, r: int | None = None, s: int | None = None,
                   w: int | None = None) -> SegmentSchedule:
    """Segment windows covering times [0, horizon].

    ``r``, ``s`` and ``w`` override the case formulas (exploratory runs at
    sizes where the formulas are degenerate); overrides are still checked.
    """
    N = g.vertex_count
    if case == CASE1:
        if r is None or s is None:
            if tau is None:
                raise ValueError("case 1 needs the mixing time tau")
            r0, s0 = case1_lengths(int(tau), N)
            r = r0 if r is None else r
            s = s0 if s is None else s
        if r <= 0 or r - 3 * s < 1:
            raise ScheduleInfeasible(f"case 1 schedule infeasible: r={r}, s={s} (need r - 3s >= 1)")
        J = horizon // r
        windows = [range((i - 1) * r + 2 * s + 1, i * r - s + 1) for i in range(1, J + 1)]
        gaps = []
        if J:
            gaps = ([range(0, 2 * s + 1)]
                    + [range(i * r - s + 1, i * r + 2 * s + 1) for i in range(1, J)]
                    + [range(J * r - s + 1, J * r + 1)])
        return SegmentSchedule(CASE1, r, s=s, eta=eta, windows=windows, gaps=gaps)
    if case == CASE2:
        if g.kind != "torus":
            raise ValueError("case 2 is defined on tori")
        exploratory = g.d != 4
        if exploratory:
            warnings.warn("case 2 schedule on a torus with d != 4 (exploratory)")
        if g.n < 2:
            raise ScheduleInfeasible("torus too small")
        r0, w0 = case2_lengths(g.n, eta)
        r = r0 if r is None else r
        w = w0 if w is None else w
        if r <= 0:
            raise ScheduleInfeasible(f"case 2 schedule infeasible: r={r}")
        J = (horizon + 1) // r
        windows = [range((i - 1) * r, i * r) for i in range(1, J + 1)]
        return SegmentSchedule(CASE2, r, w=w, eta=eta, windows=windows, exploratory=exploratory)
    raise ValueError(f"unknown case {case}")


# --- indicators and retained sets ---------------------------------------------


@dataclass
class SegmentAnalysis:
    schedule: SegmentSchedule
    indicators: np.ndarray  # (J+1, J+1) bool, entry [i, j] for 1 <= i < j
    retained: list  # S_0..S_J as sorted tuples
    lengths: list  # per-segment loop-erased lengths, index 1..J (0 unused)
    vertex_sets: list = field(repr=False, default_factory=list)


def segment_paths(steps, schedule: SegmentSchedule) -> list:
    """Loop-erased vertex path of each window (LE_s in case 1, LE in case 2)."""
    steps = np.asarray(steps)
    out = []
    for A in schedule.windows:
        if A.stop - 1 + (schedule.s if schedule.case == CASE1 else 0) >= len(steps):
            raise ValueError("trajectory does not cover the schedule")
        if schedule.case == CASE1:
            _, verts = local_loop_erasure(steps, A, schedule.s)
        else:
            verts = loop_erase(steps[A.start:A.stop].tolist())
        out.append(verts)
    return out


def _indicators(steps, schedule, paths):
    J = schedule.J
    I = np.zeros((J + 1, J + 1), dtype=bool)
    erased = [np.unique(np.asarray(p, dtype=np.int64)) for p in paths]
    visited = [np.unique(steps[A.start:A.stop]) for A in schedule.windows]
    for j in range(2, J + 1):
        for i in range(1, j):
            if schedule.case == CASE2 and i == j - 1:
                continue
            a, b = erased[i - 1], visited[j - 1]
            if a.size == 0:
                continue
            # binary search of the erased segment in the visited set
            idx = np.searchsorted(b, a)
            idx[idx == b.size] = 0
            I[i, j] = bool(np.any(b[idx] == a))
    return I


def segment_indicators(traj, schedule: SegmentSchedule) -> np.ndarray:
    steps = np.asarray(traj.steps if hasattr(traj, "steps") else traj)
    return _indicators(steps, schedule, segment_paths(steps, schedule))


def retained_sets(indicators, J: int) -> list:
    """S_0..S_J: S_j keeps k in S_{j-1} unless some i in S_{j-1}, 1 <= i <= k,
    has I[i, j] = 1; then j is added."""
    I = np.asarray(indicators, dtype=bool)
    S = [(0,)]
    for j in range(1, J + 1):
        prev = S[-1]
        cut = None
        for i in prev:
            if i >= 1 and I[i, j]:
                cut = i
                break
        kept = prev if cut is None else tuple(k for k in prev if k < cut)
        S.append(kept + (j,))
    return S


def analyze_segments(traj, schedule: SegmentSchedule) -> SegmentAnalysis:
    steps = np.asarray(traj.steps if hasattr(traj, "steps") else traj)
    paths = segment_paths(steps, schedule)
    I = _indicators(steps, schedule, paths)
    return SegmentAnalysis(schedule, I, retained_sets(I, schedule.J),
                           [0] + [len(p) for p in paths], paths)


# --- capacity and constants ---------------------------------------------------


@numba.njit(cache=True)
def _hits(code, d, n, deg, starts, choices, mask):
    reps, T = choices.shape
    out = np.zeros(reps, dtype=np.bool_)
    for rep in range(reps):
        v = starts[rep]
        if mask[v]:
            out[rep] = True
            continue
        for t in range(T):
            k = choices[rep, t]
            if k < deg:
                v = _neighbor(code, d, n, v, k)
                if mask[v]:
                    out[rep] = True
                    break
    return out


def estimate_capacity(g: GraphModel, V, run_length: int, replicates: int, rng,
                      chunk: int = 2048) -> tuple:
    """Monte Carlo P(stationary lazy walk W_0..W_run_length hits V).

    Returns ``(estimate, stderr)``.  Walks do not depend on V, so at a fixed
    seed the estimate is monotone in V.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    V = np.unique(np.asarray(list(V), dtype=np.int64))
    if V.size == 0:
        return 0.0, 0.0
    mask = np.zeros(g.vertex_count, dtype=np.bool_)
    mask[V] = True
    hits = 0
    done = 0
    while done < replicates:
        k = min(chunk, replicates - done)
        starts = rng.integers(0, g.vertex_count, size=k)
        choices = rng.integers(0, 2 * g.degree, size=(k, run_length))
        hits += int(_hits(g.code, g.d, g.n, g.degree, starts, choices, mask).sum())
        done += k
    p = hits / replicates
    return p, math.sqrt(p * (1 - p) / replicates)


@dataclass
class ScalingConstants:
    gamma: float
    alpha: float
    a: float
    b: float
    d: float
    m: int
    stderr_gamma: float = float("nan")
    stderr_alpha: float = float("nan")
    case: int = CASE1

    @classmethod
    def from_estimates(cls, gamma, alpha, case, r=None, N=None, n=None,
                       stderr_gamma=float("nan"), stderr_alpha=float("nan")):
        if gamma <= 0 or alpha <= 0:
            raise ValueError("gamma and alpha must be positive")
        a = alpha**-0.5
        b = alpha**0.5 / gamma
        if case == CASE1:
            d = r * alpha**0.5 * N**-0.5
            m = math.ceil(d**-2)
        else:
            d = alpha**0.5 * math.log(n) ** (-1 / 11)
            m = math.floor(d**-2)
        return cls(gamma, alpha, a, b, d, int(m), stderr_gamma, stderr_alpha, case)

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "alpha": self.alpha, "a": self.a, "b": self.b,
                "d": self.d, "m": self.m, "stderr_gamma": self.stderr_gamma,
                "stderr_alpha": self.stderr_alpha}


def _stderr(x):
    return float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")


def estimate_constants(g: GraphModel, case: int, schedule: SegmentSchedule, replicates: int,
                       rng, cap_replicates: int = 200) -> ScalingConstants:
    """Replicate means of the first segment's loop-erased length and capacity.

    Each replicate walks from a uniform vertex over the first window (plus
    the case-1 lookback/lookahead), erases it, and estimates the capacity of
    the erased vertex set with ``cap_replicates`` stationary walks.
    """
    N = g.vertex_count
    r = schedule.r
    run = schedule.capacity_run_length
    if run < 1 and case == CASE2:
        raise ScheduleInfeasible(f"capacity run length r - 2w = {run} < 1")
    if case == CASE1:
        A = range(2 * schedule.s + 1, r - schedule.s + 1)
        T = r
    else:
        A = range(0, r)
        T = r - 1
    lengths = np.empty(replicates)
    caps = np.empty(replicates)
    for k in range(replicates):
        steps = walk_steps(g, int(rng.integers(0, N)), T, rng)
        if case == CASE1:
            _, verts = local_loop_erasure(steps, A, schedule.s)
        else:
            verts = loop_erase(steps.tolist())
        lengths[k] = len(verts)
        caps[k] = estimate_capacity(g, verts, run, cap_replicates, rng)[0]
    if case == CASE1:
        len_scale, cap_scale = 1.0 / r, N / r**2
    else:
        logn = math.log(g.n)
        len_scale, cap_scale = 1.0 / (g.n**2 * logn ** (5 / 66)), logn ** (2 / 11)
    gamma = float(lengths.mean() * len_scale)
    alpha = float(caps.mean() * cap_scale)
    return ScalingConstants.from_estimates(
        gamma, alpha, case, r=r, N=N, n=g.n,
        stderr_gamma=_stderr(lengths) * len_scale, stderr_alpha=_stderr(caps) * cap_scale)
