"""Lazy random walk, exact transition profiles and the uniform mixing time."""

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .graphs import GraphModel, _check_vertex, _neighbor
from .rng import make_rng

PROFILE_LIMIT = 10**7
PROB_TOL = 1e-12


@dataclass
class Trajectory:
    graph: GraphModel
    start: int
    steps: np.ndarray  # X_0..X_T, X_0 == start
    seed: int | None = None

    def __len__(self):
        return len(self.steps)

    @property
    def T(self) -> int:
        return len(self.steps) - 1


def lazy_step(g: GraphModel, v: int, rng) -> int:
    """One step of the lazy walk.

    A single draw k in [0, 2*degree) decides the move: k < degree moves to
    the k-th neighbour, anything else stays.  This matches the stream
    consumed by `walk_trajectory`.
    """
    k = int(rng.integers(0, 2 * g.degree))
    if k >= g.degree:
        return v
    return int(_neighbor(g.code, g.d, g.n, v, k))


@numba.njit(cache=True)
def _walk(code, d, n, deg, start, choices):
    out = np.empty(choices.shape[0] + 1, dtype=np.int64)
    v = start
    out[0] = v
    for t in range(choices.shape[0]):
        k = choices[t]
        if k < deg:
            v = _neighbor(code, d, n, v, k)
        out[t + 1] = v
    return out


@numba.njit(cache=True)
def _walk_many(code, d, n, deg, starts, choices):
    reps, T = choices.shape
    out = np.empty((reps, T + 1), dtype=np.int64)
    for r in range(reps):
        v = starts[r]
        out[r, 0] = v
        for t in range(T):
            k = choices[r, t]
            if k < deg:
                v = _neighbor(code, d, n, v, k)
            out[r, t + 1] = v
    return out


def walk_steps(g: GraphModel, start: int, T: int, rng) -> np.ndarray:
    if T < 0:
        raise ValueError("T must be nonnegative")
    choices = rng.integers(0, 2 * g.degree, size=T)
    return _walk(g.code, g.d, g.n, g.degree, int(start), choices)


def walk_trajectory(g: GraphModel, start: int, T: int, seed: int) -> Trajectory:
    """Lazy walk X_0..X_T from ``start``; the seed fixes it bit for bit."""
    _check_vertex(g, start)
    if T > 2**40:
        raise OverflowError("step count too large")
    steps = walk_steps(g, start, T, make_rng(seed))
    return Trajectory(g, int(start), steps, seed)


def walk_batch(g: GraphModel, starts, T: int, rng) -> np.ndarray:
    """Independent lazy walks, one row per start vertex, shape (len(starts), T+1)."""
    starts = np.asarray(starts, dtype=np.int64)
    choices = rng.integers(0, 2 * g.degree, size=(len(starts), T))
    return _walk_many(g.code, g.d, g.n, g.degree, starts, choices)


# --- exact transition profiles -------------------------------------------------


def _guard(g: GraphModel):
    if g.vertex_count > PROFILE_LIMIT:
        raise ValueError(f"{g} exceeds the dense profile limit of {PROFILE_LIMIT} vertices")


def torus_eigenvalues(g: GraphModel) -> np.ndarray:
    """Eigenvalues 1/2 + (1/2d) sum_j cos(2 pi k_j / n), shaped (n,)*d."""
    c = np.cos(2 * np.pi * np.arange(g.n) / g.n)
    lam = np.zeros((g.n,) * g.d)
    for axis in range(g.d):
        shape = [1] * g.d
        shape[axis] = g.n
        lam = lam + c.reshape(shape)
    return 0.5 + lam / (2 * g.d)


def _kernel_apply(g: GraphModel, p: np.ndarray) -> np.ndarray:
    # one step p -> pK for the non-torus families
    if g.kind == "complete":
        return 0.5 * p + (p.sum() - p) / (2 * (g.m - 1))
    idx = np.arange(g.vertex_count)
    acc = np.zeros_like(p)
    for b in range(g.d):
        acc += p[idx ^ (1 << b)]
    return 0.5 * p + acc / (2 * g.d)


def transition_profiles(g: GraphModel, t_max: int):
    """Yield p_t(.) = P(X_t = . | X_0 = 0) for t = 0..t_max (inclusive)."""
    _guard(g)
    N = g.vertex_count
    if g.kind == "torus":
        lam = torus_eigenvalues(g)
        power = np.ones_like(lam)
        for _ in range(t_max + 1):
            # the point mass at 0 has all-ones Fourier transform
            yield np.fft.ifftn(power).real.ravel()
            power = power * lam
    else:
        p = np.zeros(N)
        p[0] = 1.0
        for _ in range(t_max + 1):
            yield p
            p = _kernel_apply(g, p)


def transition_profile(g: GraphModel, t: int) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if g.kind == "torus":
        _guard(g)
        lam = torus_eigenvalues(g)
        return np.fft.ifftn(lam**t).real.ravel()
    for p in transition_profiles(g, t):
        pass
    return p


def separation_deviation(p: np.ndarray) -> float:
    """sup_x |p(x)/pi(x) - 1| for the uniform stationary law."""
    return float(np.max(np.abs(len(p) * p - 1.0)))


@dataclass
class MixingReport:
    tau: int | None  # None: not reached by t_max
    separation_curve: list = field(default_factory=list)  # (t, deviation)
    t_max: int = 0

    @property
    def reached(self) -> bool:
        return self.tau is not None


def mixing_time(g: GraphModel, t_max: int | None = None) -> MixingReport:
    """Least t with sup-deviation <= 1/2.

    With ``t_max=None`` the search cap starts at 64 and doubles up to 2**20.
    The raw deviation curve up to tau (or the cap) is reported; no
    monotonicity is assumed.
    """
    if t_max is not None:
        return _scan(g, t_max)
    cap = 64
    while True:
        rep = _scan(g, cap)
        if rep.reached or cap >= 2**20:
            return rep
        cap *= 2


def _scan(g, t_max):
    curve = []
    for t, p in enumerate(transition_profiles(g, t_max)):
        dev = separation_deviation(p)
        curve.append((t, dev))
        if dev <= 0.5 + PROB_TOL:
            return MixingReport(t, curve, t_max)
    return MixingReport(None, curve, t_max)


def green_sum(g: GraphModel) -> float:
    """sup_x sum_{t=0}^{floor(sqrt N)} (t+1) p_t(x), computed exactly."""
    T = math.isqrt(g.vertex_count)
    acc = np.zeros(g.vertex_count)
    for t, p in enumerate(transition_profiles(g, T)):
        acc += (t + 1) * p
    return float(acc.max())
