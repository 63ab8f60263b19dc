"""Chronological loop erasure.

`loop_erase` follows the inductive definition directly: start at the
first point, jump to the successor of its *last* visit, repeat until the
final point is reached.  `LoopErasedState` is the incremental form used
while a walk is being generated; the numba kernels are the fast paths for
long trajectories.  Only integer equality of vertex ids is used.
"""

import numba
import numpy as np


def loop_erase(seq) -> list:
    """Loop-erasure LE(seq) of a nonempty sequence of vertex ids."""
    seq = list(seq)
    if not seq:
        raise ValueError("loop erasure of an empty sequence")
    last = {}
    for i, u in enumerate(seq):
        last[u] = i
    end = seq[-1]
    v = seq[0]
    out = [v]
    while v != end:
        v = seq[last[v] + 1]
        out.append(v)
    return out


def loop_erased_times(seq) -> list:
    """Times sigma_0 < sigma_1 < ... kept by the erasure; seq[times] == LE(seq)."""
    seq = list(seq)
    if not seq:
        raise ValueError("loop erasure of an empty sequence")
    last = {}
    for i, u in enumerate(seq):
        last[u] = i
    times = [last[seq[0]]]
    while times[-1] < len(seq) - 1:
        times.append(last[seq[times[-1] + 1]])
    return times


class LoopErasedState:
    """Loop-erased path of a growing walk prefix.

    ``retained_times[k]`` is the last time ``path[k]`` was visited, so the
    walk restricted to those times spells the path.  With
    ``keep_history=False`` only the current length is tracked.
    """

    def __init__(self, keep_history: bool = True):
        self.path = []
        self.position_of = {}
        self.retained_times = []
        self.length_history = [] if keep_history else None
        self.time = -1

    def __len__(self):
        return len(self.path)

    @property
    def length(self) -> int:
        return len(self.path)

    def push(self, v) -> int:
        """Append the next walk position; returns the new length Y_t."""
        self.time += 1
        k = self.position_of.get(v)
        if k is None:
            self.position_of[v] = len(self.path)
            self.path.append(v)
            self.retained_times.append(self.time)
        else:
            for w in self.path[k + 1:]:
                del self.position_of[w]
            del self.path[k + 1:]
            del self.retained_times[k + 1:]
            self.retained_times[k] = self.time
        if self.length_history is not None:
            self.length_history.append(len(self.path))
        return len(self.path)

    def extend(self, seq):
        for v in seq:
            self.push(v)
        return self


def le_push(state: LoopErasedState, v, time: int) -> LoopErasedState:
    if time != state.time + 1:
        raise ValueError(f"expected time {state.time + 1}, got {time}")
    state.push(v)
    return state


@numba.njit(cache=True)
def _le_lengths(seq, n_labels):
    # incremental erasure over labels in [0, n_labels)
    pos = np.full(n_labels, -1, dtype=np.int64)
    path = np.empty(seq.shape[0], dtype=np.int64)
    out = np.empty(seq.shape[0], dtype=np.int64)
    size = 0
    for t in range(seq.shape[0]):
        v = seq[t]
        k = pos[v]
        if k < 0:
            pos[v] = size
            path[size] = v
            size += 1
        else:
            for i in range(k + 1, size):
                pos[path[i]] = -1
            size = k + 1
        out[t] = size
    return out


@numba.njit(cache=True)
def _batch_prefix_lengths(seq, n_labels):
    # |LE(seq[:j+1])| for every j, each evaluated from the definition using
    # the last-visit table of that prefix
    last = np.full(n_labels, -1, dtype=np.int64)
    out = np.empty(seq.shape[0], dtype=np.int64)
    for j in range(seq.shape[0]):
        last[seq[j]] = j
        v = seq[0]
        count = 1
        while v != seq[j]:
            v = seq[last[v] + 1]
            count += 1
        out[j] = count
    return out


def _relabel(seq):
    seq = np.asarray(seq)
    if seq.size == 0:
        raise ValueError("loop erasure of an empty sequence")
    if seq.dtype.kind in "iu" and seq.min() >= 0 and seq.max() < 4 * seq.size + 1024:
        return seq.astype(np.int64), int(seq.max()) + 1
    _, inv = np.unique(seq, return_inverse=True)
    inv = inv.astype(np.int64).ravel()
    return inv, int(inv.max()) + 1


def length_sequence(seq) -> np.ndarray:
    """Y_0..Y_T for an arbitrary id sequence (fast incremental kernel)."""
    labels, n = _relabel(seq)
    return _le_lengths(labels, n)


def prefix_lengths_batch(seq) -> np.ndarray:
    """Same quantity as `length_sequence`, from the batch definition per prefix."""
    labels, n = _relabel(seq)
    return _batch_prefix_lengths(labels, n)


def length_process(traj) -> np.ndarray:
    """Y_t = |LE(X_0..X_t)| for every t of a trajectory."""
    steps = traj.steps if hasattr(traj, "steps") else traj
    return length_sequence(steps)


def locally_retained(steps, u: int, s: int) -> bool:
    """Whether LE(X_{max(0,u-s)..u}) misses X_{u+1..u+s}."""
    back = set(loop_erase(steps[max(0, u - s):u + 1]))
    return back.isdisjoint(steps[u + 1:u + s + 1])


def local_loop_erasure(traj, window, s: int):
    """Locally retained times of ``window`` and the vertex path LE_s(window).

    Returns ``(times, vertices)``; ``len(times)`` is |LE_s(window)|.
    """
    steps = traj.steps if hasattr(traj, "steps") else np.asarray(traj)
    window = list(window)
    if window and (window[0] < 0 or window[-1] + s >= len(steps)):
        raise ValueError("window plus lookahead exceeds the trajectory")
    steps_list = steps.tolist()
    times = [u for u in window if locally_retained(steps_list, u, s)]
    return times, [steps_list[u] for u in times]
