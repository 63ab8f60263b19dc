import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lerwray.graphs import make_graph
from lerwray.loop_erasure import (LoopErasedState, le_push, length_process, length_sequence,
                                  local_loop_erasure, locally_retained, loop_erase,
                                  loop_erased_times, prefix_lengths_batch)
from lerwray.walk import walk_trajectory

from helpers import chronological_erase

sequences = st.lists(st.integers(0, 8), min_size=1, max_size=60)


@pytest.mark.parametrize("seq,expected", [
    (["a"], ["a"]),
    ([0, 1, 0, 2], [0, 2]),
    ([0, 1, 2, 1, 3], [0, 1, 3]),
    ([0, 0, 1], [0, 1]),
    ([5, 6, 7, 5], [5]),
])
def test_loop_erase_examples(seq, expected):
    assert loop_erase(seq) == expected


def test_empty_sequence_rejected():
    with pytest.raises(ValueError):
        loop_erase([])
    with pytest.raises(ValueError):
        length_sequence([])


def test_le_push_examples():
    st_ = le_push(LoopErasedState(), 4, 0)
    assert st_.path == [4] and st_.length_history == [1]
    st_ = LoopErasedState()
    for t, v in enumerate([0, 1, 2, 1]):
        le_push(st_, v, t)
    assert st_.path == [0, 1]
    assert st_.length_history == [1, 2, 3, 2]
    assert st_.retained_times == [0, 3]
    with pytest.raises(ValueError):
        le_push(st_, 0, 9)


@settings(max_examples=300, deadline=None)
@given(sequences)
def test_incremental_matches_definition(seq):
    state = LoopErasedState().extend(seq)
    assert state.path == loop_erase(seq) == chronological_erase(seq)
    assert state.length_history == [len(loop_erase(seq[:j + 1])) for j in range(len(seq))]
    assert list(length_sequence(seq)) == state.length_history
    assert list(prefix_lengths_batch(seq)) == state.length_history
    assert state.position_of == {v: k for k, v in enumerate(state.path)}


@settings(max_examples=200, deadline=None)
@given(sequences)
def test_erasure_properties(seq):
    le = loop_erase(seq)
    assert len(set(le)) == len(le)
    assert le[0] == seq[0] and le[-1] == seq[-1]
    assert loop_erase(le) == le
    # every consecutive pair of the erased path is a consecutive pair of the input
    steps = set(zip(seq[:-1], seq[1:]))
    assert all(p in steps for p in zip(le[:-1], le[1:]))
    Y = length_sequence(seq)
    assert np.all(np.diff(Y) <= 1)


@settings(max_examples=200, deadline=None)
@given(sequences)
def test_retained_times_spell_the_path(seq):
    state = LoopErasedState().extend(seq)
    times = loop_erased_times(seq)
    assert times == state.retained_times
    assert [seq[t] for t in times] == state.path
    assert all(a < b for a, b in zip(times[:-1], times[1:]))


def test_history_can_be_dropped():
    state = LoopErasedState(keep_history=False).extend([0, 1, 2, 0, 3])
    assert state.length_history is None and state.length == 2


def test_length_process_examples():
    assert np.all(length_process(np.zeros(50, dtype=np.int64)) == 1)
    assert np.array_equal(length_process(np.arange(50)), np.arange(1, 51))
    g = make_graph("torus", d=3, n=6)
    tr = walk_trajectory(g, 0, 2000, 8)
    assert np.array_equal(length_process(tr), prefix_lengths_batch(tr.steps))


def test_large_and_negative_ids_are_relabelled():
    seq = [10**15, -3, 10**15 + 1, -3, 7]
    assert list(length_sequence(seq)) == [1, 2, 3, 2, 3]


def _brute_retained(steps, window, s):
    out = []
    for u in window:
        back = chronological_erase(steps[max(0, u - s):u + 1])
        ahead = steps[u + 1:u + s + 1]
        if not any(v in back for v in ahead):
            out.append(u)
    return out


def test_local_erasure_hand_fixture():
    # one short loop 1 -> 2 -> 1 and a later return to 5
    steps = [0, 1, 2, 1, 3, 4, 5, 6, 5, 7]
    times, verts = local_loop_erasure(steps, range(2, 7), 2)
    assert times == [3, 4, 5]
    assert verts == [1, 3, 4]
    assert times == _brute_retained(steps, range(2, 7), 2)


def test_local_erasure_trivial_cases():
    steps = np.array([0, 1, 0, 1, 0, 2, 2, 3])
    times, _ = local_loop_erasure(steps, range(0, 8), 0)
    assert times == list(range(8))
    distinct = np.arange(30)
    for s in (1, 3, 7):
        times, verts = local_loop_erasure(distinct, range(5, 20), s)
        assert times == list(range(5, 20)) and verts == list(range(5, 20))
    with pytest.raises(ValueError):
        local_loop_erasure(distinct, range(25, 28), 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=12, max_size=40), st.integers(0, 4))
def test_local_erasure_matches_brute_force(steps, s):
    window = range(s, len(steps) - s)
    times, verts = local_loop_erasure(np.array(steps), window, s)
    assert times == _brute_retained(steps, window, s)
    assert verts == [steps[u] for u in times]
    assert all(locally_retained(steps, u, s) for u in times)
