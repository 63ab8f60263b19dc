import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from lerwray.rayleigh import StepPath, rayleigh_cdf, rayleigh_values_at
from lerwray.rng import make_rng
from lerwray.segments import CASE1, CASE2, ScalingConstants
from lerwray.stats import (fdd_compare, ks_2samp_statistic, ks_critical_2samp, ks_statistic,
                           length_scale, modulus_w, path_from_series, rescale_lengths,
                           time_index, time_scale)


def naive_ks(samples, cdf):
    x = list(samples)
    n = len(x)
    worst = 0.0
    for xi in x:
        le = sum(1 for v in x if v <= xi) / n
        lt = sum(1 for v in x if v < xi) / n
        F = float(cdf(xi))
        worst = max(worst, abs(le - F), abs(lt - F))
    return worst


def uniform_cdf(x):
    return np.clip(x, 0, 1)


def test_ks_single_sample_at_median():
    assert ks_statistic([0.5], uniform_cdf) == 0.5
    assert ks_statistic([math.sqrt(2 * math.log(2))], rayleigh_cdf) == pytest.approx(0.5)


def test_ks_all_samples_at_top():
    for n in (1, 2, 7, 100):
        assert ks_statistic([1.0] * n, uniform_cdf) == pytest.approx(naive_ks([1.0] * n, uniform_cdf))
        assert ks_statistic([1.0] * n, uniform_cdf) == 1.0


def test_ks_sample_from_cdf():
    x = make_rng(2).random(10**5)
    assert ks_statistic(x, uniform_cdf) <= 0.01


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-0.5, 1.5), min_size=1, max_size=40))
def test_ks_matches_naive(x):
    assert abs(ks_statistic(x, uniform_cdf) - naive_ks(x, uniform_cdf)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=50),
       st.lists(st.integers(0, 6), min_size=1, max_size=50))
def test_two_sample_matches_scipy_with_ties(a, b):
    ours = ks_2samp_statistic(a, b)
    assert abs(ours - sps.ks_2samp(a, b).statistic) <= 1e-12
    assert ours == ks_2samp_statistic(b, a)


def test_two_sample_continuous_against_scipy():
    rng = make_rng(3)
    a, b = rng.normal(size=3000), rng.normal(0.05, 1, size=2000)
    assert ks_2samp_statistic(a, b) == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-12)
    assert ks_2samp_statistic(a, a) == 0.0
    with pytest.raises(ValueError):
        ks_2samp_statistic([], a)


def test_critical_value():
    # c(0.01) = 1.6276 for the asymptotic Kolmogorov law
    assert ks_critical_2samp(10**4, 10**4) == pytest.approx(1.6276 * math.sqrt(2e-4), rel=1e-3)


def test_scales():
    assert time_scale(CASE1, 2.0, N=10**4) == 200.0
    assert length_scale(CASE1, 1.0, N=10**4) == 100.0
    assert time_scale(CASE2, 1.0, n=10) == pytest.approx(100 * math.sqrt(math.log(10)))
    assert length_scale(CASE2, 2.0, n=10) == pytest.approx(50 * math.log(10) ** (1 / 6))
    assert list(time_index([0.0, 0.5, 1.0], CASE1, 1.5, N=10**4)) == [0, 75, 150]


def test_rescale_examples():
    z = rescale_lengths([0, 0], [1.0, 2.0], (1.0, 1.0), CASE1, N=10**4)
    assert np.all(z.Z == 0)
    z = rescale_lengths([500], [1.0], (1.0, 1.0), CASE1, N=10**4)
    assert z.Z[0] == 5.0 and z.M_n == 100.0
    consts = ScalingConstants.from_estimates(0.5, 1.0, CASE1, r=10, N=10**4)
    z2 = rescale_lengths([500], [1.0], consts, CASE1, N=10**4)
    assert consts.b == 2.0 and z2.Z[0] == 10.0
    with pytest.raises(ValueError):
        rescale_lengths([1], [1.0], (1.0, -1.0), CASE1, N=4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=20), st.floats(0.1, 10), st.floats(0.1, 10))
def test_rescale_is_linear(Y, b, c):
    z1 = rescale_lengths(Y, range(len(Y)), (1.0, b), CASE2, n=12).Z
    z2 = rescale_lengths([c * y for y in Y], range(len(Y)), (1.0, b), CASE2, n=12).Z
    assert np.allclose(z2, c * z1)
    z3 = rescale_lengths(Y, range(len(Y)), (1.0, 2 * b), CASE2, n=12).Z
    assert np.allclose(z3, 2 * z1)


def test_fdd_examples():
    x = make_rng(1).random((100, 3))
    rep = fdd_compare(x, x, [0.5, 1.0, 2.0], seeds={"base": 1})
    assert rep.ks == [0.0, 0.0, 0.0]
    assert rep.rows()[1] == (1.0, 0.0, 100, 100)
    a = rayleigh_values_at([1.0], 10**4, make_rng(5))
    b = rayleigh_values_at([1.0], 10**4, make_rng(6))
    r1, r2 = fdd_compare(a, b, [1.0]), fdd_compare(b, a, [1.0])
    assert r1.ks == r2.ks and r1.ks[0] <= 0.025
    with pytest.raises(ValueError):
        fdd_compare(a, b, [1.0, 2.0])


# --- modulus -----------------------------------------------------------------


def brute_modulus(path, theta, T, step):
    """Search every partition of a grid of multiples of ``step``; the
    oscillation of a cell is read off a grid ten times finer."""
    K = round(T / step)
    # boundaries as exact ratios so they coincide with jump times k/20
    fine = (np.arange(10 * K + 1) * T) / (10 * K)
    vals = path(fine)

    def osc(i, j):  # cell [t_i, t_j) with t_i = i T / K
        seg = vals[10 * i:10 * j]
        lim = path.left_limit((j * T) / K)
        return max(seg.max(), lim) - min(seg.min(), lim)

    need = theta / step - 1e-9
    best = {0: 0.0}
    for j in range(1, K + 1):
        opts = [max(best[i], osc(i, j)) for i in best if j - i >= need]
        if opts:
            best[j] = min(opts)
    return best[K]


def test_modulus_slope_case():
    path = StepPath(0.0, np.array([]), np.array([]), slope=1.0)
    assert abs(modulus_w(path, 0.3, 1.0) - 1 / 3) <= 1e-12
    # closed form c T / floor(T / theta) for slope-c paths
    for c, theta, T in ((2.0, 0.3, 1.0), (1.0, 0.25, 2.0), (0.5, 0.4, 3.0)):
        p = StepPath(1.0, np.array([]), np.array([]), slope=c)
        assert modulus_w(p, theta, T) == pytest.approx(c * T / math.floor(T / theta), abs=1e-12)


def test_modulus_free_tail():
    path = StepPath(0.0, np.array([]), np.array([]), slope=1.0)
    assert modulus_w(path, 0.3, 1.0, free_tail=True) == pytest.approx(0.3, abs=1e-12)


def test_modulus_single_jump():
    path = path_from_series([0.0, 0.5], [1.0, 0.4])
    assert modulus_w(path, 0.2, 1.0) == 0.0
    assert brute_modulus(path, 0.2, 1.0, 0.05) == 0.0


def test_modulus_two_close_jumps():
    path = path_from_series([0.0, 0.5, 0.6], [1.0, 0.6, 0.3])
    w = modulus_w(path, 0.2, 1.0)
    assert w >= 0.3 - 1e-12
    assert abs(w - brute_modulus(path, 0.2, 1.0, 0.05)) <= 1e-12
    assert abs(w - 0.3) <= 1e-12


def test_modulus_constant_and_range():
    flat = path_from_series([0.0], [2.0])
    assert modulus_w(flat, 0.3, 2.0) == 0.0
    with pytest.raises(ValueError):
        modulus_w(flat, 0.0, 1.0)
    with pytest.raises(ValueError):
        modulus_w(flat, 1.0, 1.0)
    with pytest.raises(ValueError):
        path_from_series([0.5], [1.0])


jump_paths = st.lists(st.tuples(st.integers(1, 39), st.floats(0.05, 1.0)), max_size=5, unique_by=lambda p: p[0])


def _step_path(jumps, slope):
    jumps = sorted(jumps)
    times = [k / 20 for k, _ in jumps]
    values, v, last = [], 1.0, 0.0
    for t, (_, size) in zip(times, jumps):
        v = v + slope * (t - last) - size
        values.append(v)
        last = t
    return StepPath(1.0, np.array(times), np.array(values), slope)


@settings(max_examples=60, deadline=None)
@given(jump_paths, st.sampled_from([0.0, 1.0]))
def test_modulus_properties(jumps, slope):
    path = _step_path(jumps, slope)
    T = 2.0
    pts = np.concatenate([path(np.linspace(0, T, 401)), path.left_limit(path.times),
                          path.values, [path.left_limit(T)]])
    total = pts.max() - pts.min()
    ws = [modulus_w(path, th, T) for th in (0.1, 0.2, 0.4, 0.8)]
    assert all(0 <= w <= total + 1e-12 for w in ws)
    assert all(a <= b + 1e-12 for a, b in zip(ws[:-1], ws[1:]))


@settings(max_examples=40, deadline=None)
@given(jump_paths)
def test_modulus_flat_paths_match_brute_force(jumps):
    # jump times on a 0.05 grid, theta a multiple of it: the grid search is exact
    path = _step_path(jumps, 0.0)
    for theta in (0.1, 0.25):
        assert abs(modulus_w(path, theta, 2.0) - brute_modulus(path, theta, 2.0, 0.05)) <= 1e-12
