import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uskd.mzi import TWO_PI
from uskd.noise import NoiseModel, NoiseStream, sample, sample_batch, substream, trial_key

FULL = NoiseModel.iid(TWO_PI)
QUIET = NoiseModel.iid(0.0)


def wrapped_difference_cdf(x, n=200_001):
    """CDF of (a - b) mod 2pi, a, b ~ U[0, 2pi), by numerically folding the triangular density."""
    d = np.linspace(-TWO_PI, TWO_PI, n)
    tri = (TWO_PI - np.abs(d)) / TWO_PI**2
    folded_x = np.mod(d, TWO_PI)
    order = np.argsort(folded_x)
    fx, fd = folded_x[order], tri[order]
    w = np.gradient(d)[order]
    cdf = np.cumsum(fd * w)
    cdf /= cdf[-1]
    return np.interp(x, fx, cdf)


def test_zero_range_gives_zeros():
    nv = sample(substream(1, 0), QUIET, QUIET)
    assert (nv.zeta1, nv.zeta2, nv.zeta_alpha, nv.zeta_beta) == (0.0, 0.0, 0.0, 0.0)


def test_same_seed_and_trial_reproduce():
    a = sample_batch(substream(42, 7), FULL, FULL, 500)
    b = sample_batch(substream(42, 7), FULL, FULL, 500)
    for arm in ("zeta1", "zeta2", "zeta_alpha", "zeta_beta"):
        assert np.array_equal(getattr(a, arm), getattr(b, arm))


def test_batch_equals_sequential():
    seq = substream(3, 1)
    singles = [sample(seq, FULL, NoiseModel.walk(0.05)) for _ in range(50)]
    batch = sample_batch(substream(3, 1), FULL, NoiseModel.walk(0.05), 50)
    for k, s in enumerate(singles):
        assert s == batch.row(k)


def test_trials_differ_and_are_order_free():
    first = sample_batch(substream(9, 1), FULL, FULL, 100).zeta1
    second = sample_batch(substream(9, 2), FULL, FULL, 100).zeta1
    assert np.all(first != second)
    # creating other streams in between does not matter
    substream(9, 5).uniforms(1000)
    again = sample_batch(substream(9, 1), FULL, FULL, 100).zeta1
    assert np.array_equal(first, again)


def test_trial_streams_uncorrelated():
    a = substream(123, 0).uniforms(10_000)
    b = substream(123, 1).uniforms(10_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


def test_cursor_counts_and_restores():
    s = substream(5, 5)
    s.uniforms(10)
    sample(s, FULL, FULL)
    assert s.cursor == 14
    resumed = NoiseStream(5, 5, cursor=14)
    assert np.array_equal(resumed.uniforms(8), s.uniforms(8))


def test_per_arm_difference_law():
    nv = sample_batch(substream(2024, 0), FULL, FULL, 100_000)
    zdp = np.sort(nv.zeta_double_prime)
    emp = np.arange(1, zdp.size + 1) / zdp.size
    ks = np.max(np.abs(emp - wrapped_difference_cdf(zdp)))
    assert ks < 0.01


def test_direct_mode():
    nv = sample_batch(substream(8, 0), FULL, NoiseModel.iid(math.pi / 2), 10_000, "direct")
    assert np.all(nv.zeta_beta == 0.0)
    assert np.all((nv.zeta_alpha >= 0) & (nv.zeta_alpha < math.pi / 2))
    assert np.array_equal(nv.zeta_double_prime, nv.zeta_alpha)


@pytest.mark.parametrize("R", [0.1, 1.0, math.pi, TWO_PI])
def test_range_control(R):
    x = sample_batch(substream(77, 0), NoiseModel.iid(R), QUIET, 20_000).zeta1
    assert np.all((x >= 0) & (x < R))
    sigma = R / math.sqrt(12) / math.sqrt(x.size)
    assert abs(x.mean() - R / 2) < 3 * sigma


def test_walk_steps_and_bounds():
    step, bound = 0.02, 1.5
    nv = sample_batch(substream(6, 0), NoiseModel.walk(step, bound), QUIET, 20_000)
    x = nv.zeta1
    assert np.all((x >= 0) & (x <= bound))
    assert np.max(np.abs(np.diff(x))) <= step + 1e-12
    # continues across calls
    s = substream(6, 0)
    a = sample_batch(s, NoiseModel.walk(step, bound), QUIET, 10).zeta1
    b = sample_batch(s, NoiseModel.walk(step, bound), QUIET, 10).zeta1
    assert abs(b[0] - a[-1]) <= step + 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="iid", range=-0.1), dict(kind="iid", range=7.0), dict(kind="walk", step=0.0), dict(kind="walk", bound=0.0), dict(kind="pink")],
)
def test_invalid_models(kwargs):
    with pytest.raises(ValueError):
        NoiseModel(**kwargs)


def test_invalid_stream_args():
    with pytest.raises(ValueError):
        substream(-1, 0)
    with pytest.raises(ValueError):
        substream(0, 1 << 64)
    with pytest.raises(ValueError):
        sample_batch(substream(0, 0), FULL, FULL, 3, "sideways")
    with pytest.raises(ValueError):
        trial_key(1 << 20)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**40), st.floats(0, TWO_PI), st.floats(0, TWO_PI))
def test_samples_finite_and_in_range(seed, trial, rc, rq):
    nv = sample_batch(substream(seed, trial), NoiseModel.iid(rc), NoiseModel.iid(rq), 64)
    for arm, r in (("zeta1", rc), ("zeta2", rc), ("zeta_alpha", rq), ("zeta_beta", rq)):
        x = getattr(nv, arm)
        assert np.all(np.isfinite(x))
        assert np.all(x >= 0) and (r == 0 and np.all(x == 0) or np.all(x < r))


def test_trial_key_packing_unique():
    keys = {trial_key(a, b, c) for a in range(3) for b in range(3) for c in range(3)}
    assert len(keys) == 27
