"""Property-based checks of the transform and jitter invariants."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from npcmi.discrete import jitter, plugin_mi, recover
from npcmi.transform import rank_transform

finite = st.floats(-1e6, 1e6, allow_nan=False)
margins = arrays(np.float64, st.integers(2, 60), elements=finite).filter(lambda a: np.ptp(a) > 0)
pairs = arrays(np.int64, st.tuples(st.integers(1, 80), st.just(2)), elements=st.integers(-20, 20))


@given(margins)
def test_ranks_are_distinct_and_open(x):
    u = rank_transform(x)
    assert len(np.unique(u)) == x.size
    assert u.min() > 0 and u.max() < 1


# integer values keep these maps strictly increasing in floating point
int_margins = arrays(np.float64, st.integers(2, 60), elements=st.integers(-500, 500)).filter(lambda a: np.ptp(a) > 0)


@given(int_margins)
def test_ranks_invariant_under_increasing_maps(x):
    u = rank_transform(x)
    np.testing.assert_array_equal(u, rank_transform(x**3 + x))
    np.testing.assert_array_equal(u, rank_transform(np.exp(x / 100)))


@settings(max_examples=50)
@given(pairs, st.integers(0, 2**32))
def test_jitter_round_trip(data, seed):
    out = jitter(data, seed)
    back = np.column_stack([recover(out[:, j], data[:, j]) for j in range(2)])
    np.testing.assert_array_equal(back, data)
    assert plugin_mi(back) == plugin_mi(data)
