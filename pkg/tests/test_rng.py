import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from app.utils.rng import HALF_ULP, RoundStreams, make_generator, open_unit, raw_to_uniform


def test_draws_per_round_is_padded_to_multiple_of_four():
    assert RoundStreams(1, 5).draws_per_round == 8
    assert RoundStreams(1, 8).draws_per_round == 8
    assert RoundStreams(1, 1).draws_per_round == 4


def test_uniforms_shape_and_range():
    u = RoundStreams(7, 12).uniforms(0, 100)
    assert u.shape == (100, 12)
    assert (u >= 0.0).all() and (u < 1.0).all()


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
    start=st.integers(min_value=0, max_value=10 ** 9),
    split=st.integers(min_value=1, max_value=9),
)
def test_round_values_do_not_depend_on_partitioning(seed, start, split):
    streams = RoundStreams(seed, 12)
    whole = streams.uniforms(start, 10)
    parts = np.vstack([streams.uniforms(start, split), streams.uniforms(start + split, 10 - split)])
    np.testing.assert_array_equal(whole, parts)


def test_different_seeds_give_different_streams():
    a = RoundStreams(1, 8).uniforms(0, 4)
    b = RoundStreams(2, 8).uniforms(0, 4)
    assert not np.array_equal(a, b)


def test_open_unit_excludes_both_endpoints():
    extremes = raw_to_uniform(np.array([0, 2 ** 64 - 1], dtype=np.uint64))
    opened = open_unit(extremes)
    assert opened[0] == HALF_ULP
    assert 0.0 < opened[1] < 1.0


def test_make_generator_is_reproducible():
    assert make_generator(5).random() == make_generator(5).random()
