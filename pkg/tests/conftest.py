import numpy as np
import pytest
from hypothesis import settings, strategies as st

from entbroadcast.states import bell_weights, sample_random_state

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def random_states(draw, sampler=None):
    s = draw(seeds)
    smp = sampler or draw(st.sampled_from(["hs", "bloch"]))
    return sample_random_state(s, smp)


@st.composite
def bell_triples(draw):
    c = draw(st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3))
    lam = bell_weights(*c)
    if lam.min() < 0:
        # fold into the valid tetrahedron by mixing with the centre
        t = 1.0 / (1.0 - 4.0 * lam.min())
        c = tuple(t * x for x in c)
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
