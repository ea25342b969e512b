import numpy as np
import pytest

from smclab._rng import generator
from smclab.probability import ChainSpec, Channel, Distribution


def random_distribution(rng, size):
    w = np.exp(rng.standard_normal(size))
    return Distribution(w / w.sum())


def random_channel(rng, n_in, n_out):
    rows = np.exp(rng.standard_normal((n_in, n_out)))
    return Channel(rows / rows.sum(axis=1, keepdims=True))


def random_chain(rng, u=2, v=2, x=2, y=2, z=2):
    return ChainSpec(
        p_u=random_distribution(rng, u),
        p_v_given_u=random_channel(rng, u, v),
        xi=random_channel(rng, v, x),
        w_y=random_channel(rng, x, y),
        w_z=random_channel(rng, x, z),
    )


@pytest.fixture
def rng():
    return generator(20240817)


@pytest.fixture
def simple_chain():
    """|U| = 1, V binary uniform, X = V, Bob BSC(0.1), Eve BSC(0.2)."""
    return ChainSpec(
        p_u=Distribution([1.0]),
        p_v_given_u=Channel([[0.5, 0.5]]),
        xi=Channel.identity(2),
        w_y=Channel.bsc(0.1),
        w_z=Channel.bsc(0.2),
    )
