import random
from fractions import Fraction

import pytest

from config import config
from ratimpl import init_toolkit
from ratimpl.models.environment import Environment, load_environment
from ratimpl.services.settings import SolverSettings

init_toolkit('testing')


@pytest.fixture(autouse=True)
def fresh_settings():
    SolverSettings.init_app(config['testing'])
    yield
    SolverSettings.init_app(config['testing'])


@pytest.fixture
def example():
    """Loader for bundled examples"""
    return load_environment


@pytest.fixture
def ex1a():
    return load_environment('ex1a')


@pytest.fixture
def ex1b():
    return load_environment('ex1b')


@pytest.fixture
def ex4():
    return load_environment('ex4')


@pytest.fixture
def rng():
    return random.Random(SolverSettings.get_settings().random_seed)


@pytest.fixture
def instances():
    return SolverSettings.get_settings().random_instances


def make_env(agents, states, outcomes, table, scf, name=None):
    """Environment from {agent: {state: [u(z) in outcome order]}}"""
    utility = {
        (i, z, s): Fraction(table[i][s][k])
        for i in agents for s in states for k, z in enumerate(outcomes)
    }
    return Environment(agents, states, outcomes, utility, scf, name=name)


@pytest.fixture
def dominance_env():
    """Three agents share a ranking that flips between the two states"""
    rows = {'t1': [1, 0], 't2': [0, 1]}
    agents = ['i1', 'i2', 'i3']
    return make_env(agents, ['t1', 't2'], ['a', 'b'], {i: rows for i in agents},
                    {'t1': 'a', 't2': 'b'}, name='unanimous')


@pytest.fixture
def env_factory():
    return make_env
