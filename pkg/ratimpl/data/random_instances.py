"""
Seeded random environments and games for the property suites
"""

import random
from fractions import Fraction
from itertools import product
from typing import Optional

from ratimpl.models.environment import Environment
from ratimpl.models.game import FiniteGame

LOW, HIGH = -3, 3


def random_environment(
    rng: random.Random,
    agents: int = 3,
    max_states: int = 4,
    max_outcomes: int = 3,
    responsive: bool = False,
    nwa: bool = False,
    name: Optional[str] = None,
    attempts: int = 100,
) -> Environment:
    """Integer utilities in [LOW, HIGH]; f takes at least two values"""
    for _ in range(attempts):
        outcomes = [f'z{k}' for k in range(1, rng.randint(2, max_outcomes) + 1)]
        top = min(max_states, len(outcomes)) if responsive else max_states
        states = [f't{k}' for k in range(1, rng.randint(2, top) + 1)]
        if responsive:
            scf = dict(zip(states, rng.sample(outcomes, len(states))))
        else:
            scf = {state: rng.choice(outcomes) for state in states}
        if len(set(scf.values())) < 2:
            continue

        ids = [f'i{k}' for k in range(1, agents + 1)]
        utility = {
            (i, z, s): Fraction(rng.randint(LOW, HIGH))
            for i, z, s in product(ids, outcomes, states)
        }
        if nwa:
            # lift f(s) above some other outcome wherever it is a worst one
            for i, s in product(ids, states):
                chosen = utility[(i, scf[s], s)]
                if all(chosen <= utility[(i, z, s)] for z in outcomes):
                    other = rng.choice([z for z in outcomes if z != scf[s]])
                    utility[(i, scf[s], s)] = Fraction(HIGH)
                    utility[(i, other, s)] = min(utility[(i, other, s)], Fraction(HIGH - 1))
        return Environment(ids, states, outcomes, utility, scf, name=name)
    raise RuntimeError(f'no environment found in {attempts} attempts')


def random_game(rng: random.Random, max_players: int = 3, max_strategies: int = 4,
                name: Optional[str] = None) -> FiniteGame:
    """Payoff game with integer payoffs in [LOW, HIGH]"""
    players = [f'p{k}' for k in range(1, rng.randint(2, max_players) + 1)]
    strategies = {
        p: [f'{p}s{k}' for k in range(1, rng.randint(1, max_strategies) + 1)]
        for p in players
    }
    payoffs = {
        profile: [rng.randint(LOW, HIGH) for _ in players]
        for profile in product(*(strategies[p] for p in players))
    }
    return FiniteGame.from_payoffs(players, strategies, payoffs, name=name)
