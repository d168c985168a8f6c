from fractions import Fraction

import pytest

from ratimpl.data.random_instances import random_game
from ratimpl.errors import UnsupportedBeliefModel
from ratimpl.models.game import FiniteGame
from ratimpl.models.lottery import Lottery
from ratimpl.models.partition import Partition
from ratimpl.services.lemma_y import SCF_IMAGE, SigmaSet, build_lemma_y
from ratimpl.services.mechanism import THEOREM1, THEOREM2, CanonicalMechanism, Message, mechanism_game
from ratimpl.services.rationalizability import (
    best_reply_witness, check_implementation, check_lemma_properties, find_dominance_certificate,
    has_best_reply_property, solve_rationalizable
)
from ratimpl.services.settings import SolverSettings

AGENTS = ['i1', 'i2', 'i3']


def two_player(rows, cols, table):
    """Row/column game from {(r, c): (u_row, u_col)}"""
    return FiniteGame.from_payoffs(['row', 'col'], {'row': rows, 'col': cols}, table)


def random_sets(rng, game):
    """A random nonempty subset of every player's strategies"""
    sets = {}
    for player in game.players:
        listed = game.strategies[player]
        kept = tuple(s for s in listed if rng.random() < 0.5)
        sets[player] = kept or (rng.choice(listed),)
    return sets


def pure_equilibria(game):
    found = []
    for profile in game.profiles():
        stable = True
        for player in game.players:
            k = game.player_index(player)
            current = game.payoff(player, profile)
            if any(game.payoff(player, profile[:k] + (s,) + profile[k + 1:]) > current
                   for s in game.strategies[player]):
                stable = False
                break
        if stable:
            found.append({p: (profile[game.player_index(p)],) for p in game.players})
    return found


@pytest.fixture
def pennies():
    return two_player(['H', 'T'], ['H', 'T'], {
        ('H', 'H'): (1, -1), ('H', 'T'): (-1, 1), ('T', 'H'): (-1, 1), ('T', 'T'): (1, -1),
    })


@pytest.fixture
def dilemma():
    return FiniteGame.from_payoffs(['p1', 'p2'], {'p1': ['C', 'D'], 'p2': ['C', 'D']}, {
        ('C', 'C'): (3, 3), ('C', 'D'): (0, 5), ('D', 'C'): (5, 0), ('D', 'D'): (1, 1),
    })


@pytest.fixture
def mixed_only():
    """B is beaten by the half-half mix of T and M but by neither alone"""
    return two_player(['T', 'M', 'B'], ['L', 'R'], {
        ('T', 'L'): (3, 0), ('T', 'R'): (0, 0),
        ('M', 'L'): (0, 0), ('M', 'R'): (3, 0),
        ('B', 'L'): (1, 0), ('B', 'R'): (1, 0),
    })


@pytest.fixture
def chain():
    return two_player(['U', 'D'], ['L', 'R'], {
        ('U', 'L'): (1, 1), ('U', 'R'): (1, 0), ('D', 'L'): (0, 0), ('D', 'R'): (0, 2),
    })


class TestSolver:
    def test_pennies_keep_everything(self, pennies):
        solved = solve_rationalizable(pennies)
        assert solved.survivors == {'row': ('H', 'T'), 'col': ('H', 'T')}
        assert solved.trace == []
        assert solved.verify(pennies)

    def test_dilemma(self, dilemma):
        solved = solve_rationalizable(dilemma)
        assert solved.survivors == {'p1': ('D',), 'p2': ('D',)}
        assert [(r.round, r.player, r.strategy) for r in solved.trace] == [(1, 'p1', 'C'), (1, 'p2', 'C')]
        certificate = solved.trace[0].certificate
        assert certificate.mixture == (('D', Fraction(1)),)
        assert certificate.margin == 1
        assert has_best_reply_property(dilemma, solved.survivors)
        assert not has_best_reply_property(dilemma, dilemma.strategies)

    def test_constant_payoffs(self):
        game = two_player(['a', 'b'], ['c', 'd'], {
            (r, c): (0, 0) for r in ['a', 'b'] for c in ['c', 'd']
        })
        assert solve_rationalizable(game).survivors == {'row': ('a', 'b'), 'col': ('c', 'd')}

    def test_mixed_domination(self, mixed_only):
        solved = solve_rationalizable(mixed_only)
        assert solved['row'] == ('T', 'M')
        certificate = solved.trace[0].certificate
        assert dict(certificate.mixture) == {'T': Fraction(1, 2), 'M': Fraction(1, 2)}
        assert certificate.margin == Fraction(1, 2)
        assert certificate.verify(mixed_only, mixed_only.strategies)

    def test_mixed_belief_witness(self, mixed_only):
        witness = best_reply_witness(mixed_only, 'row', 'T', mixed_only.strategies)
        assert witness.verify(mixed_only, mixed_only.strategies)
        assert best_reply_witness(mixed_only, 'row', 'B', mixed_only.strategies) is None

    def test_chain(self, chain):
        solved = solve_rationalizable(chain)
        assert solved.survivors == {'row': ('U',), 'col': ('L',)}
        assert [(r.round, r.player, r.strategy) for r in solved.trace] == [(1, 'row', 'D'), (2, 'col', 'R')]
        assert solved.verify(chain)

    @pytest.mark.parametrize('seed', [0, 1, 7])
    def test_sequential_matches_simultaneous(self, chain, seed):
        solved = solve_rationalizable(chain, order='sequential', seed=seed)
        assert solved.survivors == {'row': ('U',), 'col': ('L',)}
        assert len(solved.trace) == 2

    def test_order_independence(self, rng):
        for _ in range(20):
            game = random_game(rng)
            simultaneous = solve_rationalizable(game, certificates=False)
            sequential = solve_rationalizable(game, order='sequential', seed=3, certificates=False)
            assert simultaneous.survivors == sequential.survivors

    def test_contains_every_best_reply_closed_set(self, rng):
        checked = 0
        for _ in range(40):
            game = random_game(rng)
            solved = solve_rationalizable(game, certificates=False)
            candidates = [random_sets(rng, game) for _ in range(10)] + pure_equilibria(game)
            for sets in candidates:
                if not has_best_reply_property(game, sets):
                    continue
                checked += 1
                assert all(set(sets[p]) <= set(solved[p]) for p in game.players)
        assert checked

    def test_certificates_optional(self, dilemma):
        solved = solve_rationalizable(dilemma, certificates=False)
        assert all(record.certificate is None for record in solved.trace)

    def test_unknown_order(self, dilemma):
        with pytest.raises(ValueError):
            solve_rationalizable(dilemma, order='random')

    def test_foreign_strategy(self, dilemma):
        with pytest.raises(ValueError):
            best_reply_witness(dilemma, 'p1', 'X', dilemma.strategies)

    def test_serialized(self, dilemma):
        data = solve_rationalizable(dilemma)._serialize()
        assert data['survivors'] == {'p1': ['D'], 'p2': ['D']}
        assert data['trace'][0]['certificate']['margin'] == '1'


class TestDuality:
    def test_random_games(self, rng):
        for _ in range(25):
            game = random_game(rng)
            for player in game.players:
                for s in game.strategies[player]:
                    witness = best_reply_witness(game, player, s, game.strategies)
                    certificate = find_dominance_certificate(game, player, s, game.strategies)
                    assert (witness is None) != (certificate is None)
                    if certificate is not None:
                        assert certificate.verify(game, game.strategies)
                    else:
                        assert witness.verify(game, game.strategies)


class TestBeliefModels:
    def test_independent_two_players(self, dilemma):
        SolverSettings.override(belief_model='independent')
        assert solve_rationalizable(dilemma).survivors == {'p1': ('D',), 'p2': ('D',)}

    def test_independent_three_players(self):
        SolverSettings.override(belief_model='independent')
        game = FiniteGame.from_payoffs(AGENTS, {i: ['x'] for i in AGENTS}, {('x', 'x', 'x'): (0, 0, 0)})
        with pytest.raises(UnsupportedBeliefModel):
            solve_rationalizable(game)

    def test_unknown_model(self, dilemma):
        SolverSettings.override(belief_model='bayesian')
        with pytest.raises(ValueError):
            solve_rationalizable(dilemma)


def dictatorship(env, dictator='i1'):
    """Every agent votes; the dictator's vote is the outcome"""
    k = env.agent_index(dictator)
    strategies = {i: list(env.outcomes) for i in env.agents}
    return {
        state: FiniteGame.from_outcomes(env.agents, strategies, lambda p: Lottery.degenerate(p[k]), env, state)
        for state in env.states
    }


def constant(env):
    strategies = {i: list(env.outcomes) for i in env.agents}
    return {
        state: FiniteGame.from_outcomes(env.agents, strategies, lambda p: Lottery.degenerate('a'), env, state)
        for state in env.states
    }


@pytest.fixture
def duplicated(env_factory):
    rows = {'t1': [1, 0], 't2': [0, 1], 't3': [1, 0]}
    return env_factory(AGENTS, ['t1', 't2', 't3'], ['a', 'b'], {i: rows for i in AGENTS},
                       {'t1': 'a', 't2': 'b', 't3': 'a'})


class TestImplementation:
    def test_dictatorship_implements(self, dominance_env):
        report = check_implementation(dominance_env, dictatorship(dominance_env))
        assert report.holds
        assert report.survivors['t1']['i1'] == ('a',)
        assert report.survivors['t2']['i1'] == ('b',)
        assert report.survivors['t1']['i2'] == ('a', 'b')
        assert report._serialize()['offending_profiles'] == {}

    def test_constant_fails(self, dominance_env):
        report = check_implementation(dominance_env, constant(dominance_env))
        assert report.per_state == {'t1': True, 't2': False}
        assert len(report.offending['t2']) == 8

    def test_offending_listing_is_capped(self, dominance_env):
        report = check_implementation(dominance_env, constant(dominance_env), listed=3)
        assert len(report.offending['t2']) == 3

    def test_payoff_games_rejected(self, dominance_env, dilemma):
        with pytest.raises(ValueError):
            check_implementation(dominance_env, {'t1': dilemma, 't2': dilemma})


class TestLemmaProperties:
    def test_verified(self, duplicated):
        report = check_lemma_properties(duplicated, dictatorship(duplicated))
        assert report.status == 'verified'
        pair = next(row for row in report.inclusions if (row['state'], row['other_state']) == ('t1', 't3'))
        assert pair['included'] and pair['equal']

    def test_not_applicable(self, dominance_env):
        report = check_lemma_properties(dominance_env, constant(dominance_env))
        assert report.status == 'not applicable'
        assert not report.holds

    def test_inactive_agents_are_powerless(self, env_factory):
        table = {
            'i1': {'t1': [1, 0], 't2': [0, 1]},
            'i2': {'t1': [1, 0], 't2': [0, 1]},
            'i3': {'t1': [0, 0], 't2': [0, 0]},
        }
        env = env_factory(AGENTS, ['t1', 't2'], ['a', 'b'], table, {'t1': 'a', 't2': 'b'})
        report = check_lemma_properties(env, dictatorship(env))
        assert report.status == 'verified'
        assert {(row['state'], row['agent']) for row in report.inactive} == {('t1', 'i3'), ('t2', 'i3')}
        assert all(row['full'] and row['constant'] for row in report.inactive)


class TestMechanismGames:
    @pytest.fixture
    def mech(self, env_factory):
        table = {
            'i1': {'t1': [1, 0, 2], 't2': [0, 1, 2]},
            'i2': {'t1': [1, 0, 0], 't2': [0, 1, 0]},
            'i3': {'t1': [1, 0, 0], 't2': [0, 1, 0]},
        }
        env = env_factory(AGENTS, ['t1', 't2'], ['a', 'b', 'c'], table, {'t1': 'a', 't2': 'b'})
        sigma = SigmaSet.from_entries([
            (Lottery.degenerate('a'), [SCF_IMAGE]),
            (Lottery.degenerate('b'), [SCF_IMAGE]),
        ])
        return CanonicalMechanism(THEOREM1, env, sigma, build_lemma_y(env), 1, Partition.singletons(env.states))

    def test_game_shape(self, mech):
        game = mechanism_game(mech, 't1', plans=[(0, 1)])
        assert game.profile_count == 6 ** 3
        truthful = (Message('t1', 1, (0, 1), 'a'),) * 3
        assert game.outcome(truthful) == Lottery.degenerate('a')
        assert game.payoff('i1', truthful) == 1

    def test_truthful_report_survives(self, mech):
        game = mechanism_game(mech, 't1', plans=[(0, 1)])
        solved = solve_rationalizable(game, certificates=False)
        assert solved.verify(game)
        assert Message('t1', 1, (0, 1), 'a') in solved['i2']

    def test_unknown_state(self, mech):
        with pytest.raises(KeyError):
            mechanism_game(mech, 't9')

    @pytest.mark.slow
    def test_truncated_mechanism_keeps_escalation(self, ex1b):
        sigma = SigmaSet.from_entries([(ex1b.scf_lottery(s), [SCF_IMAGE]) for s in ex1b.states])
        mech = CanonicalMechanism(THEOREM2, ex1b, sigma, build_lemma_y(ex1b), 2)
        games = {state: mechanism_game(mech, state, plans=[(0, 1, 2)]) for state in ex1b.states}
        report = check_implementation(ex1b, games)
        assert not report.holds
        for state in ex1b.states:
            assert not report.per_state[state]
            assert report.offending[state]
            for agent in ex1b.agents:
                assert any(message.m2 == 2 for message in report.survivors[state][agent])
