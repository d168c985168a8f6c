"""
Rationalizability Service - iterated elimination of never-best replies
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice, product
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from ratimpl.errors import RatImplError, UnsupportedBeliefModel
from ratimpl.models.environment import Environment
from ratimpl.models.game import FiniteGame, Profile, strategy_label
from ratimpl.models.lottery import format_rational
from ratimpl.services.lp_rational import LinearConstraint, Relation, maximize_slack
from ratimpl.services.settings import get_settings

logger = logging.getLogger(__name__)

ZERO = Fraction(0)

StrategySets = Mapping[str, Sequence[Hashable]]


@dataclass(frozen=True)
class BeliefWitness:
    """Belief over surviving opponent profiles making `strategy` a best reply"""

    player: str
    strategy: Hashable
    distribution: Tuple[Tuple[Profile, Fraction], ...]

    def verify(self, game: FiniteGame, survivors: StrategySets) -> bool:
        opponents = game.opponents(self.player)
        total = ZERO
        for profile, p in self.distribution:
            if p < 0:
                return False
            if p and any(s not in survivors[o] for o, s in zip(opponents, profile)):
                return False
            total += p
        if total != 1:
            return False
        value = self.expected(game, self.strategy)
        return all(value >= self.expected(game, other) for other in game.strategies[self.player])

    def expected(self, game: FiniteGame, strategy: Hashable) -> Fraction:
        return sum((p * game.payoff_against(self.player, strategy, profile)
                    for profile, p in self.distribution), ZERO)

    def _serialize(self) -> dict:
        return {
            'player': self.player,
            'strategy': strategy_label(self.strategy),
            'belief': [
                {'profile': [strategy_label(s) for s in profile], 'probability': format_rational(p)}
                for profile, p in self.distribution
            ],
        }


@dataclass(frozen=True)
class DominanceCertificate:
    """Mixed strategy strictly better than `strategy` against every surviving opponent profile"""

    player: str
    strategy: Hashable
    mixture: Tuple[Tuple[Hashable, Fraction], ...]
    margin: Fraction

    def verify(self, game: FiniteGame, survivors: StrategySets) -> bool:
        if sum((p for _, p in self.mixture), ZERO) != 1 or any(p < 0 for _, p in self.mixture):
            return False
        for opponents in game.opponent_profiles(self.player, survivors):
            mixed = sum((p * game.payoff_against(self.player, s, opponents) for s, p in self.mixture), ZERO)
            if not mixed > game.payoff_against(self.player, self.strategy, opponents):
                return False
        return True

    def _serialize(self) -> dict:
        return {
            'player': self.player,
            'strategy': strategy_label(self.strategy),
            'mixture': [{'strategy': strategy_label(s), 'probability': format_rational(p)}
                        for s, p in self.mixture],
            'margin': format_rational(self.margin),
        }


@dataclass(frozen=True)
class EliminationRecord:
    round: int
    player: str
    strategy: Hashable
    certificate: Optional[DominanceCertificate] = None

    def _serialize(self) -> dict:
        data = {'round': self.round, 'player': self.player, 'strategy': strategy_label(self.strategy),
                'reason': 'best reply to no belief over surviving opponents'}
        if self.certificate is not None:
            data['certificate'] = self.certificate._serialize()
        return data


@dataclass
class SurvivorSets:
    survivors: Dict[str, Tuple[Hashable, ...]]
    trace: List[EliminationRecord] = field(default_factory=list)
    witnesses: Dict[Tuple[str, Hashable], BeliefWitness] = field(default_factory=dict)

    def __getitem__(self, player: str) -> Tuple[Hashable, ...]:
        return self.survivors[player]

    def profiles(self, game: FiniteGame):
        return product(*(self.survivors[p] for p in game.players))

    def verify(self, game: FiniteGame) -> bool:
        """Every survivor has a valid witness and nothing else does"""
        if best_reply_set(game, self.survivors) != self.survivors:
            return False
        return all(
            (player, s) in self.witnesses and self.witnesses[(player, s)].verify(game, self.survivors)
            for player in game.players for s in self.survivors[player]
        )

    def _serialize(self) -> dict:
        return {
            'survivors': {p: [strategy_label(s) for s in strategies] for p, strategies in self.survivors.items()},
            'trace': [record._serialize() for record in self.trace],
            'witnesses': [witness._serialize() for witness in self.witnesses.values()],
        }


def _check_belief_model(game: FiniteGame):
    model = get_settings().belief_model
    if model not in ('correlated', 'independent'):
        raise ValueError(f'unknown belief model {model!r}')
    if model == 'independent' and len(game.players) > 2:
        raise UnsupportedBeliefModel('independent beliefs are only supported for two-player games')


def _payoff_table(game: FiniteGame, player: str, opponents: Sequence[Profile]) -> Dict[Hashable, List[Fraction]]:
    """Payoff of every strategy of `player` against each opponent profile"""
    return {
        s: [game.payoff_against(player, s, profile) for profile in opponents]
        for s in game.strategies[player]
    }


def _witness(player: str, strategy: Hashable, opponents: Sequence[Profile],
             table: Dict[Hashable, List[Fraction]]) -> Optional[BeliefWitness]:
    own = table[strategy]

    # point beliefs first
    for k, profile in enumerate(opponents):
        if all(own[k] >= row[k] for row in table.values()):
            return BeliefWitness(player, strategy, ((profile, Fraction(1)),))

    constraints = []
    for other, row in table.items():
        if other == strategy:
            continue
        coefficients = {k: own[k] - row[k] for k in range(len(opponents)) if own[k] != row[k]}
        if coefficients:
            constraints.append(LinearConstraint(coefficients, Relation.GE, ZERO))
    solution = maximize_slack(range(len(opponents)), constraints, normalize=False)
    if not solution.feasible:
        return None
    return BeliefWitness(player, strategy, tuple(
        (opponents[k], p) for k, p in solution.point.items() if p
    ))


def best_reply_witness(game: FiniteGame, player: str, strategy: Hashable,
                       survivors: StrategySets) -> Optional[BeliefWitness]:
    """Belief over surviving opponents under which `strategy` is a best reply in the full strategy set"""
    _check_belief_model(game)
    if strategy not in game.strategies[player]:
        raise ValueError(f'{strategy!r} is not a strategy of {player!r}')
    opponents = game.opponent_profiles(player, survivors)
    return _witness(player, strategy, opponents, _payoff_table(game, player, opponents))


def find_dominance_certificate(game: FiniteGame, player: str, strategy: Hashable,
                               survivors: StrategySets) -> Optional[DominanceCertificate]:
    """Mixed strategy over the full strategy set strictly dominating `strategy`"""
    options = list(game.strategies[player])
    constraints = []
    for opponents in game.opponent_profiles(player, survivors):
        base = game.payoff_against(player, strategy, opponents)
        constraints.append(LinearConstraint(
            {s: game.payoff_against(player, s, opponents) - base for s in options}, Relation.GT, ZERO
        ))
    solution = maximize_slack(options, constraints)
    if not solution.feasible:
        return None
    mixture = tuple((s, p) for s, p in solution.point.items() if p)
    return DominanceCertificate(player, strategy, mixture, solution.slack)


def best_reply_set(game: FiniteGame, sets: StrategySets) -> Dict[str, Tuple[Hashable, ...]]:
    """b(sets) restricted to `sets`: members that are best replies to some belief on `sets`"""
    _check_belief_model(game)
    kept = {}
    for player in game.players:
        opponents = game.opponent_profiles(player, sets)
        table = _payoff_table(game, player, opponents)
        kept[player] = tuple(s for s in sets[player] if _witness(player, s, opponents, table) is not None)
    return kept


def has_best_reply_property(game: FiniteGame, sets: StrategySets) -> bool:
    """Is every member of `sets` a best reply to a belief on `sets`?"""
    return best_reply_set(game, sets) == {p: tuple(sets[p]) for p in game.players}


def solve_rationalizable(game: FiniteGame, order: str = 'simultaneous', seed: Optional[int] = None,
                         certificates: bool = True) -> SurvivorSets:
    """Largest fixed point of the best-reply operator"""
    _check_belief_model(game)
    current = {p: tuple(game.strategies[p]) for p in game.players}
    trace: List[EliminationRecord] = []

    if order == 'simultaneous':
        rounds = 0
        while True:
            rounds += 1
            removed = []
            for player in game.players:
                opponents = game.opponent_profiles(player, current)
                table = _payoff_table(game, player, opponents)
                for s in current[player]:
                    if _witness(player, s, opponents, table) is None:
                        removed.append((player, s))
            if not removed:
                break
            for player, s in removed:
                certificate = find_dominance_certificate(game, player, s, current) if certificates else None
                trace.append(EliminationRecord(rounds, player, s, certificate))
            for player, s in removed:
                current[player] = tuple(x for x in current[player] if x != s)
            logger.info('%r round %d: removed %d strategies', game, rounds, len(removed))
    elif order == 'sequential':
        rng = random.Random(seed)
        step = 0
        while True:
            candidates = [(p, s) for p in game.players for s in current[p]]
            rng.shuffle(candidates)
            found = next((
                (p, s) for p, s in candidates if best_reply_witness(game, p, s, current) is None
            ), None)
            if found is None:
                break
            step += 1
            player, s = found
            certificate = find_dominance_certificate(game, player, s, current) if certificates else None
            trace.append(EliminationRecord(step, player, s, certificate))
            current[player] = tuple(x for x in current[player] if x != s)
    else:
        raise ValueError(f'unknown elimination order {order!r}')

    witnesses = {}
    for player in game.players:
        opponents = game.opponent_profiles(player, current)
        table = _payoff_table(game, player, opponents)
        for s in current[player]:
            witness = _witness(player, s, opponents, table)
            if witness is None:
                raise RatImplError(f'{s!r} of {player!r} survived without a belief witness')
            witnesses[(player, s)] = witness

    sizes = ', '.join(f'{p}: {len(current[p])}' for p in game.players)
    logger.info('%r survivors %s', game, sizes)
    return SurvivorSets(current, trace, witnesses)


@dataclass
class ImplementationReport:
    per_state: Dict[str, bool]
    survivors: Dict[str, SurvivorSets]
    offending: Dict[str, List[Profile]] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.per_state.values())

    def _serialize(self) -> dict:
        return {
            'holds': self.holds,
            'per_state': dict(self.per_state),
            'survivors': {state: s._serialize()['survivors'] for state, s in self.survivors.items()},
            'offending_profiles': {
                state: [[strategy_label(s) for s in profile] for profile in profiles]
                for state, profiles in self.offending.items()
            },
        }


def check_implementation(env: Environment, games: Mapping[str, FiniteGame],
                         certificates: bool = False, listed: int = 10) -> ImplementationReport:
    """Does every surviving profile yield f(state) at every state?"""
    per_state, survivors, offending = {}, {}, {}
    for state in env.states:
        game = games[state]
        if game.outcomes is None:
            raise ValueError('implementation needs games with an outcome map')
        solved = solve_rationalizable(game, certificates=certificates)
        target = env.f(state)
        bad = [profile for profile in solved.profiles(game) if not game.outcome(profile).is_degenerate_on(target)]
        per_state[state] = not bad
        survivors[state] = solved
        if bad:
            offending[state] = list(islice(bad, listed))
    report = ImplementationReport(per_state, survivors, offending)
    logger.info('%s: implementation %s', env.name or 'environment', 'holds' if report.holds else 'fails')
    return report


@dataclass
class LemmaPropertyReport:
    applicable: bool
    inclusions: List[dict] = field(default_factory=list)
    inactive: List[dict] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        if not self.applicable:
            return False
        return (all(row['equal'] for row in self.inclusions if row['included'])
                and all(row['full'] and row['constant'] for row in self.inactive))

    @property
    def status(self) -> str:
        if not self.applicable:
            return 'not applicable'
        return 'verified' if self.holds else 'violated'

    def _serialize(self) -> dict:
        return {'status': self.status, 'inclusions': self.inclusions, 'inactive': self.inactive}


def check_lemma_properties(env: Environment, games: Mapping[str, FiniteGame],
                           implementation: Optional[ImplementationReport] = None) -> LemmaPropertyReport:
    """Survivor inclusion forces equality; inactive agents are unrestricted and powerless"""
    implementation = implementation or check_implementation(env, games)
    if not implementation.holds:
        return LemmaPropertyReport(False)

    survivors = implementation.survivors
    inclusions = []
    for state in env.states:
        for other in env.states:
            if state == other:
                continue
            game = games[state]
            included = all(set(survivors[state][p]) <= set(survivors[other][p]) for p in game.players)
            equal = all(set(survivors[state][p]) == set(survivors[other][p]) for p in game.players)
            inclusions.append({'state': state, 'other_state': other, 'included': included, 'equal': equal})

    inactive = []
    for state in env.states:
        game = games[state]
        target = env.f(state)
        for agent in game.players:
            if agent in env.active_agents(state):
                continue
            full = set(survivors[state][agent]) == set(game.strategies[agent])
            sets = dict(survivors[state].survivors, **{agent: game.strategies[agent]})
            constant = all(game.outcome(profile).is_degenerate_on(target)
                           for profile in product(*(sets[p] for p in game.players)))
            inactive.append({'state': state, 'agent': agent, 'full': full, 'constant': constant})

    return LemmaPropertyReport(True, inclusions, inactive)
