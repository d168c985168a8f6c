"""
Game Model - finite normal-form games with exact payoffs
"""

import json
from fractions import Fraction
from itertools import product
from math import prod
from pathlib import Path
from typing import Callable, Dict, Hashable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from marshmallow import Schema, fields, validate, validates_schema, ValidationError

from ratimpl.errors import CapExceededError, EnvironmentFormatError, UnknownIdError
from ratimpl.models.environment import Environment, EnvironmentSchema, _flatten_messages, load_environment
from ratimpl.models.lottery import Lottery, format_rational, parse_rational
from ratimpl.services.settings import get_settings

Profile = Tuple[Hashable, ...]


def strategy_label(strategy: Hashable):
    """JSON-friendly form of a strategy"""
    if hasattr(strategy, '_serialize'):
        return strategy._serialize()
    return strategy


class FiniteGame:
    """Players, ordered strategy lists and a payoff vector per profile"""

    def __init__(
        self,
        players: Sequence[str],
        strategies: Mapping[str, Sequence[Hashable]],
        payoffs: Mapping[Profile, Sequence[Fraction]],
        outcomes: Optional[Mapping[Profile, Lottery]] = None,
        env: Optional[Environment] = None,
        state: Optional[str] = None,
        name: Optional[str] = None,
    ):
        self.players = tuple(players)
        if not self.players:
            raise ValueError('a game needs at least one player')
        if len(set(self.players)) != len(self.players):
            raise ValueError('duplicate player ids')
        self.strategies: Dict[str, Tuple[Hashable, ...]] = {}
        for player in self.players:
            listed = tuple(strategies.get(player, ()))
            if not listed:
                raise ValueError(f'player {player!r} has no strategies')
            if len(set(listed)) != len(listed):
                raise ValueError(f'duplicate strategies for {player!r}')
            self.strategies[player] = listed

        self.check_cap([len(self.strategies[p]) for p in self.players])
        self.env = env
        self.state = state
        self.name = name
        self.outcomes = dict(outcomes) if outcomes is not None else None

        self._payoffs: Dict[Profile, Tuple[Fraction, ...]] = {}
        for profile in self.profiles():
            try:
                vector = payoffs[profile]
            except KeyError:
                raise ValueError(f'no payoffs for profile {profile!r}')
            if len(vector) != len(self.players):
                raise ValueError(f'profile {profile!r} needs {len(self.players)} payoffs')
            self._payoffs[profile] = tuple(Fraction(v) for v in vector)
        self._index = {player: k for k, player in enumerate(self.players)}

    @staticmethod
    def check_cap(sizes: Sequence[int]):
        cap = get_settings().profile_cap
        count = prod(sizes)
        if count > cap:
            raise CapExceededError(f'{count} strategy profiles exceed the cap of {cap}')
        return count

    @classmethod
    def from_payoffs(cls, players, strategies, payoffs, name=None) -> 'FiniteGame':
        return cls(players, strategies, payoffs, name=name)

    @classmethod
    def from_outcomes(
        cls,
        players: Sequence[str],
        strategies: Mapping[str, Sequence[Hashable]],
        outcome: Union[Callable[[Profile], Lottery], Mapping[Profile, Lottery]],
        env: Environment,
        state: str,
        name: Optional[str] = None,
    ) -> 'FiniteGame':
        """Game whose payoffs are u_i(outcome, state) in `env`"""
        env.state_index(state)
        for player in players:
            env.agent_index(player)
        cls.check_cap([len(strategies[p]) for p in players])

        lookup = outcome if callable(outcome) else outcome.__getitem__
        outcomes, payoffs = {}, {}
        for profile in product(*(strategies[p] for p in players)):
            try:
                lottery = lookup(profile)
            except KeyError:
                raise ValueError(f'no outcome for profile {profile!r}')
            outcomes[profile] = lottery
            payoffs[profile] = [env.expected_utility(p, lottery, state) for p in players]
        return cls(players, strategies, payoffs, outcomes, env, state, name)

    def at_state(self, state: str) -> 'FiniteGame':
        """Same message space and outcome map, payoffs at another state"""
        if self.outcomes is None or self.env is None:
            raise ValueError('only outcome-based games can be moved to another state')
        return FiniteGame.from_outcomes(self.players, self.strategies, self.outcomes, self.env, state, self.name)

    def player_index(self, player: str) -> int:
        try:
            return self._index[player]
        except KeyError:
            raise UnknownIdError(f'unknown player {player!r}')

    def profiles(self) -> Iterator[Profile]:
        return product(*(self.strategies[p] for p in self.players))

    @property
    def profile_count(self) -> int:
        return prod(len(self.strategies[p]) for p in self.players)

    def payoff(self, player: str, profile: Profile) -> Fraction:
        return self._payoffs[tuple(profile)][self.player_index(player)]

    def outcome(self, profile: Profile) -> Optional[Lottery]:
        if self.outcomes is None:
            return None
        return self.outcomes[tuple(profile)]

    def opponents(self, player: str) -> List[str]:
        return [p for p in self.players if p != player]

    def opponent_profiles(self, player: str, sets: Mapping[str, Sequence[Hashable]]) -> List[Profile]:
        return list(product(*(sets[p] for p in self.opponents(player))))

    def join(self, player: str, strategy: Hashable, opponents: Profile) -> Profile:
        """Full profile from a strategy and an opponent profile"""
        k = self.player_index(player)
        return tuple(opponents[:k]) + (strategy,) + tuple(opponents[k:])

    def payoff_against(self, player: str, strategy: Hashable, opponents: Profile) -> Fraction:
        return self._payoffs[self.join(player, strategy, opponents)][self.player_index(player)]

    def _serialize(self) -> dict:
        data = {}
        if self.name:
            data['name'] = self.name
        data['players'] = list(self.players)
        data['strategies'] = {p: [strategy_label(s) for s in self.strategies[p]] for p in self.players}
        if self.env is not None:
            data['state'] = self.state
        data['payoffs'] = [
            {'profile': [strategy_label(s) for s in profile],
             'payoffs': [format_rational(v) for v in vector]}
            for profile, vector in self._payoffs.items()
        ]
        return data

    def __repr__(self):
        sizes = 'x'.join(str(len(self.strategies[p])) for p in self.players)
        return f'FiniteGame({self.name or "unnamed"}: {sizes})'


class PayoffRowSchema(Schema):
    profile = fields.List(fields.Str(), required=True)
    payoffs = fields.List(fields.Raw(), required=True)


class OutcomeRowSchema(Schema):
    profile = fields.List(fields.Str(), required=True)
    lottery = fields.Dict(keys=fields.Str(), values=fields.Raw(), required=True)


class GameSchema(Schema):
    name = fields.Str(load_default=None)
    players = fields.List(fields.Str(), required=True, validate=validate.Length(min=1))
    strategies = fields.Dict(keys=fields.Str(), values=fields.List(fields.Str()), required=True)
    payoffs = fields.List(fields.Nested(PayoffRowSchema), load_default=None)
    outcomes = fields.List(fields.Nested(OutcomeRowSchema), load_default=None)
    default_outcome = fields.Dict(keys=fields.Str(), values=fields.Raw(), load_default=None)
    environment = fields.Raw(load_default=None)
    states = fields.List(fields.Str(), load_default=None)

    @validates_schema
    def validate_binding(self, data, **kwargs):
        if (data['payoffs'] is None) == (data['outcomes'] is None):
            raise ValidationError('give exactly one of payoffs or outcomes')
        if data['outcomes'] is not None and data['environment'] is None:
            raise ValidationError({'environment': ['outcome games need an environment']})
        missing = [p for p in data['players'] if p not in data['strategies']]
        if missing:
            raise ValidationError({'strategies': [f'no strategies for {missing}']})


def _lottery(raw: Mapping, where: str) -> Lottery:
    try:
        return Lottery(raw)
    except ValueError as err:
        raise EnvironmentFormatError(f'Validation error: {where}: {err}')


def parse_games(text: str, base_path: Optional[Path] = None) -> Dict[Optional[str], FiniteGame]:
    """Parse a game file into one game, or one game per payoff state"""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise EnvironmentFormatError(f'malformed JSON: {err}')
    try:
        data = GameSchema().load(payload)
    except ValidationError as err:
        details = '; '.join(_flatten_messages(err.messages))
        raise EnvironmentFormatError(f'Validation error: {details}', err.messages)

    players, strategies, name = data['players'], data['strategies'], data['name']
    try:
        if data['payoffs'] is not None:
            payoffs = {}
            for row in data['payoffs']:
                payoffs[tuple(row['profile'])] = [parse_rational(v) for v in row['payoffs']]
            return {None: FiniteGame.from_payoffs(players, strategies, payoffs, name)}

        env = _bound_environment(data['environment'], base_path)
        table = {tuple(row['profile']): _lottery(row['lottery'], f'profile {row["profile"]}')
                 for row in data['outcomes']}
        default = _lottery(data['default_outcome'], 'default_outcome') if data['default_outcome'] else None
        outcome = (lambda profile: table.get(profile, default)) if default else table
        states = data['states'] or list(env.states)
        return {state: FiniteGame.from_outcomes(players, strategies, outcome, env, state, name)
                for state in states}
    except (ValueError, KeyError) as err:
        if isinstance(err, EnvironmentFormatError):
            raise
        raise EnvironmentFormatError(f'Validation error: {err}')


def _bound_environment(reference, base_path: Optional[Path]) -> Environment:
    if isinstance(reference, dict):
        try:
            return EnvironmentSchema().load(reference)
        except ValidationError as err:
            raise EnvironmentFormatError('Validation error: environment', {'environment': err.messages})
    reference = str(reference)
    if base_path is not None and (base_path / reference).exists():
        reference = str(base_path / reference)
    return load_environment(reference)


def load_games(path: str) -> Dict[Optional[str], FiniteGame]:
    game_path = Path(path)
    if not game_path.exists():
        raise EnvironmentFormatError(f'no such game file: {path}')
    return parse_games(game_path.read_text(encoding='utf-8'), game_path.parent)
