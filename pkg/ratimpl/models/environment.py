"""
Environment Model - agents, states, outcomes, utilities and the SCF
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from marshmallow import Schema, fields, validate, validates_schema, post_load, ValidationError

from ratimpl.errors import EnvironmentFormatError, PreconditionError, UnknownIdError
from ratimpl.models.lottery import Lottery, format_rational, parse_rational
from ratimpl.models.partition import Partition

logger = logging.getLogger(__name__)

VALIDATION_LEVELS = ('lenient', 'strict')


class ContourKind(str, Enum):
    WEAK_LOWER = 'weak-lower'
    STRICT_LOWER = 'strict-lower'
    STRICT_UPPER = 'strict-upper'


@dataclass(frozen=True)
class ContourSpec:
    """Contour set of `benchmark` for `agent` at `state`, described by its inequality"""

    agent: str
    benchmark: Lottery
    state: str
    kind: ContourKind

    def _serialize(self, outcomes: Sequence[str] = None) -> dict:
        return {
            'agent': self.agent,
            'kind': self.kind.value,
            'state': self.state,
            'benchmark': self.benchmark._serialize(outcomes),
        }


class ActiveSets:
    """Active agents per state, with cached event intersections"""

    def __init__(self, env: 'Environment'):
        self._agents = env.agents
        self.per_state: Dict[str, FrozenSet[str]] = {
            state: frozenset(
                agent for agent in env.agents
                if min(env.u(agent, z, state) for z in env.outcomes)
                < env.u(agent, env.f(state), state)
            )
            for state in env.states
        }
        self._events: Dict[FrozenSet[str], FrozenSet[str]] = {}

    def of_state(self, state: str) -> FrozenSet[str]:
        try:
            return self.per_state[state]
        except KeyError:
            raise UnknownIdError(f'unknown state {state!r}')

    def of_event(self, event: Iterable[str]) -> FrozenSet[str]:
        key = frozenset(event)
        if not key:
            raise ValueError('event must be a nonempty set of states')
        if key not in self._events:
            active = frozenset(self._agents)
            for state in key:
                active &= self.of_state(state)
            self._events[key] = active
        return self._events[key]


class Environment:
    """Finite implementation environment with exact rational utilities"""

    def __init__(
        self,
        agents: Sequence[str],
        states: Sequence[str],
        outcomes: Sequence[str],
        utility: Mapping[Tuple[str, str, str], Fraction],
        scf: Mapping[str, str],
        name: Optional[str] = None,
        description: Optional[str] = None,
        notes: Sequence[str] = (),
    ):
        self.agents = tuple(agents)
        self.states = tuple(states)
        self.outcomes = tuple(outcomes)
        self.name = name
        self.description = description
        self.notes = tuple(notes)

        for label, ids in (('agent', self.agents), ('state', self.states), ('outcome', self.outcomes)):
            if not ids:
                raise EnvironmentFormatError(f'at least one {label} is required')
            if len(set(ids)) != len(ids):
                raise EnvironmentFormatError(f'duplicate {label} ids')

        missing = [
            (i, z, s) for i in self.agents for s in self.states for z in self.outcomes
            if (i, z, s) not in utility
        ]
        if missing:
            raise EnvironmentFormatError(f'missing utility entries: {missing[:5]}')

        unknown = [s for s, z in scf.items() if z not in self.outcomes]
        if unknown:
            raise EnvironmentFormatError(f'scf maps {unknown} to unknown outcomes')
        if set(scf) != set(self.states):
            raise EnvironmentFormatError('scf must be defined exactly on the states')

        self._utility = {key: Fraction(value) for key, value in utility.items()}
        self._scf = dict(scf)
        self._agent_index = {agent: k for k, agent in enumerate(self.agents)}
        self._state_index = {state: k for k, state in enumerate(self.states)}
        self._outcome_index = {z: k for k, z in enumerate(self.outcomes)}
        self.active = ActiveSets(self)

    # Lookups

    def _check(self, agent: str = None, state: str = None, outcome: str = None):
        if agent is not None and agent not in self._agent_index:
            raise UnknownIdError(f'unknown agent {agent!r}')
        if state is not None and state not in self._state_index:
            raise UnknownIdError(f'unknown state {state!r}')
        if outcome is not None and outcome not in self._outcome_index:
            raise UnknownIdError(f'unknown outcome {outcome!r}')

    def agent_index(self, agent: str) -> int:
        self._check(agent=agent)
        return self._agent_index[agent]

    def state_index(self, state: str) -> int:
        self._check(state=state)
        return self._state_index[state]

    def ordered_agents(self, agents: Iterable[str]) -> List[str]:
        return sorted(agents, key=self.agent_index)

    def ordered_states(self, states: Iterable[str]) -> List[str]:
        return sorted(states, key=self.state_index)

    def u(self, agent: str, outcome: str, state: str) -> Fraction:
        """Utility of a pure outcome"""
        try:
            return self._utility[(agent, outcome, state)]
        except KeyError:
            self._check(agent, state, outcome)
            raise

    def utility_vector(self, agent: str, state: str) -> Dict[str, Fraction]:
        """Outcome -> utility for one agent at one state, in outcome order"""
        self._check(agent=agent, state=state)
        return {z: self._utility[(agent, z, state)] for z in self.outcomes}

    def f(self, state: str) -> str:
        self._check(state=state)
        return self._scf[state]

    def scf_lottery(self, state: str) -> Lottery:
        return Lottery.degenerate(self.f(state))

    def scf_image(self, states: Iterable[str] = None) -> FrozenSet[str]:
        states = self.states if states is None else states
        return frozenset(self.f(state) for state in states)

    # Derived primitives

    def expected_utility(self, agent: str, lottery: Lottery, state: str) -> Fraction:
        """u_i(y, θ) as the affine extension of pure-outcome utilities"""
        self._check(agent=agent, state=state)
        total = Fraction(0)
        for z, p in lottery.items():
            if z not in self._outcome_index:
                raise UnknownIdError(f'lottery mentions unknown outcome {z!r}')
            total += p * self._utility[(agent, z, state)]
        return total

    def satisfies_contour(self, spec: ContourSpec, lottery: Lottery) -> bool:
        value = self.expected_utility(spec.agent, lottery, spec.state)
        benchmark = self.expected_utility(spec.agent, spec.benchmark, spec.state)
        if spec.kind is ContourKind.WEAK_LOWER:
            return value <= benchmark
        if spec.kind is ContourKind.STRICT_LOWER:
            return value < benchmark
        return value > benchmark

    def active_agents(self, state: str) -> FrozenSet[str]:
        return self.active.of_state(state)

    def active_agents_event(self, event: Iterable[str]) -> FrozenSet[str]:
        return self.active.of_event(event)

    def worst_outcome(self, agent: str, state: str) -> str:
        """Lowest-utility pure outcome, lowest index on ties"""
        vector = self.utility_vector(agent, state)
        return min(self.outcomes, key=lambda z: (vector[z], self._outcome_index[z]))

    def best_outcome(self, agent: str, state: str) -> str:
        """Highest-utility pure outcome, lowest index on ties"""
        vector = self.utility_vector(agent, state)
        return min(self.outcomes, key=lambda z: (-vector[z], self._outcome_index[z]))

    def top_outcomes(self, agent: str, state: str) -> FrozenSet[str]:
        vector = self.utility_vector(agent, state)
        best = max(vector.values())
        return frozenset(z for z, value in vector.items() if value == best)

    def scf_partition(self) -> Partition:
        """P_f: states grouped by equal f-value"""
        blocks: Dict[str, List[str]] = {}
        for state in self.states:
            blocks.setdefault(self.f(state), []).append(state)
        return Partition(blocks.values(), self.states)

    def condorcet_winner(self, state: str) -> Optional[str]:
        """Outcome beating every other by strict pairwise majority"""
        self._check(state=state)
        for z in self.outcomes:
            if all(self._beats(z, other, state) for other in self.outcomes if other != z):
                return z
        return None

    def _beats(self, z: str, other: str, state: str) -> bool:
        ahead = sum(1 for i in self.agents if self.u(i, z, state) > self.u(i, other, state))
        behind = sum(1 for i in self.agents if self.u(i, z, state) < self.u(i, other, state))
        return ahead > behind

    def is_condorcet_function(self) -> bool:
        return all(self.condorcet_winner(state) == self.f(state) for state in self.states)

    # Validation

    def validation_issues(self) -> List[str]:
        """Conditions required before mechanism construction"""
        issues = []
        if len(self.agents) < 3:
            issues.append(f'at least 3 agents required, found {len(self.agents)}')
        if len(self.scf_image()) < 2:
            issues.append('the SCF must take at least 2 distinct values')
        return issues

    def validate(self, level: str = 'lenient') -> 'Environment':
        if level not in VALIDATION_LEVELS:
            raise ValueError(f'unknown validation level {level!r}')
        issues = self.validation_issues()
        if issues and level == 'strict':
            raise PreconditionError('; '.join(issues))
        for issue in issues:
            logger.warning('%s: %s', self.name or 'environment', issue)
        return self

    def with_utilities(self, changes: Mapping[Tuple[str, str, str], Fraction]) -> 'Environment':
        """Copy with some utility entries replaced"""
        utility = dict(self._utility)
        for key, value in changes.items():
            self._check(*key[:1], state=key[2], outcome=key[1])
            utility[key] = Fraction(value)
        return Environment(self.agents, self.states, self.outcomes, utility, self._scf,
                           self.name, self.description, self.notes)

    def _serialize(self) -> dict:
        data = {}
        if self.name:
            data['name'] = self.name
        if self.description:
            data['description'] = self.description
        if self.notes:
            data['notes'] = list(self.notes)
        data.update({
            'agents': list(self.agents),
            'states': list(self.states),
            'outcomes': list(self.outcomes),
            'scf': {state: self.f(state) for state in self.states},
            'utilities': {
                i: {s: {z: format_rational(self.u(i, z, s)) for z in self.outcomes} for s in self.states}
                for i in self.agents
            },
        })
        return data

    def __repr__(self):
        return (f'Environment({self.name or "unnamed"}: {len(self.agents)} agents, '
                f'{len(self.states)} states, {len(self.outcomes)} outcomes)')


class RationalField(fields.Field):
    """Integer or "p/q" string"""

    default_error_messages = {'invalid': 'invalid rational'}

    def _deserialize(self, value, attr, data, **kwargs):
        try:
            return parse_rational(value)
        except (ValueError, TypeError):
            raise self.make_error('invalid')

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        return format_rational(value)


class EnvironmentSchema(Schema):
    name = fields.Str(load_default=None)
    description = fields.Str(load_default=None)
    notes = fields.List(fields.Str(), load_default=list)
    agents = fields.List(fields.Str(), required=True, validate=validate.Length(min=1))
    states = fields.List(fields.Str(), required=True, validate=validate.Length(min=1))
    outcomes = fields.List(fields.Str(), required=True, validate=validate.Length(min=1))
    scf = fields.Dict(keys=fields.Str(), values=fields.Str(), required=True)
    utilities = fields.Dict(
        keys=fields.Str(),
        values=fields.Dict(
            keys=fields.Str(),
            values=fields.Dict(keys=fields.Str(), values=RationalField())
        ),
        required=True
    )

    @validates_schema
    def validate_ids(self, data, **kwargs):
        errors = {}
        for key in ('agents', 'states', 'outcomes'):
            ids = data[key]
            duplicates = sorted({x for x in ids if ids.count(x) > 1})
            if duplicates:
                errors[key] = [f'duplicate ids: {duplicates}']

        scf_errors = []
        for state in data['states']:
            if state not in data['scf']:
                scf_errors.append(f'no outcome for state {state!r}')
        for state, z in data['scf'].items():
            if state not in data['states']:
                scf_errors.append(f'unknown state {state!r}')
            elif z not in data['outcomes']:
                scf_errors.append(f'state {state!r} maps to unknown outcome {z!r}')
        if scf_errors:
            errors['scf'] = scf_errors

        utility_errors = []
        table = data['utilities']
        for agent in table:
            if agent not in data['agents']:
                utility_errors.append(f'unknown agent {agent!r}')
        for agent in data['agents']:
            rows = table.get(agent, {})
            for state in data['states']:
                row = rows.get(state)
                if row is None:
                    utility_errors.append(f'missing utility entries for {agent!r} at {state!r}')
                    continue
                for z in data['outcomes']:
                    if z not in row:
                        utility_errors.append(f'missing utility entry {agent!r}, {state!r}, {z!r}')
                for z in row:
                    if z not in data['outcomes']:
                        utility_errors.append(f'unknown outcome {z!r} for {agent!r} at {state!r}')
        if utility_errors:
            errors['utilities'] = utility_errors

        if errors:
            raise ValidationError(errors)

    @post_load
    def make_environment(self, data, **kwargs):
        utility = {
            (agent, z, state): value
            for agent, rows in data['utilities'].items()
            for state, row in rows.items()
            for z, value in row.items()
        }
        return Environment(
            data['agents'], data['states'], data['outcomes'], utility, data['scf'],
            name=data.get('name'), description=data.get('description'), notes=data.get('notes') or ()
        )


def _flatten_messages(messages, prefix: str = '') -> List[str]:
    """Flatten nested marshmallow error messages to "path: message" lines"""
    if isinstance(messages, dict):
        lines = []
        for key, value in messages.items():
            path = prefix if key == 'value' else (f'{prefix}.{key}' if prefix else str(key))
            lines.extend(_flatten_messages(value, path))
        return lines
    if isinstance(messages, list):
        return [line for item in messages for line in _flatten_messages(item, prefix)]
    return [f'{prefix}: {messages}' if prefix else str(messages)]


def parse_environment(text: str, validation: str = None, name: str = None) -> Environment:
    """Parse environment-file content into a validated Environment"""
    if validation is None:
        from ratimpl.services.settings import get_settings
        validation = get_settings().validation

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise EnvironmentFormatError(f'malformed JSON: {err}')
    if not isinstance(payload, dict):
        raise EnvironmentFormatError('environment file must contain a JSON object')

    try:
        env = EnvironmentSchema().load(payload)
    except ValidationError as err:
        details = '; '.join(_flatten_messages(err.messages))
        raise EnvironmentFormatError(f'Validation error: {details}', err.messages)

    if name and not env.name:
        env.name = name
    try:
        return env.validate(validation)
    except PreconditionError as err:
        raise EnvironmentFormatError(f'Validation error: {err}', {'environment': [str(err)]})


def bundled_examples() -> List[str]:
    """Names of the bundled example environments"""
    from ratimpl.services.settings import get_settings
    return sorted(path.stem for path in Path(get_settings().examples_path).glob('*.json'))


def load_environment(reference: str, validation: str = None) -> Environment:
    """Load a bundled example by name, or an environment file by path"""
    from ratimpl.services.settings import get_settings

    path = Path(reference)
    if not path.exists():
        bundled = Path(get_settings().examples_path) / f'{reference}.json'
        if not bundled.exists():
            raise EnvironmentFormatError(f'no such environment file or bundled example: {reference}')
        path = bundled

    return parse_environment(path.read_text(encoding='utf-8'), validation, name=path.stem)
