"""
Mechanism Service - canonical mechanisms, outcome rules and proof certificates
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from marshmallow import Schema, fields, validate, post_load, ValidationError

from ratimpl.errors import CapExceededError, EnvironmentFormatError, PreconditionError
from ratimpl.models.environment import Environment, EnvironmentSchema, RationalField, _flatten_messages
from ratimpl.models.game import FiniteGame
from ratimpl.models.lottery import Lottery, format_rational
from ratimpl.models.partition import Partition
from ratimpl.models.reports import AxiomReport, CertificateReport, CertificateStep, InequalityCheck
from ratimpl.services.axioms import AxiomChecker
from ratimpl.services.lemma_y import LemmaYSystem, SigmaSet, build_lemma_y, build_sigma
from ratimpl.services.settings import get_settings

logger = logging.getLogger(__name__)

THEOREM1 = 'theorem1'
THEOREM2 = 'theorem2'
VARIANTS = (THEOREM1, THEOREM2)

RULE1 = 'rule1'
RULE2A = 'rule2a'
RULE2B = 'rule2b'
RULE3 = 'rule3'


@dataclass(frozen=True)
class Message:
    """[state report, integer, plan of Sigma indices per state, outcome]"""

    m1: str
    m2: int
    m3: Tuple[int, ...]
    m4: str

    def _serialize(self) -> dict:
        return {'m1': self.m1, 'm2': self.m2, 'm3': list(self.m3), 'm4': self.m4}


@dataclass(frozen=True)
class RuleClassification:
    rule: str
    agreed_state: Optional[str] = None
    deviator: Optional[str] = None
    hypothetical_state: Optional[str] = None
    winner: Optional[str] = None

    def _serialize(self) -> dict:
        data = {'rule': self.rule}
        for key in ('agreed_state', 'deviator', 'hypothetical_state', 'winner'):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        return data


class CanonicalMechanism:
    """Truncated canonical mechanism over an environment"""

    def __init__(
        self,
        variant: str,
        env: Environment,
        sigma: SigmaSet,
        lemma: LemmaYSystem,
        n_max: int,
        partition: Optional[Partition] = None,
        reports: Sequence[AxiomReport] = (),
    ):
        if variant not in VARIANTS:
            raise ValueError(f'unknown mechanism variant {variant!r}')
        if variant == THEOREM1 and partition is None:
            raise ValueError('the theorem1 mechanism needs a partition')
        self.variant = variant
        self.env = env
        self.sigma = sigma
        self.lemma = lemma
        self.n_max = n_max
        self.partition = partition
        self.reports = list(reports)
        self.active_sets = (
            {state: env.active_agents(state) for state in env.states} if variant == THEOREM2 else None
        )

    # Message space

    def message_space_size(self) -> int:
        """Messages per agent: |Θ|·n_max·|Σ|^|Θ|·|Z|"""
        env = self.env
        return len(env.states) * self.n_max * len(self.sigma) ** len(env.states) * len(env.outcomes)

    def plans(self) -> Iterator[Tuple[int, ...]]:
        return product(range(len(self.sigma)), repeat=len(self.env.states))

    def messages(self, plans: Optional[Iterable[Tuple[int, ...]]] = None) -> List[Message]:
        plans = list(self.plans() if plans is None else plans)
        return [
            Message(state, n, tuple(plan), z)
            for state in self.env.states
            for n in range(1, self.n_max + 1)
            for plan in plans
            for z in self.env.outcomes
        ]

    def check_message(self, message: Message):
        env = self.env
        env.state_index(message.m1)
        if not isinstance(message.m2, int) or not 1 <= message.m2 <= self.n_max:
            raise ValueError(f'integer report {message.m2!r} outside [1, {self.n_max}]')
        if len(message.m3) != len(env.states):
            raise ValueError('plan must give one Sigma index per state')
        for k in message.m3:
            if not 0 <= k < len(self.sigma):
                raise ValueError(f'plan entry {k} is not a Sigma index')
        if message.m4 not in env.outcomes:
            raise ValueError(f'unknown outcome {message.m4!r}')

    def _check_profile(self, profile: Sequence[Message]):
        if len(profile) != len(self.env.agents):
            raise ValueError(f'profile needs {len(self.env.agents)} messages, got {len(profile)}')
        for message in profile:
            self.check_message(message)

    # Rules

    def classify(self, profile: Sequence[Message]) -> RuleClassification:
        self._check_profile(profile)
        if self.variant == THEOREM1:
            return self._classify_partition(profile)
        return self._classify_active(profile)

    def _classify_partition(self, profile: Sequence[Message]) -> RuleClassification:
        agents = self.env.agents
        block = self.partition.block_of

        def agree(messages):
            return len({block(m.m1) for m in messages}) == 1 and all(m.m2 == 1 for m in messages)

        if agree(profile):
            return RuleClassification(RULE1, agreed_state=profile[0].m1)
        for k, agent in enumerate(agents):
            others = [m for j, m in enumerate(profile) if j != k]
            if others and agree(others):
                hypothetical = profile[(k + 1) % len(agents)].m1
                return self._rule2(agent, profile[k], hypothetical)
        return self._rule3(profile)

    def _classify_active(self, profile: Sequence[Message]) -> RuleClassification:
        env = self.env
        for state in env.states:
            if all(profile[env.agent_index(i)].m1 == state and profile[env.agent_index(i)].m2 == 1
                   for i in self.active_sets[state]):
                return RuleClassification(RULE1, agreed_state=state)
        for k, agent in enumerate(env.agents):
            others = [m for j, m in enumerate(profile) if j != k]
            if others and len({m.m1 for m in others}) == 1 and all(m.m2 == 1 for m in others):
                return self._rule2(agent, profile[k], others[0].m1)
        return self._rule3(profile)

    def _rule2(self, agent: str, message: Message, hypothetical: str) -> RuleClassification:
        env = self.env
        index = env.state_index(hypothetical)
        proposal = self.sigma[message.m3[index]]
        credible = env.u(agent, env.f(hypothetical), hypothetical) >= \
            env.expected_utility(agent, proposal, hypothetical)
        return RuleClassification(RULE2A if credible else RULE2B,
                                  deviator=agent, hypothetical_state=hypothetical)

    def _rule3(self, profile: Sequence[Message]) -> RuleClassification:
        top = max(m.m2 for m in profile)
        k = max(j for j, m in enumerate(profile) if m.m2 == top)
        return RuleClassification(RULE3, winner=self.env.agents[k])

    def outcome(self, profile: Sequence[Message], classification: RuleClassification = None) -> Lottery:
        env = self.env
        rule = classification or self.classify(profile)
        if rule.rule == RULE1:
            return env.scf_lottery(rule.agreed_state)
        if rule.rule in (RULE2A, RULE2B):
            agent, state = rule.deviator, rule.hypothetical_state
            penalty = self.lemma.z(agent, state, state)
            if rule.rule == RULE2B:
                return penalty
            message = profile[env.agent_index(agent)]
            n = message.m2
            proposal = self.sigma[message.m3[env.state_index(state)]]
            return Lottery.mixture([(Fraction(n, n + 1), proposal), (Fraction(1, n + 1), penalty)])
        message = profile[env.agent_index(rule.winner)]
        n = message.m2
        return Lottery.mixture([
            (Fraction(n, n + 1), Lottery.degenerate(message.m4)),
            (Fraction(1, n + 1), self.lemma.worst_mix),
        ])

    # Best challenges

    def best_challenge(self, agent: str, true_state: str) -> Tuple[Tuple[int, ...], str]:
        """Best plan over admissible Sigma entries and best pure outcome at the true state"""
        env = self.env
        plan = []
        for state in env.states:
            admissible = self.sigma.admissible(env, agent, state)
            plan.append(max(admissible, key=lambda k: (
                env.expected_utility(agent, self.sigma[k], true_state), -k
            )))
        return tuple(plan), env.best_outcome(agent, true_state)

    def _serialize(self) -> dict:
        env = self.env
        data = {
            'variant': self.variant,
            'n_max': self.n_max,
            'environment': env._serialize(),
        }
        if self.partition is not None:
            data['partition'] = self.partition._serialize()
        if self.active_sets is not None:
            data['active_sets'] = {state: env.ordered_agents(self.active_sets[state]) for state in env.states}
        data['epsilon'] = format_rational(self.lemma.epsilon)
        data['sigma'] = self.sigma._serialize(env.outcomes)
        data['lemma'] = self.lemma._serialize()
        data['message_space_size'] = self.message_space_size()
        return data


def _check_nmax(n_max: Optional[int]) -> int:
    n_max = get_settings().default_nmax if n_max is None else n_max
    if not isinstance(n_max, int) or n_max < 1:
        raise ValueError('truncation bound must be >= 1')
    return n_max


def _require(report: AxiomReport) -> AxiomReport:
    if not report.holds:
        raise PreconditionError(f'precondition failed: {report.summary()}', report)
    return report


def _prepare(env, reports, sigma, lemma) -> Tuple[SigmaSet, LemmaYSystem]:
    lemma = lemma or build_lemma_y(env)
    if sigma is None:
        return build_sigma(env, lemma, reports), lemma
    required = [env.scf_lottery(state) for state in env.states] + list(lemma.penalty.values())
    required += [lottery for report in reports for lottery in report.lotteries()]
    missing = [lottery for lottery in required if lottery not in sigma]
    if missing:
        raise PreconditionError(f'Sigma lacks {len(missing)} required lotteries, first {missing[0]!r}')
    return sigma, lemma


def build_theorem1_mechanism(
    env: Environment,
    partition: Optional[Partition] = None,
    sigma: Optional[SigmaSet] = None,
    lemma: Optional[LemmaYSystem] = None,
    n_max: Optional[int] = None,
) -> CanonicalMechanism:
    """Partition-based mechanism for environments without a worst alternative"""
    n_max = _check_nmax(n_max)
    env.validate('strict')
    checker = AxiomChecker(env)
    nwa = _require(checker.check_nwa())
    if partition is None:
        blocking = _require(checker.check_strict_maskin_star_star())
    else:
        blocking = _require(checker.check_smm_star_star_for_partition(partition))

    sigma, lemma = _prepare(env, [blocking], sigma, lemma)
    mech = CanonicalMechanism(THEOREM1, env, sigma, lemma, n_max, blocking.partition, [nwa, blocking])
    logger.info('%s: theorem1 mechanism with partition %s, |Sigma| = %d',
                env.name or 'environment', blocking.partition._serialize(), len(sigma))
    return mech


def build_theorem2_mechanism(
    env: Environment,
    sigma: Optional[SigmaSet] = None,
    lemma: Optional[LemmaYSystem] = None,
    n_max: Optional[int] = None,
) -> CanonicalMechanism:
    """Active-agent mechanism for responsive SCFs"""
    n_max = _check_nmax(n_max)
    env.validate('strict')
    checker = AxiomChecker(env)
    reports = [
        _require(checker.check_responsiveness()),
        _require(checker.check_strict_event_monotonicity()),
        _require(checker.check_dictator_monotonicity()),
    ]
    if not env.active_agents_event(env.states):
        raise PreconditionError('no agent is active at every state')
    reports.append(_require(checker.check_iterated_elimination_all()))

    sigma, lemma = _prepare(env, reports, sigma, lemma)
    mech = CanonicalMechanism(THEOREM2, env, sigma, lemma, n_max, reports=reports)
    logger.info('%s: theorem2 mechanism, |Sigma| = %d', env.name or 'environment', len(sigma))
    return mech


def build_mechanism(env: Environment, variant: str, n_max: Optional[int] = None,
                    partition: Optional[Partition] = None) -> CanonicalMechanism:
    if variant == THEOREM1:
        return build_theorem1_mechanism(env, partition, n_max=n_max)
    if variant == THEOREM2:
        return build_theorem2_mechanism(env, n_max=n_max)
    raise ValueError(f'unknown mechanism variant {variant!r}')


def classify_profile(mech: CanonicalMechanism, profile: Sequence[Message]) -> RuleClassification:
    return mech.classify(profile)


def outcome(mech: CanonicalMechanism, profile: Sequence[Message]) -> Lottery:
    return mech.outcome(profile)


def mechanism_game(mech: CanonicalMechanism, state: str,
                   plans: Optional[Sequence[Tuple[int, ...]]] = None) -> FiniteGame:
    """The truncated mechanism as a finite game at `state`"""
    env = mech.env
    env.state_index(state)
    per_agent = (len(env.states) * mech.n_max * len(env.outcomes)
                 * (len(plans) if plans is not None else len(mech.sigma) ** len(env.states)))
    cap = get_settings().profile_cap
    if per_agent ** len(env.agents) > cap:
        raise CapExceededError(f'{per_agent}^{len(env.agents)} profiles exceed the cap of {cap}')

    messages = mech.messages(plans)
    strategies = {agent: messages for agent in env.agents}
    return FiniteGame.from_outcomes(env.agents, strategies, mech.outcome, env, state,
                                    name=f'{env.name or "environment"}@{state}')


# Certificates

class _Certifier:
    """Evaluates the proof inequalities of one mechanism"""

    def __init__(self, mech: CanonicalMechanism):
        self.mech = mech
        self.env = mech.env
        self._challenges: Dict[Tuple[str, str], Tuple[Tuple[int, ...], str]] = {}

    def eu(self, agent: str, lottery: Lottery, state: str) -> Fraction:
        return self.env.expected_utility(agent, lottery, state)

    def challenge(self, agent: str, true_state: str):
        key = (agent, true_state)
        if key not in self._challenges:
            self._challenges[key] = self.mech.best_challenge(agent, true_state)
        return self._challenges[key]

    def challenge_values(self, agent: str, true_state: str):
        plan, best = self.challenge(agent, true_state)
        sigma = self.mech.sigma
        values = {state: self.eu(agent, sigma[k], true_state) for state, k in zip(self.env.states, plan)}
        return values, self.env.u(agent, best, true_state)

    def agents_for(self, true_state: str) -> List[str]:
        if self.mech.variant == THEOREM1:
            return list(self.env.agents)
        return self.env.ordered_agents(self.env.active_agents(true_state))

    def step1(self, true_state: str) -> List[InequalityCheck]:
        env, sigma = self.env, self.mech.sigma
        checks = []
        for agent in self.agents_for(true_state):
            payoff = env.u(agent, env.f(true_state), true_state)
            instance = {'agent': agent, 'true_state': true_state}
            checks.append(InequalityCheck(
                'cck2', instance, payoff, '>',
                self.eu(agent, self.mech.lemma.z(agent, true_state, true_state), true_state),
            ))
            for k in sigma.admissible(env, agent, true_state):
                checks.append(InequalityCheck(
                    'deviation', dict(instance, sigma=k), payoff, '>=',
                    self.eu(agent, sigma[k], true_state),
                ))
            if self.mech.variant == THEOREM2:
                for state in env.states:
                    if state != true_state and env.active_agents(state) == {agent}:
                        checks.append(InequalityCheck(
                            'tsn3', dict(instance, dictator_state=state), payoff, '>',
                            env.u(agent, env.f(state), true_state),
                        ))
        return checks

    def step2(self, true_state: str) -> List[InequalityCheck]:
        env, sigma, lemma = self.env, self.mech.sigma, self.mech.lemma
        rule2, rule3 = ('tef1', 'tef2') if self.mech.variant == THEOREM1 else ('teff1', 'teff2')
        checks = []
        for agent in self.agents_for(true_state):
            plan_values, best = self.challenge_values(agent, true_state)
            for state in env.states:
                instance = {'agent': agent, 'true_state': true_state, 'state': state}
                value = plan_values[state]
                checks.append(InequalityCheck(rule2, instance, best, '>=', value))
                checks.append(InequalityCheck(
                    rule2, dict(instance, against='penalty'), value, '>',
                    self.eu(agent, lemma.z(agent, state, state), true_state),
                ))
                for k in sigma.admissible(env, agent, state):
                    checks.append(InequalityCheck(
                        rule2, dict(instance, sigma=k), value, '>=', self.eu(agent, sigma[k], true_state),
                    ))
            instance = {'agent': agent, 'true_state': true_state}
            for z in env.outcomes:
                checks.append(InequalityCheck(rule3, dict(instance, outcome=z), best, '>=',
                                              env.u(agent, z, true_state)))
            checks.append(InequalityCheck(rule3, dict(instance, against='worst_mix'), best, '>',
                                          self.eu(agent, lemma.worst_mix, true_state)))
        return checks

    def whistle_blowers(self, true_state: str) -> List[InequalityCheck]:
        """Partition mechanism: one profitable challenger per foreign block"""
        env, partition = self.env, self.mech.partition
        checks = []
        for block in partition.blocks:
            if true_state in block:
                continue
            candidates = []
            for agent in env.agents:
                plan_values, _ = self.challenge_values(agent, true_state)
                rows = [
                    InequalityCheck('gre1', {'agent': agent, 'true_state': true_state,
                                             'block': list(block), 'state': state},
                                    plan_values[state], '>', env.u(agent, env.f(state), true_state))
                    for state in block
                ]
                candidates.append(rows)
                if all(row.passed for row in rows):
                    break
            else:
                checks.extend(row for rows in candidates for row in rows)
                continue
            checks.extend(candidates[-1])
        return checks

    def elimination(self, true_state: str) -> List[InequalityCheck]:
        """Active-agent mechanism: delete false states using Sigma entries only"""
        env, sigma = self.env, self.mech.sigma
        remaining = list(env.states)
        checks = []
        while len(remaining) > 1:
            found = self._eliminate(remaining, true_state)
            if found is None:
                checks.append(InequalityCheck(
                    'ycy1b', {'true_state': true_state, 'remaining': list(remaining),
                              'reason': 'no whistle-blower in Sigma'},
                    Fraction(0), '>', Fraction(0),
                ))
                break
            state, agent, k = found
            plan_values, best = self.challenge_values(agent, true_state)
            target = env.u(agent, env.f(state), true_state)
            instance = {'agent': agent, 'true_state': true_state, 'state': state}
            checks.extend([
                InequalityCheck('tttf', instance, best, '>=', plan_values[state]),
                InequalityCheck('tttf', dict(instance, sigma=k), plan_values[state], '>=',
                                self.eu(agent, sigma[k], true_state)),
                InequalityCheck('tttf', dict(instance, sigma=k), self.eu(agent, sigma[k], true_state),
                                '>', target),
            ])
            if env.active_agents(state) == {agent}:
                for other in env.states:
                    checks.append(InequalityCheck('gtew1', dict(instance, plan_state=other),
                                                  plan_values[other], '>', target))
                checks.append(InequalityCheck('gtew2', instance, best, '>', target))
            else:
                checks.append(InequalityCheck('txw1', instance, plan_values[state], '>', target))
                checks.append(InequalityCheck('txw2', instance, best, '>', target))
            remaining.remove(state)
        return checks

    def _eliminate(self, remaining: List[str], true_state: str):
        env, sigma = self.env, self.mech.sigma
        active = env.ordered_agents(env.active_agents_event(remaining))
        for state in remaining:
            if state == true_state:
                continue
            for agent in active:
                here = env.u(agent, env.f(state), state)
                there = env.u(agent, env.f(state), true_state)
                for k, lottery in enumerate(sigma):
                    if self.eu(agent, lottery, state) < here and self.eu(agent, lottery, true_state) > there:
                        return state, agent, k
        return None

    def report(self) -> CertificateReport:
        env, mech = self.env, self.mech
        steps = {name: [] for name in ('step1', 'step2', 'step3', 'step4')}
        for true_state in env.states:
            steps['step1'].extend(self.step1(true_state))
            steps['step2'].extend(self.step2(true_state))
            if mech.variant == THEOREM1:
                steps['step4'].extend(self.whistle_blowers(true_state))
            else:
                steps['step3'].extend(self.elimination(true_state))

        lemma = CertificateStep('lemma', 'reward and penalty lotteries', mech.lemma.inequality_checks())
        if mech.variant == THEOREM1:
            return CertificateReport(THEOREM1, [
                lemma,
                CertificateStep('step1', 'truthful agreement is a Nash equilibrium', steps['step1'], ('lemma',)),
                CertificateStep('step2', 'best replies never trigger Rules 2 and 3', steps['step2'], ('lemma',)),
                CertificateStep('step3', 'integers above one are not rationalizable', [], ('step2',)),
                CertificateStep('step4', 'a whistle-blower rejects every foreign block', steps['step4'],
                                ('step2',)),
                CertificateStep('step5', 'nobody reports a foreign block', [], ('step4',)),
            ])
        return CertificateReport(THEOREM2, [
            lemma,
            CertificateStep('step1', 'truthful agreement is a Nash equilibrium', steps['step1'], ('lemma',)),
            CertificateStep('step2', 'best replies of active agents never trigger Rules 2 and 3',
                            steps['step2'], ('lemma',)),
            CertificateStep('step3', 'agreement on every false state is eliminated', steps['step3'], ('step2',)),
            CertificateStep('step4', 'agents active everywhere report the truth', [], ('step2', 'step3')),
            CertificateStep('step5', 'agents active at the true state report the truth', [], ('step4',)),
        ])


def verify_certificates(env: Environment, mech: CanonicalMechanism) -> CertificateReport:
    if mech.env is not env and mech.env._serialize() != env._serialize():
        raise ValueError(f'mechanism was built for {mech.env.name or "another environment"!r}, '
                         f'not {env.name or "this environment"!r}')
    report = _Certifier(mech).report()
    logger.info('%s: %s certificates %s', env.name or 'environment', mech.variant,
                'pass' if report.passed else 'fail')
    return report


# Mechanism files

class SigmaEntrySchema(Schema):
    index = fields.Int()
    lottery = fields.Dict(keys=fields.Str(), values=RationalField(), required=True)
    provenance = fields.List(fields.Str(), load_default=list)


class MechanismSchema(Schema):
    variant = fields.Str(required=True, validate=validate.OneOf(VARIANTS))
    n_max = fields.Int(required=True, validate=validate.Range(min=1))
    environment = fields.Dict(required=True)
    partition = fields.List(fields.List(fields.Str()), load_default=None)
    active_sets = fields.Dict(load_default=None)
    epsilon = RationalField(required=True)
    sigma = fields.List(fields.Nested(SigmaEntrySchema), required=True)
    lemma = fields.Dict(load_default=None)
    message_space_size = fields.Int(load_default=None)

    @post_load
    def make_mechanism(self, data, **kwargs):
        try:
            env = EnvironmentSchema().load(data['environment'])
        except ValidationError as err:
            raise ValidationError({'environment': err.messages})
        try:
            entries = [(Lottery(entry['lottery']), entry['provenance'] or ['loaded'])
                       for entry in data['sigma']]
            partition = Partition(data['partition'], env.states) if data['partition'] else None
        except ValueError as err:
            raise ValidationError(str(err))
        lemma = build_lemma_y(env, data['epsilon'])
        sigma = SigmaSet.from_entries(entries)
        if data['variant'] == THEOREM1:
            return build_theorem1_mechanism(env, partition, sigma, lemma, data['n_max'])
        return build_theorem2_mechanism(env, sigma, lemma, data['n_max'])


def load_mechanism(text: str) -> CanonicalMechanism:
    """Rebuild (and re-check) a mechanism from a mechanism file"""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise EnvironmentFormatError(f'malformed JSON: {err}')
    try:
        return MechanismSchema().load(payload)
    except ValidationError as err:
        details = '; '.join(_flatten_messages(err.messages))
        raise EnvironmentFormatError(f'Validation error: {details}', err.messages)
