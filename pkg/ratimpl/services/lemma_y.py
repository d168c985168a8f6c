"""
Lottery System Service - reward/penalty lotteries and the finite menu Sigma
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ratimpl.errors import CertificateFailure, PreconditionError
from ratimpl.models.environment import Environment
from ratimpl.models.lottery import Lottery, format_rational
from ratimpl.models.reports import AxiomReport, InequalityCheck

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

SCF_IMAGE = 'scf-image'
PENALTY = 'penalty'
BLOCKING_WITNESS = 'blocking-witness'


@dataclass
class LemmaYSystem:
    """Worst mix, rewards and penalties with the epsilon they were built with"""

    env: Environment
    epsilon: Fraction
    worst: Dict[Tuple[str, str], Lottery]
    agent_floor: Dict[str, Lottery]
    own: Dict[Tuple[str, str], Lottery]
    worst_mix: Lottery
    reward: Dict[Tuple[str, str], Lottery]
    penalty: Dict[Tuple[str, str, str], Lottery] = field(default_factory=dict)

    def z(self, agent: str, state: str, true_state: str) -> Lottery:
        return self.penalty[(agent, state, true_state)]

    def _quantified(self, state: str, unrestricted: bool) -> List[str]:
        if unrestricted:
            return list(self.env.agents)
        return self.env.ordered_agents(self.env.active_agents(state))

    def inequality_checks(self, unrestricted: bool = False) -> List[InequalityCheck]:
        """Every reward/penalty inequality instance, evaluated exactly

        With `unrestricted`, each family is checked for all agents instead of
        the agents active at the relevant state.
        """
        env = self.env
        eu = env.expected_utility
        checks = []

        for state in env.states:
            for agent in self._quantified(state, unrestricted):
                checks.append(InequalityCheck(
                    'cck1', {'agent': agent, 'state': state},
                    eu(agent, self.reward[(agent, state)], state), '>',
                    eu(agent, self.worst_mix, state),
                ))

        for state in env.states:
            for true_state in env.states:
                for agent in self._quantified(true_state, unrestricted):
                    checks.append(InequalityCheck(
                        'cck2', {'agent': agent, 'state': state, 'true_state': true_state},
                        env.u(agent, env.f(true_state), true_state), '>',
                        eu(agent, self.z(agent, state, true_state), true_state),
                    ))

        for state in env.states:
            for other in env.states:
                if other == state:
                    continue
                for agent in self._quantified(state, unrestricted):
                    checks.append(InequalityCheck(
                        'cck3', {'agent': agent, 'state': state, 'other_state': other},
                        eu(agent, self.z(agent, state, other), state), '>',
                        eu(agent, self.z(agent, other, other), state),
                    ))
        return checks

    def verify(self, unrestricted: bool = False) -> 'LemmaYSystem':
        failures = [check for check in self.inequality_checks(unrestricted) if not check.passed]
        if failures:
            first = failures[0]
            raise CertificateFailure(
                f'{len(failures)} lottery inequalities fail, first {first.label} at {first.instance}',
                failures,
            )
        return self

    def replace_penalty(self, agent: str, state: str, true_state: str, lottery: Lottery) -> 'LemmaYSystem':
        """Copy with one penalty lottery swapped out (not re-verified)"""
        penalty = dict(self.penalty)
        if (agent, state, true_state) not in penalty:
            raise KeyError((agent, state, true_state))
        penalty[(agent, state, true_state)] = lottery
        return replace(self, penalty=penalty)

    def _serialize(self) -> dict:
        outcomes = self.env.outcomes
        return {
            'epsilon': format_rational(self.epsilon),
            'worst_mix': self.worst_mix._serialize(outcomes),
            'rewards': [
                {'agent': agent, 'state': state, 'lottery': lottery._serialize(outcomes)}
                for (agent, state), lottery in self.reward.items()
            ],
            'penalties': [
                {'agent': agent, 'state': state, 'true_state': true_state,
                 'lottery': lottery._serialize(outcomes)}
                for (agent, state, true_state), lottery in self.penalty.items()
            ],
        }


def _epsilon(env: Environment, worst, agent_floor, own) -> Fraction:
    """Half the smallest bound below which every penalty stays under f"""
    bounds = [Fraction(1)]
    for true_state in env.states:
        for agent in env.active_agents(true_state):
            floor = env.expected_utility(agent, worst[(agent, true_state)], true_state)
            gap = env.u(agent, env.f(true_state), true_state) - floor
            pulls = [agent_floor[agent]] + [own[(agent, state)] for state in env.states if state != true_state]
            for pull in pulls:
                rise = env.expected_utility(agent, pull, true_state) - floor
                if rise > 0:
                    bounds.append(gap / rise)
    return min(bounds) * HALF


def build_lemma_y(env: Environment, epsilon: Optional[Fraction] = None) -> LemmaYSystem:
    """Construct and verify the reward/penalty lottery system of `env`"""
    states = env.states

    worst = {}
    for agent in env.agents:
        for state in states:
            if agent in env.active_agents(state):
                worst[(agent, state)] = Lottery.degenerate(env.worst_outcome(agent, state))
            else:
                worst[(agent, state)] = env.scf_lottery(state)

    agent_floor = {agent: Lottery.uniform([worst[(agent, state)] for state in states]) for agent in env.agents}
    # |Θ|-term average with the state's own slot replaced by f(state)
    own = {
        (agent, state): Lottery.uniform([
            env.scf_lottery(state) if other == state else worst[(agent, other)] for other in states
        ])
        for agent in env.agents for state in states
    }
    worst_mix = Lottery.uniform([agent_floor[agent] for agent in env.agents])

    share = Fraction(1, len(env.agents))
    reward = {}
    for agent in env.agents:
        for state in states:
            weighted = [(share, agent_floor[other]) for other in env.agents if other != agent]
            weighted.append((share, own[(agent, state)]))
            reward[(agent, state)] = Lottery.mixture(weighted)

    if epsilon is None:
        epsilon = _epsilon(env, worst, agent_floor, own)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise ValueError(f'epsilon must lie in (0, 1], got {format_rational(epsilon)}')

    penalty = {}
    for agent in env.agents:
        for state in states:
            pull = agent_floor[agent]
            for true_state in states:
                target = pull if state == true_state else own[(agent, state)]
                penalty[(agent, state, true_state)] = Lottery.mixture([
                    (1 - epsilon, worst[(agent, true_state)]), (epsilon, target),
                ])

    system = LemmaYSystem(env, epsilon, worst, agent_floor, own, worst_mix, reward, penalty)
    system.verify()
    logger.info('%s: lottery system verified with epsilon %s',
                env.name or 'environment', format_rational(epsilon))
    return system


class SigmaSet:
    """Ordered, deduplicated lottery menu with provenance tags"""

    def __init__(self):
        self.lotteries: List[Lottery] = []
        self.provenance: List[Tuple[str, ...]] = []
        self._index: Dict[Lottery, int] = {}

    def add(self, lottery: Lottery, tag: str) -> int:
        k = self._index.get(lottery)
        if k is None:
            k = len(self.lotteries)
            self._index[lottery] = k
            self.lotteries.append(lottery)
            self.provenance.append((tag,))
        elif tag not in self.provenance[k]:
            self.provenance[k] = self.provenance[k] + (tag,)
        return k

    def index_of(self, lottery: Lottery) -> int:
        return self._index[lottery]

    def __contains__(self, lottery):
        return lottery in self._index

    def __len__(self):
        return len(self.lotteries)

    def __getitem__(self, k: int) -> Lottery:
        return self.lotteries[k]

    def __iter__(self):
        return iter(self.lotteries)

    def admissible(self, env: Environment, agent: str, state: str) -> List[int]:
        """Indices of entries weakly below f(state) for `agent` at `state`"""
        bound = env.u(agent, env.f(state), state)
        return [k for k, lottery in enumerate(self.lotteries)
                if env.expected_utility(agent, lottery, state) <= bound]

    @classmethod
    def from_entries(cls, entries: Sequence[Tuple[Lottery, Sequence[str]]]) -> 'SigmaSet':
        sigma = cls()
        for lottery, tags in entries:
            for tag in tags:
                sigma.add(lottery, tag)
        return sigma

    def _serialize(self, outcomes: Sequence[str] = None) -> List[dict]:
        return [
            {'index': k, 'lottery': lottery._serialize(outcomes), 'provenance': list(tags)}
            for k, (lottery, tags) in enumerate(zip(self.lotteries, self.provenance))
        ]


def build_sigma(env: Environment, lemma: LemmaYSystem, reports: Sequence[AxiomReport] = ()) -> SigmaSet:
    """Sigma = f(Θ) ∪ penalties ∪ witness lotteries of the given reports"""
    for report in reports:
        if not report.holds:
            raise PreconditionError(f'cannot build Sigma: {report.summary()}', report)

    sigma = SigmaSet()
    for state in env.states:
        sigma.add(env.scf_lottery(state), SCF_IMAGE)
    for lottery in lemma.penalty.values():
        sigma.add(lottery, PENALTY)
    for report in reports:
        for lottery in report.lotteries():
            sigma.add(lottery, BLOCKING_WITNESS)

    logger.info('%s: Sigma has %d lotteries', env.name or 'environment', len(sigma))
    return sigma
