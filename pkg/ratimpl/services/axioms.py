"""
Axiom Service - decision procedures for the implementability conditions
"""

import logging
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ratimpl.errors import CapExceededError, UnknownIdError
from ratimpl.models.environment import ContourKind, ContourSpec, Environment
from ratimpl.models.lottery import Lottery
from ratimpl.models.partition import Partition, enumerate_refinements
from ratimpl.models.reports import (
    AxiomReport, BlockingWitness, Counterexample, EliminationOrder, EliminationStep
)
from ratimpl.services.lp_rational import find_blocking_plan
from ratimpl.services.settings import get_settings

logger = logging.getLogger(__name__)

AXIOM_TITLES = {
    'nwa': 'no worst alternative',
    'responsiveness': 'responsiveness',
    'maskin': 'Maskin monotonicity',
    'no-veto': 'no-veto power',
    'strict-maskin': 'strict Maskin monotonicity',
    'smm-star': 'strict Maskin monotonicity*',
    'smm-star-star': 'strict Maskin monotonicity**',
    'strict-event': 'strict event monotonicity',
    'dictator': 'dictator monotonicity',
    'sie': 'strict iterated-elimination monotonicity',
    'sem-star-star': 'strict event monotonicity**',
    'condorcet': 'Condorcet function',
}

Evaluation = Tuple[List[BlockingWitness], Optional[Counterexample]]


def lower(agent: str, benchmark: Lottery, state: str, strict: bool = True) -> ContourSpec:
    kind = ContourKind.STRICT_LOWER if strict else ContourKind.WEAK_LOWER
    return ContourSpec(agent, benchmark, state, kind)


def upper(agent: str, benchmark: Lottery, state: str) -> ContourSpec:
    return ContourSpec(agent, benchmark, state, ContourKind.STRICT_UPPER)


class AxiomChecker:
    """Axiom checks for one environment, sharing memoized blocking searches"""

    def __init__(self, env: Environment):
        self.env = env
        self._plans: Dict[Tuple[str, Tuple[ContourSpec, ...]], Optional[Lottery]] = {}

    def find(self, agent: str, conditions: Tuple[ContourSpec, ...]) -> Optional[Lottery]:
        """Memoized find_blocking_plan"""
        key = (agent, conditions)
        if key not in self._plans:
            self._plans[key] = find_blocking_plan(self.env, agent, conditions)
        return self._plans[key]

    def _witness(self, obligation: dict, agents: Sequence[str],
                 conditions: Callable[[str], Tuple[ContourSpec, ...]]) -> Optional[BlockingWitness]:
        """First agent (in order) with a lottery meeting its conditions"""
        for agent in agents:
            specs = conditions(agent)
            lottery = self.find(agent, specs)
            if lottery is not None:
                return BlockingWitness(obligation, agent, lottery, specs)
        return None

    def _plan(self, obligation: dict, agents: Sequence[str], block: Sequence[str],
              benchmark: Lottery, true_state: str) -> Optional[List[BlockingWitness]]:
        """First agent with a state-contingent blocking plan over `block`"""
        for agent in agents:
            plan = []
            for hypothetical in block:
                specs = (lower(agent, benchmark, hypothetical), upper(agent, benchmark, true_state))
                lottery = self.find(agent, specs)
                if lottery is None:
                    break
                plan.append(BlockingWitness(
                    dict(obligation, hypothetical_state=hypothetical), agent, lottery, specs
                ))
            else:
                return plan
        return None

    def _report(self, axiom: str, witnesses, counterexamples, **extra) -> AxiomReport:
        report = AxiomReport(axiom, AXIOM_TITLES[axiom], not counterexamples,
                             list(witnesses), list(counterexamples), **extra)
        logger.info('%s: %s', self.env.name or 'environment', report.summary())
        return report

    # Per-state conditions

    def check_nwa(self) -> AxiomReport:
        env = self.env
        witnesses, counterexamples = [], []
        for state in env.states:
            benchmark = env.scf_lottery(state)
            active = env.active_agents(state)
            for agent in env.agents:
                obligation = {'agent': agent, 'state': state}
                if agent in active:
                    worst = Lottery.degenerate(env.worst_outcome(agent, state))
                    witnesses.append(BlockingWitness(
                        obligation, agent, worst, (lower(agent, benchmark, state),)
                    ))
                else:
                    counterexamples.append(Counterexample(
                        obligation, f'{env.f(state)} is a worst outcome of {agent} at {state}'
                    ))
        return self._report('nwa', witnesses, counterexamples)

    def check_responsiveness(self) -> AxiomReport:
        env = self.env
        counterexamples = [
            Counterexample({'states': [first, second], 'outcome': env.f(first)},
                           f'{first} and {second} share the outcome {env.f(first)}')
            for first, second in combinations(env.states, 2)
            if env.f(first) == env.f(second)
        ]
        return self._report('responsiveness', [], counterexamples)

    def _check_pairwise(self, axiom: str, strict: bool) -> AxiomReport:
        env = self.env
        witnesses, counterexamples = [], []
        for state in env.states:
            benchmark = env.scf_lottery(state)
            for true_state in env.states:
                if env.f(state) == env.f(true_state):
                    continue
                obligation = {'state': state, 'true_state': true_state}
                witness = self._witness(obligation, env.agents, lambda j: (
                    lower(j, benchmark, state, strict), upper(j, benchmark, true_state)
                ))
                if witness is None:
                    counterexamples.append(Counterexample(obligation, 'no whistle-blower'))
                else:
                    witnesses.append(witness)
        return self._report(axiom, witnesses, counterexamples)

    def check_maskin_monotonicity(self) -> AxiomReport:
        return self._check_pairwise('maskin', strict=False)

    def check_strict_maskin(self) -> AxiomReport:
        return self._check_pairwise('strict-maskin', strict=True)

    def check_no_veto(self) -> AxiomReport:
        env = self.env
        counterexamples = []
        for state in env.states:
            for z in env.outcomes:
                supporters = [i for i in env.agents if z in env.top_outcomes(i, state)]
                if len(supporters) >= len(env.agents) - 1 and z != env.f(state):
                    counterexamples.append(Counterexample(
                        {'state': state, 'outcome': z, 'agents': supporters},
                        f'{len(supporters)} agents rank {z} top but f({state}) = {env.f(state)}'
                    ))
        return self._report('no-veto', [], counterexamples)

    def check_condorcet(self) -> AxiomReport:
        env = self.env
        counterexamples = []
        for state in env.states:
            winner = env.condorcet_winner(state)
            if winner != env.f(state):
                counterexamples.append(Counterexample(
                    {'state': state, 'winner': winner},
                    'no Condorcet winner' if winner is None else f'the Condorcet winner is {winner}'
                ))
        return self._report('condorcet', [], counterexamples)

    # Partition searches

    def _search(self, axiom: str, evaluate: Callable[[Partition], Evaluation]) -> AxiomReport:
        cap = get_settings().refinement_cap
        counterexamples = []
        for count, partition in enumerate(enumerate_refinements(self.env.scf_partition()), 1):
            if count > cap:
                raise CapExceededError(f'more than {cap} candidate partitions for {AXIOM_TITLES[axiom]}')
            logger.debug('%s: trying %r', axiom, partition)
            witnesses, failure = evaluate(partition)
            if failure is None:
                return self._report(axiom, witnesses, [], partition=partition)
            counterexamples.append(Counterexample(
                dict({'partition': partition}, **failure.obligation), failure.reason
            ))
        return self._report(axiom, [], counterexamples)

    def _common_blocking(self, partition: Partition) -> Evaluation:
        env = self.env
        witnesses = []
        for block in partition.blocks:
            benchmark = env.scf_lottery(block[0])
            for true_state in env.states:
                if true_state in block:
                    continue
                obligation = {'block': list(block), 'true_state': true_state}
                witness = self._witness(obligation, env.agents, lambda i: tuple(
                    lower(i, benchmark, hypothetical) for hypothetical in block
                ) + (upper(i, benchmark, true_state),))
                if witness is None:
                    return witnesses, Counterexample(obligation, 'no agent has a common blocking lottery')
                witnesses.append(witness)
        return witnesses, None

    def _contingent_blocking(self, partition: Partition) -> Evaluation:
        env = self.env
        witnesses = []
        for block in partition.blocks:
            benchmark = env.scf_lottery(block[0])
            for true_state in env.states:
                if true_state in block:
                    continue
                obligation = {'block': list(block), 'true_state': true_state}
                plan = self._plan(obligation, env.agents, block, benchmark, true_state)
                if plan is None:
                    return witnesses, Counterexample(obligation, 'no agent has a state-contingent blocking plan')
                witnesses.extend(plan)
        return witnesses, None

    def check_strict_maskin_star(self) -> AxiomReport:
        return self._search('smm-star', self._common_blocking)

    def check_strict_maskin_star_star(self) -> AxiomReport:
        return self._search('smm-star-star', self._contingent_blocking)

    def check_smm_star_star_for_partition(self, partition: Partition) -> AxiomReport:
        """Contingent-blocking condition for one given partition"""
        if not partition.refines(self.env.scf_partition()):
            return self._report('smm-star-star', [], [Counterexample(
                {'partition': partition}, 'partition is not finer than the SCF partition'
            )])
        witnesses, failure = self._contingent_blocking(partition)
        if failure is None:
            return self._report('smm-star-star', witnesses, [], partition=partition)
        return self._report('smm-star-star', [], [Counterexample(
            dict({'partition': partition}, **failure.obligation), failure.reason
        )])

    # Event conditions

    def _events(self, states: Sequence[str]):
        for size in range(1, len(states) + 1):
            yield from combinations(states, size)

    def _require_event_cap(self):
        cap = get_settings().event_state_cap
        if len(self.env.states) > cap:
            raise CapExceededError(
                f'event enumeration over {len(self.env.states)} states exceeds the cap of {cap}'
            )

    def check_strict_event_monotonicity(self) -> AxiomReport:
        env = self.env
        self._require_event_cap()
        witnesses, counterexamples = [], []
        for true_state in env.states:
            for event in self._events(env.states):
                if env.scf_image(event) == {env.f(true_state)}:
                    continue
                active = env.ordered_agents(env.active_agents_event(event))
                obligation = {'true_state': true_state, 'event': list(event)}
                witness = None
                for state in event:
                    benchmark = env.scf_lottery(state)
                    witness = self._witness(dict(obligation, reported_state=state), active, lambda i: (
                        lower(i, benchmark, state), upper(i, benchmark, true_state)
                    ))
                    if witness is not None:
                        break
                if witness is None:
                    reason = 'no active agent on the event' if not active else 'no active whistle-blower'
                    counterexamples.append(Counterexample(obligation, reason))
                else:
                    witnesses.append(witness)
        return self._report('strict-event', witnesses, counterexamples)

    def check_dictator_monotonicity(self) -> AxiomReport:
        env = self.env
        witnesses, counterexamples = [], []
        for state in env.states:
            active = env.active_agents(state)
            if len(active) != 1:
                continue
            dictator = next(iter(active))
            benchmark = env.scf_lottery(state)
            for true_state in env.states:
                if env.f(state) == env.f(true_state):
                    continue
                for reference in env.states:
                    obligation = {'agent': dictator, 'state': state,
                                  'true_state': true_state, 'reference_state': reference}
                    witness = self._witness(obligation, [dictator], lambda i: (
                        lower(i, env.scf_lottery(reference), reference, strict=False),
                        upper(i, benchmark, true_state),
                    ))
                    if witness is None:
                        counterexamples.append(Counterexample(obligation, 'dictator cannot be rewarded'))
                    else:
                        witnesses.append(witness)
        return self._report('dictator', witnesses, counterexamples)

    def check_strict_iterated_elimination(self, true_state: str) -> Optional[EliminationOrder]:
        """Greedy deletion of every state but `true_state`"""
        env = self.env
        env.state_index(true_state)
        remaining = list(env.states)
        steps = []
        while len(remaining) > 1:
            active = env.ordered_agents(env.active_agents_event(remaining))
            step = None
            for state in remaining:
                if state == true_state:
                    continue
                benchmark = env.scf_lottery(state)
                for agent in active:
                    specs = (lower(agent, benchmark, state), upper(agent, benchmark, true_state))
                    lottery = self.find(agent, specs)
                    if lottery is not None:
                        step = EliminationStep(state, tuple(remaining), agent, lottery, specs)
                        break
                if step is not None:
                    break
            if step is None:
                logger.debug('elimination towards %s stuck at %s', true_state, remaining)
                return None
            steps.append(step)
            remaining.remove(step.state)
        return EliminationOrder(true_state, tuple(steps))

    def check_iterated_elimination_all(self) -> AxiomReport:
        env = self.env
        orders, counterexamples = {}, []
        for true_state in env.states:
            order = self.check_strict_iterated_elimination(true_state)
            if order is None:
                counterexamples.append(Counterexample(
                    {'true_state': true_state}, 'no deletion order ends at this state'
                ))
            else:
                orders[true_state] = order
        return self._report('sie', [], counterexamples, orders=orders)

    def _event_partition(self, partition: Partition) -> Evaluation:
        env = self.env
        witnesses = []
        blocks = partition.blocks

        # Part 1: events as sets of blocks
        for true_state in env.states:
            home = set(partition.block_of(true_state))
            for chosen in self._events(blocks):
                union = [state for block in chosen for state in block]
                if set(union) == home:
                    continue
                active = env.ordered_agents(env.active_agents_event(union))
                obligation = {'part': 1, 'true_state': true_state, 'event': env.ordered_states(union)}
                plan = None
                for block in chosen:
                    plan = self._plan(dict(obligation, block=list(block)), active, block,
                                      env.scf_lottery(block[0]), true_state)
                    if plan is not None:
                        break
                if plan is None:
                    return witnesses, Counterexample(obligation, 'no whistle-blower active on the event')
                witnesses.extend(plan)

        # Part 2: dictators of whole blocks
        for block in blocks:
            active = env.active_agents_event(block)
            if len(active) != 1:
                continue
            dictator = next(iter(active))
            benchmark = env.scf_lottery(block[0])
            for true_state in env.states:
                if true_state in block:
                    continue
                for reference in env.states:
                    obligation = {'part': 2, 'agent': dictator, 'block': list(block),
                                  'true_state': true_state, 'reference_state': reference}
                    witness = self._witness(obligation, [dictator], lambda i: (
                        lower(i, env.scf_lottery(reference), reference, strict=False),
                        upper(i, benchmark, true_state),
                    ))
                    if witness is None:
                        return witnesses, Counterexample(obligation, 'dictator cannot be rewarded')
                    witnesses.append(witness)
        return witnesses, None

    def check_strict_event_star_star(self) -> AxiomReport:
        self._require_event_cap()
        return self._search('sem-star-star', self._event_partition)

    def run(self, axiom: str) -> AxiomReport:
        try:
            method = getattr(self, AXIOM_CHECKS[axiom])
        except KeyError:
            raise UnknownIdError(f'unknown axiom {axiom!r}; choose from {", ".join(AXIOM_CHECKS)}')
        return method()

    def run_all(self) -> List[AxiomReport]:
        return [self.run(axiom) for axiom in AXIOM_CHECKS]


AXIOM_CHECKS = {
    'nwa': 'check_nwa',
    'responsiveness': 'check_responsiveness',
    'maskin': 'check_maskin_monotonicity',
    'no-veto': 'check_no_veto',
    'strict-maskin': 'check_strict_maskin',
    'smm-star': 'check_strict_maskin_star',
    'smm-star-star': 'check_strict_maskin_star_star',
    'strict-event': 'check_strict_event_monotonicity',
    'dictator': 'check_dictator_monotonicity',
    'sie': 'check_iterated_elimination_all',
    'sem-star-star': 'check_strict_event_star_star',
    'condorcet': 'check_condorcet',
}


# Convenience functions

def check_nwa(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_nwa()


def check_responsiveness(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_responsiveness()


def check_maskin_monotonicity(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_maskin_monotonicity()


def check_no_veto(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_no_veto()


def check_strict_maskin(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_strict_maskin()


def check_strict_maskin_star(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_strict_maskin_star()


def check_strict_maskin_star_star(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_strict_maskin_star_star()


def check_strict_event_monotonicity(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_strict_event_monotonicity()


def check_dictator_monotonicity(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_dictator_monotonicity()


def check_strict_iterated_elimination(env: Environment, true_state: str) -> Optional[EliminationOrder]:
    return AxiomChecker(env).check_strict_iterated_elimination(true_state)


def check_strict_event_star_star(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_strict_event_star_star()


def check_condorcet(env: Environment) -> AxiomReport:
    return AxiomChecker(env).check_condorcet()
