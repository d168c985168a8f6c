"""
Report Models - axiom reports, witnesses and inequality certificates
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ratimpl.models.environment import ContourSpec, Environment
from ratimpl.models.lottery import Lottery, format_rational
from ratimpl.models.partition import Partition


def _plain(value: Any) -> Any:
    """JSON-friendly copy of an obligation value"""
    if isinstance(value, Partition):
        return value._serialize()
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    return value


@dataclass(frozen=True)
class BlockingWitness:
    """Agent and lottery discharging one obligation"""

    obligation: Dict[str, Any]
    agent: str
    lottery: Lottery
    conditions: Tuple[ContourSpec, ...]

    def verify(self, env: Environment) -> bool:
        return all(
            spec.agent == self.agent and env.satisfies_contour(spec, self.lottery)
            for spec in self.conditions
        )

    def _serialize(self, env: Environment) -> dict:
        return {
            'obligation': _plain(self.obligation),
            'agent': self.agent,
            'lottery': self.lottery._serialize(env.outcomes),
            'conditions': [spec._serialize(env.outcomes) for spec in self.conditions],
        }


@dataclass(frozen=True)
class Counterexample:
    """Obligation that no witness discharges"""

    obligation: Dict[str, Any]
    reason: str

    def _serialize(self) -> dict:
        return {'obligation': _plain(self.obligation), 'reason': self.reason}


@dataclass(frozen=True)
class EliminationStep:
    state: str
    remaining: Tuple[str, ...]
    agent: str
    lottery: Lottery
    conditions: Tuple[ContourSpec, ...]


@dataclass(frozen=True)
class EliminationOrder:
    """Deletion sequence ending at the true state"""

    true_state: str
    steps: Tuple[EliminationStep, ...]

    @property
    def sequence(self) -> Tuple[str, ...]:
        return tuple(step.state for step in self.steps) + (self.true_state,)

    def verify(self, env: Environment) -> bool:
        remaining = list(env.states)
        for step in self.steps:
            if set(step.remaining) != set(remaining) or step.state == self.true_state:
                return False
            if step.agent not in env.active_agents_event(remaining):
                return False
            if not all(spec.agent == step.agent and env.satisfies_contour(spec, step.lottery)
                       for spec in step.conditions):
                return False
            remaining.remove(step.state)
        return remaining == [self.true_state]

    def _serialize(self, env: Environment) -> dict:
        return {
            'true_state': self.true_state,
            'sequence': list(self.sequence),
            'steps': [
                {
                    'state': step.state,
                    'remaining': list(step.remaining),
                    'agent': step.agent,
                    'lottery': step.lottery._serialize(env.outcomes),
                }
                for step in self.steps
            ],
        }


@dataclass
class AxiomReport:
    """Decision for one axiom with witnesses or counterexamples"""

    axiom: str
    title: str
    holds: bool
    witnesses: List[BlockingWitness] = field(default_factory=list)
    counterexamples: List[Counterexample] = field(default_factory=list)
    partition: Optional[Partition] = None
    orders: Dict[str, EliminationOrder] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def lotteries(self) -> List[Lottery]:
        """Witness lotteries in report order"""
        found = [witness.lottery for witness in self.witnesses]
        for order in self.orders.values():
            found.extend(step.lottery for step in order.steps)
        return found

    def verify(self, env: Environment) -> bool:
        if not self.holds and not self.counterexamples:
            return False
        return (all(witness.verify(env) for witness in self.witnesses)
                and all(order.verify(env) for order in self.orders.values()))

    def summary(self) -> str:
        if self.holds:
            suffix = f' with partition {self.partition._serialize()}' if self.partition else ''
            return f'{self.title} holds{suffix}'
        if self.partition is None and self.axiom in PARTITION_AXIOMS:
            return f'no partition satisfies {self.title}'
        return f'{self.title} fails'

    def _serialize(self, env: Environment) -> dict:
        data = {
            'axiom': self.axiom,
            'title': self.title,
            'holds': self.holds,
            'summary': self.summary(),
        }
        if self.partition is not None:
            data['partition'] = self.partition._serialize()
        data['witnesses'] = [witness._serialize(env) for witness in self.witnesses]
        if self.orders:
            data['orders'] = {state: order._serialize(env) for state, order in self.orders.items()}
        data['counterexamples'] = [example._serialize() for example in self.counterexamples]
        if self.notes:
            data['notes'] = list(self.notes)
        return data


PARTITION_AXIOMS = ('smm-star', 'smm-star-star', 'sem-star-star')


@dataclass(frozen=True)
class InequalityCheck:
    """One exact inequality instance: lhs (> or >=) rhs"""

    label: str
    instance: Dict[str, Any]
    lhs: Fraction
    relation: str
    rhs: Fraction

    @property
    def passed(self) -> bool:
        if self.relation == '>':
            return self.lhs > self.rhs
        if self.relation == '>=':
            return self.lhs >= self.rhs
        raise ValueError(f'unsupported relation {self.relation!r}')

    def _serialize(self) -> dict:
        return {
            'label': self.label,
            'instance': _plain(self.instance),
            'lhs': format_rational(self.lhs),
            'relation': self.relation,
            'rhs': format_rational(self.rhs),
            'passed': self.passed,
        }


@dataclass
class CertificateStep:
    name: str
    description: str
    checks: List[InequalityCheck] = field(default_factory=list)
    depends_on: Tuple[str, ...] = ()


@dataclass
class CertificateReport:
    """Per-step inequality certificates of a mechanism"""

    variant: str
    steps: List[CertificateStep] = field(default_factory=list)

    def step(self, name: str) -> CertificateStep:
        for step in self.steps:
            if step.name == name:
                return step
        raise KeyError(name)

    def step_passed(self, name: str) -> bool:
        step = self.step(name)
        return (all(check.passed for check in step.checks)
                and all(self.step_passed(dep) for dep in step.depends_on))

    @property
    def passed(self) -> bool:
        return all(self.step_passed(step.name) for step in self.steps)

    def failures(self) -> List[InequalityCheck]:
        return [check for step in self.steps for check in step.checks if not check.passed]

    def _serialize(self) -> dict:
        return {
            'variant': self.variant,
            'passed': self.passed,
            'steps': [
                {
                    'name': step.name,
                    'description': step.description,
                    'passed': self.step_passed(step.name),
                    'depends_on': list(step.depends_on),
                    'checked': len(step.checks),
                    'failures': [check._serialize() for check in step.checks if not check.passed],
                    'checks': [check._serialize() for check in step.checks],
                }
                for step in self.steps
            ],
        }
