"""
Exact LP Service - rational simplex and max-slack feasibility over the lottery simplex
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from ratimpl.errors import UnknownIdError
from ratimpl.models.environment import ContourKind, ContourSpec, Environment
from ratimpl.models.lottery import Lottery

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


class Relation(str, Enum):
    GE = '>='
    GT = '>'
    LE = '<='
    LT = '<'

    @property
    def strict(self) -> bool:
        return self in (Relation.GT, Relation.LT)


@dataclass(frozen=True)
class LinearConstraint:
    """sum_k coefficients[k] * x_k (relation) bound"""

    coefficients: Mapping[Hashable, Fraction]
    relation: Relation
    bound: Fraction

    def evaluate(self, point: Mapping[Hashable, Fraction]) -> Fraction:
        return sum((c * point.get(label, ZERO) for label, c in self.coefficients.items()), ZERO)

    def margin(self, point: Mapping[Hashable, Fraction]) -> Fraction:
        """Signed distance from the bound, positive on the satisfied side"""
        value = self.evaluate(point)
        if self.relation in (Relation.GE, Relation.GT):
            return value - self.bound
        return self.bound - value

    def satisfied_by(self, point: Mapping[Hashable, Fraction]) -> bool:
        margin = self.margin(point)
        return margin > 0 if self.relation.strict else margin >= 0


class LpStatus(str, Enum):
    FEASIBLE = 'feasible'
    INFEASIBLE = 'infeasible'


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    witness: Optional[Lottery] = None
    slack: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.FEASIBLE


@dataclass(frozen=True)
class SlackSolution:
    """Point on the simplex of labels with its common strict margin"""

    feasible: bool
    point: Optional[Dict[Hashable, Fraction]] = None
    slack: Optional[Fraction] = None


class SimplexTableau:
    """Dense rational tableau, maximization, Bland's rule"""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int]):
        self.A = rows
        self.b = rhs
        self.basis = basis

    @property
    def width(self) -> int:
        return len(self.A[0]) if self.A else 0

    def pivot(self, r: int, col: int):
        piv = self.A[r][col]
        row = [v / piv for v in self.A[r]]
        rhs = self.b[r] / piv
        self.A[r] = row
        self.b[r] = rhs
        for i in range(len(self.A)):
            if i == r:
                continue
            factor = self.A[i][col]
            if factor:
                self.A[i] = [a - factor * p for a, p in zip(self.A[i], row)]
                self.b[i] -= factor * rhs
        self.basis[r] = col

    def optimize(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> str:
        """Maximize cost . x over the current basis; 'optimal' or 'unbounded'"""
        while True:
            entering = None
            for j in range(self.width):
                if not allowed[j] or j in self.basis:
                    continue
                reduced = cost[j] - sum(
                    (cost[self.basis[i]] * self.A[i][j] for i in range(len(self.A))), ZERO
                )
                if reduced > 0:
                    entering = j
                    break
            if entering is None:
                return 'optimal'

            leaving = None
            best = None
            for i in range(len(self.A)):
                a = self.A[i][entering]
                if a > 0:
                    ratio = self.b[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                return 'unbounded'
            self.pivot(leaving, entering)

    def value_of(self, column: int) -> Fraction:
        for i, basic in enumerate(self.basis):
            if basic == column:
                return self.b[i]
        return ZERO


def _solve_standard_form(
    n: int,
    constraints: Sequence[Tuple[Sequence[Fraction], str, Fraction]],
    objective: Sequence[Fraction],
) -> Tuple[str, Optional[List[Fraction]], Optional[Fraction]]:
    """Maximize objective . x s.t. rows (<=, >=, =) rhs, x >= 0"""
    normalized = []
    for coeffs, sense, rhs in constraints:
        coeffs = list(coeffs)
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            sense = {'<=': '>=', '>=': '<=', '=': '='}[sense]
        normalized.append((coeffs, sense, rhs))

    slack_count = sum(1 for _, sense, _ in normalized if sense != '=')
    artificial_count = sum(1 for _, sense, _ in normalized if sense != '<=')
    width = n + slack_count + artificial_count

    rows, rhs_values, basis = [], [], []
    artificial_columns = []
    slack_col = n
    artificial_col = n + slack_count
    for coeffs, sense, rhs in normalized:
        row = coeffs + [ZERO] * (width - n)
        if sense == '<=':
            row[slack_col] = ONE
            basis.append(slack_col)
            slack_col += 1
        else:
            if sense == '>=':
                row[slack_col] = -ONE
                slack_col += 1
            row[artificial_col] = ONE
            basis.append(artificial_col)
            artificial_columns.append(artificial_col)
            artificial_col += 1
        rows.append(row)
        rhs_values.append(rhs)

    tableau = SimplexTableau(rows, rhs_values, basis)
    is_artificial = [False] * width
    for col in artificial_columns:
        is_artificial[col] = True

    # Phase 1
    if artificial_columns:
        phase_one = [-ONE if is_artificial[j] else ZERO for j in range(width)]
        tableau.optimize(phase_one, [True] * width)
        infeasibility = sum((tableau.value_of(col) for col in artificial_columns), ZERO)
        if infeasibility > 0:
            return 'infeasible', None, None

        # Drive artificials out of the basis
        r = 0
        while r < len(tableau.A):
            if is_artificial[tableau.basis[r]]:
                col = next((j for j in range(width)
                            if not is_artificial[j] and tableau.A[r][j] != 0), None)
                if col is None:
                    del tableau.A[r]
                    del tableau.b[r]
                    del tableau.basis[r]
                    continue
                tableau.pivot(r, col)
            r += 1

    # Phase 2
    cost = list(objective) + [ZERO] * (width - n)
    allowed = [not is_artificial[j] for j in range(width)]
    status = tableau.optimize(cost, allowed)
    if status == 'unbounded':
        return 'unbounded', None, None

    x = [tableau.value_of(j) for j in range(n)]
    value = sum((c * v for c, v in zip(objective, x)), ZERO)
    return 'optimal', x, value


def maximize_slack(
    labels: Sequence[Hashable],
    constraints: Sequence[LinearConstraint],
    normalize: bool = True,
) -> SlackSolution:
    """Max common margin delta of the strict constraints over the simplex of labels

    Weak constraints are kept as stated; strict ones are tightened by delta.
    With `normalize`, the returned point is the optimal vertex that puts as
    much mass as possible on earlier labels (first label first), so a
    degenerate lottery on an early outcome wins ties.
    """
    labels = list(labels)
    if not labels:
        raise ValueError('at least one variable is required')
    position = {label: k for k, label in enumerate(labels)}
    for constraint in constraints:
        for label in constraint.coefficients:
            if label not in position:
                raise UnknownIdError(f'constraint mentions unknown variable {label!r}')

    strict = any(c.relation.strict for c in constraints)
    n = len(labels) + (1 if strict else 0)
    delta = len(labels)

    rows = [([ONE] * len(labels) + ([ZERO] if strict else []), '=', ONE)]
    for constraint in constraints:
        coeffs = [ZERO] * n
        for label, c in constraint.coefficients.items():
            coeffs[position[label]] += Fraction(c)
        bound = Fraction(constraint.bound)
        if constraint.relation is Relation.GE:
            rows.append((coeffs, '>=', bound))
        elif constraint.relation is Relation.LE:
            rows.append((coeffs, '<=', bound))
        elif constraint.relation is Relation.GT:
            coeffs[delta] = -ONE
            rows.append((coeffs, '>=', bound))
        else:
            coeffs[delta] = ONE
            rows.append((coeffs, '<=', bound))

    objective = [ZERO] * n
    if strict:
        objective[delta] = ONE

    status, x, value = _solve_standard_form(n, rows, objective)
    if status != 'optimal':
        logger.debug('max-slack LP over %d labels: %s', len(labels), status)
        return SlackSolution(False)
    if strict and value <= 0:
        logger.debug('max-slack LP over %d labels: optimum delta %s', len(labels), value)
        return SlackSolution(False, slack=value)

    slack = value if strict else ZERO
    if normalize and len(labels) > 1:
        fixed = list(rows)
        if strict:
            pin = [ZERO] * n
            pin[delta] = ONE
            fixed.append((pin, '=', slack))
        for label in labels[:-1]:
            k = position[label]
            goal = [ZERO] * n
            goal[k] = ONE
            status, x, value = _solve_standard_form(n, fixed, goal)
            pin = [ZERO] * n
            pin[k] = ONE
            fixed.append((pin, '=', x[k]))

    point = {label: x[position[label]] for label in labels}
    return SlackSolution(True, point, slack)


def solve_max_slack(outcomes: Sequence[str], constraints: Sequence[LinearConstraint]) -> LpResult:
    """Decide the constraint system over lotteries on `outcomes`"""
    if not outcomes:
        raise ValueError('empty outcome list')
    solution = maximize_slack(outcomes, constraints)
    if not solution.feasible:
        return LpResult(LpStatus.INFEASIBLE, slack=solution.slack)
    witness = Lottery({z: p for z, p in solution.point.items() if p})
    return LpResult(LpStatus.FEASIBLE, witness, solution.slack)


def contour_constraint(env: Environment, spec: ContourSpec) -> LinearConstraint:
    """Linear form of a contour membership condition"""
    bound = env.expected_utility(spec.agent, spec.benchmark, spec.state)
    relation = {
        ContourKind.WEAK_LOWER: Relation.LE,
        ContourKind.STRICT_LOWER: Relation.LT,
        ContourKind.STRICT_UPPER: Relation.GT,
    }[spec.kind]
    return LinearConstraint(env.utility_vector(spec.agent, spec.state), relation, bound)


def find_blocking_plan(env: Environment, agent: str, requirements: Sequence[ContourSpec]) -> Optional[Lottery]:
    """Lottery meeting every contour requirement of one agent, if any"""
    if not requirements:
        raise ValueError('requirements must be nonempty')
    env.agent_index(agent)
    for spec in requirements:
        if spec.agent != agent:
            raise ValueError(f'requirement for {spec.agent!r} passed to the plan of {agent!r}')

    result = solve_max_slack(env.outcomes, [contour_constraint(env, spec) for spec in requirements])
    return result.witness if result.feasible else None


def find_state_contingent_plan(
    env: Environment,
    agent: str,
    benchmark: Lottery,
    hypothetical_states: Sequence[str],
    true_state: str,
) -> Optional[Dict[str, Lottery]]:
    """Per-state lotteries strictly below `benchmark` at each hypothetical state
    and strictly above it at the true state"""
    plan = {}
    for state in hypothetical_states:
        witness = find_blocking_plan(env, agent, [
            ContourSpec(agent, benchmark, state, ContourKind.STRICT_LOWER),
            ContourSpec(agent, benchmark, true_state, ContourKind.STRICT_UPPER),
        ])
        if witness is None:
            return None
        plan[state] = witness
    return plan


def contour_containment(
    env: Environment,
    agent: str,
    benchmark: Lottery,
    state: str,
    other_state: str,
    inner: ContourKind,
    outer: ContourKind,
) -> bool:
    """Is the inner contour of `benchmark` at `state` inside the outer one at `other_state`?"""
    lower = (ContourKind.WEAK_LOWER, ContourKind.STRICT_LOWER)
    if inner not in lower or outer not in lower:
        raise ValueError('containment is decided for lower contour sets only')

    member = contour_constraint(env, ContourSpec(agent, benchmark, state, inner))
    # complement of the outer set: weak-lower -> strictly above, strict-lower -> weakly above
    outside = LinearConstraint(
        env.utility_vector(agent, other_state),
        Relation.GT if outer is ContourKind.WEAK_LOWER else Relation.GE,
        env.expected_utility(agent, benchmark, other_state),
    )
    escape = solve_max_slack(env.outcomes, [member, outside])
    return not escape.feasible
