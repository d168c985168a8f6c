from fractions import Fraction
from itertools import combinations, permutations

import pytest

from ratimpl.data.random_instances import random_environment
from ratimpl.errors import UnknownIdError
from ratimpl.models.environment import ContourKind, ContourSpec, Environment
from ratimpl.models.lottery import Lottery
from ratimpl.services.lp_rational import (
    LinearConstraint, Relation, contour_constraint, contour_containment, find_blocking_plan,
    find_state_contingent_plan, maximize_slack, solve_max_slack
)

AGENTS = ['i1', 'i2', 'i3']


@pytest.fixture
def flipped(env_factory):
    """i1 ranks a > b > c at t1 and c > b > a at t2"""
    rows = {'t1': [2, 1, 0], 't2': [0, 1, 2]}
    return env_factory(AGENTS, ['t1', 't2'], ['a', 'b', 'c'], {i: rows for i in AGENTS},
                       {'t1': 'a', 't2': 'c'})


@pytest.fixture
def fixed(env_factory):
    rows = {'t1': [2, 1, 0], 't2': [2, 1, 0]}
    return env_factory(AGENTS, ['t1', 't2'], ['a', 'b', 'c'], {i: rows for i in AGENTS},
                       {'t1': 'a', 't2': 'b'})


class TestLinearConstraint:
    def test_margin(self):
        c = LinearConstraint({'x': 1, 'y': -1}, Relation.GT, Fraction(0))
        assert c.margin({'x': Fraction(3, 4), 'y': Fraction(1, 4)}) == Fraction(1, 2)
        assert c.satisfied_by({'x': Fraction(3, 4), 'y': Fraction(1, 4)})
        assert not c.satisfied_by({'x': Fraction(1, 2), 'y': Fraction(1, 2)})

    def test_weak_boundary(self):
        c = LinearConstraint({'x': 1}, Relation.LE, Fraction(1, 2))
        assert c.satisfied_by({'x': Fraction(1, 2)})


class TestMaximizeSlack:
    def test_strict_margin(self):
        solution = maximize_slack(['x', 'y'], [LinearConstraint({'x': 1, 'y': -1}, Relation.GT, Fraction(0))])
        assert solution.feasible
        assert solution.slack == 1
        assert solution.point == {'x': 1, 'y': 0}

    def test_expected_utility_margin(self):
        u = {'a': 2, 'b': 1, 'c': 0}
        solution = maximize_slack(['a', 'b', 'c'], [LinearConstraint(u, Relation.GT, Fraction(1, 2))])
        assert solution.slack == Fraction(3, 2)
        assert solution.point['a'] == 1

    def test_strict_infeasible(self):
        solution = maximize_slack(['x', 'y'], [LinearConstraint({'x': 1}, Relation.GT, Fraction(1))])
        assert not solution.feasible

    def test_weak_infeasible(self):
        solution = maximize_slack(['x', 'y'], [LinearConstraint({'x': 1, 'y': 1}, Relation.LE, Fraction(1, 2))])
        assert not solution.feasible

    def test_ties_favor_earlier_labels(self):
        solution = maximize_slack(['a', 'b', 'c'], [])
        assert solution.point == {'a': 1, 'b': 0, 'c': 0}

    def test_weak_constraints_kept(self):
        solution = maximize_slack(['a', 'b'], [LinearConstraint({'a': 1}, Relation.LE, Fraction(1, 3))])
        assert solution.point == {'a': Fraction(1, 3), 'b': Fraction(2, 3)}
        assert solution.slack == 0

    def test_unknown_variable(self):
        with pytest.raises(UnknownIdError):
            maximize_slack(['x'], [LinearConstraint({'z': 1}, Relation.GE, Fraction(0))])

    def test_no_variables(self):
        with pytest.raises(ValueError):
            maximize_slack([], [])


class TestSolveMaxSlack:
    def test_witness_is_lottery(self):
        result = solve_max_slack(['a', 'b'], [LinearConstraint({'b': 1}, Relation.GT, Fraction(1, 2))])
        assert result.feasible
        assert result.witness == Lottery.degenerate('b')

    def test_empty_outcomes(self):
        with pytest.raises(ValueError):
            solve_max_slack([], [])


class TestBlockingPlans:
    def test_reversal_found(self, flipped):
        plan = find_blocking_plan(flipped, 'i1', [
            ContourSpec('i1', Lottery.degenerate('b'), 't1', ContourKind.STRICT_LOWER),
            ContourSpec('i1', Lottery.degenerate('b'), 't2', ContourKind.STRICT_UPPER),
        ])
        assert plan == Lottery.degenerate('c')

    def test_no_reversal(self, fixed):
        plan = find_blocking_plan(fixed, 'i1', [
            ContourSpec('i1', Lottery.degenerate('b'), 't1', ContourKind.STRICT_LOWER),
            ContourSpec('i1', Lottery.degenerate('b'), 't2', ContourKind.STRICT_UPPER),
        ])
        assert plan is None

    def test_requirements_checked(self, flipped):
        with pytest.raises(ValueError):
            find_blocking_plan(flipped, 'i1', [])
        with pytest.raises(ValueError):
            find_blocking_plan(flipped, 'i1', [
                ContourSpec('i2', Lottery.degenerate('b'), 't1', ContourKind.STRICT_LOWER),
            ])
        with pytest.raises(UnknownIdError):
            find_blocking_plan(flipped, 'i9', [
                ContourSpec('i9', Lottery.degenerate('b'), 't1', ContourKind.STRICT_LOWER),
            ])

    def test_state_contingent(self, flipped, fixed):
        plan = find_state_contingent_plan(flipped, 'i1', Lottery.degenerate('b'), ['t1'], 't2')
        assert plan == {'t1': Lottery.degenerate('c')}
        assert find_state_contingent_plan(fixed, 'i1', Lottery.degenerate('b'), ['t1'], 't2') is None

    def test_witness_satisfies_requirements(self, flipped):
        benchmark = Lottery({'a': '1/2', 'c': '1/2'})
        specs = [
            ContourSpec('i1', benchmark, 't1', ContourKind.STRICT_LOWER),
            ContourSpec('i1', benchmark, 't2', ContourKind.STRICT_UPPER),
        ]
        plan = find_blocking_plan(flipped, 'i1', specs)
        assert plan is not None
        assert all(flipped.satisfies_contour(spec, plan) for spec in specs)


class TestContainment:
    def test_same_ranking(self, fixed):
        assert contour_containment(fixed, 'i1', Lottery.degenerate('b'), 't1', 't2',
                                   ContourKind.WEAK_LOWER, ContourKind.WEAK_LOWER)

    def test_flipped_ranking(self, flipped):
        assert not contour_containment(flipped, 'i1', Lottery.degenerate('b'), 't1', 't2',
                                       ContourKind.WEAK_LOWER, ContourKind.WEAK_LOWER)

    def test_upper_sets_rejected(self, fixed):
        with pytest.raises(ValueError):
            contour_containment(fixed, 'i1', Lottery.degenerate('b'), 't1', 't2',
                                ContourKind.STRICT_UPPER, ContourKind.WEAK_LOWER)


def solve_square(matrix, rhs):
    """Unique solution of a square rational system, or None"""
    n = len(matrix)
    rows = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [rows[k][n] / rows[k][k] for k in range(n)]


def vertex_oracle(labels, constraints):
    """Decide a max-slack system by enumerating the vertices of its polytope"""
    strict = any(c.relation.strict for c in constraints)
    dim = len(labels) + (1 if strict else 0)
    inequalities = []
    for k in range(len(labels)):
        row = [Fraction(0)] * dim
        row[k] = Fraction(1)
        inequalities.append((row, Fraction(0)))
    for c in constraints:
        sign = 1 if c.relation in (Relation.GE, Relation.GT) else -1
        row = [sign * Fraction(c.coefficients.get(label, 0)) for label in labels]
        if strict:
            row.append(Fraction(-1) if c.relation.strict else Fraction(0))
        inequalities.append((row, sign * Fraction(c.bound)))

    simplex_row = [Fraction(1)] * len(labels) + ([Fraction(0)] if strict else [])
    best = None
    for tight in combinations(inequalities, dim - 1):
        point = solve_square([simplex_row] + [row for row, _ in tight],
                             [Fraction(1)] + [bound for _, bound in tight])
        if point is None:
            continue
        if all(sum(a * x for a, x in zip(row, point)) >= bound for row, bound in inequalities):
            value = point[-1] if strict else Fraction(0)
            best = value if best is None else max(best, value)
    if best is None:
        return False, None
    return (best > 0 if strict else True), best


def random_system(rng):
    labels = [f'z{k}' for k in range(rng.randint(2, 4))]
    constraints = [
        LinearConstraint(
            {label: Fraction(rng.randint(-3, 3)) for label in labels},
            rng.choice(list(Relation)),
            Fraction(rng.randint(-2, 2)),
        )
        for _ in range(rng.randint(1, 3))
    ]
    return labels, constraints


class TestAgainstVertices:
    def test_status_matches_vertex_enumeration(self, rng):
        for _ in range(150):
            labels, constraints = random_system(rng)
            feasible, best = vertex_oracle(labels, constraints)
            result = solve_max_slack(labels, constraints)
            assert result.feasible == feasible, constraints
            if result.feasible:
                point = {z: result.witness.prob(z) for z in labels}
                assert all(c.satisfied_by(point) for c in constraints)
                if any(c.relation.strict for c in constraints):
                    assert result.slack == best

    def test_status_survives_rescaling(self, rng):
        for _ in range(40):
            env = random_environment(rng, max_states=3)
            agent, state = rng.choice(env.agents), rng.choice(env.states)
            scale, shift = Fraction(rng.randint(1, 5), rng.randint(1, 5)), Fraction(rng.randint(-4, 4))
            utility = {
                (i, z, s): env.u(i, z, s) * scale + shift if (i, s) == (agent, state) else env.u(i, z, s)
                for i in env.agents for z in env.outcomes for s in env.states
            }
            moved = Environment(env.agents, env.states, env.outcomes, utility,
                                {s: env.f(s) for s in env.states})
            for z in env.outcomes:
                benchmark = Lottery.degenerate(z)
                for here, there in permutations(env.states, 2):
                    specs = [ContourSpec(agent, benchmark, here, ContourKind.STRICT_LOWER),
                             ContourSpec(agent, benchmark, there, ContourKind.STRICT_UPPER)]
                    assert (find_blocking_plan(env, agent, specs) is None) == \
                        (find_blocking_plan(moved, agent, specs) is None)
                    assert contour_containment(env, agent, benchmark, here, there,
                                               ContourKind.WEAK_LOWER, ContourKind.STRICT_LOWER) == \
                        contour_containment(moved, agent, benchmark, here, there,
                                            ContourKind.WEAK_LOWER, ContourKind.STRICT_LOWER)


class TestExampleFour:
    def test_reversal_against_t4(self, ex4):
        a = Lottery.degenerate('a')
        result = solve_max_slack(ex4.outcomes, [
            contour_constraint(ex4, ContourSpec('i1', a, 't1', ContourKind.STRICT_LOWER)),
            contour_constraint(ex4, ContourSpec('i1', a, 't4', ContourKind.STRICT_UPPER)),
        ])
        assert result.feasible
        assert result.witness == Lottery.degenerate('b')
        assert result.slack == 1

    def test_no_common_lower_lottery(self, ex4):
        a = Lottery.degenerate('a')
        result = solve_max_slack(ex4.outcomes, [
            contour_constraint(ex4, ContourSpec('i1', a, 't1', ContourKind.STRICT_LOWER)),
            contour_constraint(ex4, ContourSpec('i1', a, 't2', ContourKind.STRICT_LOWER)),
        ])
        assert not result.feasible
