from fractions import Fraction

import pytest

from ratimpl.errors import CertificateFailure, PreconditionError
from ratimpl.models.environment import bundled_examples, load_environment
from ratimpl.models.lottery import Lottery
from ratimpl.services.axioms import AxiomChecker
from ratimpl.services.lemma_y import (
    BLOCKING_WITNESS, PENALTY, SCF_IMAGE, SigmaSet, build_lemma_y, build_sigma
)


@pytest.mark.parametrize('name', bundled_examples())
def test_bundled_systems_verify(name):
    system = build_lemma_y(load_environment(name))
    assert 0 < system.epsilon <= Fraction(1, 2)
    assert all(check.passed for check in system.inequality_checks())


def test_check_families(ex1b):
    labels = {check.label for check in build_lemma_y(ex1b).inequality_checks()}
    assert labels == {'cck1', 'cck2', 'cck3'}


def test_penalty_on_scf_outcome_breaks_system(ex1b):
    system = build_lemma_y(ex1b)
    agent = ex1b.ordered_agents(ex1b.active_agents('t2'))[0]
    broken = system.replace_penalty(agent, 't1', 't2', ex1b.scf_lottery('t2'))
    with pytest.raises(CertificateFailure) as err:
        broken.verify()
    assert any(check.label == 'cck2' for check in err.value.checks)
    # the original is untouched
    assert system.verify() is system


def active_penalties(name):
    env = load_environment(name)
    return [
        pytest.param(name, agent, state, true_state, id=f'{name}-{agent}-{state}-{true_state}')
        for true_state in env.states
        for agent in env.ordered_agents(env.active_agents(true_state))
        for state in env.states
    ]


@pytest.mark.parametrize('name, agent, state, true_state', [
    param for name in bundled_examples() for param in active_penalties(name)
])
def test_every_penalty_is_needed(name, agent, state, true_state):
    env = load_environment(name)
    broken = build_lemma_y(env).replace_penalty(agent, state, true_state, env.scf_lottery(true_state))
    with pytest.raises(CertificateFailure) as err:
        broken.verify()
    instance = {'agent': agent, 'state': state, 'true_state': true_state}
    assert any(check.label == 'cck2' and check.instance == instance for check in err.value.checks)


@pytest.mark.parametrize('name', bundled_examples())
@pytest.mark.parametrize('divisor', [2, 8])
def test_smaller_epsilon_still_verifies(name, divisor):
    env = load_environment(name)
    epsilon = build_lemma_y(env).epsilon / divisor
    system = build_lemma_y(env, epsilon=epsilon)
    assert system.epsilon == epsilon
    assert all(check.passed for check in system.inequality_checks())


def test_replace_unknown_penalty(ex1b):
    with pytest.raises(KeyError):
        build_lemma_y(ex1b).replace_penalty('i9', 't1', 't2', Lottery.degenerate('a'))


@pytest.mark.parametrize('epsilon', [0, -1, 2])
def test_epsilon_range(ex1b, epsilon):
    with pytest.raises(ValueError):
        build_lemma_y(ex1b, epsilon=epsilon)


def test_explicit_small_epsilon(dominance_env):
    system = build_lemma_y(dominance_env, epsilon=Fraction(1, 100))
    assert system.epsilon == Fraction(1, 100)


def test_serialization(ex1b):
    data = build_lemma_y(ex1b)._serialize()
    assert len(data['penalties']) == len(ex1b.agents) * len(ex1b.states) ** 2
    assert len(data['rewards']) == len(ex1b.agents) * len(ex1b.states)


class TestSigma:
    def test_dedup_and_provenance(self):
        sigma = SigmaSet()
        a = Lottery.degenerate('a')
        assert sigma.add(a, SCF_IMAGE) == 0
        assert sigma.add(Lottery.degenerate('b'), PENALTY) == 1
        assert sigma.add(Lottery({'a': 1}), BLOCKING_WITNESS) == 0
        assert len(sigma) == 2
        assert sigma.provenance[0] == (SCF_IMAGE, BLOCKING_WITNESS)
        assert a in sigma

    def test_admissible(self, dominance_env):
        sigma = SigmaSet.from_entries([
            (Lottery.degenerate('a'), [SCF_IMAGE]),
            (Lottery.degenerate('b'), [SCF_IMAGE]),
        ])
        assert sigma.admissible(dominance_env, 'i1', 't1') == [0, 1]
        assert sigma.admissible(dominance_env, 'i1', 't2') == [0, 1]

    def test_build_contains_scf_image(self, ex1b):
        lemma = build_lemma_y(ex1b)
        sigma = build_sigma(ex1b, lemma, [AxiomChecker(ex1b).check_strict_maskin()])
        for state in ex1b.states:
            assert ex1b.scf_lottery(state) in sigma
        assert all(z in sigma for z in lemma.penalty.values())

    def test_failed_report_rejected(self, ex4):
        report = AxiomChecker(ex4).check_strict_maskin_star()
        with pytest.raises(PreconditionError) as err:
            build_sigma(ex4, build_lemma_y(ex4), [report])
        assert err.value.report is report
