"""
Examples Command - regression run over the bundled example environments
"""

import logging

from marshmallow import fields, validates_schema, ValidationError

from ratimpl.commands.base import (
    EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, separator, status_line
)
from ratimpl.data.expectations import ERRATUM, EXPECTATIONS
from ratimpl.errors import CertificateFailure, PreconditionError, UnknownIdError
from ratimpl.models.environment import ContourKind, Environment, bundled_examples, load_environment
from ratimpl.services.axioms import AxiomChecker
from ratimpl.services.characterization import characterize
from ratimpl.services.lemma_y import build_lemma_y
from ratimpl.services.lp_rational import contour_containment
from ratimpl.services.mechanism import build_mechanism, verify_certificates

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'


class ExamplesSpecSchema(CommandSpecSchema):
    names = fields.List(fields.Str(), load_default=list)
    all = fields.Bool(load_default=False)

    @validates_schema
    def validate_selection(self, data, **kwargs):
        if not data['all'] and not data['names']:
            raise ValidationError('name at least one example or pass --all')


def _certificates(env: Environment, variant: str) -> bool:
    try:
        return verify_certificates(env, build_mechanism(env, variant)).passed
    except PreconditionError:
        return False


def _lemma_y(env: Environment) -> bool:
    try:
        build_lemma_y(env)
    except CertificateFailure:
        return False
    return True


def _containment(env: Environment, states) -> bool:
    state, other = states
    benchmark = env.scf_lottery(state)
    return all(
        contour_containment(env, agent, benchmark, state, other, ContourKind.WEAK_LOWER, ContourKind.WEAK_LOWER)
        for agent in env.agents
    )


def evaluate(env: Environment, checker: AxiomChecker, check: str, target):
    """Value of one expectation check on `env`"""
    if check == 'axiom':
        return checker.run(target).holds
    if check == 'partition':
        report = checker.run(target)
        return report.partition._serialize() if report.holds else None
    if check == 'nwa-failures':
        return [[c.obligation['agent'], c.obligation['state']] for c in checker.check_nwa().counterexamples]
    if check == 'active':
        return env.ordered_agents(env.active_agents_event(target))
    if check == 'scf-partition':
        return env.scf_partition()._serialize()
    if check == 'elimination':
        order = checker.check_strict_iterated_elimination(target)
        return list(order.sequence) if order is not None else None
    if check == 'condorcet-winner':
        return env.condorcet_winner(target)
    if check == 'containment':
        return _containment(env, target)
    if check == 'implementable':
        return characterize(env, checker).implementable
    if check == 'lemma-y':
        return _lemma_y(env)
    if check == 'certificates':
        return _certificates(env, target)
    raise UnknownIdError(f'unknown expectation check {check!r}')


def run_example(name: str, validation: str = None) -> dict:
    env = load_environment(name, validation)
    checker = AxiomChecker(env)
    rows = []
    for entry in EXPECTATIONS.get(name, []):
        value = evaluate(env, checker, entry['check'], entry['target'])
        row = {'check': entry['check'], 'target': entry['target'], 'expected': entry['expected'], 'value': value}
        if 'recomputed' in entry:
            row['recomputed'] = entry['recomputed']
            row['status'] = ERRATUM if value == entry['recomputed'] else FAIL
            if row['status'] == ERRATUM:
                logger.warning('%s: %s %s is %s in the utility table, published as %s',
                               name, entry['check'], entry['target'], value, entry['expected'])
        else:
            row['status'] = PASS if value == entry['expected'] else FAIL
        rows.append(row)

    axioms = {report.axiom: report.holds for report in checker.run_all()}
    return {
        'example': name,
        'notes': list(env.notes),
        'active_sets': {state: env.ordered_agents(env.active_agents(state)) for state in env.states},
        'axioms': axioms,
        'expectations': rows,
    }


def run(data: dict) -> CommandResult:
    spec = load_spec(ExamplesSpecSchema(), data)
    available = bundled_examples()
    names = available if spec['all'] else spec['names']
    unknown = [name for name in names if name not in available]
    if unknown:
        raise UnknownIdError(f'unknown examples {unknown}; choose from {", ".join(available)}')

    results, lines, failed = [], [], 0
    for name in names:
        result = run_example(name, spec['validation'])
        results.append(result)
        lines.extend([separator(), name, separator()])
        for row in result['expectations']:
            target = '' if row['target'] is None else f' {row["target"]}'
            text = f'{row["check"]}{target}: {row["value"]}'
            if row['status'] == ERRATUM:
                lines.append(f'⚠️  {text} (published {row["expected"]}, {ERRATUM})')
            else:
                lines.append(status_line(row['status'] == PASS, text))
            failed += row['status'] == FAIL

    counts = {}
    for result in results:
        for row in result['expectations']:
            counts[row['status']] = counts.get(row['status'], 0) + 1
    lines.extend([separator(), f'{counts.get(PASS, 0)} passed, {counts.get(FAIL, 0)} failed, '
                               f'{counts.get(ERRATUM, 0)} flagged'])
    payload = {'examples': results, 'summary': counts}
    return CommandResult(EXIT_FAILED if failed else EXIT_OK, payload, lines)
