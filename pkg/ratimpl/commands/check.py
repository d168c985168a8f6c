"""
Check Command - evaluate axioms on an environment
"""

from marshmallow import fields, validate

from ratimpl.commands.base import (
    EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, separator, status_line
)
from ratimpl.models.environment import load_environment
from ratimpl.services.axioms import AXIOM_CHECKS, AxiomChecker
from ratimpl.services.characterization import characterize


class CheckSpecSchema(CommandSpecSchema):
    input = fields.Str(required=True)
    axiom = fields.Str(load_default='all', validate=validate.OneOf(list(AXIOM_CHECKS) + ['all']))


def run(data: dict) -> CommandResult:
    spec = load_spec(CheckSpecSchema(), data)
    env = load_environment(spec['input'], spec['validation'])
    checker = AxiomChecker(env)

    axioms = list(AXIOM_CHECKS) if spec['axiom'] == 'all' else [spec['axiom']]
    reports = [checker.run(axiom) for axiom in axioms]

    payload = {
        'environment': env.name,
        'reports': [report._serialize(env) for report in reports],
    }
    lines = [separator(), f'{env!r}', separator()]
    lines.extend(status_line(report.holds, report.summary()) for report in reports)

    if spec['axiom'] == 'all':
        summary = characterize(env, checker)
        payload['characterization'] = summary._serialize(env)
        lines.append(separator())
        lines.append(status_line(summary.implementable, 'rationalizably implementable'
                                 if summary.implementable else 'not rationalizably implementable'))
        if not summary.agree:
            lines.append(status_line(False, f'criteria disagree: {summary.verdicts}'))

    holds = all(report.holds for report in reports)
    return CommandResult(EXIT_OK if holds else EXIT_FAILED, payload, lines)
