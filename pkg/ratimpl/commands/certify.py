"""
Certify Command - replay the elimination certificates of a mechanism
"""

import json
from pathlib import Path

from marshmallow import fields, validate

from ratimpl.commands.base import EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, status_line
from ratimpl.errors import EnvironmentFormatError, PreconditionError
from ratimpl.models.environment import load_environment
from ratimpl.services.mechanism import VARIANTS, build_mechanism, load_mechanism, verify_certificates


class CertifySpecSchema(CommandSpecSchema):
    input = fields.Str(required=True)
    variant = fields.Str(load_default=None, validate=validate.OneOf(VARIANTS))
    nmax = fields.Int(load_default=None, validate=validate.Range(min=1))


def _mechanism_file(path: Path):
    """Parsed JSON object if `path` holds a mechanism file"""
    if not path.is_file():
        return None
    try:
        payload = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError:
        return None
    if isinstance(payload, dict) and 'variant' in payload and 'sigma' in payload:
        return payload
    return None


def run(data: dict) -> CommandResult:
    spec = load_spec(CertifySpecSchema(), data)
    path = Path(spec['input'])

    try:
        if _mechanism_file(path) is not None:
            mech = load_mechanism(path.read_text(encoding='utf-8'))
        else:
            if spec['variant'] is None:
                raise EnvironmentFormatError('Validation error: variant: required when certifying an environment',
                                             {'variant': ['required when certifying an environment']})
            env = load_environment(spec['input'], spec['validation'])
            mech = build_mechanism(env, spec['variant'], spec['nmax'])
    except PreconditionError as err:
        return CommandResult(EXIT_FAILED, {'input': spec['input'], 'error': str(err)},
                             [status_line(False, str(err))])

    report = verify_certificates(mech.env, mech)
    payload = dict({'environment': mech.env.name}, **report._serialize())
    lines = [
        status_line(report.step_passed(step.name), f'{step.name}: {step.description} ({len(step.checks)} checks)')
        for step in report.steps
    ]
    for check in report.failures()[:10]:
        lines.append(f'   {check.label} {check.instance}: {check.lhs} {check.relation} {check.rhs} fails')
    return CommandResult(EXIT_OK if report.passed else EXIT_FAILED, payload, lines)
