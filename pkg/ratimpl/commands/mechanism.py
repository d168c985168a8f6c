"""
Mechanism Command - build a truncated canonical mechanism
"""

from marshmallow import fields, validate

from ratimpl.commands.base import EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, status_line
from ratimpl.errors import EnvironmentFormatError, PreconditionError
from ratimpl.models.environment import load_environment
from ratimpl.models.partition import Partition
from ratimpl.services.mechanism import VARIANTS, build_mechanism


class MechanismSpecSchema(CommandSpecSchema):
    input = fields.Str(required=True)
    variant = fields.Str(required=True, validate=validate.OneOf(VARIANTS))
    nmax = fields.Int(load_default=None, validate=validate.Range(min=1))
    partition = fields.List(fields.List(fields.Str()), load_default=None)


def run(data: dict) -> CommandResult:
    spec = load_spec(MechanismSpecSchema(), data)
    env = load_environment(spec['input'], spec['validation'])

    partition = None
    if spec['partition'] is not None:
        try:
            partition = Partition(spec['partition'], env.states)
        except ValueError as err:
            raise EnvironmentFormatError(f'Validation error: partition: {err}')

    try:
        mech = build_mechanism(env, spec['variant'], spec['nmax'], partition)
    except PreconditionError as err:
        payload = {'environment': env.name, 'variant': spec['variant'], 'error': str(err)}
        if err.report is not None:
            payload['report'] = err.report._serialize(env)
        return CommandResult(EXIT_FAILED, payload, [status_line(False, str(err))])

    lines = [
        status_line(True, f'{spec["variant"]} mechanism for {env.name or "environment"}'),
        f'   |Sigma| = {len(mech.sigma)}, n_max = {mech.n_max}, '
        f'{mech.message_space_size()} messages per agent',
    ]
    return CommandResult(EXIT_OK, mech._serialize(), lines)
