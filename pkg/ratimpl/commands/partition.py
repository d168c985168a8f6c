"""
Partition Command - search for a partition witnessing a partition-based axiom
"""

from marshmallow import fields, validate

from ratimpl.commands.base import EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, status_line
from ratimpl.errors import EnvironmentFormatError
from ratimpl.models.environment import load_environment
from ratimpl.models.partition import Partition
from ratimpl.models.reports import PARTITION_AXIOMS
from ratimpl.services.axioms import AxiomChecker


class PartitionSpecSchema(CommandSpecSchema):
    input = fields.Str(required=True)
    axiom = fields.Str(load_default='all', validate=validate.OneOf(list(PARTITION_AXIOMS) + ['all']))
    partition = fields.List(fields.List(fields.Str()), load_default=None)


def run(data: dict) -> CommandResult:
    spec = load_spec(PartitionSpecSchema(), data)
    env = load_environment(spec['input'], spec['validation'])
    checker = AxiomChecker(env)

    if spec['partition'] is not None:
        try:
            partition = Partition(spec['partition'], env.states)
        except ValueError as err:
            raise EnvironmentFormatError(f'Validation error: partition: {err}')
        reports = [checker.check_smm_star_star_for_partition(partition)]
    else:
        axioms = list(PARTITION_AXIOMS) if spec['axiom'] == 'all' else [spec['axiom']]
        reports = [checker.run(axiom) for axiom in axioms]

    payload = {
        'environment': env.name,
        'scf_partition': env.scf_partition()._serialize(),
        'reports': [report._serialize(env) for report in reports],
    }
    lines = [status_line(report.holds, report.summary()) for report in reports]
    holds = all(report.holds for report in reports)
    return CommandResult(EXIT_OK if holds else EXIT_FAILED, payload, lines)
