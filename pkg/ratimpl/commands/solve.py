"""
Solve Command - rationalizable strategies of game files
"""

from marshmallow import fields, validate

from ratimpl.commands.base import EXIT_FAILED, EXIT_OK, CommandResult, CommandSpecSchema, load_spec, status_line
from ratimpl.models.game import load_games
from ratimpl.services.rationalizability import check_implementation, check_lemma_properties, solve_rationalizable


class SolveSpecSchema(CommandSpecSchema):
    input = fields.Str(required=True)
    order = fields.Str(load_default='simultaneous', validate=validate.OneOf(['simultaneous', 'sequential']))
    seed = fields.Int(load_default=None)


def run(data: dict) -> CommandResult:
    spec = load_spec(SolveSpecSchema(), data)
    games = load_games(spec['input'])

    if None in games:
        game = games[None]
        survivors = solve_rationalizable(game, spec['order'], spec['seed'])
        sizes = ', '.join(f'{p}: {len(survivors[p])}' for p in game.players)
        payload = dict({'game': game.name}, **survivors._serialize())
        return CommandResult(EXIT_OK, payload, [status_line(True, f'{game!r} survivors {sizes}')])

    env = next(iter(games.values())).env
    lines = []
    if set(games) == set(env.states):
        report = check_implementation(env, games)
        lemmas = check_lemma_properties(env, games, report)
        payload = {
            'environment': env.name,
            'implementation': report._serialize(),
            'lemma_properties': lemmas._serialize(),
        }
        for state, holds in report.per_state.items():
            lines.append(status_line(holds, f'{state}: every surviving profile yields {env.f(state)}'))
        lines.append(status_line(lemmas.status != 'violated', f'survivor-set properties {lemmas.status}'))
        return CommandResult(EXIT_OK if report.holds else EXIT_FAILED, payload, lines)

    payload = {'environment': env.name, 'states': {}}
    for state, game in games.items():
        survivors = solve_rationalizable(game, spec['order'], spec['seed'])
        payload['states'][state] = survivors._serialize()
        sizes = ', '.join(f'{p}: {len(survivors[p])}' for p in game.players)
        lines.append(status_line(True, f'{state}: survivors {sizes}'))
    return CommandResult(EXIT_OK, payload, lines)
