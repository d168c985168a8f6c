"""
Command plumbing - spec loading, results and status lines
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from marshmallow import Schema, fields, validate, ValidationError

from ratimpl.errors import EnvironmentFormatError
from ratimpl.models.environment import VALIDATION_LEVELS, _flatten_messages

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FORMATS = ('json', 'text')


class CommandSpecSchema(Schema):
    """Fields shared by every subcommand"""

    out = fields.Str(load_default=None)
    format = fields.Str(load_default='json', validate=validate.OneOf(FORMATS))
    validation = fields.Str(load_default=None, validate=validate.OneOf(VALIDATION_LEVELS))


@dataclass
class CommandResult:
    status: int
    payload: Dict[str, Any]
    lines: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == EXIT_OK


def load_spec(schema: Schema, data: dict) -> dict:
    """Validate raw arguments against a command schema"""
    try:
        return schema.load(data)
    except ValidationError as err:
        details = '; '.join(_flatten_messages(err.messages))
        raise EnvironmentFormatError(f'Validation error: {details}', err.messages)


def status_line(ok: bool, text: str) -> str:
    return f'{"✅" if ok else "❌"} {text}'


def separator() -> str:
    return '=' * 50
