"""
CLI Commands
"""

from . import certify, check, examples, mechanism, partition, solve
from .base import EXIT_FAILED, EXIT_OK, EXIT_USAGE, CommandResult

COMMANDS = {
    'check': check.run,
    'partition': partition.run,
    'mechanism': mechanism.run,
    'certify': certify.run,
    'solve': solve.run,
    'examples': examples.run,
}

__all__ = ['COMMANDS', 'CommandResult', 'EXIT_OK', 'EXIT_FAILED', 'EXIT_USAGE']
