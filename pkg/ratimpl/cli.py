"""
Command-line front end
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from ratimpl import init_toolkit
from ratimpl.commands import COMMANDS, EXIT_FAILED, EXIT_USAGE
from ratimpl.errors import CertificateFailure, EnvironmentFormatError, RatImplError
from ratimpl.services.axioms import AXIOM_CHECKS
from ratimpl.services.mechanism import VARIANTS

logger = logging.getLogger(__name__)


def _partition(text: str):
    try:
        blocks = json.loads(text)
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError('partition must be a JSON list of state lists')
    if not isinstance(blocks, list) or not all(isinstance(block, list) for block in blocks):
        raise argparse.ArgumentTypeError('partition must be a JSON list of state lists')
    return blocks


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', type=str, help='Write the JSON report to this path')
    common.add_argument('--format', type=str, choices=['json', 'text'], default='json', help='Output format')
    common.add_argument('--validation', type=str, choices=['strict', 'lenient'],
                        help='Environment validation level')

    parser = argparse.ArgumentParser(prog='ratimpl', description='Rationalizable implementation toolkit')
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', parents=[common], help='Evaluate axioms on an environment')
    check.add_argument('input', help='Environment file or bundled example name')
    check.add_argument('--axiom', type=str, default='all', help=f'One of {", ".join(AXIOM_CHECKS)} or all')

    partition = sub.add_parser('partition', parents=[common], help='Search partition witnesses')
    partition.add_argument('input', help='Environment file or bundled example name')
    partition.add_argument('--axiom', type=str, default='all', help='smm-star, smm-star-star, sem-star-star or all')
    partition.add_argument('--partition', type=_partition, help='Check this partition (JSON list of state lists)')

    mechanism = sub.add_parser('mechanism', parents=[common], help='Build a truncated canonical mechanism')
    mechanism.add_argument('input', help='Environment file or bundled example name')
    mechanism.add_argument('--variant', type=str, required=True, choices=VARIANTS, help='Mechanism variant')
    mechanism.add_argument('--nmax', type=int, help='Integer truncation bound')
    mechanism.add_argument('--partition', type=_partition, help='Partition for the theorem1 variant')

    certify = sub.add_parser('certify', parents=[common], help='Replay mechanism certificates')
    certify.add_argument('input', help='Mechanism file, environment file or bundled example name')
    certify.add_argument('--variant', type=str, choices=VARIANTS, help='Variant when building from an environment')
    certify.add_argument('--nmax', type=int, help='Integer truncation bound')

    solve = sub.add_parser('solve', parents=[common], help='Rationalizable strategies of a game file')
    solve.add_argument('input', help='Game file')
    solve.add_argument('--order', type=str, choices=['simultaneous', 'sequential'], default='simultaneous')
    solve.add_argument('--seed', type=int, help='Seed for the sequential order')

    examples = sub.add_parser('examples', parents=[common], help='Regression run over bundled examples')
    examples.add_argument('names', nargs='*', help='Example names')
    examples.add_argument('--all', action='store_true', help='Run every bundled example')

    return parser


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text + '\n', encoding='utf-8')


def main(argv: Optional[List[str]] = None) -> int:
    init_toolkit()
    args = build_parser().parse_args(argv)
    data = {key: value for key, value in vars(args).items() if key != 'command' and value is not None}

    try:
        result = COMMANDS[args.command](data)
    except CertificateFailure as err:
        print(f'❌ {err}', file=sys.stderr)
        return EXIT_FAILED
    except EnvironmentFormatError as err:
        print(f'❌ {err}', file=sys.stderr)
        if args.format == 'json':
            print(json.dumps(err.to_dict(), indent=2, ensure_ascii=False))
        return EXIT_USAGE
    except (RatImplError, ValueError) as err:
        print(f'❌ {err}', file=sys.stderr)
        return EXIT_USAGE

    document = json.dumps(result.payload, indent=2, ensure_ascii=False)
    _emit(document, args.out)
    if args.format == 'json':
        print(document)
    else:
        print('\n'.join(result.lines))
    return result.status
