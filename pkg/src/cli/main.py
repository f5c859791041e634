import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from src.cli.commands import EXIT_REJECTED, run_command
from src.cli.config import ExperimentConfig
from src.core.errors import ConfigError
from src.data_processing.file_processor import ResultFileProcessor

OUTPUT_DIR_ENV = 'NONLOCAL_LAB_OUTPUT_DIR'
LOG_LEVEL_ENV = 'NONLOCAL_LAB_LOG_LEVEL'
VERIFY_TARGETS = ['composition', 'exact', 'bubble', 'estimates', 'holder', 'hls']


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', required=True, help='Experiment TOML file')
    common.add_argument('--out', default=None, help='Output directory')
    common.add_argument('--seed', type=int, default=None, help='Monte-Carlo seed')
    common.add_argument('--refine', type=int, default=None, help='Grid doublings')
    common.add_argument(
        '--log-level',
        default=None,
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level on stderr',
    )

    parser = argparse.ArgumentParser(
        prog='nonlocal-lab',
        description='Numerical lab for a nonlocal Neumann problem in the half space',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('exponents', parents=[common], help='Critical exponents and regime')
    verify = subparsers.add_parser('verify', parents=[common], help='Run a verification')
    verify.add_argument('target', choices=VERIFY_TARGETS)
    subparsers.add_parser('solve', parents=[common], help='Picard iteration for the trace')
    subparsers.add_parser('lambda-star', parents=[common], help='Bisect the coupling threshold')
    subparsers.add_parser('bootstrap', parents=[common], help='Bootstrap recurrence verdict')
    return parser


def resolve_output_dir(cli_value: Optional[str], config: ExperimentConfig) -> str:
    """--out wins over [output].dir, which wins over the environment."""
    return cli_value or config.output.dir or os.environ.get(OUTPUT_DIR_ENV) or 'results'


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    level = args.log_level or os.environ.get(LOG_LEVEL_ENV, 'WARNING')
    logging.basicConfig(
        stream=sys.stderr,
        level=level.upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    try:
        config = ExperimentConfig.from_toml(args.config).with_overrides(
            seed=args.seed, refine=args.refine
        )
    except ConfigError as e:
        print(json.dumps({'status': 'error', 'issues': e.issues}, indent=2))
        return EXIT_REJECTED

    ResultFileProcessor.initialize_output_directory(resolve_output_dir(args.out, config))
    return run_command(config, args.command, getattr(args, 'target', ''))


if __name__ == '__main__':
    sys.exit(main())
