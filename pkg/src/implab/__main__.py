"""Implab main module.

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""

import argparse
import sys


def _parser():
    parser = argparse.ArgumentParser(prog="implab", description='Analysis of impulsive dynamical systems.')
    parser.add_argument('command', type=str, choices=['run', 'examples'])
    parser.add_argument('items', type=str, nargs='*')
    parser.add_argument('--config', type=str, default=None, help="application configuration file")
    parser.add_argument('--threads', type=int, default=None, help="maximum number of worker threads")
    parser.add_argument('--emit-plot-data', action='store_const', const=True, default=None,
                        help="write ready-to-plot columns")
    parser.add_argument('--output', type=str, default=None, help="output directory or file")
    return parser


def main(argv=None):
    """Run the command line application.

    :param argv: command line arguments (default: sys.argv[1:])
    :type argv: list
    :returns: exit code (0 success, 1 configuration error, 2 analysis failure)
    :rtype: int
    """
    parser = _parser()
    args = parser.parse_args(argv)

    # Run scenario.
    if args.command == 'run':
        if len(args.items) != 1:
            parser.error("the command 'run' requires exactly one scenario file")
        from .run import run_scenario
        return run_scenario(args.items[0], config_path=args.config, threads=args.threads,
                            emit_plot_data=args.emit_plot_data, output=args.output)
    # List or emit examples.
    elif args.command == 'examples':
        from .catalog import run_catalog
        return run_catalog(args.items, output=args.output)
    parser.print_help()
    return 1


if __name__ == "__main__":
    sys.exit(main())
