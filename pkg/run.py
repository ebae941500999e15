#!/usr/bin/env python3
"""
fockcomplex - Main entry point
Run with: python3 run.py <command> [options]
"""

import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

# Add the fockcomplex module to the path
sys.path.insert(0, str(Path(__file__).parent))

try:
    from fockcomplex import __version__
    from fockcomplex.config import Config, RunConfig, OUTPUT_FORMATS, VERIFY_SUITES
    from fockcomplex.core import EXIT_USAGE, Workbench, split_ops
    from fockcomplex.errors import ConfigError
    from fockcomplex.utils import setup_logging
except ImportError as e:
    print(f"Error importing fockcomplex: {e}", file=sys.stderr)
    print("Please install dependencies: pip3 install -r requirements.txt", file=sys.stderr)
    sys.exit(2)

logger = logging.getLogger("fockcomplex")


def add_global_flags(parser: argparse.ArgumentParser, default=None) -> None:
    """Flags accepted before or after the subcommand; subparsers pass SUPPRESS"""
    parser.add_argument('--config', default=default, help='Configuration file path (JSON)')
    parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default=default,
                        help='Report format (default from config: json)')
    parser.add_argument('--tolerance', type=float, default=default, help='Override the check tolerance')
    parser.add_argument('--seed', type=int, default=default, help='Seed for randomized suites')
    parser.add_argument('--out', dest='output_path', default=default,
                        help='Write the report here instead of stdout')
    parser.add_argument('--verbose', '-v', action='store_true',
                        default=False if default is None else default, help='Enable verbose logging')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='run.py',
        description='fockcomplex - spectra, identities and canonical solvers on the Fock space',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 run.py --format csv spectrum --n 2 --p 1 --mmax 2
  python3 run.py spectrum --n 2 --p 1 --mmax 3 --check
  python3 run.py verify basic-estimate --n 2 --p 1 --degree 4
  python3 run.py --seed 7 verify kohn-morrey --weight "1|z|^4" --n 1
  python3 run.py verify energy-identity --ops "d1^2" --n 1
  python3 run.py solve dbar --input alpha.json
  python3 run.py solve d --ops "d1^2" --input alpha.json
  python3 run.py solve dstar --ops "d1^2,d2^2" --input beta.json --window 6
  python3 run.py moments --weight "1|z1|^4 + 2|z2|^2" --kmax 6

Exit status: 0 all checks pass, 1 verification or solver failure, 2 usage or parse error.
        """
    )

    add_global_flags(parser)
    parser.add_argument('--version', action='version', version=f'fockcomplex {__version__}')

    sub = parser.add_subparsers(dest='command', metavar='command')
    shared = argparse.ArgumentParser(add_help=False)
    add_global_flags(shared, argparse.SUPPRESS)

    spectrum = sub.add_parser('spectrum', parents=[shared],
                              help='Eigenvalues and multiplicities of the complex Laplacian')
    spectrum.add_argument('--n', type=int, required=True, help='Dimension')
    spectrum.add_argument('--p', type=int, required=True, help='Form degree')
    spectrum.add_argument('--mmax', dest='m_max', type=int, default=None, help='Largest homogeneous degree')
    spectrum.add_argument('--truncation', type=int, default=None,
                          help='Degree cutoff of the assembled matrix (default: --mmax)')
    spectrum.add_argument('--check', '--verify', dest='check', action='store_true',
                          help='Cross-check against a numeric eigensolve')

    verify = sub.add_parser('verify', parents=[shared], help='Run a seeded invariant suite')
    verify.add_argument('suite', help=f"One of: {', '.join(VERIFY_SUITES)}")
    verify.add_argument('--n', type=int, default=None, help='Dimension')
    verify.add_argument('--p', type=int, default=None, help='Form degree (default 1)')
    verify.add_argument('--degree', type=int, default=None, help='Polynomial degree of random forms')
    verify.add_argument('--cases', type=int, default=None, help='Number of random cases')
    verify.add_argument('--weight', default=None, help='Weight, e.g. "1|z|^4" (kohn-morrey)')
    verify.add_argument('--ops', default=None, help='Comma-separated operators, e.g. "d1*d2, d1^2 + d2^2"')
    verify.add_argument('--window', type=int, default=None, help='Degree window of the estimate certificate')
    verify.add_argument('--method', choices=('closed', 'quadrature'), default=None,
                        help='Weighted moments from the Gamma closed form or from quadrature')

    solve = sub.add_parser('solve', parents=[shared],
                           help='Canonical solution of du = alpha, Du = alpha or D*v = beta')
    solve.add_argument('target', choices=('dbar', 'd', 'dstar'))
    solve.add_argument('--input', dest='input_path', required=True, help='Right-hand side form (JSON)')
    solve.add_argument('--ops', default=None, help='Comma-separated operators of D')
    solve.add_argument('--window', type=int, default=None, help='Galerkin degree window')
    solve.add_argument('--truncation', type=int, default=None, help='Alias of --window; for dbar, kernel check degree')
    solve.add_argument('--solution', dest='solution_path', default=None,
                       help='Where to write the solution form (default: <input>.solution.json)')

    moments = sub.add_parser('moments', parents=[shared],
                             help='Radial weight moments, closed form against quadrature')
    moments.add_argument('--weight', required=True, help='Weight, e.g. "1|z1|^4 + 2|z2|^2"')
    moments.add_argument('--n', type=int, default=None, help='Dimension (for the plain |z| form)')
    moments.add_argument('--kmax', dest='k_max', type=int, default=None, help='Largest moment index')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        config = Config(args.config)
    except ConfigError as e:
        logging.basicConfig(level=logging.ERROR, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        logger.error(str(e))
        return EXIT_USAGE

    setup_logging(config, args.verbose)
    if not config.validate():
        logger.error("Configuration validation failed")
        return EXIT_USAGE

    overrides = {key: value for key, value in vars(args).items()
                 if key not in ('command', 'config', 'verbose', 'ops')}
    if getattr(args, 'ops', None):
        overrides['ops'] = split_ops(args.ops)
    if args.command == 'solve' and args.truncation is not None and args.window is None:
        overrides['window'] = args.truncation

    run_config = RunConfig.from_config(args.command, config, **overrides)
    return Workbench(config).run(run_config)


if __name__ == "__main__":
    sys.exit(main())
