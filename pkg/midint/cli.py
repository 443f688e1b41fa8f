"""
Command line for the benchmark harness.

    midint bench --op mul-ntt --bits 4096 --insts 64 --runs 5
    midint bench add1://1024/64 mul-classic://1024/64?q=2 --format csv
    midint find-prime --bits 64 --min-n 50
    midint verify --count 20
"""
import argparse
import logging
import sys

import petl as etl
from petl.errors import ArgumentError

from midint.bench.metrics import WORKLOAD_OPS
from midint.bench.suite import run_suite
from midint.bench.workload import ENGINES, DEFAULT_BIT_BUDGET, DEFAULT_SEED, \
    workload_spec, frombench
from midint.prime_field import FIELD_SPEC_FIELDS, find_ntt_prime


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INCORRECT = 1
EXIT_INVALID = 2
FORMATS = ('table', 'csv', 'json')


def _add_format(parser):
    parser.add_argument('--format', choices=FORMATS, default='table',
                        help='report format (default: table)')
    parser.add_argument('--output', default=None,
                        help='write the report here instead of stdout')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='midint',
        description='Midsize big-integer kernels: benchmarks and checks.')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    bench = commands.add_parser('bench', help='time a workload')
    bench.add_argument('workloads', nargs='*', metavar='URL',
                       help='workload URLs, e.g. add1://1024/64?runs=5')
    bench.add_argument('--op', choices=WORKLOAD_OPS)
    bench.add_argument('--bits', type=int, help='integer size in bits')
    bench.add_argument('--insts', type=int, help='number of instances')
    bench.add_argument('--field', type=int, choices=(32, 64), default=None)
    bench.add_argument('--digit-bits', type=int, default=None)
    bench.add_argument('--q', type=int, default=None)
    bench.add_argument('--ipb', type=int, default=None)
    bench.add_argument('--runs', type=int, default=None)
    bench.add_argument('--seed', type=int, default=None)
    bench.add_argument('--engine', choices=ENGINES, default=None)
    bench.add_argument('--budget', type=int, default=DEFAULT_BIT_BUDGET,
                       help='max bits x instances')
    _add_format(bench)

    prime = commands.add_parser('find-prime',
                                help='search for an NTT-friendly prime')
    prime.add_argument('--bits', type=int, choices=(32, 64), default=32)
    prime.add_argument('--min-n', type=int, required=True)
    _add_format(prime)

    verify = commands.add_parser('verify', help='run the property checks')
    verify.add_argument('--count', type=int, default=10,
                        help='random cases per check')
    verify.add_argument('--seed', type=int, default=DEFAULT_SEED)
    _add_format(verify)

    return parser


def _bench_options(args):
    """Flags given on the command line, as workload keyword arguments."""
    options = {
        'field':        args.field,
        'digit_bits':   args.digit_bits,
        'q':            args.q,
        'ipb':          args.ipb,
        'runs':         args.runs,
        'seed':         args.seed,
        'engine':       args.engine,
    }
    options = {k: v for k, v in options.items() if v is not None}
    options['budget'] = args.budget
    return options


def _bench(args):
    options = _bench_options(args)
    if args.workloads:
        view = frombench(*args.workloads, **options)
    elif args.op and args.bits and args.insts:
        view = frombench(workload_spec(args.op, args.bits, args.insts,
                                       **options))
    else:
        raise ArgumentError('Give workload URLs or --op, --bits and --insts')

    # run each workload once: the report and the verdict share the rows
    table = view.cache()
    table.toreport(args.format, args.output)
    if not all(etl.values(table, 'correct')):
        return EXIT_INCORRECT
    return EXIT_OK


def _find_prime(args):
    try:
        spec = find_ntt_prime(args.min_n, args.bits)
    except LookupError as e:
        logger.error('%s', e)
        return EXIT_INCORRECT
    table = etl.wrap([FIELD_SPEC_FIELDS, tuple(spec)])
    table.toreport(args.format, args.output)
    return EXIT_OK


def _verify(args):
    table = run_suite(count=args.count, seed=args.seed).cache()
    table.toreport(args.format, args.output)
    if not all(etl.values(table, 'passed')):
        return EXIT_INCORRECT
    return EXIT_OK


_COMMANDS = {
    'bench':        _bench,
    'find-prime':   _find_prime,
    'verify':       _verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
        stream=sys.stderr)

    try:
        return _COMMANDS[args.command](args)
    except (ArgumentError, ValueError) as e:
        logger.error('%s', e)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
