import logging
import time
from collections import namedtuple
from functools import reduce

import numpy as np
import petl as etl
from petl.errors import ArgumentError
from petl.util.base import Table

import midint
from midint.base import WORD_DTYPES, DEFAULT_WIDTH, DEFAULT_Q, DEFAULT_IPB, \
    BlockConfig, pad_to_multiple, resize, split_instances, stack_instances
from midint.bench.metrics import WORKLOAD_OPS, MUL_OPS, REPORT_FIELDS, \
    compute_metrics
from midint.classical import max_classical_limbs, run_bmul_classical_block
from midint.ntt import DEFAULT_NTT_Q, check_digit_width, ntt_digit_preset, \
    run_bmul_ntt_words_block
from midint.oracle import oracle_add, oracle_mul, oracle_poly
from midint.prime_field import FIELD_SPECS
from midint.scan_add import bbadd, run_badd_batch_block
from midint.util import parse_workload_url


logger = logging.getLogger(__name__)

# full-size runs use 2**32 bits across all instances; keep desk runs small
DEFAULT_BIT_BUDGET = 1 << 22
DEFAULT_SEED = 7
DEFAULT_FIELD = 64
DEFAULT_SAMPLE_SIZE = 8
DEFAULT_RUNS = {
    'add1':         500,
    'add6':         500,
    'mul-classic':  500,
    'mul-ntt':      500,
    'poly-classic': 125,
    'poly-ntt':     125,
}
ENGINES = ('reference', 'block')
CHAINED_ADDS = 6

WORKLOAD_FIELDS = ('op', 'num_bits', 'num_insts', 'field', 'digit_bits', 'q',
                   'ipb', 'runs', 'seed', 'width_bits', 'engine')

WorkloadSpec = namedtuple('WorkloadSpec', WORKLOAD_FIELDS)


def _is_ntt(op):
    return op.endswith('-ntt')


def workload_spec(op, num_bits, num_insts, field=None, digit_bits=None, q=None,
                  ipb=DEFAULT_IPB, runs=None, seed=DEFAULT_SEED,
                  width_bits=DEFAULT_WIDTH, engine='reference',
                  budget=DEFAULT_BIT_BUDGET):
    """
    Validates workload parameters and fills in defaults. Anything that
    cannot run raises petl's ArgumentError before any work is done.
    """
    if op not in WORKLOAD_OPS:
        raise ArgumentError('Unknown workload `{}`; expected one of {}'
                            .format(op, ', '.join(WORKLOAD_OPS)))
    if engine not in ENGINES:
        raise ArgumentError('Unknown engine `{}`'.format(engine))
    if width_bits not in WORD_DTYPES:
        raise ArgumentError('Unsupported word width: {}'.format(width_bits))
    if num_insts is None or num_insts < 1:
        raise ArgumentError('Need at least one instance')
    if num_bits < 32 or num_bits % width_bits:
        raise ArgumentError('Bit size {} must be a multiple of {} and at '
                            'least 32'.format(num_bits, width_bits))
    if num_bits * num_insts > budget:
        raise ArgumentError('{} bits x {} instances exceeds the budget of {} '
                            'bits'.format(num_bits, num_insts, budget))

    runs = DEFAULT_RUNS[op] if runs is None else runs
    if runs < 1 or ipb < 1:
        raise ArgumentError('runs and ipb must be positive')

    if _is_ntt(op):
        q = DEFAULT_NTT_Q if q is None else q
        field = DEFAULT_FIELD if field is None else field
        if field not in FIELD_SPECS:
            raise ArgumentError('Unknown prime field: {}'.format(field))
        spec = FIELD_SPECS[field]
        try:
            if digit_bits is None:
                digit_bits = ntt_digit_preset(spec, num_bits, q)
            else:
                check_digit_width(spec, num_bits, digit_bits, q)
        except ValueError as e:
            raise ArgumentError(str(e))
    else:
        q = DEFAULT_Q if q is None else q
        field = digit_bits = None
        if op.endswith('-classic') and \
                num_bits // width_bits > max_classical_limbs(width_bits):
            raise ArgumentError('{} bits is too long for {}-bit words'
                                .format(num_bits, width_bits))

    return WorkloadSpec(op=op, num_bits=num_bits, num_insts=num_insts,
                        field=field, digit_bits=digit_bits, q=q, ipb=ipb,
                        runs=runs, seed=seed, width_bits=width_bits,
                        engine=engine)


def workload_from_url(url, **kwargs):
    """Builds a WorkloadSpec from a URL like add1://1024/64?runs=5."""
    comps = parse_workload_url(url)
    options = dict(comps['options'])
    options.update(kwargs)
    if 'digit_bits' not in options and 'd' in options:
        options['digit_bits'] = options.pop('d')
    try:
        return workload_spec(comps['op'], comps['num_bits'],
                             comps['num_insts'], **options)
    except TypeError:
        raise ArgumentError('Bad option in workload URL: {}'.format(url))


def generate_inputs(spec):
    """Seeded operands: two lists of num_insts big integers."""
    rng = np.random.default_rng(spec.seed)
    dtype = WORD_DTYPES[spec.width_bits]
    m = spec.num_bits // spec.width_bits

    def draw():
        limbs = rng.integers(0, np.iinfo(dtype).max, size=m * spec.num_insts,
                             dtype=dtype, endpoint=True)
        return split_instances(limbs, m, spec.width_bits)

    return draw(), draw()


################################################################################
# PROGRAMS
################################################################################

def _groups(xs, size):
    return [xs[i:i + size] for i in range(0, len(xs), size)]


def _adder(spec):
    if spec.engine == 'reference':
        return bbadd

    def add(xs, ys):
        m = len(xs[0])
        out = []
        for gx, gy in zip(_groups(xs, spec.ipb), _groups(ys, spec.ipb)):
            px = [pad_to_multiple(x, 2 * spec.q) for x in gx]
            py = [pad_to_multiple(y, 2 * spec.q) for y in gy]
            cfg = BlockConfig(len(px[0]), q=spec.q, ipb=len(px))
            flat = run_badd_batch_block(stack_instances(px),
                                        stack_instances(py), cfg,
                                        spec.width_bits)
            out.extend(resize(r, m) for r in
                       split_instances(flat, len(px[0]), spec.width_bits))
        return out
    return add


def _multiplier(spec):
    ntt = _is_ntt(spec.op)
    field = FIELD_SPECS[spec.field] if ntt else None

    if spec.engine == 'reference':
        def mul(xs, ys):
            if ntt:
                return [midint.bmul(x, y, algorithm='ntt', spec=field,
                                    digit_bits=spec.digit_bits, q=spec.q)
                        for x, y in zip(xs, ys)]
            m = len(xs[0])
            return [resize(midint.bmul(pad_to_multiple(x, 2 * spec.q),
                                       pad_to_multiple(y, 2 * spec.q),
                                       algorithm='classical', q=spec.q), m)
                    for x, y in zip(xs, ys)]
        return mul

    def mul(xs, ys):
        if ntt:
            return [run_bmul_ntt_words_block(x, y, field, spec.digit_bits,
                                             spec.q) for x, y in zip(xs, ys)]
        m = len(xs[0])
        out = []
        for gx, gy in zip(_groups(xs, spec.ipb), _groups(ys, spec.ipb)):
            px = [pad_to_multiple(x, 2 * spec.q) for x in gx]
            py = [pad_to_multiple(y, 2 * spec.q) for y in gy]
            out.extend(resize(r, m) for r in
                       run_bmul_classical_block(px, py, q=spec.q))
        return out
    return mul


def build_program(spec):
    """The batched computation timed for a workload: f(xs, ys) -> results."""
    add = _adder(spec)
    mul = _multiplier(spec)

    if spec.op == 'add1':
        return add
    if spec.op == 'add6':
        def add6(xs, ys):
            acc = xs
            for _ in range(CHAINED_ADDS):
                acc = add(acc, ys)
            return acc
        return add6
    if spec.op in MUL_OPS:
        return mul

    def poly(xs, ys):
        left = add(mul(xs, xs), ys)
        right = add(mul(ys, ys), ys)
        return add(mul(left, right), mul(xs, ys))
    return poly


def oracle_for(op):
    """Single-instance schoolbook evaluation of a workload."""
    if op == 'add1':
        return oracle_add
    if op == 'add6':
        return lambda x, y: reduce(oracle_add, [y] * CHAINED_ADDS, x)
    if op in MUL_OPS:
        return oracle_mul
    return oracle_poly


def verify_sample(spec, xs, ys, results, size=DEFAULT_SAMPLE_SIZE):
    """
    Checks a seeded sample of `size` instances against the oracle. A batch
    with fewer instances than that is checked in full.
    """
    rng = np.random.default_rng(spec.seed + 1)
    count = min(size, spec.num_insts)
    picks = rng.choice(spec.num_insts, size=count, replace=False)
    oracle = oracle_for(spec.op)
    for i in sorted(int(x) for x in picks):
        if oracle(xs[i], ys[i]) != results[i]:
            logger.error('%s: instance %d disagrees with the oracle', spec.op, i)
            return False
    return True


def run_workload(spec):
    logger.info('running %s: %d bits x %d insts, %d runs, engine %s, seed %d',
                spec.op, spec.num_bits, spec.num_insts, spec.runs, spec.engine,
                spec.seed)
    xs, ys = generate_inputs(spec)
    program = build_program(spec)

    timings = []
    results = None
    for _ in range(spec.runs):
        start = time.perf_counter_ns()
        results = program(xs, ys)
        timings.append(time.perf_counter_ns() - start)

    wall_ns = max(int(np.mean(timings)), 1)
    correct = verify_sample(spec, xs, ys, results)
    report = compute_metrics(spec, wall_ns, correct)
    logger.info('%s done: %d ns/run, correct=%s', spec.op, wall_ns, correct)
    return report


################################################################################
# PETL
################################################################################

def frombench(*workloads, **kwargs):
    """
    Lazy petl table of benchmark reports, one row per workload. Workloads may
    be WorkloadSpecs or workload URLs; keyword arguments apply to every URL.
    """
    specs = [w if isinstance(w, WorkloadSpec) else workload_from_url(w, **kwargs)
             for w in workloads]
    return BenchView(specs)

etl.frombench = frombench


class BenchView(Table):
    def __init__(self, specs):
        self.specs = specs

    def __iter__(self):
        yield REPORT_FIELDS
        for spec in self.specs:
            yield tuple(run_workload(spec))


def toreport(table, fmt='table', source=None):
    """Writes a report table as a text table, CSV or JSON."""
    if fmt == 'csv':
        etl.tocsv(table, source)
    elif fmt == 'json':
        etl.tojson(table, source)
    elif fmt == 'table':
        text = str(etl.lookall(table))
        if source is None:
            print(text)
        else:
            with open(source, 'w') as f:
                f.write(text + '\n')
    else:
        raise ValueError('Unknown report format: {}'.format(fmt))

etl.toreport = toreport


def _toreport(self, *args, **kwargs):
    """
    This wraps toreport and adds a `self` arg so it can be attached to
    the Table class. This enables functional-style chaining.
    """
    return toreport(self, *args, **kwargs)

Table.toreport = _toreport
