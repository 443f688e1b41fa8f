"""
Throughput metrics from formulas, never from measured traffic.

Additions are reported in GB/sec over 3 * insts * bits / 8 bytes (two
operands read, one result written). Multiplications are reported in Gu32ops/sec
over 300 * insts * m * log2(m) unit operations, with m the operand size in
32-bit words; the polynomial workload counts four multiplications.
"""
import math
from collections import namedtuple

from midint.util import is_power_of_two


NS_PER_SEC = 10 ** 9
GIGA = 10 ** 9
U32_OPS_FACTOR = 300
POLY_MULTIPLIES = 4

ADD_OPS = ('add1', 'add6')
MUL_OPS = ('mul-classic', 'mul-ntt')
POLY_OPS = ('poly-classic', 'poly-ntt')
WORKLOAD_OPS = ADD_OPS + MUL_OPS + POLY_OPS

REPORT_FIELDS = ('op', 'bits', 'insts', 'runs', 'seed', 'wall_ns_mean',
                 'gb_per_sec', 'gu32ops_per_sec', 'correct')

MetricsReport = namedtuple('MetricsReport', REPORT_FIELDS)


def bytes_accessed(num_bits, num_insts):
    return 3 * num_insts * num_bits // 8


def u32_ops(num_bits, num_insts, poly=False):
    m = num_bits // 32
    if m < 1:
        raise ValueError('Need at least one 32-bit word, got {} bits'
                         .format(num_bits))
    # exact for power-of-two sizes
    lg_m = m.bit_length() - 1 if is_power_of_two(m) else math.log2(m)
    ops = U32_OPS_FACTOR * num_insts * m * lg_m
    return POLY_MULTIPLIES * ops if poly else ops


def compute_metrics(spec, wall_ns, correct=None):
    if wall_ns <= 0:
        raise ValueError('Wall time must be positive, got {}'.format(wall_ns))
    seconds = wall_ns / NS_PER_SEC

    gb_per_sec = gu32ops_per_sec = None
    if spec.op in ADD_OPS:
        gb_per_sec = bytes_accessed(spec.num_bits, spec.num_insts) / \
            seconds / GIGA
    else:
        ops = u32_ops(spec.num_bits, spec.num_insts,
                      poly=spec.op in POLY_OPS)
        gu32ops_per_sec = ops / seconds / GIGA

    return MetricsReport(
        op=spec.op,
        bits=spec.num_bits,
        insts=spec.num_insts,
        runs=spec.runs,
        seed=spec.seed,
        wall_ns_mean=wall_ns,
        gb_per_sec=gb_per_sec,
        gu32ops_per_sec=gu32ops_per_sec,
        correct=correct,
    )
