"""
Property checks run by `midint verify`, one report row per check.

Each check takes a seeded numpy generator and a case count and returns the
number of cases it ran and whether all of them held.
"""
import logging
from itertools import product

import numpy as np
from petl.util.base import Table

from midint.base import BigUint, DigitVector, BlockConfig, stack_instances, \
    split_instances
from midint.block import check_schedule_independence
from midint.classical import bmul_classical, tiled_mul_reference, \
    bmul_classical_kernel
from midint.ntt import bmul_ntt, bmul_ntt_words, ntt_forward, ntt_inverse, \
    field_vector, max_safe_digit_width, ntt_forward_kernel, bmul_ntt_kernel
from midint.oracle import oracle_add, oracle_mul, oracle_add_base, \
    oracle_mul_base
from midint.prime_field import PRIME_FIELD_32, PRIME_FIELD_64, verify_spec, \
    omega_table
from midint.scan_add import carry_op_eff, carry_op_sgm, carry_op_nice, \
    pack_flags, unpack_flags, badd, badd_batch, badd_base, badd_batch_kernel


logger = logging.getLogger(__name__)

SUITE_FIELDS = ('check', 'cases', 'passed')

_CHECKS = []


def check(fn):
    _CHECKS.append(fn)
    return fn


@check
def carry_operators_associative(rng, count):
    eff = all(carry_op_eff(carry_op_eff(x, y), z) ==
              carry_op_eff(x, carry_op_eff(y, z))
              for x, y, z in product(range(4), repeat=3))
    sgm = all(carry_op_sgm(carry_op_sgm(x, y), z) ==
              carry_op_sgm(x, carry_op_sgm(y, z))
              for x, y, z in product(range(8), repeat=3))
    return 64 + 512, eff and sgm


@check
def packed_operator_matches_pairs(rng, count):
    ok = True
    for x, y in product(range(4), repeat=2):
        nice = carry_op_nice(unpack_flags(x)[:2], unpack_flags(y)[:2])
        ok = ok and pack_flags(*nice) == carry_op_eff(x, y)
    return 16, ok


@check
def add_matches_oracle(rng, count):
    ok = True
    for width_bits, m in ((8, 4), (32, 64), (64, 16)):
        for _ in range(count):
            a = BigUint.random(m, width_bits, rng)
            b = BigUint.random(m, width_bits, rng)
            ok = ok and badd(a, b) == oracle_add(a, b)
        ones = BigUint.ones(m, width_bits)
        one = BigUint.from_int(1, m, width_bits)
        ok = ok and badd(ones, one) == BigUint.zero(m, width_bits)
    return 3 * (count + 1), ok


@check
def batched_add_matches_oracle(rng, count):
    cfg = BlockConfig(16, q=2, ipb=4)
    ok = True
    for _ in range(count):
        xs = [BigUint.random(16, 32, rng) for _ in range(4)]
        ys = [BigUint.random(16, 32, rng) for _ in range(4)]
        flat = badd_batch(stack_instances(xs), stack_instances(ys), cfg, 32)
        got = split_instances(flat, 16, 32)
        ok = ok and got == [oracle_add(x, y) for x, y in zip(xs, ys)]
    return count, ok


@check
def base_add_matches_oracle(rng, count):
    ok = True
    for _ in range(count):
        a = DigitVector(rng.integers(0, 1 << 15, size=32), 15)
        b = DigitVector(rng.integers(0, 1 << 15, size=32), 15)
        ok = ok and badd_base(a, b) == oracle_add_base(a, b)
    return count, ok


@check
def classical_mul_matches_oracle(rng, count):
    ok = True
    for width_bits, m, q in ((8, 16, 2), (32, 32, 4), (64, 16, 1)):
        for _ in range(count):
            a = BigUint.random(m, width_bits, rng)
            b = BigUint.random(m, width_bits, rng)
            expected = oracle_mul(a, b)
            ok = ok and bmul_classical(a, b, q) == expected
            ok = ok and tiled_mul_reference(a, b, 4) == expected
        ones = BigUint.ones(m, width_bits)
        ok = ok and bmul_classical(ones, ones, q) == oracle_mul(ones, ones)
    return 3 * (count + 1), ok


@check
def ntt_mul_matches_oracle(rng, count):
    ok = True
    for spec in (PRIME_FIELD_32, PRIME_FIELD_64):
        for _ in range(count):
            a = BigUint.random(8, 32, rng)
            b = BigUint.random(8, 32, rng)
            ok = ok and bmul_ntt_words(a, b, spec) == oracle_mul(a, b)
    return 2 * count, ok


@check
def ntt_roundtrip(rng, count):
    ok = True
    for spec in (PRIME_FIELD_32, PRIME_FIELD_64):
        tbl = omega_table(spec, 64)
        for _ in range(count):
            v = field_vector(rng.integers(0, 1 << 30, size=64), spec)
            ok = ok and ntt_inverse(ntt_forward(v, tbl), tbl) == v
    return 2 * count, ok


@check
def field_constants(rng, count):
    return 2, verify_spec(PRIME_FIELD_32) and verify_spec(PRIME_FIELD_64)


@check
def safe_digit_bound_is_sharp(rng, count):
    safe = max_safe_digit_width(PRIME_FIELD_32, 8)

    def worst(d):
        a = DigitVector([(1 << d) - 1] * 4, d)
        return bmul_ntt(a, a, PRIME_FIELD_32, check_bound=False) == \
            oracle_mul_base(a, a)

    return 2, worst(safe) and not worst(safe + 1)


@check
def kernels_schedule_independent(rng, count):
    spec = PRIME_FIELD_64
    cases = []
    for m in (16, 64):
        a = rng.integers(0, 1 << 16, size=2 * m).tolist()
        b = rng.integers(0, 1 << 16, size=2 * m).tolist()
        x = [int(v) for v in rng.integers(0, spec.p, size=m)]
        digits = rng.integers(0, 1 << 16, size=m // 2).tolist()
        pad = [0] * (m // 2)
        cases += [
            (badd_batch_kernel(BlockConfig(m, q=2, ipb=2), 16),
             {'A': a, 'B': b}),
            (bmul_classical_kernel(BlockConfig(m, q=2, ipb=2, kind='mul'), 16),
             {'A': a, 'B': b}),
            (ntt_forward_kernel(BlockConfig(m, q=2, kind='fft'), spec),
             {'X': x}),
            (bmul_ntt_kernel(BlockConfig(m, q=2, kind='fft'), spec, 16),
             {'A': digits + pad, 'B': digits[::-1] + pad}),
        ]
    passed = all(check_schedule_independence(kernel, inputs)
                 for kernel, inputs in cases)
    return len(cases), passed


class SuiteView(Table):
    def __init__(self, count, seed):
        self.count = count
        self.seed = seed

    def __iter__(self):
        yield SUITE_FIELDS
        for fn in _CHECKS:
            rng = np.random.default_rng(self.seed)
            cases, passed = fn(rng, self.count)
            logger.info('%s: %d cases, passed=%s', fn.__name__, cases, passed)
            yield fn.__name__, cases, bool(passed)


def run_suite(count=10, seed=0):
    """Lazy petl table of check results."""
    return SuiteView(count, seed)
