"""
Addition of fixed-width big integers as map, exclusive scan, map.

Every limb pair produces a partial sum plus a packed carry flag (bit 0 set
when the limb sum wrapped, bit 1 set when it is the max word). An exclusive
scan with an associative carry operator turns the flags into the incoming
carry of every limb, and a final map adds it in. Bit 2 marks the first limb
of an instance when several instances share one scan.
"""
import numpy as np

from midint.base import BigUint, DigitVector, BlockConfig, check_operands, \
    split_instances, stack_instances, WORD_DTYPES, DEFAULT_WIDTH, DEFAULT_Q
from midint.block import Phase, PhasedKernel, run_phased_kernel


OVERFLOW = 1
IS_MAX = 2
SEGMENT_START = 4
NEUTRAL = IS_MAX


################################################################################
# CARRY OPERATORS
################################################################################

def pack_flags(ov, mx, seg=False):
    return (OVERFLOW if ov else 0) | (IS_MAX if mx else 0) | \
        (SEGMENT_START if seg else 0)


def unpack_flags(c):
    return bool(c & OVERFLOW), bool(c & IS_MAX), bool(c & SEGMENT_START)


def carry_op_nice(c1, c2):
    """The carry operator on (overflow, is_max) boolean pairs."""
    ov1, mx1 = c1
    ov2, mx2 = c2
    return (ov1 and mx2) or ov2, mx1 and mx2


def carry_op_eff(c1, c2):
    # also works elementwise on numpy integer arrays
    return (c1 & c2 & 2) | (((c1 & (c2 >> 1)) | c2) & 1)


def carry_op_sgm(c1, c2):
    if c2 & SEGMENT_START:
        return c2
    return carry_op_eff(c1, c2) | ((c1 | c2) & SEGMENT_START)


def _carry_op_sgm_vec(c1, c2):
    return np.where(c2 & SEGMENT_START, c2,
                    carry_op_eff(c1, c2) | ((c1 | c2) & SEGMENT_START))


def exclusive_scan(op, neutral, xs):
    """[neutral, x0, op(x0, x1), ...] without the total."""
    out = []
    acc = neutral
    for x in xs:
        out.append(acc)
        acc = op(acc, x)
    return out


def scan_carry_flags(flags, segmented=False):
    """
    Exclusive scan of packed carry flags over a numpy array, by recursive
    doubling: log2(n) elementwise steps instead of n sequential ones.
    """
    op = _carry_op_sgm_vec if segmented else carry_op_eff
    incl = np.array(flags, dtype=np.uint8)
    step = 1
    while step < len(incl):
        incl[step:] = op(incl[:-step], incl[step:])
        step <<= 1

    out = np.empty_like(incl)
    out[:1] = NEUTRAL
    out[1:] = incl[:-1]
    return out


################################################################################
# REFERENCE ADDERS
################################################################################

def _highest(dtype):
    return dtype.type(np.iinfo(dtype).max)


def _partial_sums(a, b, highest):
    # unsigned numpy arrays wrap silently, like machine words
    p = a + b
    flags = (p < a).astype(np.uint8) | ((p == highest).astype(np.uint8) << 1)
    return p, flags


def badd(a, b):
    """a + b mod 2**(w*M) via map, sequential carry scan, map."""
    check_operands(a, b)
    p, flags = _partial_sums(a.limbs, b.limbs, _highest(a.dtype))
    carries = exclusive_scan(carry_op_eff, NEUTRAL, flags.tolist())
    carry_in = (np.array(carries, dtype=np.uint8) & 1).astype(a.dtype)
    return BigUint(p + carry_in, a.width_bits)


def _segmented_add(a, b, m, vectorized):
    p, flags = _partial_sums(a, b, _highest(a.dtype))
    heads = np.arange(len(a)) % m == 0
    flags |= heads.astype(np.uint8) << 2

    if vectorized:
        carries = scan_carry_flags(flags, segmented=True)
    else:
        carries = np.array(exclusive_scan(carry_op_sgm, NEUTRAL,
                                          flags.tolist()), dtype=np.uint8)
    # a segment head belongs to a new instance: no incoming carry
    carry_in = np.where(heads, 0, carries & 1).astype(a.dtype)
    return p + carry_in


def badd_batch(as_, bs, cfg, width_bits=DEFAULT_WIDTH, vectorized=False):
    """
    Adds cfg.ipb instances of cfg.m limbs laid out back to back in two flat
    limb arrays, with a single segmented scan.
    """
    dtype = WORD_DTYPES[width_bits]
    a = np.asarray(as_, dtype=dtype)
    b = np.asarray(bs, dtype=dtype)
    if len(a) != cfg.size or len(b) != cfg.size:
        raise ValueError('Expected {} limbs per operand, got {} and {}'
                         .format(cfg.size, len(a), len(b)))
    return _segmented_add(a, b, cfg.m, vectorized)


def bbadd(as_, bs):
    """
    Pairwise sums of two equally long lists of big integers, computed as one
    grid of instances sharing a vectorized segmented scan.
    """
    if len(as_) != len(bs):
        raise ValueError('Batches differ in length: {} vs {}'
                         .format(len(as_), len(bs)))
    if not as_:
        return []
    check_operands(*(list(as_) + list(bs)))
    m, width_bits = len(as_[0]), as_[0].width_bits
    out = _segmented_add(stack_instances(as_), stack_instances(bs), m,
                         vectorized=True)
    return split_instances(out, m, width_bits)


def _check_base_operands(a, b):
    if len(a) != len(b) or a.digit_bits != b.digit_bits:
        raise ValueError('Digit vectors differ in shape')
    for v in (a, b):
        if v.container_bits != v.digit_bits + 1:
            raise ValueError('Base-2**d addition needs d = container bits - 1 '
                             '(d={}, container={})'
                             .format(v.digit_bits, v.container_bits))


def badd_base(a, b):
    """
    Digit-wise addition in base 2**d on d+1 bit cells. Digits are doubled so
    the machine-base adder's wrap and max tests see base 2**d carries, then
    halved with the carry reinjected into the odd bit.
    """
    _check_base_operands(a, b)
    one = np.uint64(1)
    mask = np.uint64((1 << a.container_bits) - 1)
    x = a.digits << one
    y = b.digits << one
    p = (x + y) & mask
    flags = (p < x).astype(np.uint8) | ((p == mask - one).astype(np.uint8) << 1)

    carries = exclusive_scan(carry_op_eff, NEUTRAL, flags.tolist())
    r = p + (np.array(carries, dtype=np.uint8) & 1).astype(np.uint64)
    digits = ((r >> one) + (r & one)) & (mask >> one)
    return DigitVector(digits, a.digit_bits, a.container_bits)


################################################################################
# BLOCK KERNELS
################################################################################

def _sweep(op, src, dst, step):
    def body(tid, shared, private):
        v = shared[src][tid]
        if tid >= step:
            v = op(shared[src][tid - step], v)
        return [(dst, tid, v)], private
    return body


def scan_add_phases(threads, per_thread, seg_len, container_bits, a='A',
                    b='B', out='R', tag='', segmented=True, halve=False):
    """
    Phases adding buffers `a` and `b` into `out` with `threads` threads that
    own `per_thread` consecutive cells each.

    Phase 0 maps limbs to partial sums and flags and reduces each thread's
    flags to one aggregate. The thread aggregates are then scanned by
    recursive doubling, ping-ponging between two buffers. The last phase
    rescans each chunk sequentially from its thread's prefix and adds the
    carries in. With `halve` the cells hold base-2**(container_bits-1)
    digits added by the doubling trick of badd_base.

    Returns (phases, scratch sizes).
    """
    mask = (1 << container_bits) - 1
    highest = mask - 1 if halve else mask
    op = carry_op_sgm if segmented else carry_op_eff
    sums, flags = tag + 'P', tag + 'F'
    aggs = [tag + 'S0', tag + 'S1']

    def chunk(tid):
        return range(tid * per_thread, (tid + 1) * per_thread)

    def load(tid, shared, private):
        writes = []
        agg = NEUTRAL
        for i in chunk(tid):
            x, y = shared[a][i], shared[b][i]
            if halve:
                x, y = x << 1, y << 1
            p = (x + y) & mask
            f = pack_flags(p < x, p == highest, segmented and i % seg_len == 0)
            writes.append((sums, i, p))
            writes.append((flags, i, f))
            agg = op(agg, f)
        writes.append((aggs[0], tid, agg))
        return writes, private

    phases = [Phase(tag + 'load', load)]
    src, step = 0, 1
    while step < threads:
        phases.append(Phase('{}scan{}'.format(tag, step),
                            _sweep(op, aggs[src], aggs[1 - src], step)))
        src, step = 1 - src, step << 1
    prefixes = aggs[src]

    def finish(tid, shared, private):
        writes = []
        prefix = NEUTRAL if tid == 0 else shared[prefixes][tid - 1]
        for i in chunk(tid):
            carry = prefix & 1
            if segmented and i % seg_len == 0:
                carry = 0
            r = (shared[sums][i] + carry) & mask
            if halve:
                r = ((r >> 1) + (r & 1)) & (mask >> 1)
            writes.append((out, i, r))
            prefix = op(prefix, shared[flags][i])
        return writes, private

    phases.append(Phase(tag + 'finish', finish))

    n = threads * per_thread
    scratch = {sums: n, flags: n, aggs[0]: threads, aggs[1]: threads, out: n}
    return phases, scratch


def badd_batch_kernel(cfg, width_bits=DEFAULT_WIDTH):
    """Block kernel adding cfg.ipb instances from buffers A, B into R."""
    phases, scratch = scan_add_phases(cfg.thread_count, cfg.per_thread, cfg.m,
                                      width_bits)
    return PhasedKernel(cfg, phases, scratch, outputs=['R'], name='badd_batch')


def badd_kernel(m, q=DEFAULT_Q, width_bits=DEFAULT_WIDTH):
    cfg = BlockConfig(m, q=q)
    phases, scratch = scan_add_phases(cfg.thread_count, cfg.per_thread, m,
                                      width_bits, segmented=False)
    return PhasedKernel(cfg, phases, scratch, outputs=['R'], name='badd')


def badd_base_kernel(m, q=DEFAULT_Q, digit_bits=15):
    cfg = BlockConfig(m, q=q)
    phases, scratch = scan_add_phases(cfg.thread_count, cfg.per_thread, m,
                                      digit_bits + 1, segmented=False,
                                      halve=True)
    return PhasedKernel(cfg, phases, scratch, outputs=['R'], name='badd_base')


def run_badd_block(a, b, q=DEFAULT_Q, **kwargs):
    check_operands(a, b)
    kernel = badd_kernel(len(a), q, a.width_bits)
    out = run_phased_kernel(kernel, {'A': a.limbs.tolist(),
                                     'B': b.limbs.tolist()}, **kwargs)
    return BigUint(out['R'], a.width_bits)


def run_badd_batch_block(as_, bs, cfg, width_bits=DEFAULT_WIDTH, **kwargs):
    kernel = badd_batch_kernel(cfg, width_bits)
    out = run_phased_kernel(kernel, {'A': [int(x) for x in as_],
                                     'B': [int(x) for x in bs]}, **kwargs)
    return np.array(out['R'], dtype=WORD_DTYPES[width_bits])


def run_badd_base_block(a, b, q=DEFAULT_Q, **kwargs):
    _check_base_operands(a, b)
    kernel = badd_base_kernel(len(a), q, a.digit_bits)
    out = run_phased_kernel(kernel, {'A': a.digits.tolist(),
                                     'B': b.digits.tolist()}, **kwargs)
    return DigitVector(out['R'], a.digit_bits, a.container_bits)
