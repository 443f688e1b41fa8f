"""
Quadratic (schoolbook) multiplication mod 2**(w*M), load balanced.

Result limb k is C_k = sum of A_i * B_j over i + j = k; limbs at k >= M are
never computed. Thread t of an instance owns two chunks of q limbs, one from
the front and its mirror image from the back, so every thread does about the
same number of multiply-adds. Each chunk is convolved into q double-width
accumulators, folded into q low words plus a high word and a carry word, and
published into two limb arrays L and H whose sum is the product.

A chunk's carry stays below M, so it needs a second word once M > 2**w (only
reachable with 8-bit words). That word goes to a spill array X, added last.
"""
from collections import namedtuple

from midint.base import BigUint, BlockConfig, check_operands, DEFAULT_Q, \
    DEFAULT_WIDTH
from midint.block import Phase, PhasedKernel, run_phased_kernel
from midint.scan_add import badd, scan_add_phases


CARRY_BITS = 32
CARRY_MASK = (1 << CARRY_BITS) - 1
DEFAULT_TILE = 4


ConvPartial = namedtuple('ConvPartial', ['lows', 'high', 'carry'])


class AccumPair(object):
    """A 2w-bit accumulator plus a 32-bit count of its wrap-arounds."""

    def __init__(self, width_bits, accum=0, carry=0):
        self.width_bits = width_bits
        self.accum = accum
        self.carry = carry
        self._mask = (1 << (2 * width_bits)) - 1

    def __repr__(self):
        return 'AccumPair(accum={:#x}, carry={})'.format(self.accum,
                                                         self.carry)

    @property
    def value(self):
        return self.accum + (self.carry << (2 * self.width_bits))

    def add(self, term):
        """Adds one w x w-bit product."""
        # a product is below 2**(2w) - 2**w, so a wrap always lowers the high half
        prev_high = self.accum >> self.width_bits
        self.accum = (self.accum + term) & self._mask
        if (self.accum >> self.width_bits) < prev_high:
            self.carry = (self.carry + 1) & CARRY_MASK
        return self

    def merge(self, other):
        prev = self.accum
        self.accum = (self.accum + other.accum) & self._mask
        self.carry = (self.carry + other.carry + (self.accum < prev)) & \
            CARRY_MASK
        return self


################################################################################
# PARTITIONING
################################################################################

def thread_partition(ltid, m, q):
    """Front and back limb ranges owned by local thread `ltid`."""
    if m % (2 * q):
        raise ValueError('2q must divide m (m={}, q={})'.format(m, q))
    if not 0 <= ltid < m // (2 * q):
        raise ValueError('Thread {} out of range for m={}, q={}'
                         .format(ltid, m, q))
    front = range(q * ltid, q * ltid + q)
    back = range(m - q * (ltid + 1), m - q * ltid)
    return front, back


def conv_partial_at(k1, A, B, q, width_bits=DEFAULT_WIDTH):
    """
    Convolution of result limbs k1 .. k1+q-1, folded into a ConvPartial.

    A and B only need integer indexing, so windows into shared buffers work.
    """
    accums = [AccumPair(width_bits) for _ in range(q)]

    # pairs with i <= k1, shared by every position of the chunk
    for i in range(k1 + 1):
        a, j = A[i], k1 - i
        for qq in range(q):
            accums[qq].add(a * B[j + qq])

    # the triangle of pairs with k1 < i <= k1 + qq
    for qq in range(1, q):
        a = A[k1 + qq]
        for i in range(q - qq):
            accums[i + qq].add(a * B[i])

    return combine(accums, width_bits)


def combine(accums, width_bits=DEFAULT_WIDTH):
    mask = (1 << width_bits) - 1
    lows = []
    pending = 0
    for acc in accums:
        pending += acc.value
        lows.append(pending & mask)
        pending >>= width_bits
    high, carry = pending & mask, pending >> width_bits
    if carry >> (2 * width_bits):
        raise ValueError('Convolution carry does not fit two {}-bit words'
                         .format(width_bits))
    return ConvPartial(lows, high, carry)


################################################################################
# PUBLISHING
################################################################################

def max_classical_limbs(width_bits):
    """Longest operand whose chunk carries fit two words."""
    return 1 << (2 * width_bits)


def _carry_words(m, width_bits):
    """Words a chunk's carry needs; the carry stays below m."""
    if m > max_classical_limbs(width_bits):
        raise ValueError('{} limbs is too long for {}-bit words'
                         .format(m, width_bits))
    return 1 if m <= 1 << width_bits else 2


def _publish_writes(parts, ltid, m, q, width_bits, offset=0):
    """(buffer, index, value) writes placing one thread's partials."""
    # with q == 1 the carry slot of a chunk is the high slot of the next one
    carry_buf = 'K' if q == 1 else 'H'
    spill = _carry_words(m, width_bits) > 1
    writes = []
    for limbs, part in zip(thread_partition(ltid, m, q), parts):
        s = limbs.start
        writes.extend(('L', offset + s + i, low)
                      for i, low in enumerate(part.lows))
        if s + q < m:
            writes.append(('H', offset + s + q, part.high))
        if s + q + 1 < m:
            carry_low, carry_high = _split_word(part.carry, width_bits)
            if carry_high and not spill:
                raise ValueError('Carry {} does not fit a {}-bit word'
                                 .format(part.carry, width_bits))
            writes.append((carry_buf, offset + s + q + 1, carry_low))
            if spill and s + q + 2 < m:
                writes.append(('X', offset + s + q + 2, carry_high))
    return writes


def _split_word(value, width_bits):
    return value & ((1 << width_bits) - 1), value >> width_bits


def _addends(m, q, width_bits):
    """Arrays added onto L, in order."""
    names = ['H']
    if q == 1:
        names.append('K')
    if _carry_words(m, width_bits) > 1:
        names.append('X')
    return names


def publish_and_resolve(partials, cfg, width_bits=DEFAULT_WIDTH):
    """
    Lays per-thread (front, back) partials out as L and H (plus K when q == 1
    and the spill array X for long 8-bit operands) and adds them. Slots that
    would land at or past limb m are dropped.
    """
    if len(partials) != cfg.threads_per_instance:
        raise ValueError('Expected partials from {} threads, got {}'
                         .format(cfg.threads_per_instance, len(partials)))
    m, q = cfg.m, cfg.q
    addends = _addends(m, q, width_bits)
    arrays = {name: [0] * m for name in ['L'] + addends}
    for ltid, parts in enumerate(partials):
        for name, idx, value in _publish_writes(parts, ltid, m, q, width_bits):
            arrays[name][idx] = value

    result = BigUint(arrays['L'], width_bits)
    for name in addends:
        result = badd(result, BigUint(arrays[name], width_bits))
    return result


def bmul_classical(a, b, q=DEFAULT_Q):
    """a * b mod 2**(w*M); 2q must divide M."""
    check_operands(a, b)
    m, width_bits = len(a), a.width_bits
    _carry_words(m, width_bits)
    cfg = BlockConfig(m, q=q, kind='mul')

    A, B = a.limbs.tolist(), b.limbs.tolist()
    partials = []
    for ltid in range(cfg.threads_per_instance):
        partials.append(tuple(conv_partial_at(limbs.start, A, B, q, width_bits)
                              for limbs in thread_partition(ltid, m, q)))
    return publish_and_resolve(partials, cfg, width_bits)


def tiled_mul_reference(a, b, tile=DEFAULT_TILE):
    """
    Cross-check multiply: tile x tile blocks of partial products accumulate
    into a shared scratch row, which is then added into the per-limb
    accumulators. Carries are resolved from those accumulators at the end.
    """
    check_operands(a, b)
    m, width_bits = len(a), a.width_bits
    if m % tile:
        raise ValueError('Tile size {} does not divide {}'.format(tile, m))
    _carry_words(m, width_bits)

    A, B = a.limbs.tolist(), b.limbs.tolist()
    C = [AccumPair(width_bits) for _ in range(m)]
    for ii in range(0, m, tile):
        for jj in range(0, m - ii, tile):
            shared = [AccumPair(width_bits) for _ in range(2 * tile)]
            for i in range(tile):
                for j in range(tile):
                    if ii + jj + i + j < m:
                        shared[i + j].add(A[ii + i] * B[jj + j])
            for t, acc in enumerate(shared):
                if ii + jj + t < m:
                    C[ii + jj + t].merge(acc)

    low, high, carry, spill = [0] * m, [0] * m, [0] * m, [0] * m
    for k, acc in enumerate(C):
        low[k], high_k = _split_word(acc.accum, width_bits)
        if k + 1 < m:
            high[k + 1] = high_k
        if k + 2 < m:
            carry[k + 2], spill_k = _split_word(acc.carry, width_bits)
            if k + 3 < m:
                spill[k + 3] = spill_k
    result = BigUint(low, width_bits)
    for addend in (high, carry, spill):
        result = badd(result, BigUint(addend, width_bits))
    return result


################################################################################
# BLOCK KERNEL
################################################################################

class _Window(object):
    def __init__(self, reader, offset):
        self._reader = reader
        self._offset = offset

    def __getitem__(self, i):
        return self._reader[self._offset + i]


def bmul_classical_kernel(cfg, width_bits=DEFAULT_WIDTH):
    """
    Multiplies cfg.ipb instances from buffers A and B into R. Phases:
    convolve into registers, publish L/H (and K, X when needed), then one
    batched scan add per published array, chained into R.
    """
    if cfg.kind != 'mul':
        raise ValueError('Need a mul block, got {}'.format(cfg.kind))
    m, q, per_instance = cfg.m, cfg.q, cfg.threads_per_instance
    threads, n = cfg.thread_count, cfg.size
    addends = _addends(m, q, width_bits)

    def locate(tid):
        return tid % per_instance, (tid // per_instance) * m

    def convolve(tid, shared, private):
        ltid, offset = locate(tid)
        A = _Window(shared['A'], offset)
        B = _Window(shared['B'], offset)
        parts = tuple(conv_partial_at(limbs.start, A, B, q, width_bits)
                      for limbs in thread_partition(ltid, m, q))
        return [], parts

    def publish(tid, shared, parts):
        ltid, offset = locate(tid)
        return _publish_writes(parts, ltid, m, q, width_bits, offset), parts

    phases = [Phase('convolve', convolve), Phase('publish', publish)]
    scratch = {'L': n}
    total = 'L'
    for i, name in enumerate(addends):
        out = 'R' if i == len(addends) - 1 else 'L' + ''.join(addends[:i + 1])
        adds, add_scratch = scan_add_phases(threads, 2 * q, m, width_bits,
                                            a=total, b=name, out=out,
                                            tag=name.lower() + '-')
        phases += adds
        scratch.update(add_scratch)
        scratch[name] = n
        total = out

    return PhasedKernel(cfg, phases, scratch, outputs=['R'],
                        name='bmul_classical')


def run_bmul_classical_block(as_, bs, q=DEFAULT_Q, **kwargs):
    """Multiplies two lists of big integers pairwise in one block."""
    check_operands(*(list(as_) + list(bs)))
    if len(as_) != len(bs):
        raise ValueError('Batches differ in length')
    m, width_bits = len(as_[0]), as_[0].width_bits
    cfg = BlockConfig(m, q=q, ipb=len(as_), kind='mul')
    inputs = {
        'A': [int(x) for a in as_ for x in a.limbs],
        'B': [int(x) for b in bs for x in b.limbs],
    }
    out = run_phased_kernel(bmul_classical_kernel(cfg, width_bits), inputs,
                            **kwargs)['R']
    return [BigUint(out[i:i + m], width_bits) for i in range(0, len(out), m)]
