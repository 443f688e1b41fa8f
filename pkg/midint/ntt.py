"""
Multiplication by number-theoretic transform.

Operands are re-sliced into base-2**d digits small enough that every
coefficient of their product convolution stays below p. The digit vectors are
zero-padded to a power of two at least twice their length (the convolution is
acyclic), transformed with an iterative Cooley-Tukey NTT, multiplied
pointwise, and transformed back. The coefficients are split into d-bit low
digits, a high digit and a carry digit per chunk of q, and one base-2**d
addition resolves the carries.
"""
import logging
from collections import namedtuple

from midint.base import DigitVector, BlockConfig, words_to_digits, \
    digits_to_words, check_operands
from midint.block import Phase, PhasedKernel, run_phased_kernel
from midint.prime_field import pf_add, pf_sub, pf_mul, omega_table, \
    PRIME_FIELD_64
from midint.scan_add import badd_base, scan_add_phases
from midint.util import log2_exact, next_power_of_two, ceil_div


logger = logging.getLogger(__name__)

DEFAULT_NTT_Q = 2


FieldVector = namedtuple('FieldVector', ['elems', 'spec'])


def field_vector(values, spec):
    elems = tuple(int(x) for x in values)
    if any(not 0 <= x < spec.p for x in elems):
        raise ValueError('Field elements must lie in [0, {})'.format(spec.p))
    return FieldVector(elems, spec)


################################################################################
# TRANSFORMS
################################################################################

def _bit_reverse(i, bits):
    if bits == 0:
        return 0
    return int(format(i, '0{}b'.format(bits))[::-1], 2)


def bit_reverse_permute(v, lg_m):
    elems = v.elems if isinstance(v, FieldVector) else tuple(v)
    if len(elems) != 1 << lg_m:
        raise ValueError('Length {} is not 2**{}'.format(len(elems), lg_m))
    out = [0] * len(elems)
    for i, x in enumerate(elems):
        out[_bit_reverse(i, lg_m)] = x
    if isinstance(v, FieldVector):
        return FieldVector(tuple(out), v.spec)
    return out


def _butterfly(x, vtid, t, omegas, spec):
    """One radix-2 butterfly of stage t for virtual thread vtid, in place."""
    length = 1 << t
    half = length >> 1
    r = len(x) >> t
    k = vtid >> (t - 1)
    j = vtid & (half - 1)
    klj = k * length + j

    tau = pf_mul(omegas[r * j], x[klj + half], spec)
    x_klj = x[klj]
    return (klj, pf_add(x_klj, tau, spec)), (klj + half, pf_sub(x_klj, tau, spec))


def _transform(elems, omegas, spec):
    lg_m = log2_exact(len(elems))
    x = bit_reverse_permute(list(elems), lg_m)
    for t in range(1, lg_m + 1):
        for vtid in range(len(x) // 2):
            for idx, value in _butterfly(x, vtid, t, omegas, spec):
                x[idx] = value
    return x


def _check_table(v, tbl):
    if len(v.elems) != len(tbl.omegas):
        raise ValueError('Vector of length {} with a table for {}'
                         .format(len(v.elems), len(tbl.omegas)))


def ntt_forward(v, tbl):
    """out[j] = sum_i v[i] * w**(i*j) mod p."""
    _check_table(v, tbl)
    return FieldVector(tuple(_transform(v.elems, tbl.omegas, tbl.spec)),
                       tbl.spec)


def ntt_inverse(v, tbl):
    _check_table(v, tbl)
    spec = tbl.spec
    x = _transform(v.elems, tbl.omegas_inv, spec)
    return FieldVector(tuple(pf_mul(tbl.inv_m, e, spec) for e in x), spec)


################################################################################
# DIGITS
################################################################################

def max_safe_digit_width(spec, conv_len):
    """Largest d with conv_len * (2**d - 1)**2 < p."""
    if conv_len < 1:
        raise ValueError('Convolution length must be positive')
    d = 0
    while conv_len * ((1 << (d + 1)) - 1) ** 2 < spec.p:
        d += 1
    if d < 1:
        raise ValueError('{} is too small for convolutions of length {}'
                         .format(spec.name, conv_len))
    return d


def split_digits(vals, digit_bits):
    """
    Folds q field elements (weights 2**(d*i)) into q low digits, a high digit
    and a carry digit.
    """
    mask = (1 << digit_bits) - 1
    lows = []
    pending = 0
    for val in vals:
        pending += val
        lows.append(pending & mask)
        pending >>= digit_bits
    high, carry = pending & mask, pending >> digit_bits
    if carry > mask:
        raise ValueError('Aggregate of {} coefficients overflows {} digits'
                         .format(len(vals), len(vals) + 2))
    return lows, high, carry


def _check_layout(spec, m_d, digit_bits, q):
    """Every chunk of q coefficients must fold into q + 2 digits."""
    bound = min(spec.p - 1, m_d * ((1 << digit_bits) - 1) ** 2)
    worst = sum(bound << (digit_bits * i) for i in range(q))
    if worst >> (digit_bits * (q + 2)):
        raise ValueError('q={} chunks of {}-bit digits overflow the low/high/'
                         'carry layout'.format(q, digit_bits))


def _check_transform(spec, m_d, digit_bits, q, check_bound):
    points = next_power_of_two(2 * m_d)
    if points > 1 << spec.n:
        raise ValueError('{} points exceed the 2**{} roots of {}'
                         .format(points, spec.n, spec.name))
    if check_bound:
        safe = max_safe_digit_width(spec, 2 * m_d)
        if digit_bits > safe:
            raise ValueError('{}-bit digits are unsafe for {} digits in {} '
                             '(at most {})'.format(digit_bits, m_d,
                                                   spec.name, safe))
    _check_layout(spec, m_d, digit_bits, q)
    return points


def _publish_writes(chunk, s, m_d, digit_bits, q):
    """Low/high writes of the q coefficients starting at digit s."""
    lows, high, carry = split_digits(chunk, digit_bits)
    writes = [('L', s + i, low) for i, low in enumerate(lows) if s + i < m_d]
    if s + q < m_d:
        writes.append(('H', s + q, high))
    if s + q + 1 < m_d:
        writes.append(('H', s + q + 1, carry))
    return writes


def bmul_ntt(a, b, spec=PRIME_FIELD_64, q=DEFAULT_NTT_Q, check_bound=True):
    """
    a * b mod 2**(d*M_d) for digit vectors of equal length M_d.

    `check_bound` guards the digit width against coefficient wraparound;
    turning it off is only useful to show what goes wrong without it.
    """
    if len(a) != len(b) or a.digit_bits != b.digit_bits:
        raise ValueError('Digit vectors differ in shape')
    if q < 2:
        raise ValueError('Chunks need q >= 2 so carry slots do not collide')
    m_d, digit_bits = len(a), a.digit_bits
    points = _check_transform(spec, m_d, digit_bits, q, check_bound)
    tbl = omega_table(spec, points)
    logger.debug('%s multiply: %d digits of %d bits over %d points', spec.name,
                 m_d, digit_bits, points)

    def padded(v):
        return FieldVector(tuple(v.digits.tolist()) + (0,) * (points - m_d),
                           spec)

    fa = ntt_forward(padded(a), tbl)
    fb = ntt_forward(padded(b), tbl)
    prod = FieldVector(tuple(pf_mul(x, y, spec)
                             for x, y in zip(fa.elems, fb.elems)), spec)
    coeffs = ntt_inverse(prod, tbl).elems

    arrays = {'L': [0] * m_d, 'H': [0] * m_d}
    for s in range(0, m_d, q):
        chunk = list(coeffs[s:s + q])
        chunk += [0] * (q - len(chunk))
        for name, idx, value in _publish_writes(chunk, s, m_d, digit_bits, q):
            arrays[name][idx] = value

    container = digit_bits + 1
    return badd_base(DigitVector(arrays['L'], digit_bits, container),
                     DigitVector(arrays['H'], digit_bits, container))


def check_digit_width(spec, num_bits, digit_bits, q=DEFAULT_NTT_Q):
    """Raises ValueError unless d-bit digits are safe for num_bits operands."""
    if not 1 <= digit_bits < 64:
        raise ValueError('Bad digit width: {}'.format(digit_bits))
    m_d = next_power_of_two(ceil_div(num_bits, digit_bits))
    _check_transform(spec, m_d, digit_bits, q, check_bound=True)


def _widest_digit(spec, num_bits, q):
    for d in range(spec.half_bits, 0, -1):
        try:
            check_digit_width(spec, num_bits, d, q)
        except ValueError:
            continue
        return d
    return None


def ntt_max_bits(spec, q=DEFAULT_NTT_Q):
    """
    Largest power-of-two operand size some digit width handles. Past it the
    coefficient bound forces digits too narrow for the q + 2 digit layout
    (PrimeField32 stops at 8192 bits).
    """
    bits = 32
    if _widest_digit(spec, bits, q) is None:
        return None
    while _widest_digit(spec, bits << 1, q) is not None:
        bits <<= 1
    return bits


def ntt_digit_preset(spec, num_bits, q=DEFAULT_NTT_Q):
    """Widest safe digit for multiplying two num_bits-bit integers."""
    d = _widest_digit(spec, num_bits, q)
    if d is None:
        raise ValueError('No safe digit width in {} for {} bits with q={}; '
                         'it handles at most {} bits'
                         .format(spec.name, num_bits, q, ntt_max_bits(spec, q)))
    return d


def bmul_ntt_words(a, b, spec=PRIME_FIELD_64, digit_bits=None,
                   q=DEFAULT_NTT_Q):
    """a * b mod 2**(w*M) for BigUints, through base-2**d digits."""
    check_operands(a, b)
    if digit_bits is None:
        digit_bits = ntt_digit_preset(spec, a.num_bits, q)
    da = words_to_digits(a, digit_bits)
    db = words_to_digits(b, digit_bits)
    prod = bmul_ntt(da, db, spec, q)
    return digits_to_words(prod, len(a), a.width_bits, truncate=True)


################################################################################
# BLOCK KERNELS
################################################################################

def _stage_phase(name, buffers, t, omegas, spec, threads, q):
    """Stage t butterflies: thread tid runs virtual threads tid + i*threads."""
    def body(tid, shared, private):
        writes = []
        for buf in buffers:
            x = shared[buf]
            for i in range(q // 2):
                for idx, value in _butterfly(x, tid + i * threads, t, omegas,
                                             spec):
                    writes.append((buf, idx, value))
        return writes, private
    return Phase(name, body)


def _transform_phases(cfg, spec, omegas, src, dst, tag):
    """Load, bit-reversal and butterfly phases moving `src` to `dst`."""
    m, q, threads = cfg.m, cfg.q, cfg.thread_count
    lg_m = log2_exact(m)
    staged = [tag + s for s in src]

    def load(tid, shared, private):
        writes = []
        for s, st in zip(src, staged):
            writes.extend((st, i, shared[s][i])
                          for i in range(tid * q, (tid + 1) * q))
        return writes, private

    def permute(tid, shared, private):
        writes = []
        for st, d in zip(staged, dst):
            writes.extend((d, _bit_reverse(i, lg_m), shared[st][i])
                          for i in range(tid * q, (tid + 1) * q))
        return writes, private

    phases = [Phase(tag + 'load', load), Phase(tag + 'permute', permute)]
    for t in range(1, lg_m + 1):
        phases.append(_stage_phase('{}stage{}'.format(tag, t), dst, t, omegas,
                                   spec, threads, q))
    return phases, {name: m for name in staged + list(dst)}


def _check_fft_config(cfg):
    if cfg.kind != 'fft' or cfg.ipb != 1:
        raise ValueError('Need a single-instance fft block, got {}'
                         .format(cfg))


def ntt_forward_kernel(cfg, spec):
    """Forward NTT of buffer X into Y, in 2 + log2(m) phases."""
    _check_fft_config(cfg)
    tbl = omega_table(spec, cfg.m)
    phases, scratch = _transform_phases(cfg, spec, tbl.omegas, ['X'], ['Y'],
                                        'fwd-')
    return PhasedKernel(cfg, phases, scratch, outputs=['Y'],
                        name='ntt_forward')


def bmul_ntt_kernel(cfg, spec, digit_bits):
    """
    Full NTT multiply of digit buffers A and B (cfg.m // 2 digits each) into
    R: forward transforms, pointwise product, inverse transform and scaling,
    low/high publishing and the base-2**d carry resolution.
    """
    _check_fft_config(cfg)
    m, q, threads = cfg.m, cfg.q, cfg.thread_count
    m_d = m // 2
    if m_d % q:
        raise ValueError('q={} must divide the {} digits'.format(q, m_d))
    _check_transform(spec, m_d, digit_bits, q, check_bound=True)
    tbl = omega_table(spec, m)

    fwd, scratch = _transform_phases(cfg, spec, tbl.omegas, ['A', 'B'],
                                     ['FA', 'FB'], 'fwd-')

    def pointwise(tid, shared, private):
        fa, fb = shared['FA'], shared['FB']
        return [('T', i, pf_mul(fa[i], fb[i], spec))
                for i in range(tid * q, (tid + 1) * q)], private

    inv, scratch_inv = _transform_phases(cfg, spec, tbl.omegas_inv, ['T'],
                                         ['IT'], 'inv-')

    def scale(tid, shared, private):
        return [('C', i, pf_mul(tbl.inv_m, shared['IT'][i], spec))
                for i in range(tid * q, (tid + 1) * q)], private

    def publish(tid, shared, private):
        s = tid * q
        if s >= m_d:
            return [], private
        coeffs = shared['C']
        chunk = [coeffs[i] for i in range(s, s + q)]
        return _publish_writes(chunk, s, m_d, digit_bits, q), private

    # the m_d digits are added by the same threads, q // 2 each
    add, scratch_add = scan_add_phases(threads, q // 2, m_d, digit_bits + 1,
                                       a='L', b='H', out='R', tag='add-',
                                       segmented=False, halve=True)

    phases = fwd + [Phase('pointwise', pointwise)] + inv + \
        [Phase('scale', scale), Phase('publish', publish)] + add
    scratch.update(scratch_inv)
    scratch.update(scratch_add)
    scratch.update({'T': m, 'C': m, 'L': m_d, 'H': m_d})
    return PhasedKernel(cfg, phases, scratch, outputs=['R'], name='bmul_ntt')


def run_ntt_forward_block(v, tbl, q=DEFAULT_NTT_Q, **kwargs):
    cfg = BlockConfig(len(v.elems), q=q, kind='fft')
    out = run_phased_kernel(ntt_forward_kernel(cfg, tbl.spec),
                            {'X': list(v.elems)}, **kwargs)
    return FieldVector(tuple(out['Y']), tbl.spec)


def run_bmul_ntt_block(a, b, spec=PRIME_FIELD_64, q=DEFAULT_NTT_Q, **kwargs):
    """Digit-vector multiply on the block model; len(a) must be a power of two."""
    if len(a) != len(b) or a.digit_bits != b.digit_bits:
        raise ValueError('Digit vectors differ in shape')
    m_d = len(a)
    cfg = BlockConfig(2 * m_d, q=q, kind='fft')
    pad = [0] * m_d
    inputs = {'A': a.digits.tolist() + pad, 'B': b.digits.tolist() + pad}
    out = run_phased_kernel(bmul_ntt_kernel(cfg, spec, a.digit_bits), inputs,
                            **kwargs)
    return DigitVector(out['R'], a.digit_bits, a.digit_bits + 1)


def run_bmul_ntt_words_block(a, b, spec=PRIME_FIELD_64, digit_bits=None,
                             q=DEFAULT_NTT_Q, **kwargs):
    check_operands(a, b)
    if digit_bits is None:
        digit_bits = ntt_digit_preset(spec, a.num_bits, q)
    prod = run_bmul_ntt_block(words_to_digits(a, digit_bits),
                              words_to_digits(b, digit_bits), spec, q, **kwargs)
    return digits_to_words(prod, len(a), a.width_bits, truncate=True)
