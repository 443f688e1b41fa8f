import re

import numpy as np

from midint.util import (words_to_bits, bits_to_words, bits_to_digits,
                         digits_to_bits, next_power_of_two, ceil_div)


# little-endian unsigned word types by width
WORD_DTYPES = {
    8:  np.dtype('<u1'),
    16: np.dtype('<u2'),
    32: np.dtype('<u4'),
    64: np.dtype('<u8'),
}
DEFAULT_WIDTH = 64
DEFAULT_Q = 4
DEFAULT_IPB = 1
BLOCK_KINDS = ('add', 'mul', 'fft')

HEX_RE = re.compile(r'^(0x)?[0-9a-fA-F]+$')


def _check_width(width_bits):
    if width_bits not in WORD_DTYPES:
        raise ValueError('Unsupported word width: {}'.format(width_bits))


def _limb_array(limbs, width_bits):
    dtype = WORD_DTYPES[width_bits]
    if isinstance(limbs, np.ndarray) and limbs.dtype == dtype:
        arr = limbs.copy()
    else:
        values = [int(x) for x in limbs]
        if any(v < 0 or v >> width_bits for v in values):
            raise ValueError('Limb out of range for {}-bit words'
                             .format(width_bits))
        arr = np.array(values, dtype=dtype)
    if arr.ndim != 1 or len(arr) == 0:
        raise ValueError('A big integer needs at least one limb')
    arr.setflags(write=False)
    return arr


################################################################################
# WORDS
################################################################################

class BigUint(object):
    """
    Fixed-length unsigned integer held as little-endian w-bit limbs. The value
    is sum(limbs[i] * 2**(w*i)) and every result has the length and width of
    its operands, so arithmetic is mod 2**(w*M).
    """
    def __init__(self, limbs, width_bits=DEFAULT_WIDTH):
        _check_width(width_bits)
        self.width_bits = width_bits
        self.limbs = _limb_array(limbs, width_bits)

    def __repr__(self):
        return 'BigUint(w={}, M={}, 0x{})'.format(self.width_bits, len(self),
                                                 to_hex(self))

    def __len__(self):
        return len(self.limbs)

    def __eq__(self, other):
        if not isinstance(other, BigUint):
            return NotImplemented
        return (self.width_bits == other.width_bits and
                np.array_equal(self.limbs, other.limbs))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.width_bits, self.limbs.tobytes()))

    @property
    def dtype(self):
        return self.limbs.dtype

    @property
    def num_bits(self):
        return self.width_bits * len(self)

    @property
    def max_word(self):
        return (1 << self.width_bits) - 1

    def to_int(self):
        return int.from_bytes(self.limbs.tobytes(), 'little')

    @classmethod
    def from_int(cls, value, length, width_bits=DEFAULT_WIDTH):
        _check_width(width_bits)
        if value < 0:
            raise ValueError('Negative values are not representable')
        if value >> (width_bits * length):
            raise ValueError('Value does not fit in {} x {}-bit words'
                             .format(length, width_bits))
        raw = value.to_bytes(length * width_bits // 8, 'little')
        return cls(np.frombuffer(raw, dtype=WORD_DTYPES[width_bits]),
                   width_bits=width_bits)

    @classmethod
    def zero(cls, length, width_bits=DEFAULT_WIDTH):
        return cls(np.zeros(length, dtype=WORD_DTYPES[width_bits]), width_bits)

    @classmethod
    def ones(cls, length, width_bits=DEFAULT_WIDTH):
        """All limbs at the max word (the longest carry chain)."""
        dtype = WORD_DTYPES[width_bits]
        return cls(np.full(length, np.iinfo(dtype).max, dtype=dtype),
                   width_bits)

    @classmethod
    def random(cls, length, width_bits=DEFAULT_WIDTH, rng=None):
        rng = rng if rng is not None else np.random.default_rng()
        dtype = WORD_DTYPES[width_bits]
        limbs = rng.integers(0, np.iinfo(dtype).max, size=length,
                             dtype=dtype, endpoint=True)
        return cls(limbs, width_bits)


def from_hex(text, length, width_bits=DEFAULT_WIDTH):
    """Parses a big-endian hex string into a BigUint of `length` limbs."""
    text = text.strip()
    if not HEX_RE.match(text):
        raise ValueError('Invalid hex string: {!r}'.format(text))
    return BigUint.from_int(int(text, 16), length, width_bits)


def to_hex(x):
    return format(x.to_int(), 'x')


def check_operands(*xs):
    """Raises ValueError unless all big integers share length and width."""
    first = xs[0]
    for x in xs[1:]:
        if len(x) != len(first) or x.width_bits != first.width_bits:
            raise ValueError('Operands differ in shape: {} x {}-bit vs {} x '
                             '{}-bit'.format(len(first), first.width_bits,
                                             len(x), x.width_bits))


def pad_to_multiple(x, multiple):
    """Appends zero limbs until len(x) is a multiple of `multiple`."""
    target = ceil_div(len(x), multiple) * multiple
    return resize(x, target)


def pad_to_power_of_two(x):
    return resize(x, next_power_of_two(len(x)))


def resize(x, length):
    """Zero-extends or truncates a BigUint or DigitVector to `length` cells."""
    if length == len(x):
        return x
    if isinstance(x, DigitVector):
        return x.resize(length)
    limbs = np.zeros(length, dtype=x.dtype)
    keep = min(length, len(x))
    limbs[:keep] = x.limbs[:keep]
    return BigUint(limbs, x.width_bits)


def stack_instances(xs):
    """Flattens a batch of equally shaped big integers into one limb array."""
    check_operands(*xs)
    return np.concatenate([x.limbs for x in xs])


def split_instances(limbs, length, width_bits=DEFAULT_WIDTH):
    if len(limbs) % length:
        raise ValueError('{} limbs do not split into instances of {}'
                         .format(len(limbs), length))
    return [BigUint(limbs[i:i + length], width_bits)
            for i in range(0, len(limbs), length)]


################################################################################
# DIGITS
################################################################################

class DigitVector(object):
    """Little-endian digits of `digit_bits` bits, stored in wider cells."""

    def __init__(self, digits, digit_bits, container_bits=None):
        container_bits = container_bits or digit_bits + 1
        if not 1 <= digit_bits < container_bits <= 64:
            raise ValueError('Bad digit width {} for {}-bit cells'
                             .format(digit_bits, container_bits))
        values = [int(x) for x in digits]
        if not values:
            raise ValueError('A digit vector needs at least one digit')
        if any(v < 0 or v >> digit_bits for v in values):
            raise ValueError('Digit out of range for base 2**{}'
                             .format(digit_bits))
        self.digit_bits = digit_bits
        self.container_bits = container_bits
        self.digits = np.array(values, dtype=np.uint64)
        self.digits.setflags(write=False)

    def __repr__(self):
        return 'DigitVector(d={}, n={}, {})'.format(
            self.digit_bits, len(self), self.digits.tolist())

    def __len__(self):
        return len(self.digits)

    def __eq__(self, other):
        if not isinstance(other, DigitVector):
            return NotImplemented
        return (self.digit_bits == other.digit_bits and
                np.array_equal(self.digits, other.digits))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.digit_bits, self.digits.tobytes()))

    def to_int(self):
        value = 0
        for digit in reversed(self.digits.tolist()):
            value = (value << self.digit_bits) | digit
        return value

    @classmethod
    def from_int(cls, value, length, digit_bits, container_bits=None):
        if value < 0 or value >> (digit_bits * length):
            raise ValueError('Value does not fit in {} base-2**{} digits'
                             .format(length, digit_bits))
        mask = (1 << digit_bits) - 1
        digits = [(value >> (digit_bits * i)) & mask for i in range(length)]
        return cls(digits, digit_bits, container_bits)

    def resize(self, length):
        """Zero-extends or truncates (mod 2**(d*length)) to `length` digits."""
        digits = self.digits.tolist()[:length]
        digits += [0] * (length - len(digits))
        return DigitVector(digits, self.digit_bits, self.container_bits)


def words_to_digits(x, digit_bits, length=None, container_bits=None):
    """
    Re-slices the bits of a BigUint into base-2**digit_bits digits.

    Params
    ----------------------------------------------------------------------------
    - length:           number of digits; defaults to the next power of two
                        >= ceil(w*M / digit_bits)
    - container_bits:   storage cell width; defaults to digit_bits + 1
    """
    if not 1 <= digit_bits < 64:
        raise ValueError('Bad digit width: {}'.format(digit_bits))
    needed = ceil_div(x.num_bits, digit_bits)
    if length is None:
        length = next_power_of_two(needed)

    bits = words_to_bits(x.limbs)
    total = length * digit_bits
    if bits[total:].any():
        raise ValueError('Value does not fit in {} digits'.format(length))
    padded = np.zeros(total, dtype=np.uint8)
    keep = min(total, len(bits))
    padded[:keep] = bits[:keep]

    digits = bits_to_digits(padded, digit_bits)
    return DigitVector(digits, digit_bits, container_bits)


def digits_to_words(v, length, width_bits=DEFAULT_WIDTH, truncate=False):
    """
    Inverse of words_to_digits. With `truncate` the value is reduced mod
    2**(w*length); otherwise a value that does not fit raises ValueError.
    """
    _check_width(width_bits)
    bits = digits_to_bits(v.digits, v.digit_bits)
    total = length * width_bits
    if bits[total:].any() and not truncate:
        raise ValueError('Value does not fit in {} x {}-bit words'
                         .format(length, width_bits))
    padded = np.zeros(total, dtype=np.uint8)
    keep = min(total, len(bits))
    padded[:keep] = bits[:keep]
    return BigUint(bits_to_words(padded, WORD_DTYPES[width_bits]), width_bits)


################################################################################
# BLOCKS
################################################################################

class BlockConfig(object):
    """
    Shape of one virtual block.

    For 'add' and 'mul' each thread owns 2*q consecutive elements, so the
    block has ipb*m/(2*q) threads. For 'fft' each thread owns q elements of a
    length-m transform (m/q threads per instance).
    """
    def __init__(self, m, q=DEFAULT_Q, ipb=DEFAULT_IPB, kind='add'):
        if kind not in BLOCK_KINDS:
            raise ValueError('Unknown block kind: {}'.format(kind))
        if m < 1 or q < 1 or ipb < 1:
            raise ValueError('Block sizes must be positive')
        if kind == 'fft':
            if q < 2 or q % 2 or m % q:
                raise ValueError('FFT blocks need an even q dividing m '
                                 '(m={}, q={})'.format(m, q))
        elif m % (2 * q):
            raise ValueError('2q must divide m (m={}, q={}); pad first'
                             .format(m, q))
        self.m = m
        self.q = q
        self.ipb = ipb
        self.kind = kind

    def __repr__(self):
        return 'BlockConfig(kind={}, m={}, q={}, ipb={}, threads={})'.format(
            self.kind, self.m, self.q, self.ipb, self.thread_count)

    @property
    def per_thread(self):
        return self.q if self.kind == 'fft' else 2 * self.q

    @property
    def threads_per_instance(self):
        return self.m // self.per_thread

    @property
    def thread_count(self):
        return self.ipb * self.threads_per_instance

    @property
    def size(self):
        """Elements in the whole block."""
        return self.ipb * self.m
