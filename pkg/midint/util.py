from urllib.parse import urlparse, parse_qsl

import numpy as np


# options that stay strings; everything else in a workload URL is an integer
_TEXT_OPTIONS = ('engine',)


def parse_workload_url(url):
    """
    Convenience function for parsing workload URLs, e.g.

        mul-ntt://4096/64?field=64&digit_bits=22&runs=5

    The scheme names the workload, the host part is the integer size in bits
    and the first path component is the instance count.
    """
    parsed = urlparse(url)

    # check for valid-ish url
    scheme = parsed.scheme
    if scheme in [None, '']:
        raise ValueError('Not a valid URL')

    try:
        num_bits = int(parsed.netloc)
    except ValueError:
        raise ValueError('Bad bit size in URL: {}'.format(url))

    path_parts = [x for x in parsed.path.split('/') if x]
    try:
        num_insts = int(path_parts[0]) if path_parts else None
    except ValueError:
        raise ValueError('Bad instance count in URL: {}'.format(url))

    options = {}
    for key, val in parse_qsl(parsed.query):
        key = key.replace('-', '_')
        if key in _TEXT_OPTIONS:
            options[key] = val
        else:
            try:
                options[key] = int(val)
            except ValueError:
                raise ValueError('Option `{}` must be an integer'.format(key))

    return {
        'op':           scheme,
        'num_bits':     num_bits,
        'num_insts':    num_insts,
        'options':      options,
    }


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n):
    """Smallest power of two >= n (1 for n <= 1)."""
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


def log2_exact(n):
    if not is_power_of_two(n):
        raise ValueError('{} is not a power of two'.format(n))
    return n.bit_length() - 1


def ceil_div(a, b):
    return -(-a // b)


################################################################################
# BITS
################################################################################

def words_to_bits(words):
    """Little-endian bit array (uint8 0/1) of a little-endian word array."""
    return np.unpackbits(np.ascontiguousarray(words).view(np.uint8),
                         bitorder='little')


def bits_to_words(bits, dtype):
    """Inverse of words_to_bits; len(bits) must fill whole words."""
    return np.packbits(bits, bitorder='little').view(dtype)


def bits_to_digits(bits, digit_bits):
    """Groups a bit array into little-endian digits of `digit_bits` bits."""
    weights = np.left_shift(np.uint64(1),
                            np.arange(digit_bits, dtype=np.uint64))
    groups = bits.reshape(-1, digit_bits).astype(np.uint64)
    return groups @ weights


def digits_to_bits(digits, digit_bits):
    shifts = np.arange(digit_bits, dtype=np.uint64)
    digits = np.asarray(digits, dtype=np.uint64)
    bits = (digits[:, None] >> shifts) & np.uint64(1)
    return bits.astype(np.uint8).reshape(-1)
