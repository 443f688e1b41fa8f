import petl as etl

from midint.base import BigUint, DigitVector, BlockConfig, from_hex, to_hex, \
    words_to_digits, digits_to_words, pad_to_multiple, pad_to_power_of_two
from midint.classical import bmul_classical, tiled_mul_reference
from midint.ntt import bmul_ntt, bmul_ntt_words
from midint.prime_field import PRIME_FIELD_32, PRIME_FIELD_64, FieldSpec, \
    find_ntt_prime
from midint.scan_add import badd, badd_batch, badd_base, bbadd
from midint.util import parse_workload_url

# activate the petl extensions
import midint.bench


_MULTIPLIERS = {
    'classical':    bmul_classical,
    'tiled':        tiled_mul_reference,
    'ntt':          bmul_ntt_words,
}


def _algorithm_handler(algorithm):
    """Returns the multiply function for an algorithm name"""
    return _MULTIPLIERS[algorithm.replace('_', '-').lower()]


def bmul(a, b, algorithm='classical', **kwargs):
    """Routes a big-integer multiply to the named algorithm"""
    try:
        handler = _algorithm_handler(algorithm)
    except KeyError:
        raise ValueError('No matching algorithm: {}'.format(algorithm))

    return handler(a, b, **kwargs)


frombench = etl.frombench
