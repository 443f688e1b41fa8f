"""
Arithmetic in Z_p for primes of the shape p = k * 2**n + 1.

Such a field holds a 2**n-th root of unity, so it supports exact
number-theoretic transforms of any power-of-two length up to 2**n. Elements
are plain Python ints in [0, p).
"""
import logging
from collections import namedtuple

import petl as etl

from midint.scan_add import exclusive_scan
from midint.util import is_power_of_two, log2_exact


logger = logging.getLogger(__name__)

# witnesses that make Miller-Rabin deterministic below 2**64
PRIME_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
PRIME_LIMIT = 1 << 64
WORD_SIZES = (32, 64)
DEFAULT_GENERATOR_TRIES = 1000

FIELD_SPEC_FIELDS = ('p', 'k', 'n', 'g', 'full_bits')


class FieldSpec(namedtuple('FieldSpec', FIELD_SPEC_FIELDS)):
    """
    A prime field p = k * 2**n + 1 with an element g of order exactly 2**n.
    full_bits is the machine word holding an element; products need twice
    that and digits get half.
    """
    __slots__ = ()

    @property
    def half_bits(self):
        return self.full_bits // 2

    @property
    def double_bits(self):
        return 2 * self.full_bits

    @property
    def name(self):
        return 'PrimeField{}'.format(self.full_bits)


PRIME_FIELD_32 = FieldSpec(p=3221225473, k=3, n=30, g=13, full_bits=32)
PRIME_FIELD_64 = FieldSpec(p=4179340454199820289, k=29, n=57, g=21,
                           full_bits=64)
FIELD_SPECS = {32: PRIME_FIELD_32, 64: PRIME_FIELD_64}


OmegaTable = namedtuple('OmegaTable', ['spec', 'omegas', 'omegas_inv',
                                       'inv_m'])


################################################################################
# FIELD OPS
################################################################################

def pf_add(x, y, spec):
    r = x + y
    if r >= spec.p:
        r -= spec.p
    return r


def pf_sub(x, y, spec):
    r = x
    if x < y:
        r += spec.p
    return r - y


def pf_mul(x, y, spec):
    return (x * y) % spec.p


def pf_pow(x, e, spec):
    """x**e mod p by square-and-multiply."""
    if e < 0:
        raise ValueError('Negative exponent: {}'.format(e))
    result, base = 1, x % spec.p
    while e:
        if e & 1:
            result = pf_mul(result, base, spec)
        base = pf_mul(base, base, spec)
        e >>= 1
    return result % spec.p


def pf_inv(x, spec):
    """Multiplicative inverse by Fermat's little theorem."""
    if x % spec.p == 0:
        raise ZeroDivisionError('0 has no inverse mod {}'.format(spec.p))
    return pf_pow(x, spec.p - 2, spec)


################################################################################
# PRIMES
################################################################################

def _miller_rabin_round(n, a):
    d, r = n - 1, 0
    while d & 1 == 0:
        d >>= 1
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n):
    """Deterministic Miller-Rabin for n < 2**64."""
    if n >= PRIME_LIMIT:
        raise ValueError('{} is too large for a deterministic test'.format(n))
    if n <= PRIME_BASES[-1]:
        return n in PRIME_BASES
    if n & 1 == 0:
        return False
    return all(_miller_rabin_round(n, a) for a in PRIME_BASES)


def has_order_two_power(g, n, p):
    """True iff g has multiplicative order exactly 2**n mod p."""
    if pow(g, 1 << n, p) != 1:
        return False
    return n == 0 or pow(g, 1 << (n - 1), p) != 1


def verify_spec(spec):
    """Checks the shape, primality and generator order of a FieldSpec."""
    if spec.full_bits not in WORD_SIZES or spec.p >> spec.full_bits:
        return False
    if spec.k % 2 == 0 or spec.p != (spec.k << spec.n) + 1:
        return False
    if not is_prime(spec.p):
        return False
    return has_order_two_power(spec.g, spec.n, spec.p)


def _find_generator(p, k, n, tries):
    # a**k has order dividing 2**n; it is exactly 2**n for any non-residue a
    for a in range(2, min(p, tries + 2)):
        g = pow(a, k, p)
        if has_order_two_power(g, n, p):
            return g
    return None


def find_ntt_prime(n_min, word_bits=32, generator_tries=DEFAULT_GENERATOR_TRIES):
    """
    Searches for the prime k * 2**n + 1 below 2**word_bits with the smallest
    n >= n_min, taking the largest odd k for that n.
    """
    if word_bits not in WORD_SIZES:
        raise ValueError('Word size must be one of {}'.format(WORD_SIZES))
    if n_min < 1:
        raise ValueError('n_min must be at least 1')

    for n in range(n_min, word_bits):
        k_max = ((1 << word_bits) - 2) >> n
        if k_max % 2 == 0:
            k_max -= 1
        for k in range(k_max, 0, -2):
            p = (k << n) + 1
            if not is_prime(p):
                continue
            g = _find_generator(p, k, n, generator_tries)
            if g is None:
                continue
            spec = FieldSpec(p=p, k=k, n=n, g=g, full_bits=word_bits)
            logger.info('found %s', spec)
            return spec

    raise LookupError('No prime k*2**n+1 below 2**{} with n >= {}'
                      .format(word_bits, n_min))


################################################################################
# ROOTS OF UNITY
################################################################################

def omega_table(spec, m):
    """
    Powers of the m-th root of unity w = g**(2**(n - log2 m)) and of its
    inverse, plus 1/m.
    """
    if not is_power_of_two(m):
        raise ValueError('Transform length must be a power of two: {}'
                         .format(m))
    lg_m = log2_exact(m)
    if lg_m > spec.n:
        raise ValueError('{} supports transforms up to 2**{}, not {}'
                         .format(spec.name, spec.n, m))

    omega = pf_pow(spec.g, 1 << (spec.n - lg_m), spec)
    omega_inv = pf_inv(omega, spec)

    def mul(x, y):
        return pf_mul(x, y, spec)

    return OmegaTable(
        spec=spec,
        omegas=tuple(exclusive_scan(mul, 1, [omega] * m)),
        omegas_inv=tuple(exclusive_scan(mul, 1, [omega_inv] * m)),
        inv_m=pf_inv(m % spec.p, spec),
    )


################################################################################
# FIXTURES
################################################################################

def dump_field_specs(specs, path):
    """Writes FieldSpecs to a JSON array of objects."""
    table = etl.fromdicts([spec._asdict() for spec in specs],
                          header=FIELD_SPEC_FIELDS)
    etl.tojson(table, path)


def load_field_specs(path):
    specs = []
    for row in etl.dicts(etl.fromjson(path, header=FIELD_SPEC_FIELDS)):
        specs.append(FieldSpec(**{f: int(row[f]) for f in FIELD_SPEC_FIELDS}))
    return specs
