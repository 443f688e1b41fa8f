"""
Schoolbook reference arithmetic on plain Python ints.

Nothing here touches the kernel modules: limbs are lifted to Python ints, the
carry ripples one limb at a time and products accumulate in unbounded
integers before they are reduced.
"""
from midint.base import BigUint, DigitVector, check_operands


def _ripple(xs, ys, base_bits):
    mask = (1 << base_bits) - 1
    out = []
    carry = 0
    for x, y in zip(xs, ys):
        s = x + y + carry
        out.append(s & mask)
        carry = s >> base_bits
    return out


def _schoolbook(xs, ys, base_bits):
    n = len(xs)
    acc = [0] * (2 * n)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            acc[i + j] += x * y

    mask = (1 << base_bits) - 1
    out = []
    carry = 0
    for column in acc[:n]:
        s = column + carry
        out.append(s & mask)
        carry = s >> base_bits
    return out


def oracle_add(a, b):
    check_operands(a, b)
    return BigUint(_ripple(a.limbs.tolist(), b.limbs.tolist(), a.width_bits),
                   a.width_bits)


def oracle_mul(a, b):
    check_operands(a, b)
    return BigUint(_schoolbook(a.limbs.tolist(), b.limbs.tolist(),
                               a.width_bits), a.width_bits)


def oracle_add_base(a, b):
    """Direct base-2**d addition of digit vectors, mod 2**(d*len)."""
    if len(a) != len(b) or a.digit_bits != b.digit_bits:
        raise ValueError('Digit vectors differ in shape')
    return DigitVector(_ripple(a.digits.tolist(), b.digits.tolist(),
                               a.digit_bits), a.digit_bits, a.container_bits)


def oracle_mul_base(a, b):
    if len(a) != len(b) or a.digit_bits != b.digit_bits:
        raise ValueError('Digit vectors differ in shape')
    return DigitVector(_schoolbook(a.digits.tolist(), b.digits.tolist(),
                                   a.digit_bits), a.digit_bits,
                       a.container_bits)


def oracle_poly(a, b, mul=oracle_mul, add=oracle_add):
    """(a*a + b) * (b*b + b) + a*b"""
    left = add(mul(a, a), b)
    right = add(mul(b, b), b)
    return add(mul(left, right), mul(a, b))
